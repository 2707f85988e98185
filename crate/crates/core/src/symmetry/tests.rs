use super::*;
use crate::geometry::{CoordChart, FunctionDecl};
use crate::symexpr::{canonicalize, parse_expr};

fn e(s: &str) -> RatExpr {
    canonicalize(&parse_expr(s).unwrap()).unwrap()
}

fn vb(m: &str, q: &str, decls: &[&str]) -> Metric {
    let ch = CoordChart::new("s", &["t", "r", "theta", "phi"], &["theta", "phi"]).unwrap();
    let decls = decls
        .iter()
        .map(|n| FunctionDecl {
            name: n.to_string(),
            args: vec!["t".into()],
        })
        .collect();
    Metric::from_upper(
        ch,
        &[
            (0, 0, e(&format!("-(1 - ({m})/r + ({q})/r^2)"))),
            (0, 1, e("-1")),
            (2, 2, e("r^2")),
            (3, 3, e("r^2*sin(theta)^2")),
        ],
        decls,
    )
    .unwrap()
}

fn general() -> Metric {
    vb("M(t)", "Q(t)", &["M", "Q"])
}

fn field(g: &Metric, name: &str, comps: &[&str]) -> BundleVectorField {
    BundleVectorField::from_components(g.chart(), name, comps.iter().map(|c| e(c)).collect()).unwrap()
}

fn free(n: usize) -> Metric {
    let names = ["x", "y", "z"];
    let ch = CoordChart::new("s", &names[..n], &[]).unwrap();
    let comps: Vec<(usize, usize, RatExpr)> = (0..n).map(|i| (i, i, RatExpr::one())).collect();
    Metric::from_upper(ch, &comps, vec![]).unwrap()
}

#[test]
fn translations_are_noether_symmetries() {
    let g = general();
    let ds = field(&g, "d_s", &["1", "0", "0", "0", "0"]);
    let dphi = field(&g, "d_phi", &["0", "0", "0", "0", "1"]);
    assert!(verify_noether(&ds, &g, None).unwrap().pass);
    assert!(verify_noether(&dphi, &g, None).unwrap().pass);
}

#[test]
fn time_translation_residual() {
    let g = general();
    let dt = field(&g, "d_t", &["0", "1", "0", "0", "0"]);
    let rep = verify_noether(&dt, &g, None).unwrap();
    assert!(!rep.pass);
    assert_eq!(rep.residuals[0], e("(D(M(t), t)/r - D(Q(t), t)/r^2)*D(t, s)^2"));
    let special = vb("1", "t", &[]);
    let rep = verify_noether(&dt, &special, None).unwrap();
    assert_eq!(rep.residuals[0], e("-D(t, s)^2/r^2"));
    assert!(rep.first_integral.is_none());
}

#[test]
fn rotations_pass_both_checks() {
    let g = general();
    let x4 = field(&g, "X4", &["0", "0", "0", "-cos(phi)", "cot(theta)*sin(phi)"]);
    let x5 = field(&g, "X5", &["0", "0", "0", "sin(phi)", "cot(theta)*cos(phi)"]);
    for x in [&x4, &x5] {
        assert!(verify_noether(x, &g, None).unwrap().pass);
        assert!(verify_liepoint(x, &g).unwrap().pass);
    }
}

#[test]
fn first_integrals() {
    let g = general();
    let l = geodesic_lagrangian(&g);
    let dphi = field(&g, "d_phi", &["0", "0", "0", "0", "1"]);
    let i = noether_first_integral(&dphi, &l, &RatExpr::zero()).unwrap();
    assert_eq!(i, e("-2*r^2*sin(theta)^2*D(phi, s)"));
    let ds = field(&g, "d_s", &["1", "0", "0", "0", "0"]);
    assert_eq!(noether_first_integral(&ds, &l, &RatExpr::zero()).unwrap(), l);
    let sys = geodesic_system(&g).unwrap();
    assert!(is_conserved(&i, &sys).unwrap());
    let dt = field(&g, "d_t", &["0", "1", "0", "0", "0"]);
    assert!(matches!(
        noether_first_integral(&dt, &l, &RatExpr::zero()),
        Err(SymmetryError::NotASymmetry(_))
    ));
}

#[test]
fn scaling_is_a_point_symmetry_of_the_papapetrou_model() {
    let g = vb("t", "t^2", &[]);
    let x = field(&g, "S", &["s", "t", "r", "0", "0"]);
    assert!(verify_liepoint(&x, &g).unwrap().pass);
}

#[test]
fn free_particle_dimensions() {
    for (n, dim) in [(1, 8), (2, 15)] {
        let g = free(n);
        let ds = determining_system(&Target::liepoint(&g).unwrap()).unwrap();
        let sol = solve_determining(&ds, &Ansatz::polynomial(g.chart(), 2)).unwrap();
        assert_eq!(sol.dim(), dim, "free system in {n} dimensions");
        let sys = geodesic_system(&g).unwrap();
        for f in &sol.fields {
            assert!(verify_liepoint_system(f, &sys).unwrap().pass);
        }
    }
}

#[test]
fn free_particle_noether() {
    // Translations in s and x, the Galilean boost with gauge, and s∂_s + x/2 ∂_x.
    let g = free(1);
    let ds = determining_system(&Target::noether(&g)).unwrap();
    let sol = solve_determining(&ds, &Ansatz::polynomial(g.chart(), 2)).unwrap();
    assert_eq!(sol.dim(), 5);
    let l = geodesic_lagrangian(&g);
    for (f, a) in sol.fields.iter().zip(&sol.gauges) {
        assert!(noether_residual(f, &l, a).unwrap().is_zero());
    }
}

#[test]
fn ansatz_validation() {
    assert_eq!(Ansatz::from_basis(vec![]).validate(), Err(SymmetryError::EmptyAnsatz));
    assert_eq!(
        Ansatz::from_basis(vec![e("r"), e("1"), e("r")]).validate(),
        Err(SymmetryError::AnsatzDuplicate(0, 2))
    );
    let g = free(1);
    let ds = determining_system(&Target::liepoint(&g).unwrap()).unwrap();
    let dependent = Ansatz::from_basis(vec![e("sin(x)^2"), e("cos(x)^2"), e("1")]);
    assert!(matches!(
        solve_determining(&ds, &dependent),
        Err(SymmetryError::AnsatzDependent)
    ));
    let open = Ansatz::from_basis(vec![e("1"), e("atan(x)")]);
    // arctan stays opaque, so its derivatives leave the span.
    assert!(matches!(
        solve_determining(&ds, &open),
        Err(SymmetryError::AnsatzNotClosed(_))
    ));
}

#[test]
fn default_ansatz_shape() {
    let a = Ansatz::for_metric(&general(), 1);
    // {1, s, t, r} × 5 polar × 3 azimuth kernels.
    assert_eq!(a.len(), 4 * 5 * 3);
    assert_eq!(a.kernels.polar, vec![crate::symexpr::Symbol::new("theta")]);
}
