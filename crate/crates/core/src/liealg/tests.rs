use super::*;
use crate::geometry::CoordChart;
use crate::symexpr::{canonicalize, int, parse_expr, RatExpr};

fn e(s: &str) -> RatExpr {
    canonicalize(&parse_expr(s).unwrap()).unwrap()
}

fn chart() -> CoordChart {
    CoordChart::new("s", &["t", "r", "theta", "phi"], &["theta", "phi"]).unwrap()
}

fn f(name: &str, comps: &[&str]) -> BundleVectorField {
    BundleVectorField::from_components(&chart(), name, comps.iter().map(|c| e(c)).collect()).unwrap()
}

fn rot4() -> BundleVectorField {
    f("X4", &["0", "0", "0", "-cos(phi)", "cot(theta)*sin(phi)"])
}

fn rot5() -> BundleVectorField {
    f("X5", &["0", "0", "0", "sin(phi)", "cot(theta)*cos(phi)"])
}

fn general() -> LieAlgebra {
    structure_constants(&[
        f("X1", &["1", "0", "0", "0", "0"]),
        f("X2", &["0", "1", "0", "0", "0"]),
        f("X3", &["0", "0", "0", "0", "1"]),
        rot4(),
        rot5(),
    ])
    .unwrap()
}

fn special_61() -> LieAlgebra {
    structure_constants(&[
        f("X1", &["1", "0", "0", "0", "0"]),
        f("X2", &["0", "0", "0", "0", "1"]),
        rot4().with_name("X3"),
        rot5().with_name("X4"),
    ])
    .unwrap()
}

fn special_62() -> LieAlgebra {
    structure_constants(&[
        f("X1", &["s", "t", "r", "0", "0"]),
        f("X2", &["1", "0", "0", "0", "0"]),
        f("X3", &["0", "0", "0", "0", "1"]),
        rot4(),
        rot5(),
    ])
    .unwrap()
}

fn diag(v: &[i64]) -> QMatrix {
    let mut m = QMatrix::zeros(v.len(), v.len());
    for (i, x) in v.iter().enumerate() {
        m[(i, i)] = int(*x);
    }
    m
}

fn vecq(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|x| int(*x)).collect()
}

#[test]
fn brackets_of_the_general_algebra() {
    let g = general();
    assert_eq!(g.basis_bracket(2, 3), vecq(&[0, 0, 0, 0, 1]).as_slice());
    assert_eq!(g.basis_bracket(2, 4), vecq(&[0, 0, 0, -1, 0]).as_slice());
    assert_eq!(g.basis_bracket(3, 4), vecq(&[0, 0, 1, 0, 0]).as_slice());
    assert!(g.basis_bracket(0, 3).iter().all(Zero::is_zero));
    g.check_axioms().unwrap();
}

#[test]
fn constant_mass_linear_charge_algebra() {
    let g = special_61();
    assert_eq!(g.basis_bracket(1, 2), vecq(&[0, 0, 0, 1]).as_slice());
    assert_eq!(g.basis_bracket(1, 3), vecq(&[0, 0, -1, 0]).as_slice());
    assert_eq!(g.basis_bracket(2, 3), vecq(&[0, 1, 0, 0]).as_slice());
    assert_eq!(g.killing_form(), diag(&[0, -2, -2, -2]));
    let r = g.radical().unwrap();
    assert_eq!(r, g.span_of(&[0]));
    assert!(g.levi_check(&r, &g.span_of(&[1, 2, 3])).unwrap());
}

#[test]
fn linear_mass_quadratic_charge_algebra() {
    let g = special_62();
    assert_eq!(g.basis_bracket(0, 1), vecq(&[0, -1, 0, 0, 0]).as_slice());
    assert_eq!(g.killing_form(), diag(&[1, 0, -2, -2, -2]));
    let ds = g.derived_series();
    assert_eq!(ds.len(), 3);
    assert_eq!(ds[1], g.span_of(&[1, 2, 3, 4]));
    assert_eq!(ds[2], g.span_of(&[2, 3, 4]));
    assert_eq!(g.bracket_space(&ds[2], &ds[2]), ds[2]);
    assert!(!g.is_solvable());
    assert_eq!(g.radical().unwrap(), g.span_of(&[0, 1]));
    assert!(g.levi_check(&g.span_of(&[0, 1]), &g.span_of(&[2, 3, 4])).unwrap());
    let ad1 = g.ad_basis(0);
    let mut expect = QMatrix::zeros(5, 5);
    expect[(1, 1)] = int(-1);
    assert_eq!(ad1, expect);
}

#[test]
fn general_algebra_structure() {
    let g = general();
    assert_eq!(g.killing_form(), diag(&[0, 0, -2, -2, -2]));
    assert!(!g.is_semisimple());
    let ds = g.derived_series();
    assert_eq!(ds[1], g.span_of(&[2, 3, 4]));
    assert_eq!(g.radical().unwrap(), g.span_of(&[0, 1]));
    assert!(g.levi_check(&g.span_of(&[0, 1]), &g.span_of(&[2, 3, 4])).unwrap());
    assert!(!g.levi_check(&g.span_of(&[2, 3, 4]), &g.span_of(&[0, 1])).unwrap());
    assert!(matches!(
        g.levi_check(&g.span_of(&[0]), &g.span_of(&[2, 3, 4])),
        Err(LieError::DimensionMismatch { .. })
    ));
    assert!(g.ad_basis(0).is_zero());
    let (r, h) = g.levi_heuristic().unwrap();
    assert_eq!((r.dim(), h.dim()), (2, 3));
}

#[test]
fn rotation_triple_is_perfect() {
    let g = structure_constants(&[f("X3", &["0", "0", "0", "0", "1"]), rot4(), rot5()]).unwrap();
    assert_eq!(g.derived_series(), vec![g.full()]);
    assert!(g.is_semisimple());
    assert!(g.radical().unwrap().is_zero());
}

#[test]
fn abelian_and_errors() {
    let g = structure_constants(&[f("a", &["1", "0", "0", "0", "0"]), f("b", &["0", "1", "0", "0", "0"])]).unwrap();
    assert!(g.constants().iter().flatten().flatten().all(Zero::is_zero));
    assert!(g.is_solvable());
    assert_eq!(g.derived_series().len(), 2);
    let err = structure_constants(&[f("a", &["0", "0", "0", "1", "0"]), f("b", &["0", "0", "0", "0", "sin(theta)"])]);
    assert!(matches!(err, Err(LieError::NonClosure { .. })));
    let dep = structure_constants(&[f("a", &["1", "0", "0", "0", "0"]), f("b", &["2", "0", "0", "0", "0"])]);
    assert_eq!(dep.unwrap_err(), LieError::DependentBasis);
    let bad = LieAlgebra::from_constants(
        vec!["a".into(), "b".into()],
        vec![
            vec![vecq(&[0, 0]), vecq(&[1, 0])],
            vec![vecq(&[1, 0]), vecq(&[0, 0])],
        ],
    );
    assert!(matches!(bad, Err(LieError::Inconsistent(_))));
}

#[test]
fn adjoint_rotation_matches_the_printed_matrix() {
    let g = general();
    let ad = adjoint_exp(&g, 2, "q").unwrap();
    let z = RatExpr::zero;
    let one = RatExpr::one;
    let expect = vec![
        vec![one(), z(), z(), z(), z()],
        vec![z(), one(), z(), z(), z()],
        vec![z(), z(), one(), z(), z()],
        vec![z(), z(), z(), e("cos(q)"), e("-sin(q)")],
        vec![z(), z(), z(), e("sin(q)"), e("cos(q)")],
    ];
    assert_eq!(ad.matrix, expect);
    let id = adjoint_exp(&g, 0, "q").unwrap();
    for (i, row) in id.matrix.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            assert_eq!(x.is_one(), i == j);
            assert!(i == j || x.is_zero());
        }
    }
}

#[test]
fn adjoint_scaling_is_exponential() {
    let g = special_62();
    let ad = adjoint_exp(&g, 0, "q").unwrap();
    assert_eq!(ad.matrix[1][1], e("exp(q)"));
    assert!(ad.matrix[0][0].is_one());
}

#[test]
fn adjoint_group_law_and_series() {
    for g in [general(), special_61(), special_62()] {
        for i in 0..g.dim() {
            let ad = adjoint_exp(&g, i, "q").unwrap();
            let a = ad.at(&e("u")).unwrap();
            let b = ad.at(&e("v")).unwrap();
            let ab = ad.at(&e("u + v")).unwrap();
            assert_eq!(expr_matmul(&a, &b), ab);
            let series = lie_series(&g, i, "q", 6);
            for (rs, rc) in series.iter().zip(&ad.matrix) {
                for (s, c) in rs.iter().zip(rc) {
                    assert_eq!(&taylor(c, "q", 6).unwrap(), s);
                }
            }
        }
    }
}

#[test]
fn nilpotent_adjoint() {
    // Heisenberg algebra: [X1, X2] = X3.
    let mut c = vec![vec![vecq(&[0, 0, 0]); 3]; 3];
    c[0][1] = vecq(&[0, 0, 1]);
    c[1][0] = vecq(&[0, 0, -1]);
    let g = LieAlgebra::from_constants(vec!["X1".into(), "X2".into(), "X3".into()], c).unwrap();
    let ad = adjoint_exp(&g, 0, "q").unwrap();
    assert_eq!(ad.matrix[1][2], e("-q"));
    assert!(ad.matrix[1][1].is_one());
}

#[test]
fn unsupported_minimal_polynomial() {
    // ad X1 has eigenvalues ±√2 on span{X2, X3}.
    let mut c = vec![vec![vecq(&[0, 0, 0]); 3]; 3];
    c[0][1] = vecq(&[0, 0, 1]);
    c[1][0] = vecq(&[0, 0, -1]);
    c[0][2] = vecq(&[0, 2, 0]);
    c[2][0] = vecq(&[0, -2, 0]);
    let g = LieAlgebra::from_constants(vec!["X1".into(), "X2".into(), "X3".into()], c).unwrap();
    assert!(matches!(
        adjoint_exp(&g, 0, "q"),
        Err(LieError::UnsupportedMinimalPolynomial { .. })
    ));
}

#[test]
fn tables() {
    let g = special_61();
    let t = commutator_table_text(&g);
    let row2: Vec<&str> = t.lines().nth(3).unwrap().split(" | ").map(str::trim).collect();
    assert_eq!(row2, ["X2", "0", "0", "X4", "-X3"], "{t}");
    let l = commutator_table_latex(&g);
    assert!(l.contains("${\\bf X}_{4}$"), "{l}");
    let j = structure_json(&g);
    assert_eq!(j["c"][0], serde_json::json!([2, 3, 4, "1"]));
    assert_eq!(combination_text(&[int(1), int(0), crate::symexpr::rat(-1, 2)], &["a".into(), "b".into(), "c".into()]), "a - 1/2*c");
}
