//! Shared fixtures and checks for the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use liesym::geometry::{euler_lagrange, geodesic_lagrangian, geodesic_system, CoordChart, Metric};
use liesym::io::{load_generators, load_metric};
use liesym::jets::{prolong, BundleVectorField};
use liesym::liealg::{structure_constants, LieAlgebra};
use liesym::symexpr::{canonicalize, parse_expr, Atom, RatExpr};
use liesym::symmetry::Mode;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn preset(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../presets").join(name)
}

pub fn metric(name: &str) -> Metric {
    load_metric(preset(name)).unwrap()
}

pub fn fields(metric_name: &str, gens: &str, mode: Option<Mode>) -> Vec<BundleVectorField> {
    let g = metric(metric_name);
    load_generators(preset(gens), &g, mode)
        .unwrap()
        .into_iter()
        .map(|x| x.field)
        .collect()
}

pub fn e(s: &str) -> RatExpr {
    canonicalize(&parse_expr(s).unwrap()).unwrap()
}

/// The general 5-algebra and the two concrete algebras, from the presets.
pub fn shipped_algebras() -> Vec<(&'static str, LieAlgebra)> {
    vec![
        ("general", structure_constants(&fields("vb_general.metric", "vb_general.gens", None)).unwrap()),
        (
            "M=1,Q=t",
            structure_constants(&fields("vaidya_bonner_M1_Qt.metric", "vb_M1_Qt_liepoint.gens", None)).unwrap(),
        ),
        (
            "M=t,Q=t^2",
            structure_constants(&fields("vaidya_bonner_Mt_Qt2.metric", "vb_Mt_Qt2_liepoint.gens", None)).unwrap(),
        ),
    ]
}

pub const SHIPPED_METRICS: [&str; 4] = [
    "vaidya_bonner.metric",
    "vb_general.metric",
    "vaidya_bonner_M1_Qt.metric",
    "vaidya_bonner_Mt_Qt2.metric",
];

/// `E_i^{EL} = 2 g_ij (ẍ^j − G^j)` for the Lagrangian `g_ij ẋ^i ẋ^j`.
pub fn el_contraction_holds(g: &Metric) -> bool {
    let ch = g.chart();
    let el = euler_lagrange(&geodesic_lagrangian(g), ch).unwrap();
    let geo = geodesic_system(g).unwrap().equations();
    (0..ch.dim()).all(|i| {
        let mut rhs = RatExpr::zero();
        for (j, eq) in geo.iter().enumerate() {
            rhs = &rhs + &(g.component(i, j) * eq);
        }
        (&el[i] - &rhs.scale(&liesym::symexpr::int(2))).is_zero()
    })
}

/// Random expression text over `x, y, z` with elementary functions of
/// shallow arguments.
pub fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..5) {
            0 => "x".into(),
            1 => "y".into(),
            2 => "z".into(),
            3 => format!("{}", rng.gen_range(-5..=5)),
            _ => format!("{}/{}", rng.gen_range(-5..=5), rng.gen_range(1..=4)),
        };
    }
    // Elementary-function arguments stay shallow: angle addition over a
    // long sum expands exponentially.
    let arg = random_expr(rng, (depth - 1).min(1));
    let a = random_expr(rng, depth - 1);
    match rng.gen_range(0..9) {
        0 => format!("({a} + {})", random_expr(rng, depth - 1)),
        1 => format!("({a} - {})", random_expr(rng, depth - 1)),
        2 | 3 => format!("({a})*({})", random_expr(rng, depth - 1)),
        4 => format!("({a})/({})", random_expr(rng, depth - 1)),
        5 => format!("sin({arg})"),
        6 => format!("cos({arg})"),
        7 => format!("exp({arg})"),
        _ => format!("({a})^{}", rng.gen_range(2..=3)),
    }
}

/// Canonicalize twice (and through print/parse); `None` if the text does
/// not denote a defined expression (e.g. division by zero).
pub fn idempotent(text: &str) -> Option<bool> {
    let c = canonicalize(&parse_expr(text).ok()?).ok()?;
    let again = canonicalize(&c.to_expr()).ok()?;
    let reparsed = canonicalize(&parse_expr(&c.to_string()).ok()?).ok()?;
    Some(again == c && reparsed == c)
}

pub fn poly_chart() -> CoordChart {
    CoordChart::new("s", &["x", "y"], &[]).unwrap()
}

/// Random polynomial of degree ≤ 2 in `(s, x, y)` with small integer coefficients.
pub fn random_poly(rng: &mut ChaCha8Rng) -> RatExpr {
    let monos = ["1", "s", "x", "y", "s^2", "s*x", "s*y", "x^2", "x*y", "y^2"];
    let terms: Vec<String> = monos
        .iter()
        .filter_map(|m| {
            let c: i64 = rng.gen_range(-3..=3);
            (c != 0 && rng.gen_bool(0.5)).then(|| format!("({c})*{m}"))
        })
        .collect();
    if terms.is_empty() {
        RatExpr::zero()
    } else {
        e(&terms.join(" + "))
    }
}

pub fn random_field(rng: &mut ChaCha8Rng) -> BundleVectorField {
    let ch = poly_chart();
    let xi = random_poly(rng);
    let eta = (0..ch.dim()).map(|_| random_poly(rng)).collect();
    BundleVectorField::new(&ch, "X", xi, eta).unwrap()
}

fn d(e: &RatExpr, atoms: &[&Atom]) -> RatExpr {
    atoms.iter().fold(e.clone(), |acc, a| acc.diff(a))
}

/// Compare the prolongation recursion with the expanded formulas
///
/// ```text
/// η_(1) = η_s + ẋ^μ η_μ − ẋ (ξ_s + ẋ^μ ξ_μ)
/// η_(2) = η_ss + 2ẋ^μ η_sμ + ẋ^μ ẋ^ν η_μν + ẍ^μ η_μ
///         − 2ẍ (ξ_s + ẋ^μ ξ_μ) − ẋ (ξ_ss + 2ẋ^μ ξ_sμ + ẋ^μ ẋ^ν ξ_μν + ẍ^μ ξ_μ)
/// ```
pub fn prolongation_matches_expansion(x: &BundleVectorField) -> bool {
    let ch = x.chart();
    let n = ch.dim();
    let s = ch.param_atom();
    let xs: Vec<Atom> = (0..n).map(|i| ch.coord_atom(i)).collect();
    let v: Vec<RatExpr> = (0..n).map(|i| ch.velocity(i)).collect();
    let acc: Vec<RatExpr> = (0..n).map(|i| ch.acceleration(i)).collect();
    let sum = |f: &dyn Fn(usize) -> RatExpr| (0..n).fold(RatExpr::zero(), |a, m| &a + &f(m));
    let sum2 = |f: &dyn Fn(usize, usize) -> RatExpr| {
        (0..n).fold(RatExpr::zero(), |a, m| (0..n).fold(a, |b, k| &b + &f(m, k)))
    };
    // D f and D² f for point functions.
    let d1 = |f: &RatExpr| &d(f, &[&s]) + &sum(&|m| &v[m] * &d(f, &[&xs[m]]));
    let d2 = |f: &RatExpr| {
        let two = liesym::symexpr::int(2);
        let mut r = d(f, &[&s, &s]);
        r = &r + &sum(&|m| (&v[m] * &d(f, &[&s, &xs[m]])).scale(&two));
        r = &r + &sum2(&|m, k| &(&v[m] * &v[k]) * &d(f, &[&xs[m], &xs[k]]));
        &r + &sum(&|m| &acc[m] * &d(f, &[&xs[m]]))
    };
    let p = prolong(x, 2).unwrap();
    let dxi = d1(&x.xi);
    let ddxi = d2(&x.xi);
    (0..n).all(|i| {
        let e1 = &d1(&x.eta[i]) - &(&v[i] * &dxi);
        let e2 = &(&d2(&x.eta[i]) - &(&acc[i] * &dxi).scale(&liesym::symexpr::int(2))) - &(&v[i] * &ddxi);
        p.eta1[i] == e1 && p.eta2[i] == e2
    })
}
