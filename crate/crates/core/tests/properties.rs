//! Invariant checks over seeded random inputs.

mod common;

use common::*;
use liesym::liealg::{adjoint_exp, expr_matmul, LieAlgebra};
use liesym::linalg::funcspan::express;
use liesym::optimal::{random_vector, standard_reps, Reducer, TOLERANCE};
use liesym::symexpr::{canonicalize, collect_rat, int, monomial_of, parse_expr, rat, sample_is_zero, Atom, RatExpr, Rational};
use liesym::symmetry::{determining_system, solve_determining, Ansatz, Mode, Target};
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..Config::default()
    }
}

fn expr_from_seed(seed: u64, depth: u32) -> Option<RatExpr> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    canonicalize(&parse_expr(&random_expr(&mut rng, depth)).ok()?).ok()
}

#[test]
fn canonical_form_is_idempotent_on_random_expressions() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut defined = 0;
    for _ in 0..1000 {
        let text = random_expr(&mut rng, 4);
        if let Some(ok) = idempotent(&text) {
            assert!(ok, "not idempotent: {text}");
            defined += 1;
        }
    }
    assert!(defined > 900, "only {defined} defined expressions");
}

proptest! {
    #![proptest_config(config(96))]

    #[test]
    fn derivative_is_linear(s1 in any::<u64>(), s2 in any::<u64>(), c in -7i64..=7) {
        let (Some(f), Some(g)) = (expr_from_seed(s1, 3), expr_from_seed(s2, 3)) else { return Ok(()); };
        let x = Atom::sym("x");
        let lhs = (&f.scale(&int(c)) + &g).diff(&x);
        let rhs = &f.diff(&x).scale(&int(c)) + &g.diff(&x);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn derivative_obeys_product_rule(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (Some(f), Some(g)) = (expr_from_seed(s1, 3), expr_from_seed(s2, 3)) else { return Ok(()); };
        let y = Atom::sym("y");
        let lhs = (&f * &g).diff(&y);
        let rhs = &(&f.diff(&y) * &g) + &(&f * &g.diff(&y));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn collection_reconstructs_the_expression(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = ["1", "z", "sin(z)", "exp(z)/(1 + z^2)", "-3/2", "cos(z)^2"];
        let monos = ["1", "x", "y", "x*y", "x^2", "y^3", "x^2*y"];
        let text: Vec<String> = (0..rng.gen_range(1..6))
            .map(|_| format!("({})*{}", coeffs[rng.gen_range(0..coeffs.len())], monos[rng.gen_range(0..monos.len())]))
            .collect();
        let f = e(&text.join(" + "));
        let vars = [Atom::sym("x"), Atom::sym("y")];
        let parts = collect_rat(&f, &vars).unwrap();
        let mut back = RatExpr::zero();
        for (key, c) in &parts {
            prop_assert!(vars.iter().all(|v| !c.depends_on(v)));
            back = &back + &(&monomial_of(&vars, key) * c);
        }
        prop_assert_eq!(back, f);
    }

    #[test]
    fn sampler_agrees_with_canonical_zero_test(s1 in any::<u64>(), s2 in any::<u64>(), same in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(s1);
        let a = random_expr(&mut rng, 3);
        let b = if same {
            // A rearranged copy, so that the difference is identically zero.
            format!("(({a})*2 + 0)/2")
        } else {
            random_expr(&mut ChaCha8Rng::seed_from_u64(s2), 3)
        };
        let raw = parse_expr(&format!("({a}) - ({b})")).unwrap();
        let Ok(c) = canonicalize(&raw) else { return Ok(()); };
        if let Some(v) = sample_is_zero(&raw, 4, s2) {
            prop_assert_eq!(v, c.is_zero(), "{} vs {}", a, b);
        }
    }
}

#[test]
fn prolongation_matches_expanded_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let x = random_field(&mut rng);
        assert!(prolongation_matches_expansion(&x), "{x:?}");
    }
}

fn random_rational_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    (0..n).map(|_| rat(rng.gen_range(-9..=9), rng.gen_range(1..=4))).collect()
}

fn add(u: &[Rational], v: &[Rational]) -> Vec<Rational> {
    u.iter().zip(v).map(|(a, b)| a + b).collect()
}

fn jacobi_and_antisymmetry(g: &LieAlgebra, rng: &mut ChaCha8Rng) {
    let n = g.dim();
    for _ in 0..50 {
        let (u, v, w) = (
            random_rational_vector(rng, n),
            random_rational_vector(rng, n),
            random_rational_vector(rng, n),
        );
        let uv = g.bracket(&u, &v);
        let vu = g.bracket(&v, &u);
        assert!(add(&uv, &vu).iter().all(Zero::is_zero));
        let j = add(
            &add(&g.bracket(&u, &g.bracket(&v, &w)), &g.bracket(&v, &g.bracket(&w, &u))),
            &g.bracket(&w, &g.bracket(&u, &v)),
        );
        assert!(j.iter().all(Zero::is_zero));
    }
}

#[test]
fn lie_algebra_axioms_hold() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (name, g) in shipped_algebras() {
        g.check_axioms().unwrap_or_else(|e| panic!("{name}: {e}"));
        jacobi_and_antisymmetry(&g, &mut rng);
    }
}

#[test]
fn killing_form_is_ad_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for (name, g) in shipped_algebras() {
        let k = g.killing_form();
        let n = g.dim();
        for _ in 0..30 {
            let (x, y, z) = (
                random_rational_vector(&mut rng, n),
                random_rational_vector(&mut rng, n),
                random_rational_vector(&mut rng, n),
            );
            let form = |a: &[Rational], b: &[Rational]| -> Rational {
                let kb = k.mul_vec(b);
                a.iter().zip(&kb).map(|(p, q)| p * q).sum()
            };
            let lhs = form(&g.bracket(&x, &y), &z);
            let rhs = form(&x, &g.bracket(&y, &z));
            assert_eq!(lhs, rhs, "{name}");
        }
    }
}

fn numeric(m: &[Vec<RatExpr>]) -> Vec<Vec<Rational>> {
    m.iter()
        .map(|r| r.iter().map(|e| e.as_constant().expect("numeric entry")).collect())
        .collect()
}

#[test]
fn adjoint_maps_preserve_killing_form_and_brackets() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for (name, g) in shipped_algebras() {
        let n = g.dim();
        let k = g.killing_form();
        for i in 0..n {
            let ad = adjoint_exp(&g, i, "q").unwrap();
            let sym = ad.matrix.clone();
            // Symbolic check M K Mᵀ = K.
            let kexpr: Vec<Vec<RatExpr>> = k.row_vecs().into_iter().map(|r| r.into_iter().map(RatExpr::constant).collect()).collect();
            let mt: Vec<Vec<RatExpr>> = (0..n).map(|r| (0..n).map(|c| sym[c][r].clone()).collect()).collect();
            assert_eq!(expr_matmul(&expr_matmul(&sym, &kexpr), &mt), kexpr, "{name} X{}", i + 1);
            // At q = 0 the map is the identity on brackets.
            let at = ad.at(&RatExpr::zero()).unwrap();
            let m0 = numeric(&at);
            for _ in 0..10 {
                let u = random_rational_vector(&mut rng, n);
                let v = random_rational_vector(&mut rng, n);
                let map = |a: &[Rational], m: &[Vec<Rational>]| -> Vec<Rational> {
                    (0..n).map(|c| a.iter().zip(m).map(|(x, row)| x * &row[c]).sum()).collect()
                };
                assert_eq!(map(&g.bracket(&u, &v), &m0), g.bracket(&map(&u, &m0), &map(&v, &m0)));
            }
        }
    }
}

#[test]
fn adjoint_map_is_a_bracket_automorphism_symbolically() {
    for (name, g) in shipped_algebras() {
        let n = g.dim();
        for i in 0..n {
            let ad = adjoint_exp(&g, i, "q").unwrap();
            for a in 0..n {
                for b in 0..n {
                    // Ad[Xa, Xb] = [Ad Xa, Ad Xb], both sides as expression rows.
                    let lhs = ad.apply(&g.basis_bracket(a, b).iter().cloned().map(RatExpr::constant).collect::<Vec<_>>());
                    let (ra, rb) = (&ad.matrix[a], &ad.matrix[b]);
                    let mut rhs = vec![RatExpr::zero(); n];
                    for (p, xa) in ra.iter().enumerate() {
                        for (q, xb) in rb.iter().enumerate() {
                            let coef = xa * xb;
                            if coef.is_zero() {
                                continue;
                            }
                            for (k, c) in g.basis_bracket(p, q).iter().enumerate() {
                                if !c.is_zero() {
                                    rhs[k] = &rhs[k] + &coef.scale(c);
                                }
                            }
                        }
                    }
                    assert_eq!(lhs, rhs, "{name}: Ad X{} on [X{}, X{}]", i + 1, a + 1, b + 1);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn reduction_is_sound(seed in any::<u64>()) {
        let (_, g) = &GENERAL.with(|g| g.clone());
        let reducer = Reducer::new(g).unwrap();
        let a = random_vector(&mut ChaCha8Rng::seed_from_u64(seed), 5);
        let Ok(t) = reducer.reduce(&a, &standard_reps()) else {
            prop_assert!(a.iter().all(Zero::is_zero));
            return Ok(());
        };
        prop_assert!(t.matched.is_some(), "{:?}", t);
        let replay = reducer.replay(&t);
        for (x, y) in replay.iter().zip(&t.output) {
            prop_assert!((x - y).abs() < TOLERANCE);
        }
        let f = |v: &[f64]| [v[0], v[1], v[2] * v[2] + v[3] * v[3] + v[4] * v[4]];
        let before: Vec<f64> = a.iter().map(|q| q.to_f64().unwrap()).collect();
        let (i0, i1) = (f(&before), f(&t.output));
        let s = t.scale;
        prop_assert!((i0[0] * s - i1[0]).abs() < TOLERANCE);
        prop_assert!((i0[1] * s - i1[1]).abs() < TOLERANCE);
        prop_assert!((i0[2] * s * s - i1[2]).abs() < TOLERANCE * (1.0 + i1[2].abs()));
        prop_assert_eq!(reducer.reduce(&a, &standard_reps()).unwrap(), t);
    }

    #[test]
    fn representatives_reduce_to_themselves(case in 0usize..9, p in proptest::collection::vec((1i64..=20, any::<bool>(), 1i64..=6), 3)) {
        let (_, g) = &GENERAL.with(|g| g.clone());
        let reducer = Reducer::new(g).unwrap();
        let reps = standard_reps();
        let r = &reps[case];
        // Nonzero parameters: with a zero parameter the instance also belongs to
        // a smaller representative.
        let params: Vec<Rational> = p.iter().take(r.free.len()).map(|(n, neg, d)| rat(if *neg { -n } else { *n }, *d)).collect();
        let inst = r.instantiate(5, &params);
        let t = reducer.reduce(&inst, &reps).unwrap();
        prop_assert!(t.moves.is_empty());
        prop_assert_eq!(t.output_exact.as_ref(), Some(&inst));
        prop_assert_eq!(t.matched.unwrap().0, r.id);
    }
}

thread_local! {
    static GENERAL: (&'static str, LieAlgebra) = shipped_algebras().remove(0);
}

#[test]
fn euler_lagrange_contracts_geodesic_equations() {
    for m in SHIPPED_METRICS {
        assert!(el_contraction_holds(&metric(m)), "{m}");
    }
}

#[test]
fn solver_output_is_closed_under_bracket() {
    for m in ["vaidya_bonner_M1_Qt.metric", "vaidya_bonner_Mt_Qt2.metric"] {
        let g = metric(m);
        for mode in [Mode::Noether, Mode::LiePoint] {
            let ds = determining_system(&Target::for_mode(&g, mode).unwrap()).unwrap();
            let sol = solve_determining(&ds, &Ansatz::for_metric(&g, 1)).unwrap();
            let basis: Vec<Vec<RatExpr>> = sol.fields.iter().map(|f| f.components()).collect();
            for a in &sol.fields {
                for b in &sol.fields {
                    let c = a.bracket(b).unwrap();
                    assert!(express(&basis, &c.components()).is_some(), "{m} {mode:?}: [{}, {}]", a.name, b.name);
                }
            }
        }
    }
}
