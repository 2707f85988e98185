//! One-dimensional optimal systems of the algebra `⟨X1, X2⟩ ⊕ so(3)` with
//! `X1, X2` central and `X3, X4, X5` acting as rotations.
//!
//! A coefficient row vector `a` (for `Σ a_i X_i`) moves under `a ↦ a·M`
//! with `M = Ad(exp(s X_i))` from [`adjoint_exp`]. The reduction applies
//! rotation moves to zero designated coefficients, then rescales. A move
//! that zeroes `a_j` into `a_k` uses `s = atan2(−σ a_j, a_k)` where `σ` is
//! the orientation of the rotation, so the surviving coefficient is
//! `√(a_j² + a_k²) ≥ 0`. Moves are exact whenever that root is rational.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::liealg::{adjoint_exp, AdjointMap, LieAlgebra, LieError};
use crate::linalg::QMatrix;
use crate::symexpr::{Atom, Bindings, RatExpr, Rational, Symbol};

/// Numeric matching tolerance.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimalError {
    #[error("the zero vector does not generate a subalgebra")]
    ZeroVector,
    #[error("expected {expected} coefficients, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("algebra does not have the central-pair-plus-rotations shape: {0}")]
    Shape(String),
    #[error(transparent)]
    Lie(#[from] LieError),
}

/// Representative `X_lead + Σ a_f X_f` (0-based indices).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptimalRep {
    pub id: usize,
    pub lead: usize,
    pub free: Vec<usize>,
}

impl OptimalRep {
    pub fn new(id: usize, lead: usize, free: &[usize]) -> Self {
        OptimalRep {
            id,
            lead,
            free: free.to_vec(),
        }
    }

    /// Text such as `X1 + a2*X2 + a5*X5`.
    pub fn pattern(&self, names: &[String]) -> String {
        let mut s = names[self.lead].clone();
        for f in &self.free {
            s.push_str(&format!(" + a{}*{}", f + 1, names[*f]));
        }
        s
    }

    /// Parameter values if `v` (already scaled) fits the pattern.
    fn match_f64(&self, v: &[f64]) -> Option<Vec<f64>> {
        if (v[self.lead] - 1.0).abs() > TOLERANCE {
            return None;
        }
        let ok = v
            .iter()
            .enumerate()
            .all(|(i, x)| i == self.lead || self.free.contains(&i) || x.abs() <= TOLERANCE);
        ok.then(|| self.free.iter().map(|&f| v[f]).collect())
    }

    /// Instance with the given parameter values.
    pub fn instantiate(&self, dim: usize, params: &[Rational]) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); dim];
        v[self.lead] = Rational::one();
        for (f, p) in self.free.iter().zip(params) {
            v[*f] = p.clone();
        }
        v
    }
}

/// The nine representatives for the five-dimensional algebra
/// `⟨X1, X2, X3, X4, X5⟩`.
pub fn standard_reps() -> Vec<OptimalRep> {
    vec![
        OptimalRep::new(1, 0, &[1, 4]),
        OptimalRep::new(2, 0, &[1, 2]),
        OptimalRep::new(3, 0, &[1, 3]),
        OptimalRep::new(4, 1, &[4]),
        OptimalRep::new(5, 1, &[2]),
        OptimalRep::new(6, 1, &[3]),
        OptimalRep::new(7, 2, &[]),
        OptimalRep::new(8, 3, &[]),
        OptimalRep::new(9, 4, &[]),
    ]
}

/// One rotation move `a ↦ a·Ad(exp(s X_generator))`.
#[derive(Clone, Debug, PartialEq)]
pub struct Move {
    pub generator: usize,
    pub angle: f64,
    /// `(cos s, sin s)` when both are rational.
    pub exact: Option<(Rational, Rational)>,
    /// How the angle was chosen, e.g. `atan2(-a3, a4)`.
    pub rule: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionTrace {
    pub input: Vec<Rational>,
    pub moves: Vec<Move>,
    /// Overall factor applied after the moves.
    pub scale: f64,
    pub scale_exact: Option<Rational>,
    pub output: Vec<f64>,
    pub output_exact: Option<Vec<Rational>>,
    /// Representative id and its parameter values.
    pub matched: Option<(usize, Vec<f64>)>,
}

impl ReductionTrace {
    pub fn is_exact(&self) -> bool {
        self.output_exact.is_some()
    }

    pub fn to_json(&self, names: &[String]) -> Value {
        json!({
            "input": self.input.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
            "moves": self.moves.iter().map(|m| json!({
                "generator": names[m.generator],
                "angle": m.angle,
                "exact": m.exact.as_ref().map(|(c, s)| json!({"cos": c.to_string(), "sin": s.to_string()})),
                "rule": m.rule,
            })).collect::<Vec<_>>(),
            "scale": self.scale_exact.as_ref().map_or(json!(self.scale), |q| json!(q.to_string())),
            "output": match &self.output_exact {
                Some(v) => json!(v.iter().map(|q| q.to_string()).collect::<Vec<_>>()),
                None => json!(self.output),
            },
            "matched": self.matched.as_ref().map(|(id, p)| json!({"case": id, "params": p})),
        })
    }
}

fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn rational_sqrt(c: &Rational) -> Option<Rational> {
    let n = c.numer().sqrt();
    let d = c.denom().sqrt();
    (&n * &n == *c.numer() && &d * &d == *c.denom()).then(|| Rational::new(n, d))
}

/// Reduction machinery for the five-dimensional algebra.
#[derive(Clone, Debug)]
pub struct Reducer {
    names: Vec<String>,
    maps: Vec<AdjointMap>,
    /// Orientation `σ` of each rotation generator in its plane.
    sigma: BTreeMap<usize, f64>,
}

/// Rotation generator and plane used to zero `j` into `k`.
fn plane_generator(j: usize, k: usize) -> usize {
    // X3 rotates (X4, X5), X4 rotates (X3, X5), X5 rotates (X3, X4).
    let mut p = [j, k];
    p.sort();
    match p {
        [3, 4] => 2,
        [2, 4] => 3,
        [2, 3] => 4,
        _ => unreachable!("not a rotation plane"),
    }
}

impl Reducer {
    pub fn new(g: &LieAlgebra) -> Result<Self, OptimalError> {
        if g.dim() != 5 {
            return Err(OptimalError::Shape(format!("dimension {} instead of 5", g.dim())));
        }
        for i in 0..2 {
            if !g.ad_basis(i).is_zero() {
                return Err(OptimalError::Shape(format!("{} is not central", g.names()[i])));
            }
        }
        let maps: Vec<AdjointMap> = (0..5).map(|i| adjoint_exp(g, i, "q")).collect::<Result<_, _>>()?;
        let mut sigma = BTreeMap::new();
        for (gen, (j, k)) in [(2, (3, 4)), (3, (2, 4)), (4, (2, 3))] {
            let ad = g.ad_basis(gen);
            let block = ad[(k, j)].clone();
            let unit = block.abs() == Rational::one() && ad[(j, k)] == -block.clone();
            let rest_zero = (0..5).all(|r| (0..5).all(|c| [(k, j), (j, k)].contains(&(r, c)) || ad[(r, c)].is_zero()));
            if !unit || !rest_zero {
                return Err(OptimalError::Shape(format!(
                    "{} does not rotate ({}, {})",
                    g.names()[gen],
                    g.names()[j],
                    g.names()[k]
                )));
            }
            // Row convention: M[k][j] = σ sin q.
            let m = maps[gen].eval_f64(std::f64::consts::FRAC_PI_2);
            sigma.insert(gen, m[k][j].round());
        }
        Ok(Reducer {
            names: g.names().to_vec(),
            maps,
            sigma,
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn adjoint(&self, i: usize) -> &AdjointMap {
        &self.maps[i]
    }

    fn exact_matrix(&self, gen: usize, cos: &Rational, sin: &Rational) -> QMatrix {
        let q = Arc::new(RatExpr::atom(Atom::Sym(self.maps[gen].param.clone())));
        let b = Bindings::new()
            .with(Atom::Cos(q.clone()), RatExpr::constant(cos.clone()))
            .with(Atom::Sin(q), RatExpr::constant(sin.clone()));
        let rows: Vec<Vec<Rational>> = self.maps[gen]
            .matrix
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| {
                        e.substitute(&b)
                            .ok()
                            .and_then(|x| x.as_constant())
                            .expect("rotation entries are affine in cos and sin")
                    })
                    .collect()
            })
            .collect();
        QMatrix::from_rows(&rows, 5)
    }

    /// Apply a recorded move numerically.
    pub fn apply_move_f64(&self, m: &Move, a: &[f64]) -> Vec<f64> {
        let mat = self.maps[m.generator].eval_f64(m.angle);
        (0..a.len()).map(|k| a.iter().enumerate().map(|(j, x)| x * mat[j][k]).sum()).collect()
    }

    /// Zero coordinate `j` into `k`.
    fn zero_into(&self, j: usize, k: usize, exact: &mut Option<Vec<Rational>>, approx: &mut Vec<f64>) -> Option<Move> {
        if approx[j] == 0.0 && exact.as_ref().is_none_or(|v| v[j].is_zero()) {
            return None;
        }
        let gen = plane_generator(j, k);
        // Stored orientation is for the increasing pair.
        let sigma = if j < k { self.sigma[&gen] } else { -self.sigma[&gen] };
        let (aj, ak) = (approx[j], approx[k]);
        let angle = (-sigma * aj).atan2(ak);
        let sign = if sigma < 0.0 { "" } else { "-" };
        let rule = format!("atan2({sign}a{}, a{})", j + 1, k + 1);
        let mut mv = Move {
            generator: gen,
            angle,
            exact: None,
            rule,
        };
        if let Some(v) = exact.as_ref() {
            let rho2 = &v[j] * &v[j] + &v[k] * &v[k];
            if let Some(rho) = rational_sqrt(&rho2) {
                let cos = &v[k] / &rho;
                let sin = -(&v[j] / &rho) * Rational::from_integer((sigma as i64).into());
                let m = self.exact_matrix(gen, &cos, &sin);
                let next = m.left_mul_vec(v);
                mv.exact = Some((cos, sin));
                *approx = next.iter().map(to_f64).collect();
                *exact = Some(next);
                return Some(mv);
            }
        }
        *exact = None;
        *approx = self.apply_move_f64(&mv, approx);
        approx[j] = 0.0;
        Some(mv)
    }

    /// Reduce `a` to one of `reps`. A vector that already is a multiple of
    /// a representative is only rescaled.
    pub fn reduce(&self, a: &[Rational], reps: &[OptimalRep]) -> Result<ReductionTrace, OptimalError> {
        self.reduce_with(a, reps, true)
    }

    /// Canonical form: the move schedule without the representative
    /// proof_schedule, and with all rotation mass collected on `X3` when
    /// `a1 = a2 = 0`, so conjugate inputs end at the same vector.
    pub fn reduce_canonical(&self, a: &[Rational], reps: &[OptimalRep]) -> Result<ReductionTrace, OptimalError> {
        self.reduce_with(a, reps, false)
    }

    fn reduce_with(&self, a: &[Rational], reps: &[OptimalRep], proof_schedule: bool) -> Result<ReductionTrace, OptimalError> {
        if a.len() != 5 {
            return Err(OptimalError::Arity {
                expected: 5,
                got: a.len(),
            });
        }
        if a.iter().all(Zero::is_zero) {
            return Err(OptimalError::ZeroVector);
        }
        // Already a scaled representative: only rescale.
        for rep in reps.iter().filter(|_| proof_schedule) {
            let lead = &a[rep.lead];
            let fits = !lead.is_zero()
                && a.iter()
                    .enumerate()
                    .all(|(i, x)| i == rep.lead || rep.free.contains(&i) || x.is_zero());
            if fits {
                return Ok(self.finish(a, Vec::new(), Some(a.to_vec()), a.iter().map(to_f64).collect(), rep.lead, reps));
            }
        }
        let mut exact = Some(a.to_vec());
        let mut approx: Vec<f64> = a.iter().map(to_f64).collect();
        let mut moves = Vec::new();
        let plan: &[(usize, usize)] = if !a[0].is_zero() || !a[1].is_zero() {
            &[(2, 3), (3, 4)]
        } else if !a[2].is_zero() || !proof_schedule {
            &[(3, 2), (4, 2)]
        } else if !a[3].is_zero() {
            &[(4, 3)]
        } else {
            &[]
        };
        let lead = if !a[0].is_zero() {
            0
        } else if !a[1].is_zero() {
            1
        } else if !a[2].is_zero() || !proof_schedule {
            2
        } else if !a[3].is_zero() {
            3
        } else {
            4
        };
        for &(j, k) in plan {
            if let Some(m) = self.zero_into(j, k, &mut exact, &mut approx) {
                moves.push(m);
            }
        }
        Ok(self.finish(a, moves, exact, approx, lead, reps))
    }

    fn finish(
        &self,
        input: &[Rational],
        moves: Vec<Move>,
        exact: Option<Vec<Rational>>,
        approx: Vec<f64>,
        lead: usize,
        reps: &[OptimalRep],
    ) -> ReductionTrace {
        let (scale, scale_exact, output, output_exact) = match exact {
            Some(v) => {
                let s = v[lead].recip();
                let out: Vec<Rational> = v.iter().map(|x| x * &s).collect();
                (to_f64(&s), Some(s), out.iter().map(to_f64).collect(), Some(out))
            }
            None => {
                let s = 1.0 / approx[lead];
                (s, None, approx.iter().map(|x| x * s).collect::<Vec<_>>(), None)
            }
        };
        let matched = reps
            .iter()
            .filter(|r| r.lead == lead)
            .find_map(|r| r.match_f64(&output).map(|p| (r.id, p)))
            .or_else(|| reps.iter().find_map(|r| r.match_f64(&output).map(|p| (r.id, p))));
        ReductionTrace {
            input: input.to_vec(),
            moves,
            scale,
            scale_exact,
            output,
            output_exact,
            matched,
        }
    }

    /// Replay the moves and scaling of a trace numerically.
    pub fn replay(&self, t: &ReductionTrace) -> Vec<f64> {
        let mut v: Vec<f64> = t.input.iter().map(to_f64).collect();
        for m in &t.moves {
            v = self.apply_move_f64(m, &v);
        }
        v.iter().map(|x| x * t.scale).collect()
    }
}

/// `a1, a2, a3² + a4² + a5²` with their scaling degrees.
pub fn default_invariants() -> Vec<(RatExpr, u32)> {
    let a = |i: usize| RatExpr::sym(&format!("a{i}"));
    vec![
        (a(1), 1),
        (a(2), 1),
        (&(&(&a(3) * &a(3)) + &(&a(4) * &a(4))) + &(&a(5) * &a(5)), 2),
    ]
}

fn eval_invariant(inv: &RatExpr, v: &[f64]) -> f64 {
    let names: Vec<Atom> = (1..=v.len()).map(|i| Atom::sym(&format!("a{i}"))).collect();
    crate::symexpr::CompiledExprs::new(&names, std::slice::from_ref(inv))
        .and_then(|c| c.eval(v))
        .map(|r| r[0])
        .unwrap_or(f64::NAN)
}

/// For each candidate and each generator: is the candidate invariant under
/// `Ad(exp(q X_i))`, exactly in `q`?
pub fn orbit_invariants_check(g: &LieAlgebra, candidates: &[RatExpr]) -> Result<Vec<Vec<bool>>, OptimalError> {
    let m = g.dim();
    let a: Vec<RatExpr> = (1..=m).map(|i| RatExpr::sym(&format!("a{i}"))).collect();
    let maps: Vec<AdjointMap> = (0..m).map(|i| adjoint_exp(g, i, "q")).collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    for c in candidates {
        let mut row = Vec::new();
        for map in &maps {
            let img = map.apply(&a);
            let mut b = Bindings::new();
            for (i, e) in img.into_iter().enumerate() {
                b.bind(Atom::Sym(Symbol::new(&format!("a{}", i + 1))), e);
            }
            let moved = c.substitute(&b).map_err(|e| LieError::Inconsistent(e.to_string()))?;
            row.push(&moved - c == RatExpr::zero());
        }
        out.push(row);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Image {
    Const(Rational),
    Line,
    /// `[k, ∞)`.
    HalfLine(Rational),
    Unknown,
}

fn image_of(inv: &RatExpr, rep: &OptimalRep, dim: usize) -> Image {
    let mut b = Bindings::new();
    for i in 0..dim {
        let v = if i == rep.lead {
            RatExpr::one()
        } else if rep.free.contains(&i) {
            RatExpr::sym(&format!("p{}", i + 1))
        } else {
            RatExpr::zero()
        };
        b.bind(Atom::sym(&format!("a{}", i + 1)), v);
    }
    let Ok(e) = inv.substitute(&b) else {
        return Image::Unknown;
    };
    if let Some(c) = e.as_constant() {
        return Image::Const(c);
    }
    let atoms = e.atoms();
    if atoms.len() != 1 || !e.is_polynomial() {
        return Image::Unknown;
    }
    let x = &atoms[0];
    let d1 = e.diff(x);
    if d1.as_constant().is_some() {
        return Image::Line;
    }
    let d2 = d1.diff(x);
    match d2.as_constant() {
        Some(c) if c.is_positive() && d1.substitute(&Bindings::new().with(x.clone(), RatExpr::zero())).ok() == Some(RatExpr::zero()) => {
            let k = e
                .substitute(&Bindings::new().with(x.clone(), RatExpr::zero()))
                .ok()
                .and_then(|v| v.as_constant());
            k.map_or(Image::Unknown, Image::HalfLine)
        }
        _ => Image::Unknown,
    }
}

fn overlaps(a: &Image, b: &Image) -> bool {
    match (a, b) {
        (Image::Const(x), Image::Const(y)) => x == y,
        (Image::Const(x), Image::HalfLine(k)) | (Image::HalfLine(k), Image::Const(x)) => x >= k,
        _ => true,
    }
}

/// Pairs of representatives that no verified invariant separates.
pub fn separation_failures(invariants: &[RatExpr], reps: &[OptimalRep], dim: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (x, rx) in reps.iter().enumerate() {
        for ry in &reps[x + 1..] {
            let together = invariants
                .iter()
                .all(|inv| overlaps(&image_of(inv, rx, dim), &image_of(inv, ry, dim)));
            if together {
                out.push((rx.id, ry.id));
            }
        }
    }
    out
}

/// Result of [`verify_optimal_cover`].
#[derive(Clone, Debug, PartialEq)]
pub struct CoverageReport {
    pub samples: usize,
    pub seed: u64,
    pub invalid: usize,
    pub matched: BTreeMap<usize, usize>,
    pub unmatched: Vec<(Vec<Rational>, Vec<f64>)>,
    pub exact_reductions: usize,
    pub invariant_drift_max: f64,
    pub replay_error_max: f64,
    /// Which default invariants were verified exactly for every generator.
    pub invariants_verified: Vec<bool>,
    pub separation_failures: Vec<(usize, usize)>,
    /// Separation failures where reducing an instance of the second
    /// representative lands on the first.
    pub confirmed_conjugate: Vec<(usize, usize)>,
}

impl CoverageReport {
    pub fn valid(&self) -> usize {
        self.samples - self.invalid
    }

    pub fn matched_total(&self) -> usize {
        self.matched.values().sum()
    }

    pub fn to_json(&self, reps: &[OptimalRep], names: &[String]) -> Value {
        json!({
            "reps": reps.iter().map(|r| json!({"case": r.id, "pattern": r.pattern(names)})).collect::<Vec<_>>(),
            "samples": self.samples,
            "seed": self.seed,
            "invalid": self.invalid,
            "matched": self.matched.iter().map(|(k, v)| (k.to_string(), json!(v))).collect::<serde_json::Map<_, _>>(),
            "unmatched": self.unmatched.iter().map(|(a, out)| json!({
                "input": a.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
                "reduced": out,
            })).collect::<Vec<_>>(),
            "exact_reductions": self.exact_reductions,
            "invariant_drift_max": self.invariant_drift_max,
            "replay_error_max": self.replay_error_max,
            "invariants_verified": self.invariants_verified,
            "separation_failures": self.separation_failures.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>(),
            "confirmed_conjugate": self.confirmed_conjugate.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>(),
        })
    }
}

/// Seeded random coefficient vector; about a quarter of the entries are
/// zero so that every branch of the reduction is exercised.
pub fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Rational> {
    (0..dim)
        .map(|_| {
            if rng.gen_bool(0.25) {
                Rational::zero()
            } else {
                Rational::new(rng.gen_range(-20i64..=20).into(), rng.gen_range(1i64..=9).into())
            }
        })
        .collect()
}

/// Reduce `samples` seeded random vectors (plus an injected zero vector)
/// and collect coverage, drift and separation data.
pub fn verify_optimal_cover(
    g: &LieAlgebra,
    reps: &[OptimalRep],
    samples: usize,
    seed: u64,
) -> Result<CoverageReport, OptimalError> {
    let reducer = Reducer::new(g)?;
    let invariants = default_invariants();
    let inv_exprs: Vec<RatExpr> = invariants.iter().map(|(e, _)| e.clone()).collect();
    let checks = orbit_invariants_check(g, &inv_exprs)?;
    let invariants_verified: Vec<bool> = checks.iter().map(|r| r.iter().all(|b| *b)).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vectors = vec![vec![Rational::zero(); g.dim()]];
    vectors.extend((0..samples).map(|_| random_vector(&mut rng, g.dim())));

    let mut report = CoverageReport {
        samples: vectors.len(),
        seed,
        invalid: 0,
        matched: BTreeMap::new(),
        unmatched: Vec::new(),
        exact_reductions: 0,
        invariant_drift_max: 0.0,
        replay_error_max: 0.0,
        invariants_verified,
        separation_failures: Vec::new(),
        confirmed_conjugate: Vec::new(),
    };
    for a in &vectors {
        let t = match reducer.reduce(a, reps) {
            Ok(t) => t,
            Err(OptimalError::ZeroVector) => {
                report.invalid += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        match &t.matched {
            Some((id, _)) => *report.matched.entry(*id).or_default() += 1,
            None => report.unmatched.push((a.clone(), t.output.clone())),
        }
        if t.is_exact() {
            report.exact_reductions += 1;
        }
        let input: Vec<f64> = a.iter().map(to_f64).collect();
        for (inv, deg) in &invariants {
            let before = eval_invariant(inv, &input) * t.scale.powi(*deg as i32);
            let after = eval_invariant(inv, &t.output);
            report.invariant_drift_max = report.invariant_drift_max.max((before - after).abs());
        }
        let replay = reducer.replay(&t);
        let err = replay.iter().zip(&t.output).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        report.replay_error_max = report.replay_error_max.max(err);
    }

    let verified: Vec<RatExpr> = inv_exprs
        .iter()
        .zip(&report.invariants_verified)
        .filter(|(_, ok)| **ok)
        .map(|(e, _)| e.clone())
        .collect();
    report.separation_failures = separation_failures(&verified, reps, g.dim());
    for &(x, y) in &report.separation_failures {
        let canonical = |id: usize| {
            let r = reps.iter().find(|r| r.id == id).expect("listed representative");
            let params: Vec<Rational> = r.free.iter().map(|_| Rational::new(3.into(), 2.into())).collect();
            reducer.reduce_canonical(&r.instantiate(g.dim(), &params), reps).map(|t| t.output)
        };
        if let (Ok(u), Ok(v)) = (canonical(x), canonical(y)) {
            if u.iter().zip(&v).all(|(p, q)| (p - q).abs() <= TOLERANCE) {
                report.confirmed_conjugate.push((x, y));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::{int, rat};

    fn algebra() -> LieAlgebra {
        // [X3, X4] = X5, [X3, X5] = −X4, [X4, X5] = X3; X1, X2 central.
        let mut c = vec![vec![vec![Rational::zero(); 5]; 5]; 5];
        let mut set = |i: usize, j: usize, k: usize, v: i64| {
            c[i][j][k] = int(v);
            c[j][i][k] = int(-v);
        };
        set(2, 3, 4, 1);
        set(2, 4, 3, -1);
        set(3, 4, 2, 1);
        let names = (1..=5).map(|i| format!("X{i}")).collect();
        LieAlgebra::from_constants(names, c).unwrap()
    }

    fn v(x: &[i64]) -> Vec<Rational> {
        x.iter().map(|a| int(*a)).collect()
    }

    #[test]
    fn representative_needs_no_moves() {
        let r = Reducer::new(&algebra()).unwrap();
        let t = r.reduce(&v(&[0, 0, 0, 1, 0]), &standard_reps()).unwrap();
        assert!(t.moves.is_empty());
        assert_eq!(t.matched.unwrap().0, 8);
        assert_eq!(t.scale_exact, Some(int(1)));
    }

    #[test]
    fn scaling_only() {
        let r = Reducer::new(&algebra()).unwrap();
        let t = r.reduce(&v(&[0, 0, 0, 0, 7]), &standard_reps()).unwrap();
        assert!(t.moves.is_empty());
        assert_eq!(t.scale_exact, Some(rat(1, 7)));
        assert_eq!(t.matched.unwrap().0, 9);
    }

    #[test]
    fn exact_rotations() {
        let r = Reducer::new(&algebra()).unwrap();
        let t = r.reduce(&v(&[1, 2, 3, 4, 0]), &standard_reps()).unwrap();
        assert_eq!(t.output_exact, Some(v(&[1, 2, 0, 0, 5])));
        assert_eq!(t.matched.as_ref().unwrap().0, 1);
        let replay = r.replay(&t);
        for (x, y) in replay.iter().zip(&t.output) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn fourth_generator_case() {
        let r = Reducer::new(&algebra()).unwrap();
        let t = r.reduce(&v(&[0, 0, 0, 3, 4]), &standard_reps()).unwrap();
        assert_eq!(t.moves.len(), 1);
        assert_eq!(t.moves[0].generator, 2);
        assert_eq!(t.output_exact, Some(v(&[0, 0, 0, 1, 0])));
        assert_eq!(t.matched.unwrap().0, 8);
        let c = r.reduce_canonical(&v(&[0, 0, 0, 3, 4]), &standard_reps()).unwrap();
        assert_eq!(c.matched.unwrap().0, 7);
    }

    #[test]
    fn inexact_rotations_and_idempotence() {
        let r = Reducer::new(&algebra()).unwrap();
        let t = r.reduce(&v(&[0, 0, 1, 1, 1]), &standard_reps()).unwrap();
        assert!(!t.is_exact());
        assert_eq!(t.matched.as_ref().unwrap().0, 7);
        assert!((t.scale - 1.0 / 3f64.sqrt()).abs() < 1e-12, "{t:?}");
        for rep in standard_reps() {
            let inst = rep.instantiate(5, &vec![rat(5, 3); rep.free.len()]);
            let t = r.reduce(&inst, &standard_reps()).unwrap();
            assert!(t.moves.is_empty());
            assert_eq!(t.scale_exact, Some(int(1)));
            assert_eq!(t.output_exact.as_ref(), Some(&inst));
        }
        assert_eq!(r.reduce(&v(&[0; 5]), &standard_reps()), Err(OptimalError::ZeroVector));
    }

    #[test]
    fn invariants() {
        let g = algebra();
        let inv: Vec<RatExpr> = default_invariants().into_iter().map(|(e, _)| e).collect();
        let checks = orbit_invariants_check(&g, &inv).unwrap();
        assert!(checks.iter().all(|r| r.iter().all(|b| *b)));
        let a5 = orbit_invariants_check(&g, &[RatExpr::sym("a5")]).unwrap();
        assert!(!a5[0][2]);
        assert!(a5[0][0]);
    }

    #[test]
    fn coverage_and_separation() {
        let g = algebra();
        let rep = verify_optimal_cover(&g, &standard_reps(), 300, 7).unwrap();
        assert!(rep.invalid >= 1);
        assert_eq!(rep.matched_total(), rep.valid());
        assert!(rep.invariant_drift_max < 1e-9);
        assert!(rep.replay_error_max < 1e-12);
        let expected = vec![(1, 2), (1, 3), (2, 3), (4, 5), (4, 6), (5, 6), (7, 8), (7, 9), (8, 9)];
        assert_eq!(rep.separation_failures, expected);
        assert_eq!(rep.confirmed_conjugate.len(), 9);
        // Removing case 1 leaves generic a1 ≠ 0 vectors unmatched.
        let reduced: Vec<OptimalRep> = standard_reps().into_iter().filter(|r| r.id != 1).collect();
        let gap = verify_optimal_cover(&g, &reduced, 100, 7).unwrap();
        assert!(!gap.unmatched.is_empty());
    }

    #[test]
    fn wrong_shape_is_rejected() {
        let names = (1..=5).map(|i| format!("Y{i}")).collect();
        let c = vec![vec![vec![Rational::zero(); 5]; 5]; 5];
        let abelian = LieAlgebra::from_constants(names, c).unwrap();
        assert!(matches!(Reducer::new(&abelian), Err(OptimalError::Shape(_))));
    }
}
