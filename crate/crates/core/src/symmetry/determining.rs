//! Determining equations and their solution over a finite ansatz.
//!
//! The coefficient functions `ξ, η^α` (and the gauge `A` in Noether mode)
//! are left as opaque functions of `(s, x)`. The residual is collected in
//! the velocities; every coefficient is a linear homogeneous PDE in the
//! unknowns. Substituting `u = Σ_k a_{u,k} B_k` turns the system into a
//! linear system over ℚ for the `a_{u,k}`, whose nullspace is the space of
//! symmetries contained in the ansatz.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::Zero;
use serde_json::{json, Value};

use super::{liepoint_residuals, noether_residual, Ansatz, Mode, SymmetryError};
use crate::geometry::{geodesic_lagrangian, geodesic_system, CoordChart, GeodesicSystem, Metric};
use crate::jets::BundleVectorField;
use crate::linalg::{funcspan, SparseEliminator, Subspace};
use crate::symexpr::{collect_rat, Atom, FuncApp, Monomial, Poly, RatExpr, Rational, Symbol};

/// What the symmetries are symmetries of.
#[derive(Clone, Debug)]
pub enum Target {
    Noether {
        lagrangian: RatExpr,
        chart: CoordChart,
        gauge: bool,
    },
    LiePoint(GeodesicSystem),
}

impl Target {
    /// Noether symmetries of the geodesic Lagrangian, with a gauge term.
    pub fn noether(g: &Metric) -> Self {
        Target::Noether {
            lagrangian: geodesic_lagrangian(g),
            chart: g.chart().clone(),
            gauge: true,
        }
    }

    pub fn liepoint(g: &Metric) -> Result<Self, SymmetryError> {
        Ok(Target::LiePoint(geodesic_system(g)?))
    }

    pub fn for_mode(g: &Metric, mode: Mode) -> Result<Self, SymmetryError> {
        match mode {
            Mode::Noether => Ok(Target::noether(g)),
            Mode::LiePoint => Target::liepoint(g),
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            Target::Noether { .. } => Mode::Noether,
            Target::LiePoint(_) => Mode::LiePoint,
        }
    }

    pub fn chart(&self) -> &CoordChart {
        match self {
            Target::Noether { chart, .. } => chart,
            Target::LiePoint(sys) => sys.chart(),
        }
    }

    fn function_names(&self) -> BTreeSet<String> {
        let exprs: Vec<&RatExpr> = match self {
            Target::Noether { lagrangian, .. } => vec![lagrangian],
            Target::LiePoint(sys) => sys.rhs().iter().collect(),
        };
        exprs
            .iter()
            .flat_map(|e| e.atoms_deep())
            .filter_map(|a| match a {
                Atom::Func(f) => Some(f.name.name().to_string()),
                _ => None,
            })
            .collect()
    }
}

/// One scalar determining equation: the coefficient of a velocity monomial
/// in the residual of equation `source`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeterminingEquation {
    pub source: usize,
    pub monomial: Vec<u32>,
    pub expr: RatExpr,
}

#[derive(Clone, Debug)]
pub struct DeterminingSystem {
    pub mode: Mode,
    pub chart: CoordChart,
    /// `ξ, η^0, …` followed by the gauge in Noether mode.
    pub unknowns: Vec<FuncApp>,
    pub equations: Vec<DeterminingEquation>,
}

impl DeterminingSystem {
    pub fn has_gauge(&self) -> bool {
        self.unknowns.len() > self.chart.dim() + 1
    }
}

fn fresh_name(base: &str, taken: &BTreeSet<String>) -> String {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.push('_');
    }
    name
}

/// Generic field with opaque coefficient functions, plus the residuals.
pub fn determining_system(target: &Target) -> Result<DeterminingSystem, SymmetryError> {
    let chart = target.chart().clone();
    let taken = target.function_names();
    let base = chart.base_symbols();
    let args: Vec<&str> = base.iter().map(Symbol::name).collect();
    let mut unknowns = vec![FuncApp::new(&fresh_name("xi", &taken), &args)];
    for c in chart.coords() {
        unknowns.push(FuncApp::new(&fresh_name(&format!("eta_{c}"), &taken), &args));
    }
    let gauge = matches!(target, Target::Noether { gauge: true, .. });
    if gauge {
        unknowns.push(FuncApp::new(&fresh_name("A", &taken), &args));
    }
    let comps: Vec<RatExpr> = unknowns[..chart.dim() + 1]
        .iter()
        .map(|f| RatExpr::atom(Atom::Func(f.clone())))
        .collect();
    let x = BundleVectorField::from_components(&chart, "X", comps)?;
    let residuals = match target {
        Target::Noether { lagrangian, .. } => {
            let a = if gauge {
                RatExpr::atom(Atom::Func(unknowns[chart.dim() + 1].clone()))
            } else {
                RatExpr::zero()
            };
            vec![noether_residual(&x, lagrangian, &a)?]
        }
        Target::LiePoint(sys) => liepoint_residuals(&x, sys)?,
    };
    let vel = chart.velocities();
    let mut equations = Vec::new();
    for (source, r) in residuals.iter().enumerate() {
        for (monomial, expr) in collect_rat(r, &vel)? {
            let deg: u32 = monomial.iter().sum();
            if deg > 3 {
                return Err(SymmetryError::DegreeBound(deg));
            }
            equations.push(DeterminingEquation { source, monomial, expr });
        }
    }
    Ok(DeterminingSystem {
        mode: target.mode(),
        chart,
        unknowns,
        equations,
    })
}

/// Symmetries found inside an ansatz.
#[derive(Clone, Debug)]
pub struct SymmetrySolution {
    pub mode: Mode,
    /// Canonical (reduced row-echelon) basis of the solution space.
    pub fields: Vec<BundleVectorField>,
    /// Gauge term of each field (Noether mode with gauge, else empty).
    pub gauges: Vec<RatExpr>,
    pub equations: usize,
    pub columns: usize,
    pub rank: usize,
    pub ansatz: Value,
}

impl SymmetrySolution {
    pub fn dim(&self) -> usize {
        self.fields.len()
    }

    pub fn to_json(&self) -> Value {
        let fields: Vec<Value> = self
            .fields
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let mut v = json!({
                    "name": f.name,
                    "xi": f.xi.to_string(),
                    "eta": f.eta.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
                });
                if let Some(a) = self.gauges.get(i) {
                    v["gauge"] = json!(a.to_string());
                }
                v
            })
            .collect();
        json!({
            "mode": self.mode.name(),
            "dimension": self.fields.len(),
            "equations": self.equations,
            "columns": self.columns,
            "rank": self.rank,
            "ansatz": self.ansatz,
            "fields": fields,
        })
    }
}

/// Linear term `c · ∂^o u` of a determining equation.
type LinearTerms = BTreeMap<(usize, Vec<u32>), Poly>;

fn split_linear_terms(eq: &RatExpr, unknowns: &[FuncApp]) -> Result<LinearTerms, SymmetryError> {
    let is_unknown = |a: &Atom| match a {
        Atom::Func(f) => unknowns.iter().position(|u| u.name == f.name && u.args == f.args),
        _ => None,
    };
    if eq.den().atoms().iter().any(|a| is_unknown(a).is_some()) {
        return Err(SymmetryError::NotLinear(eq.to_string()));
    }
    let mut out = LinearTerms::new();
    for (m, q) in eq.num().terms() {
        let mut found = None;
        let mut rest = Vec::new();
        for (a, k) in m.pairs() {
            match is_unknown(a) {
                Some(u) if *k == 1 && found.is_none() => {
                    let Atom::Func(f) = a else { unreachable!() };
                    found = Some((u, f.orders.clone()));
                }
                Some(_) => return Err(SymmetryError::NotLinear(eq.to_string())),
                None => rest.push((a.clone(), *k)),
            }
        }
        let key = found.ok_or_else(|| SymmetryError::NotLinear(eq.to_string()))?;
        let entry = out.entry(key).or_default();
        *entry = entry.add(&Poly::monomial(Monomial::from_pairs(rest), q.clone()));
    }
    Ok(out)
}

fn basis_derivative(b: &RatExpr, vars: &[Symbol], orders: &[u32]) -> RatExpr {
    let mut out = b.clone();
    for (v, k) in vars.iter().zip(orders) {
        for _ in 0..*k {
            out = out.diff(&Atom::Sym(v.clone()));
        }
    }
    out
}

/// Solve the determining system over `ansatz`.
pub fn solve_determining(ds: &DeterminingSystem, ansatz: &Ansatz) -> Result<SymmetrySolution, SymmetryError> {
    ansatz.validate()?;
    let basis = &ansatz.basis;
    if !funcspan::independent(&basis.iter().map(|b| vec![b.clone()]).collect::<Vec<_>>()) {
        return Err(SymmetryError::AnsatzDependent);
    }
    let nb = basis.len();
    let ncols = ds.unknowns.len() * nb;
    let vars = ds.chart.base_symbols();

    let split: Vec<LinearTerms> = ds
        .equations
        .iter()
        .map(|e| split_linear_terms(&e.expr, &ds.unknowns))
        .collect::<Result<_, _>>()?;
    let orders: BTreeSet<Vec<u32>> = split.iter().flat_map(|t| t.keys().map(|(_, o)| o.clone())).collect();

    // ∂^o B_k over a global common denominator.
    let mut derivs: HashMap<(Vec<u32>, usize), RatExpr> = HashMap::new();
    for o in &orders {
        for (k, b) in basis.iter().enumerate() {
            derivs.insert((o.clone(), k), basis_derivative(b, &vars, o));
        }
    }
    {
        let all: Vec<RatExpr> = derivs.values().cloned().collect();
        ansatz.check_closed(&all, &ds.chart)?;
    }
    let mut den = Poly::one();
    for d in derivs.values() {
        if !d.den().is_one() {
            den = den.lcm(d.den());
        }
    }
    let scaled: HashMap<(Vec<u32>, usize), Poly> = derivs
        .into_iter()
        .map(|(key, d)| {
            let f = den.div_exact(d.den()).expect("common denominator");
            (key, d.num().mul(&f))
        })
        .collect();

    let mut elim = SparseEliminator::new(ncols);
    for terms in &split {
        let mut rows: BTreeMap<Monomial, BTreeMap<usize, Rational>> = BTreeMap::new();
        for ((u, o), c) in terms {
            for k in 0..nb {
                let p = &scaled[&(o.clone(), k)];
                if p.is_zero() {
                    continue;
                }
                let col = u * nb + k;
                for (m, q) in c.mul(p).terms() {
                    *rows.entry(m.clone()).or_default().entry(col).or_insert_with(Rational::zero) += q;
                }
            }
        }
        for row in rows.into_values() {
            let row: Vec<(usize, Rational)> = row.into_iter().filter(|(_, v)| !v.is_zero()).collect();
            if !row.is_empty() {
                elim.add_row(row);
            }
        }
        if elim.is_full_rank() {
            break;
        }
    }

    // Canonical basis; vectors whose field part vanishes are trivial gauges.
    let kernel = Subspace::span(ncols, &elim.nullspace());
    let field_cols = (ds.chart.dim() + 1) * nb;
    let mut fields = Vec::new();
    let mut gauges = Vec::new();
    for v in kernel.basis() {
        if v[..field_cols].iter().all(Zero::is_zero) {
            continue;
        }
        let combine = |u: usize| -> RatExpr {
            let mut acc = RatExpr::zero();
            for (k, b) in basis.iter().enumerate() {
                let c = &v[u * nb + k];
                if !c.is_zero() {
                    acc = &acc + &b.scale(c);
                }
            }
            acc
        };
        let comps: Vec<RatExpr> = (0..=ds.chart.dim()).map(combine).collect();
        let name = format!("Y{}", fields.len() + 1);
        fields.push(BundleVectorField::from_components(&ds.chart, &name, comps)?);
        if ds.has_gauge() {
            gauges.push(combine(ds.chart.dim() + 1));
        }
    }
    Ok(SymmetrySolution {
        mode: ds.mode,
        fields,
        gauges,
        equations: ds.equations.len(),
        columns: ncols,
        rank: elim.rank(),
        ansatz: ansatz.to_json(),
    })
}
