//! Metrics and the geodesic pipeline.

mod integrate;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::jets::{total_derivative, JetError};
use crate::symexpr::{Atom, Bindings, JetVar, KernelError, RatExpr, Symbol};

pub use integrate::{integrate_geodesic, GeodesicTrace, IntegrationError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("invalid chart: {0}")]
    Chart(String),
    #[error("metric is singular (determinant is canonically zero)")]
    Singular,
    #[error("metric is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("metric component g[{0}][{1}] uses undeclared symbol {2}")]
    Undeclared(usize, usize, String),
    #[error("metric component g[{0}][{1}] depends on jet variables or the curve parameter")]
    NotPointFunction(usize, usize),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// Curve parameter, coordinates, and which coordinates are angles.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoordChart {
    param: Symbol,
    coords: Vec<Symbol>,
    angles: Vec<Symbol>,
}

impl CoordChart {
    pub fn new(param: &str, coords: &[&str], angles: &[&str]) -> Result<Self, GeometryError> {
        let coords: Vec<Symbol> = coords.iter().map(|c| Symbol::new(c)).collect();
        let angles: Vec<Symbol> = angles.iter().map(|c| Symbol::new(c)).collect();
        Self::from_symbols(Symbol::new(param), coords, angles)
    }

    pub fn from_symbols(param: Symbol, coords: Vec<Symbol>, angles: Vec<Symbol>) -> Result<Self, GeometryError> {
        if coords.is_empty() {
            return Err(GeometryError::Chart("at least one coordinate is required".into()));
        }
        let distinct: BTreeSet<&Symbol> = coords.iter().collect();
        if distinct.len() != coords.len() {
            return Err(GeometryError::Chart("coordinate names must be distinct".into()));
        }
        if distinct.contains(&param) {
            return Err(GeometryError::Chart(format!("parameter {param} clashes with a coordinate")));
        }
        if let Some(a) = angles.iter().find(|a| !distinct.contains(a)) {
            return Err(GeometryError::Chart(format!("angle {a} is not a coordinate")));
        }
        Ok(CoordChart { param, coords, angles })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn param(&self) -> &Symbol {
        &self.param
    }

    pub fn coords(&self) -> &[Symbol] {
        &self.coords
    }

    pub fn angles(&self) -> &[Symbol] {
        &self.angles
    }

    pub fn is_angle(&self, s: &Symbol) -> bool {
        self.angles.contains(s)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c.name() == name)
    }

    pub fn param_atom(&self) -> Atom {
        Atom::Sym(self.param.clone())
    }

    pub fn coord_atom(&self, i: usize) -> Atom {
        Atom::Sym(self.coords[i].clone())
    }

    /// Order-`k` jet of coordinate `i`.
    pub fn jet(&self, i: usize, k: u8) -> Atom {
        Atom::Jet(JetVar::new(&self.coords[i], &self.param, k))
    }

    pub fn velocity(&self, i: usize) -> RatExpr {
        RatExpr::atom(self.jet(i, 1))
    }

    pub fn acceleration(&self, i: usize) -> RatExpr {
        RatExpr::atom(self.jet(i, 2))
    }

    pub fn velocities(&self) -> Vec<Atom> {
        (0..self.dim()).map(|i| self.jet(i, 1)).collect()
    }

    /// Parameter followed by the coordinates.
    pub fn base_symbols(&self) -> Vec<Symbol> {
        let mut v = vec![self.param.clone()];
        v.extend(self.coords.iter().cloned());
        v
    }
}

/// Opaque function declaration, e.g. `M(t)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FunctionDecl {
    pub name: String,
    pub args: Vec<Symbol>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Metric {
    chart: CoordChart,
    g: Vec<Vec<RatExpr>>,
    functions: Vec<FunctionDecl>,
}

impl Metric {
    /// Build from a full component matrix, validating symmetry, declared
    /// symbols and nonsingularity.
    pub fn new(chart: CoordChart, g: Vec<Vec<RatExpr>>, functions: Vec<FunctionDecl>) -> Result<Self, GeometryError> {
        let n = chart.dim();
        if g.len() != n || g.iter().any(|r| r.len() != n) {
            return Err(GeometryError::Chart(format!("metric must be {n}x{n}")));
        }
        let m = Metric { chart, g, functions };
        for i in 0..n {
            for j in 0..n {
                if m.g[i][j] != m.g[j][i] {
                    return Err(GeometryError::NotSymmetric(i, j));
                }
                m.check_symbols(i, j)?;
            }
        }
        if det(&m.g)?.is_zero() {
            return Err(GeometryError::Singular);
        }
        Ok(m)
    }

    /// Build from the upper triangle (`i <= j`), mirroring the rest.
    pub fn from_upper(
        chart: CoordChart,
        entries: &[(usize, usize, RatExpr)],
        functions: Vec<FunctionDecl>,
    ) -> Result<Self, GeometryError> {
        let n = chart.dim();
        let mut g = vec![vec![RatExpr::zero(); n]; n];
        for (i, j, e) in entries {
            if *i >= n || *j >= n {
                return Err(GeometryError::Chart(format!("index ({i}, {j}) out of range")));
            }
            g[*i][*j] = e.clone();
            g[*j][*i] = e.clone();
        }
        Metric::new(chart, g, functions)
    }

    fn check_symbols(&self, i: usize, j: usize) -> Result<(), GeometryError> {
        for a in self.g[i][j].atoms_deep() {
            match &a {
                Atom::Sym(s) => {
                    if s == self.chart.param() {
                        return Err(GeometryError::NotPointFunction(i, j));
                    }
                    if !self.chart.coords().contains(s) {
                        return Err(GeometryError::Undeclared(i, j, s.to_string()));
                    }
                }
                Atom::Jet(_) => return Err(GeometryError::NotPointFunction(i, j)),
                Atom::Func(f) => {
                    let ok = self
                        .functions
                        .iter()
                        .any(|d| d.name == f.name.name() && d.args == f.args);
                    if !ok {
                        return Err(GeometryError::Undeclared(i, j, f.name.to_string()));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn chart(&self) -> &CoordChart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn component(&self, i: usize, j: usize) -> &RatExpr {
        &self.g[i][j]
    }

    pub fn components(&self) -> &[Vec<RatExpr>] {
        &self.g
    }

    pub fn functions(&self) -> &[FunctionDecl] {
        &self.functions
    }

    /// Coordinates that actually occur in some component.
    pub fn used_coords(&self) -> Vec<Symbol> {
        self.chart
            .coords()
            .iter()
            .filter(|c| {
                let a = Atom::Sym((*c).clone());
                self.g.iter().flatten().any(|e| e.depends_on(&a))
            })
            .cloned()
            .collect()
    }

    /// Same metric with opaque functions replaced (e.g. `M ↦ 1`).
    pub fn specialize(&self, b: &Bindings, keep: Vec<FunctionDecl>) -> Result<Metric, GeometryError> {
        let g = self
            .g
            .iter()
            .map(|row| row.iter().map(|e| e.substitute(b)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Metric::new(self.chart.clone(), g, keep)
    }
}

fn det(m: &[Vec<RatExpr>]) -> Result<RatExpr, KernelError> {
    let n = m.len();
    let mut a: Vec<Vec<RatExpr>> = m.to_vec();
    let mut d = RatExpr::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Ok(RatExpr::zero());
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d = &d * &a[c][c];
        let inv = a[c][c].inv()?;
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            for j in c..n {
                let v = &a[i][j] - &(&f * &a[c][j]);
                a[i][j] = v;
            }
        }
    }
    Ok(d)
}

/// Symbolic matrix inverse by Gauss–Jordan elimination.
pub fn inverse_matrix(m: &[Vec<RatExpr>]) -> Result<Vec<Vec<RatExpr>>, GeometryError> {
    let n = m.len();
    let mut a: Vec<Vec<RatExpr>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { RatExpr::one() } else { RatExpr::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero()).ok_or(GeometryError::Singular)?;
        a.swap(p, c);
        let inv = a[c][c].inv()?;
        a[c] = a[c].iter().map(|x| x * &inv).collect();
        for i in 0..n {
            if i == c || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for j in 0..2 * n {
                let v = &a[i][j] - &(&f * &a[c][j]);
                a[i][j] = v;
            }
        }
    }
    Ok(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Inverse metric `g^{ij}` as a metric on the same chart.
pub fn inverse_metric(g: &Metric) -> Result<Metric, GeometryError> {
    let inv = inverse_matrix(&g.g)?;
    Ok(Metric {
        chart: g.chart.clone(),
        g: inv,
        functions: g.functions.clone(),
    })
}

/// `Γ^i_{jk}` indexed as `[i][j][k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChristoffelTensor {
    pub gamma: Vec<Vec<Vec<RatExpr>>>,
}

impl ChristoffelTensor {
    pub fn get(&self, i: usize, j: usize, k: usize) -> &RatExpr {
        &self.gamma[i][j][k]
    }
}

pub fn christoffel(g: &Metric) -> Result<ChristoffelTensor, GeometryError> {
    let n = g.dim();
    let ginv = inverse_matrix(&g.g)?;
    let ch = g.chart();
    // dg[l][j][k] = ∂_k g_{lj}
    let dg: Vec<Vec<Vec<RatExpr>>> = (0..n)
        .map(|l| {
            (0..n)
                .map(|j| (0..n).map(|k| g.g[l][j].diff(&ch.coord_atom(k))).collect())
                .collect()
        })
        .collect();
    let half = RatExpr::constant(crate::symexpr::rat(1, 2));
    let mut gamma = vec![vec![vec![RatExpr::zero(); n]; n]; n];
    for j in 0..n {
        for k in j..n {
            // Lowered symbol Γ_{l jk}.
            let low: Vec<RatExpr> = (0..n)
                .map(|l| &(&(&dg[l][j][k] + &dg[l][k][j]) - &dg[j][k][l]) * &half)
                .collect();
            for i in 0..n {
                let v: RatExpr = (0..n)
                    .filter(|l| !ginv[i][*l].is_zero() && !low[*l].is_zero())
                    .map(|l| &ginv[i][l] * &low[l])
                    .sum();
                gamma[i][j][k] = v.clone();
                gamma[i][k][j] = v;
            }
        }
    }
    Ok(ChristoffelTensor { gamma })
}

/// Geodesic equations in solved form `ẍ^i = G^i(x, ẋ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeodesicSystem {
    chart: CoordChart,
    rhs: Vec<RatExpr>,
}

impl GeodesicSystem {
    pub fn new(chart: CoordChart, rhs: Vec<RatExpr>) -> Self {
        assert_eq!(chart.dim(), rhs.len());
        GeodesicSystem { chart, rhs }
    }

    pub fn chart(&self) -> &CoordChart {
        &self.chart
    }

    /// `G^i`.
    pub fn rhs(&self) -> &[RatExpr] {
        &self.rhs
    }

    /// `E_i = ẍ^i − G^i`.
    pub fn equations(&self) -> Vec<RatExpr> {
        (0..self.chart.dim())
            .map(|i| &self.chart.acceleration(i) - &self.rhs[i])
            .collect()
    }

    /// Bindings `ẍ^i ↦ G^i`, restricting to the solution manifold.
    pub fn on_shell(&self) -> Bindings {
        let mut b = Bindings::new();
        for (i, g) in self.rhs.iter().enumerate() {
            b.bind(self.chart.jet(i, 2), g.clone());
        }
        b
    }

    /// Replace opaque functions, e.g. for numerical integration.
    pub fn substitute(&self, b: &Bindings) -> Result<GeodesicSystem, KernelError> {
        Ok(GeodesicSystem {
            chart: self.chart.clone(),
            rhs: self.rhs.iter().map(|e| e.substitute(b)).collect::<Result<_, _>>()?,
        })
    }
}

pub fn geodesic_system(g: &Metric) -> Result<GeodesicSystem, GeometryError> {
    let gamma = christoffel(g)?;
    let ch = g.chart();
    let n = ch.dim();
    let rhs = (0..n)
        .map(|i| {
            let mut acc = RatExpr::zero();
            for j in 0..n {
                for k in 0..n {
                    let c = gamma.get(i, j, k);
                    if !c.is_zero() {
                        acc = &acc - &(&(c * &ch.velocity(j)) * &ch.velocity(k));
                    }
                }
            }
            acc
        })
        .collect();
    Ok(GeodesicSystem::new(ch.clone(), rhs))
}

/// `L = g_{μν} ẋ^μ ẋ^ν`.
pub fn geodesic_lagrangian(g: &Metric) -> RatExpr {
    let ch = g.chart();
    let n = ch.dim();
    let mut acc = RatExpr::zero();
    for i in 0..n {
        for j in 0..n {
            if !g.g[i][j].is_zero() {
                acc = &acc + &(&(&g.g[i][j] * &ch.velocity(i)) * &ch.velocity(j));
            }
        }
    }
    acc
}

/// `d/ds(∂L/∂ẋ^i) − ∂L/∂x^i` for each coordinate.
pub fn euler_lagrange(l: &RatExpr, chart: &CoordChart) -> Result<Vec<RatExpr>, GeometryError> {
    (0..chart.dim())
        .map(|i| {
            let p = l.diff(&chart.jet(i, 1));
            Ok(&total_derivative(&p, chart)? - &l.diff(&chart.coord_atom(i)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::{canonicalize, parse_expr};

    fn e(s: &str) -> RatExpr {
        canonicalize(&parse_expr(s).unwrap()).unwrap()
    }

    pub(crate) fn vaidya_bonner() -> Metric {
        let ch = CoordChart::new("s", &["t", "r", "theta", "phi"], &["theta", "phi"]).unwrap();
        let decls = vec![
            FunctionDecl {
                name: "M".into(),
                args: vec!["t".into()],
            },
            FunctionDecl {
                name: "Q".into(),
                args: vec!["t".into()],
            },
        ];
        Metric::from_upper(
            ch,
            &[
                (0, 0, e("-(1 - M(t)/r + Q(t)/r^2)")),
                (0, 1, e("-1")),
                (2, 2, e("r^2")),
                (3, 3, e("r^2*sin(theta)^2")),
            ],
            decls,
        )
        .unwrap()
    }

    #[test]
    fn vb_inverse_block() {
        let g = vaidya_bonner();
        let inv = inverse_metric(&g).unwrap();
        assert!(inv.component(0, 0).is_zero());
        assert_eq!(inv.component(0, 1), &e("-1"));
        assert_eq!(inv.component(1, 1), &e("1 - M(t)/r + Q(t)/r^2"));
    }

    #[test]
    fn vb_christoffel_samples() {
        let gm = christoffel(&vaidya_bonner()).unwrap();
        assert_eq!(gm.get(2, 3, 3), &e("-sin(theta)*cos(theta)"));
        assert_eq!(gm.get(3, 2, 3), &e("cot(theta)"));
        assert_eq!(gm.get(2, 1, 2), &e("1/r"));
    }

    #[test]
    fn polar_christoffel() {
        let ch = CoordChart::new("s", &["r", "theta"], &["theta"]).unwrap();
        let g = Metric::from_upper(ch, &[(0, 0, e("1")), (1, 1, e("r^2"))], vec![]).unwrap();
        let gm = christoffel(&g).unwrap();
        assert_eq!(gm.get(0, 1, 1), &e("-r"));
        assert_eq!(gm.get(1, 0, 1), &e("1/r"));
        assert!(gm.get(0, 0, 0).is_zero());
    }

    #[test]
    fn rejects_bad_metrics() {
        let ch = CoordChart::new("s", &["x", "y"], &[]).unwrap();
        assert!(matches!(
            Metric::from_upper(ch.clone(), &[(0, 0, e("1")), (0, 1, e("1")), (1, 1, e("1"))], vec![]),
            Err(GeometryError::Singular)
        ));
        assert!(matches!(
            Metric::from_upper(ch.clone(), &[(0, 0, e("z")), (1, 1, e("1"))], vec![]),
            Err(GeometryError::Undeclared(..))
        ));
        assert!(CoordChart::new("x", &["x", "y"], &[]).is_err());
    }

    #[test]
    fn sphere_euler_lagrange() {
        let ch = CoordChart::new("s", &["theta", "phi"], &["theta", "phi"]).unwrap();
        let g = Metric::from_upper(ch.clone(), &[(0, 0, e("1")), (1, 1, e("sin(theta)^2"))], vec![]).unwrap();
        let el = euler_lagrange(&geodesic_lagrangian(&g), &ch).unwrap();
        assert_eq!(el[0], e("2*D(theta, s, 2) - 2*sin(theta)*cos(theta)*D(phi, s)^2"));
        assert_eq!(
            el[1],
            e("2*sin(theta)^2*D(phi, s, 2) + 4*sin(theta)*cos(theta)*D(theta, s)*D(phi, s)")
        );
    }

    #[test]
    fn vb_theta_and_phi_equations() {
        let sys = geodesic_system(&vaidya_bonner()).unwrap();
        let eq = sys.equations();
        assert_eq!(
            eq[2],
            e("D(theta, s, 2) + 2/r*D(r, s)*D(theta, s) - sin(theta)*cos(theta)*D(phi, s)^2")
        );
        assert_eq!(
            eq[3],
            e("D(phi, s, 2) + 2/r*D(r, s)*D(phi, s) + 2*cot(theta)*D(theta, s)*D(phi, s)")
        );
    }
}
