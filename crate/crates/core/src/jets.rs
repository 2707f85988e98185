//! Total derivatives and prolongations on the second-order jet bundle.

use thiserror::Error;

use crate::geometry::CoordChart;
use crate::symexpr::{Atom, KernelError, RatExpr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("total derivative of an expression containing second-order jets exceeds the supported order 2")]
    OrderExceeded,
    #[error("vector field component depends on jet variables")]
    JetInField,
    #[error("vector field has {got} components, chart needs {expected}")]
    Arity { expected: usize, got: usize },
    #[error("vector fields live on different charts")]
    ChartMismatch,
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

fn max_jet_order(e: &RatExpr) -> u8 {
    e.atoms_deep()
        .iter()
        .filter_map(|a| match a {
            Atom::Jet(j) => Some(j.order),
            _ => None,
        })
        .max()
        .unwrap_or(0)
}

/// `D e = ∂_s e + ẋ^μ ∂_{x^μ} e + ẍ^μ ∂_{ẋ^μ} e`.
pub fn total_derivative(e: &RatExpr, chart: &CoordChart) -> Result<RatExpr, JetError> {
    if max_jet_order(e) >= 2 {
        return Err(JetError::OrderExceeded);
    }
    let mut acc = e.diff(&chart.param_atom());
    for i in 0..chart.dim() {
        let dx = e.diff(&chart.coord_atom(i));
        if !dx.is_zero() {
            acc = &acc + &(&chart.velocity(i) * &dx);
        }
        let dv = e.diff(&chart.jet(i, 1));
        if !dv.is_zero() {
            acc = &acc + &(&chart.acceleration(i) * &dv);
        }
    }
    Ok(acc)
}

/// `ξ ∂_s + η^α ∂_{x^α}` on the `(s, x)` bundle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleVectorField {
    chart: CoordChart,
    pub name: String,
    pub xi: RatExpr,
    pub eta: Vec<RatExpr>,
}

impl BundleVectorField {
    pub fn new(chart: &CoordChart, name: &str, xi: RatExpr, eta: Vec<RatExpr>) -> Result<Self, JetError> {
        if eta.len() != chart.dim() {
            return Err(JetError::Arity {
                expected: chart.dim() + 1,
                got: eta.len() + 1,
            });
        }
        if max_jet_order(&xi) > 0 || eta.iter().any(|e| max_jet_order(e) > 0) {
            return Err(JetError::JetInField);
        }
        Ok(BundleVectorField {
            chart: chart.clone(),
            name: name.to_string(),
            xi,
            eta,
        })
    }

    /// Build from the `n + 1` components `(ξ, η^0, …)`.
    pub fn from_components(chart: &CoordChart, name: &str, comps: Vec<RatExpr>) -> Result<Self, JetError> {
        let mut it = comps.into_iter();
        let xi = it.next().unwrap_or_else(RatExpr::zero);
        Self::new(chart, name, xi, it.collect())
    }

    pub fn zero(chart: &CoordChart) -> Self {
        BundleVectorField {
            chart: chart.clone(),
            name: "0".into(),
            xi: RatExpr::zero(),
            eta: vec![RatExpr::zero(); chart.dim()],
        }
    }

    /// `∂_s` (index `None`) or `∂_{x^i}`.
    pub fn coordinate(chart: &CoordChart, index: Option<usize>) -> Self {
        let mut f = Self::zero(chart);
        match index {
            None => {
                f.xi = RatExpr::one();
                f.name = format!("d_{}", chart.param());
            }
            Some(i) => {
                f.eta[i] = RatExpr::one();
                f.name = format!("d_{}", chart.coords()[i]);
            }
        }
        f
    }

    pub fn chart(&self) -> &CoordChart {
        &self.chart
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    /// `(ξ, η^0, …, η^{n-1})`.
    pub fn components(&self) -> Vec<RatExpr> {
        let mut v = vec![self.xi.clone()];
        v.extend(self.eta.iter().cloned());
        v
    }

    pub fn is_zero(&self) -> bool {
        self.xi.is_zero() && self.eta.iter().all(RatExpr::is_zero)
    }

    /// `X(f) = ξ ∂_s f + η^α ∂_α f`.
    pub fn apply(&self, f: &RatExpr) -> RatExpr {
        let mut acc = if self.xi.is_zero() {
            RatExpr::zero()
        } else {
            &self.xi * &f.diff(&self.chart.param_atom())
        };
        for (i, e) in self.eta.iter().enumerate() {
            if e.is_zero() {
                continue;
            }
            let d = f.diff(&self.chart.coord_atom(i));
            if !d.is_zero() {
                acc = &acc + &(e * &d);
            }
        }
        acc
    }

    /// Linear combination `Σ c_k X_k`.
    pub fn combination(chart: &CoordChart, name: &str, terms: &[(RatExpr, &BundleVectorField)]) -> Self {
        let mut out = Self::zero(chart).with_name(name);
        for (c, f) in terms {
            out.xi = &out.xi + &(c * &f.xi);
            for i in 0..chart.dim() {
                out.eta[i] = &out.eta[i] + &(c * &f.eta[i]);
            }
        }
        out
    }

    /// Lie bracket `[X, Y]` of vector fields on `(s, x)`.
    pub fn bracket(&self, o: &BundleVectorField) -> Result<BundleVectorField, JetError> {
        if self.chart != o.chart {
            return Err(JetError::ChartMismatch);
        }
        let comps: Vec<RatExpr> = self
            .components()
            .iter()
            .zip(o.components())
            .map(|(a, b)| &self.apply(&b) - &o.apply(a))
            .collect();
        Self::from_components(&self.chart, &format!("[{}, {}]", self.name, o.name), comps)
    }
}

/// First and second prolongation coefficients of a field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProlongedField {
    pub base: BundleVectorField,
    pub eta1: Vec<RatExpr>,
    /// Empty for a first-order prolongation.
    pub eta2: Vec<RatExpr>,
}

impl ProlongedField {
    /// Apply the prolonged field to a function of `(s, x, ẋ[, ẍ])`.
    pub fn apply(&self, f: &RatExpr) -> Result<RatExpr, JetError> {
        let ch = self.base.chart();
        let mut acc = self.base.apply(f);
        for i in 0..ch.dim() {
            let d1 = f.diff(&ch.jet(i, 1));
            if !d1.is_zero() && !self.eta1[i].is_zero() {
                acc = &acc + &(&self.eta1[i] * &d1);
            }
            let d2 = f.diff(&ch.jet(i, 2));
            if !d2.is_zero() {
                let e2 = self.eta2.get(i).ok_or(JetError::OrderExceeded)?;
                acc = &acc + &(e2 * &d2);
            }
        }
        Ok(acc)
    }
}

/// Prolongation by the recursion `η_(1) = Dη − ẋ Dξ`, `η_(2) = Dη_(1) − ẍ Dξ`.
pub fn prolong(x: &BundleVectorField, order: u8) -> Result<ProlongedField, JetError> {
    assert!(order == 1 || order == 2, "prolongation order must be 1 or 2");
    let ch = x.chart();
    let dxi = total_derivative(&x.xi, ch)?;
    let mut eta1 = Vec::with_capacity(ch.dim());
    for i in 0..ch.dim() {
        let d = total_derivative(&x.eta[i], ch)?;
        eta1.push(&d - &(&ch.velocity(i) * &dxi));
    }
    let mut eta2 = Vec::new();
    if order == 2 {
        for (i, e1) in eta1.iter().enumerate() {
            let d = total_derivative(e1, ch)?;
            eta2.push(&d - &(&ch.acceleration(i) * &dxi));
        }
    }
    Ok(ProlongedField {
        base: x.clone(),
        eta1,
        eta2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::{canonicalize, parse_expr};

    fn e(s: &str) -> RatExpr {
        canonicalize(&parse_expr(s).unwrap()).unwrap()
    }

    fn chart() -> CoordChart {
        CoordChart::new("s", &["t", "r", "theta", "phi"], &["theta", "phi"]).unwrap()
    }

    #[test]
    fn total_derivative_examples() {
        let ch = chart();
        assert_eq!(total_derivative(&e("t"), &ch).unwrap(), e("D(t, s)"));
        assert_eq!(total_derivative(&e("r^2"), &ch).unwrap(), e("2*r*D(r, s)"));
        assert_eq!(total_derivative(&e("D(t, s)"), &ch).unwrap(), e("D(t, s, 2)"));
        assert_eq!(
            total_derivative(&e("D(t, s, 2)"), &ch).unwrap_err(),
            JetError::OrderExceeded
        );
    }

    #[test]
    fn scaling_in_parameter() {
        let ch = chart();
        let x = BundleVectorField::new(&ch, "S", e("s"), vec![RatExpr::zero(); 4]).unwrap();
        let p = prolong(&x, 2).unwrap();
        for i in 0..4 {
            assert_eq!(p.eta1[i], -ch.velocity(i));
            assert_eq!(p.eta2[i], (-ch.acceleration(i)).scale(&crate::symexpr::int(2)));
        }
    }

    #[test]
    fn translation_prolongs_to_zero() {
        let ch = chart();
        let p = prolong(&BundleVectorField::coordinate(&ch, Some(3)), 2).unwrap();
        assert!(p.eta1.iter().chain(&p.eta2).all(RatExpr::is_zero));
    }

    #[test]
    fn rotation_generator_first_prolongation() {
        let ch = chart();
        let x4 = BundleVectorField::new(
            &ch,
            "X4",
            RatExpr::zero(),
            vec![RatExpr::zero(), RatExpr::zero(), e("-cos(phi)"), e("cot(theta)*sin(phi)")],
        )
        .unwrap();
        let p = prolong(&x4, 1).unwrap();
        assert_eq!(p.eta1[2], e("sin(phi)*D(phi, s)"));
        assert_eq!(
            p.eta1[3],
            e("-D(theta, s)*sin(phi)/sin(theta)^2 + cot(theta)*cos(phi)*D(phi, s)")
        );
    }

    #[test]
    fn bracket_of_rotations() {
        let ch = chart();
        let x3 = BundleVectorField::coordinate(&ch, Some(3));
        let x4 = BundleVectorField::new(
            &ch,
            "X4",
            RatExpr::zero(),
            vec![RatExpr::zero(), RatExpr::zero(), e("-cos(phi)"), e("cot(theta)*sin(phi)")],
        )
        .unwrap();
        let b = x3.bracket(&x4).unwrap();
        assert_eq!(b.eta[2], e("sin(phi)"));
        assert_eq!(b.eta[3], e("cot(theta)*cos(phi)"));
    }
}
