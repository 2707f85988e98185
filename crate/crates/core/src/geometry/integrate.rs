use thiserror::Error;

use super::{CoordChart, GeodesicSystem};
use crate::symexpr::{Atom, CompiledExprs, EvalError, RatExpr};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrationError {
    #[error("initial state must have {expected} numbers (positions then velocities), got {got}")]
    InitialState { expected: usize, got: usize },
    #[error("step and span must be positive and finite")]
    BadStep,
    #[error("geodesic system still contains {0}; bind it to a concrete expression")]
    Unbound(String),
    #[error("singularity at s = {s}: {source}")]
    Singular { s: f64, source: EvalError },
}

/// Samples `(s, x, ẋ)` of a numerically integrated geodesic.
#[derive(Clone, Debug)]
pub struct GeodesicTrace {
    pub chart: CoordChart,
    pub step: f64,
    pub s: Vec<f64>,
    pub x: Vec<Vec<f64>>,
    pub xdot: Vec<Vec<f64>>,
}

impl GeodesicTrace {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    fn inputs(chart: &CoordChart) -> Vec<Atom> {
        let mut v = vec![chart.param_atom()];
        v.extend((0..chart.dim()).map(|i| chart.coord_atom(i)));
        v.extend(chart.velocities());
        v
    }

    /// Evaluate a function of `(s, x, ẋ)` at every sample.
    pub fn evaluate(&self, e: &RatExpr) -> Result<Vec<f64>, IntegrationError> {
        let compiled = CompiledExprs::new(&Self::inputs(&self.chart), std::slice::from_ref(e))
            .map_err(|err| IntegrationError::Unbound(err.to_string()))?;
        let mut out = Vec::with_capacity(self.len());
        let mut slots = Vec::with_capacity(1 + 2 * self.chart.dim());
        for k in 0..self.len() {
            slots.clear();
            slots.push(self.s[k]);
            slots.extend_from_slice(&self.x[k]);
            slots.extend_from_slice(&self.xdot[k]);
            let v = compiled
                .eval(&slots)
                .map_err(|source| IntegrationError::Singular { s: self.s[k], source })?;
            out.push(v[0]);
        }
        Ok(out)
    }

    /// Largest deviation of `e` from its initial value along the trace.
    pub fn drift(&self, e: &RatExpr) -> Result<f64, IntegrationError> {
        let v = self.evaluate(e)?;
        let v0 = v.first().copied().unwrap_or(0.0);
        Ok(v.iter().map(|x| (x - v0).abs()).fold(0.0, f64::max))
    }
}

/// Classical fixed-step RK4 for `ẍ = G(s, x, ẋ)`.
///
/// Opaque functions must already be substituted away. `init` holds the
/// positions followed by the velocities at `s = 0`.
pub fn integrate_geodesic(
    sys: &GeodesicSystem,
    init: &[f64],
    step: f64,
    span: f64,
) -> Result<GeodesicTrace, IntegrationError> {
    let chart = sys.chart().clone();
    let n = chart.dim();
    if init.len() != 2 * n {
        return Err(IntegrationError::InitialState {
            expected: 2 * n,
            got: init.len(),
        });
    }
    if !(step.is_finite() && span.is_finite() && step > 0.0 && span > 0.0) {
        return Err(IntegrationError::BadStep);
    }
    let inputs = GeodesicTrace::inputs(&chart);
    let compiled =
        CompiledExprs::new(&inputs, sys.rhs()).map_err(|e| IntegrationError::Unbound(e.to_string()))?;

    let field = |s: f64, y: &[f64]| -> Result<Vec<f64>, IntegrationError> {
        let mut slots = Vec::with_capacity(1 + 2 * n);
        slots.push(s);
        slots.extend_from_slice(y);
        let acc = compiled
            .eval(&slots)
            .map_err(|source| IntegrationError::Singular { s, source })?;
        let mut dy = y[n..].to_vec();
        dy.extend(acc);
        Ok(dy)
    };
    let axpy = |y: &[f64], h: f64, k: &[f64]| -> Vec<f64> { y.iter().zip(k).map(|(a, b)| a + h * b).collect() };

    let steps = (span / step).round() as usize;
    let mut trace = GeodesicTrace {
        chart,
        step,
        s: Vec::with_capacity(steps + 1),
        x: Vec::with_capacity(steps + 1),
        xdot: Vec::with_capacity(steps + 1),
    };
    let mut y = init.to_vec();
    let mut s = 0.0;
    let push = |trace: &mut GeodesicTrace, s: f64, y: &[f64]| {
        trace.s.push(s);
        trace.x.push(y[..n].to_vec());
        trace.xdot.push(y[n..].to_vec());
    };
    push(&mut trace, s, &y);
    for k in 1..=steps {
        let k1 = field(s, &y)?;
        let k2 = field(s + step / 2.0, &axpy(&y, step / 2.0, &k1))?;
        let k3 = field(s + step / 2.0, &axpy(&y, step / 2.0, &k2))?;
        let k4 = field(s + step, &axpy(&y, step, &k3))?;
        for i in 0..2 * n {
            y[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(IntegrationError::Singular {
                s,
                source: EvalError::NonFinite,
            });
        }
        s = k as f64 * step;
        push(&mut trace, s, &y);
    }
    Ok(trace)
}
