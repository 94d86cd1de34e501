//! Outer minimization of channel parameters against the inner worst-case
//! cost.
//!
//! [`minmax_gda`] alternates a full multi-start ascent over input states with
//! a projected finite-difference descent step on the parameters, taken at the
//! current worst-case witness. [`golden_section_min`] and [`sweep`] cover the
//! one-parameter case exactly.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::KrausChannel;
use crate::error::{arg_err, Error, Result};
use crate::metrics::{AscentConfig, CostEvaluation, CostLandscape, ExtensionIndex};
use crate::linalg::PureState;
use crate::noise::{CnotVariants, NoiseSpec};

/// Builders must yield CPTP maps to this tolerance anywhere in the box.
pub const BUILDER_CPTP_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParameterVector {
    values: Vec<f64>,
    bounds: Vec<(f64, f64)>,
}

impl ParameterVector {
    pub fn new(values: Vec<f64>, bounds: Vec<(f64, f64)>) -> Result<Self> {
        if values.len() != bounds.len() {
            return Err(arg_err(format!("{} values but {} bounds", values.len(), bounds.len())));
        }
        for (i, (&v, &(lo, hi))) in values.iter().zip(&bounds).enumerate() {
            if !(lo <= hi && lo.is_finite() && hi.is_finite()) {
                return Err(arg_err(format!("component {i}: invalid bounds [{lo}, {hi}]")));
            }
            if !(lo..=hi).contains(&v) {
                return Err(arg_err(format!("component {i}: {v} outside [{lo}, {hi}]")));
            }
        }
        Ok(Self { values, bounds })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    /// Same bounds, new values projected onto the box.
    pub fn with_clipped(&self, values: &[f64]) -> Self {
        let values = values.iter().zip(&self.bounds).map(|(v, (lo, hi))| v.clamp(*lo, *hi)).collect();
        Self { values, bounds: self.bounds.clone() }
    }
}

type Builder = dyn Fn(&[f64]) -> Result<KrausChannel> + Send + Sync;

/// A family `Θ ↦ ℰ^(Θ)` over a box of parameters.
#[derive(Clone)]
pub struct ParametricChannel {
    bounds: Vec<(f64, f64)>,
    builder: Arc<Builder>,
}

impl fmt::Debug for ParametricChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParametricChannel").field("bounds", &self.bounds).finish_non_exhaustive()
    }
}

impl ParametricChannel {
    pub fn new<F>(bounds: Vec<(f64, f64)>, builder: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Result<KrausChannel> + Send + Sync + 'static,
    {
        if bounds.is_empty() {
            return Err(arg_err("a parametric channel needs at least one parameter"));
        }
        if bounds.iter().any(|&(lo, hi)| !(lo < hi && lo.is_finite() && hi.is_finite())) {
            return Err(arg_err("parameter bounds must be finite with lo < hi"));
        }
        Ok(Self { bounds, builder: Arc::new(builder) })
    }

    pub fn arity(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    /// Builds and validates `ℰ^(Θ)`.
    pub fn build(&self, theta: &[f64]) -> Result<KrausChannel> {
        if theta.len() != self.arity() {
            return Err(arg_err(format!("expected {} parameters, got {}", self.arity(), theta.len())));
        }
        let ch = (self.builder)(theta)?;
        let report = ch.validate_cptp(BUILDER_CPTP_TOL);
        if !report.passed {
            return Err(Error::Validation(format!("builder produced a non-CPTP channel at {theta:?}: {report}")));
        }
        Ok(ch)
    }

    pub fn point(&self, values: Vec<f64>) -> Result<ParameterVector> {
        ParameterVector::new(values, self.bounds.clone())
    }
}

/// `w1 ↦ w1·Direct + (1 − w1)·HadamardConjugated` on `w1 ∈ [0, 1]`.
pub fn cnot_mixture_family(spec: &NoiseSpec) -> Result<ParametricChannel> {
    let variants = CnotVariants::build(spec)?;
    ParametricChannel::new(vec![(0.0, 1.0)], move |theta| Ok(variants.mixture(theta[0])?.to_kraus()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GdaConfig {
    pub max_outer: usize,
    pub learning_rate: f64,
    pub fd_step: f64,
    /// Stop once the proposed parameter move is shorter than this.
    pub theta_tol: f64,
    pub ascent: AscentConfig,
    /// Restart budget of the final re-certification.
    pub certify_restarts: usize,
}

impl Default for GdaConfig {
    fn default() -> Self {
        Self {
            max_outer: 200,
            learning_rate: 0.1,
            fd_step: 1e-4,
            theta_tol: 1e-7,
            ascent: AscentConfig::default(),
            certify_restarts: 64,
        }
    }
}

impl GdaConfig {
    pub fn validate(&self) -> Result<()> {
        self.ascent.validate()?;
        if self.max_outer == 0 || self.certify_restarts == 0 {
            return Err(arg_err("max_outer and certify_restarts must be >= 1"));
        }
        for (name, v) in [("learning_rate", self.learning_rate), ("fd_step", self.fd_step), ("theta_tol", self.theta_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(arg_err(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GdaResult {
    pub theta_star: ParameterVector,
    /// Worst-case cost at `theta_star`, re-certified with the enlarged budget.
    pub cost: CostEvaluation,
    /// Best certified cost after each outer iteration (non-increasing).
    pub history: Vec<f64>,
    pub outer_iterations: usize,
    pub converged: bool,
}

/// Alternating descent-ascent for `min_Θ max_η C_m(Θ; η)`.
pub fn minmax_gda(
    pc: &ParametricChannel,
    target: &KrausChannel,
    m: ExtensionIndex,
    init: &ParameterVector,
    cfg: &GdaConfig,
) -> Result<GdaResult> {
    cfg.validate()?;
    if init.values().len() != pc.arity() {
        return Err(arg_err(format!("initial point has {} components, family has {}", init.values().len(), pc.arity())));
    }
    let inner = |theta: &[f64], warm: &[PureState]| -> Result<CostEvaluation> {
        CostLandscape::new(target, &pc.build(theta)?, m)?.worst_case(&cfg.ascent, warm)
    };

    let mut theta = pc.point(init.values().to_vec())?;
    let mut eval = inner(theta.values(), &[])?;
    let mut history = vec![eval.value];
    let mut lr = cfg.learning_rate;
    let mut converged = false;
    let mut outer = 0;

    while outer < cfg.max_outer {
        outer += 1;
        let grad = witness_gradient(pc, target, m, &theta, &eval.witness, cfg.fd_step)?;
        let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gnorm == 0.0 {
            converged = true;
            break;
        }
        let mut moved = false;
        loop {
            let proposal: Vec<f64> = theta.values().iter().zip(&grad).map(|(t, g)| t - lr * g).collect();
            let candidate = theta.with_clipped(&proposal);
            let shift = candidate
                .values()
                .iter()
                .zip(theta.values())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if shift < cfg.theta_tol {
                break;
            }
            let cand_eval = inner(candidate.values(), std::slice::from_ref(&eval.witness))?;
            if cand_eval.value < eval.value {
                theta = candidate;
                eval = cand_eval;
                lr = (lr * 1.5).min(cfg.learning_rate);
                moved = true;
                break;
            }
            lr *= 0.5;
        }
        history.push(eval.value);
        if !moved {
            converged = true;
            break;
        }
    }

    let certify = AscentConfig { restarts: cfg.certify_restarts, ..cfg.ascent.clone() };
    let mut cost = CostLandscape::new(target, &pc.build(theta.values())?, m)?
        .worst_case(&certify, std::slice::from_ref(&eval.witness))?;
    cost.converged &= converged;
    Ok(GdaResult { theta_star: theta, cost, history, outer_iterations: outer, converged })
}

/// `∂C/∂Θ` with the input state frozen at the witness; central differences,
/// one-sided at the bounds.
fn witness_gradient(
    pc: &ParametricChannel,
    target: &KrausChannel,
    m: ExtensionIndex,
    theta: &ParameterVector,
    witness: &PureState,
    h: f64,
) -> Result<Vec<f64>> {
    let cost = |values: &[f64]| -> Result<f64> {
        CostLandscape::new(target, &pc.build(values)?, m)?.cost_at_state(witness)
    };
    let mut grad = Vec::with_capacity(pc.arity());
    for (k, &(lo, hi)) in theta.bounds().iter().enumerate() {
        let mut up = theta.values().to_vec();
        let mut down = theta.values().to_vec();
        up[k] = (up[k] + h).min(hi);
        down[k] = (down[k] - h).max(lo);
        let span = up[k] - down[k];
        grad.push(if span > 0.0 { (cost(&up)? - cost(&down)?) / span } else { 0.0 });
    }
    Ok(grad)
}

/// Golden-section search on `[lo, hi]`. Returns the best point evaluated
/// (ties go to the smaller `x`); it is the exact minimizer only when `f` is
/// unimodal on the interval.
pub fn golden_section_min<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut best = (f64::NAN, f64::INFINITY);
    let record = |x: f64, fx: f64, best: &mut (f64, f64)| {
        if fx < best.1 || (fx == best.1 && x < best.0) {
            *best = (x, fx);
        }
    };
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    record(c, fc, &mut best);
    record(d, fd, &mut best);
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
            record(c, fc, &mut best);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
            record(d, fd, &mut best);
        }
    }
    let mid = 0.5 * (a + b);
    let fm = f(mid);
    record(mid, fm, &mut best);
    best
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepCurve {
    pub grid: Vec<f64>,
    pub worst_cost: Vec<f64>,
    pub mean_cost: Vec<f64>,
    pub witnesses: Vec<PureState>,
    /// Cost of each reference input at each grid point.
    pub reference_costs: Vec<Vec<f64>>,
    /// Index of the smallest worst-case cost (first on ties).
    pub argmin: usize,
    /// Index of the smallest mean cost (first on ties).
    pub mean_argmin: usize,
}

fn first_argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x < v[best] {
            best = i;
        }
    }
    best
}

pub fn uniform_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| if i + 1 == points { hi } else { lo + (i as f64 * (hi - lo)) / (points - 1) as f64 })
        .collect()
}

/// Evaluates the worst-case and mean cost on a uniform grid over the single
/// parameter. Every grid point uses the same restart and sample seeds, so a
/// point's values do not depend on the grid it belongs to.
#[allow(clippy::too_many_arguments)]
pub fn sweep(
    pc: &ParametricChannel,
    target: &KrausChannel,
    m: ExtensionIndex,
    grid_points: usize,
    cfg: &AscentConfig,
    mean_samples: usize,
    seed: u64,
    reference_states: &[PureState],
) -> Result<SweepCurve> {
    if pc.arity() != 1 {
        return Err(arg_err(format!("sweep needs a one-parameter family, got arity {}", pc.arity())));
    }
    if grid_points < 2 {
        return Err(arg_err("sweep needs at least two grid points"));
    }
    if mean_samples == 0 {
        return Err(arg_err("mean_samples must be >= 1"));
    }
    cfg.validate()?;
    let (lo, hi) = pc.bounds()[0];
    let grid = uniform_grid(lo, hi, grid_points);
    let cfg = AscentConfig { seed, ..cfg.clone() };

    let points: Vec<(CostEvaluation, f64, Vec<f64>)> = grid
        .par_iter()
        .map(|&w| {
            let land = CostLandscape::new(target, &pc.build(&[w])?, m)?;
            let worst = land.worst_case(&cfg, &[])?;
            let mean = land.mean(mean_samples, seed)?;
            let refs = reference_states.iter().map(|s| land.cost_at_state(s)).collect::<Result<Vec<_>>>()?;
            Ok((worst, mean, refs))
        })
        .collect::<Result<_>>()?;

    let worst_cost: Vec<f64> = points.iter().map(|p| p.0.value).collect();
    let mean_cost: Vec<f64> = points.iter().map(|p| p.1).collect();
    Ok(SweepCurve {
        argmin: first_argmin(&worst_cost),
        mean_argmin: first_argmin(&mean_cost),
        grid,
        worst_cost,
        mean_cost,
        witnesses: points.iter().map(|p| p.0.witness.clone()).collect(),
        reference_costs: points.into_iter().map(|p| p.2).collect(),
    })
}
