//! Trace distance and worst-case channel costs.
//!
//! For a target channel `ℰ` and candidate `ℱ` on dimension `d`, and an
//! extension of dimension `m`, the cost of a pure input `η ∈ C^m ⊗ C^d` is
//!
//! ```text
//! C_m(η) = ½ ‖(ℐ_m ⊗ ℰ)(|η⟩⟨η|) − (ℐ_m ⊗ ℱ)(|η⟩⟨η|)‖₁
//! ```
//!
//! `m = 1` is the unextended cost (reported as `n = 0`), `m = d` admits
//! maximally entangled inputs. The supremum over mixed inputs is attained on
//! pure states, so [`worst_case_cost`] runs multi-start projected gradient
//! ascent on the unit sphere of `C^{m·d}`.

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::channel::KrausChannel;
use crate::error::{arg_err, dim_err, Result};
use crate::linalg::{l2_norm, sample_pure_state, trace_norm, ComplexMatrix, DensityMatrix, PureState, C64, ZERO};
use crate::rng::stream_rng;

/// Stream offset for mean-cost samples so they never coincide with restart
/// streams drawn from the same seed.
const MEAN_STREAM_BASE: u64 = 1 << 40;
const MEAN_CHUNK: usize = 1024;

pub fn trace_distance(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    if rho1.dim() != rho2.dim() {
        return Err(dim_err(format!("trace distance between dims {} and {}", rho1.dim(), rho2.dim())));
    }
    // fixed operand order keeps the result bitwise symmetric
    let key = |r: &DensityMatrix| r.matrix().data().iter().flat_map(|z| [z.re, z.im]).collect::<Vec<f64>>();
    let swap = key(rho1).iter().zip(key(rho2).iter()).map(|(a, b)| a.total_cmp(b)).find(|o| o.is_ne())
        == Some(std::cmp::Ordering::Greater);
    let (a, b) = if swap { (rho2, rho1) } else { (rho1, rho2) };
    Ok(0.5 * trace_norm(&(a.matrix() - b.matrix())))
}

/// Dimension `m` of the trivial extension `ℐ_m`; `m = 1` means no extension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExtensionIndex(usize);

impl ExtensionIndex {
    pub const NONE: ExtensionIndex = ExtensionIndex(1);

    /// `1 ≤ m ≤ system_dim`
    pub fn new(m: usize, system_dim: usize) -> Result<Self> {
        if m == 0 || m > system_dim {
            return Err(arg_err(format!("extension dimension {m} outside 1..={system_dim}")));
        }
        Ok(Self(m))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Conventional label: `0` for no extension, otherwise `m`.
    pub fn n_label(self) -> usize {
        if self.0 == 1 {
            0
        } else {
            self.0
        }
    }
}

impl Serialize for ExtensionIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ExtensionIndex", 2)?;
        st.serialize_field("m", &self.0)?;
        st.serialize_field("n", &self.n_label())?;
        st.end()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AscentConfig {
    pub restarts: usize,
    pub max_iters: usize,
    /// Initial (and maximal) step length along the unit tangent direction.
    pub step: f64,
    pub fd_step: f64,
    /// Stop once an accepted step improves the value by less than this
    /// fraction.
    pub rel_tol: f64,
    pub stall_iters: usize,
    pub stall_tol: f64,
    pub seed: u64,
}

impl Default for AscentConfig {
    fn default() -> Self {
        Self {
            restarts: 16,
            max_iters: 500,
            step: 0.1,
            fd_step: 1e-5,
            rel_tol: 1e-10,
            stall_iters: 20,
            stall_tol: 1e-12,
            seed: 0,
        }
    }
}

impl AscentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(arg_err("restarts must be >= 1"));
        }
        if self.max_iters == 0 {
            return Err(arg_err("max_iters must be >= 1"));
        }
        for (name, v) in [("step", self.step), ("fd_step", self.fd_step)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(arg_err(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.rel_tol >= 0.0 && self.stall_tol >= 0.0) {
            return Err(arg_err("tolerances must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CostEvaluation {
    pub value: f64,
    pub witness: PureState,
    pub ext_dim: ExtensionIndex,
    /// Every restart stopped before `max_iters`.
    pub converged: bool,
    /// Total ascent iterations over all restarts.
    pub iterations: usize,
    /// `best − worst` over restart end values.
    pub restart_spread: f64,
    /// Restarts that ended within 1e-6 of the best value.
    pub agreeing_restarts: usize,
}

/// Difference of the two extended channels, precomputed for repeated
/// evaluation on pure inputs.
#[derive(Clone, Debug)]
pub struct CostLandscape {
    dim: usize,
    ext: ExtensionIndex,
    target: Vec<ComplexMatrix>,
    candidate: Vec<ComplexMatrix>,
}

impl CostLandscape {
    pub fn new(target: &KrausChannel, candidate: &KrausChannel, ext: ExtensionIndex) -> Result<Self> {
        if target.dim() != candidate.dim() {
            return Err(dim_err(format!("target dim {} vs candidate dim {}", target.dim(), candidate.dim())));
        }
        let ext = ExtensionIndex::new(ext.get(), target.dim())?;
        Ok(Self {
            dim: target.dim(),
            ext,
            target: target.operators().to_vec(),
            candidate: candidate.operators().to_vec(),
        })
    }

    pub fn ext(&self) -> ExtensionIndex {
        self.ext
    }

    /// Dimension of the pure inputs, `m·d`.
    pub fn input_dim(&self) -> usize {
        self.ext.get() * self.dim
    }

    /// `(ℐ⊗ℰ − ℐ⊗ℱ)(|η⟩⟨η|)` for unit-norm `η`.
    pub fn output_difference(&self, eta: &[C64]) -> ComplexMatrix {
        let n = self.input_dim();
        let d = self.dim;
        let mut diff = ComplexMatrix::zeros(n, n);
        let mut phi = vec![ZERO; n];
        let ops = self.target.iter().map(|k| (1.0, k)).chain(self.candidate.iter().map(|k| (-1.0, k)));
        for (sign, k) in ops {
            for (block, out) in eta.chunks_exact(d).zip(phi.chunks_exact_mut(d)) {
                out.copy_from_slice(&k.mul_vec(block));
            }
            for i in 0..n {
                let a = phi[i] * sign;
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    diff[(i, j)] += a * phi[j].conj();
                }
            }
        }
        diff
    }

    /// Cost of a unit-norm input.
    pub fn eval(&self, eta: &[C64]) -> f64 {
        0.5 * trace_norm(&self.output_difference(eta))
    }

    pub fn cost_at_state(&self, eta: &PureState) -> Result<f64> {
        if eta.dim() != self.input_dim() {
            return Err(dim_err(format!("input state has dim {}, expected {}", eta.dim(), self.input_dim())));
        }
        Ok(self.eval(eta.amplitudes()))
    }

    /// Average cost over `samples` Haar-random pure inputs.
    pub fn mean(&self, samples: usize, seed: u64) -> Result<f64> {
        if samples == 0 {
            return Err(arg_err("mean cost needs at least one sample"));
        }
        let chunks = samples.div_ceil(MEAN_CHUNK);
        let sums: Vec<f64> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = stream_rng(seed, MEAN_STREAM_BASE + c as u64);
                let count = MEAN_CHUNK.min(samples - c * MEAN_CHUNK);
                (0..count).map(|_| self.eval(sample_pure_state(self.input_dim(), &mut rng).amplitudes())).sum()
            })
            .collect();
        Ok(sums.iter().sum::<f64>() / samples as f64)
    }

    /// Multi-start ascent: `cfg.restarts` Haar starts (restart `r` draws from
    /// stream `r` of `cfg.seed`), followed by the given warm starts. Ties keep
    /// the earliest start.
    pub fn worst_case(&self, cfg: &AscentConfig, warm_starts: &[PureState]) -> Result<CostEvaluation> {
        cfg.validate()?;
        let n = self.input_dim();
        if let Some(w) = warm_starts.iter().find(|w| w.dim() != n) {
            return Err(dim_err(format!("warm start has dim {}, expected {n}", w.dim())));
        }
        let total = cfg.restarts + warm_starts.len();
        let runs: Vec<AscentRun> = (0..total)
            .into_par_iter()
            .map(|r| {
                let start = if r < cfg.restarts {
                    sample_pure_state(n, &mut stream_rng(cfg.seed, r as u64))
                } else {
                    warm_starts[r - cfg.restarts].clone()
                };
                self.ascend(start.amplitudes(), cfg)
            })
            .collect();

        let mut best = 0;
        for (i, run) in runs.iter().enumerate() {
            if run.value > runs[best].value {
                best = i;
            }
        }
        let top = runs[best].value;
        let bottom = runs.iter().map(|r| r.value).fold(f64::INFINITY, f64::min);
        Ok(CostEvaluation {
            value: top,
            witness: PureState::normalized(fix_global_phase(runs[best].point.clone()))?,
            ext_dim: self.ext,
            converged: runs.iter().all(|r| r.converged),
            iterations: runs.iter().map(|r| r.iterations).sum(),
            restart_spread: top - bottom,
            agreeing_restarts: runs.iter().filter(|r| r.value >= top - 1e-6).count(),
        })
    }

    /// Projected gradient ascent on the unit sphere with central finite
    /// differences and halving backtracking.
    fn ascend(&self, start: &[C64], cfg: &AscentConfig) -> AscentRun {
        let mut x: Vec<f64> = start.iter().flat_map(|z| [z.re, z.im]).collect();
        normalize(&mut x);
        let mut fx = self.eval_real(&x);
        let mut step = cfg.step;
        let mut stalled = 0;
        let mut iterations = 0;
        let mut converged = false;

        let mut probe = x.clone();
        let mut grad = vec![0.0; x.len()];
        while iterations < cfg.max_iters {
            iterations += 1;
            for k in 0..x.len() {
                probe.copy_from_slice(&x);
                probe[k] = x[k] + cfg.fd_step;
                let up = self.eval_real(&probe);
                probe[k] = x[k] - cfg.fd_step;
                let down = self.eval_real(&probe);
                grad[k] = (up - down) / (2.0 * cfg.fd_step);
            }
            let radial: f64 = grad.iter().zip(&x).map(|(g, v)| g * v).sum();
            grad.iter_mut().zip(&x).for_each(|(g, v)| *g -= radial * v);
            let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            if gnorm < 1e-13 {
                converged = true;
                break;
            }

            let mut s = (2.0 * step).min(cfg.step);
            let accepted = loop {
                let mut trial: Vec<f64> = x.iter().zip(&grad).map(|(v, g)| v + s * g / gnorm).collect();
                normalize(&mut trial);
                let ft = self.eval_real(&trial);
                if ft > fx {
                    break Some((trial, ft));
                }
                s *= 0.5;
                if s < 1e-14 {
                    break None;
                }
            };
            let Some((trial, ft)) = accepted else {
                converged = true;
                break;
            };
            let gain = ft - fx;
            x = trial;
            fx = ft;
            step = s;
            if gain <= cfg.rel_tol * fx.abs() {
                converged = true;
                break;
            }
            stalled = if gain < cfg.stall_tol { stalled + 1 } else { 0 };
            if stalled >= cfg.stall_iters {
                converged = true;
                break;
            }
        }
        AscentRun {
            value: fx,
            point: x.chunks_exact(2).map(|p| C64::new(p[0], p[1])).collect(),
            converged,
            iterations,
        }
    }

    fn eval_real(&self, x: &[f64]) -> f64 {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let eta: Vec<C64> = x.chunks_exact(2).map(|p| C64::new(p[0] / norm, p[1] / norm)).collect();
        self.eval(&eta)
    }
}

struct AscentRun {
    value: f64,
    point: Vec<C64>,
    converged: bool,
    iterations: usize,
}

fn normalize(x: &mut [f64]) {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= n);
}

/// Makes the first amplitude of (near-)maximal modulus real and positive.
fn fix_global_phase(mut v: Vec<C64>) -> Vec<C64> {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(p) = v.iter().find(|z| z.norm() >= max * (1.0 - 1e-9)).copied() {
        if p.norm() > 0.0 {
            let phase = p.conj() / p.norm();
            v.iter_mut().for_each(|z| *z *= phase);
        }
    }
    let n = l2_norm(&v);
    v.iter_mut().for_each(|z| *z /= n);
    v
}

pub fn cost_at_state(
    target: &KrausChannel,
    candidate: &KrausChannel,
    eta: &PureState,
    m: ExtensionIndex,
) -> Result<f64> {
    CostLandscape::new(target, candidate, m)?.cost_at_state(eta)
}

pub fn worst_case_cost(
    target: &KrausChannel,
    candidate: &KrausChannel,
    m: ExtensionIndex,
    cfg: &AscentConfig,
) -> Result<CostEvaluation> {
    CostLandscape::new(target, candidate, m)?.worst_case(cfg, &[])
}

pub fn mean_cost(
    target: &KrausChannel,
    candidate: &KrausChannel,
    m: ExtensionIndex,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    CostLandscape::new(target, candidate, m)?.mean(samples, seed)
}

#[derive(Clone, Debug, Serialize)]
pub struct DiamondEstimate {
    /// Best value over all evaluated extensions; a lower bound on the
    /// diamond distance.
    pub value: f64,
    pub argmax: ExtensionIndex,
    pub per_m: Vec<CostEvaluation>,
}

/// Embeds `η ∈ C^{m'}⊗C^d` into `C^m⊗C^d` (`m ≥ m'`) by padding the
/// extension factor with zeros; the cost is unchanged.
pub fn embed_witness(eta: &PureState, m: usize, d: usize) -> Result<PureState> {
    if !eta.dim().is_multiple_of(d) || eta.dim() > m * d {
        return Err(dim_err(format!("cannot embed dim {} into {m}x{d}", eta.dim())));
    }
    let mut amps = eta.amplitudes().to_vec();
    amps.resize(m * d, ZERO);
    PureState::new(amps)
}

/// Worst-case cost for every `m ∈ {1, …, max_ext}` (default `d`). Each `m`
/// also starts from the previous witnesses embedded into the larger space.
pub fn diamond_distance(
    target: &KrausChannel,
    candidate: &KrausChannel,
    cfg: &AscentConfig,
    max_ext: Option<usize>,
) -> Result<DiamondEstimate> {
    let d = target.dim();
    let top = max_ext.unwrap_or(d);
    ExtensionIndex::new(top, d)?;
    let mut per_m: Vec<CostEvaluation> = Vec::with_capacity(top);
    for m in 1..=top {
        let warm = per_m.iter().map(|e| embed_witness(&e.witness, m, d)).collect::<Result<Vec<_>>>()?;
        let landscape = CostLandscape::new(target, candidate, ExtensionIndex::new(m, d)?)?;
        per_m.push(landscape.worst_case(cfg, &warm)?);
    }
    let mut best = 0;
    for (i, e) in per_m.iter().enumerate() {
        if e.value > per_m[best].value {
            best = i;
        }
    }
    Ok(DiamondEstimate { value: per_m[best].value, argmax: per_m[best].ext_dim, per_m })
}
