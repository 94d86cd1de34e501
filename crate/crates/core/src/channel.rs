//! Quantum channel representations.
//!
//! * [`KrausChannel`]: `ρ ↦ Σ_α K_α ρ K_α†`.
//! * [`ChoiMatrix`]: `J = Σ_ij |i⟩⟨j| ⊗ ℰ(|i⟩⟨j|)` (input factor first).
//! * [`StinespringChannel`]: `ρ ↦ Tr_A[U (|ν⟩⟨ν| ⊗ ρ) U†]`, ancilla first.
//! * [`ChannelEnsemble`]: convex mixture `Σ_i w_i ℰ_i`.
//!
//! The JSON channel format (see [`Channel`]) stores complex numbers as
//! `[re, im]` pairs written in shortest round-trip decimal form, so a file
//! written by this crate reads back bit-identical.

use std::fmt;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::error::{arg_err, dim_err, Error, Result};
use crate::linalg::{
    hermitian_eigenvalues, hermitian_spectrum, kron, partial_trace_matrix, sample_unitary, ComplexMatrix,
    DensityMatrix, DimLayout, C64, ONE, ZERO,
};
use crate::rng::stream_rng;

/// Operators with `Tr(K†K)` below this are dropped after canonicalization.
pub const KRAUS_PRUNE_TOL: f64 = 1e-12;

const UNITARY_TOL: f64 = 1e-10;
const ENSEMBLE_WEIGHT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    dim: usize,
    operators: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Builds a channel from square operators of a common size. Trace
    /// preservation is not enforced here; see [`KrausChannel::validate_cptp`].
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let first = operators.first().ok_or_else(|| arg_err("a Kraus channel needs at least one operator"))?;
        let dim = first.rows();
        if dim == 0 {
            return Err(dim_err("Kraus operators must be non-empty"));
        }
        for k in &operators {
            if k.rows() != dim || k.cols() != dim {
                return Err(dim_err(format!(
                    "Kraus operators must all be {dim}x{dim}, found {}x{}",
                    k.rows(),
                    k.cols()
                )));
            }
        }
        Ok(Self { dim, operators })
    }

    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim, operators: vec![ComplexMatrix::identity(dim)] }
    }

    /// A random CPTP map with `n_ops` Kraus operators, obtained by slicing a
    /// Haar-random isometry.
    pub fn random(dim: usize, n_ops: usize, seed: u64) -> Result<Self> {
        if dim == 0 || n_ops == 0 {
            return Err(arg_err("dim and n_ops must be >= 1"));
        }
        let u = sample_unitary(dim * n_ops, &mut stream_rng(seed, 1));
        let operators = (0..n_ops)
            .map(|a| {
                let mut k = ComplexMatrix::zeros(dim, dim);
                for o in 0..dim {
                    for i in 0..dim {
                        k[(o, i)] = u[(a * dim + o, i)];
                    }
                }
                k
            })
            .collect();
        Self::new(operators)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim {
            return Err(dim_err(format!("channel acts on dim {}, state has dim {}", self.dim, rho.dim())));
        }
        DensityMatrix::new(self.apply_operator(rho.matrix()))
    }

    /// Linear action on an arbitrary operator of matching size.
    pub fn apply_operator(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.operators {
            out = &out + &m.conjugate_by(k);
        }
        out
    }

    /// `Σ_α K_α†K_α`
    pub fn completeness(&self) -> ComplexMatrix {
        self.operators
            .iter()
            .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, k| &acc + &(&k.adjoint() * k))
    }

    pub fn validate_cptp(&self, tol: f64) -> CptpReport {
        let tp_residual = self.completeness().max_abs_diff(&ComplexMatrix::identity(self.dim));
        let choi_min_eigenvalue = self.choi().min_eigenvalue();
        CptpReport {
            tp_residual,
            choi_min_eigenvalue,
            tol,
            passed: tp_residual <= tol && choi_min_eigenvalue >= -tol,
        }
    }

    pub fn choi(&self) -> ChoiMatrix {
        let d = self.dim;
        let mut j = ComplexMatrix::zeros(d * d, d * d);
        for k in &self.operators {
            let v = vectorize(k);
            for (r, a) in v.iter().enumerate() {
                if *a == ZERO {
                    continue;
                }
                for (c, b) in v.iter().enumerate() {
                    j[(r, c)] += a * b.conj();
                }
            }
        }
        ChoiMatrix { dim: d, matrix: j }
    }

    /// Canonical Kraus set from a Choi matrix: eigenvectors scaled by `√λ`,
    /// `λ > max(tol, KRAUS_PRUNE_TOL)`, in non-increasing `λ` order.
    pub fn from_choi(choi: &ChoiMatrix, tol: f64) -> Result<Self> {
        Self::from_choi_with(choi, tol, tol.max(KRAUS_PRUNE_TOL))
    }

    fn from_choi_with(choi: &ChoiMatrix, negative_tol: f64, cutoff: f64) -> Result<Self> {
        let spec = hermitian_spectrum(&choi.matrix)?;
        let min = spec.values.last().copied().unwrap_or(0.0);
        if min < -negative_tol {
            return Err(Error::NotCompletelyPositive { min_eigenvalue: min });
        }
        let d = choi.dim;
        let mut operators: Vec<ComplexMatrix> = spec
            .values
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > cutoff)
            .map(|(col, &l)| fix_phase(unvectorize(&spec.vectors.column(col), d).scale_real(l.sqrt())))
            .collect();
        if operators.is_empty() {
            operators.push(ComplexMatrix::zeros(d, d));
        }
        Self::new(operators)
    }

    /// Canonical representative: `Tr(K_α†K_β) = λ_α δ_αβ`, `λ` non-increasing,
    /// at most `d²` operators, each with its largest entry made real positive.
    pub fn canonicalize(&self) -> Self {
        Self::from_choi_with(&self.choi(), f64::INFINITY, KRAUS_PRUNE_TOL).expect("Choi matrix of a Kraus map is Hermitian")
    }

    /// `Tr(K_α†K_α)` for each operator.
    pub fn kraus_weights(&self) -> Vec<f64> {
        self.operators.iter().map(|k| k.frobenius_norm().powi(2)).collect()
    }

    /// `max_{α≠β} |Tr(K_α†K_β)|`
    pub fn orthogonality_residual(&self) -> f64 {
        let vs: Vec<Vec<C64>> = self.operators.iter().map(vectorize).collect();
        let mut r: f64 = 0.0;
        for a in 0..vs.len() {
            for b in a + 1..vs.len() {
                let ip: C64 = vs[a].iter().zip(&vs[b]).map(|(x, y)| x.conj() * y).sum();
                r = r.max(ip.norm());
            }
        }
        r
    }

    /// `self` followed by `then`, canonicalized.
    pub fn compose(&self, then: &Self) -> Result<Self> {
        if self.dim != then.dim {
            return Err(dim_err(format!("cannot compose dim {} with dim {}", self.dim, then.dim)));
        }
        let ops = then
            .operators
            .iter()
            .flat_map(|b| self.operators.iter().map(move |a| b * a))
            .collect();
        Ok(Self::new(ops)?.canonicalize())
    }

    /// Unitary gate followed by nothing else; shortcut for conjugation.
    pub fn then_unitary(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.rows() != self.dim || u.cols() != self.dim {
            return Err(dim_err("unitary size does not match channel"));
        }
        Self::new(self.operators.iter().map(|k| u * k).collect())
    }

    /// `ℐ_ext ⊗ ℰ`
    pub fn extend(&self, ext_dim: usize) -> Result<Self> {
        if ext_dim == 0 {
            return Err(arg_err("extension dimension must be >= 1"));
        }
        if ext_dim == 1 {
            return Ok(self.clone());
        }
        let id = ComplexMatrix::identity(ext_dim);
        Self::new(self.operators.iter().map(|k| kron(&id, k)).collect())
    }

    /// `ℰ ⊗ ℱ` on the product space, canonicalized.
    pub fn tensor(&self, other: &Self) -> Self {
        let ops = self
            .operators
            .iter()
            .flat_map(|a| other.operators.iter().map(move |b| kron(a, b)))
            .collect();
        Self::new(ops).expect("non-empty operator sets").canonicalize()
    }

    pub fn to_stinespring(&self) -> Result<StinespringChannel> {
        let report = self.validate_cptp(1e-10);
        if !report.passed {
            return Err(Error::Validation(format!("cannot dilate a non-CPTP map: {report}")));
        }
        let d = self.dim;
        if !d.is_power_of_two() {
            return Err(dim_err(format!("system dimension {d} is not a power of two")));
        }
        let system_qubits = d.trailing_zeros() as usize;
        let n = self.operators.len();
        let ancilla_qubits = n.next_power_of_two().trailing_zeros() as usize;
        let a_dim = 1usize << ancilla_qubits;
        let total = a_dim * d;

        // columns (ancilla = 0, i) hold Σ_α |α⟩ ⊗ K_α|i⟩
        let mut columns: Vec<Option<Vec<C64>>> = vec![None; total];
        let mut basis: Vec<Vec<C64>> = Vec::with_capacity(total);
        for i in 0..d {
            let mut col = vec![ZERO; total];
            for (a, k) in self.operators.iter().enumerate() {
                for o in 0..d {
                    col[a * d + o] = k[(o, i)];
                }
            }
            basis.push(col.clone());
            columns[i] = Some(col);
        }
        // complete with Gram–Schmidt over e_0, e_1, ... in order
        let mut free_slots = d..total;
        for e in 0..total {
            if basis.len() == total {
                break;
            }
            let mut v = vec![ZERO; total];
            v[e] = ONE;
            for _ in 0..2 {
                for q in &basis {
                    let proj: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                    v.iter_mut().zip(q).for_each(|(x, y)| *x -= proj * y);
                }
            }
            let norm = crate::linalg::l2_norm(&v);
            if norm < 1e-6 {
                continue;
            }
            v.iter_mut().for_each(|x| *x /= norm);
            let slot = free_slots.next().expect("slot available while basis incomplete");
            basis.push(v.clone());
            columns[slot] = Some(v);
        }
        let mut u = ComplexMatrix::zeros(total, total);
        for (j, col) in columns.into_iter().enumerate() {
            let col = col.expect("all columns filled");
            for (i, z) in col.into_iter().enumerate() {
                u[(i, j)] = z;
            }
        }
        StinespringChannel::new(system_qubits, ancilla_qubits, u, 0)
    }
}

/// `vec(K)[i·d + o] = K[o, i]`, so that `J = Σ vec(K) vec(K)†`.
fn vectorize(k: &ComplexMatrix) -> Vec<C64> {
    let d = k.rows();
    let mut v = Vec::with_capacity(d * d);
    for i in 0..d {
        for o in 0..d {
            v.push(k[(o, i)]);
        }
    }
    v
}

fn unvectorize(v: &[C64], d: usize) -> ComplexMatrix {
    let mut k = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for o in 0..d {
            k[(o, i)] = v[i * d + o];
        }
    }
    k
}

/// Rotates the global phase so the first entry of (near-)maximal modulus is
/// real and positive.
fn fix_phase(k: ComplexMatrix) -> ComplexMatrix {
    let max = k.data().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return k;
    }
    let pivot = k.data().iter().find(|z| z.norm() >= max * (1.0 - 1e-9)).copied().unwrap();
    k.scale(pivot.conj() / pivot.norm())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CptpReport {
    pub tp_residual: f64,
    pub choi_min_eigenvalue: f64,
    pub tol: f64,
    pub passed: bool,
}

impl fmt::Display for CptpReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (|ΣK†K − I| = {:.3e}, min Choi eigenvalue = {:.3e}, tol {:.1e})",
            if self.passed { "ok" } else { "FAILED" },
            self.tp_residual,
            self.choi_min_eigenvalue,
            self.tol
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix {
    dim: usize,
    matrix: ComplexMatrix,
}

impl ChoiMatrix {
    pub fn new(dim: usize, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != dim * dim || matrix.cols() != dim * dim {
            return Err(dim_err(format!("Choi matrix for dim {dim} must be {0}x{0}", dim * dim)));
        }
        Ok(Self { dim, matrix })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.matrix + &self.matrix.adjoint()).scale_real(0.5);
        hermitian_eigenvalues(&herm).last().copied().unwrap_or(0.0)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.matrix + &self.matrix.adjoint()).scale_real(0.5);
        hermitian_eigenvalues(&herm)
    }

    /// `Tr_out J`, which equals the identity for trace-preserving maps.
    pub fn input_marginal(&self) -> ComplexMatrix {
        let layout = DimLayout::new(vec![self.dim, self.dim]).expect("dim >= 1");
        partial_trace_matrix(&self.matrix, &layout, &[0]).expect("layout matches")
    }

    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        (&self.matrix - &other.matrix).frobenius_norm()
    }
}

/// Unitary dilation on `ancilla ⊗ system` with the ancilla prepared in a
/// computational basis state.
#[derive(Clone, Debug, PartialEq)]
pub struct StinespringChannel {
    system_qubits: usize,
    ancilla_qubits: usize,
    dilation: ComplexMatrix,
    ancilla_init: usize,
}

impl StinespringChannel {
    pub fn new(
        system_qubits: usize,
        ancilla_qubits: usize,
        dilation: ComplexMatrix,
        ancilla_init: usize,
    ) -> Result<Self> {
        let total = 1usize << (system_qubits + ancilla_qubits);
        if dilation.rows() != total || dilation.cols() != total {
            return Err(dim_err(format!(
                "dilation for {system_qubits}+{ancilla_qubits} qubits must be {total}x{total}"
            )));
        }
        let r = dilation.unitarity_residual();
        if r > UNITARY_TOL {
            return Err(Error::Validation(format!("dilation is not unitary (residual {r:e})")));
        }
        if ancilla_init >= 1usize << ancilla_qubits {
            return Err(arg_err(format!("ancilla_init {ancilla_init} out of range")));
        }
        Ok(Self { system_qubits, ancilla_qubits, dilation, ancilla_init })
    }

    pub fn system_qubits(&self) -> usize {
        self.system_qubits
    }

    pub fn ancilla_qubits(&self) -> usize {
        self.ancilla_qubits
    }

    pub fn dilation(&self) -> &ComplexMatrix {
        &self.dilation
    }

    pub fn ancilla_init(&self) -> usize {
        self.ancilla_init
    }

    fn system_dim(&self) -> usize {
        1 << self.system_qubits
    }

    /// `K_α = (⟨α| ⊗ I) U (|ν⟩ ⊗ I)`; null operators are dropped.
    pub fn to_kraus(&self) -> KrausChannel {
        let d = self.system_dim();
        let mut ops: Vec<ComplexMatrix> = (0..1usize << self.ancilla_qubits)
            .map(|a| {
                let mut k = ComplexMatrix::zeros(d, d);
                for o in 0..d {
                    for i in 0..d {
                        k[(o, i)] = self.dilation[(a * d + o, self.ancilla_init * d + i)];
                    }
                }
                k
            })
            .collect();
        let keep: Vec<bool> = ops.iter().map(|k| k.frobenius_norm().powi(2) >= KRAUS_PRUNE_TOL).collect();
        if keep.iter().any(|&b| b) {
            let mut it = keep.into_iter();
            ops.retain(|_| it.next().unwrap());
        } else {
            ops.truncate(1);
        }
        KrausChannel::new(ops).expect("dilation blocks are square")
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let d = self.system_dim();
        if rho.dim() != d {
            return Err(dim_err(format!("channel acts on dim {d}, state has dim {}", rho.dim())));
        }
        let a_dim = 1usize << self.ancilla_qubits;
        let anc = DensityMatrix::basis(a_dim, self.ancilla_init)?;
        let joint = anc.tensor(rho).into_matrix().conjugate_by(&self.dilation);
        let layout = DimLayout::new(vec![a_dim, d])?;
        DensityMatrix::new(partial_trace_matrix(&joint, &layout, &[1])?)
    }
}

/// Convex mixture of channels. Members are full Kraus channels, so a mixture
/// of noisy realizations is representable, not only mixed-unitary channels.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelEnsemble {
    members: Vec<(f64, KrausChannel)>,
}

impl ChannelEnsemble {
    pub fn new(members: Vec<(f64, KrausChannel)>) -> Result<Self> {
        let dim = members.first().ok_or_else(|| arg_err("ensemble needs at least one member"))?.1.dim();
        if members.iter().any(|(w, _)| !w.is_finite() || *w < 0.0) {
            return Err(arg_err("ensemble weights must be finite and non-negative"));
        }
        let total: f64 = members.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > ENSEMBLE_WEIGHT_TOL {
            return Err(arg_err(format!("ensemble weights sum to {total}, expected 1")));
        }
        if members.iter().any(|(_, c)| c.dim() != dim) {
            return Err(dim_err("ensemble members act on different dimensions"));
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[(f64, KrausChannel)] {
        &self.members
    }

    pub fn dim(&self) -> usize {
        self.members[0].1.dim()
    }

    pub fn apply_exact(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim() {
            return Err(dim_err(format!("ensemble acts on dim {}, state has dim {}", self.dim(), rho.dim())));
        }
        let mut out = ComplexMatrix::zeros(rho.dim(), rho.dim());
        for (w, ch) in &self.members {
            if *w > 0.0 {
                out = &out + &ch.apply_operator(rho.matrix()).scale_real(*w);
            }
        }
        DensityMatrix::new(out)
    }

    /// Monte-Carlo estimate: average over `m` i.i.d. member draws.
    pub fn apply_sampled(&self, rho: &DensityMatrix, m: usize, seed: u64) -> Result<DensityMatrix> {
        if m == 0 {
            return Err(arg_err("sample count must be >= 1"));
        }
        if rho.dim() != self.dim() {
            return Err(dim_err(format!("ensemble acts on dim {}, state has dim {}", self.dim(), rho.dim())));
        }
        let dist = WeightedIndex::new(self.members.iter().map(|(w, _)| *w))
            .map_err(|e| arg_err(format!("invalid ensemble weights: {e}")))?;
        let mut rng = stream_rng(seed, 0);
        let mut counts = vec![0usize; self.members.len()];
        for _ in 0..m {
            counts[dist.sample(&mut rng)] += 1;
        }
        let mut out = ComplexMatrix::zeros(rho.dim(), rho.dim());
        for ((_, ch), &c) in self.members.iter().zip(&counts) {
            if c > 0 {
                out = &out + &ch.apply_operator(rho.matrix()).scale_real(c as f64 / m as f64);
            }
        }
        DensityMatrix::new(out)
    }

    /// Single Kraus channel with the same action: `{√w_i K}` canonicalized.
    /// A sole member with unit weight is returned unchanged.
    pub fn to_kraus(&self) -> KrausChannel {
        let live: Vec<&(f64, KrausChannel)> = self.members.iter().filter(|(w, _)| *w > 0.0).collect();
        if let [(w, ch)] = live.as_slice() {
            if *w == 1.0 {
                return ch.clone();
            }
        }
        let ops = live
            .iter()
            .flat_map(|(w, ch)| ch.operators().iter().map(move |k| k.scale_real(w.sqrt())))
            .collect();
        KrausChannel::new(ops).expect("at least one positive weight").canonicalize()
    }
}

/// Any supported representation; the unit of the JSON channel file format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelFile", into = "ChannelFile")]
pub enum Channel {
    Kraus(KrausChannel),
    Stinespring(StinespringChannel),
    Ensemble(ChannelEnsemble),
}

impl Channel {
    pub fn dim(&self) -> usize {
        match self {
            Channel::Kraus(k) => k.dim(),
            Channel::Stinespring(s) => s.system_dim(),
            Channel::Ensemble(e) => e.dim(),
        }
    }

    pub fn to_kraus(&self) -> KrausChannel {
        match self {
            Channel::Kraus(k) => k.clone(),
            Channel::Stinespring(s) => s.to_kraus(),
            Channel::Ensemble(e) => e.to_kraus(),
        }
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        match self {
            Channel::Kraus(k) => k.apply(rho),
            Channel::Stinespring(s) => s.apply(rho),
            Channel::Ensemble(e) => e.apply_exact(rho),
        }
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("channel serialization is infallible")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KrausFile {
    dim: usize,
    operators: Vec<ComplexMatrix>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MemberFile {
    weight: f64,
    channel: KrausFile,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum ChannelFile {
    Kraus(KrausFile),
    Stinespring {
        system_qubits: usize,
        ancilla_qubits: usize,
        #[serde(default)]
        ancilla_init: usize,
        dilation: ComplexMatrix,
    },
    Ensemble {
        members: Vec<MemberFile>,
    },
}

impl KrausFile {
    fn into_channel(self) -> Result<KrausChannel> {
        let ch = KrausChannel::new(self.operators)?;
        if ch.dim() != self.dim {
            return Err(dim_err(format!("declared dim {} but operators are {}x{}", self.dim, ch.dim(), ch.dim())));
        }
        Ok(ch)
    }

    fn from_channel(ch: KrausChannel) -> Self {
        Self { dim: ch.dim, operators: ch.operators }
    }
}

impl TryFrom<ChannelFile> for Channel {
    type Error = Error;
    fn try_from(f: ChannelFile) -> Result<Self> {
        Ok(match f {
            ChannelFile::Kraus(k) => Channel::Kraus(k.into_channel()?),
            ChannelFile::Stinespring { system_qubits, ancilla_qubits, ancilla_init, dilation } => {
                Channel::Stinespring(StinespringChannel::new(system_qubits, ancilla_qubits, dilation, ancilla_init)?)
            }
            ChannelFile::Ensemble { members } => Channel::Ensemble(ChannelEnsemble::new(
                members
                    .into_iter()
                    .map(|m| Ok((m.weight, m.channel.into_channel()?)))
                    .collect::<Result<_>>()?,
            )?),
        })
    }
}

impl From<Channel> for ChannelFile {
    fn from(c: Channel) -> Self {
        match c {
            Channel::Kraus(k) => ChannelFile::Kraus(KrausFile::from_channel(k)),
            Channel::Stinespring(s) => ChannelFile::Stinespring {
                system_qubits: s.system_qubits,
                ancilla_qubits: s.ancilla_qubits,
                ancilla_init: s.ancilla_init,
                dilation: s.dilation,
            },
            Channel::Ensemble(e) => ChannelFile::Ensemble {
                members: e
                    .members
                    .into_iter()
                    .map(|(weight, ch)| MemberFile { weight, channel: KrausFile::from_channel(ch) })
                    .collect(),
            },
        }
    }
}
