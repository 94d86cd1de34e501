//! Dense complex linear algebra for multi-qubit states.
//!
//! Basis ordering: tensor factor 0 is the leftmost (most significant) factor,
//! so for qubits `|q0 q1⟩` the basis index is `2*q0 + q1`. Extension and
//! ancilla factors are always prepended, i.e. states live in `A ⊗ H`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{arg_err, dim_err, Error, Result};
use crate::rng::stream_rng;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Default tolerance for density-matrix validation.
pub const DEFAULT_STATE_TOL: f64 = 1e-9;

const HERMITIAN_INPUT_TOL: f64 = 1e-9;
const PURE_NORM_TOL: f64 = 1e-9;

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<C64>>", into = "Vec<Vec<C64>>")]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(dim_err(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(arg_err("matrix entries must be finite"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &z) in diag.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(dim_err("ragged rows"));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    /// Convenience constructor for real-valued literals.
    pub fn from_real(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    /// `|u⟩⟨v|`
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        let mut data = Vec::with_capacity(u.len() * v.len());
        for a in u {
            for b in v {
                data.push(a * b.conj());
            }
        }
        Self { rows: u.len(), cols: v.len(), data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |A_ij - conj(A_ji)|`; infinite for non-square input.
    pub fn hermiticity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut r: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                r = r.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        r
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(dim_err(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "shape mismatch");
        self.data
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `U A U†`
    pub fn conjugate_by(&self, u: &Self) -> Self {
        &(u * self) * &u.adjoint()
    }

    /// `‖U†U − I‖_max`; infinite for non-square input.
    pub fn unitarity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&self.adjoint() * self).max_abs_diff(&Self::identity(self.rows))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.checked_mul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for row in self.data.chunks(self.cols.max(1)) {
            let cells: Vec<String> =
                row.iter().map(|z| format!("{:+.4}{:+.4}i", z.re, z.im)).collect();
            writeln!(f, "  {}", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

impl TryFrom<Vec<Vec<C64>>> for ComplexMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<C64>>) -> Result<Self> {
        Self::from_rows(rows)
    }
}

impl From<ComplexMatrix> for Vec<Vec<C64>> {
    fn from(m: ComplexMatrix) -> Self {
        m.data.chunks(m.cols.max(1)).map(<[C64]>::to_vec).collect()
    }
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac, br, bc) = (a.rows, a.cols, b.rows, b.cols);
    let mut out = ComplexMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let s = a[(i, j)];
            if s == ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = s * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// Subsystem factorization of a Hilbert space, leftmost factor first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimLayout {
    factors: Vec<usize>,
}

impl DimLayout {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.is_empty() || factors.contains(&0) {
            return Err(arg_err("layout factors must be non-empty and >= 1"));
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn total(&self) -> usize {
        self.factors.iter().product()
    }
}

/// A (not necessarily physical) density operator. Construction only checks
/// shape; use [`validate_density_matrix`] to check Hermiticity, positivity
/// and normalization.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() == 0 {
            return Err(dim_err(format!(
                "density matrix must be square and non-empty, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self { matrix })
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self { matrix: ComplexMatrix::outer(&psi.amplitudes, &psi.amplitudes) }
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        Ok(Self::from_pure(&PureState::basis(dim, index)?))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self { matrix: kron(&self.matrix, &other.matrix) }
    }

    /// Convex combination `a·self + (1−a)·other`.
    pub fn mix(&self, other: &Self, a: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(dim_err("mixing states of different dimension"));
        }
        Self::new(&self.matrix.scale_real(a) + &other.matrix.scale_real(1.0 - a))
    }
}

/// Unit-norm state vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<C64>", into = "Vec<C64>")]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = l2_norm(&amplitudes);
        if amplitudes.is_empty() || (norm - 1.0).abs() > PURE_NORM_TOL {
            return Err(arg_err(format!("pure state must have unit norm, got {norm}")));
        }
        Ok(Self { amplitudes })
    }

    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm = l2_norm(&amplitudes);
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(arg_err("cannot normalize a zero or non-finite vector"));
        }
        amplitudes.iter_mut().for_each(|z| *z /= norm);
        Ok(Self { amplitudes })
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(arg_err(format!("basis index {index} out of range for dim {dim}")));
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self { amplitudes: kron_vec(&self.amplitudes, &other.amplitudes) }
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }

    /// Expectation value `⟨ψ|O|ψ⟩` (real part).
    pub fn expectation(&self, op: &ComplexMatrix) -> f64 {
        let o = op.mul_vec(&self.amplitudes);
        self.amplitudes.iter().zip(&o).map(|(a, b)| a.conj() * b).sum::<C64>().re
    }
}

impl TryFrom<Vec<C64>> for PureState {
    type Error = Error;
    fn try_from(v: Vec<C64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PureState> for Vec<C64> {
    fn from(p: PureState) -> Self {
        p.amplitudes
    }
}

pub(crate) fn l2_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Traces out every factor not listed in `keep`; kept factors stay in their
/// original order.
pub fn partial_trace_matrix(
    m: &ComplexMatrix,
    layout: &DimLayout,
    keep: &[usize],
) -> Result<ComplexMatrix> {
    let factors = layout.factors();
    if !m.is_square() || m.rows() != layout.total() {
        return Err(dim_err(format!(
            "layout {:?} (total {}) does not match {}x{} operator",
            factors,
            layout.total(),
            m.rows(),
            m.cols()
        )));
    }
    if keep.is_empty() {
        return Err(arg_err("keep set must be non-empty"));
    }
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.iter().any(|&k| k >= factors.len()) {
        return Err(dim_err(format!("keep index out of range for {} factors", factors.len())));
    }
    let traced: Vec<usize> = (0..factors.len()).filter(|i| !keep.contains(i)).collect();

    // stride of each factor in the full index
    let mut strides = vec![1usize; factors.len()];
    for i in (0..factors.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * factors[i + 1];
    }
    let offsets = |set: &[usize]| -> Vec<usize> {
        let total: usize = set.iter().map(|&i| factors[i]).product();
        (0..total)
            .map(|mut idx| {
                let mut off = 0;
                for &f in set.iter().rev() {
                    off += (idx % factors[f]) * strides[f];
                    idx /= factors[f];
                }
                off
            })
            .collect()
    };
    let kept_off = offsets(&keep);
    let traced_off = offsets(&traced);

    let k = kept_off.len();
    let mut out = ComplexMatrix::zeros(k, k);
    for (a, &ka) in kept_off.iter().enumerate() {
        for (b, &kb) in kept_off.iter().enumerate() {
            out[(a, b)] = traced_off.iter().map(|&t| m[(ka + t, kb + t)]).sum();
        }
    }
    Ok(out)
}

pub fn partial_trace(rho: &DensityMatrix, layout: &DimLayout, keep: &[usize]) -> Result<DensityMatrix> {
    DensityMatrix::new(partial_trace_matrix(rho.matrix(), layout, keep)?)
}

/// Eigen-decomposition `H = V diag(values) V†`, values non-increasing.
#[derive(Clone, Debug)]
pub struct HermitianSpectrum {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianSpectrum {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d: Vec<C64> = self.values.iter().map(|&x| C64::new(x, 0.0)).collect();
        &(&self.vectors * &ComplexMatrix::from_diag(&d)) * &self.vectors.adjoint()
    }
}

pub fn hermitian_spectrum(h: &ComplexMatrix) -> Result<HermitianSpectrum> {
    check_hermitian_input(h)?;
    let n = h.rows();
    let mut a = h.data().to_vec();
    let mut v = ComplexMatrix::identity(n);
    jacobi_diagonalize(&mut a, n, Some(&mut v));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].re.total_cmp(&a[i * n + i].re));
    let values = order.iter().map(|&i| a[i * n + i].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = v[(row, src)];
        }
    }
    Ok(HermitianSpectrum { values, vectors })
}

/// Eigenvalues only (non-increasing). Skips the Hermiticity check; the
/// strictly-lower triangle is assumed to mirror the upper one.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Vec<f64> {
    let n = h.rows();
    let mut a = h.data().to_vec();
    jacobi_diagonalize(&mut a, n, None);
    let mut vals: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    vals.sort_by(|x, y| y.total_cmp(x));
    vals
}

/// Trace norm `Tr|H|` of a Hermitian matrix.
pub fn trace_norm(h: &ComplexMatrix) -> f64 {
    hermitian_eigenvalues(h).iter().map(|x| x.abs()).sum()
}

fn check_hermitian_input(h: &ComplexMatrix) -> Result<()> {
    if !h.is_square() {
        return Err(dim_err(format!("expected square matrix, got {}x{}", h.rows(), h.cols())));
    }
    let scale = h.frobenius_norm().max(1.0);
    let r = h.hermiticity_residual();
    if r > HERMITIAN_INPUT_TOL * scale {
        return Err(Error::Validation(format!("matrix is not Hermitian (residual {r:e})")));
    }
    Ok(())
}

/// Cyclic complex Jacobi. `a` is row-major `n×n` and ends up diagonal; `v`
/// accumulates the eigenvectors as columns.
fn jacobi_diagonalize(a: &mut [C64], n: usize, mut v: Option<&mut ComplexMatrix>) {
    let total: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    if total == 0.0 {
        return;
    }
    let threshold = total * 1e-32;
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[p * n + q].norm_sqr();
            }
        }
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let r = apq.norm();
                if r <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = apq / r;
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // W = diag(1, conj(phase)) · [[c, s], [-s, c]]
                let w_pp = C64::new(c, 0.0);
                let w_pq = C64::new(s, 0.0);
                let w_qp = phase.conj() * (-s);
                let w_qq = phase.conj() * c;

                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * w_pp + akq * w_qp;
                    a[k * n + q] = akp * w_pq + akq * w_qq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = w_pp.conj() * apk + w_qp.conj() * aqk;
                    a[q * n + k] = w_pq.conj() * apk + w_qq.conj() * aqk;
                }
                a[p * n + q] = ZERO;
                a[q * n + p] = ZERO;
                a[p * n + p] = C64::new(a[p * n + p].re, 0.0);
                a[q * n + q] = C64::new(a[q * n + q].re, 0.0);

                if let Some(v) = v.as_deref_mut() {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * w_pp + vkq * w_qp;
                        v[(k, q)] = vkp * w_pq + vkq * w_qq;
                    }
                }
            }
        }
    }
}

pub fn sample_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> PureState {
    loop {
        let v: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        if let Ok(s) = PureState::normalized(v) {
            return s;
        }
    }
}

/// Haar-random pure state; a pure function of `(dim, seed)`.
pub fn haar_random_pure_state(dim: usize, seed: u64) -> Result<PureState> {
    if dim == 0 {
        return Err(arg_err("dimension must be >= 1"));
    }
    Ok(sample_pure_state(dim, &mut stream_rng(seed, 0)))
}

/// Ginibre matrix orthonormalized column by column. Gram–Schmidt yields an
/// upper-triangular factor with positive real diagonal, which is exactly the
/// phase correction that makes `Q` Haar-distributed.
pub fn sample_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    'retry: loop {
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
        for _ in 0..dim {
            let mut v: Vec<C64> = (0..dim)
                .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            // two passes of modified Gram–Schmidt
            for _ in 0..2 {
                for q in &cols {
                    let proj: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                    v.iter_mut().zip(q).for_each(|(x, y)| *x -= proj * y);
                }
            }
            let norm = l2_norm(&v);
            if norm < 1e-8 {
                continue 'retry;
            }
            v.iter_mut().for_each(|x| *x /= norm);
            cols.push(v);
        }
        let mut u = ComplexMatrix::zeros(dim, dim);
        for (j, c) in cols.iter().enumerate() {
            for (i, z) in c.iter().enumerate() {
                u[(i, j)] = *z;
            }
        }
        return u;
    }
}

/// Haar-random unitary; a pure function of `(dim, seed)`.
pub fn haar_random_unitary(dim: usize, seed: u64) -> Result<ComplexMatrix> {
    if dim == 0 {
        return Err(arg_err("dimension must be >= 1"));
    }
    Ok(sample_unitary(dim, &mut stream_rng(seed, 0)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub hermiticity_residual: f64,
    pub min_eigenvalue: f64,
    pub trace_deviation: f64,
    pub tol: f64,
    pub passed: bool,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (hermiticity {:.3e}, min eigenvalue {:.3e}, trace deviation {:.3e}, tol {:.1e})",
            if self.passed { "ok" } else { "FAILED" },
            self.hermiticity_residual,
            self.min_eigenvalue,
            self.trace_deviation,
            self.tol
        )
    }
}

pub fn validate_density_matrix(rho: &DensityMatrix, tol: f64) -> ValidationReport {
    let m = rho.matrix();
    let hermiticity_residual = m.hermiticity_residual();
    let herm_part = (m + &m.adjoint()).scale_real(0.5);
    let min_eigenvalue = hermitian_eigenvalues(&herm_part).last().copied().unwrap_or(0.0);
    let trace_deviation = (m.trace() - ONE).norm();
    let passed = hermiticity_residual <= tol && min_eigenvalue >= -tol && trace_deviation <= tol;
    ValidationReport { hermiticity_residual, min_eigenvalue, trace_deviation, tol, passed }
}

/// Common single- and two-qubit gates in the crate's basis convention.
pub mod gates {
    use super::{ComplexMatrix, C64, ONE, ZERO};

    pub fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::new(2, 2, vec![ZERO, ONE, ONE, ZERO]).unwrap()
    }

    pub fn pauli_y() -> ComplexMatrix {
        let i = C64::new(0.0, 1.0);
        ComplexMatrix::new(2, 2, vec![ZERO, -i, i, ZERO]).unwrap()
    }

    pub fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_diag(&[ONE, -ONE])
    }

    pub fn hadamard() -> ComplexMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::from_real(&[&[h, h], &[h, -h]]).unwrap()
    }

    pub fn rz(theta: f64) -> ComplexMatrix {
        ComplexMatrix::from_diag(&[C64::from_polar(1.0, -theta / 2.0), C64::from_polar(1.0, theta / 2.0)])
    }

    /// CNOT on two qubits with the given control and target (0 = leftmost).
    pub fn cnot(control: usize, target: usize) -> ComplexMatrix {
        assert!(control < 2 && target < 2 && control != target);
        let mut m = ComplexMatrix::zeros(4, 4);
        for idx in 0..4usize {
            let bits = [(idx >> 1) & 1, idx & 1];
            let mut out = bits;
            if bits[control] == 1 {
                out[target] ^= 1;
            }
            m[(out[0] * 2 + out[1], idx)] = ONE;
        }
        m
    }

    pub fn swap() -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(4, 4);
        for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            m[(i, j)] = ONE;
        }
        m
    }
}
