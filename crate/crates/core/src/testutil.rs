use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{ComplexMatrix, DensityMatrix, C64};
use crate::rng::stream_rng;

/// Full-rank random state from a Ginibre matrix `A A† / Tr(A A†)`.
pub(crate) fn random_density(n: usize, seed: u64) -> DensityMatrix {
    let mut rng = stream_rng(seed, 4242);
    let data = (0..n * n)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let a = ComplexMatrix::new(n, n, data).unwrap();
    let p = &a * &a.adjoint();
    let tr = p.trace().re;
    DensityMatrix::new(p.scale_real(1.0 / tr)).unwrap()
}
