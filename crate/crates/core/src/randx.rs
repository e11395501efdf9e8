//! Seeded random generators for states, channels, and measurements.
//!
//! Everything is driven by an explicit ChaCha RNG so that a fixed seed
//! reproduces the exact same objects across runs and platforms.

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::channel::{CqChannel, InputDistribution};
use crate::hyptest::Test;
use crate::linop::{
    spectral_decompose_auto, CMatrix, C64, DensityOperator, HermitianOperator, Projector,
};

pub type Seed = u64;

pub fn rng_from_seed(seed: Seed) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Ginibre matrix: i.i.d. standard complex Gaussian entries.
pub fn ginibre(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| C64::new(normal(rng), normal(rng)))
}

/// Random Hermitian with entries of order `scale`.
pub fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> HermitianOperator {
    let g = ginibre(rng, dim, dim).scale(scale);
    HermitianOperator::symmetrize(g)
}

/// Full-rank random density operator (normalized Wishart).
pub fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> DensityOperator {
    let g = ginibre(rng, dim, dim);
    let w = &g * g.adjoint();
    let trace = w.trace().re;
    DensityOperator::new(HermitianOperator::symmetrize(w.scale(1.0 / trace)))
        .expect("Wishart normalization yields a valid state")
}

/// Haar-ish random unitary via QR of a Ginibre matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> CMatrix {
    let g = ginibre(rng, dim, dim);
    g.qr().q()
}

/// Random rank-`rank` orthogonal projector.
pub fn random_projector(rng: &mut ChaCha8Rng, dim: usize, rank: usize) -> Projector {
    let u = random_unitary(rng, dim);
    let mut m = CMatrix::zeros(dim, dim);
    for i in 0..rank.min(dim) {
        let col = u.column(i);
        m += col * col.adjoint();
    }
    Projector::new(HermitianOperator::symmetrize(m)).expect("columns of a unitary span a projector")
}

/// Random `k`-outcome POVM: random PSD operators normalized by S^{-1/2}.
pub fn random_povm(rng: &mut ChaCha8Rng, dim: usize, k: usize) -> Vec<Test> {
    let parts: Vec<CMatrix> = (0..k)
        .map(|_| {
            let g = ginibre(rng, dim, dim);
            &g * g.adjoint()
        })
        .collect();
    let mut total = CMatrix::zeros(dim, dim);
    for p in &parts {
        total += p;
    }
    let decomp = spectral_decompose_auto(&HermitianOperator::symmetrize(total))
        .expect("sum of Wisharts is Hermitian");
    let inv_root = decomp.apply_on_support(crate::linop::TAU_ZERO, |a| 1.0 / a.sqrt());
    parts
        .into_iter()
        .map(|p| {
            let m = inv_root.matrix() * p * inv_root.matrix();
            Test::new(HermitianOperator::symmetrize(m)).expect("normalized part is a test")
        })
        .collect()
}

/// Random test 0 <= X <= I with a spread spectrum.
pub fn random_test(rng: &mut ChaCha8Rng, dim: usize) -> Test {
    let u = random_unitary(rng, dim);
    let mut m = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        let col = u.column(i);
        let lam: f64 = rng.random();
        m += (col * col.adjoint()).scale(lam);
    }
    Test::new(HermitianOperator::symmetrize(m)).expect("spectrum drawn inside [0, 1]")
}

/// Random pure state vector.
pub fn random_pure(rng: &mut ChaCha8Rng, dim: usize) -> DensityOperator {
    let v = DVector::from_fn(dim, |_, _| C64::new(normal(rng), normal(rng)));
    DensityOperator::pure(&v).expect("Gaussian vector is nonzero")
}

/// Random channel with `k` symbols of dimension `dim` (full-rank states).
pub fn random_channel(rng: &mut ChaCha8Rng, dim: usize, k: usize) -> CqChannel {
    let alphabet = (0..k).map(|i| format!("x{i}")).collect();
    let states = (0..k).map(|_| random_density(rng, dim)).collect();
    CqChannel::new(alphabet, states).expect("generated states share the dimension")
}

/// Random distribution with all-positive entries.
pub fn random_distribution(rng: &mut ChaCha8Rng, k: usize) -> InputDistribution {
    let raw: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 0.05).collect();
    let total: f64 = raw.iter().sum();
    InputDistribution::new(raw.into_iter().map(|w| w / total).collect())
        .expect("positive weights normalize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn generators_are_deterministic() {
        let a = random_density(&mut rng_from_seed(7), 3);
        let b = random_density(&mut rng_from_seed(7), 3);
        assert_eq!(a.matrix(), b.matrix());
    }

    #[test]
    fn povm_sums_to_identity() {
        let mut rng = rng_from_seed(1);
        let povm = random_povm(&mut rng, 4, 5);
        let mut sum = CMatrix::zeros(4, 4);
        for t in &povm {
            sum += t.operator().matrix();
        }
        let id = CMatrix::identity(4, 4);
        let residual = (&sum - id).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(residual < 1e-9, "residual {residual}");
    }

    #[test]
    fn projector_has_requested_rank() {
        let mut rng = rng_from_seed(3);
        let p = random_projector(&mut rng, 5, 2);
        assert_abs_diff_eq!(p.operator().trace(), 2.0, epsilon = 1e-9);
    }
}
