//! Entropic quantities and capacity optimization.
//!
//! All logarithms are natural; rates and entropies are reported in nats.
//! Matrix logarithms and powers of singular operators act on the support and
//! annihilate the kernel, matching the finite-dimensional reading of the
//! relative entropy.

use crate::channel::{mixture_state, CqChannel, InputDistribution};
use crate::error::{Error, Result};
use crate::hyptest::Test;
use crate::linop::{
    spectral_decompose_auto, trace_norm, DensityOperator, HermitianOperator, TAU_ZERO,
};

/// Relative entropy value: infinity is a tagged variant, never a float
/// leaking through arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RelEntropy {
    Finite(f64),
    Infinite,
}

impl RelEntropy {
    pub fn is_finite(&self) -> bool {
        matches!(self, RelEntropy::Finite(_))
    }

    /// Finite value, or an error when infinite.
    pub fn finite(&self) -> Result<f64> {
        match self {
            RelEntropy::Finite(v) => Ok(*v),
            RelEntropy::Infinite => Err(Error::SupportViolation),
        }
    }

    /// Finite value or +inf as a float, for display.
    pub fn as_f64(&self) -> f64 {
        match self {
            RelEntropy::Finite(v) => *v,
            RelEntropy::Infinite => f64::INFINITY,
        }
    }
}

/// Von Neumann entropy H(rho) = -Tr[rho log rho], in nats.
pub fn von_neumann_entropy(rho: &DensityOperator) -> Result<f64> {
    let decomp = spectral_decompose_auto(rho.operator())?;
    let mut h = 0.0;
    for (a, e) in decomp.eigenvalues.iter().zip(&decomp.projectors) {
        if *a > TAU_ZERO {
            h -= a * a.ln() * e.trace();
        }
    }
    Ok(h.max(0.0))
}

/// Quantum relative entropy D(rho || sigma), with support detection.
pub fn relative_entropy(rho: &DensityOperator, sigma: &DensityOperator) -> Result<RelEntropy> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimMismatch(rho.dim(), sigma.dim()));
    }
    let sig_decomp = spectral_decompose_auto(sigma.operator())?;
    let sigma_supp = sig_decomp.support_projector(TAU_ZERO);
    let escaped = rho.operator().trace_product(&sigma_supp.complement().into_operator())?;
    if escaped > 1e-9 {
        return Ok(RelEntropy::Infinite);
    }
    let log_sigma = sig_decomp.apply_on_support(TAU_ZERO, f64::ln);
    let rho_decomp = spectral_decompose_auto(rho.operator())?;
    let log_rho = rho_decomp.apply_on_support(TAU_ZERO, f64::ln);
    let d = rho.operator().trace_product(&log_rho)? - rho.operator().trace_product(&log_sigma)?;
    Ok(RelEntropy::Finite(d))
}

/// Holevo mutual information I(p), computed in both displayed forms and
/// cross-checked.
pub fn mutual_information(ch: &CqChannel, p: &InputDistribution) -> Result<f64> {
    let sigma = mixture_state(ch, p)?;
    let mut entropy_form = von_neumann_entropy(&sigma)?;
    for (st, &px) in ch.states().iter().zip(p.probs()) {
        if px > 0.0 {
            entropy_form -= px * von_neumann_entropy(st)?;
        }
    }
    let mut divergence_form = 0.0;
    for (st, &px) in ch.states().iter().zip(p.probs()) {
        if px > 0.0 {
            divergence_form += px
                * relative_entropy(st, &sigma)?
                    .finite()
                    .map_err(|_| Error::Numerical("D(rho_x || sigma_p) infinite for p(x) > 0".into()))?;
        }
    }
    if (entropy_form - divergence_form).abs() > 1e-8 {
        return Err(Error::Numerical(format!(
            "mutual information forms disagree: {entropy_form} vs {divergence_form}"
        )));
    }
    Ok(entropy_form.max(0.0))
}

/// Classical relative entropy of the outcome distributions of a POVM.
pub fn measured_relative_entropy(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    povm: &[Test],
) -> Result<RelEntropy> {
    if povm.is_empty() {
        return Err(Error::InvalidPovm("empty POVM".into()));
    }
    let dim = rho.dim();
    let mut sum = HermitianOperator::zeros(dim);
    for m in povm {
        if m.operator().dim() != dim {
            return Err(Error::DimMismatch(m.operator().dim(), dim));
        }
        sum = sum.add(m.operator())?;
    }
    let id = HermitianOperator::identity(dim);
    let residual = sum
        .sub(&id)?
        .matrix()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if residual > 1e-9 {
        return Err(Error::InvalidPovm(format!(
            "elements sum to identity with residual {residual:.3e}"
        )));
    }
    let mut kl = 0.0;
    for m in povm {
        let p_i = rho.operator().trace_product(m.operator())?.max(0.0);
        let q_i = sigma.operator().trace_product(m.operator())?.max(0.0);
        if p_i <= 1e-15 {
            continue; // 0 log 0 = 0
        }
        if q_i <= 1e-15 {
            return Ok(RelEntropy::Infinite);
        }
        kl += p_i * (p_i / q_i).ln();
    }
    Ok(RelEntropy::Finite(kl))
}

/// Exponent function psi(s) = -log Tr[rho sigma^{s/2} rho^{-s} sigma^{s/2}],
/// with pseudo-powers on the supports.
pub fn psi(s: f64, rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimMismatch(rho.dim(), sigma.dim()));
    }
    let sig_decomp = spectral_decompose_auto(sigma.operator())?;
    let sigma_supp = sig_decomp.support_projector(TAU_ZERO);
    let escaped = rho.operator().trace_product(&sigma_supp.complement().into_operator())?;
    if escaped > 1e-9 {
        return Err(Error::SupportViolation);
    }
    let sigma_half_s = sig_decomp.apply_on_support(TAU_ZERO, |a| a.powf(s / 2.0));
    let rho_decomp = spectral_decompose_auto(rho.operator())?;
    let rho_neg_s = rho_decomp.apply_on_support(TAU_ZERO, |a| a.powf(-s));
    let inner = rho.matrix() * sigma_half_s.matrix() * rho_neg_s.matrix() * sigma_half_s.matrix();
    let trace = inner.trace().re;
    if !(trace > 0.0) {
        return Err(Error::Numerical(format!(
            "psi trace argument {trace:.3e} is not positive"
        )));
    }
    Ok(-trace.ln())
}

/// Capacity maximization result with an optimality-gap certificate.
#[derive(Debug, Clone)]
pub struct CapacityResult {
    pub capacity: f64,
    pub optimal_p: InputDistribution,
    pub iterations: usize,
    pub gap_certificate: f64,
}

const CAPACITY_MAX_ITERS: usize = 200_000;

/// Maximizes I(p) by the multiplicative fixed-point iteration
/// p'(x) proportional to p(x) exp(D(rho_x || sigma_p)), certified by the
/// concavity bound C <= max_x D(rho_x || sigma_p).
pub fn capacity(ch: &CqChannel, tol: f64) -> Result<CapacityResult> {
    if !(tol > 0.0) {
        return Err(Error::Numerical(format!("tolerance must be positive, got {tol}")));
    }
    let k = ch.alphabet_size();
    let mut p = vec![1.0 / k as f64; k];
    let mut best_gap = f64::INFINITY;
    for iter in 0..CAPACITY_MAX_ITERS {
        let dist = InputDistribution::new(p.clone())
            .map_err(|e| Error::Numerical(format!("capacity iterate degenerated: {e}")))?;
        let sigma = mixture_state(ch, &dist)?;
        let mut divergences = vec![0.0; k];
        for (x, st) in ch.states().iter().enumerate() {
            divergences[x] = relative_entropy(st, &sigma)?
                .finite()
                .map_err(|_| Error::Numerical("support escaped during capacity iteration".into()))?
                .max(0.0);
        }
        let lower: f64 = p.iter().zip(&divergences).map(|(px, d)| px * d).sum();
        let upper = divergences.iter().cloned().fold(0.0, f64::max);
        let gap = (upper - lower).max(0.0);
        best_gap = best_gap.min(gap);
        if gap <= tol {
            return Ok(CapacityResult {
                capacity: lower.max(0.0),
                optimal_p: dist,
                iterations: iter + 1,
                gap_certificate: gap,
            });
        }
        // multiplicative update, normalized in a numerically safe way
        let dmax = upper;
        let weights: Vec<f64> = p
            .iter()
            .zip(&divergences)
            .map(|(px, d)| px * (d - dmax).exp())
            .collect();
        let total: f64 = weights.iter().sum();
        p = weights.into_iter().map(|w| w / total).collect();
    }
    Err(Error::NonConvergence {
        gap: best_gap,
        iterations: CAPACITY_MAX_ITERS,
    })
}

/// Klein-inequality style equality detector used by property tests:
/// D(rho||sigma) should vanish iff the states coincide in trace norm.
pub fn states_coincide(rho: &DensityOperator, sigma: &DensityOperator) -> Result<bool> {
    let diff = rho.operator().sub(sigma.operator())?;
    Ok(trace_norm(diff.matrix()) < 1e-6)
}
