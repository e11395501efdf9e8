//! Pinched hypothesis tests between tensor-power hypotheses.
//!
//! The test for threshold rate `a` is the projector onto the positive part
//! of `pinch(sigma^n, rho^n) - e^{na} sigma^n`. Because the pinched state
//! commutes with `sigma^n`, the second-kind error is bounded by `e^{-na}`
//! by construction, and the first-kind error admits the exponent bound in
//! terms of the function psi(s).

use crate::channel::{
    codeword_state, mixture_state, product_distribution, Codeword, CqChannel, InputDistribution,
};
use crate::error::{Error, Result};
use crate::info::psi;
use crate::linop::{
    kron_power_herm, pinch_with, spectral_decompose_auto, support_projector, DensityOperator,
    HermitianOperator, Projector,
};
use crate::Limits;

/// Threshold above which e^{na} overflows f64 and the test degenerates to
/// the positive part of the pinched state restricted to sigma's kernel.
const LOG_OVERFLOW: f64 = 700.0;

/// Two-outcome measurement operator with 0 <= A <= I.
#[derive(Debug, Clone)]
pub struct Test {
    op: HermitianOperator,
}

impl Test {
    /// Validates the operator inequalities within 1e-9.
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let decomp = spectral_decompose_auto(&op)?;
        for &a in &decomp.eigenvalues {
            if a < -1e-9 || a > 1.0 + 1e-9 {
                return Err(Error::InvalidTest(format!("eigenvalue {a}")));
            }
        }
        Ok(Test { op })
    }

    pub fn from_projector(p: Projector) -> Self {
        Test {
            op: p.into_operator(),
        }
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }
}

/// Positive-part projector of `pinched - c * sigma_ref` with c = e^{log_c},
/// computed without materializing e^{log_c} when it would overflow.
pub(crate) fn threshold_projector(
    pinched: &HermitianOperator,
    sigma_ref: &HermitianOperator,
    log_c: f64,
) -> Result<Projector> {
    if log_c <= LOG_OVERFLOW {
        let shifted = pinched.sub(&sigma_ref.scale(log_c.exp()))?;
        Ok(spectral_decompose_auto(&shifted)?.positive_projector(crate::linop::TAU_ZERO))
    } else {
        // c is astronomically large: positive part survives only on the
        // kernel of sigma_ref
        let kernel = support_projector(sigma_ref)?.complement();
        let restricted = HermitianOperator::symmetrize(
            kernel.operator().matrix() * pinched.matrix() * kernel.operator().matrix(),
        );
        Ok(spectral_decompose_auto(&restricted)?.positive_projector(crate::linop::TAU_ZERO))
    }
}

/// The pinched test {pinch(sigma^n, rho^n) - e^{na} sigma^n > 0}.
pub fn pinched_test(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    n: usize,
    a: f64,
    limits: &Limits,
) -> Result<Test> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimMismatch(rho.dim(), sigma.dim()));
    }
    let sigma_n = kron_power_herm(sigma.operator(), n, limits.max_dim)?;
    let rho_n = kron_power_herm(rho.operator(), n, limits.max_dim)?;
    let sig_decomp = spectral_decompose_auto(&sigma_n)?;
    let pinched = pinch_with(&sig_decomp, &rho_n);
    let proj = threshold_projector(&pinched, &sigma_n, n as f64 * a)?;
    Ok(Test::from_projector(proj))
}

/// First-kind error alpha = Tr[rho_n (I - T)].
pub fn alpha(rho_n: &DensityOperator, test: &Test) -> Result<f64> {
    let accept = rho_n.operator().trace_product(test.operator())?;
    Ok((1.0 - accept).clamp(0.0, 1.0))
}

/// Second-kind error beta = Tr[sigma_n T].
pub fn beta(sigma_n: &DensityOperator, test: &Test) -> Result<f64> {
    Ok(sigma_n
        .operator()
        .trace_product(test.operator())?
        .clamp(0.0, 1.0))
}

/// The two error-exponent bounds for the pinched test: pure formula
/// evaluation, no optimization over s.
///
/// Returns `(alpha_bound, beta_bound)` with
/// `alpha_bound = (n+1)^{s dim_h} e^{n(a s - psi(s))}` and
/// `beta_bound = e^{-na}`.
pub fn error_exponent_bounds(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    n: usize,
    a: f64,
    s: f64,
    dim_h: usize,
) -> Result<(f64, f64)> {
    let psi_s = psi(s, rho, sigma)?;
    let log_alpha = s * dim_h as f64 * ((n + 1) as f64).ln() + n as f64 * (a * s - psi_s);
    let alpha_bound = log_alpha.min(LOG_OVERFLOW).exp();
    let beta_bound = (-(n as f64) * a).min(LOG_OVERFLOW).exp();
    Ok((alpha_bound, beta_bound))
}

/// Per-row outcome of a hypothesis-testing sweep.
#[derive(Debug, Clone)]
pub struct TestReport {
    pub n: usize,
    pub a: f64,
    pub alpha: f64,
    pub beta: f64,
    pub alpha_bound: f64,
    pub beta_bound: f64,
    pub s_used: f64,
}

/// Runs the pinched test at (n, a) and reports errors plus the tightest
/// bounds over a uniform s-grid of `s_points` points in [0, 1].
pub fn test_report(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    n: usize,
    a: f64,
    s_points: usize,
    limits: &Limits,
) -> Result<TestReport> {
    if s_points < 2 {
        return Err(Error::Empty("s grid needs at least 2 points".into()));
    }
    let test = pinched_test(rho, sigma, n, a, limits)?;
    let rho_n = DensityOperator::new(kron_power_herm(rho.operator(), n, limits.max_dim)?)?;
    let sigma_n = DensityOperator::new(kron_power_herm(sigma.operator(), n, limits.max_dim)?)?;
    let alpha_val = alpha(&rho_n, &test)?;
    let beta_val = beta(&sigma_n, &test)?;
    let mut best_s = 0.0;
    let mut best_alpha_bound = f64::INFINITY;
    let mut beta_bound = 1.0;
    for i in 0..s_points {
        let s = i as f64 / (s_points - 1) as f64;
        let (ab, bb) = error_exponent_bounds(rho, sigma, n, a, s, rho.dim())?;
        beta_bound = bb;
        if ab < best_alpha_bound {
            best_alpha_bound = ab;
            best_s = s;
        }
    }
    Ok(TestReport {
        n,
        a,
        alpha: alpha_val,
        beta: beta_val,
        alpha_bound: best_alpha_bound,
        beta_bound,
        s_used: best_s,
    })
}

/// All length-n codeword data needed by the blockwise test machinery:
/// codewords in lexicographic order, their product probabilities, the true
/// tensor states, the pinched states, and the reference sigma^n.
pub struct BlockStates {
    pub codewords: Vec<Codeword>,
    pub probs: Vec<f64>,
    pub true_states: Vec<DensityOperator>,
    pub pinched: Vec<HermitianOperator>,
    pub sigma_n: DensityOperator,
}

/// Materializes the per-codeword pinched states rho-bar = pinch(sigma^n, rho_{x^n}).
pub fn pinched_block_states(
    ch: &CqChannel,
    p: &InputDistribution,
    n: usize,
    limits: &Limits,
) -> Result<BlockStates> {
    let sigma = mixture_state(ch, p)?;
    let sigma_n_op = kron_power_herm(sigma.operator(), n, limits.max_dim)?;
    let sig_decomp = spectral_decompose_auto(&sigma_n_op)?;
    let mut codewords = Vec::new();
    let mut probs = Vec::new();
    let mut true_states = Vec::new();
    let mut pinched = Vec::new();
    for (u, prob) in product_distribution(p, n, limits.max_enum)? {
        let state = codeword_state(ch, &u, limits.max_dim)?;
        pinched.push(pinch_with(&sig_decomp, state.operator()));
        true_states.push(state);
        codewords.push(u);
        probs.push(prob);
    }
    Ok(BlockStates {
        codewords,
        probs,
        true_states,
        pinched,
        sigma_n: DensityOperator::new(sigma_n_op)?,
    })
}

/// The block of the lifted test for codeword u:
/// {pinch(sigma^n, rho_{x^n}) - e^{na} sigma^n > 0}.
pub fn per_codeword_test(
    ch: &CqChannel,
    p: &InputDistribution,
    u: &Codeword,
    a: f64,
    limits: &Limits,
) -> Result<Test> {
    let n = u.len();
    let sigma = mixture_state(ch, p)?;
    let sigma_n = kron_power_herm(sigma.operator(), n, limits.max_dim)?;
    let sig_decomp = spectral_decompose_auto(&sigma_n)?;
    let state = codeword_state(ch, u, limits.max_dim)?;
    let pinched = pinch_with(&sig_decomp, state.operator());
    let proj = threshold_projector(&pinched, &sigma_n, n as f64 * a)?;
    Ok(Test::from_projector(proj))
}

/// delta_n(a): the averaged first-kind error of the lifted test, computed
/// blockwise over all codewords.
pub fn delta_n(
    ch: &CqChannel,
    p: &InputDistribution,
    n: usize,
    a: f64,
    limits: &Limits,
) -> Result<f64> {
    let blocks = pinched_block_states(ch, p, n, limits)?;
    delta_from_blocks(&blocks, n as f64 * a)
}

/// delta computed from precomputed block states; `log_c` = n a.
pub fn delta_from_blocks(blocks: &BlockStates, log_c: f64) -> Result<f64> {
    let mut delta = 0.0;
    for (pinched, &prob) in blocks.pinched.iter().zip(&blocks.probs) {
        if prob == 0.0 {
            continue;
        }
        let proj = threshold_projector(pinched, blocks.sigma_n.operator(), log_c)?;
        let accept = pinched.trace_product(proj.operator())?;
        delta += prob * (1.0 - accept).clamp(0.0, 1.0);
    }
    Ok(delta.clamp(0.0, 1.0))
}
