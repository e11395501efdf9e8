//! Greedy packing of noncommuting measurement operators into a code.
//!
//! Candidates are the symbols whose pinched state passes the threshold test
//! with probability at least 1 - delta - gamma. The greedy loop admits the
//! first candidate whose overlap with the running normalization operator
//! S_{k-1} stays below eta, and installs the normalized decoder element
//! X_k = sqrt(I - S_{k-1}) {rho_bar - c sigma > 0} sqrt(I - S_{k-1}).
//!
//! Every inequality of the underlying lemma (the rate bound, the error
//! bound, the Tr[sigma S_M] sandwich, and the per-codeword success bound)
//! is re-evaluated numerically by [`verify_packing`].

use crate::channel::{Codeword, CqChannel, InputDistribution};
use crate::error::{Error, Result};
use crate::hyptest::{delta_from_blocks, pinched_block_states, threshold_projector, BlockStates, Test};
use crate::linop::{
    matrix_sqrt, spectral_decompose_auto, trace_norm, CMatrix, DensityOperator, HermitianOperator,
};
use crate::Limits;

/// Parameters of one packing run: threshold c, premise slack delta, and the
/// free parameters gamma, eta.
#[derive(Debug, Clone, Copy)]
pub struct PackingParams {
    pub c: f64,
    pub delta: f64,
    pub gamma: f64,
    pub eta: f64,
}

impl PackingParams {
    pub fn new(c: f64, delta: f64, gamma: f64, eta: f64) -> Result<Self> {
        if !(c > 0.0) || !(delta >= 0.0) || !(gamma > 0.0) || !(eta > 0.0 && eta < 1.0) {
            return Err(Error::Numerical(format!(
                "invalid packing parameters c={c} delta={delta} gamma={gamma} eta={eta}"
            )));
        }
        Ok(PackingParams { c, delta, gamma, eta })
    }

    /// Candidate admission threshold 1 - delta - gamma.
    pub fn admission(&self) -> f64 {
        1.0 - self.delta - self.gamma
    }
}

/// Everything the packing loop needs about one extended-alphabet symbol.
pub struct PackingInput {
    /// Codewords in the deterministic scan order (lexicographic).
    pub codewords: Vec<Codeword>,
    /// Pinched states rho_bar_x.
    pub pinched: Vec<HermitianOperator>,
    /// Input probabilities p(x).
    pub probs: Vec<f64>,
    /// Reference state sigma (already the n-fold power in the extension).
    pub sigma: DensityOperator,
}

impl PackingInput {
    pub fn from_blocks(blocks: &BlockStates) -> Self {
        PackingInput {
            codewords: blocks.codewords.clone(),
            pinched: blocks.pinched.clone(),
            probs: blocks.probs.clone(),
            sigma: blocks.sigma_n.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }
}

/// One admission step of the greedy loop.
#[derive(Debug, Clone)]
pub struct AuditRecord {
    pub step: usize,
    /// Index into the PackingInput symbol list.
    pub symbol: usize,
    /// Tr[rho_bar S_{k-1}] at admission.
    pub overlap_before: f64,
    /// Tr[rho_bar X_k].
    pub success_prob: f64,
    /// Largest eigenvalue clamp applied to X_k after construction.
    pub clamp: f64,
}

/// Constructed code: codebook, decoder, normalization operator, audit trail.
#[derive(Debug, Clone)]
pub struct Code {
    pub n: usize,
    pub codebook: Vec<Codeword>,
    /// Indices of the codebook entries in the PackingInput.
    pub chosen: Vec<usize>,
    pub decoder: Vec<HermitianOperator>,
    pub s_m: HermitianOperator,
    pub audit: Vec<AuditRecord>,
    /// Set when the candidate set was empty and the guarantee is vacuous.
    pub empty_warning: bool,
}

impl Code {
    pub fn cardinality(&self) -> usize {
        self.codebook.len()
    }

    pub fn rate(&self) -> f64 {
        if self.codebook.is_empty() {
            0.0
        } else {
            (self.cardinality() as f64).ln() / self.n as f64
        }
    }

    /// Serializes the audit trail as line-oriented records.
    pub fn audit_lines(&self, ch: &CqChannel) -> String {
        let mut out = String::from("step\tcodeword\toverlap_before\tsuccess_prob\tclamp\n");
        for rec in &self.audit {
            out.push_str(&format!(
                "{}\t{}\t{:.12e}\t{:.12e}\t{:.12e}\n",
                rec.step,
                self.codebook[rec.step - 1].display(ch),
                rec.overlap_before,
                rec.success_prob,
                rec.clamp
            ));
        }
        out
    }
}

/// Verified report of one packing run.
#[derive(Debug, Clone)]
pub struct PackingReport {
    pub m: usize,
    pub rate: f64,
    pub pe: f64,
    pub rate_bound_lhs: f64,
    pub rate_bound_rhs: f64,
    pub error_bound: f64,
    pub candidate_fraction: f64,
    /// Tr[sigma S_M], sandwiched between rate_bound_lhs and rate_bound_rhs.
    pub tr_sigma_sm: f64,
    pub sandwich_ok: bool,
    /// min_k Tr[rho_{u_k} X_k], bounded below by 1 - delta - gamma - 2 sqrt(eta).
    pub per_codeword_min: f64,
    pub per_codeword_ok: bool,
    pub rate_bound_ok: bool,
    pub error_bound_ok: bool,
    pub delta: f64,
    pub gamma: f64,
    pub eta: f64,
    pub vacuous: bool,
}

/// The candidate set X' and its probability mass.
pub fn candidate_set(input: &PackingInput, params: &PackingParams) -> Result<(Vec<usize>, f64)> {
    let threshold = params.admission();
    let mut symbols = Vec::new();
    let mut mass = 0.0;
    for (x, pinched) in input.pinched.iter().enumerate() {
        let proj = threshold_projector(pinched, input.sigma.operator(), params.c.ln())?;
        let success = pinched.trace_product(proj.operator())?;
        if success >= threshold {
            symbols.push(x);
            mass += input.probs[x];
        }
    }
    Ok((symbols, mass))
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// The greedy loop. Deterministic: candidates are scanned in input order and
/// the first qualifying symbol is admitted. `order` optionally permutes the
/// scan order (used by the seeded-random robustness mode).
pub fn greedy_pack_ordered(
    input: &PackingInput,
    params: &PackingParams,
    order: Option<&[usize]>,
) -> Result<Code> {
    // a non-positive admission threshold means the guarantee is vacuous
    // (delta + gamma >= 1); return the empty code instead of admitting
    // symbols that pass the test with probability zero
    let candidates = if params.admission() > 0.0 {
        candidate_set(input, params)?.0
    } else {
        Vec::new()
    };
    let scan: Vec<usize> = match order {
        Some(perm) => {
            let set: std::collections::HashSet<usize> = candidates.iter().copied().collect();
            perm.iter().copied().filter(|x| set.contains(x)).collect()
        }
        None => candidates.clone(),
    };
    let dim = input.sigma.dim();
    let n = input.codewords.first().map(|u| u.len()).unwrap_or(1);
    let id = HermitianOperator::identity(dim);

    let mut s = HermitianOperator::zeros(dim);
    let mut chosen: Vec<usize> = Vec::new();
    let mut decoder: Vec<HermitianOperator> = Vec::new();
    let mut audit: Vec<AuditRecord> = Vec::new();

    loop {
        let mut admitted = None;
        for &x in &scan {
            if chosen.contains(&x) {
                continue;
            }
            let overlap = input.pinched[x].trace_product(&s)?;
            if overlap <= params.eta {
                admitted = Some((x, overlap));
                break;
            }
        }
        let Some((x, overlap)) = admitted else { break };

        let root = matrix_sqrt(&id.sub(&s)?)?;
        let proj = threshold_projector(&input.pinched[x], input.sigma.operator(), params.c.ln())?;
        let raw = HermitianOperator::symmetrize(
            root.matrix() * proj.operator().matrix() * root.matrix(),
        );
        // clamp roundoff outside [0,1] and log the magnitude
        let decomp = spectral_decompose_auto(&raw)?;
        let clamp = decomp
            .eigenvalues
            .iter()
            .map(|&a| (a.max(0.0).min(1.0) - a).abs())
            .fold(0.0, f64::max);
        let x_k = decomp.apply(|a| a.clamp(0.0, 1.0));
        let success = input.pinched[x].trace_product(&x_k)?;

        s = s.add(&x_k)?;
        chosen.push(x);
        decoder.push(x_k);
        audit.push(AuditRecord {
            step: chosen.len(),
            symbol: x,
            overlap_before: overlap,
            success_prob: success,
            clamp,
        });
    }

    let code = Code {
        n,
        codebook: chosen.iter().map(|&x| input.codewords[x].clone()).collect(),
        chosen,
        decoder,
        s_m: s,
        audit,
        empty_warning: candidates.is_empty(),
    };
    check_code_invariants(&code, input)?;
    Ok(code)
}

/// Greedy packing with the default (lexicographic) admission order.
pub fn greedy_pack(input: &PackingInput, params: &PackingParams) -> Result<Code> {
    greedy_pack_ordered(input, params, None)
}

/// Re-checks the structural code invariants after the fact (used by the
/// verification tooling to confirm that tampering is detected).
pub fn validate_code(code: &Code, input: &PackingInput) -> Result<()> {
    check_code_invariants(code, input)
}

/// Validates the Code invariants: decoder positivity, sum below identity,
/// S_M consistency, and commutation with sigma.
fn check_code_invariants(code: &Code, input: &PackingInput) -> Result<()> {
    let dim = input.sigma.dim();
    let mut sum = CMatrix::zeros(dim, dim);
    for x_k in &code.decoder {
        let eigs = spectral_decompose_auto(x_k)?;
        if let Some(&min) = eigs.eigenvalues.last() {
            if min < -1e-9 {
                return Err(Error::Numerical(format!(
                    "decoder element has eigenvalue {min:.3e}"
                )));
            }
        }
        sum += x_k.matrix();
        let comm = x_k.matrix() * input.sigma.matrix() - input.sigma.matrix() * x_k.matrix();
        if max_abs(&comm) > 1e-8 {
            return Err(Error::Numerical(format!(
                "decoder element does not commute with sigma: {:.3e}",
                max_abs(&comm)
            )));
        }
    }
    if max_abs(&(&sum - code.s_m.matrix())) > 1e-10 {
        return Err(Error::Numerical("S_M != sum of decoder elements".into()));
    }
    let s_eigs = spectral_decompose_auto(&code.s_m)?;
    for &a in &s_eigs.eigenvalues {
        if a < -1e-9 || a > 1.0 + 1e-9 {
            return Err(Error::Numerical(format!(
                "normalization operator eigenvalue {a} outside [0, 1]"
            )));
        }
    }
    Ok(())
}

/// Average error probability over the codebook, evaluated against the true
/// (unpinched) codeword states, with the pinched/true agreement asserted.
pub fn evaluate_code(true_states: &[DensityOperator], input: &PackingInput, code: &Code) -> Result<f64> {
    if code.codebook.is_empty() {
        return Err(Error::Empty("cannot evaluate an empty code".into()));
    }
    let mut total = 0.0;
    for (k, (&x, x_k)) in code.chosen.iter().zip(&code.decoder).enumerate() {
        let true_succ = true_states[x].operator().trace_product(x_k)?;
        let pinched_succ = input.pinched[x].trace_product(x_k)?;
        if (true_succ - pinched_succ).abs() > 1e-9 {
            return Err(Error::Numerical(format!(
                "codeword {k}: Tr[rho X] = {true_succ} but Tr[rho_bar X] = {pinched_succ}"
            )));
        }
        total += 1.0 - true_succ;
    }
    Ok((total / code.cardinality() as f64).clamp(0.0, 1.0))
}

/// Evaluates every inequality of the packing lemma and its proof for a
/// constructed code.
pub fn verify_packing(
    input: &PackingInput,
    params: &PackingParams,
    code: &Code,
    pe: f64,
) -> Result<PackingReport> {
    let candidate_fraction = if params.admission() > 0.0 {
        candidate_set(input, params)?.1
    } else {
        0.0
    };
    let m = code.cardinality();
    let two_sqrt_eta = 2.0 * params.eta.sqrt();
    let floor = params.admission() - two_sqrt_eta;
    let rate_bound_lhs = (params.gamma / (params.gamma + params.delta)) * params.eta.min(floor);
    let rate_bound_rhs = m as f64 / params.c;
    let error_bound = params.delta + params.gamma + two_sqrt_eta;

    let tr_sigma_sm = input.sigma.operator().trace_product(&code.s_m)?;
    let sandwich_ok = if m == 0 {
        rate_bound_lhs <= 1e-9
    } else {
        rate_bound_lhs <= tr_sigma_sm + 1e-9 && tr_sigma_sm <= rate_bound_rhs + 1e-9
    };

    let mut per_codeword_min = f64::INFINITY;
    for rec in &code.audit {
        per_codeword_min = per_codeword_min.min(rec.success_prob);
    }
    if m == 0 {
        per_codeword_min = f64::NAN;
    }
    let per_codeword_ok = m == 0 || per_codeword_min >= floor - 1e-9;

    Ok(PackingReport {
        m,
        rate: code.rate(),
        pe,
        rate_bound_lhs,
        rate_bound_rhs,
        error_bound,
        candidate_fraction,
        tr_sigma_sm,
        sandwich_ok,
        per_codeword_min,
        per_codeword_ok,
        rate_bound_ok: rate_bound_lhs <= rate_bound_rhs + 1e-9,
        error_bound_ok: pe <= error_bound + 1e-9,
        delta: params.delta,
        gamma: params.gamma,
        eta: params.eta,
        vacuous: code.empty_warning,
    })
}

/// Both sides of the gentle measurement inequality
/// ||rho - sqrt(X) rho sqrt(X)||_1 <= 2 sqrt(Tr[rho (I - X)]).
pub fn gentle_check(rho: &DensityOperator, x: &Test) -> Result<(f64, f64)> {
    if rho.dim() != x.dim() {
        return Err(Error::DimMismatch(rho.dim(), x.dim()));
    }
    let root = matrix_sqrt(x.operator())?;
    let disturbed = root.matrix() * rho.matrix() * root.matrix();
    let lhs = trace_norm(&(rho.matrix() - disturbed));
    let miss = (1.0 - rho.operator().trace_product(x.operator())?).max(0.0);
    let rhs = 2.0 * miss.sqrt();
    Ok((lhs, rhs))
}

/// Chooses the gamma schedule for the block-level driver when the caller
/// does not fix gamma: max(sqrt(delta), 1e-3), clipped so delta + gamma < 1.
pub fn auto_gamma(delta: f64) -> f64 {
    let gamma = delta.sqrt().max(1e-3);
    if delta + gamma >= 1.0 {
        ((1.0 - delta) / 2.0).max(f64::MIN_POSITIVE)
    } else {
        gamma
    }
}

/// Runs the full n-th extension: computes delta_n(a), assembles the
/// parameters (c = e^{na}, eta = e^{-n lambda}), packs greedily over all
/// length-n codewords, and verifies the report.
pub fn build_block_code(
    ch: &CqChannel,
    p: &InputDistribution,
    n: usize,
    a: f64,
    gamma: Option<f64>,
    lambda: f64,
    limits: &Limits,
) -> Result<(Code, PackingReport)> {
    if !(lambda > 0.0) {
        return Err(Error::Numerical(format!("lambda must be positive, got {lambda}")));
    }
    let blocks = pinched_block_states(ch, p, n, limits)?;
    let log_c = n as f64 * a;
    let delta = delta_from_blocks(&blocks, log_c)?;
    let gamma = gamma.unwrap_or_else(|| auto_gamma(delta));
    let eta = (-(n as f64) * lambda).exp();
    let params = PackingParams::new(log_c.exp(), delta, gamma, eta)?;
    let input = PackingInput::from_blocks(&blocks);
    let code = greedy_pack(&input, &params)?;
    let pe = if code.cardinality() == 0 {
        0.0
    } else {
        evaluate_code(&blocks.true_states, &input, &code)?
    };
    let report = verify_packing(&input, &params, &code, pe)?;
    Ok((code, report))
}
