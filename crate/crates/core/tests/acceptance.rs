//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Every numeric target is checked against an oracle computed independently
//! inside the test (closed forms, exhaustive classical enumeration, grid
//! search), never against the library's own output.

use cqlab::channel::{product_distribution, CqChannel, InputDistribution};
use cqlab::hyptest::{alpha, beta, delta_n, error_exponent_bounds, pinched_block_states, pinched_test};
use cqlab::info::{capacity, mutual_information, relative_entropy, RelEntropy};
use cqlab::linop::{
    kron_power, kron_power_herm, pinch, pinch_with, spectral_decompose_auto, CMatrix, C64,
    DensityOperator, HermitianOperator,
};
use cqlab::packing::{auto_gamma, build_block_code, gentle_check};
use cqlab::randx::{
    random_channel, random_density, random_distribution, random_povm, random_test, rng_from_seed,
};
use cqlab::verify::{all_passed, render_report, run_suite, VerifyConfig};
use cqlab::Limits;

fn limits() -> Limits {
    Limits::default()
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

struct Criterion {
    number: usize,
    name: &'static str,
}

impl Criterion {
    fn check(self, pass: bool, detail: String) {
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("{tag}  criterion {:2}: {} — {detail}", self.number, self.name);
        assert!(pass, "criterion {} failed: {detail}", self.number);
    }
}

fn zero_plus() -> CqChannel {
    let zero = DensityOperator::from_probs(&[1.0, 0.0]).unwrap();
    let plus = DensityOperator::from_matrix(CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(0.5, 0.0),
            C64::new(0.5, 0.0),
            C64::new(0.5, 0.0),
            C64::new(0.5, 0.0),
        ],
    ))
    .unwrap();
    CqChannel::new(vec!["0".into(), "+".into()], vec![zero, plus]).unwrap()
}

#[test]
fn criterion_01_mutual_information_identity() {
    let mut rng = rng_from_seed(1001);
    let mut worst = 0.0f64;
    for trial in 0..200 {
        let dim = 2 + trial % 2;
        let k = 2 + trial % 3;
        let ch = random_channel(&mut rng, dim, k);
        let p = random_distribution(&mut rng, k);
        let pair = cqlab::channel::lift(&ch, &p).unwrap();
        let d = relative_entropy(&pair.dense_rho().unwrap(), &pair.dense_sigma().unwrap())
            .unwrap()
            .finite()
            .unwrap();
        let i = mutual_information(&ch, &p).unwrap();
        worst = worst.max((d - i).abs());
    }
    Criterion {
        number: 1,
        name: "mutual-information identity D(rho_hat||sigma_hat) = I(p)",
    }
    .check(worst < 1e-9, format!("200 channels, worst |D - I| = {worst:.3e}"));
}

/// Isometry embedding block x^n of the grouped layout into the
/// letter-interleaved lifted tensor power.
fn lifted_embedding(symbols: &[usize], k: usize, d: usize) -> CMatrix {
    let mut out = CMatrix::identity(1, 1);
    for &x in symbols {
        let mut basis = CMatrix::zeros(k, 1);
        basis[(x, 0)] = C64::new(1.0, 0.0);
        out = out.kronecker(&basis.kronecker(&CMatrix::identity(d, d)));
    }
    out
}

#[test]
fn criterion_02_extended_pinching_factorization() {
    let mut rng = rng_from_seed(1002);
    let lim = limits();
    let mut worst_dense = 0.0f64;
    let mut worst_block = 0.0f64;
    for _ in 0..5 {
        let ch = random_channel(&mut rng, 2, 2);
        let p = random_distribution(&mut rng, 2);
        let pair = cqlab::channel::lift(&ch, &p).unwrap();
        let rho_hat = pair.dense_rho().unwrap();
        let sigma_hat = pair.dense_sigma().unwrap();
        // dense factorization check, n <= 2
        for n in 1..=2usize {
            let rho_hat_n = kron_power(rho_hat.matrix(), n, lim.max_dim).unwrap();
            let sigma_hat_n = kron_power(sigma_hat.matrix(), n, lim.max_dim).unwrap();
            let whole = pinch(
                &HermitianOperator::new(sigma_hat_n).unwrap(),
                &HermitianOperator::new(rho_hat_n).unwrap(),
            )
            .unwrap();
            let blocks = pinched_block_states(&ch, &p, n, &lim).unwrap();
            let big = 4usize.pow(n as u32);
            let mut expected = CMatrix::zeros(big, big);
            for ((u, h), &prob) in blocks
                .codewords
                .iter()
                .zip(&blocks.pinched)
                .zip(&blocks.probs)
            {
                let iso = lifted_embedding(u.symbols(), 2, 2);
                expected += &iso * h.matrix().scale(prob) * iso.adjoint();
            }
            worst_dense = worst_dense.max(max_abs(&(whole.matrix() - expected)));
        }
        // blockwise pinching properties, n <= 4: each block commutes with
        // sigma^n, preserves the codeword-state trace, and is idempotent
        // under a second pinching
        for n in 3..=4usize {
            let blocks = pinched_block_states(&ch, &p, n, &lim).unwrap();
            let sigma_n = blocks.sigma_n.clone();
            let decomp = spectral_decompose_auto(sigma_n.operator()).unwrap();
            for (h, t) in blocks.pinched.iter().zip(&blocks.true_states) {
                let comm = h.matrix() * sigma_n.matrix() - sigma_n.matrix() * h.matrix();
                worst_block = worst_block.max(max_abs(&comm));
                worst_block = worst_block.max((h.trace() - t.operator().trace()).abs());
                let again = pinch_with(&decomp, h);
                worst_block = worst_block.max(max_abs(&(again.matrix() - h.matrix())));
            }
        }
    }
    Criterion {
        number: 2,
        name: "extended pinching factorization",
    }
    .check(
        worst_dense < 1e-9 && worst_block < 1e-9,
        format!("dense residual {worst_dense:.3e}, blockwise residual {worst_block:.3e}"),
    );
}

#[test]
fn criterion_03_error_exponent_bounds() {
    let mut rng = rng_from_seed(1003);
    let lim = limits();
    let mut worst_alpha = f64::NEG_INFINITY;
    let mut worst_beta = f64::NEG_INFINITY;
    let mut rows = 0usize;
    for _ in 0..20 {
        let rho = random_density(&mut rng, 2);
        let sigma = random_density(&mut rng, 2);
        let d = relative_entropy(&rho, &sigma).unwrap().finite().unwrap();
        for n in 1..=6usize {
            let rho_n =
                DensityOperator::new(kron_power_herm(rho.operator(), n, lim.max_dim).unwrap())
                    .unwrap();
            let sigma_n =
                DensityOperator::new(kron_power_herm(sigma.operator(), n, lim.max_dim).unwrap())
                    .unwrap();
            for ai in 1..=9 {
                let a = d * ai as f64 / 10.0;
                let test = pinched_test(&rho, &sigma, n, a, &lim).unwrap();
                let av = alpha(&rho_n, &test).unwrap();
                let bv = beta(&sigma_n, &test).unwrap();
                let mut best = f64::INFINITY;
                for si in 0..=10 {
                    let s = si as f64 / 10.0;
                    let (ab, _) = error_exponent_bounds(&rho, &sigma, n, a, s, 2).unwrap();
                    best = best.min(ab);
                }
                worst_alpha = worst_alpha.max(av - best);
                worst_beta = worst_beta.max(bv - (-(n as f64) * a).exp());
                rows += 1;
            }
        }
    }
    Criterion {
        number: 3,
        name: "first/second-kind error bounds for the pinched test",
    }
    .check(
        worst_alpha <= 1e-12 && worst_beta <= 1e-12,
        format!("{rows} rows, worst alpha slack {worst_alpha:.3e}, worst beta slack {worst_beta:.3e}"),
    );
}

/// Diagonal-arithmetic replica of the greedy block-code construction, used
/// as the classical oracle. `w[x][y]` is the channel matrix.
fn classical_greedy_oracle(
    w: &[[f64; 2]; 2],
    p: &[f64; 2],
    n: usize,
    a: f64,
    lambda: f64,
) -> (usize, f64) {
    let words = 2usize.pow(n as u32);
    let q: Vec<f64> = (0..words)
        .map(|yw| {
            (0..n)
                .map(|i| {
                    let y = (yw >> (n - 1 - i)) & 1;
                    p[0] * w[0][y] + p[1] * w[1][y]
                })
                .product()
        })
        .collect();
    let rows: Vec<(f64, Vec<f64>)> = (0..words)
        .map(|xw| {
            let xs: Vec<usize> = (0..n).map(|i| (xw >> (n - 1 - i)) & 1).collect();
            let px: f64 = xs.iter().map(|&x| p[x]).product();
            let wx: Vec<f64> = (0..words)
                .map(|yw| {
                    xs.iter()
                        .enumerate()
                        .map(|(i, &x)| w[x][(yw >> (n - 1 - i)) & 1])
                        .product()
                })
                .collect();
            (px, wx)
        })
        .collect();
    let c = (n as f64 * a).exp();
    let delta: f64 = rows
        .iter()
        .map(|(px, wx)| {
            px * wx
                .iter()
                .zip(&q)
                .filter(|(wv, qv)| **wv - c * **qv <= 0.0)
                .map(|(wv, _)| *wv)
                .sum::<f64>()
        })
        .sum();
    let gamma = auto_gamma(delta);
    let eta = (-(n as f64) * lambda).exp();
    let admission = 1.0 - delta - gamma;
    if admission <= 0.0 {
        return (0, 0.0);
    }
    let candidates: Vec<usize> = (0..words)
        .filter(|&xw| {
            let (_, wx) = &rows[xw];
            wx.iter()
                .zip(&q)
                .filter(|(wv, qv)| **wv - c * **qv > 0.0)
                .map(|(wv, _)| *wv)
                .sum::<f64>()
                >= admission
        })
        .collect();
    let mut s = vec![0.0f64; words];
    let mut chosen: Vec<usize> = Vec::new();
    let mut successes: Vec<f64> = Vec::new();
    loop {
        let mut admitted = None;
        for &x in &candidates {
            if chosen.contains(&x) {
                continue;
            }
            let overlap: f64 = rows[x].1.iter().zip(&s).map(|(wv, sv)| wv * sv).sum();
            if overlap <= eta {
                admitted = Some(x);
                break;
            }
        }
        let Some(x) = admitted else { break };
        let xk: Vec<f64> = rows[x]
            .1
            .iter()
            .zip(&q)
            .zip(&s)
            .map(|((wv, qv), sv)| if wv - c * qv > 0.0 { 1.0 - sv } else { 0.0 })
            .collect();
        successes.push(rows[x].1.iter().zip(&xk).map(|(wv, xv)| wv * xv).sum());
        for (sv, xv) in s.iter_mut().zip(&xk) {
            *sv += xv;
        }
        chosen.push(x);
    }
    if chosen.is_empty() {
        return (0, 0.0);
    }
    let pe = successes.iter().map(|succ| 1.0 - succ).sum::<f64>() / chosen.len() as f64;
    (chosen.len(), pe.clamp(0.0, 1.0))
}

#[test]
fn criterion_04_classical_reduction() {
    let lim = limits();
    let w = [[0.82, 0.18], [0.27, 0.73]];
    let p = [0.45, 0.55];
    let ch = CqChannel::new(
        vec!["0".into(), "1".into()],
        vec![
            DensityOperator::from_probs(&w[0]).unwrap(),
            DensityOperator::from_probs(&w[1]).unwrap(),
        ],
    )
    .unwrap();
    let dist = InputDistribution::new(p.to_vec()).unwrap();

    let mut worst = 0.0f64;
    // delta_n against the information-spectrum oracle
    for n in 1..=6usize {
        for a in [0.05, 0.2] {
            let mut oracle = 0.0;
            for (u, pu) in product_distribution(&dist, n, lim.max_enum).unwrap() {
                for yw in 0..(2usize.pow(n as u32)) {
                    let wy: f64 = u
                        .symbols()
                        .iter()
                        .enumerate()
                        .map(|(i, &x)| w[x][(yw >> (n - 1 - i)) & 1])
                        .product();
                    let qy: f64 = (0..n)
                        .map(|i| {
                            let y = (yw >> (n - 1 - i)) & 1;
                            p[0] * w[0][y] + p[1] * w[1][y]
                        })
                        .product();
                    if wy > 0.0 && (wy / qy).ln() / n as f64 <= a {
                        oracle += pu * wy;
                    }
                }
            }
            let got = delta_n(&ch, &dist, n, a, &lim).unwrap();
            worst = worst.max((got - oracle).abs());
        }
    }
    // alpha/beta of the pinched test against the likelihood-ratio oracle
    let rho = DensityOperator::from_probs(&[0.88, 0.12]).unwrap();
    let sigma = DensityOperator::from_probs(&[0.55, 0.45]).unwrap();
    for n in 1..=6usize {
        for a in [0.03, 0.15] {
            let c = (n as f64 * a).exp();
            let mut alpha_oracle = 0.0;
            let mut beta_oracle = 0.0;
            for yw in 0..(2usize.pow(n as u32)) {
                let r: f64 = (0..n)
                    .map(|i| if (yw >> i) & 1 == 0 { 0.88 } else { 0.12 })
                    .product();
            let s: f64 = (0..n)
                    .map(|i| if (yw >> i) & 1 == 0 { 0.55 } else { 0.45 })
                    .product();
                if r - c * s > 0.0 {
                    beta_oracle += s;
                } else {
                    alpha_oracle += r;
                }
            }
            let test = pinched_test(&rho, &sigma, n, a, &lim).unwrap();
            let rho_n =
                DensityOperator::new(kron_power_herm(rho.operator(), n, lim.max_dim).unwrap())
                    .unwrap();
            let sigma_n =
                DensityOperator::new(kron_power_herm(sigma.operator(), n, lim.max_dim).unwrap())
                    .unwrap();
            worst = worst.max((alpha(&rho_n, &test).unwrap() - alpha_oracle).abs());
            worst = worst.max((beta(&sigma_n, &test).unwrap() - beta_oracle).abs());
        }
    }
    // full code construction against the diagonal greedy replica
    for n in 1..=6usize {
        let a = 0.12;
        let (m_oracle, pe_oracle) = classical_greedy_oracle(&w, &p, n, a, 1.0);
        let (code, report) = build_block_code(&ch, &dist, n, a, None, 1.0, &lim).unwrap();
        assert_eq!(code.cardinality(), m_oracle, "code size mismatch at n = {n}");
        worst = worst.max((report.pe - pe_oracle).abs());
    }
    Criterion {
        number: 4,
        name: "classical reduction (delta_n, alpha, beta, Pe vs exhaustive oracle)",
    }
    .check(worst < 1e-12, format!("worst deviation {worst:.3e}"));
}

#[test]
fn criterion_05_packing_bounds() {
    let mut rng = rng_from_seed(1005);
    let lim = limits();
    let mut violations = 0usize;
    let mut built = 0usize;
    let trials = 100;
    for trial in 0..trials {
        let dim = 2 + trial % 2;
        let k = 2 + trial % 2;
        let ch = random_channel(&mut rng, dim, k);
        let p = random_distribution(&mut rng, k);
        let i_p = mutual_information(&ch, &p).unwrap();
        let frac = 0.2 + 0.06 * (trial % 10) as f64;
        let n = 1 + trial % 2;
        let (code, report) =
            build_block_code(&ch, &p, n, frac * i_p, None, 1.0, &lim).unwrap();
        let slack = 1e-9;
        let ok = report.rate_bound_lhs <= report.rate_bound_rhs + slack
            && report.pe <= report.error_bound + slack
            && report.sandwich_ok
            && report.per_codeword_ok;
        if !ok {
            violations += 1;
        }
        if code.cardinality() > 0 {
            built += 1;
        }
    }
    Criterion {
        number: 5,
        name: "packing lemma bounds (rate, error, sandwich, per-codeword)",
    }
    .check(
        violations == 0 && built > 0,
        format!("{trials} instances, {violations} violations, {built} nonempty codes"),
    );
}

#[test]
fn criterion_06_delta_shrinks_with_blocklength() {
    let lim = limits();
    let ch = zero_plus();
    let p = InputDistribution::uniform(2);
    let i_p = mutual_information(&ch, &p).unwrap();
    let a = 0.5 * i_p;
    assert!(
        (a - 0.2082477653).abs() < 1e-9,
        "a = {a} deviates from the eigenvalue closed form"
    );
    let d1 = delta_n(&ch, &p, 1, a, &lim).unwrap();
    let d6 = delta_n(&ch, &p, 6, a, &lim).unwrap();
    Criterion {
        number: 6,
        name: "delta_n decreasing trend below I(p)",
    }
    .check(
        d6 < d1,
        format!("a = {a:.6}, delta_1 = {d1:.6}, delta_6 = {d6:.6}"),
    );
}

#[test]
fn criterion_07_gentle_measurement() {
    let mut rng = rng_from_seed(1007);
    let mut worst = f64::NEG_INFINITY;
    for trial in 0..10_000 {
        let dim = 2 + trial % 7;
        let rho = random_density(&mut rng, dim);
        let x = random_test(&mut rng, dim);
        let (lhs, rhs) = gentle_check(&rho, &x).unwrap();
        worst = worst.max(lhs - rhs);
    }
    Criterion {
        number: 7,
        name: "gentle measurement inequality",
    }
    .check(worst <= 1e-9, format!("10000 pairs, worst lhs - rhs = {worst:.3e}"));
}

#[test]
fn criterion_08_measurement_monotonicity() {
    let mut rng = rng_from_seed(1008);
    let mut worst = f64::NEG_INFINITY;
    for trial in 0..1000 {
        let dim = 2 + trial % 3;
        let rho = random_density(&mut rng, dim);
        let sigma = random_density(&mut rng, dim);
        let povm = random_povm(&mut rng, dim, 2 + trial % 4);
        let d = relative_entropy(&rho, &sigma).unwrap().finite().unwrap();
        match cqlab::info::measured_relative_entropy(&rho, &sigma, &povm).unwrap() {
            RelEntropy::Finite(m) => worst = worst.max(m - d),
            RelEntropy::Infinite => worst = f64::INFINITY,
        }
    }
    Criterion {
        number: 8,
        name: "measured relative entropy monotonicity",
    }
    .check(worst <= 1e-9, format!("1000 POVMs, worst measured - D = {worst:.3e}"));
}

#[test]
fn criterion_09_capacity_oracles() {
    // BSC(0.1) embedding: closed form log 2 - h(0.1)
    let ch = CqChannel::new(
        vec!["0".into(), "1".into()],
        vec![
            DensityOperator::from_probs(&[0.9, 0.1]).unwrap(),
            DensityOperator::from_probs(&[0.1, 0.9]).unwrap(),
        ],
    )
    .unwrap();
    let closed_form = 2f64.ln() - (-(0.1f64.ln()) * 0.1 - 0.9f64.ln() * 0.9);
    let bsc_err = (capacity(&ch, 1e-10).unwrap().capacity - closed_form).abs();

    // {|0><0|, |+><+|}: 1-parameter grid search over p, step 1e-4
    let ch = zero_plus();
    let mut grid_best = 0.0f64;
    for i in 1..10_000 {
        let q = i as f64 * 1e-4;
        let p = InputDistribution::new(vec![q, 1.0 - q]).unwrap();
        grid_best = grid_best.max(mutual_information(&ch, &p).unwrap());
    }
    let qubit_err = (capacity(&ch, 1e-10).unwrap().capacity - grid_best).abs();
    Criterion {
        number: 9,
        name: "capacity against closed-form and grid-search oracles",
    }
    .check(
        bsc_err < 1e-6 && qubit_err < 1e-4,
        format!("BSC error {bsc_err:.3e}, grid-search error {qubit_err:.3e}"),
    );
}

#[test]
fn criterion_10_verification_determinism() {
    let cfg = VerifyConfig {
        seed: 42,
        inject_fault: false,
        limits: limits(),
    };
    let first = run_suite(&cfg).unwrap();
    let second = run_suite(&cfg).unwrap();
    let report_a = render_report(&cfg, &first);
    let report_b = render_report(&cfg, &second);
    Criterion {
        number: 10,
        name: "byte-identical verification reports for a fixed seed",
    }
    .check(
        report_a == report_b && all_passed(&first),
        format!("{} bytes, identical = {}", report_a.len(), report_a == report_b),
    );
}
