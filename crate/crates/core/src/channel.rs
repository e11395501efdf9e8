//! Classical-quantum channel model and its product extensions.
//!
//! A channel is a finite input alphabet together with one output density
//! operator per symbol. The lifted pair of block-diagonal states over the
//! alphabet is kept blockwise; a dense materialization is available for
//! small cross-checks.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::linop::{direct_sum, kron, CMatrix, C64, DensityOperator, HermitianOperator};

/// Finite-alphabet channel x -> rho_x with a shared output dimension.
#[derive(Debug, Clone)]
pub struct CqChannel {
    alphabet: Vec<String>,
    dim: usize,
    states: Vec<DensityOperator>,
}

impl CqChannel {
    pub fn new(alphabet: Vec<String>, states: Vec<DensityOperator>) -> Result<Self> {
        if alphabet.is_empty() {
            return Err(Error::Empty("channel alphabet".into()));
        }
        if alphabet.len() != states.len() {
            return Err(Error::AlphabetMismatch(format!(
                "{} symbols but {} states",
                alphabet.len(),
                states.len()
            )));
        }
        let dim = states[0].dim();
        for (sym, st) in alphabet.iter().zip(&states) {
            if st.dim() != dim {
                return Err(Error::AlphabetMismatch(format!(
                    "state for symbol '{sym}' has dimension {} but expected {dim}",
                    st.dim()
                )));
            }
        }
        Ok(CqChannel {
            alphabet,
            dim,
            states,
        })
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn state(&self, idx: usize) -> &DensityOperator {
        &self.states[idx]
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    pub fn symbol_index(&self, symbol: &str) -> Option<usize> {
        self.alphabet.iter().position(|s| s == symbol)
    }
}

/// Probability distribution over the channel alphabet, index-aligned.
#[derive(Debug, Clone, PartialEq)]
pub struct InputDistribution {
    probs: Vec<f64>,
}

impl InputDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Empty("input distribution".into()));
        }
        if let Some(p) = probs.iter().find(|p| **p < 0.0 || !p.is_finite()) {
            return Err(Error::InvalidDistribution(format!("probability {p}")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!("sum {sum} != 1")));
        }
        Ok(InputDistribution { probs })
    }

    pub fn uniform(k: usize) -> Self {
        InputDistribution {
            probs: vec![1.0 / k as f64; k],
        }
    }

    pub fn point_mass(k: usize, idx: usize) -> Self {
        let mut probs = vec![0.0; k];
        probs[idx] = 1.0;
        InputDistribution { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Word over the alphabet, stored as symbol indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Codeword {
    symbols: Vec<usize>,
}

impl Codeword {
    pub fn new(symbols: Vec<usize>, alphabet_size: usize) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::Empty("codeword".into()));
        }
        if let Some(&s) = symbols.iter().find(|&&s| s >= alphabet_size) {
            return Err(Error::AlphabetMismatch(format!(
                "symbol index {s} out of range for alphabet of size {alphabet_size}"
            )));
        }
        Ok(Codeword { symbols })
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn concat(&self, other: &Codeword) -> Codeword {
        let mut symbols = self.symbols.clone();
        symbols.extend_from_slice(&other.symbols);
        Codeword { symbols }
    }

    /// Renders with the channel's symbol names.
    pub fn display(&self, ch: &CqChannel) -> String {
        self.symbols
            .iter()
            .map(|&i| ch.alphabet()[i].as_str())
            .collect::<Vec<_>>()
            .join("")
    }
}

/// Block-diagonal lifted pair over the alphabet:
/// rho_hat = (+)_x p(x) rho_x and sigma_hat = (+)_x p(x) sigma.
#[derive(Debug, Clone)]
pub struct LiftedStatePair {
    rho_blocks: Vec<CMatrix>,
    sigma_blocks: Vec<CMatrix>,
}

impl LiftedStatePair {
    pub fn block_count(&self) -> usize {
        self.rho_blocks.len()
    }

    pub fn rho_block(&self, x: usize) -> &CMatrix {
        &self.rho_blocks[x]
    }

    pub fn sigma_block(&self, x: usize) -> &CMatrix {
        &self.sigma_blocks[x]
    }

    pub fn dense_rho(&self) -> Result<DensityOperator> {
        DensityOperator::from_matrix(direct_sum(&self.rho_blocks)?)
    }

    pub fn dense_sigma(&self) -> Result<DensityOperator> {
        DensityOperator::from_matrix(direct_sum(&self.sigma_blocks)?)
    }
}

/// Mixture state sigma_p = sum_x p(x) rho_x.
pub fn mixture_state(ch: &CqChannel, p: &InputDistribution) -> Result<DensityOperator> {
    if p.len() != ch.alphabet_size() {
        return Err(Error::AlphabetMismatch(format!(
            "distribution over {} symbols, channel has {}",
            p.len(),
            ch.alphabet_size()
        )));
    }
    let mut m = CMatrix::zeros(ch.dim(), ch.dim());
    for (st, &px) in ch.states().iter().zip(p.probs()) {
        m += st.matrix().scale(px);
    }
    DensityOperator::new(HermitianOperator::symmetrize(m))
}

/// Tensor-product state rho_{x_1} (x) ... (x) rho_{x_n}.
pub fn codeword_state(ch: &CqChannel, u: &Codeword, max_dim: usize) -> Result<DensityOperator> {
    let mut m = ch.state(u.symbols()[0]).matrix().clone();
    for &x in &u.symbols()[1..] {
        m = kron(&m, ch.state(x).matrix(), max_dim)?;
    }
    DensityOperator::new(HermitianOperator::symmetrize(m))
}

/// Lexicographic iterator over all length-n codewords with their product
/// probabilities p^n(x^n).
pub struct ProductDistribution<'a> {
    probs: &'a [f64],
    n: usize,
    current: Option<Vec<usize>>,
}

impl<'a> Iterator for ProductDistribution<'a> {
    type Item = (Codeword, f64);

    fn next(&mut self) -> Option<Self::Item> {
        let symbols = self.current.take()?;
        let prob = symbols.iter().map(|&x| self.probs[x]).product();
        let word = Codeword {
            symbols: symbols.clone(),
        };
        // advance the lex counter (first symbol most significant)
        let k = self.probs.len();
        let mut next = symbols;
        let mut pos = self.n;
        loop {
            if pos == 0 {
                self.current = None;
                break;
            }
            pos -= 1;
            next[pos] += 1;
            if next[pos] < k {
                self.current = Some(next);
                break;
            }
            next[pos] = 0;
        }
        Some((word, prob))
    }
}

/// All |X|^n codewords in lexicographic alphabet order with p^n weights.
pub fn product_distribution<'a>(
    p: &'a InputDistribution,
    n: usize,
    max_enum: u128,
) -> Result<ProductDistribution<'a>> {
    if n == 0 {
        return Err(Error::Empty("block length must be >= 1".into()));
    }
    let count = (p.len() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if count > max_enum {
        return Err(Error::EnumLimitExceeded {
            count,
            limit: max_enum,
        });
    }
    Ok(ProductDistribution {
        probs: p.probs(),
        n,
        current: Some(vec![0; n]),
    })
}

/// Block-diagonal lifted pair over the alphabet.
pub fn lift(ch: &CqChannel, p: &InputDistribution) -> Result<LiftedStatePair> {
    if p.len() != ch.alphabet_size() {
        return Err(Error::AlphabetMismatch(format!(
            "distribution over {} symbols, channel has {}",
            p.len(),
            ch.alphabet_size()
        )));
    }
    let sigma = mixture_state(ch, p)?;
    let rho_blocks = ch
        .states()
        .iter()
        .zip(p.probs())
        .map(|(st, &px)| st.matrix().scale(px))
        .collect();
    let sigma_blocks = p.probs().iter().map(|&px| sigma.matrix().scale(px)).collect();
    Ok(LiftedStatePair {
        rho_blocks,
        sigma_blocks,
    })
}

// ---------------------------------------------------------------------------
// Channel spec files
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct ChannelFile {
    dim: usize,
    alphabet: Vec<String>,
    states: BTreeMap<String, Vec<Vec<[f64; 2]>>>,
    #[serde(default)]
    p: Option<BTreeMap<String, f64>>,
}

/// Parses a channel spec from JSON text. Returns the channel and the optional
/// input distribution.
pub fn parse_channel(text: &str) -> Result<(CqChannel, Option<InputDistribution>)> {
    let file: ChannelFile = serde_json::from_str(text)?;
    if file.alphabet.is_empty() {
        return Err(Error::ChannelSpec("alphabet is empty".into()));
    }
    if file.dim == 0 {
        return Err(Error::ChannelSpec("dim must be positive".into()));
    }
    let mut states = Vec::with_capacity(file.alphabet.len());
    for sym in &file.alphabet {
        let rows = file
            .states
            .get(sym)
            .ok_or_else(|| Error::ChannelSpec(format!("no state for symbol '{sym}'")))?;
        if rows.len() != file.dim {
            return Err(Error::ChannelSpec(format!(
                "state '{sym}': {} rows, expected {}",
                rows.len(),
                file.dim
            )));
        }
        let mut m = CMatrix::zeros(file.dim, file.dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != file.dim {
                return Err(Error::ChannelSpec(format!(
                    "state '{sym}': row {i} has {} entries, expected {}",
                    row.len(),
                    file.dim
                )));
            }
            for (j, &[re, im]) in row.iter().enumerate() {
                if !re.is_finite() || !im.is_finite() {
                    return Err(Error::ChannelSpec(format!(
                        "state '{sym}': entry ({i},{j}) is not finite"
                    )));
                }
                m[(i, j)] = C64::new(re, im);
            }
        }
        let state = DensityOperator::from_matrix(m)
            .map_err(|e| Error::ChannelSpec(format!("state '{sym}': {e}")))?;
        states.push(state);
    }
    let channel = CqChannel::new(file.alphabet.clone(), states)?;
    let dist = match file.p {
        None => None,
        Some(map) => {
            let mut probs = Vec::with_capacity(file.alphabet.len());
            for sym in &file.alphabet {
                let &px = map
                    .get(sym)
                    .ok_or_else(|| Error::ChannelSpec(format!("p: missing symbol '{sym}'")))?;
                probs.push(px);
            }
            Some(
                InputDistribution::new(probs)
                    .map_err(|e| Error::ChannelSpec(format!("p: {e}")))?,
            )
        }
    };
    Ok((channel, dist))
}

/// Loads a channel spec file from disk.
pub fn load_channel(path: &Path) -> Result<(CqChannel, Option<InputDistribution>)> {
    let text = std::fs::read_to_string(path)?;
    parse_channel(&text)
}
