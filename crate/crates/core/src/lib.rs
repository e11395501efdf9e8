//! Numerical laboratory for classical-quantum channel coding.
//!
//! The crate is organized around five layers:
//!
//! * [`linop`] — dense complex Hermitian linear algebra: clustered spectral
//!   decompositions, positive-part projectors, pinching maps, Kronecker and
//!   direct-sum constructions.
//! * [`channel`] — classical-quantum channels, product extensions, and the
//!   block-diagonal lifted state pair.
//! * [`info`] — von Neumann entropy, quantum relative entropy, Holevo mutual
//!   information and capacity optimization.
//! * [`hyptest`] — pinched hypothesis tests between tensor-power hypotheses
//!   and their error-exponent bounds.
//! * [`packing`] — the greedy packing construction of explicit codes with
//!   certified rate and error bounds.
//!
//! [`verify`] bundles the randomized invariant suites behind the `verify`
//! CLI subcommand, and [`randx`] holds the seeded random generators they use.

pub mod channel;
pub mod error;
pub mod hyptest;
pub mod info;
pub mod linop;
pub mod packing;
pub mod randx;
pub mod verify;

pub use error::{Error, Result};

#[cfg(test)]
pub(crate) mod testutil {
    use nalgebra::DVector;

    use crate::channel::CqChannel;
    use crate::linop::{C64, DensityOperator};

    /// Noiseless classical bit embedded as diagonal qubit states.
    pub fn classical_binary() -> CqChannel {
        CqChannel::new(
            vec!["0".into(), "1".into()],
            vec![
                DensityOperator::from_probs(&[1.0, 0.0]).unwrap(),
                DensityOperator::from_probs(&[0.0, 1.0]).unwrap(),
            ],
        )
        .unwrap()
    }

    /// The {|0><0|, |+><+|} channel.
    pub fn zero_plus() -> CqChannel {
        let zero = DensityOperator::from_probs(&[1.0, 0.0]).unwrap();
        let plus = DensityOperator::pure(&DVector::from_vec(vec![
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
        ]))
        .unwrap();
        CqChannel::new(vec!["0".into(), "+".into()], vec![zero, plus]).unwrap()
    }
}

/// Resource guards for exponentially growing objects.
///
/// `max_dim` bounds the dimension of any dense matrix that may be
/// materialized; `max_enum` bounds the number of codewords enumerated in a
/// product distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    pub max_dim: usize,
    pub max_enum: u128,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_dim: 4096,
            max_enum: 1_000_000,
        }
    }
}

impl Limits {
    /// Reads overrides from `CQLAB_MAX_DIM` and `CQLAB_MAX_ENUM`.
    pub fn from_env() -> Self {
        let mut limits = Limits::default();
        if let Ok(v) = std::env::var("CQLAB_MAX_DIM") {
            if let Ok(d) = v.parse::<usize>() {
                limits.max_dim = d;
            }
        }
        if let Ok(v) = std::env::var("CQLAB_MAX_ENUM") {
            if let Ok(e) = v.parse::<u128>() {
                limits.max_enum = e;
            }
        }
        limits
    }
}
