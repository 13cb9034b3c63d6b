//! The differentiable matching network.
//!
//! The boolean dynamic program of [`crate::matcher`] is relaxed into real
//! arithmetic over the parameters of an [`Encoding`](crate::Encoding):
//! conjunction becomes `min`, disjunction becomes a clamped sum (or `max` for
//! the long split disjunctions), and the symbol sets of subtrees become soft
//! memberships. On a faithful encoding with exact clamping the network
//! reproduces the boolean matcher bit for bit.

mod network;
mod regularize;
mod train;

pub use network::{backward, compute_rho, forward, ForwardTrace, Gradient, Network, Rho, MAX_STRING_LEN};
pub use regularize::{onehot_loss, regularizer_gradient, regularizers};
pub use train::{train, AdamW, EpochLog, TrainConfig, TrainOutcome};

/// How `σ01(x) = min(max(x, 0), 1)` is evaluated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ClampMode {
    /// Plain clamp; used for prediction and faithfulness checks.
    Exact,
    /// Leaky clamp with the given slope outside [0, 1]; used for training so
    /// that saturated units still pass gradient.
    Leaky(f64),
}

impl ClampMode {
    pub const TRAINING: ClampMode = ClampMode::Leaky(0.01);

    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            ClampMode::Exact => x.clamp(0.0, 1.0),
            ClampMode::Leaky(slope) => {
                if x < 0.0 {
                    slope * x
                } else if x > 1.0 {
                    1.0 + slope * (x - 1.0)
                } else {
                    x
                }
            }
        }
    }

    /// Derivative of [`apply`](Self::apply); inside the closed unit interval it is 1.
    #[inline]
    pub fn slope(self, x: f64) -> f64 {
        if (0.0..=1.0).contains(&x) {
            1.0
        } else {
            match self {
                ClampMode::Exact => 0.0,
                ClampMode::Leaky(slope) => slope,
            }
        }
    }
}

/// `min(max(x, 0), 1)`.
pub fn sigma01(x: f64) -> f64 {
    ClampMode::Exact.apply(x)
}

/// Half squared error.
pub fn loss(y_hat: f64, y: f64) -> f64 {
    0.5 * (y_hat - y) * (y_hat - y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamp_examples() {
        assert_eq!(sigma01(0.5), 0.5);
        assert_eq!(sigma01(-2.0), 0.0);
        assert_eq!(sigma01(3.0), 1.0);
        let leaky = ClampMode::Leaky(0.01);
        assert!((leaky.apply(-2.0) + 0.02).abs() < 1e-15);
        assert!((leaky.apply(3.0) - 1.02).abs() < 1e-15);
        assert_eq!(leaky.slope(-1.0), 0.01);
        assert_eq!(ClampMode::Exact.slope(2.0), 0.0);
        assert_eq!(ClampMode::Exact.slope(0.3), 1.0);
    }

    #[test]
    fn loss_examples() {
        assert_eq!(loss(1.0, 1.0), 0.0);
        assert_eq!(loss(0.0, 1.0), 0.5);
        assert!((loss(0.4, 0.0) - 0.08).abs() < 1e-15);
    }
}
