//! Learning single-occurrence regular expressions with interleaving (SOIREs)
//! from labeled, possibly noisy, strings.
//!
//! The pieces, bottom up:
//!
//! - [`soire`] and [`notation`]: syntax trees, prefix and infix notations.
//! - [`matcher`]: membership by dynamic programming over the syntax tree,
//!   with [`oracle`] as an independent recursive reference.
//! - [`encoding`]: the parameter space of the network and the codec between
//!   faithful encodings and expressions.
//! - [`diffnet`]: the differentiable matching network, its gradients,
//!   regularizers and training loop.
//! - [`interpret`]: beam search from learnt parameters back to an expression.
//! - [`datagen`], [`dataset`], [`metrics`] and [`pipeline`]: data generation,
//!   evaluation and experiment orchestration.
//!
//! ```
//! use soire::{Alphabet, Soire, matcher::soiretm};
//!
//! let sigma = Alphabet::parse("abc").unwrap();
//! let r = Soire::parse("(a&b)c*", &sigma).unwrap();
//! assert_eq!(r.to_prefix(), ".&ab*c");
//! assert!(soiretm(&r, "bacc"));
//! assert!(!soiretm(&r, "acb"));
//! ```

pub mod alphabet;
pub mod checkpoint;
pub mod datagen;
pub mod dataset;
pub mod diffnet;
pub mod encoding;
mod error;
pub mod fixtures;
pub mod interpret;
pub mod matcher;
pub mod metrics;
pub mod notation;
pub mod oracle;
pub mod pipeline;
pub mod soire;
mod substrings;

pub use alphabet::{Alphabet, SymbolSet};
pub use encoding::{required_bound, Column, Encoding};
pub use error::{Error, Result};
pub use soire::{Label, Node, Soire};
