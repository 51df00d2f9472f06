//! Arbitrarily varying wiretap channels at desk scale.
//!
//! Modules:
//!
//! * [`prob`]: finite distributions, stochastic matrices, information
//!   measures, types and typical sets, and the concentration bounds used by
//!   the code audits.
//! * [`channel`]: AVWC / CAVWC specifications, mixtures, products, channel
//!   prefixing, degradedness certificates and the Hausdorff metric.
//! * [`capacity`]: numerical evaluation of the k-letter secrecy-rate terms,
//!   the single-letter degraded formula, a brute-force oracle, and a
//!   continuity probe.
//! * [`code`]: random wiretap codes built from truncated typical codeword
//!   laws, typicality decoding, exact and Monte-Carlo error, leakage and
//!   resolvability audits.
//! * [`robust`]: permuted codes, permutation-averaged correlated codes, the
//!   robustification inequality and the permutation distribution identity.
//!
//! All logarithms are base 2 and total variation is the unhalved `l1`
//! distance, so it ranges over `[0, 2]` for probability vectors.

pub mod budget;
pub mod capacity;
pub mod channel;
pub mod code;
pub mod error;
pub mod prob;
pub mod robust;
pub mod seq;

pub use budget::Budget;
pub use capacity::{CapacityEstimate, CapacityOptions, InputStructure};
pub use channel::{AvwcSpec, CavwcSpec, DegradednessCertificate};
pub use code::{CodeParams, Codebook, WiretapCode};
pub use error::{Error, Result};
pub use prob::{Channel, Distribution, JointDistribution, TypicalityParams};
pub use robust::{CorrelatedCode, Permutation};
