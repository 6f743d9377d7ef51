//! Union-closed set families over universes of at most 64 elements.
//!
//! * [`family`]: the family type, union closure, frequencies, separation.
//! * [`witness`]: chain witnesses, `M_i` sets, minimal transversals, the
//!   `P_B` family and the counting audit.
//! * [`bounds`]: the threshold calculus, generic over the scalar type.
//! * [`search`]: exhaustive/generator/random corpora and corpus verification.
//! * [`format`]: text, JSON and NDJSON family formats.

pub mod bounds;
pub mod error;
pub mod family;
pub mod format;
pub mod mask;
pub mod search;
pub mod witness;

pub use bounds::{BoundReport, Scalar, Verdict};
pub use error::{Error, Result};
pub use family::{FrequencyProfile, SetFamily};
pub use mask::Mask;
pub use search::{CorpusReport, Filter, Mode};
pub use witness::{ChainWitness, CountingAudit, TransversalReport};

/// Exact rational scalar for the threshold calculus.
pub type Exact = num_rational::Ratio<i128>;

/// Bound report in double precision, the form the CLI emits.
pub type BoundReport64 = BoundReport<f64>;
