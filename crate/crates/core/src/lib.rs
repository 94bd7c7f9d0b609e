//! Property testing for s-sparse GF(2) polynomials.
//!
//! The crate is organised bottom-up:
//!
//! * [`gf2poly`]: canonical sparse polynomials, truth tables and the exact
//!   enumeration oracles (distance, distance to the sparse class, zero fraction).
//! * [`blackbox`]: query-counted oracles over `{0,1}^n -> {-1,1}`.
//! * [`variation`]: exact and sampled variation, influence and the two-query
//!   independence test.
//! * [`partition`]: random partitions, parameter derivation, the threshold grid,
//!   classification and the structural audit of a partition.
//! * [`learner`]: the membership/equivalence query learner contract with the
//!   default interpolation core.
//! * [`tester`]: the end-to-end tester together with its two subroutines that
//!   pin high-variation coordinates and simulate membership queries.

pub mod assignment;
pub mod blackbox;
pub mod error;
pub mod exact;
pub mod gf2poly;
pub mod learner;
pub mod partition;
pub mod seed;
pub mod tester;
pub mod variation;

pub use assignment::{Assignment, VarSet};
pub use blackbox::{BlackBox, Phase, QueryLedger, Sign};
pub use error::{Error, Result};
pub use exact::Dyadic;
pub use gf2poly::{EnumerationLimits, Monomial, SparsePoly, TruthTable};
pub use learner::{LearnerBudget, LearnerOutcome};
pub use partition::{Classification, Partition, Profile, TesterParams};
pub use tester::{test_sparse_poly, Backend, Outcome, RejectReason, TesterConfig, Verdict};
pub use variation::VariationEstimate;
