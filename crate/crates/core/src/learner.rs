//! Proper membership-query learning of sparse polynomials under the uniform
//! distribution, with equivalence queries simulated by random sampling.
//!
//! The learning core is pluggable through [`LearnerCore`]: it poses
//! membership queries, proposes hypotheses and receives counterexamples. The
//! driver [`learn_poly_prime`] runs at most `n's + 2` proposal rounds and
//! answers each proposal with a sampled equivalence query. The crate ships
//! [`InterpolationCore`], which tabulates the target on all `2^{n'}` points
//! and interpolates it exactly.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2poly::{SparsePoly, TruthTable};

/// A membership query could not be answered (the simulation failed).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MqFailure;

/// Answers membership queries on `{0,1}^{arity}`; a point is an integer whose
/// bit `j - 1` is variable `j`. Answers are GF(2) values.
pub trait MembershipOracle {
    fn arity(&self) -> usize;

    fn query(&mut self, point: u64) -> Result<bool, MqFailure>;

    /// Called before the core starts posing queries for a proposal.
    fn entering_core(&mut self) {}

    /// Called before the samples of a simulated equivalence query.
    fn entering_equivalence(&mut self) {}
}

impl<F: FnMut(u64) -> Result<bool, MqFailure>> MembershipOracle for (usize, F) {
    fn arity(&self) -> usize {
        self.0
    }

    fn query(&mut self, point: u64) -> Result<bool, MqFailure> {
        (self.1)(point)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Proposal {
    Hypothesis(SparsePoly),
    NotSparse,
}

pub trait LearnerCore {
    /// Membership queries the core will issue for this arity and sparsity,
    /// declared before any query is made.
    fn mq_budget(&self, arity: usize, s: usize) -> Result<u64>;

    fn propose(&mut self, mq: &mut dyn MembershipOracle, s: usize) -> Result<Proposal, MqFailure>;

    fn counterexample(&mut self, point: u64, label: bool);
}

/// Exact learner by full tabulation and Möbius interpolation.
///
/// Its hypothesis is exact with respect to every answer received, so any
/// counterexample shows the answers do not come from an `s`-sparse function
/// and the next proposal is "not s-sparse".
#[derive(Clone, Debug)]
pub struct InterpolationCore {
    max_arity: usize,
    refuted: bool,
}

impl InterpolationCore {
    pub const DEFAULT_MAX_ARITY: usize = 20;

    pub fn new(max_arity: usize) -> Self {
        InterpolationCore { max_arity, refuted: false }
    }
}

impl Default for InterpolationCore {
    fn default() -> Self {
        InterpolationCore::new(Self::DEFAULT_MAX_ARITY)
    }
}

impl LearnerCore for InterpolationCore {
    fn mq_budget(&self, arity: usize, _s: usize) -> Result<u64> {
        if arity > self.max_arity {
            return Err(Error::CapExceeded { what: "interpolation arity", actual: arity, cap: self.max_arity });
        }
        Ok(1u64 << arity)
    }

    fn propose(&mut self, mq: &mut dyn MembershipOracle, s: usize) -> Result<Proposal, MqFailure> {
        if self.refuted {
            return Ok(Proposal::NotSparse);
        }
        let arity = mq.arity();
        let mut table = TruthTable::zeros(arity).expect("arity checked by mq_budget");
        for point in 0..1u64 << arity {
            table.set(point, mq.query(point)?);
        }
        let h = table.mobius_interpolate();
        if h.sparsity() > s {
            return Ok(Proposal::NotSparse);
        }
        Ok(Proposal::Hypothesis(h))
    }

    fn counterexample(&mut self, _point: u64, _label: bool) {
        self.refuted = true;
    }
}

/// Query budget of one learning run, fixed before the first query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LearnerBudget {
    pub arity: usize,
    pub mq_budget: u64,
    /// At most `arity * s + 2` equivalence queries.
    pub eq_rounds: u64,
    /// `ceil((1/accuracy) ln(3 (arity s + 2) / confidence))` samples per round.
    pub eq_sample_size: u64,
    /// `mq_budget + eq_rounds * eq_sample_size`.
    pub q_total: u64,
}

impl LearnerBudget {
    pub fn new(core: &dyn LearnerCore, arity: usize, s: usize, accuracy: f64, confidence: f64) -> Result<Self> {
        if !(accuracy > 0.0 && accuracy <= 1.0) {
            return Err(Error::invalid("accuracy", format!("{accuracy} is not in (0, 1]")));
        }
        if !(confidence > 0.0 && confidence < 1.0) {
            return Err(Error::invalid("confidence", format!("{confidence} is not in (0, 1)")));
        }
        let mq_budget = core.mq_budget(arity, s)?;
        let eq_rounds = (arity * s + 2) as u64;
        let eq_sample_size = equivalence_sample_size(arity, s, accuracy, confidence);
        let q_total = mq_budget.saturating_add(eq_rounds.saturating_mul(eq_sample_size));
        Ok(LearnerBudget { arity, mq_budget, eq_rounds, eq_sample_size, q_total })
    }
}

pub fn equivalence_sample_size(arity: usize, s: usize, accuracy: f64, confidence: f64) -> u64 {
    let rounds = (arity * s + 2) as f64;
    ((3.0 * rounds / confidence).ln() / accuracy).ceil() as u64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum LearnerOutcome {
    Hypothesis { poly: SparsePoly },
    NotSparse,
    /// A membership query failed.
    Aborted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearnerReport {
    pub outcome: LearnerOutcome,
    pub budget: LearnerBudget,
    pub eq_rounds_used: u64,
    pub mq_issued: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EqAnswer {
    Pass,
    Counterexample { point: u64, label: bool },
}

/// Compares `h` with the oracle on `sample_size` uniform points and returns
/// the first disagreement.
pub fn simulate_equivalence_query<R: Rng + ?Sized>(
    mq: &mut dyn MembershipOracle,
    h: &SparsePoly,
    sample_size: u64,
    rng: &mut R,
) -> Result<EqAnswer, MqFailure> {
    let arity = mq.arity();
    assert_eq!(h.n(), arity, "hypothesis arity");
    let mask = if arity >= 64 { u64::MAX } else { (1u64 << arity) - 1 };
    for _ in 0..sample_size {
        let z = rng.random::<u64>() & mask;
        let label = mq.query(z)?;
        if h.eval_index(z) != label {
            return Ok(EqAnswer::Counterexample { point: z, label });
        }
    }
    Ok(EqAnswer::Pass)
}

struct Counting<'a> {
    inner: &'a mut dyn MembershipOracle,
    issued: u64,
}

impl MembershipOracle for Counting<'_> {
    fn arity(&self) -> usize {
        self.inner.arity()
    }

    fn query(&mut self, point: u64) -> Result<bool, MqFailure> {
        self.issued += 1;
        self.inner.query(point)
    }
}

/// Runs the core against `mq` and certifies each proposal with a sampled
/// equivalence query, for at most `arity * s + 2` rounds.
pub fn learn_poly_prime<R: Rng + ?Sized>(
    core: &mut dyn LearnerCore,
    mq: &mut dyn MembershipOracle,
    s: usize,
    accuracy: f64,
    confidence: f64,
    rng: &mut R,
) -> Result<LearnerReport> {
    let arity = mq.arity();
    if arity > 64 {
        return Err(Error::CapExceeded { what: "learner arity", actual: arity, cap: 64 });
    }
    let budget = LearnerBudget::new(core, arity, s, accuracy, confidence)?;
    let mut counted = Counting { inner: mq, issued: 0 };
    let mut rounds = 0;
    let outcome = loop {
        if rounds == budget.eq_rounds {
            break LearnerOutcome::NotSparse;
        }
        counted.inner.entering_core();
        let h = match core.propose(&mut counted, s) {
            Err(MqFailure) => break LearnerOutcome::Aborted,
            Ok(Proposal::NotSparse) => break LearnerOutcome::NotSparse,
            Ok(Proposal::Hypothesis(h)) if h.sparsity() > s => break LearnerOutcome::NotSparse,
            Ok(Proposal::Hypothesis(h)) => h,
        };
        rounds += 1;
        counted.inner.entering_equivalence();
        match simulate_equivalence_query(&mut counted, &h, budget.eq_sample_size, rng) {
            Err(MqFailure) => break LearnerOutcome::Aborted,
            Ok(EqAnswer::Pass) => break LearnerOutcome::Hypothesis { poly: h },
            Ok(EqAnswer::Counterexample { point, label }) => core.counterexample(point, label),
        }
    };
    debug_assert!(counted.issued <= budget.q_total);
    if let LearnerOutcome::Hypothesis { poly } = &outcome {
        assert!(poly.sparsity() <= s, "learner must be proper");
    }
    Ok(LearnerReport { outcome, budget, eq_rounds_used: rounds, mq_issued: counted.issued })
}
