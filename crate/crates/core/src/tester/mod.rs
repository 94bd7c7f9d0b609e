//! The sparse-polynomial tester: partition, estimate, restrict, check
//! closeness, then learn the junta on the high subsets.

mod shiv;
mod simmq;

use rand::seq::IndexedRandom;
use serde::{Deserialize, Serialize};

use crate::assignment::{Assignment, VarSet};
use crate::blackbox::{zero_restricted_oracle, BlackBox, Phase, QueryLedger};
use crate::error::{Error, Result};
use crate::gf2poly::format_poly;
use crate::learner::{learn_poly_prime, InterpolationCore, LearnerBudget, LearnerCore, LearnerOutcome};
use crate::partition::{classify, random_partition, Classification, Partition, TesterParams};
use crate::seed::{phase, stream};
use crate::variation::{ExactJunta, IndependenceTest};

pub use shiv::{shiv, shiv_iterations};
pub use simmq::{simmq, SimMq};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Accept,
    Reject,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectReason {
    ClosenessCheckFailed,
    LearnerNotSparse,
    ShivFailed,
    TooManyHighSubsets,
    /// Parameter derivation produced no threshold; never returned by
    /// [`test_sparse_poly`], which reports it as an error, but used by reports
    /// that record such runs.
    EmptyGrid,
}

impl RejectReason {
    pub const ALL: [RejectReason; 5] = [
        RejectReason::ClosenessCheckFailed,
        RejectReason::LearnerNotSparse,
        RejectReason::ShivFailed,
        RejectReason::TooManyHighSubsets,
        RejectReason::EmptyGrid,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RejectReason::ClosenessCheckFailed => "closeness-check-failed",
            RejectReason::LearnerNotSparse => "learner-not-sparse",
            RejectReason::ShivFailed => "shiv-failed",
            RejectReason::TooManyHighSubsets => "too-many-high-subsets",
            RejectReason::EmptyGrid => "empty-grid",
        }
    }
}

/// Learner statistics of a run that reached the learning step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearnerStats {
    pub budget: LearnerBudget,
    /// Failure probability allotted to each simulated membership query.
    pub simmq_delta: f64,
    pub eq_rounds_used: u64,
    pub mq_issued: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub reason: Option<RejectReason>,
    pub seed: u64,
    pub params: TesterParams,
    pub alpha: f64,
    pub exact_backend: bool,
    /// Estimated (or exact) variation of each subset, by subset id.
    pub estimates: Vec<f64>,
    pub classification: Classification,
    pub high_count: usize,
    /// Variables of each high subset, in the order the hypothesis numbers them.
    pub high_vars: Vec<Vec<usize>>,
    pub partition: Partition,
    pub ledger: QueryLedger,
    pub learner: Option<LearnerStats>,
    /// Accepted hypothesis over `high_count` variables, in polynomial file
    /// format. Variable `j` stands for the high subset `high_vars[j - 1]`.
    pub hypothesis: Option<String>,
}

impl Verdict {
    pub fn accepted(&self) -> bool {
        self.outcome == Outcome::Accept
    }
}

#[derive(Clone, Debug)]
pub enum Backend {
    /// Variation estimated by independence tests on the oracle.
    Sampled,
    /// Variation computed exactly from a known description of the oracle.
    Exact(ExactJunta),
}

#[derive(Clone, Debug)]
pub struct TesterConfig {
    pub backend: Backend,
    /// Refuse runs whose estimation phase alone needs more queries.
    pub max_estimation_queries: u128,
    /// Largest junta the learner will interpolate.
    pub max_learner_arity: usize,
}

impl Default for TesterConfig {
    fn default() -> Self {
        TesterConfig {
            backend: Backend::Sampled,
            max_estimation_queries: 1 << 34,
            max_learner_arity: InterpolationCore::DEFAULT_MAX_ARITY,
        }
    }
}

impl TesterConfig {
    pub fn exact(junta: ExactJunta) -> Self {
        TesterConfig { backend: Backend::Exact(junta), ..Default::default() }
    }
}

/// Runs the tester once on `f`. Every random choice is drawn from streams
/// derived from `seed`, so the verdict is a function of `(f, params, seed)`.
pub fn test_sparse_poly(
    f: &(impl BlackBox + ?Sized),
    params: &TesterParams,
    config: &TesterConfig,
    seed: u64,
) -> Result<Verdict> {
    params.validate()?;
    let n = f.n();
    let exact = match &config.backend {
        Backend::Sampled => {
            let needed = params.estimation_queries();
            if needed > config.max_estimation_queries {
                return Err(Error::Infeasible(format!(
                    "variation estimation needs {needed} queries, above the limit of {}",
                    config.max_estimation_queries
                )));
            }
            None
        }
        Backend::Exact(junta) => {
            if junta.n() != n {
                return Err(Error::DimensionMismatch { expected: n, actual: junta.n() });
            }
            Some(junta)
        }
    };
    let mut ledger = QueryLedger::default();

    let partition = random_partition(n, params.r, &mut stream(seed, &[phase::PARTITION]))?;
    let alpha = *params.alpha_grid.choose(&mut stream(seed, &[phase::ALPHA])).expect("validated grid");
    let subsets = partition.subsets()?;

    let estimates: Vec<f64> = match exact {
        Some(junta) => subsets.iter().map(|set| junta.variation(set).map(|v| v.to_f64())).collect::<Result<_>>()?,
        None => {
            let runs = u64::try_from(params.big_m).map_err(|_| Error::Infeasible("M overflows".into()))?;
            ledger.charge(Phase::Estimation, f, || {
                subsets
                    .iter()
                    .enumerate()
                    .map(|(j, set)| {
                        let mut rng = stream(seed, &[phase::ESTIMATION, j as u64]);
                        let rejections = IndependenceTest::new(set).count_rejections(f, runs, &mut rng);
                        2.0 * rejections as f64 / runs as f64
                    })
                    .collect()
            })
        }
    };

    let classification = classify(&estimates, alpha, params.delta);
    let high_sets: Vec<VarSet> = classification.high.iter().map(|&j| subsets[j as usize].clone()).collect();
    let low_vars = partition.union_of(&classification.low);

    let mut verdict = Verdict {
        outcome: Outcome::Reject,
        reason: None,
        seed,
        params: params.clone(),
        alpha,
        exact_backend: exact.is_some(),
        estimates,
        high_count: high_sets.len(),
        high_vars: high_sets.iter().map(|s| s.iter().collect()).collect(),
        classification,
        partition,
        ledger: QueryLedger::default(),
        learner: None,
        hypothesis: None,
    };
    let reject = |mut v: Verdict, reason, ledger| {
        v.reason = Some(reason);
        v.ledger = ledger;
        Ok(v)
    };

    // Closeness of f to its zero-restriction on the low subsets.
    let restricted = zero_restricted_oracle(f, low_vars)?;
    let mut rng = stream(seed, &[phase::CLOSENESS]);
    let mut x = Assignment::zeros(n);
    let mismatch = ledger.charge(Phase::Closeness, f, || {
        let mut mismatch = false;
        for _ in 0..params.m {
            x.randomize(&mut rng);
            mismatch |= f.query(&x) != restricted.query(&x);
        }
        mismatch
    });
    if mismatch {
        return reject(verdict, RejectReason::ClosenessCheckFailed, ledger);
    }

    if !params.within_high_subset_bound(high_sets.len()) || high_sets.len() > config.max_learner_arity {
        return reject(verdict, RejectReason::TooManyHighSubsets, ledger);
    }

    let mut core = InterpolationCore::new(config.max_learner_arity);
    let budget =
        LearnerBudget::new(&core, high_sets.len(), params.s, params.learner_accuracy, params.learner_confidence)?;
    let simmq_delta = 1.0 / (100.0 * budget.q_total as f64);
    let report = {
        let mut mq = SimMq::new(
            f,
            &high_sets,
            alpha,
            simmq_delta,
            stream(seed, &[phase::LEARNER, 0]),
            &mut ledger,
        );
        let mut eq_rng = stream(seed, &[phase::LEARNER, 1]);
        learn_poly_prime(
            &mut core as &mut dyn LearnerCore,
            &mut mq,
            params.s,
            params.learner_accuracy,
            params.learner_confidence,
            &mut eq_rng,
        )?
    };
    verdict.learner = Some(LearnerStats {
        budget: report.budget,
        simmq_delta,
        eq_rounds_used: report.eq_rounds_used,
        mq_issued: report.mq_issued,
    });
    match report.outcome {
        LearnerOutcome::Hypothesis { poly } => {
            assert!(poly.sparsity() <= params.s, "accepted hypothesis must be s-sparse");
            verdict.outcome = Outcome::Accept;
            verdict.hypothesis = Some(format_poly(&poly));
            verdict.ledger = ledger;
            Ok(verdict)
        }
        LearnerOutcome::NotSparse => reject(verdict, RejectReason::LearnerNotSparse, ledger),
        LearnerOutcome::Aborted => reject(verdict, RejectReason::ShivFailed, ledger),
    }
}
