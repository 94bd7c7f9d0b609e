//! Batch runs of the tester over a family: completeness, soundness and query
//! scaling.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sparsepoly_core::seed::derive;
use sparsepoly_core::tester::TesterConfig;
use sparsepoly_core::{test_sparse_poly, EnumerationLimits, Outcome, QueryLedger, RejectReason, Result, TesterParams};

use crate::families::Family;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Completeness,
    Soundness,
    QueryScaling,
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Replace sampled variation estimates by exact values.
    pub exact_backend: bool,
    pub limits: EnumerationLimits,
}

/// Summary of one trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialDigest {
    pub trial: u64,
    pub seed: u64,
    pub outcome: Outcome,
    pub reason: Option<RejectReason>,
    pub alpha: f64,
    pub high_count: usize,
    /// High subset ids chosen by the tester.
    pub high: Vec<u64>,
    pub ledger: QueryLedger,
    pub queries: u64,
    /// Certified distance to the sparse class, for far families.
    pub certificate: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QueryStats {
    pub min: u64,
    pub mean: f64,
    pub max: u64,
}

impl QueryStats {
    pub fn of(values: impl IntoIterator<Item = u64>) -> Self {
        let values: Vec<u64> = values.into_iter().collect();
        if values.is_empty() {
            return QueryStats::default();
        }
        QueryStats {
            min: *values.iter().min().unwrap(),
            mean: values.iter().map(|&v| v as f64).sum::<f64>() / values.len() as f64,
            max: *values.iter().max().unwrap(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: ExperimentKind,
    pub family: Family,
    pub params: TesterParams,
    pub exact_backend: bool,
    pub seed: u64,
    /// Trials actually run (excluded draws are not counted).
    pub trials: u64,
    /// Draws that failed far-ness certification.
    pub excluded: u64,
    pub accepted: u64,
    pub rejected: BTreeMap<RejectReason, u64>,
    pub accept_rate: f64,
    pub reject_rate: f64,
    pub queries: QueryStats,
    pub verdicts: Vec<TrialDigest>,
}

impl ExperimentReport {
    pub fn rejected_total(&self) -> u64 {
        self.rejected.values().sum()
    }

    /// One flat row per trial, for CSV export.
    pub fn rows(&self) -> impl Iterator<Item = TrialRow> + '_ {
        self.verdicts.iter().map(|d| TrialRow {
            n: self.family.n,
            trial: d.trial,
            seed: d.seed,
            outcome: d.outcome,
            reason: d.reason.map(RejectReason::as_str),
            alpha: d.alpha,
            high_count: d.high_count,
            queries: d.queries,
            estimation: d.ledger.estimation,
            closeness: d.ledger.closeness,
            shiv: d.ledger.shiv,
            membership: d.ledger.membership,
            equivalence: d.ledger.equivalence,
            certificate: d.certificate,
        })
    }
}

/// Flat projection of [`TrialDigest`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRow {
    pub n: usize,
    pub trial: u64,
    pub seed: u64,
    pub outcome: Outcome,
    pub reason: Option<&'static str>,
    pub alpha: f64,
    pub high_count: usize,
    pub queries: u64,
    pub estimation: u64,
    pub closeness: u64,
    pub shiv: u64,
    pub membership: u64,
    pub equivalence: u64,
    pub certificate: Option<f64>,
}

pub fn write_csv<'a, W: std::io::Write>(
    reports: impl IntoIterator<Item = &'a ExperimentReport>,
    out: W,
) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for report in reports {
        for row in report.rows() {
            w.serialize(row)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Seed of trial `trial` under the experiment seed.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    derive(seed, &[trial])
}

fn run_trials(
    experiment: ExperimentKind,
    family: &Family,
    params: &TesterParams,
    trials: u64,
    seed: u64,
    options: &RunOptions,
) -> Result<ExperimentReport> {
    let digests: Vec<Option<TrialDigest>> = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<Option<TrialDigest>> {
            let Some(instance) = family.instance(seed, trial, &options.limits)? else {
                return Ok(None);
            };
            let config = if options.exact_backend {
                TesterConfig::exact(instance.junta(&options.limits)?)
            } else {
                TesterConfig::default()
            };
            let oracle = instance.oracle();
            let tseed = trial_seed(seed, trial);
            let v = test_sparse_poly(&oracle, params, &config, tseed)?;
            Ok(Some(TrialDigest {
                trial,
                seed: tseed,
                outcome: v.outcome,
                reason: v.reason,
                alpha: v.alpha,
                high_count: v.high_count,
                high: v.classification.high.clone(),
                queries: v.ledger.total(),
                ledger: v.ledger,
                certificate: instance.certificate,
            }))
        })
        .collect::<Result<_>>()?;

    let excluded = digests.iter().filter(|d| d.is_none()).count() as u64;
    let verdicts: Vec<TrialDigest> = digests.into_iter().flatten().collect();
    let run = verdicts.len() as u64;
    let accepted = verdicts.iter().filter(|d| d.outcome == Outcome::Accept).count() as u64;
    let mut rejected = BTreeMap::new();
    for d in &verdicts {
        if let Some(r) = d.reason {
            *rejected.entry(r).or_insert(0) += 1;
        }
    }
    let rate = |k: u64| if run == 0 { 0.0 } else { k as f64 / run as f64 };
    Ok(ExperimentReport {
        experiment,
        family: family.clone(),
        params: params.clone(),
        exact_backend: options.exact_backend,
        seed,
        trials: run,
        excluded,
        accepted,
        accept_rate: rate(accepted),
        reject_rate: rate(run - accepted),
        rejected,
        queries: QueryStats::of(verdicts.iter().map(|d| d.queries)),
        verdicts,
    })
}

pub fn run_completeness_experiment(
    family: &Family,
    params: &TesterParams,
    trials: u64,
    seed: u64,
    options: &RunOptions,
) -> Result<ExperimentReport> {
    run_trials(ExperimentKind::Completeness, family, params, trials, seed, options)
}

pub fn run_soundness_experiment(
    family: &Family,
    params: &TesterParams,
    trials: u64,
    seed: u64,
    options: &RunOptions,
) -> Result<ExperimentReport> {
    run_trials(ExperimentKind::Soundness, family, params, trials, seed, options)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub n: usize,
    pub mean_queries: f64,
    pub queries: QueryStats,
    pub accept_rate: f64,
    /// Mean query count of each phase.
    pub phase_means: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryScalingReport {
    pub experiment: ExperimentKind,
    pub params: TesterParams,
    pub seed: u64,
    pub trials: u64,
    pub points: Vec<ScalingPoint>,
    /// Largest relative difference between two mean totals.
    pub max_relative_spread: f64,
    pub reports: Vec<ExperimentReport>,
}

/// Runs the canonical family at every `n` with the same parameters and seed.
pub fn run_query_scaling(
    ns: &[usize],
    params: &TesterParams,
    trials: u64,
    seed: u64,
    options: &RunOptions,
) -> Result<QueryScalingReport> {
    let mut points = Vec::new();
    let mut reports = Vec::new();
    for &n in ns {
        let report = run_trials(ExperimentKind::QueryScaling, &Family::canonical(n), params, trials, seed, options)?;
        let mut phase_means = BTreeMap::new();
        for phase in sparsepoly_core::Phase::ALL {
            let total: u64 = report.verdicts.iter().map(|d| d.ledger.get(phase)).sum();
            let key = serde_json::to_value(phase).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
            phase_means.insert(key, if report.trials == 0 { 0.0 } else { total as f64 / report.trials as f64 });
        }
        points.push(ScalingPoint {
            n,
            mean_queries: report.queries.mean,
            queries: report.queries.clone(),
            accept_rate: report.accept_rate,
            phase_means,
        });
        reports.push(report);
    }
    let means: Vec<f64> = points.iter().map(|p| p.mean_queries).collect();
    let lo = means.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = means.iter().copied().fold(0.0, f64::max);
    let max_relative_spread = if means.is_empty() || lo <= 0.0 { 0.0 } else { (hi - lo) / lo };
    Ok(QueryScalingReport {
        experiment: ExperimentKind::QueryScaling,
        params: params.clone(),
        seed,
        trials,
        points,
        max_relative_spread,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::FamilyKind;
    use sparsepoly_core::partition::{derive_params, ParamOverrides};
    use sparsepoly_core::Profile;

    fn quick(s: usize, eps: f64) -> TesterParams {
        let o = ParamOverrides { r: Some(32), big_m: Some(3000), ..Default::default() };
        derive_params(s, eps, Profile::Desk, &o).unwrap()
    }

    #[test]
    fn zero_trials_give_an_empty_report() {
        let r = run_completeness_experiment(&Family::canonical(16), &quick(3, 0.1), 0, 1, &RunOptions::default()).unwrap();
        assert_eq!((r.trials, r.accepted, r.rejected_total()), (0, 0, 0));
        assert_eq!(r.queries, QueryStats::default());
    }

    #[test]
    fn zero_polynomial_always_accepted() {
        let family = Family::new(FamilyKind::Zero, 20, 0);
        let r = run_completeness_experiment(&family, &quick(1, 0.1), 6, 2, &RunOptions::default()).unwrap();
        assert_eq!(r.accept_rate, 1.0);
    }

    #[test]
    fn report_arithmetic_and_determinism() {
        let family = Family::canonical(24);
        let a = run_completeness_experiment(&family, &quick(3, 0.1), 6, 3, &RunOptions::default()).unwrap();
        let b = run_completeness_experiment(&family, &quick(3, 0.1), 6, 3, &RunOptions::default()).unwrap();
        assert_eq!(a.accepted + a.rejected_total(), a.trials);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn csv_has_one_row_per_trial() {
        let family = Family::canonical(16);
        let r = run_completeness_experiment(&family, &quick(3, 0.1), 3, 5, &RunOptions::default()).unwrap();
        let mut out = Vec::new();
        write_csv([&r], &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].starts_with("n,trial,seed,outcome,reason,alpha"));
        assert!(lines[1].starts_with("16,0,"));
    }

    #[test]
    fn flip_noise_rejected() {
        let family = Family::flip_noise(8, 2, 0.2, num_rational::Ratio::new(3, 10));
        let r = run_soundness_experiment(&family, &quick(2, 0.2), 12, 6, &RunOptions::default()).unwrap();
        assert!(r.trials >= 9);
        assert!(r.reject_rate >= 2.0 / 3.0, "{:?}", r.rejected);
    }

    #[test]
    fn far_tables_rejected() {
        let family = Family::far_table(8, 1, 0.25);
        let r = run_soundness_experiment(&family, &quick(1, 0.25), 5, 4, &RunOptions::default()).unwrap();
        assert_eq!(r.excluded, 0);
        assert_eq!(r.accepted, 0);
        assert!(r.verdicts.iter().all(|d| d.certificate.unwrap() >= 0.25));
    }
}
