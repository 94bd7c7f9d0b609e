//! Repeated structural audits of a polynomial over random partitions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sparsepoly_core::partition::{random_partition, structure_audit, AuditReport};
use sparsepoly_core::seed::{phase, stream};
use sparsepoly_core::{EnumerationLimits, Result, SparsePoly, TesterParams};

use crate::experiment::trial_seed;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditSummary {
    pub params: TesterParams,
    pub alpha: f64,
    pub seed: u64,
    pub trials: u64,
    /// `holds[k]`: trials in which statement `k + 1` held.
    pub holds: [u64; 6],
    pub rates: [f64; 6],
    pub all_hold: u64,
    pub mean_high: f64,
}

impl AuditSummary {
    pub fn rate(&self, statement: usize) -> f64 {
        self.rates[statement - 1]
    }
}

/// Draws the partition of trial `trial` the same way the tester does.
pub fn audit_trial(
    p: &SparsePoly,
    params: &TesterParams,
    alpha: f64,
    seed: u64,
    trial: u64,
    limits: &EnumerationLimits,
) -> Result<AuditReport> {
    let partition = random_partition(p.n(), params.r, &mut stream(trial_seed(seed, trial), &[phase::PARTITION]))?;
    structure_audit(p, params, alpha, &partition, limits)
}

pub fn run_audit(
    p: &SparsePoly,
    params: &TesterParams,
    alpha: f64,
    trials: u64,
    seed: u64,
    limits: &EnumerationLimits,
) -> Result<AuditSummary> {
    let reports: Vec<AuditReport> =
        (0..trials).into_par_iter().map(|t| audit_trial(p, params, alpha, seed, t, limits)).collect::<Result<_>>()?;
    let mut holds = [0u64; 6];
    for r in &reports {
        for (k, &ok) in r.statements.iter().enumerate() {
            holds[k] += ok as u64;
        }
    }
    let frac = |k: u64| if trials == 0 { 0.0 } else { k as f64 / trials as f64 };
    Ok(AuditSummary {
        params: params.clone(),
        alpha,
        seed,
        trials,
        holds,
        rates: holds.map(frac),
        all_hold: reports.iter().filter(|r| r.all_hold()).count() as u64,
        mean_high: frac(reports.iter().map(|r| r.high.len() as u64).sum()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::canonical;
    use sparsepoly_core::partition::{derive_params, ParamOverrides};
    use sparsepoly_core::Profile;

    #[test]
    fn wide_partition_usually_isolates() {
        let o = ParamOverrides { r: Some(4096), big_m: Some(10), ..Default::default() };
        let params = derive_params(3, 0.1, Profile::Desk, &o).unwrap();
        let summary = run_audit(&canonical(12).unwrap(), &params, 0.125, 40, 1, &EnumerationLimits::default()).unwrap();
        assert_eq!(summary.holds[0], 40);
        assert_eq!(summary.holds[1], 40);
        assert!(summary.holds[2] >= 36, "{:?}", summary.holds);
    }
}
