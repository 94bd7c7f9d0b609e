//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;
use sparsepoly_cli::audit::run_audit;
use sparsepoly_cli::experiment::{run_completeness_experiment, run_query_scaling, run_soundness_experiment, trial_seed, RunOptions};
use sparsepoly_cli::families::{canonical, Family};
use sparsepoly_cli::verify::{run_suite, Suite};
use sparsepoly_core::blackbox::make_poly_oracle;
use sparsepoly_core::partition::{derive_params, ParamOverrides};
use sparsepoly_core::seed::stream;
use sparsepoly_core::tester::{shiv, TesterConfig};
use sparsepoly_core::variation::ExactJunta;
use sparsepoly_core::{test_sparse_poly, EnumerationLimits, Monomial, Phase, Profile, SparsePoly, TesterParams, VarSet};

const SEED: u64 = 20240601;

struct Line {
    id: usize,
    name: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn minutes(m: u64) -> Duration {
    Duration::from_secs(60 * m)
}

/// Runs `body`, then requires it to finish within `limit`.
fn criterion(
    id: usize,
    name: &'static str,
    limit: Option<Duration>,
    body: impl FnOnce() -> (bool, String),
) -> Line {
    let start = Instant::now();
    let (mut pass, mut detail) = body();
    let elapsed = start.elapsed();
    if let Some(limit) = limit {
        if elapsed > limit {
            pass = false;
            detail.push_str(&format!("; runtime {elapsed:.1?} over {limit:?}"));
        }
    }
    let line = Line { id, name, pass, detail, elapsed };
    println!(
        "{} [{}] {}: {} ({:.1?})",
        if line.pass { "PASS" } else { "FAIL" },
        line.id,
        line.name,
        line.detail,
        line.elapsed
    );
    line
}

fn suite(suite: Suite, trials: u64) -> (bool, String) {
    match run_suite(suite, trials, SEED) {
        Ok(r) => {
            let mut detail = format!("{} checks, {} failures", r.checks, r.failures.len());
            if let Some(first) = r.failures.first() {
                detail.push_str(&format!("; first: {first}"));
            }
            (r.passed(), detail)
        }
        Err(e) => (false, format!("error: {e}")),
    }
}

fn desk(s: usize, eps: f64) -> TesterParams {
    derive_params(s, eps, Profile::Desk, &ParamOverrides::default()).expect("desk params")
}

fn completeness() -> (bool, String) {
    let params = desk(3, 0.1);
    let family = Family::canonical(64);
    let trials = 200;
    let sampled = match run_completeness_experiment(&family, &params, trials, SEED, &RunOptions::default()) {
        Ok(r) => r,
        Err(e) => return (false, format!("error: {e}")),
    };

    // Same seeds in exact-backend mode: same partition and threshold, exact
    // variations. The sampled high set must equal {j : Vr(S_j) >= alpha}.
    let limits = EnumerationLimits::default();
    let p = canonical(64).expect("canonical");
    let junta = ExactJunta::new(&p, &limits).expect("junta");
    let f = make_poly_oracle(p);
    let matches = sampled
        .verdicts
        .par_iter()
        .map(|d| {
            let v = test_sparse_poly(&f, &params, &TesterConfig::exact(junta.clone()), trial_seed(SEED, d.trial))
                .expect("exact run");
            let exact_high: Vec<u64> =
                v.estimates.iter().enumerate().filter(|(_, &e)| e >= v.alpha).map(|(j, _)| j as u64).collect();
            (exact_high == d.high) as u64
        })
        .sum::<u64>();
    let match_rate = matches as f64 / sampled.trials as f64;
    let pass = sampled.trials == trials && sampled.accept_rate >= 0.90 && match_rate >= 0.95;
    (
        pass,
        format!(
            "accept rate {:.3} (>= 0.90), classification matches exact in {matches}/{} (>= 0.95), rejections {:?}",
            sampled.accept_rate, sampled.trials, sampled.rejected
        ),
    )
}

fn soundness() -> (bool, String) {
    let family = Family::far_table(8, 1, 0.25);
    match run_soundness_experiment(&family, &desk(1, 0.25), 200, SEED, &RunOptions::default()) {
        Ok(r) => (
            r.trials == 200 && r.reject_rate >= 2.0 / 3.0,
            format!(
                "reject rate {:.3} (>= 0.667) over {} certified tables ({} draws excluded), min certificate {:.3}",
                r.reject_rate,
                r.trials,
                r.excluded,
                r.verdicts.iter().filter_map(|d| d.certificate).fold(f64::INFINITY, f64::min)
            ),
        ),
        Err(e) => (false, format!("error: {e}")),
    }
}

fn query_scaling() -> (bool, String) {
    let params = desk(3, 0.1);
    let r = match run_query_scaling(&[64, 512], &params, 100, SEED, &RunOptions::default()) {
        Ok(r) => r,
        Err(e) => return (false, format!("error: {e}")),
    };
    // estimation and closeness do not depend on the input at all
    let estimation = 2 * params.big_m as u64 * params.r;
    let closeness = 2 * params.m;
    let fixed = r.reports.iter().flat_map(|rep| &rep.verdicts).all(|d| {
        d.ledger.get(Phase::Estimation) == estimation && d.ledger.get(Phase::Closeness) == closeness
    });
    let means: Vec<String> = r.points.iter().map(|p| format!("n={}: {:.0}", p.n, p.mean_queries)).collect();
    (
        r.max_relative_spread <= 0.10 && fixed,
        format!(
            "means {} differ by {:.2}% (<= 10%); estimation = {estimation} and closeness = {closeness} in every trial: {fixed}",
            means.join(", "),
            100.0 * r.max_relative_spread
        ),
    )
}

fn shiv_contract() -> (bool, String) {
    let n = 20;
    let f = make_poly_oracle(SparsePoly::new(n, [Monomial::new([1])]).expect("dictator"));
    let vars = VarSet::from_vars(n, [1, 3, 7, 12, 20]).expect("vars");
    let (alpha, delta) = (0.125, 0.1);
    let results: Vec<Option<bool>> = (0..500u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream(SEED, &[0x5417, t]);
            let b: bool = rng.random();
            shiv(&f, &vars, alpha, b, delta, &mut rng).expect("valid input").map(|w| w.get(1) == b)
        })
        .collect();
    let fails = results.iter().filter(|r| r.is_none()).count();
    let correct = results.iter().filter(|r| **r == Some(true)).count();
    let done = results.len() - fails;
    let correct_rate = if done == 0 { 0.0 } else { correct as f64 / done as f64 };
    let fail_rate = fails as f64 / results.len() as f64;
    (
        correct_rate >= 0.90 && fail_rate <= 0.10,
        format!("correct in {correct}/{done} completed runs (>= 0.90), fail rate {fail_rate:.3} (<= 0.10)"),
    )
}

fn audit() -> (bool, String) {
    let o = ParamOverrides { r: Some(6), delta: Some(0.03), alpha: Some(0.125), ..Default::default() };
    let params = match derive_params(3, 0.1, Profile::Desk, &o) {
        Ok(p) => p,
        Err(e) => return (false, format!("error: {e}")),
    };
    let p = canonical(12).expect("canonical");
    match run_audit(&p, &params, 0.125, 200, SEED, &EnumerationLimits::default()) {
        Ok(s) => {
            let asserted = [1, 2, 3, 5, 6];
            let pass = asserted.iter().all(|&k| s.rate(k) >= 0.80);
            let rates: Vec<String> = (1..=6).map(|k| format!("{k}: {:.3}", s.rate(k))).collect();
            (
                pass,
                format!(
                    "statement rates {} (1, 2, 3, 5, 6 need >= 0.80); all six held in {}/{}",
                    rates.join(", "),
                    s.all_hold,
                    s.trials
                ),
            )
        }
        Err(e) => (false, format!("error: {e}")),
    }
}

fn main() {
    let lines = [
        criterion(1, "independence test detection probability", Some(minutes(1)), || suite(Suite::Detection, 50)),
        criterion(2, "variation structure bounds", Some(minutes(5)), || suite(Suite::Structure, 200)),
        criterion(3, "zero fraction of sparse polynomials", Some(minutes(1)), || suite(Suite::Kl, 200)),
        criterion(4, "Mobius round trip", Some(minutes(1)), || suite(Suite::Mobius, 1000)),
        criterion(5, "completeness on the canonical family", Some(minutes(30)), completeness),
        criterion(6, "soundness on certified far tables", Some(minutes(30)), soundness),
        criterion(7, "query count independent of n", None, query_scaling),
        criterion(8, "SHIV contract", None, shiv_contract),
        criterion(9, "partition structure audit", None, audit),
    ];
    let failed: Vec<usize> = lines.iter().filter(|l| !l.pass).map(|l| l.id).collect();
    println!("{}/{} criteria passed", lines.len() - failed.len(), lines.len());
    if !failed.is_empty() {
        println!("failed: {failed:?}");
        std::process::exit(1);
    }
}
