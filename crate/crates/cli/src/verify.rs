//! Exhaustive checks of the structural facts the tester relies on. Every
//! comparison is exact: probabilities are counted, never estimated.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use rand::Rng;
use serde::{Deserialize, Serialize};
use sparsepoly_core::exact::{count_le_s_log2, degree_gt_log2};
use sparsepoly_core::gf2poly::{distance, monomial_universe, random_sparse, zero_fraction};
use sparsepoly_core::seed::stream;
use sparsepoly_core::variation::{variation_exact, ExactJunta};
use sparsepoly_core::{Dyadic, EnumerationLimits, Result, SparsePoly, TruthTable, VarSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// Detection probability of the independence test against the variation.
    Detection,
    /// Monotonicity and sub-additivity of variation.
    Subadditivity,
    /// Influence sum, high-influence count, low-influence degree and
    /// closeness after zeroing low-influence variables.
    Structure,
    /// Zero fraction of sparse polynomials without a constant term.
    Kl,
    /// Interpolation round trip.
    Mobius,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Detection, Suite::Subadditivity, Suite::Structure, Suite::Kl, Suite::Mobius];

    fn name(self) -> &'static str {
        match self {
            Suite::Detection => "detection",
            Suite::Subadditivity => "subadditivity",
            Suite::Structure => "structure",
            Suite::Kl => "kl",
            Suite::Mobius => "mobius",
        }
    }

    pub fn default_trials(self) -> u64 {
        match self {
            Suite::Detection => 50,
            Suite::Subadditivity => 200,
            Suite::Structure => 200,
            Suite::Kl => 200,
            Suite::Mobius => 1000,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub trials: u64,
    pub checks: u64,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(suite: Suite, seed: u64, trials: u64) -> Self {
        SuiteReport { suite, seed, trials, checks: 0, failures: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

pub fn run_suite(suite: Suite, trials: u64, seed: u64) -> Result<SuiteReport> {
    match suite {
        Suite::Detection => detection(trials, seed),
        Suite::Subadditivity => subadditivity(trials, seed),
        Suite::Structure => structure(trials, seed),
        Suite::Kl => kl(trials, seed),
        Suite::Mobius => mobius(trials, seed),
    }
}

fn limits() -> EnumerationLimits {
    EnumerationLimits::default()
}

fn random_subset<R: Rng + ?Sized>(n: usize, rng: &mut R) -> VarSet {
    VarSet::from_vars(n, (1..=n).filter(|_| rng.random())).expect("in range")
}

/// `Pr[f(w ⊔ z1) != f(w ⊔ z2)]` by enumerating every triple.
pub fn detection_probability(t: &TruthTable, vars: &VarSet) -> Dyadic {
    let n = t.n();
    let mask = vars.words().first().copied().unwrap_or(0);
    let inside: Vec<u64> = (0..1u64 << n).filter(|z| z & !mask == 0).collect();
    let mut disagreements: u128 = 0;
    for w in (0..1u64 << n).filter(|w| w & mask == 0) {
        for &z1 in &inside {
            let a = t.get(w | z1);
            disagreements += inside.iter().filter(|&&z2| t.get(w | z2) != a).count() as u128;
        }
    }
    Dyadic::new(disagreements, (n + vars.len()) as u32)
}

/// 3-sparse polynomials on up to 10 variables, 30 subsets each.
fn detection(trials: u64, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Detection, seed, trials);
    let mut rng = stream(seed, &[0xD1]);
    for trial in 0..trials {
        let n = rng.random_range(3..=10);
        let p = random_sparse(n, 3, n.min(4), &mut rng)?;
        let t = p.truth_table(&limits())?;
        for _ in 0..30 {
            let vars = random_subset(n, &mut rng);
            let counted = detection_probability(&t, &vars);
            let half = variation_exact(&t, &vars)?.half();
            report.check(counted == half, || format!("trial {trial}: {p} on {vars:?}: {counted} != {half}"));
        }
    }
    Ok(report)
}

fn subadditivity(trials: u64, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Subadditivity, seed, trials);
    let mut rng = stream(seed, &[0xD2]);
    for trial in 0..trials {
        let n = rng.random_range(2..=12);
        let s = (rng.random_range(1..=5u128)).min(monomial_universe(n, n.min(5))) as usize;
        let p = random_sparse(n, s, n.min(5), &mut rng)?;
        let t = p.truth_table(&limits())?;
        let (a, b) = (random_subset(n, &mut rng), random_subset(n, &mut rng));
        let mut union = a.clone();
        union.union_with(&b);
        let (va, vb, vu) = (variation_exact(&t, &a)?, variation_exact(&t, &b)?, variation_exact(&t, &union)?);
        report.check(va <= vu, || format!("trial {trial}: {p}: monotonicity {va} > {vu}"));
        report.check(vu <= va + vb, || format!("trial {trial}: {p}: sub-additivity {vu} > {va} + {vb}"));
    }
    Ok(report)
}

fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// Checks the four structural facts on one polynomial at one `tau`.
pub fn structure_checks(p: &SparsePoly, s: usize, tau: &BigRational, report: &mut SuiteReport) -> Result<()> {
    let n = p.n();
    let junta = ExactJunta::new(p, &limits())?;
    let variations: Vec<(usize, Dyadic)> =
        junta.relevant().iter().map(|&v| junta.influence(v).map(|d| (v, d))).collect::<Result<_>>()?;
    let s_big = rational(s as i64, 1);

    // Influence sum at most s.
    let total: Dyadic = variations.iter().map(|(_, d)| *d).sum();
    report.check(total.cmp_ratio(&s_big).is_le(), || format!("{p}: influence sum {total} > {s}"));

    // For every threshold d, at most s log2(2s/d) variables have variation >= d.
    // The tightest thresholds are the variation values themselves.
    for (_, d) in &variations {
        let count = variations.iter().filter(|(_, e)| e >= d).count();
        let x = &(&s_big * rational(2, 1)) / d.to_ratio();
        report.check(count_le_s_log2(count, s, &x), || format!("{p}: {count} variables with variation >= {d}"));
    }

    // Variables below tau/(s^2 + s) only occur in monomials of degree > log2(s/tau).
    let low5 = tau / rational((s * s + s) as i64, 1);
    let log_arg = &s_big / tau;
    for (v, d) in &variations {
        if d.cmp_ratio(&low5).is_lt() {
            for m in p.monomials().filter(|m| m.contains(*v)) {
                report.check(degree_gt_log2(m.degree(), &log_arg), || {
                    format!("{p}: x{v} has variation {d} but occurs in the short monomial {m}")
                });
            }
        }
    }

    // Zeroing variables below tau/(2 s^2) moves p by at most tau.
    let low6 = tau / rational((2 * s * s) as i64, 1);
    let mut zeroed = VarSet::empty(n);
    for (v, d) in &variations {
        if d.cmp_ratio(&low6).is_lt() {
            zeroed.insert(*v);
        }
    }
    let compressed_map = |v: usize| junta.relevant().binary_search(&v).ok().map(|i| i + 1);
    let k = junta.relevant().len();
    let before = p.relabel(k, compressed_map)?;
    let after = p.zero_out(&zeroed).relabel(k, compressed_map)?;
    let dist = distance(&before, &after, &limits())?;
    report.check(dist.cmp_ratio(tau).is_le(), || format!("{p}: zeroing {zeroed:?} moves it by {dist}"));
    Ok(())
}

fn structure(trials: u64, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Structure, seed, trials);
    let mut rng = stream(seed, &[0xD3]);
    let taus = [rational(3, 10), rational(1, 2)];
    for trial in 0..trials {
        let n = rng.random_range(1..=14);
        let s = rng.random_range(1..=5usize);
        let max_degree = rng.random_range(1..=n.min(8));
        let s_draw = (s as u128).min(monomial_universe(n, max_degree)) as usize;
        let p = random_sparse(n, s_draw, max_degree, &mut rng)?;
        structure_checks(&p, s, &taus[trial as usize % 2], &mut report)?;
    }
    Ok(report)
}

fn kl(trials: u64, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Kl, seed, trials);
    let mut rng = stream(seed, &[0xD4]);
    for _ in 0..trials {
        let n = rng.random_range(1..=14);
        let max_degree = rng.random_range(1..=n);
        let universe = monomial_universe(n, max_degree);
        let s = rng.random_range(1..=5usize).min(universe as usize);
        let p = random_sparse(n, s, max_degree, &mut rng)?;
        let zeros = zero_fraction(&p, &limits())?;
        let count = zeros.numerator_at(n as u32).expect("denominator 2^n");
        report.check(count * (p.sparsity() as u128 + 1) >= 1u128 << n, || {
            format!("{p}: zero fraction {zeros} below 1/{}", p.sparsity() + 1)
        });
    }
    Ok(report)
}

/// Every table on 4 variables, then `trials` random tables on 10.
fn mobius(trials: u64, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Mobius, seed, trials);
    let round_trip = |t: &TruthTable, report: &mut SuiteReport| {
        let p = t.mobius_interpolate();
        let ok = (0..t.len()).all(|x| p.eval_index(x) == t.get(x));
        report.check(ok, || format!("table {:?} does not round trip", t.words()));
    };
    for bits in 0..=u16::MAX {
        let t = TruthTable::from_fn(4, |x| bits >> x & 1 == 1)?;
        round_trip(&t, &mut report);
    }
    let mut rng = stream(seed, &[0xD5]);
    for _ in 0..trials {
        let t = TruthTable::from_fn(10, |_| rng.random())?;
        round_trip(&t, &mut report);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use sparsepoly_core::Monomial;

    #[test]
    fn detection_of_and() {
        let p = SparsePoly::new(2, [Monomial::new([1, 2])]).unwrap();
        let t = p.truth_table(&limits()).unwrap();
        // x1 x2 on I = {1}: disagreement only when x2 = 1, then with prob 1/2
        assert_eq!(detection_probability(&t, &VarSet::from_vars(2, [1]).unwrap()), Dyadic::new(1, 2));
    }

    #[test]
    fn suites_pass_quickly() {
        for suite in Suite::ALL {
            let r = run_suite(suite, 5, 1).unwrap();
            assert!(r.passed(), "{suite}: {:?}", r.failures);
            assert!(r.checks > 0);
        }
    }

    #[test]
    fn structure_flags_a_violation() {
        // x1 + x2 + x3 is 3-sparse; checked as if it were 1-sparse its
        // influence sum of 3 must be flagged
        let p = SparsePoly::new(3, [Monomial::new([1]), Monomial::new([2]), Monomial::new([3])]).unwrap();
        let mut report = SuiteReport::new(Suite::Structure, 0, 1);
        structure_checks(&p, 1, &rational(1, 2), &mut report).unwrap();
        assert!(!report.passed());
    }

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
        }
    }
}
