use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{count_le_s_log2, ratio_of};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// Constants as in the analysis. Astronomically expensive; useful for
    /// reporting parameter magnitudes.
    Theory,
    /// Small fixed constants that keep the pipeline executable.
    Desk,
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theory" => Ok(Profile::Theory),
            "desk" => Ok(Profile::Desk),
            other => Err(Error::invalid("profile", format!("unknown profile `{other}`"))),
        }
    }
}

impl std::fmt::Display for Profile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Profile::Theory => "theory",
            Profile::Desk => "desk",
        })
    }
}

pub const THEORY_C: f64 = 2000.0;
pub const THEORY_C_PRIME: f64 = 100.0;
pub const THEORY_TAU_DIVISOR: f64 = 600.0;

pub const DESK_TAU: f64 = 0.05;
pub const DESK_DELTA: f64 = 0.03;
pub const DESK_R: u64 = 256;
pub const DESK_ALPHA: f64 = 0.125;

pub const LEARNER_CONFIDENCE: f64 = 0.01;

/// Per-parameter overrides; `None` keeps the profile's value.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamOverrides {
    pub tau: Option<f64>,
    pub delta: Option<f64>,
    pub r: Option<u64>,
    /// Replaces the grid by the single threshold given.
    pub alpha: Option<f64>,
    pub big_m: Option<u64>,
    pub m: Option<u64>,
    pub c_const: Option<f64>,
    pub c_prime: Option<f64>,
}

/// Every constant the tester uses, derived once and echoed into reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TesterParams {
    pub profile: Profile,
    pub s: usize,
    pub epsilon: f64,
    pub tau: f64,
    pub delta: f64,
    pub r: u64,
    pub c_const: f64,
    pub c_prime: f64,
    pub alpha_grid: Vec<f64>,
    /// Independence-test runs per subset.
    pub big_m: u128,
    /// Closeness-check samples.
    pub m: u64,
    pub learner_accuracy: f64,
    pub learner_confidence: f64,
}

fn positive(name: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::invalid(name, format!("{v} must be positive")))
    }
}

fn ceil_to_u128(name: &'static str, v: f64) -> Result<u128> {
    if !v.is_finite() || v > u128::MAX as f64 {
        return Err(Error::invalid(name, format!("{v} does not fit an integer count")));
    }
    Ok((v.ceil() as u128).max(1))
}

/// Number of independence-test runs per subset: `ceil((2/delta^2) ln(200 r))`.
pub fn runs_per_subset(delta: f64, r: u64) -> Result<u128> {
    ceil_to_u128("M", 2.0 / (delta * delta) * (200.0 * r as f64).ln())
}

/// Closeness-check sample size: `ceil((2/eps) ln 12)`.
pub fn closeness_samples(epsilon: f64) -> u64 {
    (2.0 / epsilon * 12f64.ln()).ceil() as u64
}

/// The analysis' largest admissible spacing `tau / (1600 s^3 log2(8 s^3 / tau))`.
pub fn max_delta(s: usize, tau: f64) -> f64 {
    let s3 = (s * s * s) as f64;
    tau / (1600.0 * s3 * (8.0 * s3 / tau).log2())
}

/// The threshold grid `{ tau/(4s^2) + (8l - 4) delta : l = 1..=K }` where `K`
/// is the largest integer with `8 K delta <= tau/(4s^2)`.
pub fn alpha_grid(s: usize, tau: f64, delta: f64) -> Result<Vec<f64>> {
    positive("tau", tau)?;
    positive("delta", delta)?;
    if s == 0 {
        return Err(Error::invalid("s", "must be at least 1"));
    }
    let base = tau / (4.0 * (s * s) as f64);
    let mut k = (base / (8.0 * delta)).floor() as u64;
    while 8.0 * (k + 1) as f64 * delta <= base {
        k += 1;
    }
    while k > 0 && 8.0 * k as f64 * delta > base {
        k -= 1;
    }
    if k == 0 {
        return Err(Error::EmptyGrid { eight_delta: 8.0 * delta, bound: base });
    }
    Ok((1..=k).map(|l| base + (8 * l - 4) as f64 * delta).collect())
}

pub fn derive_params(s: usize, epsilon: f64, profile: Profile, overrides: &ParamOverrides) -> Result<TesterParams> {
    if s == 0 {
        return Err(Error::invalid("s", "must be at least 1"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid("epsilon", format!("{epsilon} is not in (0, 1)")));
    }
    let c_const = positive("C", overrides.c_const.unwrap_or(THEORY_C))?;
    let c_prime = positive("C'", overrides.c_prime.unwrap_or(THEORY_C_PRIME))?;

    let (tau, delta, r, grid) = match profile {
        Profile::Theory => {
            let tau = positive("tau", overrides.tau.unwrap_or(epsilon / THEORY_TAU_DIVISOR))?;
            let delta = positive("delta", overrides.delta.unwrap_or_else(|| max_delta(s, tau)))?;
            let r = match overrides.r {
                Some(r) => r,
                None => {
                    let r = (4.0 * c_const * s as f64 / delta).ceil();
                    if r > u64::MAX as f64 {
                        return Err(Error::invalid("r", format!("{r} overflows")));
                    }
                    r as u64
                }
            };
            let grid = match overrides.alpha {
                Some(a) => vec![a],
                None => alpha_grid(s, tau, delta)?,
            };
            (tau, delta, r, grid)
        }
        Profile::Desk => (
            positive("tau", overrides.tau.unwrap_or(DESK_TAU))?,
            positive("delta", overrides.delta.unwrap_or(DESK_DELTA))?,
            overrides.r.unwrap_or(DESK_R),
            vec![overrides.alpha.unwrap_or(DESK_ALPHA)],
        ),
    };

    let big_m = match overrides.big_m {
        Some(m) => m as u128,
        None => runs_per_subset(delta, r.max(1))?,
    };
    let params = TesterParams {
        profile,
        s,
        epsilon,
        tau,
        delta,
        r,
        c_const,
        c_prime,
        alpha_grid: grid,
        big_m,
        m: overrides.m.unwrap_or_else(|| closeness_samples(epsilon)),
        learner_accuracy: epsilon / 4.0,
        learner_confidence: LEARNER_CONFIDENCE,
    };
    params.validate()?;
    Ok(params)
}

impl TesterParams {
    pub fn validate(&self) -> Result<()> {
        positive("delta", self.delta)?;
        positive("tau", self.tau)?;
        if self.tau >= 1.0 {
            return Err(Error::invalid("tau", format!("{} is not in (0, 1)", self.tau)));
        }
        if self.r == 0 {
            return Err(Error::invalid("r", "must be at least 1"));
        }
        if self.alpha_grid.is_empty() {
            return Err(Error::EmptyGrid { eight_delta: 8.0 * self.delta, bound: self.tau / (4.0 * (self.s * self.s) as f64) });
        }
        if let Some(a) = self.alpha_grid.iter().find(|&&a| a.partial_cmp(&(4.0 * self.delta)) != Some(std::cmp::Ordering::Greater)) {
            return Err(Error::invalid("alpha", format!("{a} must exceed 4*delta = {}", 4.0 * self.delta)));
        }
        if self.big_m == 0 || self.m == 0 {
            return Err(Error::invalid("M/m", "sample counts must be at least 1"));
        }
        Ok(())
    }

    /// Bound on the number of high subsets of a genuine sparse input:
    /// `s log2(8 s^3 / tau)`.
    pub fn high_subset_bound(&self) -> f64 {
        let s = self.s as f64;
        s * (8.0 * s * s * s / self.tau).log2()
    }

    /// Exact test of `count <= s log2(8 s^3 / tau)`.
    pub fn within_high_subset_bound(&self, count: usize) -> bool {
        let s3 = (self.s * self.s * self.s) as f64;
        count_le_s_log2(count, self.s, &(ratio_of(8.0 * s3) / ratio_of(self.tau)))
    }

    /// The per-variable threshold `delta tau / (4 C' s)` separating
    /// "heavy" from "light" coordinates in the partition analysis.
    pub fn light_variable_threshold(&self) -> f64 {
        self.delta * self.tau / (4.0 * self.c_prime * self.s as f64)
    }

    /// Queries spent on variation estimation: `2 M r`.
    pub fn estimation_queries(&self) -> u128 {
        2u128.saturating_mul(self.big_m).saturating_mul(self.r as u128)
    }

    /// `key=value` lines, one per field, readable by [`TesterParams::from_config`].
    pub fn to_config(&self) -> String {
        let mut out = String::new();
        let grid: Vec<String> = self.alpha_grid.iter().map(|a| format!("{a:?}")).collect();
        let _ = writeln!(out, "profile={}", self.profile);
        let _ = writeln!(out, "s={}", self.s);
        let _ = writeln!(out, "epsilon={:?}", self.epsilon);
        let _ = writeln!(out, "tau={:?}", self.tau);
        let _ = writeln!(out, "delta={:?}", self.delta);
        let _ = writeln!(out, "r={}", self.r);
        let _ = writeln!(out, "C={:?}", self.c_const);
        let _ = writeln!(out, "C_prime={:?}", self.c_prime);
        let _ = writeln!(out, "alpha_grid={}", grid.join(","));
        let _ = writeln!(out, "M={}", self.big_m);
        let _ = writeln!(out, "m={}", self.m);
        let _ = writeln!(out, "learner_accuracy={:?}", self.learner_accuracy);
        let _ = writeln!(out, "learner_confidence={:?}", self.learner_confidence);
        out
    }

    /// Parses a complete parameter set written by [`TesterParams::to_config`].
    pub fn from_config(text: &str) -> Result<Self> {
        let mut fields = std::collections::HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse { line: i + 1, message: "expected key=value".into() })?;
            fields.insert(k.trim().to_string(), (i + 1, v.trim().to_string()));
        }
        fn get<T: FromStr>(fields: &std::collections::HashMap<String, (usize, String)>, key: &str) -> Result<T> {
            let (line, v) = fields
                .get(key)
                .ok_or_else(|| Error::Parse { line: 0, message: format!("missing key `{key}`") })?;
            v.parse().map_err(|_| Error::Parse { line: *line, message: format!("bad value for `{key}`: {v}") })
        }
        let grid_text: String = get(&fields, "alpha_grid")?;
        let alpha_grid = grid_text
            .split(',')
            .map(|a| a.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse { line: 0, message: format!("bad alpha_grid: {e}") })?;
        let params = TesterParams {
            profile: get(&fields, "profile")?,
            s: get(&fields, "s")?,
            epsilon: get(&fields, "epsilon")?,
            tau: get(&fields, "tau")?,
            delta: get(&fields, "delta")?,
            r: get(&fields, "r")?,
            c_const: get(&fields, "C")?,
            c_prime: get(&fields, "C_prime")?,
            alpha_grid,
            big_m: get(&fields, "M")?,
            m: get(&fields, "m")?,
            learner_accuracy: get(&fields, "learner_accuracy")?,
            learner_confidence: get(&fields, "learner_confidence")?,
        };
        params.validate()?;
        Ok(params)
    }
}
