//! Random partitions of the coordinates, the threshold grid, tester
//! parameters and the high/low classification of subsets.

mod audit;
mod params;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::assignment::VarSet;
use crate::error::{Error, Result};

pub use audit::{structure_audit, AuditReport};
pub use params::{alpha_grid, derive_params, ParamOverrides, Profile, TesterParams, LEARNER_CONFIDENCE};

/// Largest number of subsets that is ever materialized.
pub const MAX_MATERIALIZED_SUBSETS: u64 = 1 << 22;

/// Disjoint subsets `I_0, ..., I_{r-1}` covering `[n]`. Subset ids are
/// 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    n: usize,
    r: u64,
    /// `assignment[i - 1]` is the subset holding variable `i`.
    assignment: Vec<u64>,
}

impl Partition {
    pub fn from_assignment(r: u64, assignment: Vec<u64>) -> Result<Self> {
        if r == 0 {
            return Err(Error::invalid("r", "a partition needs at least one subset"));
        }
        if let Some(&bad) = assignment.iter().find(|&&j| j >= r) {
            return Err(Error::invalid("partition", format!("subset id {bad} outside 0..{r}")));
        }
        Ok(Partition { n: assignment.len(), r, assignment })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn subset_of(&self, var: usize) -> u64 {
        self.assignment[var - 1]
    }

    pub fn assignment(&self) -> &[u64] {
        &self.assignment
    }

    pub fn subset(&self, j: u64) -> VarSet {
        let mut s = VarSet::empty(self.n);
        for (i, &id) in self.assignment.iter().enumerate() {
            if id == j {
                s.insert(i + 1);
            }
        }
        s
    }

    /// All `r` subsets, including empty ones.
    pub fn subsets(&self) -> Result<Vec<VarSet>> {
        if self.r > MAX_MATERIALIZED_SUBSETS {
            return Err(Error::Infeasible(format!("r = {} subsets cannot be materialized", self.r)));
        }
        let mut out = vec![VarSet::empty(self.n); self.r as usize];
        for (i, &id) in self.assignment.iter().enumerate() {
            out[id as usize].insert(i + 1);
        }
        Ok(out)
    }

    /// Union of the given subsets.
    pub fn union_of(&self, ids: &[u64]) -> VarSet {
        let mut s = VarSet::empty(self.n);
        for (i, id) in self.assignment.iter().enumerate() {
            if ids.contains(id) {
                s.insert(i + 1);
            }
        }
        s
    }
}

/// Places each variable independently and uniformly in one of `r` subsets.
pub fn random_partition<R: Rng + ?Sized>(n: usize, r: u64, rng: &mut R) -> Result<Partition> {
    if r == 0 {
        return Err(Error::invalid("r", "a partition needs at least one subset"));
    }
    let assignment = (0..n).map(|_| rng.random_range(0..r)).collect();
    Ok(Partition { n, r, assignment })
}

/// Split of the subsets into high (estimate strictly above `alpha + 2*delta`)
/// and low (everything else).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub threshold: f64,
    pub high: Vec<u64>,
    pub low: Vec<u64>,
}

impl Classification {
    pub fn is_high(&self, j: u64) -> bool {
        self.high.binary_search(&j).is_ok()
    }
}

pub fn classify(estimates: &[f64], alpha: f64, delta: f64) -> Classification {
    let threshold = alpha + 2.0 * delta;
    let (mut high, mut low) = (Vec::new(), Vec::new());
    for (j, &v) in estimates.iter().enumerate() {
        if v > threshold {
            high.push(j as u64);
        } else {
            low.push(j as u64);
        }
    }
    Classification { threshold, high, low }
}
