//! Variation, influence and the two-query independence test.
//!
//! The variation of `f` on `I` is `E_w[Var_z f(w ⊔ z)]` with `w` uniform on
//! the coordinates outside `I` and `z` uniform on `I`. For `{-1,1}`-valued
//! `f` the inner variance is `1 - (E_z f)^2`. The independence test rejects
//! with probability exactly half the variation, so twice the rejection
//! frequency estimates it.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::assignment::{Assignment, VarSet};
use crate::blackbox::BlackBox;
use crate::error::{Error, Result};
use crate::exact::Dyadic;
use crate::gf2poly::{EnumerationLimits, SparsePoly, TruthTable};

/// Exact variation of a tabulated function on the subset `vars`.
pub fn variation_exact(f: &TruthTable, vars: &VarSet) -> Result<Dyadic> {
    let n = f.n();
    if vars.n() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: vars.n() });
    }
    let k = vars.len();
    let mask = vars.words().first().copied().unwrap_or(0);
    let size = f.len();
    // Signed sums S_w = sum_z f(w ⊔ z), keyed by the outside part w.
    let mut sums = vec![0i64; size as usize];
    for x in 0..size {
        let v = if f.get(x) { -1 } else { 1 };
        sums[(x & !mask) as usize] += v;
    }
    let four_k: i128 = 1 << (2 * k);
    let numerator: i128 = (0..size)
        .filter(|w| w & mask == 0)
        .map(|w| {
            let s = sums[w as usize] as i128;
            four_k - s * s
        })
        .sum();
    Ok(Dyadic::new(numerator as u128, (n + k) as u32))
}

/// Exact variation of a polynomial over any `n`, computed on the junta of its
/// relevant variables (irrelevant coordinates never change the variation).
pub fn poly_variation_exact(p: &SparsePoly, vars: &VarSet, limits: &EnumerationLimits) -> Result<Dyadic> {
    ExactJunta::new(p, limits)?.variation(vars)
}

/// A polynomial tabulated on its relevant variables, for repeated exact
/// variation queries on subsets of the ambient space.
#[derive(Clone, Debug)]
pub struct ExactJunta {
    n: usize,
    relevant: Vec<usize>,
    table: TruthTable,
}

impl ExactJunta {
    pub fn new(p: &SparsePoly, limits: &EnumerationLimits) -> Result<Self> {
        let (compressed, relevant) = p.compress();
        let table = compressed.truth_table(limits)?;
        Ok(ExactJunta { n: p.n(), relevant, table })
    }

    /// Every variable of the table is treated as relevant.
    pub fn from_table(table: TruthTable) -> Self {
        ExactJunta { n: table.n(), relevant: (1..=table.n()).collect(), table }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn relevant(&self) -> &[usize] {
        &self.relevant
    }

    pub fn table(&self) -> &TruthTable {
        &self.table
    }

    /// The subset restricted to relevant variables, in compressed indices.
    pub fn project(&self, vars: &VarSet) -> VarSet {
        let mut out = VarSet::empty(self.relevant.len());
        for (i, &v) in self.relevant.iter().enumerate() {
            if vars.contains(v) {
                out.insert(i + 1);
            }
        }
        out
    }

    pub fn variation(&self, vars: &VarSet) -> Result<Dyadic> {
        if vars.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: vars.n() });
        }
        variation_exact(&self.table, &self.project(vars))
    }

    /// Influence of ambient variable `var`; 0 for irrelevant variables.
    pub fn influence(&self, var: usize) -> Result<Dyadic> {
        if var == 0 || var > self.n {
            return Err(Error::IndexOutOfRange { index: var, n: self.n });
        }
        match self.relevant.binary_search(&var) {
            Ok(i) => influence_exact(&self.table, i + 1),
            Err(_) => Ok(Dyadic::ZERO),
        }
    }
}

/// `Pr_x[f(x) != f(x ⊕ e_i)]`, computed by enumeration.
pub fn influence_exact(f: &TruthTable, var: usize) -> Result<Dyadic> {
    let n = f.n();
    if var == 0 || var > n {
        return Err(Error::IndexOutOfRange { index: var, n });
    }
    let bit = 1u64 << (var - 1);
    let flips = (0..f.len()).filter(|&x| f.get(x) != f.get(x ^ bit)).count();
    Ok(Dyadic::new(flips as u128, n as u32))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum TestOutcome {
    Accept,
    Reject,
}

/// Reusable scratch space for running the independence test on one subset.
///
/// Drawing `w` outside `I` and independent `z1, z2` on `I` is the same as
/// drawing `x1` uniformly and re-randomizing the `I` coordinates to get `x2`.
pub struct IndependenceTest<'a> {
    vars: &'a VarSet,
    x1: Assignment,
    x2: Assignment,
}

impl<'a> IndependenceTest<'a> {
    pub fn new(vars: &'a VarSet) -> Self {
        IndependenceTest { vars, x1: Assignment::zeros(vars.n()), x2: Assignment::zeros(vars.n()) }
    }

    /// One run: exactly two queries.
    #[inline]
    pub fn run<R: Rng + ?Sized>(&mut self, f: &(impl BlackBox + ?Sized), rng: &mut R) -> TestOutcome {
        self.x1.randomize(rng);
        self.x2.copy_from(&self.x1);
        self.x2.rerandomize_vars(self.vars, rng);
        if f.query(&self.x1) == f.query(&self.x2) {
            TestOutcome::Accept
        } else {
            TestOutcome::Reject
        }
    }

    /// Number of rejections among `runs` runs.
    pub fn count_rejections<R: Rng + ?Sized>(&mut self, f: &(impl BlackBox + ?Sized), runs: u64, rng: &mut R) -> u64 {
        (0..runs).filter(|_| self.run(f, rng) == TestOutcome::Reject).count() as u64
    }
}

pub fn independence_test_once<R: Rng + ?Sized>(
    f: &(impl BlackBox + ?Sized),
    vars: &VarSet,
    rng: &mut R,
) -> TestOutcome {
    IndependenceTest::new(vars).run(f, rng)
}

/// Sampled variation of one subset: twice the rejection frequency of `M`
/// independence tests. Never clamped.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationEstimate {
    pub value: f64,
    pub rejections: u64,
    pub samples: u64,
}

pub fn variation_estimate<R: Rng + ?Sized>(
    f: &(impl BlackBox + ?Sized),
    vars: &VarSet,
    runs: u64,
    rng: &mut R,
) -> Result<VariationEstimate> {
    if runs == 0 {
        return Err(Error::invalid("M", "at least one independence-test run is required"));
    }
    let rejections = IndependenceTest::new(vars).count_rejections(f, runs, rng);
    Ok(VariationEstimate { value: 2.0 * rejections as f64 / runs as f64, rejections, samples: runs })
}
