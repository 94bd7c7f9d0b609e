//! Exact check of the six structural statements about a sparse polynomial,
//! a random partition and a threshold `alpha`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::{Partition, TesterParams};
use crate::assignment::VarSet;
use crate::error::{Error, Result};
use crate::exact::{ratio_of, Dyadic};
use crate::gf2poly::{distance, EnumerationLimits, SparsePoly};
use crate::variation::ExactJunta;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    /// `statements[k]` is statement `k + 1`:
    /// 1. no variable has variation in `[alpha - 4Δ, alpha + 4Δ]`;
    /// 2. no subset has variation in `[alpha - 3Δ, alpha + 4Δ]`;
    /// 3. every high subset is `(alpha, Δ)`-well structured;
    /// 4. the number of high subsets is at most `s log2(8 s^3 / tau)`;
    /// 5. after zeroing the low subsets, each high subset keeps at most one
    ///    relevant variable;
    /// 6. the zeroed polynomial is `tau`-close to the original.
    pub statements: [bool; 6],
    pub alpha: f64,
    /// Exact ids of subsets with variation `>= alpha`.
    pub high: Vec<u64>,
    /// Variation of each relevant variable.
    pub variable_variations: BTreeMap<usize, f64>,
    /// Variation of each subset holding a relevant variable; all others are 0.
    pub subset_variations: BTreeMap<u64, f64>,
    /// Exact distance between the polynomial and its zero-restriction.
    pub restriction_distance: Dyadic,
    pub restricted: SparsePoly,
}

impl AuditReport {
    pub fn holds(&self, statement: usize) -> bool {
        self.statements[statement - 1]
    }

    pub fn all_hold(&self) -> bool {
        self.statements.iter().all(|&b| b)
    }
}

fn in_band(v: &Dyadic, lo: &BigRational, hi: &BigRational) -> bool {
    let r = v.to_ratio();
    &r >= lo && &r <= hi
}

pub fn structure_audit(
    p: &SparsePoly,
    params: &TesterParams,
    alpha: f64,
    partition: &Partition,
    limits: &EnumerationLimits,
) -> Result<AuditReport> {
    if partition.n() != p.n() {
        return Err(Error::DimensionMismatch { expected: p.n(), actual: partition.n() });
    }
    let junta = ExactJunta::new(p, limits)?;
    let n = p.n();
    let (a, d) = (ratio_of(alpha), ratio_of(params.delta));
    let four = BigRational::from_integer(4.into());
    let three = BigRational::from_integer(3.into());

    // Statement 1. Irrelevant variables have variation 0.
    let mut var_vr = BTreeMap::new();
    for &v in junta.relevant() {
        var_vr.insert(v, junta.influence(v)?);
    }
    let (lo1, hi1) = (&a - &four * &d, &a + &four * &d);
    let has_irrelevant = junta.relevant().len() < n;
    let s1 = var_vr.values().all(|vr| !in_band(vr, &lo1, &hi1))
        && !(has_irrelevant && in_band(&Dyadic::ZERO, &lo1, &hi1));

    // Statement 2, over subsets that hold a relevant variable; the rest have
    // variation 0.
    let mut touched: BTreeMap<u64, VarSet> = BTreeMap::new();
    for &v in junta.relevant() {
        touched.insert(partition.subset_of(v), partition.subset(partition.subset_of(v)));
    }
    let mut subset_vr = BTreeMap::new();
    for (&j, set) in &touched {
        subset_vr.insert(j, junta.variation(set)?);
    }
    let (lo2, hi2) = (&a - &three * &d, &a + &four * &d);
    let untouched_exist = (touched.len() as u64) < partition.r();
    let s2 = subset_vr.values().all(|vr| !in_band(vr, &lo2, &hi2))
        && !(untouched_exist && in_band(&Dyadic::ZERO, &lo2, &hi2));

    // High subsets: exact variation >= alpha. Untouched subsets are low
    // because alpha > 0.
    let high: Vec<u64> = subset_vr.iter().filter(|(_, vr)| vr.to_ratio() >= a).map(|(&j, _)| j).collect();

    // Statement 3.
    let mut s3 = true;
    for &j in &high {
        let set = &touched[&j];
        let mut well_structured = false;
        for v in set.iter().filter(|v| var_vr.contains_key(v)) {
            if var_vr[&v].to_ratio() < a {
                continue;
            }
            let mut rest = set.clone();
            rest.remove(v);
            if junta.variation(&rest)?.to_ratio() <= d {
                well_structured = true;
                break;
            }
        }
        s3 &= well_structured;
    }

    // Statement 4.
    let s4 = params.within_high_subset_bound(high.len());

    // Statements 5 and 6 on the restriction zeroing every low subset.
    let mut low_vars = VarSet::full(n);
    for &j in &high {
        let set = &touched[&j];
        for v in set.iter() {
            low_vars.remove(v);
        }
    }
    let restricted = p.zero_out(&low_vars);
    let survivors = restricted.relevant_vars();
    let s5 = high.iter().all(|j| touched[j].intersection(&survivors).len() <= 1);

    let relevant = junta.relevant();
    let map = |v: usize| relevant.binary_search(&v).ok().map(|i| i + 1);
    let compressed = p.relabel(relevant.len(), map)?;
    let compressed_restricted = restricted.relabel(relevant.len(), map)?;
    let restriction_distance = distance(&compressed, &compressed_restricted, limits)?;
    let s6 = restriction_distance.to_ratio() <= ratio_of(params.tau);

    Ok(AuditReport {
        statements: [s1, s2, s3, s4, s5, s6],
        alpha,
        high,
        variable_variations: var_vr.into_iter().map(|(v, d)| (v, d.to_f64())).collect(),
        subset_variations: subset_vr.into_iter().map(|(j, d)| (j, d.to_f64())).collect(),
        restriction_distance,
        restricted,
    })
}
