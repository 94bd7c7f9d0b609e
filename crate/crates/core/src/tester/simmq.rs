//! Membership queries to the junta on the high subsets, answered through the
//! original oracle.

use rand::Rng;

use super::shiv::shiv;
use crate::assignment::{Assignment, VarSet};
use crate::blackbox::{BlackBox, Phase, QueryLedger, Sign};
use crate::error::{Error, Result};
use crate::learner::{MembershipOracle, MqFailure};

/// Sets the high-variation variable of `subsets[j]` to `z[j]` with [`shiv`]
/// (confidence `delta / |H|` each), zeroes every other coordinate and
/// queries `f` once. Returns `None` if any [`shiv`] call fails; `f` is then
/// not queried at the assembled point.
pub fn simmq<R: Rng + ?Sized>(
    f: &(impl BlackBox + ?Sized),
    subsets: &[VarSet],
    alpha: f64,
    z: &[bool],
    delta: f64,
    rng: &mut R,
) -> Result<Option<Sign>> {
    if z.len() != subsets.len() {
        return Err(Error::DimensionMismatch { expected: subsets.len(), actual: z.len() });
    }
    let mut x = Assignment::zeros(f.n());
    if !subsets.is_empty() {
        let per_call = delta / subsets.len() as f64;
        for (set, &b) in subsets.iter().zip(z) {
            match shiv(f, set, alpha, b, per_call, rng)? {
                Some(w) => x.overwrite_from(&w, set),
                None => return Ok(None),
            }
        }
    }
    Ok(Some(f.query(&x)))
}

/// [`MembershipOracle`] over `{0,1}^{|H|}` backed by [`simmq`]. Queries are
/// charged to the ledger: pinning work to [`Phase::Shiv`] and the final
/// evaluation to [`Phase::Membership`] or [`Phase::Equivalence`], depending
/// on what the learner is doing.
pub struct SimMq<'a, B: ?Sized, R> {
    f: &'a B,
    subsets: &'a [VarSet],
    alpha: f64,
    delta: f64,
    rng: R,
    ledger: &'a mut QueryLedger,
    phase: Phase,
    failures: u64,
}

impl<'a, B: BlackBox + ?Sized, R: Rng> SimMq<'a, B, R> {
    pub fn new(f: &'a B, subsets: &'a [VarSet], alpha: f64, delta: f64, rng: R, ledger: &'a mut QueryLedger) -> Self {
        SimMq { f, subsets, alpha, delta, rng, ledger, phase: Phase::Membership, failures: 0 }
    }

    pub fn failures(&self) -> u64 {
        self.failures
    }
}

impl<B: BlackBox + ?Sized, R: Rng> MembershipOracle for SimMq<'_, B, R> {
    fn arity(&self) -> usize {
        self.subsets.len()
    }

    fn query(&mut self, point: u64) -> Result<bool, MqFailure> {
        let z: Vec<bool> = (0..self.subsets.len()).map(|j| point >> j & 1 == 1).collect();
        let before = self.f.query_count();
        let answer = simmq(self.f, self.subsets, self.alpha, &z, self.delta, &mut self.rng)
            .expect("subsets and parameters validated by the tester");
        let spent = self.f.query_count() - before;
        match answer {
            Some(sign) => {
                self.ledger.record(Phase::Shiv, spent - 1);
                self.ledger.record(self.phase, 1);
                Ok(sign.to_bit())
            }
            None => {
                self.ledger.record(Phase::Shiv, spent);
                self.failures += 1;
                Err(MqFailure)
            }
        }
    }

    fn entering_core(&mut self) {
        self.phase = Phase::Membership;
    }

    fn entering_equivalence(&mut self) {
        self.phase = Phase::Equivalence;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blackbox::make_poly_oracle;
    use crate::gf2poly::{Monomial, SparsePoly};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn set(n: usize, vars: &[usize]) -> VarSet {
        VarSet::from_vars(n, vars.iter().copied()).unwrap()
    }

    #[test]
    fn empty_high_set_queries_origin_once() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let f = make_poly_oracle(SparsePoly::one(6));
        assert_eq!(simmq(&f, &[], 0.1, &[], 0.1, &mut rng).unwrap(), Some(Sign::Minus));
        assert_eq!(f.query_count(), 1);
        let g = make_poly_oracle(SparsePoly::new(6, [Monomial::new([2])]).unwrap());
        assert_eq!(simmq(&g, &[], 0.1, &[], 0.1, &mut rng).unwrap(), Some(Sign::Plus));
    }

    #[test]
    fn and_of_two_well_structured_subsets() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = make_poly_oracle(SparsePoly::new(8, [Monomial::new([1, 2])]).unwrap());
        let subsets = [set(8, &[1, 3, 4]), set(8, &[2, 5])];
        let hits = (0..500)
            .filter(|_| simmq(&f, &subsets, 0.5, &[true, true], 0.05, &mut rng).unwrap() == Some(Sign::Minus))
            .count();
        assert!(hits >= 450, "{hits}");
    }

    #[test]
    fn failure_skips_final_query() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        // constant function: every shiv call fails
        let f = make_poly_oracle(SparsePoly::zero(4));
        let subsets = [set(4, &[1, 2])];
        let mut ledger = QueryLedger::default();
        let mut mq = SimMq::new(&f, &subsets, 0.5, 0.1, &mut rng, &mut ledger);
        assert_eq!(mq.query(1), Err(MqFailure));
        assert_eq!(mq.failures(), 1);
        assert_eq!(ledger.membership, 0);
        assert_eq!(ledger.shiv, f.query_count());
    }

    #[test]
    fn ledger_split_by_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = make_poly_oracle(SparsePoly::new(4, [Monomial::new([1])]).unwrap());
        let subsets = [set(4, &[1])];
        let mut ledger = QueryLedger::default();
        let mut mq = SimMq::new(&f, &subsets, 1.0, 0.01, &mut rng, &mut ledger);
        assert_eq!(mq.query(1), Ok(true));
        mq.entering_equivalence();
        assert_eq!(mq.query(0), Ok(false));
        assert_eq!((ledger.membership, ledger.equivalence), (1, 1));
        assert_eq!(ledger.total(), f.query_count());
        assert!(simmq(&f, &subsets, 1.0, &[true, false], 0.1, &mut rng).is_err());
    }
}
