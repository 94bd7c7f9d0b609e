//! Query-counted black-box oracles over `{0,1}^n -> {-1,1}`.
//!
//! Polynomials and tables produce bits; the map `b -> (-1)^b` is applied in
//! this module only, when an oracle is constructed.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::assignment::{Assignment, VarSet};
use crate::error::{Error, Result};
use crate::gf2poly::{SparsePoly, TruthTable};
use crate::seed::splitmix64;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// `(-1)^bit`.
    #[inline]
    pub fn from_bit(bit: bool) -> Sign {
        if bit {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    #[inline]
    pub fn to_bit(self) -> bool {
        self == Sign::Minus
    }

    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        Sign::from_bit(!self.to_bit())
    }
}

/// A function `f : {0,1}^n -> {-1,1}` that counts its evaluations.
///
/// Implementations must be functions (the same point always gives the same
/// answer) and must increment `query_count` by exactly one per `query`.
pub trait BlackBox: Send + Sync {
    fn n(&self) -> usize;

    /// Panics if `x.n() != self.n()`.
    fn query(&self, x: &Assignment) -> Sign;

    fn query_count(&self) -> u64;
}

impl<B: BlackBox + ?Sized> BlackBox for &B {
    fn n(&self) -> usize {
        (**self).n()
    }

    fn query(&self, x: &Assignment) -> Sign {
        (**self).query(x)
    }

    fn query_count(&self) -> u64 {
        (**self).query_count()
    }
}

impl<B: BlackBox + ?Sized> BlackBox for Arc<B> {
    fn n(&self) -> usize {
        (**self).n()
    }

    fn query(&self, x: &Assignment) -> Sign {
        (**self).query(x)
    }

    fn query_count(&self) -> u64 {
        (**self).query_count()
    }
}

impl<B: BlackBox + ?Sized> BlackBox for Box<B> {
    fn n(&self) -> usize {
        (**self).n()
    }

    fn query(&self, x: &Assignment) -> Sign {
        (**self).query(x)
    }

    fn query_count(&self) -> u64 {
        (**self).query_count()
    }
}

#[derive(Debug, Default)]
struct Counter(AtomicU64);

impl Counter {
    #[inline]
    fn bump(&self) {
        self.0.fetch_add(1, Ordering::Relaxed);
    }

    fn get(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }
}

fn check_dim(expected: usize, x: &Assignment) {
    assert_eq!(x.n(), expected, "query dimension mismatch");
}

#[derive(Debug)]
pub struct PolyOracle {
    poly: SparsePoly,
    counter: Counter,
}

impl PolyOracle {
    pub fn poly(&self) -> &SparsePoly {
        &self.poly
    }
}

impl BlackBox for PolyOracle {
    fn n(&self) -> usize {
        self.poly.n()
    }

    #[inline]
    fn query(&self, x: &Assignment) -> Sign {
        check_dim(self.poly.n(), x);
        self.counter.bump();
        Sign::from_bit(self.poly.eval_words(x.words()))
    }

    fn query_count(&self) -> u64 {
        self.counter.get()
    }
}

pub fn make_poly_oracle(p: SparsePoly) -> PolyOracle {
    PolyOracle { poly: p, counter: Counter::default() }
}

#[derive(Debug)]
pub struct TableOracle {
    table: TruthTable,
    counter: Counter,
}

impl TableOracle {
    pub fn table(&self) -> &TruthTable {
        &self.table
    }
}

impl BlackBox for TableOracle {
    fn n(&self) -> usize {
        self.table.n()
    }

    fn query(&self, x: &Assignment) -> Sign {
        check_dim(self.table.n(), x);
        self.counter.bump();
        Sign::from_bit(self.table.get(x.to_index().expect("tables have n <= 32")))
    }

    fn query_count(&self) -> u64 {
        self.counter.get()
    }
}

pub fn make_table_oracle(t: TruthTable) -> TableOracle {
    TableOracle { table: t, counter: Counter::default() }
}

/// `x -> f(x with the coordinates of S forced to 0)`.
#[derive(Debug)]
pub struct ZeroRestricted<B> {
    inner: B,
    zeroed: VarSet,
    counter: Counter,
}

impl<B: BlackBox> ZeroRestricted<B> {
    pub fn zeroed(&self) -> &VarSet {
        &self.zeroed
    }

    pub fn inner(&self) -> &B {
        &self.inner
    }
}

impl<B: BlackBox> BlackBox for ZeroRestricted<B> {
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn query(&self, x: &Assignment) -> Sign {
        check_dim(self.inner.n(), x);
        self.counter.bump();
        let mut y = x.clone();
        y.clear_vars(&self.zeroed);
        self.inner.query(&y)
    }

    fn query_count(&self) -> u64 {
        self.counter.get()
    }
}

pub fn zero_restricted_oracle<B: BlackBox>(f: B, zeroed: VarSet) -> Result<ZeroRestricted<B>> {
    if zeroed.n() != f.n() {
        return Err(Error::DimensionMismatch { expected: f.n(), actual: zeroed.n() });
    }
    Ok(ZeroRestricted { inner: f, zeroed, counter: Counter::default() })
}

/// Flips `f` on a keyed pseudo-random set of density `fraction`. Membership
/// of a point is a hash of `(key, x)` compared against a threshold, so the
/// result is a well-defined function without storing the flip set.
#[derive(Debug)]
pub struct FlipNoise<B> {
    inner: B,
    key: u64,
    // flip iff hash(x) < threshold, over the 65-bit range [0, 2^64]
    threshold: u128,
    counter: Counter,
}

impl<B: BlackBox> FlipNoise<B> {
    /// Whether the output at `x` is flipped relative to the inner oracle.
    pub fn is_flipped(&self, x: &Assignment) -> bool {
        let h = x.words().iter().fold(splitmix64(self.key ^ x.n() as u64), |acc, &w| splitmix64(acc ^ w));
        (h as u128) < self.threshold
    }

    pub fn inner(&self) -> &B {
        &self.inner
    }
}

impl<B: BlackBox> BlackBox for FlipNoise<B> {
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn query(&self, x: &Assignment) -> Sign {
        check_dim(self.inner.n(), x);
        self.counter.bump();
        let v = self.inner.query(x);
        if self.is_flipped(x) {
            v.flip()
        } else {
            v
        }
    }

    fn query_count(&self) -> u64 {
        self.counter.get()
    }
}

pub fn flip_noise_oracle<B: BlackBox>(f: B, fraction: Ratio<u64>, seed: u64) -> Result<FlipNoise<B>> {
    if *fraction.denom() == 0 || fraction.numer() > fraction.denom() {
        return Err(Error::invalid("fraction", format!("{fraction} is not in [0, 1]")));
    }
    let threshold = ((*fraction.numer() as u128) << 64) / *fraction.denom() as u128;
    Ok(FlipNoise { inner: f, key: splitmix64(seed ^ 0x006E_6F69_7365), threshold, counter: Counter::default() })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    Estimation,
    Closeness,
    Shiv,
    Membership,
    Equivalence,
}

impl Phase {
    pub const ALL: [Phase; 5] =
        [Phase::Estimation, Phase::Closeness, Phase::Shiv, Phase::Membership, Phase::Equivalence];
}

/// Per-phase query totals for one tester run.
///
/// `shiv` counts the independence-test queries issued while pinning
/// high-variation coordinates; `membership` and `equivalence` count the final
/// evaluation of each simulated membership query, split by whether the
/// learner core asked for it or an equivalence-query sample did.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct QueryLedger {
    pub estimation: u64,
    pub closeness: u64,
    pub shiv: u64,
    pub membership: u64,
    pub equivalence: u64,
}

impl QueryLedger {
    pub fn record(&mut self, phase: Phase, queries: u64) {
        *self.slot(phase) += queries;
    }

    fn slot(&mut self, phase: Phase) -> &mut u64 {
        match phase {
            Phase::Estimation => &mut self.estimation,
            Phase::Closeness => &mut self.closeness,
            Phase::Shiv => &mut self.shiv,
            Phase::Membership => &mut self.membership,
            Phase::Equivalence => &mut self.equivalence,
        }
    }

    pub fn get(&self, phase: Phase) -> u64 {
        match phase {
            Phase::Estimation => self.estimation,
            Phase::Closeness => self.closeness,
            Phase::Shiv => self.shiv,
            Phase::Membership => self.membership,
            Phase::Equivalence => self.equivalence,
        }
    }

    pub fn total(&self) -> u64 {
        Phase::ALL.iter().map(|&p| self.get(p)).sum()
    }

    /// Runs `f` and charges the growth of `oracle`'s counter to `phase`.
    pub fn charge<T>(&mut self, phase: Phase, oracle: &(impl BlackBox + ?Sized), f: impl FnOnce() -> T) -> T {
        let before = oracle.query_count();
        let out = f();
        self.record(phase, oracle.query_count() - before);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2poly::{EnumerationLimits, Monomial};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn poly(n: usize, ms: &[&[usize]]) -> SparsePoly {
        SparsePoly::new(n, ms.iter().map(|m| Monomial::new(m.iter().copied()))).unwrap()
    }

    #[test]
    fn poly_oracle_sign_convention() {
        let zero = make_poly_oracle(SparsePoly::zero(3));
        let one = make_poly_oracle(SparsePoly::one(3));
        let x1 = make_poly_oracle(poly(3, &[&[1]]));
        for i in 0..8 {
            let x = Assignment::from_index(3, i);
            assert_eq!(zero.query(&x), Sign::Plus);
            assert_eq!(one.query(&x), Sign::Minus);
        }
        assert_eq!(x1.query(&Assignment::from_bits(&[true, false, false])), Sign::Minus);
        assert_eq!(zero.query_count(), 8);
    }

    #[test]
    fn table_oracle_agrees_with_poly_oracle() {
        let p = poly(10, &[&[1, 4], &[2, 3, 9], &[10]]);
        let t = make_table_oracle(p.truth_table(&EnumerationLimits::default()).unwrap());
        let q = make_poly_oracle(p);
        for i in 0..1024 {
            let x = Assignment::from_index(10, i);
            assert_eq!(t.query(&x), q.query(&x));
        }
        let blank = make_table_oracle(TruthTable::zeros(2).unwrap());
        assert_eq!(blank.query(&Assignment::zeros(2)), Sign::Plus);
        assert_eq!(blank.query_count(), 1);
    }

    #[test]
    fn zero_restriction_examples() {
        let p = poly(3, &[&[1, 2], &[3]]);
        let base = make_poly_oracle(p);
        let id = zero_restricted_oracle(&base, VarSet::empty(3)).unwrap();
        let killed = zero_restricted_oracle(&base, VarSet::from_vars(3, [3]).unwrap()).unwrap();
        let all = zero_restricted_oracle(&base, VarSet::full(3)).unwrap();
        for i in 0..8 {
            let x = Assignment::from_index(3, i);
            assert_eq!(id.query(&x), base.query(&x));
            assert_eq!(killed.query(&x), Sign::from_bit(x.get(1) && x.get(2)));
            assert_eq!(all.query(&x), Sign::Plus);
        }
        // every wrapper query costs exactly one underlying query
        assert_eq!(base.query_count(), 8 * 4);
        assert_eq!(killed.query_count(), 8);
    }

    #[test]
    fn flip_noise_zero_fraction_is_identity() {
        let base = make_poly_oracle(poly(6, &[&[1, 2]]));
        let noisy = flip_noise_oracle(&base, Ratio::new(0, 1), 5).unwrap();
        for i in 0..64 {
            let x = Assignment::from_index(6, i);
            assert_eq!(noisy.query(&x), base.query(&x));
        }
        let all = flip_noise_oracle(&base, Ratio::new(1, 1), 5).unwrap();
        for i in 0..64 {
            let x = Assignment::from_index(6, i);
            assert_eq!(all.query(&x), base.query(&x).flip());
        }
        assert!(flip_noise_oracle(&base, Ratio::new(3, 2), 5).is_err());
    }

    #[test]
    fn flip_noise_density() {
        let base = make_poly_oracle(SparsePoly::zero(10));
        let noisy = flip_noise_oracle(&base, Ratio::new(1, 4), 11).unwrap();
        let flipped = (0..1024).filter(|&i| noisy.query(&Assignment::from_index(10, i)) == Sign::Minus).count();
        let frac = flipped as f64 / 1024.0;
        assert!((frac - 0.25).abs() <= 0.05, "measured {frac}");
    }

    #[test]
    fn oracles_are_functions() {
        let base = make_poly_oracle(poly(20, &[&[1, 2, 3], &[4]]));
        let noisy = flip_noise_oracle(&base, Ratio::new(1, 3), 1).unwrap();
        let restricted = zero_restricted_oracle(&noisy, VarSet::from_vars(20, [4]).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let x = Assignment::random(20, &mut rng);
            let first = restricted.query(&x);
            assert!((0..1000).all(|_| restricted.query(&x) == first));
        }
    }

    #[test]
    fn ledger_charges_counter_growth() {
        let base = make_poly_oracle(poly(2, &[&[1]]));
        let mut ledger = QueryLedger::default();
        ledger.charge(Phase::Closeness, &base, || {
            base.query(&Assignment::zeros(2));
            base.query(&Assignment::zeros(2));
        });
        ledger.charge(Phase::Shiv, &base, || base.query(&Assignment::zeros(2)));
        assert_eq!(ledger.closeness, 2);
        assert_eq!(ledger.total(), base.query_count());
    }
}
