//! Exhaustive-enumeration oracles with exact dyadic results.

use std::borrow::Cow;

use super::{EnumerationLimits, Monomial, SparsePoly, TruthTable};
use crate::error::{Error, Result};
use crate::exact::Dyadic;

/// Anything that can be expanded into a full truth table under the limits.
pub trait AsTruthTable {
    fn as_table(&self, limits: &EnumerationLimits) -> Result<Cow<'_, TruthTable>>;
}

impl AsTruthTable for TruthTable {
    fn as_table(&self, limits: &EnumerationLimits) -> Result<Cow<'_, TruthTable>> {
        limits.check_vars(self.n())?;
        Ok(Cow::Borrowed(self))
    }
}

impl AsTruthTable for SparsePoly {
    fn as_table(&self, limits: &EnumerationLimits) -> Result<Cow<'_, TruthTable>> {
        Ok(Cow::Owned(self.truth_table(limits)?))
    }
}

/// Fraction of the `2^n` points on which `f` and `g` disagree.
pub fn distance(
    f: &(impl AsTruthTable + ?Sized),
    g: &(impl AsTruthTable + ?Sized),
    limits: &EnumerationLimits,
) -> Result<Dyadic> {
    let (f, g) = (f.as_table(limits)?, g.as_table(limits)?);
    let diff = f.hamming(&g)?;
    Ok(Dyadic::new(diff as u128, f.n() as u32))
}

/// Fraction of points where `p` evaluates to 0.
pub fn zero_fraction(p: &SparsePoly, limits: &EnumerationLimits) -> Result<Dyadic> {
    let t = p.truth_table(limits)?;
    Ok(Dyadic::new((t.len() - t.count_ones()) as u128, p.n() as u32))
}

/// Result of the exhaustive search for the closest sparse polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassDistance {
    pub distance: Dyadic,
    pub witness: SparsePoly,
    /// Number of candidate polynomials examined.
    pub candidates: u64,
}

/// Minimum distance from `f` to any polynomial with at most `s` monomials.
///
/// Candidates are visited by increasing sparsity, then lexicographically by
/// monomial index, so the witness is the first minimizer in that order.
pub fn distance_to_sparse_class(
    f: &(impl AsTruthTable + ?Sized),
    s: usize,
    limits: &EnumerationLimits,
) -> Result<ClassDistance> {
    let f = f.as_table(limits)?;
    let n = f.n();
    if n > limits.class_max_vars {
        return Err(Error::CapExceeded { what: "class search variables", actual: n, cap: limits.class_max_vars });
    }
    if s > limits.class_max_sparsity {
        return Err(Error::CapExceeded { what: "class search sparsity", actual: s, cap: limits.class_max_sparsity });
    }

    let universe = 1u64 << n;
    let monomial_tables: Vec<TruthTable> = (0..universe)
        .map(|idx| TruthTable::from_fn(n, |x| x & idx == idx).expect("width checked"))
        .collect();

    let mut search = Search {
        target: &f,
        tables: &monomial_tables,
        best: (f.count_ones(), Vec::new()),
        candidates: 1,
    };
    let zero = TruthTable::zeros(n)?;
    let mut chosen = Vec::with_capacity(s);
    for size in 1..=s.min(universe as usize) {
        if search.best.0 == 0 {
            break;
        }
        search.visit(&zero, 0, size, &mut chosen);
    }

    let (diff, indices) = search.best;
    let witness = SparsePoly::new(n, indices.into_iter().map(Monomial::from_index))?;
    Ok(ClassDistance {
        distance: Dyadic::new(diff as u128, n as u32),
        witness,
        candidates: search.candidates,
    })
}

struct Search<'a> {
    target: &'a TruthTable,
    tables: &'a [TruthTable],
    best: (u64, Vec<u64>),
    candidates: u64,
}

impl Search<'_> {
    fn visit(&mut self, acc: &TruthTable, start: u64, remaining: usize, chosen: &mut Vec<u64>) {
        if remaining == 0 {
            self.candidates += 1;
            let d = acc.hamming(self.target).expect("same width");
            if d < self.best.0 {
                self.best = (d, chosen.clone());
            }
            return;
        }
        let end = self.tables.len() as u64 - (remaining as u64 - 1);
        for idx in start..end {
            let next = acc.xor(&self.tables[idx as usize]).expect("same width");
            chosen.push(idx);
            self.visit(&next, idx + 1, remaining - 1, chosen);
            chosen.pop();
            if self.best.0 == 0 {
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(n: usize, ms: &[&[usize]]) -> SparsePoly {
        SparsePoly::new(n, ms.iter().map(|m| Monomial::new(m.iter().copied()))).unwrap()
    }

    #[test]
    fn distance_examples() {
        let lim = EnumerationLimits::default();
        let x1 = poly(2, &[&[1]]);
        assert_eq!(distance(&x1, &poly(2, &[&[1], &[2]]), &lim).unwrap(), Dyadic::new(1, 1));
        assert_eq!(distance(&x1, &x1, &lim).unwrap(), Dyadic::ZERO);
        assert_eq!(distance(&poly(2, &[&[1, 2]]), &SparsePoly::zero(2), &lim).unwrap(), Dyadic::new(1, 2));
    }

    #[test]
    fn distance_respects_cap() {
        let lim = EnumerationLimits { max_vars: 3, ..Default::default() };
        let p = SparsePoly::zero(4);
        assert!(matches!(distance(&p, &p, &lim), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn zero_fraction_examples() {
        let lim = EnumerationLimits::default();
        assert_eq!(zero_fraction(&poly(1, &[&[1]]), &lim).unwrap(), Dyadic::new(1, 1));
        assert_eq!(zero_fraction(&poly(2, &[&[1, 2]]), &lim).unwrap(), Dyadic::new(3, 2));
        assert_eq!(zero_fraction(&poly(2, &[&[1], &[1, 2]]), &lim).unwrap(), Dyadic::new(3, 2));
    }

    #[test]
    fn class_distance_of_sparse_input_is_zero() {
        let lim = EnumerationLimits::default();
        let p = poly(4, &[&[1, 3], &[2, 4]]);
        let r = distance_to_sparse_class(&p, 2, &lim).unwrap();
        assert!(r.distance.is_zero());
        assert_eq!(r.witness, p);
        let one = SparsePoly::one(3);
        let r = distance_to_sparse_class(&one, 1, &lim).unwrap();
        assert!(r.distance.is_zero());
        assert_eq!(r.witness, one);
    }

    #[test]
    fn class_search_caps() {
        let lim = EnumerationLimits::default();
        assert!(distance_to_sparse_class(&SparsePoly::zero(9), 1, &lim).is_err());
        assert!(distance_to_sparse_class(&SparsePoly::zero(4), 3, &lim).is_err());
    }
}
