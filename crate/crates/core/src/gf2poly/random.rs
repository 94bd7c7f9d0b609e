use std::collections::BTreeSet;

use rand::seq::index;
use rand::Rng;

use super::{Monomial, SparsePoly};
use crate::error::{Error, Result};

/// Number of monomials of degree `1..=max_degree` over `n` variables
/// (just the constant when `max_degree == 0`), saturating.
pub fn monomial_universe(n: usize, max_degree: usize) -> u128 {
    if max_degree == 0 {
        return 1;
    }
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for d in 1..=max_degree.min(n) {
        binom = binom.saturating_mul((n - d + 1) as u128) / d as u128;
        total = total.saturating_add(binom);
    }
    total
}

/// Draws `s` distinct monomials without replacement, each with degree in
/// `1..=max_degree` (the constant monomial only when `max_degree == 0`).
///
/// Each draw picks a degree uniformly and then a uniform variable subset of
/// that size, rejecting repeats; small universes are enumerated instead.
pub fn random_sparse<R: Rng + ?Sized>(
    n: usize,
    s: usize,
    max_degree: usize,
    rng: &mut R,
) -> Result<SparsePoly> {
    if max_degree > n {
        return Err(Error::invalid("max_degree", format!("{max_degree} exceeds n = {n}")));
    }
    let universe = monomial_universe(n, max_degree);
    if s as u128 > universe {
        return Err(Error::ImpossibleRequest { requested: s, available: universe });
    }
    if s == 0 {
        return Ok(SparsePoly::zero(n));
    }
    if max_degree == 0 {
        return Ok(SparsePoly::one(n));
    }

    let mut chosen = BTreeSet::new();
    if universe <= 4 * s as u128 {
        let all: Vec<Monomial> = (1..=max_degree).flat_map(|d| combinations(n, d)).collect();
        for i in index::sample(rng, all.len(), s) {
            chosen.insert(all[i].clone());
        }
    } else {
        while chosen.len() < s {
            let degree = rng.random_range(1..=max_degree);
            let vars = index::sample(rng, n, degree).into_iter().map(|i| i + 1);
            chosen.insert(Monomial::new(vars));
        }
    }
    SparsePoly::new(n, chosen)
}

fn combinations(n: usize, k: usize) -> Vec<Monomial> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Monomial>) {
        if cur.len() == k {
            out.push(Monomial::new(cur.iter().copied()));
            return;
        }
        for v in start..=n {
            cur.push(v);
            rec(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}
