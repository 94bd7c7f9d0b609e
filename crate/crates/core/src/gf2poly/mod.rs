//! Canonical sparse multilinear polynomials over GF(2).
//!
//! A polynomial is a parity of monotone conjunctions. The representation is
//! the unique algebraic normal form: a set of distinct monomials, each a
//! strictly increasing list of 1-based variable indices. The empty monomial
//! is the constant 1.

mod format;
mod oracles;
mod random;
mod table;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::assignment::{word_count, Assignment, VarSet};
use crate::error::{Error, Result};

pub use format::{format_poly, format_table, parse_poly, parse_table};
pub use oracles::{distance, distance_to_sparse_class, zero_fraction, AsTruthTable, ClassDistance};
pub use random::{monomial_universe, random_sparse};
pub use table::TruthTable;

/// Caps on exhaustive enumeration. Exceeding a cap is an error, never an
/// approximation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationLimits {
    /// Largest `n` for which `2^n` points are enumerated.
    pub max_vars: usize,
    /// Largest `n` for the exhaustive distance-to-class search.
    pub class_max_vars: usize,
    /// Largest sparsity for the exhaustive distance-to-class search.
    pub class_max_sparsity: usize,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        EnumerationLimits { max_vars: 20, class_max_vars: 8, class_max_sparsity: 2 }
    }
}

impl EnumerationLimits {
    pub(crate) fn check_vars(&self, n: usize) -> Result<()> {
        if n > self.max_vars {
            Err(Error::CapExceeded { what: "variables to enumerate", actual: n, cap: self.max_vars })
        } else {
            Ok(())
        }
    }
}

/// A monotone conjunction of variables; the empty conjunction is constant 1.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Monomial(Vec<usize>);

impl Monomial {
    /// Sorts and deduplicates (`x_i x_i = x_i`).
    pub fn new(vars: impl IntoIterator<Item = usize>) -> Self {
        let set: BTreeSet<usize> = vars.into_iter().collect();
        Monomial(set.into_iter().collect())
    }

    pub fn constant() -> Self {
        Monomial(Vec::new())
    }

    pub fn vars(&self) -> &[usize] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_constant(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, var: usize) -> bool {
        self.0.binary_search(&var).is_ok()
    }

    /// Monomial whose variables are the set bits of `index` (bit 0 is variable 1).
    pub fn from_index(index: u64) -> Self {
        let mut vars = Vec::with_capacity(index.count_ones() as usize);
        let mut rest = index;
        while rest != 0 {
            vars.push(rest.trailing_zeros() as usize + 1);
            rest &= rest - 1;
        }
        Monomial(vars)
    }

    fn check(&self, n: usize) -> Result<()> {
        match self.0.iter().find(|&&v| v == 0 || v > n) {
            Some(&index) => Err(Error::IndexOutOfRange { index, n }),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for v in &self.0 {
            write!(f, "x{v}")?;
        }
        Ok(())
    }
}

/// Word-level view of a monomial for fast evaluation on packed assignments.
#[derive(Clone, Debug)]
struct PackedMonomial {
    masks: Vec<(usize, u64)>,
}

impl PackedMonomial {
    fn new(m: &Monomial) -> Self {
        let mut masks: Vec<(usize, u64)> = Vec::new();
        for &v in m.vars() {
            let (w, b) = ((v - 1) / 64, (v - 1) % 64);
            match masks.last_mut() {
                Some((lw, mask)) if *lw == w => *mask |= 1 << b,
                _ => masks.push((w, 1 << b)),
            }
        }
        PackedMonomial { masks }
    }

    #[inline]
    fn satisfied(&self, words: &[u64]) -> bool {
        self.masks.iter().all(|&(w, m)| words[w] & m == m)
    }
}

/// A canonical sparse GF(2) polynomial over `n` variables.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(into = "PolyRepr", try_from = "PolyRepr")]
pub struct SparsePoly {
    n: usize,
    monomials: BTreeSet<Monomial>,
    packed: Vec<PackedMonomial>,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    n: usize,
    monomials: Vec<Monomial>,
}

impl From<SparsePoly> for PolyRepr {
    fn from(p: SparsePoly) -> Self {
        PolyRepr { n: p.n, monomials: p.monomials.into_iter().collect() }
    }
}

impl TryFrom<PolyRepr> for SparsePoly {
    type Error = Error;

    fn try_from(r: PolyRepr) -> Result<Self> {
        canonicalize(r.monomials, r.n)
    }
}

impl PartialEq for SparsePoly {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.monomials == other.monomials
    }
}

impl Eq for SparsePoly {}

/// Mod-2 cancellation: monomials occurring an even number of times vanish.
pub fn canonicalize(raw: impl IntoIterator<Item = Monomial>, n: usize) -> Result<SparsePoly> {
    let mut monomials = BTreeSet::new();
    for m in raw {
        m.check(n)?;
        if !monomials.remove(&m) {
            monomials.insert(m);
        }
    }
    Ok(SparsePoly::from_canonical(n, monomials))
}

impl SparsePoly {
    fn from_canonical(n: usize, monomials: BTreeSet<Monomial>) -> Self {
        let packed = monomials.iter().map(PackedMonomial::new).collect();
        SparsePoly { n, monomials, packed }
    }

    pub fn new(n: usize, monomials: impl IntoIterator<Item = Monomial>) -> Result<Self> {
        canonicalize(monomials, n)
    }

    pub fn zero(n: usize) -> Self {
        SparsePoly::from_canonical(n, BTreeSet::new())
    }

    pub fn one(n: usize) -> Self {
        SparsePoly::from_canonical(n, BTreeSet::from([Monomial::constant()]))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sparsity(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> impl ExactSizeIterator<Item = &Monomial> + '_ {
        self.monomials.iter()
    }

    pub fn has_constant_term(&self) -> bool {
        self.monomials.contains(&Monomial::constant())
    }

    pub fn degree(&self) -> usize {
        self.monomials.iter().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Variables the polynomial depends on. In normal form these are exactly
    /// the variables that occur in some monomial.
    pub fn relevant_vars(&self) -> VarSet {
        let mut s = VarSet::empty(self.n);
        for m in &self.monomials {
            for &v in m.vars() {
                s.insert(v);
            }
        }
        s
    }

    pub fn evaluate(&self, x: &Assignment) -> Result<bool> {
        if x.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: x.n() });
        }
        Ok(self.eval_words(x.words()))
    }

    /// Evaluation on packed words with no dimension check.
    #[inline]
    pub fn eval_words(&self, words: &[u64]) -> bool {
        debug_assert_eq!(words.len(), word_count(self.n));
        self.packed.iter().fold(false, |acc, m| acc ^ m.satisfied(words))
    }

    /// Evaluation at the integer index of a point, for `n <= 64`.
    #[inline]
    pub fn eval_index(&self, index: u64) -> bool {
        debug_assert!(self.n <= 64);
        self.packed
            .iter()
            .fold(false, |acc, m| acc ^ m.masks.first().is_none_or(|&(_, mask)| index & mask == mask))
    }

    /// Substitutes the given constants. Variables fixed to 0 kill every
    /// monomial containing them; variables fixed to 1 drop out of their
    /// monomials, after which the result is re-canonicalized. The ambient
    /// `n` is unchanged.
    pub fn restrict(&self, fixing: &[(usize, bool)]) -> Result<SparsePoly> {
        let mut zeros = VarSet::empty(self.n);
        let mut ones = VarSet::empty(self.n);
        for &(v, b) in fixing {
            if v == 0 || v > self.n {
                return Err(Error::IndexOutOfRange { index: v, n: self.n });
            }
            if b {
                ones.insert(v);
                zeros.remove(v);
            } else {
                zeros.insert(v);
                ones.remove(v);
            }
        }
        let kept = self
            .monomials
            .iter()
            .filter(|m| !m.vars().iter().any(|&v| zeros.contains(v)))
            .map(|m| Monomial(m.vars().iter().copied().filter(|&v| !ones.contains(v)).collect()));
        canonicalize(kept, self.n)
    }

    /// Restriction fixing every variable of `set` to 0.
    pub fn zero_out(&self, set: &VarSet) -> SparsePoly {
        let kept: BTreeSet<Monomial> = self
            .monomials
            .iter()
            .filter(|m| !m.vars().iter().any(|&v| set.contains(v)))
            .cloned()
            .collect();
        SparsePoly::from_canonical(self.n, kept)
    }

    /// Renames variables: variable `v` becomes `map[v - 1]` (1-based) in a
    /// polynomial over `new_n` variables. Every variable in a monomial must be
    /// mapped. Distinct variables must map to distinct targets.
    pub fn relabel(&self, new_n: usize, map: impl Fn(usize) -> Option<usize>) -> Result<SparsePoly> {
        let mut out = Vec::with_capacity(self.monomials.len());
        for m in &self.monomials {
            let mut vars = Vec::with_capacity(m.degree());
            for &v in m.vars() {
                match map(v) {
                    Some(t) => vars.push(t),
                    None => return Err(Error::IndexOutOfRange { index: v, n: new_n }),
                }
            }
            out.push(Monomial::new(vars));
        }
        canonicalize(out, new_n)
    }

    /// The polynomial on its relevant variables only, renumbered 1..=k in
    /// increasing order, together with the original indices.
    pub fn compress(&self) -> (SparsePoly, Vec<usize>) {
        let vars: Vec<usize> = self.relevant_vars().iter().collect();
        let k = vars.len();
        let compressed = self
            .relabel(k, |v| vars.binary_search(&v).ok().map(|i| i + 1))
            .expect("relevant variables are mapped");
        (compressed, vars)
    }

    /// Embeds into a larger ambient space without renaming.
    pub fn embed(&self, n: usize) -> Result<SparsePoly> {
        canonicalize(self.monomials.iter().cloned(), n)
    }

    pub fn truth_table(&self, limits: &EnumerationLimits) -> Result<TruthTable> {
        TruthTable::from_poly(self, limits)
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.monomials.is_empty() {
            return write!(f, "0");
        }
        for (i, m) in self.monomials.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}
