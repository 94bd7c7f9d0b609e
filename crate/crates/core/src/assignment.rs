//! Bit-packed points of `{0,1}^n` and subsets of `[n]`.
//!
//! Variable `i` (1-based) lives at bit `i - 1`, so variable 1 is the least
//! significant position of word 0. An assignment of `n <= 64` variables is
//! therefore the integer index used by truth tables.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) fn word_count(n: usize) -> usize {
    n.div_ceil(64)
}

fn tail_mask(n: usize) -> u64 {
    match n % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

fn fill_random<R: Rng + ?Sized>(n: usize, words: &mut [u64], rng: &mut R) {
    for w in words.iter_mut() {
        *w = rng.random();
    }
    if let Some(last) = words.last_mut() {
        *last &= tail_mask(n);
    }
}

fn check_index(index: usize, n: usize) -> Result<()> {
    if index == 0 || index > n {
        Err(Error::IndexOutOfRange { index, n })
    } else {
        Ok(())
    }
}

/// A point `x` in `{0,1}^n`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Assignment {
    n: usize,
    words: Vec<u64>,
}

impl Assignment {
    pub fn zeros(n: usize) -> Self {
        Assignment { n, words: vec![0; word_count(n)] }
    }

    /// The point whose bit `i - 1` of `index` gives variable `i`. Requires `n <= 64`.
    pub fn from_index(n: usize, index: u64) -> Self {
        assert!(n <= 64, "from_index needs n <= 64");
        let mut a = Assignment::zeros(n);
        if n > 0 {
            a.words[0] = index & tail_mask(n);
        }
        a
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut a = Assignment::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                a.words[i / 64] |= 1 << (i % 64);
            }
        }
        a
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut a = Assignment::zeros(n);
        a.randomize(rng);
        a
    }

    pub fn randomize<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        fill_random(self.n, &mut self.words, rng);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Value of variable `var` (1-based).
    pub fn get(&self, var: usize) -> bool {
        debug_assert!(var >= 1 && var <= self.n);
        let i = var - 1;
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, var: usize, bit: bool) {
        debug_assert!(var >= 1 && var <= self.n);
        let i = var - 1;
        if bit {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    /// Integer index of the point, for `n <= 64`.
    pub fn to_index(&self) -> Option<u64> {
        match self.n {
            0 => Some(0),
            1..=64 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (1..=self.n).map(|v| self.get(v)).collect()
    }

    /// Forces every variable of `set` to 0.
    pub fn clear_vars(&mut self, set: &VarSet) {
        debug_assert_eq!(self.n, set.n);
        for (w, m) in self.words.iter_mut().zip(&set.words) {
            *w &= !m;
        }
    }

    /// Keeps only the variables of `set`, zeroing everything else.
    pub fn keep_vars(&mut self, set: &VarSet) {
        debug_assert_eq!(self.n, set.n);
        for (w, m) in self.words.iter_mut().zip(&set.words) {
            *w &= m;
        }
    }

    /// Re-randomizes exactly the variables of `set`, leaving the rest untouched.
    pub fn rerandomize_vars<R: Rng + ?Sized>(&mut self, set: &VarSet, rng: &mut R) {
        for (w, m) in self.words.iter_mut().zip(&set.words) {
            if *m != 0 {
                let fresh: u64 = rng.random();
                *w = (*w & !m) | (fresh & m);
            }
        }
    }

    /// Copies the values of the variables in `set` from `other`.
    pub fn overwrite_from(&mut self, other: &Assignment, set: &VarSet) {
        for ((w, o), m) in self.words.iter_mut().zip(&other.words).zip(&set.words) {
            *w = (*w & !m) | (o & m);
        }
    }

    pub fn copy_from(&mut self, other: &Assignment) {
        debug_assert_eq!(self.n, other.n);
        self.words.copy_from_slice(&other.words);
    }

    /// Bitwise negation restricted to `set`; variables outside `set` become 0.
    pub fn complement_within(&self, set: &VarSet) -> Assignment {
        let words = self.words.iter().zip(&set.words).map(|(w, m)| !w & m).collect();
        Assignment { n: self.n, words }
    }
}

/// A subset of `[n]`, stored as a bit mask.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(into = "VarSetRepr", try_from = "VarSetRepr")]
pub struct VarSet {
    n: usize,
    words: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct VarSetRepr {
    n: usize,
    vars: Vec<usize>,
}

impl TryFrom<VarSetRepr> for VarSet {
    type Error = Error;

    fn try_from(r: VarSetRepr) -> Result<Self> {
        VarSet::from_vars(r.n, r.vars)
    }
}

impl From<VarSet> for VarSetRepr {
    fn from(s: VarSet) -> Self {
        VarSetRepr { n: s.n, vars: s.iter().collect() }
    }
}

impl VarSet {
    pub fn empty(n: usize) -> Self {
        VarSet { n, words: vec![0; word_count(n)] }
    }

    pub fn full(n: usize) -> Self {
        let mut s = VarSet { n, words: vec![u64::MAX; word_count(n)] };
        if let Some(last) = s.words.last_mut() {
            *last &= tail_mask(n);
        }
        s
    }

    /// Builds the set from 1-based variable indices.
    pub fn from_vars(n: usize, vars: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut s = VarSet::empty(n);
        for v in vars {
            check_index(v, n)?;
            s.insert(v);
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn insert(&mut self, var: usize) {
        debug_assert!(var >= 1 && var <= self.n);
        let i = var - 1;
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, var: usize) {
        let i = var - 1;
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn contains(&self, var: usize) -> bool {
        if var == 0 || var > self.n {
            return false;
        }
        let i = var - 1;
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Variables in increasing order, 1-based.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * 64 + b + 1)
            })
        })
    }

    pub fn union_with(&mut self, other: &VarSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn complement(&self) -> VarSet {
        let mut c = VarSet::full(self.n);
        for (a, b) in c.words.iter_mut().zip(&self.words) {
            *a &= !b;
        }
        c
    }

    pub fn intersection(&self, other: &VarSet) -> VarSet {
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        VarSet { n: self.n, words }
    }

    /// Splits the set by the values `x` assigns: `(vars set to 0, vars set to 1)`.
    pub fn split_by(&self, x: &Assignment) -> (VarSet, VarSet) {
        let zeros = self.words.iter().zip(x.words()).map(|(m, w)| m & !w).collect();
        let ones = self.words.iter().zip(x.words()).map(|(m, w)| m & w).collect();
        (VarSet { n: self.n, words: zeros }, VarSet { n: self.n, words: ones })
    }
}
