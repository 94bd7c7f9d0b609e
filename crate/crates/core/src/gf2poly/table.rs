use serde::{Deserialize, Serialize};

use super::{EnumerationLimits, Monomial, SparsePoly};
use crate::assignment::Assignment;
use crate::blackbox::BlackBox;
use crate::error::{Error, Result};

/// In-word masks selecting the positions whose bit `i` is 0, for `i < 6`.
const LOW_HALF: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

/// Hard ceiling on table width regardless of configured limits.
const MAX_TABLE_VARS: usize = 32;

/// All `2^n` outputs of a Boolean function, bit `x` holding `f(x)` where
/// variable 1 is the least significant bit of `x`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct TruthTable {
    n: usize,
    words: Vec<u64>,
}

impl TruthTable {
    fn word_len(n: usize) -> usize {
        if n < 6 {
            1
        } else {
            1 << (n - 6)
        }
    }

    fn valid_mask(n: usize) -> u64 {
        if n < 6 {
            (1u64 << (1 << n)) - 1
        } else {
            u64::MAX
        }
    }

    fn check_width(n: usize) -> Result<()> {
        if n > MAX_TABLE_VARS {
            Err(Error::CapExceeded { what: "truth table variables", actual: n, cap: MAX_TABLE_VARS })
        } else {
            Ok(())
        }
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::check_width(n)?;
        Ok(TruthTable { n, words: vec![0; Self::word_len(n)] })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(u64) -> bool) -> Result<Self> {
        let mut t = TruthTable::zeros(n)?;
        for x in 0..t.len() {
            if f(x) {
                t.words[(x / 64) as usize] |= 1 << (x % 64);
            }
        }
        Ok(t)
    }

    /// Builds a table from `2^n` bits; any other length is malformed.
    pub fn from_bits(n: usize, bits: &[bool]) -> Result<Self> {
        Self::check_width(n)?;
        if bits.len() as u64 != 1u64 << n {
            return Err(Error::invalid("truth table", format!("expected {} bits, got {}", 1u64 << n, bits.len())));
        }
        TruthTable::from_fn(n, |x| bits[x as usize])
    }

    pub fn from_words(n: usize, mut words: Vec<u64>) -> Result<Self> {
        Self::check_width(n)?;
        if words.len() != Self::word_len(n) {
            return Err(Error::invalid("truth table", "wrong word count"));
        }
        words[0] &= if n < 6 { Self::valid_mask(n) } else { u64::MAX };
        Ok(TruthTable { n, words })
    }

    pub fn from_poly(p: &SparsePoly, limits: &EnumerationLimits) -> Result<Self> {
        limits.check_vars(p.n())?;
        // Evaluation of an ANF is the same GF(2) transform as interpolation.
        let mut t = TruthTable::zeros(p.n())?;
        for m in p.monomials() {
            let index: u64 = m.vars().iter().fold(0, |acc, &v| acc | 1 << (v - 1));
            t.words[(index / 64) as usize] ^= 1 << (index % 64);
        }
        t.mobius_in_place();
        Ok(t)
    }

    /// Queries every point of the oracle once (`2^n` queries), reading
    /// output `-1` as bit 1.
    pub fn from_oracle(f: &(impl BlackBox + ?Sized), limits: &EnumerationLimits) -> Result<Self> {
        limits.check_vars(f.n())?;
        let n = f.n();
        TruthTable::from_fn(n, |x| f.query(&Assignment::from_index(n, x)).to_bit())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of entries, `2^n`.
    pub fn len(&self) -> u64 {
        1u64 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, x: u64) -> bool {
        self.words[(x / 64) as usize] >> (x % 64) & 1 == 1
    }

    pub fn set(&mut self, x: u64, bit: bool) {
        let (w, b) = ((x / 64) as usize, x % 64);
        if bit {
            self.words[w] |= 1 << b;
        } else {
            self.words[w] &= !(1 << b);
        }
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Number of points where the two tables differ.
    pub fn hamming(&self, other: &TruthTable) -> Result<u64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: other.n });
        }
        Ok(self.words.iter().zip(&other.words).map(|(a, b)| (a ^ b).count_ones() as u64).sum())
    }

    pub fn xor(&self, other: &TruthTable) -> Result<TruthTable> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: other.n });
        }
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect();
        Ok(TruthTable { n: self.n, words })
    }

    /// Subset-sum transform over GF(2): `a[S] ^= a[S \ {i}]` for each `i`.
    /// It is its own inverse, so it maps a truth table to its ANF
    /// coefficients and back.
    fn mobius_in_place(&mut self) {
        for (i, &low) in LOW_HALF.iter().enumerate().take(self.n.min(6)) {
            let shift = 1u32 << i;
            for w in &mut self.words {
                *w ^= (*w & low) << shift;
            }
        }
        for i in 6..self.n {
            let stride = 1usize << (i - 6);
            for block in self.words.chunks_mut(2 * stride) {
                let (lo, hi) = block.split_at_mut(stride);
                for (h, l) in hi.iter_mut().zip(lo.iter()) {
                    *h ^= *l;
                }
            }
        }
    }

    /// The unique multilinear GF(2) polynomial with this truth table.
    pub fn mobius_interpolate(&self) -> SparsePoly {
        let mut coeffs = self.clone();
        coeffs.mobius_in_place();
        let monomials = coeffs.ones().map(Monomial::from_index);
        SparsePoly::new(self.n, monomials).expect("indices come from the table width")
    }

    /// Indices of the points mapped to 1, in increasing order.
    pub fn ones(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as u64;
                rest &= rest - 1;
                Some(wi as u64 * 64 + b)
            })
        })
    }
}
