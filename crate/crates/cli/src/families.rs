//! Named generators of test functions, one fresh instance per trial.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rand::Rng;
use serde::{Deserialize, Serialize};
use sparsepoly_core::blackbox::{flip_noise_oracle, make_poly_oracle, make_table_oracle};
use sparsepoly_core::gf2poly::{distance, distance_to_sparse_class, random_sparse};
use sparsepoly_core::seed::{derive, phase, stream};
use sparsepoly_core::variation::ExactJunta;
use sparsepoly_core::{BlackBox, EnumerationLimits, Monomial, Result, SparsePoly, TruthTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    /// `x1 x2 + x3 x4 x5` embedded in `n` variables.
    Canonical,
    /// Uniformly drawn polynomial with at most `s` monomials of degree <= 4.
    RandomSparse,
    /// Uniform random truth table, kept only if certified far from every
    /// `s`-sparse polynomial.
    FarTable,
    /// A random 2-sparse polynomial with a fixed fraction of its points
    /// flipped, kept only if certified far.
    FlipNoise,
    /// The zero polynomial.
    Zero,
}

impl FamilyKind {
    pub fn all() -> [FamilyKind; 5] {
        [FamilyKind::Canonical, FamilyKind::RandomSparse, FamilyKind::FarTable, FamilyKind::FlipNoise, FamilyKind::Zero]
    }

    fn name(self) -> &'static str {
        match self {
            FamilyKind::Canonical => "canonical",
            FamilyKind::RandomSparse => "random-sparse",
            FamilyKind::FarTable => "far-table",
            FamilyKind::FlipNoise => "flip-noise",
            FamilyKind::Zero => "zero",
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        FamilyKind::all()
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown family `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Family {
    pub kind: FamilyKind,
    pub n: usize,
    /// Sparsity of the generated polynomial, or of the class a far function
    /// must be certified against.
    pub s: usize,
    /// Certification threshold for far families.
    pub far_epsilon: f64,
    /// Flip density for [`FamilyKind::FlipNoise`].
    pub flip_fraction: Ratio<u64>,
}

impl Family {
    pub fn new(kind: FamilyKind, n: usize, s: usize) -> Self {
        Family { kind, n, s, far_epsilon: 0.0, flip_fraction: Ratio::new(3, 10) }
    }

    pub fn canonical(n: usize) -> Self {
        Family::new(FamilyKind::Canonical, n, 2)
    }

    pub fn far_table(n: usize, s: usize, epsilon: f64) -> Self {
        Family { far_epsilon: epsilon, ..Family::new(FamilyKind::FarTable, n, s) }
    }

    pub fn flip_noise(n: usize, s: usize, epsilon: f64, fraction: Ratio<u64>) -> Self {
        Family { far_epsilon: epsilon, flip_fraction: fraction, ..Family::new(FamilyKind::FlipNoise, n, s) }
    }

    pub fn is_far(&self) -> bool {
        matches!(self.kind, FamilyKind::FarTable | FamilyKind::FlipNoise)
    }

    /// Draws the instance for `trial`. `Ok(None)` means the draw failed
    /// certification and the trial is excluded.
    pub fn instance(&self, seed: u64, trial: u64, limits: &EnumerationLimits) -> Result<Option<Instance>> {
        let mut rng = stream(seed, &[phase::FAMILY, trial]);
        let n = self.n;
        let instance = match self.kind {
            FamilyKind::Canonical => Instance::poly(canonical(n)?),
            FamilyKind::Zero => Instance::poly(SparsePoly::zero(n)),
            FamilyKind::RandomSparse => Instance::poly(random_sparse(n, self.s, n.min(4), &mut rng)?),
            FamilyKind::FarTable => {
                let table = TruthTable::from_fn(n, |_| rng.random())?;
                let class = distance_to_sparse_class(&table, self.s, limits)?;
                if class.distance.cmp_f64(self.far_epsilon).is_lt() {
                    return Ok(None);
                }
                Instance::table(table, class.distance.to_f64())
            }
            FamilyKind::FlipNoise => {
                let base = random_sparse(n, 2, n.min(4), &mut rng)?;
                let noisy = flip_noise_oracle(make_poly_oracle(base.clone()), self.flip_fraction, derive(seed, &[trial]))?;
                let table = TruthTable::from_oracle(&noisy, limits)?;
                let from_base = distance(&table, &base, limits)?;
                let certified = if n <= limits.class_max_vars && self.s <= limits.class_max_sparsity {
                    distance_to_sparse_class(&table, self.s, limits)?.distance
                } else {
                    from_base
                };
                if certified.cmp_f64(self.far_epsilon).is_lt() {
                    return Ok(None);
                }
                Instance::table(table, certified.to_f64())
            }
        };
        Ok(Some(instance))
    }
}

pub fn canonical(n: usize) -> Result<SparsePoly> {
    SparsePoly::new(n, [Monomial::new([1, 2]), Monomial::new([3, 4, 5])])
}

/// One drawn test function together with its exact description.
#[derive(Clone, Debug)]
pub enum Source {
    Poly(SparsePoly),
    Table(TruthTable),
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub source: Source,
    /// Certified distance to the sparse class, for far families.
    pub certificate: Option<f64>,
}

impl Instance {
    pub fn poly(p: SparsePoly) -> Self {
        Instance { source: Source::Poly(p), certificate: None }
    }

    pub fn table(t: TruthTable, certificate: f64) -> Self {
        Instance { source: Source::Table(t), certificate: Some(certificate) }
    }

    pub fn oracle(&self) -> Box<dyn BlackBox> {
        match &self.source {
            Source::Poly(p) => Box::new(make_poly_oracle(p.clone())),
            Source::Table(t) => Box::new(make_table_oracle(t.clone())),
        }
    }

    pub fn junta(&self, limits: &EnumerationLimits) -> Result<ExactJunta> {
        match &self.source {
            Source::Poly(p) => ExactJunta::new(p, limits),
            Source::Table(t) => Ok(ExactJunta::from_table(t.clone())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for k in FamilyKind::all() {
            assert_eq!(k.to_string().parse::<FamilyKind>().unwrap(), k);
        }
        assert!("nope".parse::<FamilyKind>().is_err());
    }

    #[test]
    fn far_tables_are_certified() {
        let limits = EnumerationLimits::default();
        let family = Family::far_table(8, 1, 0.25);
        for trial in 0..5 {
            let inst = family.instance(9, trial, &limits).unwrap().unwrap();
            assert!(inst.certificate.unwrap() >= 0.25);
        }
    }

    #[test]
    fn flip_noise_is_certified() {
        let limits = EnumerationLimits::default();
        let family = Family::flip_noise(8, 2, 0.2, Ratio::new(3, 10));
        let mut kept = 0;
        for trial in 0..5 {
            if let Some(inst) = family.instance(4, trial, &limits).unwrap() {
                assert!(inst.certificate.unwrap() >= 0.2);
                kept += 1;
            }
        }
        assert!(kept >= 3);
    }

    #[test]
    fn instances_are_deterministic() {
        let limits = EnumerationLimits::default();
        let family = Family::new(FamilyKind::RandomSparse, 12, 3);
        let a = family.instance(1, 7, &limits).unwrap().unwrap();
        let b = family.instance(1, 7, &limits).unwrap().unwrap();
        match (a.source, b.source) {
            (Source::Poly(x), Source::Poly(y)) => assert_eq!(x, y),
            _ => panic!("random-sparse draws polynomials"),
        }
    }
}
