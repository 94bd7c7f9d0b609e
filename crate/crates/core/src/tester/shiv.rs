//! Pinning the unique high-variation variable of a subset to a chosen bit.

use rand::Rng;

use crate::assignment::{Assignment, VarSet};
use crate::blackbox::BlackBox;
use crate::error::{Error, Result};
use crate::variation::{IndependenceTest, TestOutcome};

/// Independence-test runs per side: `ceil((2/alpha) ln(2/delta))`.
pub fn shiv_iterations(alpha: f64, delta: f64) -> u64 {
    (2.0 / alpha * (2.0 / delta).ln()).ceil() as u64
}

fn check(alpha: f64, delta: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::invalid("alpha", format!("{alpha} must be positive")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("delta", format!("{delta} is not in (0, 1)")));
    }
    Ok(())
}

/// Whether any of `runs` independence tests on `side` rejects. Stops at the
/// first rejection, which leaves the outcome unchanged. An empty side never
/// rejects and costs no queries.
fn marked<R: Rng + ?Sized>(f: &(impl BlackBox + ?Sized), side: &VarSet, runs: u64, rng: &mut R) -> bool {
    if side.is_empty() {
        return false;
    }
    let mut test = IndependenceTest::new(side);
    (0..runs).any(|_| test.run(f, rng) == TestOutcome::Reject)
}

/// Draws `x` uniformly on `vars`, splits `vars` by the bits of `x` and marks
/// each side on which an independence test rejects. Returns `None` (fail)
/// unless exactly one side is marked; otherwise returns `x` if the side
/// where `x` equals `b` is marked and the complement of `x` if not, so the
/// marked variable ends up set to `b`.
///
/// The result is an assignment over all `n` coordinates that is zero
/// outside `vars`.
pub fn shiv<R: Rng + ?Sized>(
    f: &(impl BlackBox + ?Sized),
    vars: &VarSet,
    alpha: f64,
    b: bool,
    delta: f64,
    rng: &mut R,
) -> Result<Option<Assignment>> {
    check(alpha, delta)?;
    if vars.is_empty() {
        return Err(Error::invalid("I", "subset must be nonempty"));
    }
    if vars.n() != f.n() {
        return Err(Error::DimensionMismatch { expected: f.n(), actual: vars.n() });
    }
    let mut x = Assignment::random(f.n(), rng);
    x.keep_vars(vars);
    let (zeros, ones) = vars.split_by(&x);
    let runs = shiv_iterations(alpha, delta);
    let zeros_marked = marked(f, &zeros, runs, rng);
    let ones_marked = marked(f, &ones, runs, rng);
    if zeros_marked == ones_marked {
        return Ok(None);
    }
    let target_marked = if b { ones_marked } else { zeros_marked };
    Ok(Some(if target_marked { x } else { x.complement_within(vars) }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blackbox::make_poly_oracle;
    use crate::gf2poly::{Monomial, SparsePoly};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dictator(n: usize) -> SparsePoly {
        SparsePoly::new(n, [Monomial::new([1])]).unwrap()
    }

    #[test]
    fn iteration_count() {
        // ceil(16 ln 20) = ceil(47.93)
        assert_eq!(shiv_iterations(0.125, 0.1), 48);
        assert_eq!(shiv_iterations(1.0, 0.1), 6);
    }

    #[test]
    fn constant_function_fails() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let f = make_poly_oracle(SparsePoly::one(4));
        let vars = VarSet::from_vars(4, [1, 2, 3]).unwrap();
        for _ in 0..50 {
            assert_eq!(shiv(&f, &vars, 0.5, true, 0.1, &mut rng).unwrap(), None);
        }
    }

    #[test]
    fn singleton_dictator_sets_bit() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = make_poly_oracle(dictator(3));
        let vars = VarSet::from_vars(3, [1]).unwrap();
        // one side is empty, the other is marked with probability 1 - (1/2)^c;
        // c = 30 here
        for b in [false, true] {
            for _ in 0..100 {
                let w = shiv(&f, &vars, 1.0, b, 1e-6, &mut rng).unwrap().expect("fail rate 2^-30");
                assert_eq!(w.get(1), b);
                assert!(!w.get(2) && !w.get(3));
            }
        }
    }

    #[test]
    fn dictator_with_padding() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = make_poly_oracle(dictator(10));
        let vars = VarSet::from_vars(10, [1, 2, 5, 9]).unwrap();
        let (mut ok, mut fails) = (0, 0);
        for _ in 0..500 {
            match shiv(&f, &vars, 1.0, true, 0.1, &mut rng).unwrap() {
                Some(w) => {
                    assert!(w.get(1));
                    ok += 1;
                }
                None => fails += 1,
            }
        }
        assert!(fails <= 50, "{fails} fails, {ok} successes");
    }

    #[test]
    fn bad_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = make_poly_oracle(dictator(3));
        assert!(shiv(&f, &VarSet::empty(3), 1.0, true, 0.1, &mut rng).is_err());
        assert!(shiv(&f, &VarSet::full(3), 0.0, true, 0.1, &mut rng).is_err());
        assert!(shiv(&f, &VarSet::full(3), 1.0, true, 1.0, &mut rng).is_err());
        assert!(shiv(&f, &VarSet::full(4), 1.0, true, 0.1, &mut rng).is_err());
    }
}
