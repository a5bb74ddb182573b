//! Finite-precision `p`-adic integers and Newton lifting of simple roots.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::primes::{checked_prime_power, inv_mod, is_prime, max_level, valuation};
use crate::error::{Error, Result};

/// An element of `Z_p` known modulo `p^level`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PadicApprox {
    p: u64,
    level: u32,
    residue: i128,
}

impl PadicApprox {
    pub fn new(p: u64, level: u32, residue: i128) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let modulus = checked_prime_power(p, level).ok_or(Error::PrecisionOverflow { p, level })?;
        Ok(PadicApprox {
            p,
            level,
            residue: residue.rem_euclid(modulus),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn residue(&self) -> i128 {
        self.residue
    }

    pub fn modulus(&self) -> i128 {
        checked_prime_power(self.p, self.level).expect("checked at construction")
    }

    /// Valuation, if the residue is nonzero (otherwise the value is only known to be `≥ level`).
    pub fn valuation(&self) -> Option<u32> {
        (self.residue != 0).then(|| valuation(self.residue, self.p))
    }

    /// Reduction to a lower level.
    pub fn truncate(&self, level: u32) -> PadicApprox {
        assert!(level <= self.level);
        PadicApprox::new(self.p, level, self.residue).expect("smaller level fits")
    }
}

impl fmt::Display for PadicApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O({}^{})", self.residue, self.p, self.level)
    }
}

/// Horner evaluation of `Σ coeffs[i] tⁱ` modulo `modulus`.
pub(crate) fn eval_mod(coeffs: &[i128], t: i128, modulus: i128) -> i128 {
    coeffs.iter().rev().fold(0i128, |acc, &c| {
        (acc * t + c.rem_euclid(modulus)).rem_euclid(modulus)
    })
}

fn derivative(coeffs: &[i128]) -> Vec<i128> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| c * i as i128)
        .collect()
}

fn val_mod(r: i128, p: u64, cap: u32) -> u32 {
    if r == 0 {
        cap
    } else {
        valuation(r, p).min(cap)
    }
}

/// Lifts an approximate root `x0` of `f` (coefficients in ascending degree) to a
/// root modulo `p^level`, under Hensel's criterion `v(f(x0)) > 2 v(f'(x0))`.
///
/// The result is congruent to `x0` modulo `p^(v(f(x0)) − v(f'(x0)))`.
pub fn hensel_lift_root(f: &[i128], x0: i128, p: u64, level: u32) -> Result<PadicApprox> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let df = derivative(f);
    let probe_level = max_level(p);
    let probe_mod = checked_prime_power(p, probe_level).expect("max level fits");
    let vf = val_mod(eval_mod(f, x0, probe_mod), p, probe_level);
    let vd = val_mod(eval_mod(&df, x0, probe_mod), p, probe_level);
    if vd == probe_level || vf <= 2 * vd {
        return Err(Error::CriterionFails {
            value_valuation: vf,
            derivative_valuation: vd,
        });
    }
    let work = level + 2 * vd;
    let big = checked_prime_power(p, work).ok_or(Error::PrecisionOverflow { p, level: work })?;
    let pvd = checked_prime_power(p, vd).expect("vd < work");
    let target = checked_prime_power(p, level + vd).expect("below work");
    let mut x = x0.rem_euclid(big);
    for _ in 0..256 {
        let fx = eval_mod(f, x, big);
        if fx % target == 0 {
            return PadicApprox::new(p, level, x);
        }
        let dx = eval_mod(&df, x, big);
        let unit = (dx / pvd).rem_euclid(big / pvd);
        let inv =
            inv_mod(unit, big / pvd).expect("derivative valuation is preserved along Newton steps");
        let step = ((fx / pvd) % (big / pvd)) * inv % (big / pvd);
        x = (x - step).rem_euclid(big);
    }
    unreachable!("Newton iteration converges quadratically")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lift_sqrt2_mod_343() {
        let r = hensel_lift_root(&[-2, 0, 1], 3, 7, 3).unwrap();
        assert_eq!(r.residue(), 108);
        assert_eq!((108 * 108 - 2) % 343, 0);
    }

    #[test]
    fn two_adic_square_roots() {
        for a in [1i128, 9, 17, 33, -7, -15] {
            for n in [1, 5, 20, 40] {
                let r = hensel_lift_root(&[-a, 0, 1], 1, 2, n).unwrap();
                let md = 1i128 << n;
                assert_eq!(
                    (r.residue() * r.residue() - a).rem_euclid(md),
                    0,
                    "a={a} n={n}"
                );
            }
        }
    }

    #[test]
    fn criterion_failure() {
        assert_eq!(
            hensel_lift_root(&[-3, 0, 1], 1, 7, 3),
            Err(Error::CriterionFails {
                value_valuation: 0,
                derivative_valuation: 0
            })
        );
    }

    #[test]
    fn level_one_returns_input() {
        let r = hensel_lift_root(&[-2, 0, 1], 3, 7, 1).unwrap();
        assert_eq!(r.residue(), 3);
    }

    #[test]
    fn approx_basics() {
        let x = PadicApprox::new(5, 3, -1).unwrap();
        assert_eq!(x.residue(), 124);
        assert_eq!(x.valuation(), Some(0));
        assert_eq!(x.truncate(1).residue(), 4);
        assert!(PadicApprox::new(4, 2, 1).is_err());
        assert!(PadicApprox::new(2, 70, 1).is_err());
    }
}
