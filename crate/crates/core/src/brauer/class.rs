//! Quaternion classes `(F, c)` on the surface and their evaluation at local points.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{IntPoly, SurfaceFunction, TowerParams, TowerPoly};
use crate::error::{Error, Result};
use crate::padic::{
    checked_prime_power, determined_local_data, hilbert_local, is_prime, local_data_i128,
    Invariant, LocalPoint,
};
use crate::solubility::check_params;

/// One way of writing a class: `Σ (F_i, c)` over the listed factors, i.e. `(∏ F_i, c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolRep {
    pub factors: Vec<SurfaceFunction>,
    pub constant: BigRational,
    /// Factors as written before reduction modulo the surface equation.
    pub written: Vec<String>,
}

impl fmt::Display for SymbolRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = &self.written;
        let arg = if parts.len() == 1 {
            parts[0].clone()
        } else {
            format!("({})", parts.join(")("))
        };
        write!(f, "({arg}, {})", self.constant)
    }
}

/// A Brauer class with equivalent symbol representations, tried in order.
#[derive(Debug, Clone, PartialEq)]
pub struct BrauerClass {
    pub label: String,
    pub representations: Vec<SymbolRep>,
    /// Whether the class is known to vanish on `U(Z_p)` at odd `p` prime to the constant.
    pub vanishes_off_constant: bool,
}

impl BrauerClass {
    pub fn constant(&self) -> &BigRational {
        &self.representations[0].constant
    }

    pub fn params(&self) -> TowerParams {
        self.representations[0].factors[0].params()
    }
}

impl Serialize for BrauerClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let reps: Vec<String> = self.representations.iter().map(|r| r.to_string()).collect();
        (&self.label, reps).serialize(s)
    }
}

type Written = (SurfaceFunction, String);

fn lin_x(params: TowerParams, shift: i64) -> Written {
    let f = TowerPoly::x(params).add(&TowerPoly::int(params, shift));
    (f.reduce_z(), f.to_string())
}

fn square_minus(v: TowerPoly, k: i64) -> Written {
    let params = v.params();
    let f = v.pow(2).sub(&TowerPoly::int(params, k));
    (f.reduce_z(), f.to_string())
}

/// `(x − 2, c)`, `(x + 2, c)` and `(x² − 4, c) = (y² − 4a, c) = (z² − 4a, c)` with `c = m − 4a`.
pub fn standard_classes(a: i64, m: i64) -> Result<Vec<BrauerClass>> {
    check_params(a, m)?;
    let params = TowerParams::new(a, m);
    let c = params.c();
    let cq = BigRational::from_integer(BigInt::from(c));
    let xm2 = lin_x(params, -2);
    let xp2 = lin_x(params, 2);
    let x2 = square_minus(TowerPoly::x(params), 4);
    let y2 = square_minus(TowerPoly::y(params), 4 * a);
    let z2 = square_minus(TowerPoly::z(params), 4 * a);
    let rep = |factors: Vec<&Written>| SymbolRep {
        factors: factors.iter().map(|w| w.0.clone()).collect(),
        constant: cq.clone(),
        written: factors.iter().map(|w| w.1.clone()).collect(),
    };
    Ok(vec![
        BrauerClass {
            label: format!("(x - 2, {c})"),
            representations: vec![rep(vec![&xm2]), rep(vec![&xp2, &y2]), rep(vec![&xp2, &z2])],
            vanishes_off_constant: true,
        },
        BrauerClass {
            label: format!("(x + 2, {c})"),
            representations: vec![rep(vec![&xp2]), rep(vec![&xm2, &y2]), rep(vec![&xm2, &z2])],
            vanishes_off_constant: true,
        },
        BrauerClass {
            label: format!("(x^2 - 4, {c})"),
            representations: vec![rep(vec![&x2]), rep(vec![&y2]), rep(vec![&z2])],
            vanishes_off_constant: true,
        },
    ])
}

/// Squarefree-equivalent integer of a nonzero rational (`n/d ~ n·d`).
pub(crate) fn rational_to_i128(r: &BigRational) -> Result<i128> {
    if r.is_zero() {
        return Err(Error::ZeroInput("symbol constant"));
    }
    (r.numer() * r.denom())
        .to_i128()
        .ok_or_else(|| Error::Parse(format!("constant {r} out of range")))
}

#[derive(Debug, Clone)]
pub(crate) struct LocalRep {
    pub factors: Vec<IntPoly>,
    pub constant: i128,
}

/// A class compiled for one prime: integer polynomial factors whose coefficients
/// are exact, or known modulo `p^coefficient_level`.
#[derive(Debug, Clone)]
pub struct LocalClass {
    pub label: String,
    pub p: u64,
    pub(crate) reps: Vec<LocalRep>,
    pub(crate) coefficient_level: u32,
}

impl LocalClass {
    pub fn compile(class: &BrauerClass, p: u64) -> Result<LocalClass> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let mut reps = Vec::new();
        for rep in &class.representations {
            let factors = rep
                .factors
                .iter()
                .map(|f| {
                    f.poly()
                        .to_int_poly()
                        .ok_or_else(|| Error::Parse(format!("non-integral factor {}", f.poly())))
                })
                .collect::<Result<Vec<_>>>()?;
            reps.push(LocalRep {
                factors,
                constant: rational_to_i128(&rep.constant)?,
            });
        }
        Ok(LocalClass {
            label: class.label.clone(),
            p,
            reps,
            coefficient_level: u32::MAX,
        })
    }

    pub(crate) fn from_parts(
        label: String,
        p: u64,
        reps: Vec<LocalRep>,
        coefficient_level: u32,
    ) -> Self {
        LocalClass {
            label,
            p,
            reps,
            coefficient_level,
        }
    }

    /// Value on every `Z_p`-point congruent to `pt` modulo `p^level`, if the first
    /// representation whose factors all have determined square classes exists.
    pub fn eval_residue(&self, pt: &[i128; 3], level: u32) -> Option<Invariant> {
        if level > self.coefficient_level {
            return None;
        }
        let p = self.p;
        let modulus = checked_prime_power(p, level)?;
        'reps: for rep in &self.reps {
            let c = local_data_i128(rep.constant, p);
            let mut total = Invariant::Zero;
            for f in &rep.factors {
                let v = f.eval_mod(pt, modulus);
                let Some(d) = determined_local_data(v, p, level) else {
                    continue 'reps;
                };
                total = total + hilbert_local(d, c, p);
            }
            return Some(total);
        }
        None
    }

    pub fn eval(&self, pt: &LocalPoint) -> Option<Invariant> {
        assert_eq!(pt.p, self.p, "point and class live at different primes");
        self.eval_residue(&pt.coords, pt.level)
    }
}

/// `inv_p` of the class at a local point, or `None` when no representation is
/// determined at the point's precision.
pub fn eval_class(class: &BrauerClass, pt: &LocalPoint) -> Result<Option<Invariant>> {
    Ok(LocalClass::compile(class, pt.p)?.eval(pt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::lift_point;

    #[test]
    fn standard_constants() {
        for (a, m, c) in [(3, 14, 2), (10, 43, 3), (-3, -6, 6)] {
            let cls = standard_classes(a, m).unwrap();
            assert_eq!(cls.len(), 3);
            for k in &cls {
                assert_eq!(k.constant(), &BigRational::from_integer(c.into()));
            }
        }
        assert_eq!(standard_classes(-3, -6).unwrap()[2].label, "(x^2 - 4, 6)");
        assert!(standard_classes(2, 8).is_err());
    }

    #[test]
    fn representation_text() {
        let cls = standard_classes(-3, -6).unwrap();
        let reps: Vec<String> = cls[2]
            .representations
            .iter()
            .map(|r| r.to_string())
            .collect();
        assert_eq!(reps, vec!["(x^2 - 4, 6)", "(y^2 + 12, 6)", "(z^2 + 12, 6)"]);
    }

    #[test]
    fn fallback_when_first_form_undetermined() {
        let (a, m, p) = (3i64, 14i64, 5u64);
        let cls = standard_classes(a, m).unwrap();
        // x = 2 exactly: x − 2 and x² − 4 vanish, the fallback forms are units.
        let b1 = LocalClass::compile(&cls[0], p).unwrap();
        let b = LocalClass::compile(&cls[2], p).unwrap();
        assert_eq!(b1.eval_residue(&[2, 1, 0], 4), Some(Invariant::Zero));
        assert_eq!(b.eval_residue(&[2, 1, 0], 4), Some(Invariant::Zero));
        assert_eq!(b.reps[0].factors[0].eval_mod(&[2, 1, 0], 625), 0);
        let q = lift_point([1, 0, 1], a, m, p, 4).unwrap();
        assert_eq!(eval_class(&cls[0], &q).unwrap(), Some(Invariant::Zero));
    }
}
