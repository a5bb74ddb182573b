//! Quadratic symbols over the local fields of `Q`: Legendre symbols, square
//! classes, and Hilbert symbols written additively as invariants in `{0, 1/2}`.

use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::hensel::PadicApprox;
use super::primes::{is_prime, pow_mod};
use super::Place;
use crate::error::{Error, Result};

/// A local invariant of a quaternion class, an element of `(1/2)Z / Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Invariant {
    Zero,
    Half,
}

impl Invariant {
    pub fn from_sign(s: i8) -> Self {
        if s == 1 {
            Invariant::Zero
        } else {
            Invariant::Half
        }
    }

    pub fn is_half(self) -> bool {
        self == Invariant::Half
    }

    pub fn all() -> [Invariant; 2] {
        [Invariant::Zero, Invariant::Half]
    }
}

impl Add for Invariant {
    type Output = Invariant;
    fn add(self, rhs: Invariant) -> Invariant {
        if self == rhs {
            Invariant::Zero
        } else {
            Invariant::Half
        }
    }
}

impl std::iter::Sum for Invariant {
    fn sum<I: Iterator<Item = Invariant>>(iter: I) -> Invariant {
        iter.fold(Invariant::Zero, |a, b| a + b)
    }
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Invariant::Zero => "0",
            Invariant::Half => "1/2",
        })
    }
}

impl Serialize for Invariant {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Invariant {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match String::deserialize(d)?.as_str() {
            "0" => Ok(Invariant::Zero),
            "1/2" => Ok(Invariant::Half),
            other => Err(serde::de::Error::custom(format!("bad invariant {other:?}"))),
        }
    }
}

fn require_odd_prime(p: u64) -> Result<()> {
    if p % 2 == 1 && is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotOddPrime(p))
    }
}

/// Legendre symbol `(n/p)` for an odd prime `p`.
pub fn legendre(n: i128, p: u64) -> Result<i8> {
    require_odd_prime(p)?;
    Ok(legendre_unchecked(n, p))
}

pub(crate) fn legendre_unchecked(n: i128, p: u64) -> i8 {
    let r = n.rem_euclid(p as i128) as u64;
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Smallest positive quadratic non-residue modulo an odd prime.
pub fn smallest_nonresidue(p: u64) -> u64 {
    (2..p)
        .find(|&u| legendre_unchecked(u as i128, p) == -1)
        .expect("odd primes have non-residues")
}

/// Canonical representative of a class in `Q_v^× / Q_v^×²`.
///
/// Odd `p`: `{1, u, p, up}` with `u` the smallest non-residue. `p = 2`:
/// `{±1, ±5, ±2, ±10}`. Real place: `{1, −1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SquareClass {
    Determined { place: Place, representative: i64 },
    Undetermined { place: Place },
}

impl SquareClass {
    pub fn representative(&self) -> Option<i64> {
        match self {
            SquareClass::Determined { representative, .. } => Some(*representative),
            SquareClass::Undetermined { .. } => None,
        }
    }

    pub fn is_square(&self) -> bool {
        self.representative() == Some(1)
    }
}

/// Local data of a nonzero number at a place: valuation and the unit part modulo
/// `p` (odd `p`), modulo 8 (`p = 2`), or the sign (real place).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct LocalData {
    pub valuation: u32,
    pub unit: u64,
}

fn unit_modulus(p: u64) -> u64 {
    if p == 2 {
        8
    } else {
        p
    }
}

pub(crate) fn local_data_i128(n: i128, p: u64) -> LocalData {
    debug_assert!(n != 0);
    let pp = p as i128;
    let mut n = n;
    let mut v = 0;
    while n % pp == 0 {
        n /= pp;
        v += 1;
    }
    LocalData {
        valuation: v,
        unit: n.rem_euclid(unit_modulus(p) as i128) as u64,
    }
}

fn local_data_bigint(n: &BigInt, p: u64) -> LocalData {
    debug_assert!(!n.is_zero());
    let pp = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&pp);
        if !r.is_zero() {
            break;
        }
        n = q;
        v += 1;
    }
    let unit = n
        .mod_floor(&BigInt::from(unit_modulus(p)))
        .to_u64()
        .expect("small residue");
    LocalData { valuation: v, unit }
}

/// `num · den` has the same square class as `num / den`.
fn rational_as_integer(r: &BigRational) -> BigInt {
    r.numer() * r.denom()
}

fn class_from_local(place: Place, d: LocalData) -> SquareClass {
    let Place::Prime(p) = place else {
        unreachable!()
    };
    let odd_v = d.valuation % 2 == 1;
    let representative = if p == 2 {
        let unit = match d.unit {
            1 => 1,
            3 => -5,
            5 => 5,
            7 => -1,
            _ => unreachable!("unit part must be odd"),
        };
        if odd_v {
            2 * unit
        } else {
            unit
        }
    } else {
        let unit = if legendre_unchecked(d.unit as i128, p) == 1 {
            1
        } else {
            smallest_nonresidue(p) as i64
        };
        if odd_v {
            unit * p as i64
        } else {
            unit
        }
    };
    SquareClass::Determined {
        place,
        representative,
    }
}

/// Canonical square class of a nonzero rational at a place.
pub fn square_class(r: &BigRational, place: Place) -> Result<SquareClass> {
    if r.is_zero() {
        return Err(Error::ZeroInput("square_class of 0"));
    }
    match place {
        Place::Infinite => Ok(SquareClass::Determined {
            place,
            representative: if r.is_negative() { -1 } else { 1 },
        }),
        Place::Prime(p) => {
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            Ok(class_from_local(
                place,
                local_data_bigint(&rational_as_integer(r), p),
            ))
        }
    }
}

pub fn square_class_int(n: i128, place: Place) -> Result<SquareClass> {
    square_class(&BigRational::from_integer(BigInt::from(n)), place)
}

/// Local data of a residue known modulo `p^level`, if it pins down the square class:
/// the valuation must be below the level and the unit part must be known modulo
/// `p` (odd) or 8 (`p = 2`).
pub(crate) fn determined_local_data(residue: i128, p: u64, level: u32) -> Option<LocalData> {
    if residue == 0 {
        return None;
    }
    let d = local_data_i128(residue, p);
    let needed = if p == 2 { 3 } else { 1 };
    (d.valuation + needed <= level).then_some(d)
}

/// Square class of a `p`-adic number known to finite precision.
pub fn square_class_of_approx(x: &PadicApprox) -> SquareClass {
    let place = Place::Prime(x.p());
    match determined_local_data(x.residue(), x.p(), x.level()) {
        Some(d) => class_from_local(place, d),
        None => SquareClass::Undetermined { place },
    }
}

/// Hilbert symbol from local data; the closed formulas at odd `p` and at `2`.
pub(crate) fn hilbert_local(u: LocalData, v: LocalData, p: u64) -> Invariant {
    if p == 2 {
        let eps = |x: u64| ((x - 1) / 2) % 2;
        let omega = |x: u64| ((x * x - 1) / 8) % 2;
        let e = eps(u.unit) * eps(v.unit)
            + (u.valuation as u64) * omega(v.unit)
            + (v.valuation as u64) * omega(u.unit);
        return if e.is_multiple_of(2) {
            Invariant::Zero
        } else {
            Invariant::Half
        };
    }
    let mut sign: i8 = 1;
    if u.valuation % 2 == 1 && v.valuation % 2 == 1 && p % 4 == 3 {
        sign = -sign;
    }
    if v.valuation % 2 == 1 {
        sign *= legendre_unchecked(u.unit as i128, p);
    }
    if u.valuation % 2 == 1 {
        sign *= legendre_unchecked(v.unit as i128, p);
    }
    Invariant::from_sign(sign)
}

/// Additive Hilbert symbol: `0` iff `z² = u x² + v y²` has a nontrivial solution over `Q_v`.
pub fn hilbert(u: &BigRational, v: &BigRational, place: Place) -> Result<Invariant> {
    if u.is_zero() || v.is_zero() {
        return Err(Error::ZeroInput("hilbert symbol argument"));
    }
    match place {
        Place::Infinite => Ok(if u.is_negative() && v.is_negative() {
            Invariant::Half
        } else {
            Invariant::Zero
        }),
        Place::Prime(p) => {
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            let du = local_data_bigint(&rational_as_integer(u), p);
            let dv = local_data_bigint(&rational_as_integer(v), p);
            Ok(hilbert_local(du, dv, p))
        }
    }
}

pub fn hilbert_int(u: i128, v: i128, place: Place) -> Result<Invariant> {
    hilbert(
        &BigRational::from_integer(u.into()),
        &BigRational::from_integer(v.into()),
        place,
    )
}

/// Places where `(u, v)` can be nontrivial: ∞, 2 and the primes dividing `uv`.
pub fn candidate_places(u: &BigRational, v: &BigRational) -> Vec<Place> {
    let mut primes: Vec<u64> = vec![2];
    for n in [u.numer(), u.denom(), v.numer(), v.denom()] {
        primes.extend(bigint_prime_factors(n));
    }
    primes.sort_unstable();
    primes.dedup();
    std::iter::once(Place::Infinite)
        .chain(primes.into_iter().map(Place::Prime))
        .collect()
}

fn bigint_prime_factors(n: &BigInt) -> Vec<u64> {
    let n = n.abs();
    if n.is_one() || n.is_zero() {
        return vec![];
    }
    match n.to_i128() {
        Some(k) if k.unsigned_abs() <= u64::MAX as u128 => {
            super::primes::factorize(k).into_keys().collect()
        }
        _ => panic!("argument too large to factor: {n}"),
    }
}

/// Product formula check: the invariants of `(u, v)` over all places sum to zero.
pub fn hilbert_product_check(u: &BigRational, v: &BigRational) -> Result<bool> {
    let mut total = Invariant::Zero;
    for place in candidate_places(u, v) {
        total = total + hilbert(u, v, place)?;
    }
    Ok(total == Invariant::Zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::tower::{rat, ratio};

    #[test]
    fn legendre_values() {
        assert_eq!(legendre(2, 7).unwrap(), 1);
        assert_eq!(legendre(3, 7).unwrap(), -1);
        assert_eq!(legendre(14, 7).unwrap(), 0);
        assert_eq!(legendre(-1, 13).unwrap(), 1);
        assert_eq!(legendre(3, 2), Err(Error::NotOddPrime(2)));
        assert_eq!(legendre(3, 9), Err(Error::NotOddPrime(9)));
    }

    #[test]
    fn square_class_examples() {
        let rep = |r: i64, place| {
            square_class(&rat(r), place)
                .unwrap()
                .representative()
                .unwrap()
        };
        assert_eq!(rep(9, Place::Prime(5)), 1);
        assert_eq!(rep(2, Place::Prime(7)), 1);
        assert_eq!(rep(-4, Place::Infinite), -1);
        assert_eq!(rep(3, Place::Prime(7)), 3);
        assert_eq!(rep(14, Place::Prime(7)), 7);
        assert_eq!(rep(3, Place::Prime(2)), -5);
        assert_eq!(rep(-6, Place::Prime(2)), 10);
        assert_eq!(rep(12, Place::Prime(2)), -5);
        assert_eq!(
            square_class(&ratio(1, 8), Place::Prime(2))
                .unwrap()
                .representative(),
            Some(2)
        );
        assert!(square_class(&rat(0), Place::Prime(3)).is_err());
    }

    #[test]
    fn approx_square_class_determinacy() {
        // 3 * 7^2 known mod 7^3 determines the class; known mod 7^2 it does not.
        let x = PadicApprox::new(7, 3, 147).unwrap();
        assert_eq!(square_class_of_approx(&x).representative(), Some(3));
        let y = PadicApprox::new(7, 2, 0).unwrap();
        assert!(square_class_of_approx(&y).representative().is_none());
        // p = 2 needs the unit part mod 8.
        let z = PadicApprox::new(2, 4, 12).unwrap();
        assert!(square_class_of_approx(&z).representative().is_none());
        let w = PadicApprox::new(2, 5, 12).unwrap();
        assert_eq!(square_class_of_approx(&w).representative(), Some(-5));
    }

    #[test]
    fn hilbert_examples() {
        let h = |u: i64, v: i64, place| hilbert(&rat(u), &rat(v), place).unwrap();
        for place in [
            Place::Infinite,
            Place::Prime(2),
            Place::Prime(3),
            Place::Prime(7),
        ] {
            assert_eq!(h(1, 5, place), Invariant::Zero);
        }
        assert_eq!(h(-1, -1, Place::Infinite), Invariant::Half);
        assert_eq!(h(-1, -1, Place::Prime(2)), Invariant::Half);
        assert_eq!(h(2, 7, Place::Prime(7)), Invariant::Zero);
        assert_eq!(h(3, 7, Place::Prime(7)), Invariant::Half);
        assert_eq!(h(2, 3, Place::Prime(3)), Invariant::Half);
    }

    #[test]
    fn product_formula_examples() {
        for (u, v) in [(3, 5), (-1, -1), (2, 2), (6, -10)] {
            assert!(
                hilbert_product_check(&rat(u), &rat(v)).unwrap(),
                "({u}, {v})"
            );
        }
    }
}
