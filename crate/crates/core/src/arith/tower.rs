//! The commutative ring `Q[α, β, γ] / (α² − a, β² − m, γ² − (m − 4a))`.
//!
//! Elements are stored as eight rational coordinates on the basis
//! `{1, α, β, γ, αβ, αγ, βγ, αβγ}`. The ring is a field only when the three
//! square classes of `a`, `m`, `m − 4a` are independent; in every other case
//! it has zero divisors and [`TowerElement::inverse`] may fail.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Bit masks of the basis elements in storage order (bit 0 = α, bit 1 = β, bit 2 = γ).
const MASKS: [usize; 8] = [0b000, 0b001, 0b010, 0b100, 0b011, 0b101, 0b110, 0b111];

const LABELS: [&str; 8] = ["", "α", "β", "γ", "αβ", "αγ", "βγ", "αβγ"];

/// The permutation is an involution, so it maps masks back to storage indices too.
fn index_of_mask(mask: usize) -> usize {
    MASKS[mask]
}

/// Parameters `(a, m)` of the tower.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TowerParams {
    pub a: i64,
    pub m: i64,
}

impl TowerParams {
    pub fn new(a: i64, m: i64) -> Self {
        Self { a, m }
    }

    /// `m − 4a`, the square of γ.
    pub fn c(&self) -> i64 {
        self.m - 4 * self.a
    }

    fn squares(&self) -> [BigRational; 3] {
        [rat(self.a), rat(self.m), rat(self.c())]
    }
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TowerElement {
    params: TowerParams,
    coords: [BigRational; 8],
}

impl TowerElement {
    pub fn zero(params: TowerParams) -> Self {
        Self {
            params,
            coords: std::array::from_fn(|_| BigRational::zero()),
        }
    }

    pub fn one(params: TowerParams) -> Self {
        Self::from_rational(params, BigRational::one())
    }

    pub fn from_rational(params: TowerParams, r: BigRational) -> Self {
        let mut e = Self::zero(params);
        e.coords[0] = r;
        e
    }

    pub fn from_int(params: TowerParams, n: i64) -> Self {
        Self::from_rational(params, rat(n))
    }

    pub fn from_coords(params: TowerParams, coords: [BigRational; 8]) -> Self {
        Self { params, coords }
    }

    /// The basis element at storage index `i` (0..8).
    pub fn basis(params: TowerParams, i: usize) -> Self {
        let mut e = Self::zero(params);
        e.coords[i] = BigRational::one();
        e
    }

    /// √a
    pub fn alpha(params: TowerParams) -> Self {
        Self::basis(params, 1)
    }

    /// √m
    pub fn beta(params: TowerParams) -> Self {
        Self::basis(params, 2)
    }

    /// √(m − 4a)
    pub fn gamma(params: TowerParams) -> Self {
        Self::basis(params, 3)
    }

    pub fn params(&self) -> TowerParams {
        self.params
    }

    pub fn coords(&self) -> &[BigRational; 8] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coords[0].is_one() && self.coords[1..].iter().all(Zero::is_zero)
    }

    /// The rational value if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<&BigRational> {
        self.coords[1..]
            .iter()
            .all(Zero::is_zero)
            .then_some(&self.coords[0])
    }

    /// True when every coordinate is an integer.
    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|c| c.is_integer())
    }

    fn check_params(&self, other: &Self) -> Result<()> {
        if self.params == other.params {
            Ok(())
        } else {
            Err(Error::ParamMismatch {
                left: (self.params.a, self.params.m),
                right: (other.params.a, other.params.m),
            })
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_params(other)?;
        Ok(Self {
            params: self.params,
            coords: std::array::from_fn(|i| &self.coords[i] + &other.coords[i]),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_params(other)?;
        Ok(Self {
            params: self.params,
            coords: std::array::from_fn(|i| &self.coords[i] - &other.coords[i]),
        })
    }

    /// Product in the quotient ring.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_params(other)?;
        let squares = self.params.squares();
        let mut out = Self::zero(self.params);
        for (i, u) in self.coords.iter().enumerate() {
            if u.is_zero() {
                continue;
            }
            let mi = MASKS[i];
            for (j, v) in other.coords.iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                let mj = MASKS[j];
                let common = mi & mj;
                let mut term = u * v;
                for (bit, sq) in squares.iter().enumerate() {
                    if common & (1 << bit) != 0 {
                        term *= sq;
                    }
                }
                let k = index_of_mask(mi ^ mj);
                out.coords[k] += term;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self {
            params: self.params,
            coords: std::array::from_fn(|i| &self.coords[i] * r),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.params);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Matrix of multiplication by `self`; column `j` holds `self · e_j`.
    fn multiplication_matrix(&self) -> Vec<Vec<BigRational>> {
        let mut mat = vec![vec![BigRational::zero(); 8]; 8];
        for j in 0..8 {
            let col = self * &Self::basis(self.params, j);
            for (i, c) in col.coords.into_iter().enumerate() {
                mat[i][j] = c;
            }
        }
        mat
    }

    /// Inverse found by solving the 8×8 linear system `M_u · w = 1`.
    pub fn inverse(&self) -> Result<Self> {
        let mut mat = self.multiplication_matrix();
        let mut rhs: Vec<BigRational> = (0..8)
            .map(|i| {
                if i == 0 {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            })
            .collect();
        let zero_divisor = || Error::ZeroDivisor {
            a: self.params.a,
            m: self.params.m,
        };

        for col in 0..8 {
            let pivot = (col..8)
                .find(|&r| !mat[r][col].is_zero())
                .ok_or_else(zero_divisor)?;
            mat.swap(col, pivot);
            rhs.swap(col, pivot);
            let inv = mat[col][col].recip();
            for k in col..8 {
                mat[col][k] = &mat[col][k] * &inv;
            }
            rhs[col] = &rhs[col] * &inv;
            for r in 0..8 {
                if r == col || mat[r][col].is_zero() {
                    continue;
                }
                let factor = mat[r][col].clone();
                for k in col..8 {
                    let delta = &factor * &mat[col][k];
                    mat[r][k] -= delta;
                }
                let delta = &factor * &rhs[col];
                rhs[r] -= delta;
            }
        }
        let coords: [BigRational; 8] = rhs.try_into().expect("eight coordinates");
        Ok(Self {
            params: self.params,
            coords,
        })
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.check_params(other)?;
        Ok(self * &other.inverse()?)
    }

    /// Ring automorphism changing the signs of the chosen square roots.
    pub fn conjugate(&self, flip_alpha: bool, flip_beta: bool, flip_gamma: bool) -> Self {
        let flips = (flip_alpha as usize) | (flip_beta as usize) << 1 | (flip_gamma as usize) << 2;
        let coords = std::array::from_fn(|i| {
            if (MASKS[i] & flips).count_ones() % 2 == 1 {
                -&self.coords[i]
            } else {
                self.coords[i].clone()
            }
        });
        Self {
            params: self.params,
            coords,
        }
    }

    /// Rewrites γ as `ratio · αβ`, which is a ring map when `(m − 4a) = ratio² · a · m`.
    /// The image has no γ-components.
    pub fn identify_gamma(&self, ratio: &BigRational) -> Result<Self> {
        let p = self.params;
        if (ratio * ratio * rat(p.a) * rat(p.m)) != rat(p.c()) {
            return Err(Error::Hypothesis(format!(
                "m - 4a != r^2 a m for r = {ratio} at (a, m) = ({}, {})",
                p.a, p.m
            )));
        }
        let alpha = Self::alpha(p);
        let beta = Self::beta(p);
        let gamma_image = (&alpha * &beta).scale(ratio);
        let images = [alpha, beta, gamma_image];
        let mut out = Self::zero(p);
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut term = Self::from_rational(p, c.clone());
            for (bit, img) in images.iter().enumerate() {
                if MASKS[i] & (1 << bit) != 0 {
                    term = &term * img;
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Coordinates as `"num/den"` strings in basis order.
    pub fn to_strings(&self) -> [String; 8] {
        std::array::from_fn(|i| format!("{}/{}", self.coords[i].numer(), self.coords[i].denom()))
    }

    pub fn from_strings(params: TowerParams, parts: &[String]) -> Result<Self> {
        if parts.len() != 8 {
            return Err(Error::Parse(format!(
                "expected 8 coordinates, got {}",
                parts.len()
            )));
        }
        let mut coords: [BigRational; 8] = std::array::from_fn(|_| BigRational::zero());
        for (slot, s) in coords.iter_mut().zip(parts) {
            *slot = parse_rational(s)?;
        }
        Ok(Self { params, coords })
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

impl fmt::Debug for TowerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "TowerElement({}; a={}, m={})",
            self, self.params.a, self.params.m
        )
    }
}

impl fmt::Display for TowerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, label) in self.coords.iter().zip(LABELS) {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() {
                ("-", -c)
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            if label.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{label}")?;
            } else {
                write!(f, "{mag}{label}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl<'a> Add<&'a TowerElement> for &'a TowerElement {
    type Output = TowerElement;
    fn add(self, rhs: &TowerElement) -> TowerElement {
        self.try_add(rhs).expect("tower parameters must agree")
    }
}

impl<'a> Sub<&'a TowerElement> for &'a TowerElement {
    type Output = TowerElement;
    fn sub(self, rhs: &TowerElement) -> TowerElement {
        self.try_sub(rhs).expect("tower parameters must agree")
    }
}

impl<'a> Mul<&'a TowerElement> for &'a TowerElement {
    type Output = TowerElement;
    fn mul(self, rhs: &TowerElement) -> TowerElement {
        self.try_mul(rhs).expect("tower parameters must agree")
    }
}

impl Neg for &TowerElement {
    type Output = TowerElement;
    fn neg(self) -> TowerElement {
        TowerElement {
            params: self.params,
            coords: std::array::from_fn(|i| -&self.coords[i]),
        }
    }
}

impl Serialize for TowerElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

/// Deserialization needs the parameters from context; this wrapper carries them.
pub struct TowerSeed(pub TowerParams);

impl<'de> serde::de::DeserializeSeed<'de> for TowerSeed {
    type Value = TowerElement;
    fn deserialize<D: Deserializer<'de>>(
        self,
        d: D,
    ) -> std::result::Result<TowerElement, D::Error> {
        let parts = Vec::<String>::deserialize(d)?;
        TowerElement::from_strings(self.0, &parts).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: i64, m: i64) -> TowerParams {
        TowerParams::new(a, m)
    }

    #[test]
    fn alpha_squared_is_a() {
        let params = p(3, 14);
        let a = TowerElement::alpha(params);
        assert_eq!(&a * &a, TowerElement::from_int(params, 3));
    }

    #[test]
    fn beta_gamma_is_basis_element() {
        let params = p(2, 3);
        let bg = &TowerElement::beta(params) * &TowerElement::gamma(params);
        assert_eq!(bg, TowerElement::basis(params, 6));
    }

    #[test]
    fn difference_of_squares() {
        let params = p(7, 5);
        let one = TowerElement::one(params);
        let alpha = TowerElement::alpha(params);
        let prod = &(&one + &alpha) * &(&one - &alpha);
        assert_eq!(prod, TowerElement::from_int(params, 1 - 7));
    }

    #[test]
    fn gamma_squared_uses_m_minus_4a() {
        let params = p(2, 3);
        let g = TowerElement::gamma(params);
        assert_eq!(&g * &g, TowerElement::from_int(params, -5));
        let abg = TowerElement::basis(params, 7);
        assert_eq!(&abg * &abg, TowerElement::from_int(params, 2 * 3 * -5));
    }

    #[test]
    fn inverse_of_one_and_beta() {
        let params = p(2, 5);
        assert!(TowerElement::one(params).inverse().unwrap().is_one());
        let inv = TowerElement::beta(params).inverse().unwrap();
        assert_eq!(inv, TowerElement::beta(params).scale(&ratio(1, 5)));
    }

    #[test]
    fn zero_divisor_when_a_is_square() {
        let params = p(1, 7);
        let u = &TowerElement::one(params) + &TowerElement::alpha(params);
        assert_eq!(u.inverse(), Err(Error::ZeroDivisor { a: 1, m: 7 }));
        assert!(TowerElement::zero(params).inverse().is_err());
    }

    #[test]
    fn general_inverse_roundtrip() {
        let params = p(2, 3);
        let u = TowerElement::from_coords(
            params,
            std::array::from_fn(|i| ratio(i as i64 * 3 - 7, i as i64 + 2)),
        );
        let inv = u.inverse().unwrap();
        assert!((&u * &inv).is_one());
    }

    #[test]
    fn param_mismatch_is_an_error() {
        let u = TowerElement::one(p(2, 3));
        let v = TowerElement::one(p(2, 5));
        assert!(matches!(u.try_mul(&v), Err(Error::ParamMismatch { .. })));
    }

    #[test]
    fn conjugation_is_a_ring_map() {
        let params = p(2, 3);
        let u = TowerElement::from_coords(params, std::array::from_fn(|i| ratio(i as i64 - 3, 2)));
        let v = TowerElement::from_coords(params, std::array::from_fn(|i| ratio(5 - i as i64, 3)));
        for flips in 0..8 {
            let (fa, fb, fg) = (flips & 1 != 0, flips & 2 != 0, flips & 4 != 0);
            let lhs = (&u * &v).conjugate(fa, fb, fg);
            let rhs = &u.conjugate(fa, fb, fg) * &v.conjugate(fa, fb, fg);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn json_is_eight_fraction_strings() {
        let params = p(2, 3);
        let u =
            &TowerElement::from_int(params, 2) + &TowerElement::gamma(params).scale(&ratio(-1, 2));
        let json = serde_json::to_string(&u).unwrap();
        assert_eq!(
            json,
            r#"["2/1","0/1","0/1","-1/2","0/1","0/1","0/1","0/1"]"#
        );
        let mut de = serde_json::Deserializer::from_str(&json);
        let back = serde::de::DeserializeSeed::deserialize(TowerSeed(params), &mut de).unwrap();
        assert_eq!(u, back);
    }

    #[test]
    fn display_reads_naturally() {
        let params = p(2, 3);
        let u = &TowerElement::from_int(params, 1)
            - &TowerElement::basis(params, 4).scale(&ratio(1, 2));
        assert_eq!(u.to_string(), "1 - 1/2αβ");
    }
}
