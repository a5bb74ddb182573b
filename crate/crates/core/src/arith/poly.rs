//! Polynomials in `x, y, z` over the tower ring, and their canonical form as
//! functions on the affine surface `a x² + y² + z² − xyz = m`.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use super::tower::{TowerElement, TowerParams};
use crate::error::{Error, Result};

/// Exponents of `x, y, z`.
pub type Monomial = [u32; 3];

#[derive(Clone, PartialEq, Eq)]
pub struct TowerPoly {
    params: TowerParams,
    terms: BTreeMap<Monomial, TowerElement>,
}

impl TowerPoly {
    pub fn zero(params: TowerParams) -> Self {
        Self {
            params,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: TowerElement) -> Self {
        Self::monomial(c, [0, 0, 0])
    }

    pub fn int(params: TowerParams, n: i64) -> Self {
        Self::constant(TowerElement::from_int(params, n))
    }

    pub fn monomial(c: TowerElement, exps: Monomial) -> Self {
        let mut p = Self::zero(c.params());
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn x(params: TowerParams) -> Self {
        Self::monomial(TowerElement::one(params), [1, 0, 0])
    }

    pub fn y(params: TowerParams) -> Self {
        Self::monomial(TowerElement::one(params), [0, 1, 0])
    }

    pub fn z(params: TowerParams) -> Self {
        Self::monomial(TowerElement::one(params), [0, 0, 1])
    }

    /// `a x² + y² + z² − xyz − m`, the defining polynomial of the surface.
    pub fn surface_equation(params: TowerParams) -> Self {
        let mut p = Self::zero(params);
        p.add_term([2, 0, 0], TowerElement::from_int(params, params.a));
        p.add_term([0, 2, 0], TowerElement::one(params));
        p.add_term([0, 0, 2], TowerElement::one(params));
        p.add_term([1, 1, 1], TowerElement::from_int(params, -1));
        p.add_term([0, 0, 0], TowerElement::from_int(params, -params.m));
        p
    }

    pub fn params(&self) -> TowerParams {
        self.params
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &TowerElement)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: Monomial) -> TowerElement {
        self.terms
            .get(&exps)
            .cloned()
            .unwrap_or_else(|| TowerElement::zero(self.params))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn z_degree(&self) -> u32 {
        self.terms.keys().map(|e| e[2]).max().unwrap_or(0)
    }

    fn add_term(&mut self, exps: Monomial, c: TowerElement) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&exps) {
            Some(old) => {
                let sum = &old + &c;
                if !sum.is_zero() {
                    self.terms.insert(exps, sum);
                }
            }
            None => {
                self.terms.insert(exps, c);
            }
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
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
        self.check(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(self.params);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = [e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]];
                out.add_term(e, c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.try_add(other)
            .expect("polynomial parameters must agree")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.try_sub(other)
            .expect("polynomial parameters must agree")
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.try_mul(other)
            .expect("polynomial parameters must agree")
    }

    pub fn neg(&self) -> Self {
        self.map_coefficients(|c| -c)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::int(self.params, 1), |acc, _| acc.mul(self))
    }

    pub fn scale(&self, c: &TowerElement) -> Self {
        self.map_coefficients(|t| t * c)
    }

    pub fn map_coefficients(&self, f: impl Fn(&TowerElement) -> TowerElement) -> Self {
        let mut out = Self::zero(self.params);
        for (e, c) in &self.terms {
            out.add_term(*e, f(c));
        }
        out
    }

    pub fn try_map_coefficients(
        &self,
        f: impl Fn(&TowerElement) -> Result<TowerElement>,
    ) -> Result<Self> {
        let mut out = Self::zero(self.params);
        for (e, c) in &self.terms {
            out.add_term(*e, f(c)?);
        }
        Ok(out)
    }

    /// Applies the sign-flip automorphism of the tower to every coefficient.
    pub fn conjugate(&self, flip_alpha: bool, flip_beta: bool, flip_gamma: bool) -> Self {
        self.map_coefficients(|c| c.conjugate(flip_alpha, flip_beta, flip_gamma))
    }

    /// Integer coefficients, when every coefficient is a rational integer.
    pub fn to_int_poly(&self) -> Option<IntPoly> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (e, c) in &self.terms {
            let r = c.as_rational()?;
            if !r.is_integer() {
                return None;
            }
            terms.push((*e, r.to_integer().to_i128()?));
        }
        Some(IntPoly { terms })
    }

    /// Canonical form modulo the surface equation.
    pub fn reduce_z(&self) -> SurfaceFunction {
        reduce_z(self)
    }
}

/// Rewrites every `z²` as `xyz − a x² − y² + m` until the z-degree is at most one.
pub fn reduce_z(poly: &TowerPoly) -> SurfaceFunction {
    let params = poly.params;
    // z² ≡ xyz − a x² − y² + m
    let z_squared: [(Monomial, i64); 4] = [
        ([1, 1, 1], 1),
        ([2, 0, 0], -params.a),
        ([0, 2, 0], -1),
        ([0, 0, 0], params.m),
    ];
    let mut work = poly.clone();
    loop {
        let Some((&exps, _)) = work.terms.iter().find(|(e, _)| e[2] >= 2) else {
            break;
        };
        let c = work.terms.remove(&exps).expect("present");
        let base = [exps[0], exps[1], exps[2] - 2];
        for (shift, k) in z_squared {
            if k == 0 {
                continue;
            }
            let e = [base[0] + shift[0], base[1] + shift[1], base[2] + shift[2]];
            work.add_term(e, c.scale(&BigRational::from_integer(k.into())));
        }
    }
    SurfaceFunction(work)
}

/// A function on the surface, stored in the unique representative with z-degree ≤ 1.
#[derive(Clone, PartialEq, Eq)]
pub struct SurfaceFunction(TowerPoly);

impl SurfaceFunction {
    pub fn poly(&self) -> &TowerPoly {
        &self.0
    }

    pub fn into_poly(self) -> TowerPoly {
        self.0
    }

    pub fn params(&self) -> TowerParams {
        self.0.params
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.0.mul(&other.0).reduce_z()
    }

    pub fn add(&self, other: &Self) -> Self {
        SurfaceFunction(self.0.add(&other.0))
    }

    pub fn sub(&self, other: &Self) -> Self {
        SurfaceFunction(self.0.sub(&other.0))
    }

    pub fn conjugate(&self, flip_alpha: bool, flip_beta: bool, flip_gamma: bool) -> Self {
        SurfaceFunction(self.0.conjugate(flip_alpha, flip_beta, flip_gamma))
    }
}

/// Coefficient-wise equality of canonical forms.
pub fn surface_equal(p: &SurfaceFunction, q: &SurfaceFunction) -> bool {
    p.params() == q.params() && p == q
}

fn monomial_key(e: &Monomial) -> String {
    format!("{},{},{}", e[0], e[1], e[2])
}

impl Serialize for TowerPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.terms.len()))?;
        for (e, c) in &self.terms {
            map.serialize_entry(&monomial_key(e), c)?;
        }
        map.end()
    }
}

impl Serialize for SurfaceFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

/// Parses the JSON map form `{"i,j,k": [8 fraction strings], ...}`.
pub fn surface_function_from_json(
    params: TowerParams,
    value: &serde_json::Value,
) -> Result<SurfaceFunction> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Parse("expected a JSON object".into()))?;
    let mut poly = TowerPoly::zero(params);
    for (key, coeff) in obj {
        let exps: Vec<u32> = key
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad monomial key {key:?}")))
            })
            .collect::<Result<_>>()?;
        let exps: Monomial = exps
            .try_into()
            .map_err(|_| Error::Parse(format!("bad monomial key {key:?}")))?;
        let parts: Vec<String> =
            serde_json::from_value(coeff.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        poly.add_term(exps, TowerElement::from_strings(params, &parts)?);
    }
    Ok(poly.reduce_z())
}

impl fmt::Debug for TowerPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TowerPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let mono: String = ["x", "y", "z"]
                .iter()
                .zip(e)
                .map(|(var, k)| match k {
                    0 => String::new(),
                    1 => var.to_string(),
                    _ => format!("{var}^{k}"),
                })
                .collect();
            let (neg, coeff) = match c.as_rational() {
                Some(r) => {
                    let mag = r.abs();
                    let shown = if mag.is_one() && !mono.is_empty() {
                        String::new()
                    } else {
                        mag.to_string()
                    };
                    (r.is_negative(), shown)
                }
                None => (false, format!("({c})")),
            };
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            write!(f, "{coeff}{mono}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for SurfaceFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SurfaceFunction({})", self.0)
    }
}

/// Integer polynomial in `x, y, z`, evaluated exactly or modulo `p^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly {
    pub terms: Vec<(Monomial, i128)>,
}

impl IntPoly {
    pub fn new(terms: Vec<(Monomial, i128)>) -> Self {
        Self { terms }
    }

    /// Value modulo `modulus` in `[0, modulus)`; inputs should already be reduced.
    /// Requires `modulus < 2^62` so that products stay inside `i128`.
    pub fn eval_mod(&self, pt: &[i128; 3], modulus: i128) -> i128 {
        let mut acc = 0i128;
        for (e, c) in &self.terms {
            let mut t = c.rem_euclid(modulus);
            for (v, k) in pt.iter().zip(e) {
                for _ in 0..*k {
                    t = t * v.rem_euclid(modulus) % modulus;
                }
            }
            acc = (acc + t) % modulus;
        }
        acc
    }

    /// Exact value; callers keep inputs small enough not to overflow.
    pub fn eval(&self, pt: &[i128; 3]) -> i128 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut t = *c;
                for (v, k) in pt.iter().zip(e) {
                    for _ in 0..*k {
                        t *= v;
                    }
                }
                t
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::tower::rat;

    fn params() -> TowerParams {
        TowerParams::new(3, 14)
    }

    fn konst(n: i64) -> TowerPoly {
        TowerPoly::int(params(), n)
    }

    #[test]
    fn z_squared_rewrites_once() {
        let p = params();
        let (x, y, z) = (TowerPoly::x(p), TowerPoly::y(p), TowerPoly::z(p));
        let lhs = z.pow(2).reduce_z();
        let rhs = x
            .mul(&y)
            .mul(&z)
            .sub(&x.pow(2).scale(&TowerElement::from_int(p, p.a)))
            .sub(&y.pow(2))
            .add(&konst(p.m))
            .reduce_z();
        assert!(surface_equal(&lhs, &rhs));
    }

    #[test]
    fn z_cubed_two_rewrites() {
        let p = params();
        let a = p.a;
        let m = p.m;
        let (x, y, z) = (TowerPoly::x(p), TowerPoly::y(p), TowerPoly::z(p));
        let got = z.pow(3).reduce_z();
        // (x²y² − a x² − y² + m) z − xy (a x² + y² − m)
        let sa = |n: i64| TowerElement::from_int(p, n);
        let zcoef = x
            .pow(2)
            .mul(&y.pow(2))
            .sub(&x.pow(2).scale(&sa(a)))
            .sub(&y.pow(2))
            .add(&konst(m));
        let rest = x
            .mul(&y)
            .mul(&x.pow(2).scale(&sa(a)).add(&y.pow(2)).sub(&konst(m)));
        let want = zcoef.mul(&z).sub(&rest);
        assert_eq!(got.poly(), &want);
        assert!(got.poly().z_degree() <= 1);
    }

    #[test]
    fn reduced_input_is_unchanged() {
        let p = params();
        let f = TowerPoly::x(p).add(&konst(2));
        assert_eq!(f.reduce_z().poly(), &f);
    }

    #[test]
    fn distinct_variables_differ() {
        let p = params();
        assert!(!surface_equal(
            &TowerPoly::x(p).reduce_z(),
            &TowerPoly::y(p).reduce_z()
        ));
    }

    #[test]
    fn discriminant_identity_on_surface() {
        for (a, m) in [(3, 14), (2, 3), (-3, -6), (10, 43)] {
            let p = TowerParams::new(a, m);
            let (x, y, z) = (TowerPoly::x(p), TowerPoly::y(p), TowerPoly::z(p));
            let k = |n: i64| TowerPoly::int(p, n);
            let lhs = z
                .scale(&TowerElement::from_int(p, 2))
                .sub(&x.mul(&y))
                .pow(2)
                .sub(&k(4 * (m - 4 * a)));
            let rhs = x.pow(2).sub(&k(4)).mul(&y.pow(2).sub(&k(4 * a)));
            assert!(
                surface_equal(&lhs.reduce_z(), &rhs.reduce_z()),
                "(a, m) = ({a}, {m})"
            );
        }
    }

    #[test]
    fn second_discriminant_identity_on_surface() {
        // (2ax − zy)² − (m − 4a) y² = (z² − m)(y² − 4a)
        for (a, m) in [(10, 43), (3, 14), (-5, 7)] {
            let p = TowerParams::new(a, m);
            let (x, y, z) = (TowerPoly::x(p), TowerPoly::y(p), TowerPoly::z(p));
            let k = |n: i64| TowerPoly::int(p, n);
            let lhs = x
                .scale(&TowerElement::from_int(p, 2 * a))
                .sub(&z.mul(&y))
                .pow(2)
                .sub(&y.pow(2).scale(&TowerElement::from_int(p, m - 4 * a)));
            let rhs = z.pow(2).sub(&k(m)).mul(&y.pow(2).sub(&k(4 * a)));
            assert!(surface_equal(&lhs.reduce_z(), &rhs.reduce_z()));
        }
    }

    #[test]
    fn json_map_roundtrip() {
        let p = TowerParams::new(2, 3);
        let f = TowerPoly::x(p)
            .mul(&TowerPoly::z(p))
            .add(&TowerPoly::constant(TowerElement::gamma(p)))
            .reduce_z();
        let json = serde_json::to_value(&f).unwrap();
        assert!(json.get("1,0,1").is_some());
        let back = surface_function_from_json(p, &json).unwrap();
        assert!(surface_equal(&f, &back));
    }

    #[test]
    fn int_poly_evaluation() {
        let f = TowerPoly::surface_equation(params()).to_int_poly().unwrap();
        // 3·1 + 4 + 1 − 2 − 14
        assert_eq!(f.eval(&[1, 2, 1]), -8);
        assert_eq!(f.eval_mod(&[1, 2, 1], 5), 2);
        let non_integral =
            TowerPoly::constant(TowerElement::from_rational(params(), rat(1) / rat(2)));
        assert!(non_integral.to_int_poly().is_none());
    }
}
