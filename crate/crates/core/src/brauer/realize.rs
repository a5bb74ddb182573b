//! Explicit local points realizing prescribed pairs of invariants, and the
//! order-four class of the split case evaluated as a quaternion symbol.

use std::collections::BTreeMap;

use serde::Serialize;

use super::class::{standard_classes, LocalClass, LocalRep};
use crate::arith::IntPoly;
use crate::error::{Error, Result};
use crate::padic::hilbert_local;
use crate::padic::{
    determined_local_data, field_degree, fp_points, hensel_lift_root, is_prime, legendre,
    lift_point, local_data_i128, max_level, primes_up_to, sqrt_mod_prime, square_class_int,
    valuation, Invariant, LocalPoint, Place,
};
use crate::solubility::check_params;

use Invariant::{Half, Zero};

/// Precision used for realized witnesses.
const WITNESS_LEVEL: u32 = 16;

fn witness_level(p: u64) -> u32 {
    WITNESS_LEVEL.min(max_level(p) - 1)
}

/// A square root of `n` in `Z_p` modulo `p^level`: `n = p^(2e) u` with `u` a
/// square unit, lifted from the smallest root of `u` modulo `p`.
/// With `conjugate` the other root is returned.
pub fn sqrt_zp(n: i128, p: u64, level: u32, conjugate: bool) -> Result<i128> {
    if p == 2 || !is_prime(p) || n == 0 {
        return Err(Error::NotSplit(p));
    }
    let e = valuation(n, p);
    if e % 2 == 1 {
        return Err(Error::NotSplit(p));
    }
    let u = n / (p as i128).pow(e);
    let r0 = sqrt_mod_prime(u, p).ok_or(Error::NotSplit(p))? as i128;
    let root = hensel_lift_root(&[-u, 0, 1], r0, p, level)?;
    let modulus = root.modulus();
    let r = if conjugate {
        (modulus - root.residue()) % modulus
    } else {
        root.residue()
    };
    let scale = crate::padic::checked_prime_power(p, e / 2)
        .ok_or(Error::PrecisionOverflow { p, level: e / 2 })?;
    Ok(r * scale % modulus)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuarticEval {
    /// Value with the canonical root of `m`.
    pub value: Option<Invariant>,
    /// Value with the conjugate root.
    pub conjugate: Option<Invariant>,
}

impl QuarticEval {
    pub fn roots_differ(&self) -> bool {
        self.value != self.conjugate
    }
}

fn symbol_at(value: i128, a: i64, p: u64, level: u32) -> Option<Invariant> {
    let d = determined_local_data(value, p, level)?;
    Some(hilbert_local(d, local_data_i128(a as i128, p), p))
}

/// `inv_p (√m·y − m, a)` at a point of `U(Z_p)`, for an odd prime with `m` a
/// nonzero square in `Q_p`.
pub fn quartic_class_eval(a: i64, m: i64, p: u64, pt: &LocalPoint) -> Result<QuarticEval> {
    check_params(a, m)?;
    if pt.p != p {
        return Err(Error::InvalidPlace(Place::Prime(pt.p)));
    }
    if !pt.on_surface(a, m) {
        return Err(Error::NotOnSurface(pt.coords));
    }
    let modulus = pt.modulus();
    let eval = |conj: bool| -> Result<Option<Invariant>> {
        let s = sqrt_zp(m as i128, p, pt.level, conj)?;
        let v = (s * pt.coords[1] - m as i128).rem_euclid(modulus);
        Ok(symbol_at(v, a, p, pt.level))
    };
    Ok(QuarticEval {
        value: eval(false)?,
        conjugate: eval(true)?,
    })
}

/// The two classes `(x + 2, a)` and `(y − √m, a)` compiled at `p`.
pub fn split_ramified_classes(a: i64, m: i64, p: u64, level: u32) -> Result<Vec<LocalClass>> {
    let s = sqrt_zp(m as i128, p, level, false)?;
    let a = a as i128;
    let x_plus_2 = IntPoly::new(vec![([1, 0, 0], 1), ([0, 0, 0], 2)]);
    let y_minus_root = IntPoly::new(vec![([0, 1, 0], 1), ([0, 0, 0], -s)]);
    Ok(vec![
        LocalClass::from_parts(
            "(x + 2, a)".into(),
            p,
            vec![LocalRep {
                factors: vec![x_plus_2],
                constant: a,
            }],
            u32::MAX,
        ),
        LocalClass::from_parts(
            "(y - sqrt(m), a)".into(),
            p,
            vec![LocalRep {
                factors: vec![y_minus_root],
                constant: a,
            }],
            level,
        ),
    ])
}

/// The two classes `ℬ₁ = (x² − 4, m − 4a)` and `ℬ₂ = (x + 2, m − 4a)` compiled at `p`.
pub fn odd_order_classes(a: i64, m: i64, p: u64) -> Result<Vec<LocalClass>> {
    let cls = standard_classes(a, m)?;
    Ok(vec![
        LocalClass::compile(&cls[2], p)?,
        LocalClass::compile(&cls[1], p)?,
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Setting {
    /// `p ≥ 5`, `p ∤ a`, `ord_p(m − 4a)` odd, with classes `(x² − 4, m − 4a)`, `(x + 2, m − 4a)`.
    OddOrder,
    /// `p ≥ 5` split in `Q(√m)` and ramified in `Q(√a)`, with classes `(x + 2, a)`, `(y − √m, a)`.
    SplitRamified,
}

/// Checks the local hypotheses of the setting at `p`.
pub fn check_local_hypotheses(a: i64, m: i64, p: u64, setting: Setting) -> Result<()> {
    check_params(a, m)?;
    if !is_prime(p) || p < 5 {
        return Err(Error::Hypothesis(format!("need a prime p ≥ 5, got {p}")));
    }
    match setting {
        Setting::OddOrder => {
            let c = m as i128 - 4 * a as i128;
            if a as i128 % p as i128 == 0 {
                return Err(Error::Hypothesis(format!("{p} divides a")));
            }
            if valuation(c, p).is_multiple_of(2) {
                return Err(Error::Hypothesis(format!("ord_{p}(m - 4a) is even")));
            }
        }
        Setting::SplitRamified => {
            if a == 0 || valuation(a as i128, p).is_multiple_of(2) {
                return Err(Error::Hypothesis(format!("ord_{p}(a) is even")));
            }
            if !square_class_int(m as i128, Place::Prime(p))?.is_square() {
                return Err(Error::NotSplit(p));
            }
        }
    }
    Ok(())
}

/// Global hypotheses for the odd-order setting: the splitting field has degree 8.
pub fn odd_order_global(a: i64, m: i64) -> Result<bool> {
    Ok(field_degree(a, m)? == 8)
}

/// Global hypotheses for the split-ramified setting: `Q(√m, √a)` has degree 4,
/// `(m − 4a)/(ma)` is a rational square, and every decomposition group is cyclic
/// (some quadratic subfield splits at every ramified prime and at 2).
pub fn split_ramified_global(a: i64, m: i64) -> Result<bool> {
    check_params(a, m)?;
    let (a, m) = (a as i128, m as i128);
    if crate::padic::square_class_rank(&[a, m])? != 2 {
        return Ok(false);
    }
    let c = m - 4 * a;
    if !crate::padic::is_perfect_square(crate::padic::squarefree_value(c * m * a)) {
        return Ok(false);
    }
    let mut primes: Vec<u64> = crate::padic::factorize(2 * a * m).into_keys().collect();
    primes.dedup();
    for q in primes {
        let place = Place::Prime(q);
        let split = [a, m, a * m]
            .iter()
            .map(|&d| square_class_int(d, place))
            .collect::<Result<Vec<_>>>()?;
        if !split.iter().any(|s| s.is_square()) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RealizedPoint {
    pub point: LocalPoint,
    /// Template family (or sweep) that produced the point.
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Realization {
    pub a: i64,
    pub m: i64,
    pub p: u64,
    pub setting: Setting,
    pub classes: Vec<String>,
    pub witnesses: BTreeMap<Vec<Invariant>, RealizedPoint>,
    /// Requested tuples without a witness.
    pub missing: Vec<Vec<Invariant>>,
}

impl Realization {
    pub fn complete(&self) -> bool {
        self.missing.is_empty()
    }
}

fn leg(n: i128, p: u64) -> i8 {
    legendre(n, p).expect("odd prime")
}

type Template = (String, [Invariant; 2], Vec<[i128; 3]>);

fn odd_order_templates(a: i64, p: u64) -> Vec<Template> {
    let pi = p as i128;
    let a = a as i128;
    let r = |n: i128| n.rem_euclid(pi);
    let diag = |ys: Vec<i128>| ys.into_iter().map(|y| [2, y, y]).collect::<Vec<_>>();
    let mut out = vec![
        (
            "(2, t, t), (t^2 - 4a / p) = 1".into(),
            [Zero, Zero],
            diag((0..pi).filter(|&t| leg(t * t - 4 * a, p) == 1).collect()),
        ),
        (
            "(2, s, s), (s^2 - 4a / p) = -1".into(),
            [Half, Zero],
            diag((0..pi).filter(|&s| leg(s * s - 4 * a, p) == -1).collect()),
        ),
    ];
    let es: Vec<i128> = (1..pi)
        .filter(|&e| leg(e, p) == -1 && leg(e * e - 4 * e, p) == 1)
        .collect();
    let fs: Vec<i128> = (1..pi)
        .filter(|&f| leg(f, p) == -1 && leg(f * f - 4 * f, p) == -1)
        .collect();
    if leg(a, p) == 1 {
        let roots = sqrt_mod_prime(a, p)
            .map(|s| vec![s as i128, pi - s as i128])
            .unwrap_or_default();
        let fam = |vals: &[i128]| {
            vals.iter()
                .flat_map(|&e| {
                    roots
                        .iter()
                        .map(move |&s| [r(e - 2), r(2 * s), r((e - 2) * s)])
                })
                .collect::<Vec<_>>()
        };
        out.push(("(e - 2, 2√a, (e - 2)√a)".into(), [Zero, Half], fam(&es)));
        out.push(("(f - 2, 2√a, (f - 2)√a)".into(), [Half, Half], fam(&fs)));
    } else {
        let fam = |vals: &[i128]| {
            vals.iter()
                .filter_map(|&e| {
                    sqrt_mod_prime(a * e, p).map(|al| [r(e - 2), al as i128, al as i128])
                })
                .collect::<Vec<_>>()
        };
        out.push(("(e - 2, α, α), α² = ae".into(), [Zero, Half], fam(&es)));
        out.push(("(f - 2, β, β), β² = af".into(), [Half, Half], fam(&fs)));
    }
    out
}

/// Smallest prime `l` with `(l/p) = −1` and `p ∤ l + 1`.
fn auxiliary_prime(p: u64) -> Option<u64> {
    primes_up_to(64 * p.max(8))
        .into_iter()
        .find(|&l| l != p && leg(l as i128, p) == -1 && (l + 1) % p != 0)
}

fn split_ramified_templates(p: u64) -> Vec<Template> {
    let pi = p as i128;
    let squares: Vec<i128> = (1..pi).filter(|&s| leg(s, p) == 1).collect();
    let non: Vec<i128> = (1..pi).filter(|&t| leg(t, p) == -1).collect();
    let mut out = vec![
        (
            "(2, s, s), (s/p) = 1".into(),
            [Zero, Zero],
            squares.iter().map(|&s| [2, s, s]).collect(),
        ),
        (
            "(2, t, t), (t/p) = -1".into(),
            [Zero, Half],
            non.iter().map(|&t| [2, t, t]).collect(),
        ),
    ];
    if let Some(l) = auxiliary_prime(p) {
        let l = l as i128 % pi;
        let inv = crate::padic::inv_mod(l, pi).expect("l is a unit");
        let x = (l * l + 1) % pi * inv % pi;
        out.push((
            "((l^2 + 1)/l, s, ls)".into(),
            [Half, Zero],
            squares.iter().map(|&s| [x, s, l * s % pi]).collect(),
        ));
        out.push((
            "((l^2 + 1)/l, t, lt)".into(),
            [Half, Half],
            non.iter().map(|&t| [x, t, l * t % pi]).collect(),
        ));
    }
    out
}

/// For each target pair, a point of `U(Z_p)` on which the setting's two classes
/// take those invariants. Template families are tried first, then every smooth
/// point of `U(F_p)`. Unrealized targets are listed in `missing`.
pub fn realize_pairs(
    a: i64,
    m: i64,
    p: u64,
    setting: Setting,
    targets: &[[Invariant; 2]],
) -> Result<Realization> {
    check_local_hypotheses(a, m, p, setting)?;
    let level = witness_level(p);
    let (classes, templates) = match setting {
        Setting::OddOrder => (odd_order_classes(a, m, p)?, odd_order_templates(a, p)),
        Setting::SplitRamified => (
            split_ramified_classes(a, m, p, level)?,
            split_ramified_templates(p),
        ),
    };
    let eval = |pt: &LocalPoint| -> Option<[Invariant; 2]> {
        Some([classes[0].eval(pt)?, classes[1].eval(pt)?])
    };
    let mut witnesses = BTreeMap::new();
    let mut missing = Vec::new();
    let sweep: Vec<[i128; 3]> = fp_points(a, m, p)?
        .into_iter()
        .filter(|q| !q.singular)
        .map(|q| q.coords.map(|c| c as i128))
        .collect();
    for target in targets {
        let from_templates = templates
            .iter()
            .filter(|(_, t, _)| t == target)
            .flat_map(|(name, _, pts)| pts.iter().map(move |pt| (name.clone(), *pt)));
        let from_sweep = sweep
            .iter()
            .map(|pt| ("smooth point sweep".to_string(), *pt));
        let found = from_templates.chain(from_sweep).find_map(|(source, pt)| {
            let lifted = lift_point(pt, a, m, p, level).ok()?;
            (eval(&lifted)? == *target).then_some(RealizedPoint {
                point: lifted,
                source,
            })
        });
        match found {
            Some(w) => {
                witnesses.insert(target.to_vec(), w);
            }
            None => missing.push(target.to_vec()),
        }
    }
    Ok(Realization {
        a,
        m,
        p,
        setting,
        classes: classes.iter().map(|c| c.label.clone()).collect(),
        witnesses,
        missing,
    })
}

/// All four pairs in `(Z/2)²`.
pub fn all_pairs() -> [[Invariant; 2]; 4] {
    [[Zero, Zero], [Zero, Half], [Half, Zero], [Half, Half]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zp_square_roots() {
        for (n, p) in [(2i128, 7u64), (-150, 5), (11, 5), (25 * 6, 5)] {
            let l = 8;
            let md = crate::padic::checked_prime_power(p, l).unwrap();
            for conj in [false, true] {
                match sqrt_zp(n, p, l, conj) {
                    Ok(s) => assert_eq!((s * s - n).rem_euclid(md), 0, "n={n} p={p}"),
                    Err(e) => assert_eq!(e, Error::NotSplit(p)),
                }
            }
        }
        assert!(sqrt_zp(3, 7, 4, false).is_err());
        assert!(sqrt_zp(5, 5, 4, false).is_err());
    }

    #[test]
    fn odd_order_realizes_everything() {
        // a = 2, m = 3: m − 4a = −5.
        let r = realize_pairs(2, 3, 5, Setting::OddOrder, &all_pairs()).unwrap();
        assert!(r.complete(), "{:?}", r.missing);
        let cls = odd_order_classes(2, 3, 5).unwrap();
        for (t, w) in &r.witnesses {
            assert!(w.point.on_surface(2, 3));
            assert_eq!(
                &vec![
                    cls[0].eval(&w.point).unwrap(),
                    cls[1].eval(&w.point).unwrap()
                ],
                t
            );
        }
    }

    #[test]
    fn split_ramified_fixture() {
        let (a, m) = (-60, -150);
        assert!(split_ramified_global(a, m).unwrap());
        assert!(!split_ramified_global(5, -25).unwrap());
        let r = realize_pairs(a, m, 5, Setting::SplitRamified, &all_pairs()).unwrap();
        assert!(r.complete(), "{:?}", r.missing);
        for w in r.witnesses.values() {
            assert!(!w.source.contains("sweep"), "{}", w.source);
        }
    }

    #[test]
    fn quartic_symbol_values() {
        let (a, m, p) = (-60, -150, 5);
        let s = (1..5).find(|&s| leg(s, p) == 1).unwrap();
        let t = (1..5).find(|&t| leg(t, p) == -1).unwrap();
        let at = |y: i128| lift_point([2, y, y], a, m, p, 10).unwrap();
        // (√m·y − m, a) = (√m, a) − (y − √m, a), and v(√m) = 1.
        let base = symbol_at(sqrt_zp(m as i128, p, 10, false).unwrap(), a, p, 10).unwrap();
        assert_eq!(
            quartic_class_eval(a, m, p, &at(s)).unwrap().value,
            Some(base)
        );
        assert_eq!(
            quartic_class_eval(a, m, p, &at(t)).unwrap().value,
            Some(base + Half)
        );
        // 3 is not a square mod 5.
        let base = fp_points(2, 3, 5)
            .unwrap()
            .into_iter()
            .find(|q| !q.singular)
            .unwrap();
        let inert = lift_point(base.coords.map(|c| c as i128), 2, 3, 5, 4).unwrap();
        assert_eq!(quartic_class_eval(2, 3, 5, &inert), Err(Error::NotSplit(5)));
    }

    #[test]
    fn hypotheses_are_checked() {
        assert!(check_local_hypotheses(2, 3, 3, Setting::OddOrder).is_err());
        assert!(check_local_hypotheses(3, 14, 5, Setting::OddOrder).is_err());
        assert!(check_local_hypotheses(-60, -150, 5, Setting::SplitRamified).is_ok());
    }
}
