//! Sets of local invariants achieved over `U(Z_p)` and `U(R)`.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Signed;
use serde::Serialize;

use super::class::{BrauerClass, LocalClass};
use crate::arith::IntPoly;
use crate::error::{Error, Result};
use crate::padic::{
    checked_prime_power, gradient_residue, is_prime, max_level, sqrt_mod_prime, square_class,
    surface_residue, valuation, Invariant, LocalPoint, Place,
};
use crate::solubility::{check_params, soluble_oracle, OracleResult, DEFAULT_DEPTH_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ProfileStatus {
    /// Every residue branch was resolved: the achieved set is complete.
    Exhaustive,
    /// A search cap was hit after certifying some values: the set is a lower bound.
    Sampled,
    /// A search cap was hit before any value was certified.
    Inconclusive,
}

/// Limits for the residue-class search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Caps {
    /// Deepest level `N` (residues mod `p^N`); `None` uses `64·N₀` with
    /// `N₀ = v_p(4(m − 4a)) + v_p(4a) + 8`, clipped to the residue range.
    pub max_level: Option<u32>,
    pub max_nodes: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_level: None,
            max_nodes: 2_000_000,
        }
    }
}

impl Caps {
    pub fn with_level(level: u32) -> Self {
        Caps {
            max_level: Some(level),
            ..Caps::default()
        }
    }

    pub(crate) fn level_for(&self, a: i64, m: i64, p: u64) -> u32 {
        let v = |n: i128| if n == 0 { 0 } else { valuation(n, p) };
        let n0 = v(4 * (m as i128 - 4 * a as i128)) + v(4 * a as i128) + 8;
        let hard = max_level(p) - 1;
        self.max_level.unwrap_or(64 * n0).min(hard).max(1)
    }
}

/// Evidence that a tuple of invariants is achieved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Witness {
    /// A residue point satisfying Hensel's criterion with the lift staying in its class.
    Padic(LocalPoint),
    /// Real points with this `x`-coordinate exist and realize the tuple.
    Real { x: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JointProfile {
    pub place: Place,
    pub classes: Vec<String>,
    pub achieved: BTreeMap<Vec<Invariant>, Witness>,
    pub status: ProfileStatus,
    /// Name of the rule that decided the profile without enumeration, if any.
    pub rule: Option<String>,
    pub levels: u32,
    pub nodes: usize,
}

impl JointProfile {
    pub fn is_full(&self) -> bool {
        self.achieved.len() == 1 << self.classes.len()
    }

    /// Projection onto one class.
    pub fn marginal(&self, i: usize) -> InvariantProfile {
        InvariantProfile {
            place: self.place,
            class: self.classes[i].clone(),
            achieved: self.achieved.keys().map(|t| t[i]).collect(),
            status: self.status,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantProfile {
    #[serde(rename = "p")]
    pub place: Place,
    pub class: String,
    pub achieved: BTreeSet<Invariant>,
    pub status: ProfileStatus,
}

fn mod_p_points(a: i64, m: i64, p: u64) -> Vec<[i128; 3]> {
    let pi = p as i128;
    let mut out = Vec::new();
    if p <= 64 {
        for x in 0..pi {
            for y in 0..pi {
                for z in 0..pi {
                    if surface_residue(a, m, [x, y, z], pi) == 0 {
                        out.push([x, y, z]);
                    }
                }
            }
        }
        return out;
    }
    // z² − xy·z + (ax² + y² − m) = 0, solved for z.
    let inv2 = (pi + 1) / 2;
    for x in 0..pi {
        for y in 0..pi {
            let b = x * y % pi;
            let c = (a as i128 * (x * x % pi) + y * y - m as i128).rem_euclid(pi);
            let disc = (b * b - 4 * c).rem_euclid(pi);
            if let Some(r) = sqrt_mod_prime(disc, p) {
                let r = r as i128;
                let mut zs = vec![(b + r) * inv2 % pi, (b - r).rem_euclid(pi) * inv2 % pi];
                zs.sort_unstable();
                zs.dedup();
                out.extend(zs.into_iter().map(|z| [x, y, z]));
            }
        }
    }
    out.sort_unstable();
    out
}

struct Surface {
    a: i64,
    m: i64,
    p: u64,
    probe: i128,
    probe_level: u32,
}

impl Surface {
    fn new(a: i64, m: i64, p: u64) -> Self {
        let probe_level = max_level(p);
        Surface {
            a,
            m,
            p,
            probe: checked_prime_power(p, probe_level).expect("fits"),
            probe_level,
        }
    }

    fn val(&self, r: i128) -> u32 {
        if r == 0 {
            self.probe_level
        } else {
            valuation(r, self.p)
        }
    }

    /// The class of `r` mod `p^k` contains a `Z_p`-point: Newton's method along a
    /// coordinate with `v(f) > 2 v(g)` and `v(f) − v(g) ≥ k` converges inside the class.
    fn certified(&self, r: &[i128; 3], k: u32) -> bool {
        let vf = self.val(surface_residue(self.a, self.m, *r, self.probe));
        gradient_residue(self.a, *r, self.probe).iter().any(|&g| {
            let vg = self.val(g);
            2 * vg < self.probe_level && vf > 2 * vg && vf >= k + vg
        })
    }

    /// Solutions mod `p^(k+1)` above `r`: `f(r + p^k t) ≡ f(r) + p^k ∇f(r)·t`.
    fn children(&self, r: &[i128; 3], k: u32, out: &mut Vec<[i128; 3]>) {
        let p = self.p as i128;
        let pk = checked_prime_power(self.p, k).expect("below probe level");
        let next = pk * p;
        let q = surface_residue(self.a, self.m, *r, next) / pk;
        let g = gradient_residue(self.a, *r, p);
        let child = |t: [i128; 3]| [r[0] + t[0] * pk, r[1] + t[1] * pk, r[2] + t[2] * pk];
        match g.iter().position(|&gi| gi != 0) {
            None => {
                if q == 0 {
                    for i in 0..p {
                        for j in 0..p {
                            for l in 0..p {
                                out.push(child([i, j, l]));
                            }
                        }
                    }
                }
            }
            Some(i) => {
                let inv = crate::padic::inv_mod(g[i], p).expect("nonzero mod p");
                let (j, l) = ((i + 1) % 3, (i + 2) % 3);
                for tj in 0..p {
                    for tl in 0..p {
                        let mut t = [0i128; 3];
                        t[j] = tj;
                        t[l] = tl;
                        t[i] = (-(q + g[j] * tj + g[l] * tl)).rem_euclid(p) * inv % p;
                        out.push(child(t));
                    }
                }
            }
        }
    }
}

/// Joint invariants of the compiled classes over `U(Z_p)`, by refining residue
/// classes level by level until each is dead, or carries a determined tuple that is
/// either already achieved or certified by a Hensel witness.
pub fn joint_profile_local(
    classes: &[LocalClass],
    a: i64,
    m: i64,
    p: u64,
    caps: &Caps,
) -> JointProfile {
    let surface = Surface::new(a, m, p);
    let level_cap = classes
        .iter()
        .map(|c| c.coefficient_level)
        .fold(caps.level_for(a, m, p), u32::min);
    let mut achieved: BTreeMap<Vec<Invariant>, Witness> = BTreeMap::new();
    let mut frontier = mod_p_points(a, m, p);
    let mut truncated = false;
    let mut nodes = 0usize;
    let mut level = 1;
    loop {
        let mut next = Vec::new();
        for r in &frontier {
            nodes += 1;
            let tuple: Option<Vec<Invariant>> =
                classes.iter().map(|c| c.eval_residue(r, level)).collect();
            match tuple {
                Some(t) if achieved.contains_key(&t) => continue,
                Some(t) if surface.certified(r, level) => {
                    let pt = LocalPoint {
                        p,
                        level,
                        coords: *r,
                    };
                    achieved.insert(t, Witness::Padic(pt));
                    continue;
                }
                _ => {}
            }
            if level >= level_cap {
                truncated = true;
            } else {
                surface.children(r, level, &mut next);
            }
        }
        if next.is_empty() {
            break;
        }
        if nodes + next.len() > caps.max_nodes {
            truncated = true;
            break;
        }
        frontier = next;
        level += 1;
    }
    let status = if !truncated {
        ProfileStatus::Exhaustive
    } else if achieved.is_empty() {
        ProfileStatus::Inconclusive
    } else {
        ProfileStatus::Sampled
    };
    JointProfile {
        place: Place::Prime(p),
        classes: classes.iter().map(|c| c.label.clone()).collect(),
        achieved,
        status,
        rule: None,
        levels: level,
        nodes,
    }
}

fn rule_profile(
    classes: &[BrauerClass],
    a: i64,
    m: i64,
    p: u64,
    rule: &str,
) -> Result<JointProfile> {
    let labels: Vec<String> = classes.iter().map(|c| c.label.clone()).collect();
    let mut achieved = BTreeMap::new();
    let status = match soluble_oracle(a, m, p, DEFAULT_DEPTH_CAP)? {
        OracleResult::Soluble(w) => {
            achieved.insert(vec![Invariant::Zero; classes.len()], Witness::Padic(w));
            ProfileStatus::Exhaustive
        }
        OracleResult::Insoluble { .. } => ProfileStatus::Exhaustive,
        OracleResult::Inconclusive => ProfileStatus::Inconclusive,
    };
    Ok(JointProfile {
        place: Place::Prime(p),
        classes: labels,
        achieved,
        status,
        rule: Some(rule.to_string()),
        levels: 0,
        nodes: 0,
    })
}

/// The rule that decides the profile at `p` without enumeration, if one applies.
fn short_circuit(classes: &[BrauerClass], p: u64) -> Result<Option<&'static str>> {
    let mut all_square = true;
    let mut all_coprime_standard = p != 2;
    for class in classes {
        for rep in &class.representations {
            let sq = square_class(&rep.constant, Place::Prime(p))?;
            all_square &= sq.is_square();
        }
        let c = super::class::rational_to_i128(class.constant())?;
        all_coprime_standard &= class.vanishes_off_constant && c % p as i128 != 0;
    }
    Ok(if all_square {
        Some("constant is a local square")
    } else if all_coprime_standard {
        Some("odd prime not dividing the constant")
    } else {
        None
    })
}

const REAL_FACTORS: [(&str, [(i128, u32); 2]); 3] = [
    ("x - 2", [(1, 1), (-2, 0)]),
    ("x + 2", [(1, 1), (2, 0)]),
    ("x^2 - 4", [(1, 2), (-4, 0)]),
];

/// Sign of a factor on the real region containing `x`, if the factor is one of
/// `x ± 2`, `x² − 4` (whose signs are constant on `x < −2`, `|x| < 2`, `x > 2`).
fn real_factor_sign(f: &IntPoly, x: i128) -> Option<bool> {
    let mut terms = f.terms.clone();
    terms.sort_unstable();
    let known = REAL_FACTORS.iter().any(|(_, shape)| {
        let mut t: Vec<([u32; 3], i128)> = shape.iter().map(|&(c, e)| ([e, 0, 0], c)).collect();
        t.sort_unstable();
        t == terms
    });
    known.then(|| f.eval(&[x, 0, 0]) < 0)
}

/// Invariants at the real place. With a positive constant every symbol vanishes.
/// Otherwise, when `m − 4a < 0`, the `x`-coordinates of real points are `|x| > 2` together with
/// `|x| < 2` when `m > 0` (the form `y² + z² − xyz` is definite there, and
/// `x = ±2` needs `m − 4a ≥ 0`), and symbols in `x ± 2`, `x² − 4` have constant sign
/// on each region.
fn real_profile(classes: &[BrauerClass], a: i64, m: i64) -> Result<JointProfile> {
    let labels: Vec<String> = classes.iter().map(|c| c.label.clone()).collect();
    let mut achieved = BTreeMap::new();
    let positive = classes.iter().all(|c| c.constant().is_positive());
    let mut status = ProfileStatus::Exhaustive;
    let mut rule = Some("positive constant".to_string());
    if positive {
        achieved.insert(vec![Invariant::Zero; classes.len()], Witness::Real { x: 3 });
    } else {
        rule = Some("sign regions in x".to_string());
        if (m as i128) > 4 * a as i128 {
            return Ok(JointProfile {
                place: Place::Infinite,
                classes: labels,
                achieved,
                status: ProfileStatus::Inconclusive,
                rule: None,
                levels: 0,
                nodes: 0,
            });
        }
        let mut xs = vec![-3i64, 3];
        if m > 0 {
            xs.push(0);
        }
        'region: for x in xs {
            let mut tuple = Vec::new();
            for class in classes {
                let rep = &class.representations[0];
                let mut neg = false;
                for f in &rep.factors {
                    let Some(poly) = f.poly().to_int_poly() else {
                        status = ProfileStatus::Inconclusive;
                        continue 'region;
                    };
                    match real_factor_sign(&poly, x as i128) {
                        Some(s) => neg ^= s,
                        None => {
                            status = ProfileStatus::Inconclusive;
                            continue 'region;
                        }
                    }
                }
                let c_neg = rep.constant.is_negative();
                tuple.push(if neg && c_neg {
                    Invariant::Half
                } else {
                    Invariant::Zero
                });
            }
            achieved.entry(tuple).or_insert(Witness::Real { x });
        }
        if status != ProfileStatus::Exhaustive {
            rule = None;
            if !achieved.is_empty() {
                status = ProfileStatus::Sampled;
            }
        }
    }
    Ok(JointProfile {
        place: Place::Infinite,
        classes: labels,
        achieved,
        status,
        rule,
        levels: 0,
        nodes: 0,
    })
}

/// Jointly achieved invariant tuples of `classes` over `U(Z_v)`.
pub fn joint_profile(
    classes: &[BrauerClass],
    a: i64,
    m: i64,
    place: Place,
    caps: &Caps,
) -> Result<JointProfile> {
    check_params(a, m)?;
    match place {
        Place::Infinite => real_profile(classes, a, m),
        Place::Prime(p) => {
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            if let Some(rule) = short_circuit(classes, p)? {
                return rule_profile(classes, a, m, p, rule);
            }
            joint_profile_enumerated(classes, a, m, p, caps)
        }
    }
}

/// The residue-class enumeration with no shortcut rules.
pub fn joint_profile_enumerated(
    classes: &[BrauerClass],
    a: i64,
    m: i64,
    p: u64,
    caps: &Caps,
) -> Result<JointProfile> {
    let local = classes
        .iter()
        .map(|c| LocalClass::compile(c, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(joint_profile_local(&local, a, m, p, caps))
}

/// Invariants of one class over `U(Z_v)`.
pub fn invariant_profile(
    class: &BrauerClass,
    a: i64,
    m: i64,
    place: Place,
    caps: &Caps,
) -> Result<InvariantProfile> {
    Ok(joint_profile(std::slice::from_ref(class), a, m, place, caps)?.marginal(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brauer::class::standard_classes;
    use Invariant::{Half, Zero};

    fn single(a: i64, m: i64, place: Place, i: usize) -> InvariantProfile {
        let cls = standard_classes(a, m).unwrap();
        invariant_profile(&cls[i], a, m, place, &Caps::default()).unwrap()
    }

    #[test]
    fn obstruction_at_two_for_three_fourteen() {
        let prof = single(3, 14, Place::Prime(2), 2);
        assert_eq!(prof.achieved, BTreeSet::from([Half]));
        assert_eq!(prof.status, ProfileStatus::Exhaustive);
    }

    #[test]
    fn obstruction_at_three_for_ten_fortythree() {
        let prof = single(10, 43, Place::Prime(3), 2);
        assert_eq!(prof.achieved, BTreeSet::from([Half]));
        assert_eq!(prof.status, ProfileStatus::Exhaustive);
    }

    #[test]
    fn shortcut_matches_enumeration() {
        for (a, m) in [(3i64, 14i64), (2, 3), (-3, -6), (5, 7)] {
            let cls = standard_classes(a, m).unwrap();
            for p in [3u64, 5, 7, 11] {
                let rule = joint_profile(&cls, a, m, Place::Prime(p), &Caps::default()).unwrap();
                let full = joint_profile_enumerated(&cls, a, m, p, &Caps::default()).unwrap();
                assert_eq!(full.status, ProfileStatus::Exhaustive);
                let keys = |j: &JointProfile| j.achieved.keys().cloned().collect::<Vec<_>>();
                if rule.rule.is_some() {
                    assert_eq!(keys(&rule), keys(&full), "a={a} m={m} p={p}");
                }
            }
        }
    }

    #[test]
    fn witnesses_lie_on_surface_and_realize_values() {
        let (a, m) = (-3, -6);
        let cls = standard_classes(a, m).unwrap();
        let local: Vec<LocalClass> = cls
            .iter()
            .map(|c| LocalClass::compile(c, 2).unwrap())
            .collect();
        let prof = joint_profile_local(&local, a, m, 2, &Caps::default());
        assert_eq!(prof.status, ProfileStatus::Exhaustive);
        for (t, w) in &prof.achieved {
            let Witness::Padic(pt) = w else { panic!() };
            assert!(pt.on_surface(a, m));
            let vals: Vec<Invariant> = local.iter().map(|c| c.eval(pt).unwrap()).collect();
            assert_eq!(&vals, t);
        }
    }

    #[test]
    fn real_place() {
        assert_eq!(
            single(3, 14, Place::Infinite, 2).achieved,
            BTreeSet::from([Zero])
        );
        // m − 4a < 0 and m > 0: |x| < 2 realizes (x² − 4, c) = 1/2.
        let p = single(3, 5, Place::Infinite, 2);
        assert_eq!(p.achieved, BTreeSet::from([Zero, Half]));
        // m − 4a < 0 and m < 0: only |x| > 2 occurs.
        let p = single(3, -5, Place::Infinite, 2);
        assert_eq!(p.achieved, BTreeSet::from([Zero]));
        let p = single(3, -5, Place::Infinite, 0);
        assert_eq!(p.achieved, BTreeSet::from([Zero, Half]));
    }

    #[test]
    fn level_cap_one_is_not_exhaustive() {
        let cls = standard_classes(3, 14).unwrap();
        let prof = joint_profile(&cls, 3, 14, Place::Prime(2), &Caps::with_level(1)).unwrap();
        assert_ne!(prof.status, ProfileStatus::Exhaustive);
    }
}
