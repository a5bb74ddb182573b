//! Adelic evaluation of the standard classes and the resulting verdict.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::class::{standard_classes, BrauerClass};
use super::profile::{joint_profile, Caps, InvariantProfile, JointProfile, ProfileStatus, Witness};
use crate::error::Result;
use crate::padic::{factorize, squarefree_part, Invariant, Place};
use crate::solubility::{check_params, everywhere_locally_soluble};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    ObstructionCertified,
    NoObstructionCertified,
    Inconclusive,
    LocallyInsoluble,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlaceWitness {
    pub p: Place,
    pub values: Vec<Invariant>,
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdelicVerdict {
    pub a: i64,
    pub m: i64,
    pub relevant_places: Vec<Place>,
    pub classes: Vec<String>,
    pub places: Vec<InvariantProfile>,
    pub verdict: Verdict,
    /// Classes whose local invariants are forced at every place and sum to 1/2.
    pub certifying_classes: Vec<String>,
    pub witnesses: Vec<PlaceWitness>,
    pub blocking_places: Vec<Place>,
    #[serde(skip)]
    pub joint: Vec<JointProfile>,
}

impl AdelicVerdict {
    pub fn profile(&self, place: Place, class: &str) -> Option<&InvariantProfile> {
        self.places
            .iter()
            .find(|p| p.place == place && p.class == class)
    }
}

/// `∞`, `2`, and the odd primes dividing `m − 4a`; the standard classes vanish on
/// `U(Z_p)` at every other prime.
pub fn relevant_places(a: i64, m: i64) -> Vec<Place> {
    let c = m as i128 - 4 * a as i128;
    let mut out = vec![Place::Infinite, Place::Prime(2)];
    out.extend(
        factorize(c)
            .into_keys()
            .filter(|&p| p != 2)
            .map(Place::Prime),
    );
    out
}

fn bits(t: &[Invariant]) -> usize {
    t.iter()
        .enumerate()
        .filter(|(_, v)| v.is_half())
        .map(|(i, _)| 1 << i)
        .sum()
}

/// Subset of `(Z/2)^n` reachable as a sum of one tuple from each set.
fn sumset<'a>(sets: impl Iterator<Item = &'a JointProfile>, n: usize) -> Vec<bool> {
    let mut acc = vec![false; 1 << n];
    acc[0] = true;
    for s in sets {
        let mut next = vec![false; 1 << n];
        for (u, _) in acc.iter().enumerate().filter(|(_, &r)| r) {
            for t in s.achieved.keys() {
                next[u ^ bits(t)] = true;
            }
        }
        acc = next;
    }
    acc
}

/// Verdict for an arbitrary list of classes whose invariants vanish off the given places.
pub fn verdict_for(
    classes: &[BrauerClass],
    a: i64,
    m: i64,
    places: &[Place],
    caps: &Caps,
) -> Result<AdelicVerdict> {
    check_params(a, m)?;
    let labels: Vec<String> = classes.iter().map(|c| c.label.clone()).collect();
    let sol = everywhere_locally_soluble(a, m)?;
    let mut out = AdelicVerdict {
        a,
        m,
        relevant_places: places.to_vec(),
        classes: labels.clone(),
        places: Vec::new(),
        verdict: Verdict::LocallyInsoluble,
        certifying_classes: Vec::new(),
        witnesses: Vec::new(),
        blocking_places: sol.blocking_places.clone(),
        joint: Vec::new(),
    };
    if !sol.soluble {
        return Ok(out);
    }
    let joint = places
        .iter()
        .map(|&v| joint_profile(classes, a, m, v, caps))
        .collect::<Result<Vec<_>>>()?;
    let n = classes.len();
    let exhaustive = joint.iter().all(|j| j.status == ProfileStatus::Exhaustive);
    // Achieved sets are always certified, so a zero sum is a genuine orthogonal adele.
    let reachable = sumset(joint.iter(), n);
    out.verdict = if reachable[0] {
        Verdict::NoObstructionCertified
    } else if exhaustive {
        Verdict::ObstructionCertified
    } else {
        Verdict::Inconclusive
    };
    for j in &joint {
        for i in 0..n {
            out.places.push(j.marginal(i));
        }
        for (t, w) in &j.achieved {
            out.witnesses.push(PlaceWitness {
                p: j.place,
                values: t.clone(),
                witness: w.clone(),
            });
        }
    }
    if exhaustive {
        for (i, label) in labels.iter().enumerate() {
            let forced: Option<Vec<Invariant>> = joint
                .iter()
                .map(|j| {
                    let s: BTreeSet<Invariant> = j.achieved.keys().map(|t| t[i]).collect();
                    (s.len() == 1).then(|| *s.iter().next().unwrap())
                })
                .collect();
            if forced.is_some_and(|f| f.into_iter().sum::<Invariant>() == Invariant::Half) {
                out.certifying_classes.push(label.clone());
            }
        }
    }
    out.joint = joint;
    Ok(out)
}

pub fn bm_verdict_with(a: i64, m: i64, caps: &Caps) -> Result<AdelicVerdict> {
    let classes = standard_classes(a, m)?;
    verdict_for(&classes, a, m, &relevant_places(a, m), caps)
}

/// Brauer–Manin verdict for the integral Hasse principle from the standard classes.
pub fn bm_verdict(a: i64, m: i64) -> Result<AdelicVerdict> {
    bm_verdict_with(a, m, &Caps::default())
}

/// Every odd prime in the squarefree part of `m − 4a` is `3` or divides `gcd(a, m)`.
pub fn thm11_consistency(a: i64, m: i64) -> bool {
    let c = m as i128 - 4 * a as i128;
    if c == 0 {
        return false;
    }
    let g = num_integer::gcd(a as i128, m as i128);
    let (_, primes) = squarefree_part(c);
    primes
        .into_iter()
        .filter(|&p| p != 2)
        .all(|p| p == 3 || (g != 0 && g % p as i128 == 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn places_for_small_cases() {
        assert_eq!(
            relevant_places(3, 14),
            vec![Place::Infinite, Place::Prime(2)]
        );
        assert_eq!(
            relevant_places(10, 43),
            vec![Place::Infinite, Place::Prime(2), Place::Prime(3)]
        );
        assert_eq!(
            relevant_places(-3, -6),
            vec![Place::Infinite, Place::Prime(2), Place::Prime(3)]
        );
    }

    #[test]
    fn three_fourteen_is_obstructed() {
        let v = bm_verdict(3, 14).unwrap();
        assert_eq!(v.verdict, Verdict::ObstructionCertified);
        assert!(v.certifying_classes.contains(&"(x^2 - 4, 2)".to_string()));
        let two = v.profile(Place::Prime(2), "(x^2 - 4, 2)").unwrap();
        assert_eq!(two.achieved, BTreeSet::from([Invariant::Half]));
    }

    #[test]
    fn insoluble_is_reported_first() {
        let v = bm_verdict(5, 3).unwrap();
        assert_eq!(v.verdict, Verdict::LocallyInsoluble);
        assert_eq!(v.blocking_places, vec![Place::Prime(2)]);
    }

    #[test]
    fn consistency_rule() {
        assert!(thm11_consistency(3, 14));
        assert!(thm11_consistency(-3, -6));
        assert!(thm11_consistency(10, 43));
        assert!(!thm11_consistency(1, 9)); // m − 4a = 5
        assert!(thm11_consistency(5, 15)); // m − 4a = −5, 5 | gcd
    }

    #[test]
    fn json_shape() {
        let v = serde_json::to_value(bm_verdict(3, 14).unwrap()).unwrap();
        for k in ["a", "m", "places", "verdict", "witnesses"] {
            assert!(v.get(k).is_some(), "{k}");
        }
        assert_eq!(v["verdict"], "ObstructionCertified");
        assert!(v["places"][0].get("p").is_some());
    }
}
