//! Existence of points over `Z_p` and `R`: a closed-form case analysis and an
//! independent brute-force lifting search.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::{checked_prime_power, is_prime, isqrt, max_level, valuation, LocalPoint, Place};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Solubility {
    Soluble,
    Insoluble,
}

/// Rejects `m = 0` and `m = 4a`, where the surface is singular.
pub fn check_params(a: i64, m: i64) -> Result<()> {
    if a == 0 || m == 0 || m as i128 == 4 * a as i128 {
        Err(Error::Degenerate { a, m })
    } else {
        Ok(())
    }
}

/// The two local obstructions: `p = 2` with `a ≡ 1, m ≡ 3 (mod 4)`, and `p = 3` with
/// `a ≡ 1 (mod 3)`, `m ≡ 3, 6 (mod 9)`.
pub fn soluble_closed_form(a: i64, m: i64, p: u64) -> Solubility {
    let blocked = match p {
        2 => a.rem_euclid(4) == 1 && m.rem_euclid(4) == 3,
        3 => a.rem_euclid(3) == 1 && matches!(m.rem_euclid(9), 3 | 6),
        _ => false,
    };
    if blocked {
        Solubility::Insoluble
    } else {
        Solubility::Soluble
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum OracleResult {
    /// A residue point satisfying the multivariate Hensel criterion.
    Soluble(LocalPoint),
    /// Every branch died; `level` is the deepest level reached.
    Insoluble {
        level: u32,
    },
    Inconclusive,
}

impl OracleResult {
    pub fn verdict(&self) -> Option<Solubility> {
        match self {
            OracleResult::Soluble(_) => Some(Solubility::Soluble),
            OracleResult::Insoluble { .. } => Some(Solubility::Insoluble),
            OracleResult::Inconclusive => None,
        }
    }
}

pub const DEFAULT_DEPTH_CAP: u32 = 12;
const NODE_CAP: usize = 1 << 20;

/// `a x² + y² + z² − d xyz = m`, the surface after `s` rescalings `X → pX`.
#[derive(Debug, Clone, Copy)]
struct Equation {
    a: i128,
    d: i128,
    m: i128,
    scale: u32,
}

struct Search {
    p: u64,
    /// Modulus used to read off valuations of values and partials.
    probe: i128,
    probe_level: u32,
    nodes: usize,
}

impl Search {
    fn md(&self, v: i128) -> i128 {
        v.rem_euclid(self.probe)
    }

    fn value(&self, e: &Equation, [x, y, z]: [i128; 3]) -> i128 {
        let md = |v| self.md(v);
        md(md(e.a * md(x * x)) + md(y * y) + md(z * z) - md(md(e.d * md(x * y)) * z) - e.m)
    }

    fn partials(&self, e: &Equation, [x, y, z]: [i128; 3]) -> [i128; 3] {
        let md = |v| self.md(v);
        [
            md(md(2 * e.a * x) - md(e.d * md(y * z))),
            md(2 * y - md(e.d * md(x * z))),
            md(2 * z - md(e.d * md(x * y))),
        ]
    }

    fn val(&self, r: i128) -> u32 {
        if r == 0 {
            self.probe_level
        } else {
            valuation(r, self.p)
        }
    }

    /// Hensel: some partial `g` with `v(f) > 2 v(g)` yields a zero over `Z_p`.
    fn criterion(&self, e: &Equation, pt: [i128; 3]) -> bool {
        let vf = self.val(self.value(e, pt));
        self.partials(e, pt).iter().any(|&g| {
            let vg = self.val(g);
            2 * vg < self.probe_level && vf > 2 * vg
        })
    }

    fn run(&mut self, e: Equation, depth_cap: u32) -> SearchOutcome {
        let p = self.p as i128;
        let mut frontier: Vec<[i128; 3]> = Vec::new();
        let mut origin_survives = false;
        for x in 0..p {
            for y in 0..p {
                for z in 0..p {
                    let pt = [x, y, z];
                    if self.value(&e, pt) % p == 0 {
                        if pt == [0, 0, 0] {
                            origin_survives = true;
                        } else {
                            frontier.push(pt);
                        }
                    }
                }
            }
        }
        // Points ≡ 0 mod p are exactly p·(points of the rescaled equation).
        let mut deepest = 1;
        let mut inconclusive = false;
        if origin_survives {
            if let Some(w) = frontier.iter().find(|&&pt| self.criterion(&e, pt)) {
                return SearchOutcome::Found(*w, 1, e.scale);
            }
            if e.m % (p * p) == 0 && depth_cap > 1 {
                let scaled = Equation {
                    a: e.a,
                    d: e.d * p,
                    m: e.m / (p * p),
                    scale: e.scale + 1,
                };
                match self.run(scaled, depth_cap - 1) {
                    found @ SearchOutcome::Found(..) => return found,
                    SearchOutcome::Dead(level) => deepest = level + 1,
                    SearchOutcome::Capped => inconclusive = true,
                }
            } else if e.m % (p * p) != 0 {
                deepest = 2;
            } else {
                inconclusive = true;
            }
        }
        let mut level = 1;
        let mut modulus = p;
        loop {
            self.nodes += frontier.len();
            if let Some(w) = frontier.iter().find(|&&pt| self.criterion(&e, pt)) {
                return SearchOutcome::Found(*w, level, e.scale);
            }
            if frontier.is_empty() {
                return if inconclusive {
                    SearchOutcome::Capped
                } else {
                    SearchOutcome::Dead(deepest.max(level))
                };
            }
            if level >= depth_cap || self.nodes > NODE_CAP {
                return SearchOutcome::Capped;
            }
            let next_mod = modulus * p;
            let mut next = Vec::new();
            for pt in &frontier {
                for i in 0..p {
                    for j in 0..p {
                        for k in 0..p {
                            let child = [
                                pt[0] + i * modulus,
                                pt[1] + j * modulus,
                                pt[2] + k * modulus,
                            ];
                            if self.value(&e, child) % next_mod == 0 {
                                next.push(child);
                            }
                        }
                    }
                }
            }
            frontier = next;
            modulus = next_mod;
            level += 1;
        }
    }
}

enum SearchOutcome {
    /// Witness, its level in the rescaled coordinates, and the number of rescalings.
    Found([i128; 3], u32, u32),
    Dead(u32),
    Capped,
}

/// Breadth-first search over residue triples mod `p^k`, `k ≤ depth_cap`.
///
/// A node is a witness when a partial derivative `g` satisfies `v(f) > 2 v(g)`;
/// the search reports insolubility when every branch dies. Branches through the
/// origin mod `p` are handled by rescaling to `a x² + y² + z² − p xyz = m / p²`.
pub fn soluble_oracle(a: i64, m: i64, p: u64, depth_cap: u32) -> Result<OracleResult> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let probe_level = max_level(p);
    let probe = checked_prime_power(p, probe_level).expect("max level fits");
    let depth_cap = depth_cap.min(probe_level - 1).max(1);
    let mut search = Search {
        p,
        probe,
        probe_level,
        nodes: 0,
    };
    let e = Equation {
        a: a as i128,
        d: 1,
        m: m as i128,
        scale: 0,
    };
    Ok(match search.run(e, depth_cap) {
        SearchOutcome::Found(pt, level, scale) => {
            let factor = checked_prime_power(p, scale).expect("scale below depth cap");
            let coords = pt.map(|c| c * factor);
            OracleResult::Soluble(LocalPoint::new(a, m, p, level + scale, coords)?)
        }
        SearchOutcome::Dead(level) => OracleResult::Insoluble { level },
        SearchOutcome::Capped => OracleResult::Inconclusive,
    })
}

/// A real point `(x, y, y)` with `y² = (m − a x²) / (2 − x) > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RealWitness {
    pub x: i64,
    #[serde(serialize_with = "crate::arith::ser_rational")]
    pub y_squared: BigRational,
}

/// The surface always has real points; this returns an explicit one.
pub fn real_witness(a: i64, m: i64) -> Result<RealWitness> {
    check_params(a, m)?;
    let (a, m) = (a as i128, m as i128);
    let x: i128 = if m > 0 {
        0
    } else if 9 * a - m > 0 {
        3
    } else {
        // a < 0 and m < 0: any x ≤ 1 with a x² < m works.
        -(isqrt(m / a) + 1)
    };
    let y_squared = BigRational::new(BigInt::from(m - a * x * x), BigInt::from(2 - x));
    debug_assert!(y_squared > BigRational::from_integer(0.into()));
    Ok(RealWitness {
        x: x as i64,
        y_squared,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalSolubilityReport {
    pub soluble: bool,
    pub blocking_places: Vec<Place>,
    pub real_witness: RealWitness,
}

/// Only 2 and 3 can block; the real place never does.
pub fn everywhere_locally_soluble(a: i64, m: i64) -> Result<LocalSolubilityReport> {
    check_params(a, m)?;
    let blocking_places: Vec<Place> = [2, 3]
        .into_iter()
        .filter(|&p| soluble_closed_form(a, m, p) == Solubility::Insoluble)
        .map(Place::Prime)
        .collect();
    Ok(LocalSolubilityReport {
        soluble: blocking_places.is_empty(),
        blocking_places,
        real_witness: real_witness(a, m)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_examples() {
        assert_eq!(soluble_closed_form(5, 3, 2), Solubility::Insoluble);
        assert_eq!(soluble_closed_form(7, 3, 3), Solubility::Insoluble);
        assert_eq!(soluble_closed_form(7, 6, 3), Solubility::Insoluble);
        assert_eq!(soluble_closed_form(7, 9, 3), Solubility::Soluble);
        assert_eq!(soluble_closed_form(3, 14, 2), Solubility::Soluble);
    }

    #[test]
    fn oracle_insoluble_at_two() {
        assert_eq!(
            soluble_oracle(5, 3, 2, 12).unwrap(),
            OracleResult::Insoluble { level: 2 }
        );
    }

    #[test]
    fn oracle_witnesses_lie_on_surface() {
        for (a, m, p) in [(3, 14, 7), (1, 5, 5), (7, 9, 3), (1, 81, 3), (-3, -6, 2)] {
            match soluble_oracle(a, m, p, 12).unwrap() {
                OracleResult::Soluble(w) => assert!(w.on_surface(a, m), "({a},{m},{p}) {w:?}"),
                other => panic!("({a},{m},{p}) gave {other:?}"),
            }
        }
    }

    #[test]
    fn oracle_insoluble_at_three() {
        assert!(matches!(
            soluble_oracle(7, 3, 3, 12).unwrap(),
            OracleResult::Insoluble { .. }
        ));
        assert!(matches!(
            soluble_oracle(1, 12, 3, 12).unwrap(),
            OracleResult::Insoluble { .. }
        ));
        assert!(matches!(
            soluble_oracle(4, -6, 3, 12).unwrap(),
            OracleResult::Insoluble { .. }
        ));
    }

    #[test]
    fn blocking_places() {
        let r = everywhere_locally_soluble(5, 3).unwrap();
        assert_eq!(r.blocking_places, vec![Place::Prime(2)]);
        assert!(everywhere_locally_soluble(3, 14).unwrap().soluble);
        assert!(everywhere_locally_soluble(-3, -6).unwrap().soluble);
        assert_eq!(
            everywhere_locally_soluble(2, 8),
            Err(Error::Degenerate { a: 2, m: 8 })
        );
    }

    #[test]
    fn real_points_satisfy_equation() {
        for a in -6..=6i64 {
            for m in -20..=20i64 {
                if check_params(a, m).is_err() {
                    continue;
                }
                let w = real_witness(a, m).unwrap();
                assert!(w.y_squared > BigRational::from_integer(0.into()));
                let x = BigRational::from_integer(w.x.into());
                let lhs = BigRational::from_integer(a.into()) * &x * &x
                    + &w.y_squared * (BigRational::from_integer(2.into()) - &x);
                assert_eq!(lhs, BigRational::from_integer(m.into()));
            }
        }
    }
}
