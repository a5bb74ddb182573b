//! Integral points on `a x² + y² + z² − xyz = m`: box enumeration and Vieta orbits.

use std::collections::{BTreeSet, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::isqrt;

pub type Triple = [i128; 3];

pub const DEFAULT_ORBIT_CAP: usize = 1_000_000;

pub fn on_surface(a: i64, m: i64, [x, y, z]: Triple) -> bool {
    let value = || -> Option<i128> {
        let ax2 = (a as i128).checked_mul(x.checked_mul(x)?)?;
        let s = ax2
            .checked_add(y.checked_mul(y)?)?
            .checked_add(z.checked_mul(z)?)?;
        s.checked_sub(x.checked_mul(y)?.checked_mul(z)?)
    };
    value() == Some(m as i128)
}

fn solutions_for_x(a: i128, m: i128, x: i128, bound: i128) -> Vec<Triple> {
    let mut out = Vec::new();
    for y in -bound..=bound {
        // z² − xy·z + (a x² + y² − m) = 0
        let b = x * y;
        let disc = b * b - 4 * (a * x * x + y * y - m);
        if disc < 0 {
            continue;
        }
        let s = isqrt(disc);
        if s * s != disc || (b + s) % 2 != 0 {
            continue;
        }
        for z in [(b - s) / 2, (b + s) / 2] {
            if z.abs() <= bound && out.last() != Some(&[x, y, z]) {
                out.push([x, y, z]);
            }
        }
    }
    out
}

/// All integral points with `max(|x|, |y|, |z|) ≤ bound`, sorted lexicographically.
pub fn box_search(a: i64, m: i64, bound: u64) -> Vec<Triple> {
    let bound = bound as i128;
    let (a, m) = (a as i128, m as i128);
    let mut out: Vec<Triple> = (-bound..=bound)
        .into_par_iter()
        .flat_map_iter(|x| solutions_for_x(a, m, x, bound))
        .collect();
    out.sort_unstable();
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Orbit {
    pub triples: BTreeSet<Triple>,
    /// The element cap was reached or a move overflowed before the depth was exhausted.
    pub truncated: bool,
}

fn moves([x, y, z]: Triple) -> [Option<Triple>; 2] {
    let y_move = x
        .checked_mul(z)
        .and_then(|v| v.checked_sub(y))
        .map(|y2| [x, y2, z]);
    let z_move = x
        .checked_mul(y)
        .and_then(|v| v.checked_sub(z))
        .map(|z2| [x, y, z2]);
    [y_move, z_move]
}

/// Closure of the seed under `y ↦ xz − y`, `z ↦ xy − z` (up to `depth` moves) and `y ↔ z`.
/// The x-move needs `a | yz` and is not used.
pub fn vieta_orbit(seed: Triple, a: i64, m: i64, depth: u32, cap: usize) -> Result<Orbit> {
    if !on_surface(a, m, seed) {
        return Err(Error::NotOnSurface(seed));
    }
    let mut triples = BTreeSet::new();
    let mut truncated = false;
    let mut queue = VecDeque::new();
    let admit =
        |t: Triple, d: u32, triples: &mut BTreeSet<Triple>, queue: &mut VecDeque<(Triple, u32)>| {
            for u in [t, [t[0], t[2], t[1]]] {
                if triples.len() >= cap {
                    return false;
                }
                if triples.insert(u) {
                    queue.push_back((u, d));
                }
            }
            true
        };
    admit(seed, 0, &mut triples, &mut queue);
    while let Some((t, d)) = queue.pop_front() {
        if d == depth {
            continue;
        }
        for next in moves(t) {
            match next {
                Some(n) => {
                    if !admit(n, d + 1, &mut triples, &mut queue) {
                        truncated = true;
                    }
                }
                None => truncated = true,
            }
        }
        if truncated && triples.len() >= cap {
            break;
        }
    }
    debug_assert!(triples.iter().all(|&t| on_surface(a, m, t)));
    Ok(Orbit { triples, truncated })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_box() {
        let pts = box_search(2, 1, 2);
        for t in [[0, 0, 1], [0, 0, -1], [0, 1, 0], [0, -1, 0]] {
            assert!(pts.contains(&t));
        }
        assert!(pts.iter().all(|&t| on_surface(2, 1, t)));
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn box_matches_triple_loop() {
        for (a, m) in [(2, 1), (1, 3), (-3, 5), (2, 4), (5, -7)] {
            let mut brute = Vec::new();
            for x in -6..=6i128 {
                for y in -6..=6 {
                    for z in -6..=6 {
                        if on_surface(a, m, [x, y, z]) {
                            brute.push([x, y, z]);
                        }
                    }
                }
            }
            assert_eq!(box_search(a, m, 6), brute, "({a},{m})");
        }
    }

    #[test]
    fn orbit_moves() {
        let o = vieta_orbit([0, 0, 1], 2, 1, 1, DEFAULT_ORBIT_CAP).unwrap();
        assert!(o.triples.contains(&[0, 0, -1]));
        let o = vieta_orbit([1, 2, 3], 1, 8, 0, DEFAULT_ORBIT_CAP).unwrap();
        assert_eq!(
            o.triples.into_iter().collect::<Vec<_>>(),
            vec![[1, 2, 3], [1, 3, 2]]
        );
        let seed = [3, 3, 3];
        let o = vieta_orbit(seed, 1, 0, 0, DEFAULT_ORBIT_CAP).unwrap();
        assert_eq!(o.triples.into_iter().collect::<Vec<_>>(), vec![seed]);
        assert_eq!(
            vieta_orbit([1, 1, 1], 2, 5, 3, 10),
            Err(Error::NotOnSurface([1, 1, 1]))
        );
    }

    #[test]
    fn orbit_from_box_seed() {
        let seed = box_search(2, 4, 5)[0];
        let o = vieta_orbit(seed, 2, 4, 6, DEFAULT_ORBIT_CAP).unwrap();
        assert!(o.triples.len() > 2);
        assert!(o.triples.iter().all(|&t| on_surface(2, 4, t)));
    }

    #[test]
    fn orbit_cap() {
        let o = vieta_orbit([3, 3, 3], 1, 0, 40, 50).unwrap();
        assert!(o.truncated);
        assert_eq!(o.triples.len(), 50);
        assert!(o.triples.iter().all(|&t| on_surface(1, 0, t)));
    }
}
