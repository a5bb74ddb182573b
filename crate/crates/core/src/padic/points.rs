//! Points of the surface over `F_p` and their lifts to `Z/p^N`.

use serde::{Deserialize, Serialize};

use super::hensel::{hensel_lift_root, PadicApprox};
use super::primes::{checked_prime_power, is_prime};
use crate::error::{Error, Result};

/// Value of `ax² + y² + z² − xyz − m` modulo `modulus`, for residues below `2^62`.
pub fn surface_residue(a: i64, m: i64, pt: [i128; 3], modulus: i128) -> i128 {
    let [x, y, z] = pt.map(|c| c.rem_euclid(modulus));
    let md = |v: i128| v.rem_euclid(modulus);
    let xx = md(x * x);
    let xyz = md(md(x * y) * z);
    md(md(a as i128 * xx) + md(y * y) + md(z * z) - xyz - m as i128)
}

/// The partial derivatives `(2ax − yz, 2y − xz, 2z − xy)` modulo `modulus`.
pub fn gradient_residue(a: i64, pt: [i128; 3], modulus: i128) -> [i128; 3] {
    let [x, y, z] = pt.map(|c| c.rem_euclid(modulus));
    let md = |v: i128| v.rem_euclid(modulus);
    [
        md(md(2 * a as i128 * x) - md(y * z)),
        md(2 * y - md(x * z)),
        md(2 * z - md(x * y)),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FpPoint {
    pub coords: [u64; 3],
    pub singular: bool,
}

/// All solutions of the surface congruence modulo `p`, in lexicographic order, tagged
/// singular when every partial derivative vanishes.
pub fn fp_points(a: i64, m: i64, p: u64) -> Result<Vec<FpPoint>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let md = p as i128;
    let mut out = Vec::new();
    for x in 0..p {
        for y in 0..p {
            for z in 0..p {
                let pt = [x as i128, y as i128, z as i128];
                if surface_residue(a, m, pt, md) == 0 {
                    let singular = gradient_residue(a, pt, md).iter().all(|&g| g == 0);
                    out.push(FpPoint {
                        coords: [x, y, z],
                        singular,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// A point of the surface over `Z/p^level`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LocalPoint {
    pub p: u64,
    pub level: u32,
    pub coords: [i128; 3],
}

impl LocalPoint {
    /// Checks the surface congruence and reduces the coordinates.
    pub fn new(a: i64, m: i64, p: u64, level: u32, coords: [i128; 3]) -> Result<Self> {
        let modulus = checked_prime_power(p, level).ok_or(Error::PrecisionOverflow { p, level })?;
        let coords = coords.map(|c| c.rem_euclid(modulus));
        if surface_residue(a, m, coords, modulus) != 0 {
            return Err(Error::NotOnSurface(coords));
        }
        Ok(LocalPoint { p, level, coords })
    }

    pub fn modulus(&self) -> i128 {
        checked_prime_power(self.p, self.level).expect("checked at construction")
    }

    pub fn coordinate(&self, i: usize) -> PadicApprox {
        PadicApprox::new(self.p, self.level, self.coords[i]).expect("checked at construction")
    }

    pub fn x(&self) -> PadicApprox {
        self.coordinate(0)
    }

    pub fn y(&self) -> PadicApprox {
        self.coordinate(1)
    }

    pub fn z(&self) -> PadicApprox {
        self.coordinate(2)
    }

    pub fn on_surface(&self, a: i64, m: i64) -> bool {
        surface_residue(a, m, self.coords, self.modulus()) == 0
    }
}

/// The surface equation as a quadratic in coordinate `i`, the other two fixed.
pub(crate) fn quadratic_in(a: i64, m: i64, pt: [i128; 3], i: usize) -> [i128; 3] {
    let [x, y, z] = pt;
    let (a, m) = (a as i128, m as i128);
    match i {
        0 => [y * y + z * z - m, -(y * z), a],
        1 => [a * x * x + z * z - m, -(x * z), 1],
        _ => [a * x * x + y * y - m, -(x * y), 1],
    }
}

/// Lifts a smooth point mod `p` (coordinates may be any integers) to level `level`,
/// moving only the first coordinate whose partial derivative is a unit.
pub fn lift_point(pt: [i128; 3], a: i64, m: i64, p: u64, level: u32) -> Result<LocalPoint> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let md = p as i128;
    let base = pt.map(|c| c.rem_euclid(md));
    if surface_residue(a, m, base, md) != 0 {
        return Err(Error::NotOnSurface(base));
    }
    let grad = gradient_residue(a, base, md);
    let i = grad
        .iter()
        .position(|&g| g != 0)
        .ok_or(Error::NotSmooth(base))?;
    let root = hensel_lift_root(&quadratic_in(a, m, base, i), base[i], p, level)?;
    let mut coords = base;
    coords[i] = root.residue();
    LocalPoint::new(a, m, p, level, coords)
}
