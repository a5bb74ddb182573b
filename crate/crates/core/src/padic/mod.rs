//! Local arithmetic at the places of `Q`.

mod degree;
mod hensel;
mod points;
mod primes;
mod symbols;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use degree::{field_degree, square_class_rank};
pub use hensel::{hensel_lift_root, PadicApprox};
pub use points::{fp_points, gradient_residue, lift_point, surface_residue, FpPoint, LocalPoint};
pub use primes::{
    checked_prime_power, factorize, inv_mod, is_perfect_square, is_prime, isqrt, max_level,
    pow_mod, primes_up_to, sqrt_mod_prime, squarefree_part, squarefree_value, valuation,
    valuation_mod,
};
pub use symbols::{
    candidate_places, hilbert, hilbert_int, hilbert_product_check, legendre, smallest_nonresidue,
    square_class, square_class_int, square_class_of_approx, Invariant, SquareClass,
};
pub(crate) use symbols::{determined_local_data, hilbert_local, local_data_i128};

/// A place of `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Infinite,
    Prime(u64),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinite => f.write_str("inf"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for Place {
    type Err = crate::error::Error;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "inf" | "∞" => Ok(Place::Infinite),
            _ => {
                let p: u64 = s
                    .parse()
                    .map_err(|_| crate::error::Error::Parse(format!("place {s:?}")))?;
                if is_prime(p) {
                    Ok(Place::Prime(p))
                } else {
                    Err(crate::error::Error::NotPrime(p))
                }
            }
        }
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Place {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}
