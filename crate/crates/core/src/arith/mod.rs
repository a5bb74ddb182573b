//! Exact arithmetic: rationals, the quadratic tower `Q(√a, √m, √(m − 4a))`,
//! and polynomial functions on the surface.

pub mod poly;
pub mod tower;

pub use num_rational::BigRational as Rational;
pub use poly::{reduce_z, surface_equal, IntPoly, Monomial, SurfaceFunction, TowerPoly};
pub use tower::{TowerElement, TowerParams};

/// Serializes a rational as the string `"n/d"` (or `"n"` when integral).
pub fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}
