//! Degree of the multiquadratic field `Q(√a, √m, √(m − 4a))`.

use super::primes::squarefree_part;
use crate::error::{Error, Result};

/// Square class of a nonzero integer as a bit vector over `F_2`: bit 0 is the
/// sign, then one bit per prime in `primes`.
fn class_vector(n: i128, primes: &mut Vec<u64>) -> u128 {
    let (sign, odd) = squarefree_part(n);
    let mut bits = u128::from(sign < 0);
    for p in odd {
        let idx = match primes.iter().position(|&q| q == p) {
            Some(i) => i,
            None => {
                primes.push(p);
                primes.len() - 1
            }
        };
        bits |= 1 << (idx + 1);
    }
    bits
}

/// `F_2`-rank of the subgroup of `Q^×/Q^×²` generated by the given integers.
pub fn square_class_rank(values: &[i128]) -> Result<u32> {
    if values.contains(&0) {
        return Err(Error::ZeroInput("square class of 0"));
    }
    let mut primes = Vec::new();
    let mut basis: Vec<u128> = Vec::new();
    for &v in values {
        let mut w = class_vector(v, &mut primes);
        for &b in &basis {
            let top = 127 - b.leading_zeros();
            if w >> top & 1 == 1 {
                w ^= b;
            }
        }
        if w != 0 {
            basis.push(w);
            basis.sort_unstable_by(|x, y| y.cmp(x));
        }
    }
    Ok(basis.len() as u32)
}

/// `[Q(√a, √m, √(m − 4a)) : Q]`, one of 1, 2, 4, 8.
pub fn field_degree(a: i64, m: i64) -> Result<u32> {
    let c = m as i128 - 4 * a as i128;
    Ok(1 << square_class_rank(&[a as i128, m as i128, c])?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_examples() {
        assert_eq!(field_degree(1, 9).unwrap(), 2);
        assert_eq!(field_degree(2, 1).unwrap(), 4);
        assert_eq!(field_degree(2, 3).unwrap(), 8);
        assert_eq!(field_degree(1, 8).unwrap(), 2); // classes 1, 2, 2
        assert_eq!(field_degree(3, 14).unwrap(), 8);
        assert!(field_degree(0, 5).is_err());
        assert!(field_degree(1, 4).is_err());
    }

    #[test]
    fn rank_reduces_products() {
        assert_eq!(square_class_rank(&[6, 10, 15]).unwrap(), 2);
        assert_eq!(square_class_rank(&[-1, -4, 9]).unwrap(), 1);
        assert_eq!(square_class_rank(&[2, 3, 5, 30, 7]).unwrap(), 4);
    }
}
