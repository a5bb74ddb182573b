//! Primality, factorization and valuations for machine-sized integers.

use std::collections::BTreeMap;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Pollard–Brent rho; `n` must be composite and odd.
fn pollard_rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

const TRIAL_LIMIT: u64 = 1 << 12;

fn factor_into(n: u64, out: &mut BTreeMap<u64, u32>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        *out.entry(n).or_default() += 1;
        return;
    }
    let d = pollard_rho(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

/// Prime factorization of `|n|` (`n ≠ 0`): trial division, then Pollard rho on the cofactor.
pub fn factorize(n: i128) -> BTreeMap<u64, u32> {
    assert!(n != 0, "factorize(0)");
    let mut n = u64::try_from(n.unsigned_abs()).expect("factorize: |n| must fit in u64");
    let mut out = BTreeMap::new();
    let mut p = 2u64;
    while p <= TRIAL_LIMIT && p * p <= n {
        while n % p == 0 {
            *out.entry(p).or_default() += 1;
            n /= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    factor_into(n, &mut out);
    out
}

/// `p`-adic valuation of a nonzero integer.
pub fn valuation(n: i128, p: u64) -> u32 {
    assert!(n != 0, "valuation of zero");
    let p = p as i128;
    let mut n = n;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Valuation of a residue modulo `p^level`; `None` when the residue is zero.
pub fn valuation_mod(r: i128, p: u64, level: u32) -> Option<u32> {
    if r == 0 {
        return None;
    }
    let v = valuation(r, p);
    (v < level).then_some(v)
}

/// Splits `n = sign · ∏ p^e` and returns `(sign, odd-exponent primes)`, i.e. the
/// squarefree part as a list of primes.
pub fn squarefree_part(n: i128) -> (i8, Vec<u64>) {
    let sign = if n < 0 { -1 } else { 1 };
    let primes = factorize(n)
        .into_iter()
        .filter(|(_, e)| e % 2 == 1)
        .map(|(p, _)| p)
        .collect();
    (sign, primes)
}

pub fn squarefree_value(n: i128) -> i128 {
    let (sign, primes) = squarefree_part(n);
    primes.iter().fold(sign as i128, |acc, &p| acc * p as i128)
}

pub fn is_perfect_square(n: i128) -> bool {
    if n < 0 {
        return false;
    }
    let r = isqrt(n);
    r * r == n
}

pub fn isqrt(n: i128) -> i128 {
    assert!(n >= 0);
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as i128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// `p^k` if it stays below `2^62`, the bound that keeps residue products inside `i128`.
pub fn checked_prime_power(p: u64, k: u32) -> Option<i128> {
    let mut acc: i128 = 1;
    for _ in 0..k {
        acc = acc.checked_mul(p as i128)?;
        if acc >= 1 << 62 {
            return None;
        }
    }
    Some(acc)
}

/// Largest `k` with `p^k` inside the residue range.
pub fn max_level(p: u64) -> u32 {
    let mut k = 0;
    while checked_prime_power(p, k + 1).is_some() {
        k += 1;
    }
    k
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&k| is_prime(k)).collect()
}

/// A square root of `n` modulo an odd prime `p` (Tonelli–Shanks), the smaller of the two.
pub fn sqrt_mod_prime(n: i128, p: u64) -> Option<u64> {
    let n = n.rem_euclid(p as i128) as u64;
    if n == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(n);
    }
    if pow_mod(n, (p - 1) / 2, p) != 1 {
        return None;
    }
    let (mut q, mut s) = (p - 1, 0u32);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = (2..p)
        .find(|&z| pow_mod(z, (p - 1) / 2, p) == p - 1)
        .expect("non-residue exists");
    let mut c = pow_mod(z, q, p);
    let mut r = pow_mod(n, q.div_ceil(2), p);
    let mut t = pow_mod(n, q, p);
    let mut m = s;
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        r = mul_mod(r, b, p);
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        m = i;
    }
    Some(r.min(p - r))
}

/// Inverse of `a` modulo `m` (gcd must be 1).
pub fn inv_mod(a: i128, m: i128) -> Option<i128> {
    let (mut old_r, mut r) = (a.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    (old_r == 1).then(|| old_s.rem_euclid(m))
}
