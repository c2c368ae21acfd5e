//! Small integer helpers: gcd/lcm, floored remainders, the two-modulus
//! Chinese Remainder solver and primality for desk-scale moduli.

/// Greatest common divisor; `gcd(0, 0) = 0`.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Least common multiple. Panics on overflow.
pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    (a / gcd(a, b)).checked_mul(b).expect("lcm overflows u64")
}

/// gcd of signed integers, always non-negative.
pub fn gcd_i64(a: i64, b: i64) -> u64 {
    gcd(a.unsigned_abs(), b.unsigned_abs())
}

/// Smallest non-negative remainder of `x` modulo `y` (`y > 0`).
pub fn mod_floor(x: i64, y: u64) -> u64 {
    assert!(y > 0, "modulus must be positive");
    let y = y as i128;
    (x as i128).rem_euclid(y) as u64
}

/// Extended Euclid on signed values: returns `(g, s, t)` with `s*a + t*b = g`.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0, s0, t0)
}

/// Solves `x ≡ a (mod m)`, `x ≡ b (mod n)`.
///
/// Returns the unique solution in `[0, lcm(m, n))`, or `None` when
/// `a ≢ b (mod gcd(m, n))`. Moduli must be at least 1.
pub fn crt(a: i64, m: u64, b: i64, n: u64) -> Option<u64> {
    assert!(m >= 1 && n >= 1, "crt moduli must be positive");
    let g = gcd(m, n);
    let a = mod_floor(a, m) as i128;
    let b = mod_floor(b, n) as i128;
    let diff = b - a;
    if diff.rem_euclid(g as i128) != 0 {
        return None;
    }
    let l = lcm(m, n) as i128;
    let (m, n) = (m as i128, n as i128);
    // a + m*k ≡ b (mod n)  ⇔  (m/g) k ≡ diff/g (mod n/g)
    let n_red = n / g as i128;
    let (_, inv, _) = ext_gcd(m / g as i128, n_red);
    let k = ((diff / g as i128).rem_euclid(n_red) * inv.rem_euclid(n_red)).rem_euclid(n_red);
    Some((a + m * k).rem_euclid(l) as u64)
}

/// Deterministic trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// `base^exp mod modulus` by square-and-multiply.
pub fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    assert!(modulus > 0);
    let m = modulus as u128;
    let mut acc = 1u128 % m;
    let mut b = base as u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Prime divisors of `n` in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn crt_scan(a: i64, m: u64, b: i64, n: u64) -> Option<u64> {
        (0..lcm(m, n)).find(|&x| x % m == mod_floor(a, m) && x % n == mod_floor(b, n))
    }

    #[test]
    fn crt_examples() {
        assert_eq!(crt(1, 2, 1, 3), Some(1));
        // scan of 0..12 gives the unique solution 6
        assert_eq!(crt_scan(2, 4, 0, 6), Some(6));
        assert_eq!(crt(2, 4, 0, 6), Some(6));
        assert_eq!(crt(1, 2, 0, 2), None);
    }

    #[test]
    fn crt_exhaustive_small_moduli() {
        for m in 1..=12u64 {
            for n in 1..=12u64 {
                for a in 0..m as i64 {
                    for b in 0..n as i64 {
                        let got = crt(a, m, b, n);
                        assert_eq!(got, crt_scan(a, m, b, n), "crt({a},{m},{b},{n})");
                        assert_eq!(got.is_some(), (a - b).rem_euclid(gcd(m, n) as i64) == 0);
                    }
                }
            }
        }
    }

    #[test]
    fn crt_negative_inputs_normalize() {
        assert_eq!(crt(-1, 4, -1, 6), Some(11));
        assert_eq!(crt(-7, 5, 3, 7), Some(3));
    }

    #[test]
    fn mod_floor_is_non_negative() {
        assert_eq!(mod_floor(-1, 6), 5);
        assert_eq!(mod_floor(-12, 6), 0);
        assert_eq!(
            mod_floor(i64::MIN, 7),
            (i64::MIN as i128).rem_euclid(7) as u64
        );
    }

    #[test]
    fn primes_and_factors() {
        let primes: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(prime_factors(360), vec![2, 3, 5]);
        assert_eq!(prime_factors(97), vec![97]);
        assert!(prime_factors(1).is_empty());
        assert_eq!(pow_mod(3, 4, 7), 4);
    }
}
