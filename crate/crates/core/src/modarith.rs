//! Word-sized modular arithmetic: deterministic primality, primes in an
//! arithmetic progression, smallest primitive roots, and discrete logarithms
//! in subgroups of prime-power order.

use crate::error::{Error, Result};

/// `a * b mod m` without overflow.
#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod m` by square-and-multiply. `m = 1` yields 0.
pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    base %= m;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Modular inverse of `a` mod `m` (requires gcd(a, m) = 1).
pub fn inv_mod(a: u64, m: u64) -> Result<u64> {
    if m == 1 {
        return Ok(0);
    }
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return Err(Error::Invalid(format!("{a} is not invertible mod {m}")));
    }
    Ok(t0.rem_euclid(m as i128) as u64)
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Deterministic Miller-Rabin, exact for all u64 (full witness set).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
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

/// All primes `ell <= bound` with `ell = 1 mod modulus`, ascending.
pub fn primes_in_progression(modulus: u64, bound: u64) -> Vec<u64> {
    assert!(modulus >= 1, "modulus must be positive");
    let mut out = Vec::new();
    if modulus == 1 {
        // Every prime is = 1 mod 1.
        for n in 2..=bound {
            if is_prime(n) {
                out.push(n);
            }
        }
        return out;
    }
    let mut n = 1 + modulus;
    while n <= bound {
        if is_prime(n) {
            out.push(n);
        }
        n += modulus;
    }
    out
}

/// Prime factorization by trial division (desk-scale inputs).
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut q = 2u64;
    while q * q <= n {
        if n % q == 0 {
            let mut e = 0;
            while n % q == 0 {
                n /= q;
                e += 1;
            }
            out.push((q, e));
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Multiplicative order of `a` mod `m` (gcd(a, m) = 1).
pub fn order_mod(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 1;
    }
    let phi = euler_phi(m);
    let mut ord = phi;
    for (q, _) in factorize(phi) {
        while ord % q == 0 && pow_mod(a, ord / q, m) == 1 {
            ord /= q;
        }
    }
    ord
}

pub fn euler_phi(n: u64) -> u64 {
    let mut phi = n;
    for (q, _) in factorize(n) {
        phi = phi / q * (q - 1);
    }
    phi
}

/// Smallest primitive root mod a prime `ell`.
pub fn primitive_root(ell: u64) -> Result<u64> {
    if !is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    if ell == 2 {
        return Ok(1);
    }
    let factors = factorize(ell - 1);
    'cand: for g in 2..ell {
        for (q, _) in &factors {
            if pow_mod(g, (ell - 1) / q, ell) == 1 {
                continue 'cand;
            }
        }
        return Ok(g);
    }
    unreachable!("every prime has a primitive root")
}

/// Is `g` a primitive root mod prime `ell`?
pub fn is_primitive_root(g: u64, ell: u64) -> bool {
    if g % ell == 0 {
        return false;
    }
    factorize(ell - 1)
        .iter()
        .all(|(q, _)| pow_mod(g, (ell - 1) / q, ell) != 1)
}

/// Discrete log of `w` in the subgroup of order `p^n` of `(Z/ell)^*`
/// generated by `g` (which must have order `p^n` mod `ell`).
///
/// Pohlig-Hellman digit extraction; the order-`p` base case is a
/// baby-step/giant-step search.
pub fn dlog_prime_power(ell: u64, g: u64, w: u64, p: u64, n: u32) -> Result<u64> {
    let pn = p.checked_pow(n).expect("p^n must fit in u64");
    debug_assert_eq!(pow_mod(g, pn, ell), 1, "g must have order dividing p^n");
    if pow_mod(w, pn, ell) != 1 {
        return Err(Error::NotInSubgroup { ell, g, w, p, n });
    }
    // gamma generates the order-p subgroup.
    let gamma = pow_mod(g, pn / p, ell);
    let g_inv = inv_mod(g, ell)?;
    let mut x = 0u64;
    for k in 0..n {
        // Peel off the digit at p^k.
        let rest = mul_mod(w, pow_mod(g_inv, x, ell), ell);
        let target = pow_mod(rest, pn / p.pow(k + 1), ell);
        let digit = dlog_order_p(ell, gamma, target, p)?;
        x += digit * p.pow(k);
    }
    debug_assert_eq!(pow_mod(g, x, ell), w % ell);
    Ok(x)
}

/// Discrete log in the order-`p` subgroup generated by `gamma`.
fn dlog_order_p(ell: u64, gamma: u64, target: u64, p: u64) -> Result<u64> {
    if target == 1 {
        return Ok(0);
    }
    let m = (p as f64).sqrt().ceil() as u64;
    // Baby steps: target * gamma^j for j < m.
    let mut baby = std::collections::HashMap::with_capacity(m as usize);
    let mut t = target;
    for j in 0..m {
        baby.insert(t, j);
        t = mul_mod(t, gamma, ell);
    }
    // Giant steps: gamma^(i*m).
    let giant = pow_mod(gamma, m, ell);
    let mut cur = giant;
    for i in 1..=m {
        if let Some(&j) = baby.get(&cur) {
            return Ok((i * m + p - j % p) % p);
        }
        cur = mul_mod(cur, giant, ell);
    }
    Err(Error::Invalid(format!(
        "dlog base case failed: {target} not in <{gamma}> mod {ell}"
    )))
}

/// Valuation `v_q(n)`.
pub fn valuation(mut n: u64, q: u64) -> u32 {
    let mut v = 0;
    while n > 0 && n % q == 0 {
        n /= q;
        v += 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_against_trial_division() {
        fn trial(n: u64) -> bool {
            if n < 2 {
                return false;
            }
            let mut q = 2;
            while q * q <= n {
                if n % q == 0 {
                    return false;
                }
                q += 1;
            }
            true
        }
        for n in 0..2000 {
            assert_eq!(is_prime(n), trial(n), "n={n}");
        }
        for n in [10u64.pow(12) + 39, 10u64.pow(12) + 61, 1_000_000_007] {
            assert!(is_prime(n));
            assert!(!is_prime(n * 3));
        }
    }

    #[test]
    fn progression_examples() {
        assert_eq!(primes_in_progression(9, 100), vec![19, 37, 73]);
        assert_eq!(primes_in_progression(1, 10), vec![2, 3, 5, 7]);
        assert_eq!(primes_in_progression(3, 20), vec![7, 13, 19]);
    }

    #[test]
    fn smallest_primitive_roots() {
        assert_eq!(primitive_root(7).unwrap(), 3);
        assert_eq!(primitive_root(19).unwrap(), 2);
        assert_eq!(primitive_root(13).unwrap(), 2);
        assert_eq!(primitive_root(31).unwrap(), 3);
    }

    #[test]
    fn dlog_examples() {
        // 2^4 = 16 mod 19, subgroup of order 9 generated by 4.
        assert_eq!(dlog_prime_power(19, 4, 16, 3, 2).unwrap(), 2);
        assert_eq!(dlog_prime_power(19, 4, 6, 3, 2).unwrap(), 7);
        // 2 has order 18 mod 19, not in the order-9 subgroup.
        assert!(matches!(
            dlog_prime_power(19, 4, 2, 3, 2),
            Err(Error::NotInSubgroup { .. })
        ));
    }

    #[test]
    fn dlog_round_trip_small_exhaustive() {
        for (p, nmax) in [(3u64, 4u32), (5, 2), (7, 2)] {
            for n in 1..=nmax {
                let pn = p.pow(n);
                // Find a prime ell = 1 mod p^n and a generator of the p^n-subgroup.
                let ell = primes_in_progression(pn, 100_000)[0];
                let eta = primitive_root(ell).unwrap();
                let g = pow_mod(eta, (ell - 1) / pn, ell);
                for e in 0..pn {
                    let w = pow_mod(g, e, ell);
                    assert_eq!(dlog_prime_power(ell, g, w, p, n).unwrap(), e);
                }
            }
        }
    }

    #[test]
    fn inverse_and_order() {
        for m in [5u64, 9, 16, 35, 1_000_003] {
            for a in 1..30 {
                if gcd(a, m) == 1 {
                    let inv = inv_mod(a, m).unwrap();
                    assert_eq!(mul_mod(a, inv, m), 1 % m);
                }
            }
        }
        assert_eq!(order_mod(2, 9), 6);
        assert_eq!(order_mod(4, 9), 3);
        assert_eq!(euler_phi(36), 12);
    }
}
