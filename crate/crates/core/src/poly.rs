//! Polynomial arithmetic supporting the group-ring generator construction:
//! integer cyclotomic polynomials, factorization over F_p, Hensel lifting,
//! and arithmetic in the unramified extension (Z/p^n)[x]/(f) used to realize
//! roots of unity of order prime to p.

use crate::error::{Error, Result};
use crate::modarith::{inv_mod, mul_mod, order_mod, pow_mod};
use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// Integer polynomials (dense, constant term first)
// ---------------------------------------------------------------------------

/// Coefficients of the m-th cyclotomic polynomial, constant term first.
///
/// Computed by exact division of x^m - 1 by the cyclotomic polynomials of
/// the proper divisors of m.
pub fn cyclotomic_polynomial(m: u64) -> Vec<i64> {
    assert!(m >= 1);
    // Start from x^m - 1.
    let mut num = vec![0i64; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in 1..m {
        if m % d == 0 {
            let phi_d = cyclotomic_polynomial(d);
            num = zpoly_exact_div(&num, &phi_d);
        }
    }
    num
}

/// Exact division of integer polynomials (monic or +-1-leading divisor).
fn zpoly_exact_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem: Vec<i128> = num.iter().map(|&x| x as i128).collect();
    let dd = den.len() - 1;
    let lead = den[dd] as i128;
    assert!(lead == 1 || lead == -1);
    let mut quot = vec![0i128; rem.len().saturating_sub(dd)];
    for k in (0..quot.len()).rev() {
        let c = rem[k + dd] / lead;
        quot[k] = c;
        if c != 0 {
            for (i, &d) in den.iter().enumerate() {
                rem[k + i] -= c * d as i128;
            }
        }
    }
    assert!(rem.iter().all(|&x| x == 0), "division must be exact");
    quot.into_iter()
        .map(|x| i64::try_from(x).expect("coefficient overflow"))
        .collect()
}

/// Remainder of an integer polynomial modulo a monic integer polynomial.
fn zpoly_rem(poly: &[i128], modulus: &[i64]) -> Vec<i128> {
    let mut rem = poly.to_vec();
    let dd = modulus.len() - 1;
    assert_eq!(modulus[dd], 1);
    while rem.len() > dd {
        let k = rem.len() - 1;
        let c = rem[k];
        rem.pop();
        if c != 0 {
            for i in 0..dd {
                rem[k - dd + i] -= c * modulus[i] as i128;
            }
        }
    }
    rem
}

/// Sum of zeta_m^{k t} over the decomposition subgroup D of (Z/m)^*
/// attached to p, reduced mod the m-th cyclotomic polynomial. Errors if the
/// reduction is not a constant, i.e. if the sum is irrational (the
/// decomposition field of p in Q(zeta_m) is larger than Q).
pub fn trace_root_of_unity(m: u64, k: u64, p: u64) -> Result<i64> {
    let d = decomposition_subgroup(m, p);
    let phi = cyclotomic_polynomial(m);
    let mut poly = vec![0i128; m as usize];
    for t in d {
        poly[(k % m * t % m) as usize] += 1;
    }
    let rem = zpoly_rem(&poly, &phi);
    if rem.iter().skip(1).any(|&c| c != 0) {
        return Err(Error::NonRationalTrace { m, k, p });
    }
    Ok(rem.first().copied().unwrap_or(0) as i64)
}

/// The subgroup of (Z/m)^* fixing the p-adic realization of Q(zeta_m):
/// generated by the element (p mod m', 1 mod p^s) and the full unit group of
/// the p-part, where m = p^s * m'.
pub fn decomposition_subgroup(m: u64, p: u64) -> Vec<u64> {
    if m == 1 {
        return vec![1];
    }
    let mut ps = 1u64;
    let mut mp = m;
    while mp % p == 0 {
        mp /= p;
        ps *= p;
    }
    let mut gens = Vec::new();
    // t = p mod m', t = 1 mod p^s.
    gens.push(crt_pair(p % mp.max(1), mp, 1, ps, m));
    for u in 1..ps {
        if u % p != 0 {
            gens.push(crt_pair(1, mp, u, ps, m));
        }
    }
    // Close under multiplication.
    let mut set: std::collections::BTreeSet<u64> = [1u64].into();
    let mut frontier = vec![1u64];
    while let Some(x) = frontier.pop() {
        for &g in &gens {
            let y = mul_mod(x, g, m);
            if set.insert(y) {
                frontier.push(y);
            }
        }
    }
    set.into_iter().collect()
}

/// CRT: the unit mod m with given residues mod the coprime parts mp and ps.
fn crt_pair(a: u64, mp: u64, b: u64, ps: u64, m: u64) -> u64 {
    if mp <= 1 {
        return b % m;
    }
    if ps <= 1 {
        return a % m;
    }
    // x = a + mp * ((b - a) / mp mod ps)
    let inv = inv_mod(mp % ps, ps).expect("coprime parts");
    let diff = (b + ps - a % ps) % ps;
    (a + mp * mul_mod(diff, inv, ps)) % m
}

// ---------------------------------------------------------------------------
// Polynomials over F_p
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
struct FpPoly {
    p: u64,
    c: Vec<u64>, // constant first, no trailing zeros
}

impl FpPoly {
    fn new(p: u64, mut c: Vec<u64>) -> Self {
        for x in c.iter_mut() {
            *x %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        FpPoly { p, c }
    }
    fn zero(p: u64) -> Self {
        FpPoly { p, c: vec![] }
    }
    fn deg(&self) -> isize {
        self.c.len() as isize - 1
    }
    fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
    fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.p);
        }
        let mut out = vec![0u64; self.c.len() + other.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.c.iter().enumerate() {
                out[i + j] = (out[i + j] + mul_mod(a, b, self.p)) % self.p;
            }
        }
        Self::new(self.p, out)
    }
    fn rem(&self, modulus: &Self) -> Self {
        let p = self.p;
        let mut rem = self.c.clone();
        let dd = modulus.c.len() - 1;
        let lead_inv = inv_mod(*modulus.c.last().unwrap(), p).unwrap();
        while rem.len() > dd {
            let k = rem.len() - 1;
            let c = mul_mod(rem[k], lead_inv, p);
            rem.pop();
            if c != 0 {
                for i in 0..dd {
                    let sub = mul_mod(c, modulus.c[i], p);
                    rem[k - dd + i] = (rem[k - dd + i] + p - sub) % p;
                }
            }
        }
        Self::new(p, rem)
    }
    fn mul_rem(&self, other: &Self, modulus: &Self) -> Self {
        self.mul(other).rem(modulus)
    }
    fn sub(&self, other: &Self) -> Self {
        let p = self.p;
        let n = self.c.len().max(other.c.len());
        let mut out = vec![0u64; n];
        for i in 0..n {
            let a = self.c.get(i).copied().unwrap_or(0);
            let b = other.c.get(i).copied().unwrap_or(0);
            out[i] = (a + p - b) % p;
        }
        Self::new(p, out)
    }
    fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if let Some(&lead) = a.c.last() {
            let inv = inv_mod(lead, a.p).unwrap();
            a = a.scale(inv);
        }
        a
    }
    fn scale(&self, s: u64) -> Self {
        Self::new(
            self.p,
            self.c.iter().map(|&x| mul_mod(x, s, self.p)).collect(),
        )
    }
    /// self^e mod modulus, with a big-integer exponent.
    fn pow_rem_big(&self, e: &BigUint, modulus: &Self) -> Self {
        let mut acc = FpPoly::new(self.p, vec![1]);
        let mut base = self.rem(modulus);
        for i in 0..e.bits() {
            if e.bit(i) {
                acc = acc.mul_rem(&base, modulus);
            }
            base = base.mul_rem(&base, modulus);
        }
        acc
    }
}

/// Extended Euclid over F_p: returns (s, t) with s*a + t*b = 1 (a, b coprime).
fn fp_bezout(a: &FpPoly, b: &FpPoly) -> (FpPoly, FpPoly) {
    let p = a.p;
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (FpPoly::new(p, vec![1]), FpPoly::zero(p));
    let (mut t0, mut t1) = (FpPoly::zero(p), FpPoly::new(p, vec![1]));
    while !r1.is_zero() {
        // r0 = q * r1 + r
        let q = fp_div(&r0, &r1);
        let r = r0.sub(&q.mul(&r1));
        (r0, r1) = (r1, r);
        let ns = s0.sub(&q.mul(&s1));
        (s0, s1) = (s1, ns);
        let nt = t0.sub(&q.mul(&t1));
        (t0, t1) = (t1, nt);
    }
    assert_eq!(r0.deg(), 0, "inputs must be coprime");
    let inv = inv_mod(r0.c[0], p).unwrap();
    (s0.scale(inv), t0.scale(inv))
}

fn fp_div(num: &FpPoly, den: &FpPoly) -> FpPoly {
    let p = num.p;
    let mut rem = num.c.clone();
    let dd = den.c.len() - 1;
    let lead_inv = inv_mod(*den.c.last().unwrap(), p).unwrap();
    if rem.len() <= dd {
        return FpPoly::zero(p);
    }
    let mut quot = vec![0u64; rem.len() - dd];
    while rem.len() > dd {
        let k = rem.len() - 1;
        let c = mul_mod(rem[k], lead_inv, p);
        quot[k - dd] = c;
        rem.pop();
        if c != 0 {
            for i in 0..dd {
                let sub = mul_mod(c, den.c[i], p);
                rem[k - dd + i] = (rem[k - dd + i] + p - sub) % p;
            }
        }
    }
    FpPoly::new(p, quot)
}

/// Factor a squarefree polynomial all of whose irreducible factors have
/// degree `d` (Cantor-Zassenhaus equal-degree splitting, seeded rng for
/// determinism). Returns monic factors.
fn equal_degree_factor(f: &FpPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<FpPoly> {
    let p = f.p;
    if f.deg() as usize == d {
        return vec![f.clone()];
    }
    // exponent (p^d - 1) / 2
    let e = (BigUint::from(p).pow(d as u32) - BigUint::one()) >> 1;
    loop {
        let a = FpPoly::new(
            p,
            (0..f.deg() as usize).map(|_| rng.gen_range(0..p)).collect(),
        );
        if a.deg() < 1 {
            continue;
        }
        let b = a.pow_rem_big(&e, f);
        let b1 = b.sub(&FpPoly::new(p, vec![1]));
        let g = f.gcd(&b1);
        if g.deg() > 0 && g.deg() < f.deg() {
            let h = fp_div(f, &g);
            let mut out = equal_degree_factor(&g, d, rng);
            out.extend(equal_degree_factor(&h, d, rng));
            return out;
        }
    }
}

// ---------------------------------------------------------------------------
// Unramified realization of roots of unity mod p^n
// ---------------------------------------------------------------------------

/// Arithmetic in GR(p^n, d) = (Z/p^n)[x]/(f) where f is a monic degree-d
/// divisor of the m-th cyclotomic polynomial (m prime to p). The class of x
/// is a primitive m-th root of unity; traces of its powers land in Z/p^n.
pub struct UnramifiedRealization {
    pub p: u64,
    pub n: u32,
    pub q: u64, // p^n
    pub m: u64, // order of the realized root (prime to p)
    pub degree: usize,
    modulus: Vec<u64>, // monic, mod q, constant first
}

impl UnramifiedRealization {
    /// Canonical realization: the Hensel lift of the lexicographically
    /// smallest irreducible factor of Phi_m mod p (coefficients compared
    /// from the constant term up). This fixes, once and for all, which
    /// p-adic root of unity the symbol zeta_m denotes.
    pub fn new(m: u64, p: u64, n: u32) -> Result<Self> {
        assert!(m >= 1 && m % p != 0, "m must be prime to p");
        let q = p
            .checked_pow(n)
            .ok_or_else(|| Error::Invalid(format!("p^n = {p}^{n} overflows u64")))?;
        if m == 1 {
            return Ok(UnramifiedRealization {
                p,
                n,
                q,
                m,
                degree: 1,
                modulus: vec![q - 1, 1], // x - 1
            });
        }
        let d = order_mod(p % m, m) as usize;
        let phi = cyclotomic_polynomial(m);
        let phi_p = FpPoly::new(
            p,
            phi.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect(),
        );
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c0de ^ m ^ (p << 32));
        let mut factors = equal_degree_factor(&phi_p, d, &mut rng);
        factors.sort_by(|a, b| a.c.cmp(&b.c));
        let f0 = factors.remove(0);
        let modulus = hensel_lift_factor(&phi, &f0, p, n)?;
        Ok(UnramifiedRealization {
            p,
            n,
            q,
            m,
            degree: d,
            modulus,
        })
    }

    /// zeta_m^k as an element of the Galois ring.
    pub fn realize(&self, k: u64) -> Vec<u64> {
        self.x_pow(k % self.m)
    }

    /// zeta_m^k when the realization is one-dimensional, as a scalar mod p^n.
    pub fn realize_scalar(&self, k: u64) -> u64 {
        assert_eq!(self.degree, 1);
        // x = root means the class of x reduces to modulus root: x - r.
        let r = (self.q - self.modulus[0]) % self.q;
        pow_mod(r, k % self.m, self.q)
    }

    /// Trace of zeta_m^k from GR(p^n, d) down to Z/p^n: the sum over the
    /// Frobenius orbit. Panics if the sum fails to be scalar (that would be
    /// a bug, since the sum is Frobenius-stable by construction).
    pub fn trace(&self, k: u64) -> u64 {
        if self.m == 1 {
            return 1 % self.q;
        }
        let mut acc = vec![0u64; self.degree];
        let mut e = k % self.m;
        for _ in 0..self.degree {
            let t = self.x_pow(e);
            for i in 0..self.degree {
                acc[i] = (acc[i] + t[i]) % self.q;
            }
            e = e * self.p % self.m;
        }
        assert!(
            acc.iter().skip(1).all(|&c| c == 0),
            "trace must be scalar (m={}, k={}, p={}^{})",
            self.m,
            k,
            self.p,
            self.n
        );
        acc[0]
    }

    fn x_pow(&self, e: u64) -> Vec<u64> {
        let d = self.degree;
        let mut acc = vec![0u64; d];
        acc[0] = 1 % self.q;
        if d == 1 {
            let r = (self.q - self.modulus[0]) % self.q;
            acc[0] = pow_mod(r, e, self.q);
            return acc;
        }
        let mut base = vec![0u64; d];
        base[1 % d] = 1;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Product in the Galois ring (operands of length `degree`).
    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let d = self.degree;
        let q = self.q;
        let mut wide = vec![0u64; 2 * d - 1];
        for i in 0..d {
            if a[i] == 0 {
                continue;
            }
            for j in 0..d {
                wide[i + j] = (wide[i + j] + mul_mod(a[i], b[j], q)) % q;
            }
        }
        // Reduce by the monic modulus.
        for k in (d..wide.len()).rev() {
            let c = wide[k];
            if c != 0 {
                wide[k] = 0;
                for i in 0..d {
                    let sub = mul_mod(c, self.modulus[i], q);
                    wide[k - d + i] = (wide[k - d + i] + q - sub) % q;
                }
            }
        }
        wide.truncate(d);
        wide
    }
}

/// Lift a monic irreducible factor f0 of `poly` from F_p to Z/p^n by linear
/// Hensel steps: at step k solve g0*df + f0*dg = e_k over F_p, where
/// e_k = (poly - f g)/p^k, and correct f, g by p^k * (df, dg).
fn hensel_lift_factor(poly: &[i64], f0: &FpPoly, p: u64, n: u32) -> Result<Vec<u64>> {
    let q = p.pow(n);
    let g0 = fp_div(
        &FpPoly::new(
            p,
            poly.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect(),
        ),
        f0,
    );
    let (_, t) = fp_bezout(f0, &g0); // s*f0 + t*g0 = 1 mod p
    let mut f: Vec<u64> = (0..=f0.deg() as usize)
        .map(|i| f0.c.get(i).copied().unwrap_or(0))
        .collect();
    let mut g: Vec<u64> = (0..=g0.deg().max(0) as usize)
        .map(|i| g0.c.get(i).copied().unwrap_or(0))
        .collect();
    for k in 1..n {
        let pk = p.pow(k);
        let step = pk * p;
        let err = poly_error(poly, &f, &g, step);
        // err is divisible by p^k; its quotient is the defect over F_p.
        let e_k = FpPoly::new(
            p,
            err.iter()
                .map(|&c| {
                    debug_assert_eq!(c % pk, 0);
                    c / pk
                })
                .collect(),
        );
        if e_k.is_zero() {
            continue;
        }
        // df = t * e_k mod f0; dg = (e_k - g0 * df) / f0 (exact over F_p).
        let df = t.mul(&e_k).rem(f0);
        let num = e_k.sub(&g0.mul(&df));
        let dg = fp_div(&num, f0);
        debug_assert!(num.sub(&dg.mul(f0)).is_zero(), "division must be exact");
        for (i, fi) in f.iter_mut().enumerate() {
            *fi = (*fi + pk * df.c.get(i).copied().unwrap_or(0)) % step;
        }
        for (i, gi) in g.iter_mut().enumerate() {
            *gi = (*gi + pk * dg.c.get(i).copied().unwrap_or(0)) % step;
        }
    }
    // Verify the lift: poly = f * g mod q.
    let e = poly_error(poly, &f, &g, q);
    if e.iter().any(|&c| c != 0) {
        return Err(Error::Invalid("Hensel lift failed to converge".into()));
    }
    Ok(f)
}

/// (poly - f*g) reduced mod `m`, as coefficients mod m.
fn poly_error(poly: &[i64], f: &[u64], g: &[u64], m: u64) -> Vec<u64> {
    let mut prod = vec![0u64; f.len() + g.len() - 1];
    for i in 0..f.len() {
        for j in 0..g.len() {
            prod[i + j] = (prod[i + j] + mul_mod(f[i], g[j], m)) % m;
        }
    }
    let mut out = vec![0u64; poly.len().max(prod.len())];
    for (i, o) in out.iter_mut().enumerate() {
        let a = poly
            .get(i)
            .map(|&c| (c.rem_euclid(m as i64)) as u64)
            .unwrap_or(0);
        let b = prod.get(i).copied().unwrap_or(0);
        *o = (a + m - b) % m;
    }
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_small() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(cyclotomic_polynomial(3), vec![1, 1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        // degree phi(m)
        for m in 1..60u64 {
            assert_eq!(
                cyclotomic_polynomial(m).len() as u64 - 1,
                crate::modarith::euler_phi(m)
            );
        }
    }

    #[test]
    fn rational_traces() {
        // Tr over the decomposition group of 3 acting on zeta_4: full group,
        // zeta_4 + zeta_4^3 = 0.
        assert_eq!(trace_root_of_unity(4, 1, 3).unwrap(), 0);
        // zeta_3 + zeta_3^2 = -1 (p = 3: ramified part contributes all units).
        assert_eq!(trace_root_of_unity(3, 1, 3).unwrap(), -1);
        // trivial root
        assert_eq!(trace_root_of_unity(1, 0, 5).unwrap(), 1);
        // zeta_5 over p = 19: decomposition group {1,4}, irrational.
        assert!(matches!(
            trace_root_of_unity(5, 1, 19),
            Err(Error::NonRationalTrace { .. })
        ));
    }

    #[test]
    fn realization_matches_rational_traces() {
        // Whenever the integer-polynomial trace is rational, the Galois-ring
        // trace must agree with it mod p^n (decomposition group restricted
        // to the prime-to-p part; the ramified part is handled separately by
        // callers).
        for (m, p) in [(4u64, 3u64), (8, 3), (5, 11), (7, 13), (12, 5)] {
            for n in 1..=3u32 {
                let real = UnramifiedRealization::new(m, p, n).unwrap();
                let q = p.pow(n);
                for k in 0..m {
                    if let Ok(t) = trace_root_of_unity(m, k, p) {
                        assert_eq!(
                            real.trace(k),
                            (t.rem_euclid(q as i64)) as u64,
                            "m={m} k={k} p={p} n={n}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn realized_root_has_exact_order() {
        for (m, p) in [(5u64, 19u64), (16, 7), (9, 7), (7, 3), (20, 3)] {
            for n in 1..=3u32 {
                let real = UnramifiedRealization::new(m, p, n).unwrap();
                let one = {
                    let mut v = vec![0u64; real.degree];
                    v[0] = 1;
                    v
                };
                assert_eq!(real.realize(m), one, "zeta^m = 1");
                for d in 1..m {
                    if m % d == 0 {
                        assert_ne!(real.realize(d), one, "order must be exactly {m}");
                    }
                }
            }
        }
    }

    #[test]
    fn irrational_trace_realized_consistently() {
        // zeta_5 over Q_19: trace t = zeta + zeta^4 satisfies t^2 + t - 1 = 0.
        for n in 1..=4u32 {
            let real = UnramifiedRealization::new(5, 19, n).unwrap();
            let q = 19u64.pow(n);
            let t = real.trace(1);
            assert_eq!((mul_mod(t, t, q) + t + q - 1) % q, 0, "n={n}");
        }
    }

    #[test]
    fn degree_one_scalar_realization() {
        // 5 = 1 mod 4, so zeta_4 lives in Z_5: its realization squares to -1.
        let real = UnramifiedRealization::new(4, 5, 3).unwrap();
        assert_eq!(real.degree, 1);
        let z = real.realize_scalar(1);
        assert_eq!(mul_mod(z, z, 125), 124);
        assert_eq!(real.trace(1), z);
    }
}
