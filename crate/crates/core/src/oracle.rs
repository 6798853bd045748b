//! Exact rational Bernoulli machinery: ordinary Bernoulli numbers, the
//! regular-prime test, Dirichlet characters with values in cyclotomic
//! fields, generalized Bernoulli numbers, and the scan that predicts
//! configurations whose index should be nontrivial.

use crate::error::{Error, Result};
use crate::fieldspec::unit_group_structure;
use crate::modarith::{gcd, is_prime};
use crate::poly::cyclotomic_polynomial;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::sync::Mutex;
use std::sync::OnceLock;

fn big(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

static BERNOULLI_CACHE: OnceLock<Mutex<Vec<BigRational>>> = OnceLock::new();

/// The k-th Bernoulli number, with the convention B_1 = -1/2, via the
/// recurrence sum_{j=0}^{m} C(m+1, j) B_j = 0; memoized.
pub fn bernoulli(k: usize) -> BigRational {
    let cache = BERNOULLI_CACHE.get_or_init(|| Mutex::new(vec![big(1)]));
    let mut table = cache.lock().unwrap();
    while table.len() <= k {
        let m = table.len(); // computing B_m, m >= 1
        // sum_{j=0}^{m} C(m+1, j) B_j = 0  =>  B_m = -1/C(m+1,m) * rest.
        let mut binom = BigInt::one(); // C(m+1, j) built incrementally
        let mut acc = BigRational::zero();
        for (j, b) in table.iter().enumerate() {
            acc += BigRational::from_integer(binom.clone()) * b;
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        // binom is now C(m+1, m) = m+1.
        let bm = -acc / BigRational::from_integer(binom);
        table.push(bm);
    }
    table[k].clone()
}

/// Whether the odd prime p divides no numerator of B_2, B_4, ..., B_{p-3}.
pub fn is_regular(p: u64) -> Result<bool> {
    if p == 2 || !is_prime(p) {
        return Err(Error::BadPrime(p));
    }
    let p_big = BigInt::from(p);
    for k in (2..=p.saturating_sub(3)).step_by(2) {
        if bernoulli(k as usize).numer().mod_floor(&p_big).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Elements of Q(zeta_m)
// ---------------------------------------------------------------------------

/// An element of Q(zeta_m) in the power basis mod Phi_m, with exact
/// rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicRational {
    pub m: u64,
    /// Length deg Phi_m; coefficient of zeta_m^i at index i.
    pub coeffs: Vec<BigRational>,
}

impl CyclotomicRational {
    pub fn zero(m: u64) -> Self {
        let deg = cyclotomic_polynomial(m).len() - 1;
        CyclotomicRational {
            m,
            coeffs: vec![BigRational::zero(); deg],
        }
    }

    /// The element c * zeta_m^e.
    pub fn monomial(m: u64, e: u64, c: BigRational) -> Self {
        let mut out = Self::zero(m);
        let phi = cyclotomic_polynomial(m);
        let deg = phi.len() - 1;
        // Reduce x^e mod Phi_m by repeated use of the monic leading term.
        let mut pow = vec![BigRational::zero(); (e as usize % lcm_period(m)) + 1];
        let idx = pow.len() - 1;
        pow[idx] = c;
        let reduced = reduce_mod_phi(pow, &phi);
        for (i, v) in reduced.into_iter().enumerate().take(deg) {
            out.coeffs[i] = v;
        }
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        assert_eq!(self.m, other.m);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        CyclotomicRational {
            m: self.m,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.m, other.m);
        let phi = cyclotomic_polynomial(self.m);
        let mut prod = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len()];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                prod[i + j] += a * b;
            }
        }
        let reduced = reduce_mod_phi(prod, &phi);
        CyclotomicRational {
            m: self.m,
            coeffs: reduced,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The rational value if the element is a constant.
    pub fn rational(&self) -> Option<BigRational> {
        if self.coeffs.iter().skip(1).all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Galois twist zeta_m -> zeta_m^t, t prime to m.
    pub fn twist(&self, t: u64) -> Self {
        let mut out = Self::zero(self.m);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = (i as u64 * t) % self.m.max(1);
            let mono = Self::monomial(self.m, e, c.clone());
            out.add_assign(&mono);
        }
        out
    }

    /// Field norm to Q: the product over all Galois conjugates. Computed
    /// over the integers after clearing denominators once, which avoids
    /// per-operation rational normalization on large inputs.
    pub fn norm(&self) -> BigRational {
        let m = self.m.max(1);
        let phi = cyclotomic_polynomial(self.m);
        let deg = phi.len() - 1;
        // Clear denominators: self = ints / den.
        let den: BigInt = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| num_integer::lcm(acc, c.denom().clone()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        let mut acc = vec![BigInt::zero(); deg];
        acc[0] = BigInt::one();
        let mut conjugates = 0u32;
        for t in 1..=m {
            if gcd(t, m) != 1 {
                continue;
            }
            conjugates += 1;
            let twisted = int_twist(self.m, &phi, &ints, t);
            acc = int_mul_mod(&phi, &acc, &twisted);
        }
        assert!(
            acc.iter().skip(1).all(|c| c.is_zero()),
            "norm is Galois-invariant, hence rational"
        );
        BigRational::new(acc[0].clone(), den.pow(conjugates))
    }
}

fn lcm_period(m: u64) -> usize {
    m.max(1) as usize
}

/// Apply zeta -> zeta^t to an integer coefficient vector and reduce mod phi.
fn int_twist(m: u64, phi: &[i64], coeffs: &[BigInt], t: u64) -> Vec<BigInt> {
    let period = m.max(1);
    let mut out = vec![BigInt::zero(); period as usize];
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let e = (i as u64 * t) % period;
        out[e as usize] += c;
    }
    int_reduce_mod_phi(out, phi)
}

/// Multiply two integer coefficient vectors modulo the monic polynomial phi.
fn int_mul_mod(phi: &[i64], a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut prod = vec![BigInt::zero(); a.len() + b.len()];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            prod[i + j] += x * y;
        }
    }
    int_reduce_mod_phi(prod, phi)
}

fn int_reduce_mod_phi(mut poly: Vec<BigInt>, phi: &[i64]) -> Vec<BigInt> {
    let deg = phi.len() - 1;
    while poly.len() > deg {
        let lead = poly.pop().unwrap();
        if lead.is_zero() {
            continue;
        }
        let top = poly.len() - deg;
        for (i, &c) in phi.iter().enumerate().take(deg) {
            poly[top + i] -= &lead * c;
        }
    }
    poly.resize(deg, BigInt::zero());
    poly
}

/// Reduce a rational polynomial modulo the monic integer polynomial phi.
fn reduce_mod_phi(mut poly: Vec<BigRational>, phi: &[i64]) -> Vec<BigRational> {
    let deg = phi.len() - 1;
    while poly.len() > deg {
        let lead = poly.pop().unwrap();
        if lead.is_zero() {
            continue;
        }
        let top = poly.len() - deg; // exponent the leading term folds onto
        for (i, &c) in phi.iter().enumerate().take(deg) {
            poly[top + i] -= &lead * big(c);
        }
    }
    poly.resize(deg, BigRational::zero());
    poly
}

// ---------------------------------------------------------------------------
// Dirichlet characters
// ---------------------------------------------------------------------------

/// A Dirichlet character mod m with values in the o-th roots of unity,
/// stored as the exponent table a -> e with value zeta_o^e (None off the
/// units).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirichletChar {
    pub modulus: u64,
    pub order: u64,
    table: Vec<Option<u64>>,
}

impl DirichletChar {
    pub fn trivial() -> Self {
        DirichletChar {
            modulus: 1,
            order: 1,
            table: vec![Some(0)],
        }
    }

    /// Build from exponents on the canonical generators of (Z/m)^*.
    pub fn from_exponents(modulus: u64, exps: &[u64]) -> Result<Self> {
        if modulus == 1 {
            return Ok(Self::trivial());
        }
        let st = unit_group_structure(modulus)?;
        if exps.len() != st.generators.len() {
            return Err(Error::Invalid(format!(
                "expected {} exponents for modulus {modulus}",
                st.generators.len()
            )));
        }
        let exps: Vec<u64> = exps.iter().zip(&st.orders).map(|(&e, &o)| e % o).collect();
        let order = exps
            .iter()
            .zip(&st.orders)
            .map(|(&e, &o)| o / gcd(e, o))
            .fold(1u64, num_integer::lcm);
        let mut table = vec![None; modulus as usize];
        // Enumerate exponent tuples on the generators.
        let k = st.generators.len();
        let mut tuple = vec![0u64; k];
        loop {
            let mut a = 1u64;
            let mut e = 0u64;
            for i in 0..k {
                for _ in 0..tuple[i] {
                    a = a * st.generators[i] % modulus;
                }
                e = (e + tuple[i] % st.orders[i] * (exps[i] * order / st.orders[i])) % order;
            }
            table[a as usize] = Some(e % order);
            let mut j = k;
            for i in (0..k).rev() {
                tuple[i] += 1;
                if tuple[i] < st.orders[i] {
                    j = i;
                    break;
                }
                tuple[i] = 0;
            }
            if j == k {
                break;
            }
        }
        Ok(DirichletChar {
            modulus,
            order,
            table,
        })
    }

    /// The mod-p Teichmueller character: the faithful character of (Z/p)^*
    /// sending the canonical generator to zeta_{p-1}. (Any identification
    /// gives the same norms, which is all the oracle consumes.)
    pub fn teichmuller_char(p: u64) -> Result<Self> {
        if !is_prime(p) || p == 2 {
            return Err(Error::BadPrime(p));
        }
        Self::from_exponents(p, &[1])
    }

    /// Exponent of zeta_order at a, None off the units.
    pub fn exponent(&self, a: u64) -> Option<u64> {
        self.table[(a % self.modulus) as usize]
    }

    pub fn is_even(&self) -> bool {
        self.exponent(self.modulus.wrapping_sub(1).max(1) % self.modulus.max(1))
            .map(|e| e == 0)
            .unwrap_or(true)
    }

    /// chi^t.
    pub fn power(&self, t: u64) -> Self {
        let order = self.order / gcd(t % self.order.max(1), self.order);
        let table = self
            .table
            .iter()
            .map(|v| v.map(|e| e * (t % self.order) % self.order / (self.order / order)))
            .collect();
        DirichletChar {
            modulus: self.modulus,
            order,
            table,
        }
    }

    /// Pointwise product, at the lcm modulus and lcm order, normalized so
    /// the stated order is exact.
    pub fn product(&self, other: &Self) -> Self {
        let m = num_integer::lcm(self.modulus, other.modulus);
        let o = num_integer::lcm(self.order, other.order);
        let mut table = vec![None; m as usize];
        for a in 0..m {
            if gcd(a.max(1), m) != 1 && m > 1 {
                continue;
            }
            if let (Some(e1), Some(e2)) = (self.exponent(a), other.exponent(a)) {
                table[a as usize] =
                    Some((e1 * (o / self.order) + e2 * (o / other.order)) % o);
            }
        }
        let g = table
            .iter()
            .flatten()
            .fold(o, |acc, &e| gcd(acc, e));
        let order = o / g;
        let table = table.into_iter().map(|v| v.map(|e| e / g)).collect();
        DirichletChar {
            modulus: m,
            order,
            table,
        }
    }

    /// The conductor: the smallest divisor f of the modulus such that the
    /// character is trivial on units congruent to 1 mod f.
    pub fn conductor(&self) -> u64 {
        let m = self.modulus;
        let mut divisors: Vec<u64> = (1..=m).filter(|d| m % d == 0).collect();
        divisors.sort();
        for f in divisors {
            let ok = (1..=m)
                .filter(|&a| gcd(a, m) == 1 && (f == 1 || a % f == 1))
                .all(|a| self.exponent(a) == Some(0));
            if ok {
                return f;
            }
        }
        m
    }

    /// The primitive character of conductor f inducing this one.
    pub fn primitive_reduction(&self) -> Self {
        let f = self.conductor();
        if f == self.modulus {
            return self.clone();
        }
        let mut table = vec![None; f as usize];
        for b in 0..f.max(1) {
            if f > 1 && gcd(b.max(1), f) != 1 {
                continue;
            }
            if f == 1 || gcd(b, f) == 1 {
                // Lift b to a unit mod modulus congruent to b mod f.
                let e = (0..)
                    .map(|t| (b + t * f) % self.modulus.max(1))
                    .take(self.modulus as usize + 1)
                    .find_map(|a| self.exponent(a.max(if self.modulus == 1 { 1 } else { 0 })))
                    .expect("every unit mod f lifts to a unit mod m");
                table[b as usize] = Some(e);
            }
        }
        DirichletChar {
            modulus: f,
            order: self.order,
            table,
        }
    }
}

/// Generalized Bernoulli number B_{k, psi} = f^{k-1} sum_{a=1}^{f}
/// psi(a) B_k(a/f), exact in Q(zeta_{o(psi)}). Requires psi primitive.
/// (For the trivial character of conductor 1 and k = 1 this yields the
/// classical +1/2, the sign opposite to B_1 = -1/2.)
pub fn generalized_bernoulli(psi: &DirichletChar, k: usize) -> Result<CyclotomicRational> {
    if k == 0 {
        return Err(Error::Invalid("k must be at least 1".into()));
    }
    if psi.conductor() != psi.modulus {
        return Err(Error::Invalid(format!(
            "character mod {} is not primitive (conductor {})",
            psi.modulus,
            psi.conductor()
        )));
    }
    let f = psi.modulus;
    let o = psi.order;
    let mut out = CyclotomicRational::zero(o);
    // B_k(x) = sum_i C(k, i) B_i x^{k-i}.
    let mut binom: Vec<BigRational> = Vec::with_capacity(k + 1);
    let mut c = BigInt::one();
    for i in 0..=k {
        binom.push(BigRational::from_integer(c.clone()));
        c = c * BigInt::from(k - i) / BigInt::from(i + 1);
    }
    let fq = big(f as i64);
    for a in 1..=f {
        let Some(e) = psi.exponent(a % f) else { continue };
        let x = big(a as i64) / fq.clone();
        let mut val = BigRational::zero();
        let mut xpow = BigRational::one();
        for i in (0..=k).rev() {
            val += &binom[i] * bernoulli(i) * &xpow;
            xpow *= &x;
        }
        out.add_assign(&CyclotomicRational::monomial(o, e, val));
    }
    let scale = fq.pow((k - 1) as i32);
    Ok(out.scale(&scale))
}

/// v_p of a nonzero rational.
pub fn rational_p_valuation(x: &BigRational, p: u64) -> i64 {
    assert!(!x.is_zero());
    let p_big = BigInt::from(p);
    let count = |mut y: BigInt| -> i64 {
        let mut v = 0;
        y = y.abs();
        while (&y).mod_floor(&p_big).is_zero() {
            y /= &p_big;
            v += 1;
        }
        v
    };
    count(x.numer().clone()) - count(x.denom().clone())
}

/// A configuration flagged by the Bernoulli scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredictedConfig {
    /// Conductor of the even character chi.
    pub conductor: u64,
    /// Exponents of chi on the canonical generators of the unit group.
    pub char_exponents: Vec<u64>,
    pub char_order: u64,
    pub r: u64,
    /// v_p of Norm(B_{r, psi} / r) for psi = chi * omega^{-r}.
    pub valuation: i64,
}

/// Scan even primitive characters chi of conductor <= conductor_bound and
/// odd twists 3 <= r <= r_bound for positive p-valuation of
/// Norm(B_{r, psi} / r), where psi is the primitive character inducing
/// chi * omega^{-r} and omega is the mod-p Teichmueller character. The
/// flagged (chi, r) are the configurations where a nontrivial index is
/// expected; the normalization is calibrated on regular cases, not asserted.
pub fn predicted_nontrivial_configs(
    p: u64,
    conductor_bound: u64,
    r_bound: u64,
) -> Result<Vec<PredictedConfig>> {
    let mut out = Vec::new();
    for f in 1..=conductor_bound {
        if f % 4 == 2 {
            continue; // no primitive characters at such moduli
        }
        out.extend(predicted_nontrivial_configs_at(p, f, r_bound)?);
    }
    Ok(out)
}

/// The same scan restricted to even primitive characters of one conductor.
pub fn predicted_nontrivial_configs_at(
    p: u64,
    f: u64,
    r_bound: u64,
) -> Result<Vec<PredictedConfig>> {
    let omega = DirichletChar::teichmuller_char(p)?;
    let mut out = Vec::new();
    let chars = enumerate_dirichlet(f)?;
    for (exps, chi) in chars {
        if chi.conductor() != f || !chi.is_even() {
            continue;
        }
        for r in (3..=r_bound).step_by(2) {
            // omega^{-r} = omega^{p-1-(r mod p-1)}.
            let t = (p - 1 - r % (p - 1)) % (p - 1);
            let psi = chi.product(&omega.power(t)).primitive_reduction();
            let b = generalized_bernoulli(&psi, r as usize)?;
            if b.is_zero() {
                continue;
            }
            let norm = b.scale(&(big(1) / big(r as i64))).norm();
            if norm.is_zero() {
                continue;
            }
            let v = rational_p_valuation(&norm, p);
            if v > 0 {
                out.push(PredictedConfig {
                    conductor: f,
                    char_exponents: exps.clone(),
                    char_order: chi.order,
                    r,
                    valuation: v,
                });
            }
        }
    }
    Ok(out)
}

/// All Dirichlet characters mod m, keyed by generator exponents.
pub fn enumerate_dirichlet(m: u64) -> Result<Vec<(Vec<u64>, DirichletChar)>> {
    if m == 1 {
        return Ok(vec![(vec![], DirichletChar::trivial())]);
    }
    let st = unit_group_structure(m)?;
    let k = st.generators.len();
    let mut out = Vec::new();
    let mut tuple = vec![0u64; k];
    loop {
        out.push((tuple.clone(), DirichletChar::from_exponents(m, &tuple)?));
        let mut j = k;
        for i in (0..k).rev() {
            tuple[i] += 1;
            if tuple[i] < st.orders[i] {
                j = i;
                break;
            }
            tuple[i] = 0;
        }
        if j == k {
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0), big(1));
        assert_eq!(bernoulli(1), big(-1) / big(2));
        assert_eq!(bernoulli(2), big(1) / big(6));
        assert_eq!(bernoulli(12), big(-691) / big(2730));
        for k in (3..20).step_by(2) {
            assert!(bernoulli(k).is_zero(), "B_{k} nonzero");
        }
    }

    #[test]
    fn regularity() {
        assert!(is_regular(3).unwrap());
        assert!(is_regular(5).unwrap());
        assert!(is_regular(7).unwrap());
        assert!(!is_regular(37).unwrap());
        assert!(!is_regular(691).unwrap());
        assert!(is_regular(2).is_err());
    }

    #[test]
    fn generalized_bernoulli_values() {
        // Trivial character, k = 2: plain B_2.
        let triv = DirichletChar::trivial();
        let b2 = generalized_bernoulli(&triv, 2).unwrap();
        assert_eq!(b2.rational().unwrap(), big(1) / big(6));
        // k = 1 trivial-character exception: +1/2, not B_1 = -1/2.
        let b1 = generalized_bernoulli(&triv, 1).unwrap();
        assert_eq!(b1.rational().unwrap(), big(1) / big(2));
        // Quadratic mod 5 is even: B_1 vanishes by the a <-> f-a symmetry.
        let chi5 = DirichletChar::from_exponents(5, &[2]).unwrap();
        assert_eq!(chi5.order, 2);
        assert!(chi5.is_even());
        assert!(generalized_bernoulli(&chi5, 1).unwrap().is_zero());
        // Quadratic mod 3 (odd): B_1 = -1/3.
        let chi3 = DirichletChar::from_exponents(3, &[1]).unwrap();
        assert!(!chi3.is_even());
        let b = generalized_bernoulli(&chi3, 1).unwrap();
        assert_eq!(b.rational().unwrap(), big(-1) / big(3));
    }

    #[test]
    fn parity_vanishing() {
        // B_{k, psi} = 0 whenever psi(-1) != (-1)^k, k >= 2.
        for m in [3u64, 4, 5, 7, 8] {
            for (_, chi) in enumerate_dirichlet(m).unwrap() {
                if chi.conductor() != m {
                    continue;
                }
                for k in 2..=5usize {
                    let b = generalized_bernoulli(&chi, k).unwrap();
                    let sign_match = chi.is_even() == (k % 2 == 0);
                    if !sign_match {
                        assert!(b.is_zero(), "m={m} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn primitivity_enforced() {
        // The character mod 9 factoring through mod 3 is rejected.
        let chi9 = DirichletChar::from_exponents(9, &[3]).unwrap();
        assert_eq!(chi9.conductor(), 3);
        assert!(generalized_bernoulli(&chi9, 1).is_err());
        let red = chi9.primitive_reduction();
        assert_eq!(red.modulus, 3);
        assert!(generalized_bernoulli(&red, 1).is_ok());
    }

    #[test]
    fn norm_of_rational_is_power() {
        // For a quartic character the norm multiplies the two conjugates.
        let chi5 = DirichletChar::from_exponents(5, &[1]).unwrap();
        assert_eq!(chi5.order, 4);
        let b = generalized_bernoulli(&chi5, 3).unwrap();
        let n = b.norm();
        assert!(!n.is_zero());
    }

    #[test]
    fn regular_prime_scan_empty() {
        // Regular p with F = Q: nothing flagged.
        let out = predicted_nontrivial_configs(5, 1, 9).unwrap();
        assert!(out.is_empty(), "{out:?}");
        let out = predicted_nontrivial_configs(7, 1, 9).unwrap();
        assert!(out.is_empty(), "{out:?}");
    }

    #[test]
    fn irregular_37_flagged() {
        // The irregular pair (37, 32): B_32 = B_{r, omega^{32 - r}} mod 37
        // forces a hit for every odd r with r = 32 - (even part) ... the
        // scan at conductor 1 must flag some odd r <= 35.
        let out = predicted_nontrivial_configs(37, 1, 35).unwrap();
        assert!(!out.is_empty());
    }
}
