//! Residual images of the cyclotomic elements in discrete-log coordinates,
//! the residual index, norm-relation checks, and the single-component
//! shortcut available when the character order divides p - 1.

use crate::chipart::{chi_span_order, GroupRingElt};
use crate::error::{Error, Result};
use crate::fieldspec::{galois_representatives, Character, FieldSpec};
use crate::modarith::{
    dlog_prime_power, gcd, is_prime, is_primitive_root, pow_mod, primitive_root, valuation,
};
use crate::poly::UnramifiedRealization;
use std::collections::BTreeSet;

/// Fixed data for residual computations at one auxiliary prime:
/// ell = 1 mod d p^n, a primitive root eta mod ell, and
/// g_p = eta^((ell-1)/p^n), a generator of the p^n-torsion of F_ell^*.
#[derive(Clone, Debug)]
pub struct ResidualContext {
    pub field: FieldSpec,
    pub ell: u64,
    pub n: u32,
    pub r: u64,
    pub eta: u64,
    pub g_p: u64,
}

impl ResidualContext {
    /// Build a context with the smallest primitive root mod ell.
    pub fn new(field: FieldSpec, ell: u64, n: u32, r: u64) -> Result<Self> {
        let eta = primitive_root(ell)?;
        Self::with_root(field, ell, n, r, eta)
    }

    /// Build a context with an explicitly chosen primitive root.
    pub fn with_root(field: FieldSpec, ell: u64, n: u32, r: u64, eta: u64) -> Result<Self> {
        if !is_prime(ell) {
            return Err(Error::NotPrime(ell));
        }
        if r < 3 || r % 2 == 0 {
            return Err(Error::BadTwist(r));
        }
        let n_min = field.a.max(1);
        if n < n_min {
            return Err(Error::InvalidLevel {
                n,
                requirement: format!("n must be at least max(a,1) = {n_min}"),
            });
        }
        let dpn = field.d * field.p.pow(n);
        if (ell - 1) % dpn != 0 {
            return Err(Error::InvalidLevel {
                n,
                requirement: format!("ell = {ell} must be 1 mod d p^n = {dpn}"),
            });
        }
        if !is_primitive_root(eta, ell) {
            return Err(Error::NotPrimitiveRoot { g: eta, ell });
        }
        let g_p = pow_mod(eta, (ell - 1) / field.p.pow(n), ell);
        Ok(ResidualContext {
            field,
            ell,
            n,
            r,
            eta,
            g_p,
        })
    }
}

/// For each coset g of G, the set of residues mod b p^a attained by integer
/// representatives of g; index 0 (identity) yields the subgroup S_b.
fn residues_mod_bpa(fs: &FieldSpec, b: u64) -> Vec<BTreeSet<u64>> {
    let bpa = b * fs.p.pow(fs.a);
    let m = fs.d * fs.p.pow(fs.a.max(1));
    let mut out = vec![BTreeSet::new(); fs.group.order()];
    for u in 1..=m {
        if gcd(u, m) != 1 {
            continue;
        }
        let uf = if fs.f == 1 { 1 } else { u % fs.f };
        let g = fs
            .group
            .coset_of_residue(uf)
            .expect("unit residues map onto G");
        out[g].insert(if bpa == 1 { 1 } else { u % bpa });
    }
    out
}

/// The subgroup K_b of G acting trivially on Q(zeta_{b p^infty}) \cap F.
pub fn fixing_subgroup(fs: &FieldSpec, b: u64) -> Result<Vec<usize>> {
    if b == 0 || fs.d % b != 0 {
        return Err(Error::BadDivisor { b, d: fs.d });
    }
    let classes = residues_mod_bpa(fs, b);
    Ok((0..fs.group.order())
        .filter(|&g| classes[g].contains(&1))
        .collect())
}

/// The coset of G through which a prime q acts on Q(zeta_{b p^infty}) \cap F
/// (well defined modulo K_b; any representative is returned).
pub fn frobenius_coset(fs: &FieldSpec, b: u64, q: u64) -> Result<usize> {
    let bpa = b * fs.p.pow(fs.a);
    if gcd(q, bpa) != 1 {
        return Err(Error::BadDivisor { b, d: fs.d });
    }
    if bpa == 1 {
        return Ok(0);
    }
    let classes = residues_mod_bpa(fs, b);
    (0..fs.group.order())
        .find(|&g| classes[g].contains(&(q % bpa)))
        .ok_or_else(|| Error::Invalid(format!("no coset acts as {q} mod {bpa}")))
}

/// The canonical coefficient lifts a_g: for each coset g, the smallest
/// positive integer prime to b p^n whose class mod b p^a represents the
/// image of g^{-1} in G/K_b.
pub fn coefficient_lifts(fs: &FieldSpec, b: u64, n: u32) -> Result<Vec<u64>> {
    if b == 0 || fs.d % b != 0 {
        return Err(Error::BadDivisor { b, d: fs.d });
    }
    let bpa = b * fs.p.pow(fs.a);
    let bpn = b * fs.p.pow(n);
    let classes = residues_mod_bpa(fs, b);
    let mut out = Vec::with_capacity(fs.group.order());
    for g in 0..fs.group.order() {
        let target = &classes[fs.group.inv(g)];
        let a_g = (1..=bpn)
            .find(|&u| gcd(u, bpn) == 1 && target.contains(&(if bpa == 1 { 1 } else { u % bpa })))
            .expect("units mod b p^n surject onto G/K_b");
        out.push(a_g);
    }
    Ok(out)
}

/// The residual image of the cyclotomic element at divisor b, as the
/// group-ring element with
///   coord_g = sum over i in J_{b,n} of
///             ((a_g i)^{r-1} mod p^n) * dlog(g_p, (1 - eta^{a_g i (ell-1)/(b p^n)})^{(ell-1)/p^n}).
/// The weight (a_g i)^{r-1} expresses every component in the fixed basis
/// obtained from one primitive p^n-th root of unity mod ell: the lift a_g
/// moves both the evaluation point and the twist trivialization, so the
/// inner sum runs over the full unit coset a_g J_{b,n} with the intrinsic
/// weight u^{r-1}. This makes coord_g independent of the choice of a_g
/// within its class and of the representative set J_{b,n}.
pub fn residual_vector(ctx: &ResidualContext, b: u64) -> Result<GroupRingElt> {
    let j = galois_representatives(&ctx.field, b, ctx.n)?;
    let a = coefficient_lifts(&ctx.field, b, ctx.n)?;
    residual_vector_with_reps(ctx, b, &a, &j)
}

/// Same as [`residual_vector`] with explicit choices of the coefficient
/// lifts and the representative set; used by invariance tests. Each entry
/// must be a unit modulo b p^n.
pub fn residual_vector_with_reps(
    ctx: &ResidualContext,
    b: u64,
    a: &[u64],
    j: &[u64],
) -> Result<GroupRingElt> {
    let fs = &ctx.field;
    if b == 0 || fs.d % b != 0 {
        return Err(Error::BadDivisor { b, d: fs.d });
    }
    if a.len() != fs.group.order() {
        return Err(Error::AmbientMismatch);
    }
    let p = fs.p;
    let pn = p.pow(ctx.n);
    let bpn = b * pn;
    for &u in a.iter().chain(j) {
        if gcd(u, bpn) != 1 {
            return Err(Error::Invalid(format!("{u} is not a unit mod {bpn}")));
        }
    }
    let step = (ctx.ell - 1) / bpn;
    let outer = (ctx.ell - 1) / pn;
    let mut coeffs = vec![0u64; fs.group.order()];
    for (g, coord) in coeffs.iter_mut().enumerate() {
        let mut acc = 0u64;
        for &i in j {
            let ai_pn = ((a[g] as u128 * i as u128) % pn as u128) as u64;
            let weight = pow_mod(ai_pn, ctx.r - 1, pn);
            let e = {
                let m = (ctx.ell - 1) as u128;
                let ai = (a[g] as u128 * i as u128) % m;
                ((ai * step as u128) % m) as u64
            };
            let factor = (1 + ctx.ell - pow_mod(ctx.eta, e, ctx.ell)) % ctx.ell;
            assert!(factor != 0, "cyclotomic factor vanished: a i is a unit mod b p^n");
            let w = pow_mod(factor, outer, ctx.ell);
            let dl = dlog_prime_power(ctx.ell, ctx.g_p, w, p, ctx.n)?;
            acc = (acc + weight * dl) % pn;
        }
        *coord = acc;
    }
    GroupRingElt::from_coeffs(&fs.group, p, ctx.n, &coeffs)
}

/// The residual index valuation for chi at this context:
/// v(ire) = chi_span_order(chi, p, n, 1) - chi_span_order(chi, p, n, c).
pub fn residual_index(ctx: &ResidualContext, chi: &Character, c: &GroupRingElt) -> Result<u64> {
    let group = &ctx.field.group;
    let one = GroupRingElt::one(group, ctx.field.p, ctx.n);
    let full = chi_span_order(group, chi, ctx.field.p, ctx.n, &one)?;
    let sub = chi_span_order(group, chi, ctx.field.p, ctx.n, c)?;
    debug_assert!(sub <= full);
    Ok(full - sub)
}

/// Check the norm relation between the residual vectors at levels q b and b:
/// the norm over K_b/K_qb applied to the level-q b vector must equal
/// (1 - q^{r-1} Fr_q^{-1}) applied to the level-b vector (just the level-b
/// vector when q divides b).
pub fn check_norm_relation(ctx: &ResidualContext, q: u64, b: u64) -> Result<bool> {
    let fs = &ctx.field;
    if q == fs.p {
        return Err(Error::Invalid("q must differ from p".into()));
    }
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if b == 0 || (q * b) == 0 || fs.d % (q * b) != 0 {
        return Err(Error::BadDivisor { b: q * b, d: fs.d });
    }
    let v_qb = residual_vector(ctx, q * b)?;
    let v_b = residual_vector(ctx, b)?;
    let pn = fs.p.pow(ctx.n);

    let k_b: Vec<usize> = fixing_subgroup(fs, b)?;
    let k_qb: BTreeSet<usize> = fixing_subgroup(fs, q * b)?.into_iter().collect();
    // Transversal of K_qb inside K_b.
    let mut reps = Vec::new();
    let mut covered: BTreeSet<usize> = BTreeSet::new();
    for &g in &k_b {
        if covered.contains(&g) {
            continue;
        }
        reps.push(g);
        for &k in &k_qb {
            covered.insert(fs.group.mul(g, k));
        }
    }
    let mut lhs = GroupRingElt::zero(&fs.group, fs.p, ctx.n);
    for &g in &reps {
        lhs = lhs.add(&v_qb.translate(&fs.group, g))?;
    }

    let rhs = if b % q == 0 {
        v_b
    } else {
        let fr = frobenius_coset(fs, b, q)?;
        let qpow = pow_mod(q % pn, ctx.r - 1, pn);
        let twisted = v_b.translate(&fs.group, fs.group.inv(fr)).scale(pn - qpow);
        v_b.add(&twisted)?
    };
    Ok(lhs == rhs)
}

/// The Teichmueller representative of x mod p^n: the unique (p-1)-th root
/// of unity congruent to x mod p, computed by iterated p-th powering.
pub fn teichmuller(x: u64, p: u64, n: u32) -> Result<u64> {
    if x % p == 0 {
        return Err(Error::Invalid(format!("{x} is divisible by {p}")));
    }
    let pn = p.pow(n);
    let mut y = x % pn;
    loop {
        let z = pow_mod(y, p, pn);
        if z == y {
            return Ok(y);
        }
        y = z;
    }
}

/// Single-component residual index for characters whose order divides
/// p - 1: v = min(n, v_p(s)) with s the character pairing
/// sum over g of chi(g) coord_g, character values realized in Z/p^n through
/// the canonical unramified realization (equivalently their Teichmueller
/// representatives).
pub fn kurihara_index(ctx: &ResidualContext, chi: &Character, c: &GroupRingElt) -> Result<u64> {
    let p = ctx.field.p;
    if (p - 1) % chi.order != 0 {
        return Err(Error::OrderNotDividing { o: chi.order, pm1: p - 1 });
    }
    let pn = p.pow(ctx.n);
    let real = UnramifiedRealization::new(chi.order, p, ctx.n)?;
    let group = &ctx.field.group;
    let mut s = 0u64;
    for g in 0..group.order() {
        let k = chi.value_exponent(group, g);
        let value = real.realize_scalar(k);
        s = (s + value * c.coeffs[g]) % pn;
    }
    Ok(if s == 0 {
        ctx.n as u64
    } else {
        (valuation(s, p) as u64).min(ctx.n as u64)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldspec::enumerate_characters;

    fn rational_ctx() -> ResidualContext {
        let fs = FieldSpec::rationals(3).unwrap();
        ResidualContext::with_root(fs, 7, 1, 3, 3).unwrap()
    }

    #[test]
    fn hand_example_conductor_one() {
        let ctx = rational_ctx();
        assert_eq!(ctx.g_p, 2);
        let v = residual_vector(&ctx, 1).unwrap();
        assert_eq!(v.coeffs, vec![1]);
    }

    #[test]
    fn residual_index_rational_examples() {
        let ctx = rational_ctx();
        let chi = enumerate_characters(&ctx.field.group).remove(0);
        let v = residual_vector(&ctx, 1).unwrap();
        assert_eq!(residual_index(&ctx, &chi, &v).unwrap(), 0);
        let zero = GroupRingElt::zero(&ctx.field.group, 3, 1);
        assert_eq!(residual_index(&ctx, &chi, &zero).unwrap(), 1);
    }

    #[test]
    fn teichmuller_examples() {
        assert_eq!(teichmuller(1, 5, 3).unwrap(), 1);
        assert_eq!(teichmuller(2, 5, 2).unwrap(), 7);
        assert_eq!(teichmuller(4, 3, 2).unwrap(), 1);
        assert!(teichmuller(10, 5, 2).is_err());
        // omega(x)^(p-1) = 1 and omega(x) = x mod p.
        for x in 1..13 {
            if x % 13 == 0 {
                continue;
            }
            let w = teichmuller(x, 13, 3).unwrap();
            assert_eq!(pow_mod(w, 12, 13u64.pow(3)), 1);
            assert_eq!(w % 13, x % 13);
        }
    }

    #[test]
    fn kurihara_matches_residual_index() {
        // Quadratic field Q(sqrt 5), p = 3, ell = 31 = 1 mod 15.
        let fs = FieldSpec::new(5, &[4], 3).unwrap();
        let ctx = ResidualContext::new(fs, 31, 1, 3).unwrap();
        let v = residual_vector(&ctx, 5).unwrap();
        for chi in enumerate_characters(&ctx.field.group) {
            let ri = residual_index(&ctx, &chi, &v).unwrap();
            let ki = kurihara_index(&ctx, &chi, &v).unwrap();
            assert_eq!(ri, ki, "chi order {}", chi.order);
        }
    }

    #[test]
    fn kurihara_degenerate_cases() {
        let ctx = rational_ctx();
        let chi = enumerate_characters(&ctx.field.group).remove(0);
        let v = residual_vector(&ctx, 1).unwrap();
        assert_eq!(kurihara_index(&ctx, &chi, &v).unwrap(), 0);
        let zero = GroupRingElt::zero(&ctx.field.group, 3, 1);
        assert_eq!(kurihara_index(&ctx, &chi, &zero).unwrap(), 1);
        // Order must divide p - 1.
        let fs = FieldSpec::new(7, &[6], 5).unwrap(); // C3, p = 5
        let chi3 = enumerate_characters(&fs.group)
            .into_iter()
            .find(|c| c.order == 3)
            .unwrap();
        let ctx3 = ResidualContext::new(fs, 71, 1, 3).unwrap();
        let v3 = residual_vector(&ctx3, 7).unwrap();
        assert!(kurihara_index(&ctx3, &chi3, &v3).is_err());
    }

    #[test]
    fn norm_relation_quadratic() {
        let fs = FieldSpec::new(5, &[4], 3).unwrap();
        let ctx = ResidualContext::new(fs, 31, 1, 3).unwrap();
        assert!(check_norm_relation(&ctx, 5, 1).unwrap());
    }

    #[test]
    fn norm_relation_domain_errors() {
        let fs = FieldSpec::real_cyclotomic(35, 3).unwrap();
        // 35 * 3^2 - 1 = 314 ... need ell = 1 mod d p^n = 105: ell = 211.
        let ctx = ResidualContext::new(fs, 211, 1, 3).unwrap();
        assert!(check_norm_relation(&ctx, 5, 35).is_err()); // 175 does not divide 35
        assert!(check_norm_relation(&ctx, 3, 5).is_err()); // q = p
        assert!(check_norm_relation(&ctx, 5, 1).unwrap());
        assert!(check_norm_relation(&ctx, 7, 1).unwrap());
        assert!(check_norm_relation(&ctx, 5, 7).unwrap());
        assert!(check_norm_relation(&ctx, 7, 5).unwrap());
    }

    #[test]
    fn primitive_root_independence() {
        let fs = FieldSpec::new(5, &[4], 3).unwrap();
        let chars = enumerate_characters(&fs.group);
        let mut seen: Option<Vec<u64>> = None;
        for eta in 1..31 {
            if !is_primitive_root(eta, 31) {
                continue;
            }
            let ctx = ResidualContext::with_root(fs.clone(), 31, 1, 3, eta).unwrap();
            let v = residual_vector(&ctx, 5).unwrap();
            let indices: Vec<u64> = chars
                .iter()
                .map(|chi| residual_index(&ctx, chi, &v).unwrap())
                .collect();
            match &seen {
                None => seen = Some(indices),
                Some(prev) => assert_eq!(prev, &indices, "eta = {eta}"),
            }
        }
    }

    #[test]
    fn representative_independence() {
        let fs = FieldSpec::new(5, &[4], 3).unwrap();
        let chars = enumerate_characters(&fs.group);
        let ctx = ResidualContext::new(fs, 31, 1, 3).unwrap();
        let b = 5u64;
        let j = galois_representatives(&ctx.field, b, 1).unwrap();
        let a = coefficient_lifts(&ctx.field, b, 1).unwrap();
        let base = residual_vector(&ctx, b).unwrap();
        let baseline: Vec<u64> = chars
            .iter()
            .map(|chi| residual_index(&ctx, chi, &base).unwrap())
            .collect();
        // Multiply each a_g by an element of J (a different representative of
        // the same class of G/K_b in the units mod b p^n).
        let bpn = b * 3;
        for &s in &j {
            let alt: Vec<u64> = a.iter().map(|&x| x * s % bpn).collect();
            let v = residual_vector_with_reps(&ctx, b, &alt, &j).unwrap();
            let got: Vec<u64> = chars
                .iter()
                .map(|chi| residual_index(&ctx, chi, &v).unwrap())
                .collect();
            assert_eq!(baseline, got, "s = {s}");
        }
    }

    #[test]
    fn context_validation() {
        let fs = FieldSpec::rationals(3).unwrap();
        assert!(ResidualContext::new(fs.clone(), 8, 1, 3).is_err()); // not prime
        assert!(ResidualContext::new(fs.clone(), 7, 1, 4).is_err()); // even twist
        assert!(ResidualContext::new(fs.clone(), 7, 2, 3).is_err()); // 9 does not divide 6
        assert!(ResidualContext::with_root(fs, 7, 1, 3, 2).is_err()); // 2 not primitive
    }
}
