//! Group rings (Z/p^n)[G], the canonical chi-part generators T_chi, and
//! orders of spans of group-ring elements, computed by exact integer
//! diagonalization of lifted coefficient matrices.

use crate::error::{Error, Result};
use crate::fieldspec::{qp_degree, Character, QuotientGroup, GROUP_ORDER_CAP};
use crate::modarith::{inv_mod, valuation};
use crate::poly::UnramifiedRealization;
use crate::snf;

pub use crate::poly::{cyclotomic_polynomial, trace_root_of_unity};

/// An element of (Z/p^n)[G]; coefficients are indexed by the fixed
/// transversal of G and stored as least nonnegative residues mod p^n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupRingElt {
    pub p: u64,
    pub n: u32,
    pub pn: u64,
    pub coeffs: Vec<u64>,
}

impl GroupRingElt {
    pub fn zero(group: &QuotientGroup, p: u64, n: u32) -> Self {
        GroupRingElt {
            p,
            n,
            pn: p.pow(n),
            coeffs: vec![0; group.order()],
        }
    }

    /// The identity of the ring: coefficient 1 at the identity coset.
    pub fn one(group: &QuotientGroup, p: u64, n: u32) -> Self {
        let mut e = Self::zero(group, p, n);
        e.coeffs[0] = 1 % e.pn;
        e
    }

    pub fn from_coeffs(group: &QuotientGroup, p: u64, n: u32, coeffs: &[u64]) -> Result<Self> {
        if coeffs.len() != group.order() {
            return Err(Error::AmbientMismatch);
        }
        let pn = p.pow(n);
        Ok(GroupRingElt {
            p,
            n,
            pn,
            coeffs: coeffs.iter().map(|&c| c % pn).collect(),
        })
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.p != other.p || self.n != other.n || self.coeffs.len() != other.coeffs.len() {
            return Err(Error::AmbientMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (a, &b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a = (*a + b) % self.pn;
        }
        Ok(out)
    }

    pub fn scale(&self, s: u64) -> Self {
        let mut out = self.clone();
        for a in out.coeffs.iter_mut() {
            *a = crate::modarith::mul_mod(*a, s % self.pn, self.pn);
        }
        out
    }

    /// Left translation g * x (coefficient permutation).
    pub fn translate(&self, group: &QuotientGroup, g: usize) -> Self {
        let mut out = self.clone();
        let ginv = group.inv(g);
        for h in 0..self.coeffs.len() {
            out.coeffs[h] = self.coeffs[group.mul(ginv, h)];
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

/// Convolution product in (Z/p^n)[G].
pub fn ring_multiply(group: &QuotientGroup, x: &GroupRingElt, y: &GroupRingElt) -> Result<GroupRingElt> {
    x.compatible(y)?;
    if x.coeffs.len() != group.order() {
        return Err(Error::AmbientMismatch);
    }
    let mut out = GroupRingElt::zero(group, x.p, x.n);
    for i in 0..group.order() {
        if x.coeffs[i] == 0 {
            continue;
        }
        for j in 0..group.order() {
            if y.coeffs[j] == 0 {
                continue;
            }
            let k = group.mul(i, j);
            out.coeffs[k] = (out.coeffs[k]
                + crate::modarith::mul_mod(x.coeffs[i], y.coeffs[j], x.pn))
                % x.pn;
        }
    }
    Ok(out)
}

/// The canonical generator T_chi of the chi-part of (Z/p^n)[G]:
///
/// * p prime to o(chi):  T = S_chi * (1/o(chi)) sum over G/Ker(chi) of
///   Tr(chi(g)) g^{-1};
/// * p divides o(chi):   T = S_chi * (1 - h) * (1/#Delta) sum over the
///   prime-to-p part Delta of G/Ker(chi) of Tr(chi(delta)) delta^{-1},
///   where chi(h) = zeta_{o(chi)}^{o(chi)/p};
///
/// with S_chi the sum over Ker(chi) and traces realized in Z/p^n through
/// the canonical unramified realization of prime-to-p roots of unity.
pub fn build_t_chi(group: &QuotientGroup, chi: &Character, p: u64, n: u32) -> Result<GroupRingElt> {
    build_t_chi_with_h(group, chi, p, n, None)
}

/// Same as [`build_t_chi`] but allowing an explicit choice of the element h
/// (ramified case only); used by invariance tests.
pub fn build_t_chi_with_h(
    group: &QuotientGroup,
    chi: &Character,
    p: u64,
    n: u32,
    h_choice: Option<usize>,
) -> Result<GroupRingElt> {
    if group.order() as u64 > GROUP_ORDER_CAP {
        return Err(Error::GroupTooLarge(group.order() as u64, GROUP_ORDER_CAP));
    }
    if n == 0 {
        return Err(Error::InvalidLevel {
            n,
            requirement: "level must be positive".into(),
        });
    }
    let pn = p.pow(n);
    let o = chi.order;
    let s = valuation(o, p);
    let ps = p.pow(s);
    let mp = o / ps; // prime-to-p part of the order
    let kernel = chi.kernel(group);
    let s_chi = {
        let mut e = GroupRingElt::zero(group, p, n);
        for &k in &kernel {
            e.coeffs[k] = 1 % pn;
        }
        e
    };

    let real = UnramifiedRealization::new(mp, p, n)?;

    if s == 0 {
        // Unramified case: transversal of G/Ker(chi), lifted to G.
        let reps = quotient_transversal(group, &kernel);
        debug_assert_eq!(reps.len() as u64, o);
        let mut sum = GroupRingElt::zero(group, p, n);
        for &g in &reps {
            let k = chi.value_exponent(group, g);
            let tr = real.trace(k);
            let gi = group.inv(g);
            sum.coeffs[gi] = (sum.coeffs[gi] + tr) % pn;
        }
        let inv_o = inv_mod(o % pn, pn)?;
        Ok(ring_multiply(group, &s_chi, &sum.scale(inv_o))?)
    } else {
        // Ramified case. Find a generator c of the cyclic quotient G/Ker:
        // any element whose value exponent is a unit mod o.
        let c = (0..group.order())
            .find(|&g| crate::modarith::gcd(chi.value_exponent(group, g), o) == 1)
            .expect("G/Ker(chi) is cyclic of order o(chi)");
        // Delta = <c^{p^s}> has order m'; lift its elements through powers
        // of c.
        let c_ps = group.pow(c, ps);
        let mut sum = GroupRingElt::zero(group, p, n);
        for j in 0..mp {
            let delta = group.pow(c_ps, j);
            let k = chi.value_exponent(group, delta);
            debug_assert_eq!(k % ps, 0, "values on Delta have order prime to p");
            let tr = real.trace(k / ps);
            let di = group.inv(delta);
            sum.coeffs[di] = (sum.coeffs[di] + tr) % pn;
        }
        let inv_delta = inv_mod(mp % pn, pn)?;
        // h with chi(h) = zeta_o^{o/p}.
        let h = match h_choice {
            Some(h) => {
                if chi.value_exponent(group, h) != o / p {
                    return Err(Error::Invalid(format!(
                        "h={h} does not satisfy chi(h) = zeta^(o/p)"
                    )));
                }
                h
            }
            None => (0..group.order())
                .find(|&g| chi.value_exponent(group, g) == o / p)
                .expect("chi surjects onto the o-th roots of unity"),
        };
        let mut one_minus_h = GroupRingElt::zero(group, p, n);
        one_minus_h.coeffs[0] = 1 % pn;
        one_minus_h.coeffs[h] = (one_minus_h.coeffs[h] + pn - 1) % pn;
        let t = ring_multiply(group, &s_chi, &one_minus_h)?;
        Ok(ring_multiply(group, &t, &sum.scale(inv_delta))?)
    }
}

/// A canonical transversal of G/K in G (smallest coset representative by
/// transversal index).
fn quotient_transversal(group: &QuotientGroup, kernel: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; group.order()];
    let mut reps = Vec::new();
    for g in 0..group.order() {
        if !seen[g] {
            reps.push(g);
            for &k in kernel {
                seen[group.mul(g, k)] = true;
            }
        }
    }
    reps
}

/// Result of a span-order computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanOrderResult {
    /// v with #span = p^v.
    pub valuation: u64,
    /// p-valuations of the nonzero elementary divisors (capped at n).
    pub divisor_valuations: Vec<u32>,
}

/// Order of the (Z/p^n)-span of the given group-ring elements, as the
/// p-valuation v with #span = p^v. Computed by lifting coefficients to Z
/// and diagonalizing: v = sum over elementary divisors of
/// max(0, n - min(n, v_p(divisor))), plus n for each column beyond the rank
/// contributing... (columns beyond the rank contribute nothing: they are in
/// the lattice p^n Z^G after reduction).
pub fn span_order(group: &QuotientGroup, gens: &[GroupRingElt], p: u64, n: u32) -> Result<SpanOrderResult> {
    if group.order() as u64 > GROUP_ORDER_CAP {
        return Err(Error::GroupTooLarge(group.order() as u64, GROUP_ORDER_CAP));
    }
    for g in gens {
        if g.coeffs.len() != group.order() || g.p != p || g.n != n {
            return Err(Error::AmbientMismatch);
        }
    }
    if gens.is_empty() {
        return Ok(SpanOrderResult {
            valuation: 0,
            divisor_valuations: vec![],
        });
    }
    let rows = group.order();
    // Columns: the generators; the p^n Z^G part of the lattice is implicit
    // in the mod-p^n elimination (a pivotless row has divisor p^n).
    let mut mat: Vec<Vec<u64>> = (0..rows)
        .map(|i| gens.iter().map(|g| g.coeffs[i]).collect())
        .collect();
    let divisor_valuations = snf::local_divisor_valuations(&mut mat, p, n);
    let valuation = divisor_valuations.iter().map(|&v| (n - v.min(n)) as u64).sum();
    Ok(SpanOrderResult {
        valuation,
        divisor_valuations,
    })
}

/// Order valuation of the (Z/p^n)[G]-span of T_chi * c: the span of the
/// G-orbit of T_chi * c.
pub fn chi_span_order(
    group: &QuotientGroup,
    chi: &Character,
    p: u64,
    n: u32,
    c: &GroupRingElt,
) -> Result<u64> {
    let t = build_t_chi(group, chi, p, n)?;
    let tc = ring_multiply(group, &t, c)?;
    let orbit: Vec<GroupRingElt> = (0..group.order()).map(|g| tc.translate(group, g)).collect();
    Ok(span_order(group, &orbit, p, n)?.valuation)
}

/// Valuation of the chi-part order of the ambient module at level n:
/// n * d_chi.
pub fn ima(chi: &Character, p: u64, n: u32) -> u64 {
    n as u64 * qp_degree(chi.order, p)
}

/// Independent computation of the chi-part order of (Z/p^n)[G] by kernel
/// extraction: count solutions x of
///   (k - 1) x = 0 for all k in Ker(chi),
///   E_1 x = x  for the Delta-idempotent E_1 of the prime-to-p part,
///   (1 + h + ... + h^{p-1}) x = 0  when p divides o(chi).
/// Returns the valuation v with order p^v. Shares only the low-level trace
/// realization with `build_t_chi`; the linear algebra route is disjoint.
pub fn chi_part_order_oracle(group: &QuotientGroup, chi: &Character, p: u64, n: u32) -> Result<u64> {
    let m = group.order();
    let pn = p.pow(n);
    let o = chi.order;
    let s = valuation(o, p);
    let ps = p.pow(s);
    let mp = o / ps;
    let kernel = chi.kernel(group);

    // Assemble the constraint matrix row blocks: each condition is an
    // m x m matrix acting on coefficient vectors by left multiplication.
    let mut blocks: Vec<Vec<u64>> = Vec::new(); // flattened m x m blocks
    let left_mult_matrix = |elt: &GroupRingElt| -> Vec<u64> {
        // (elt * x)_h = sum_g elt_g x_{g^{-1} h}
        let mut mtx = vec![0u64; m * m];
        for g in 0..m {
            if elt.coeffs[g] == 0 {
                continue;
            }
            let gi = group.inv(g);
            for h in 0..m {
                mtx[h * m + group.mul(gi, h)] =
                    (mtx[h * m + group.mul(gi, h)] + elt.coeffs[g]) % pn;
            }
        }
        mtx
    };

    for &k in &kernel {
        if k == 0 {
            continue;
        }
        let mut e = GroupRingElt::zero(group, p, n);
        e.coeffs[k] = 1;
        e.coeffs[0] = (e.coeffs[0] + pn - 1) % pn;
        blocks.push(left_mult_matrix(&e));
    }

    // Delta-idempotent of the prime-to-p part: as in the generator, but
    // assembled as (E - 1) x = 0.
    let real = UnramifiedRealization::new(mp, p, n)?;
    let c = (0..m)
        .find(|&g| crate::modarith::gcd(chi.value_exponent(group, g), o) == 1)
        .expect("cyclic quotient");
    let c_ps = group.pow(c, ps);
    let mut e1 = GroupRingElt::zero(group, p, n);
    for j in 0..mp {
        let delta = group.pow(c_ps, j);
        let k = chi.value_exponent(group, delta);
        let tr = real.trace(k / ps);
        let di = group.inv(delta);
        e1.coeffs[di] = (e1.coeffs[di] + tr) % pn;
    }
    let e1 = e1.scale(inv_mod(mp % pn, pn)?);
    let mut e1_minus_one = e1;
    e1_minus_one.coeffs[0] = (e1_minus_one.coeffs[0] + pn - 1) % pn;
    blocks.push(left_mult_matrix(&e1_minus_one));

    if s > 0 {
        let h = (0..m)
            .find(|&g| chi.value_exponent(group, g) == o / p)
            .expect("chi is surjective");
        let mut norm_c = GroupRingElt::zero(group, p, n);
        let mut cur = 0usize;
        for _ in 0..p {
            norm_c.coeffs[cur] = (norm_c.coeffs[cur] + 1) % pn;
            cur = group.mul(cur, h);
        }
        blocks.push(left_mult_matrix(&norm_c));
    }

    // Solution count of A x = 0 over Z/p^n: p^{n m} / #image, and the image
    // order is the span order of A's columns.
    let rows = blocks.len() * m;
    let mut mat: Vec<Vec<u64>> = vec![Vec::with_capacity(m); rows];
    for (bi, block) in blocks.iter().enumerate() {
        for r in 0..m {
            let row = &mut mat[bi * m + r];
            for ccol in 0..m {
                row.push(block[r * m + ccol]);
            }
        }
    }
    let image_val: u64 = snf::local_divisor_valuations(&mut mat, p, n)
        .iter()
        .map(|&v| (n - v.min(n)) as u64)
        .sum();
    Ok(n as u64 * m as u64 - image_val)
}
