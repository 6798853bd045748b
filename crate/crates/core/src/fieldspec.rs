//! Real abelian fields presented by a conductor f and a subgroup
//! H of (Z/f)^* containing -1, together with the structure of the quotient
//! group G = (Z/f)^*/H, its characters, and their p-adic conjugacy classes.

use crate::error::{Error, Result};
use crate::modarith::{
    euler_phi, factorize, gcd, inv_mod, mul_mod, order_mod, valuation,
};
use crate::snf;
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};

/// Hard cap on the order of G; everything downstream is desk-scale.
pub const GROUP_ORDER_CAP: u64 = 256;

/// A finite abelian group presented by independent generators with exact
/// orders (residues mod some modulus for the unit-group case).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianStructure {
    pub generators: Vec<u64>,
    pub orders: Vec<u64>,
    pub order: u64,
}

/// Structure of (Z/f)^* by CRT over the prime-power parts of f: odd prime
/// powers contribute their smallest-primitive-root generator; 2^e (e >= 3)
/// contributes {-1, 5}.
pub fn unit_group_structure(f: u64) -> Result<AbelianStructure> {
    if f == 0 {
        return Err(Error::BadConductor(f, "conductor must be positive".into()));
    }
    if f == 1 {
        return Ok(AbelianStructure {
            generators: vec![],
            orders: vec![],
            order: 1,
        });
    }
    let mut generators = Vec::new();
    let mut orders = Vec::new();
    for (q, e) in factorize(f) {
        let qe = q.pow(e);
        let rest = f / qe;
        let lift = |g: u64| -> u64 {
            if rest == 1 {
                g % f
            } else {
                // x = g mod q^e, x = 1 mod rest
                let inv = inv_mod(rest % qe, qe).expect("coprime");
                let diff = (g % qe + qe - 1) % qe;
                (1 + rest * mul_mod(diff, inv, qe)) % f
            }
        };
        if q == 2 {
            match e {
                1 => {}
                2 => {
                    generators.push(lift(3));
                    orders.push(2);
                }
                _ => {
                    generators.push(lift(qe - 1));
                    orders.push(2);
                    generators.push(lift(5));
                    orders.push(qe / 4);
                }
            }
        } else {
            // Smallest primitive root mod q lifts to a generator mod q^e
            // (adjusted if its order drops).
            let mut g = crate::modarith::primitive_root(q)?;
            if e > 1 && crate::modarith::pow_mod(g, q - 1, q * q) == 1 {
                g += q;
            }
            generators.push(lift(g % qe));
            orders.push(euler_phi(qe));
        }
    }
    let order = orders.iter().product::<u64>().max(1);
    debug_assert_eq!(order, euler_phi(f));
    Ok(AbelianStructure {
        generators,
        orders,
        order,
    })
}

/// The quotient group G = (Z/f)^*/H with a fixed transversal (smallest
/// positive representative of each coset, ascending; index 0 is the
/// identity coset H).
#[derive(Clone, Debug)]
pub struct QuotientGroup {
    pub f: u64,
    /// The full subgroup <H> as a sorted set of residues.
    pub h_set: BTreeSet<u64>,
    /// Smallest representative of each coset, ascending.
    pub cosets: Vec<u64>,
    /// residue mod f -> coset index.
    residue_to_coset: HashMap<u64, usize>,
    /// Multiplication table (order <= GROUP_ORDER_CAP keeps this small).
    mul_table: Vec<Vec<usize>>,
    inv_table: Vec<usize>,
    /// Independent generators of G as coset indices, with exact orders.
    pub gens: Vec<usize>,
    pub gen_orders: Vec<u64>,
    /// Coordinates of each coset on the generators.
    coords: Vec<Vec<u64>>,
}

impl QuotientGroup {
    pub fn order(&self) -> usize {
        self.cosets.len()
    }
    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.mul_table[i][j]
    }
    pub fn inv(&self, i: usize) -> usize {
        self.inv_table[i]
    }
    pub fn coset_of_residue(&self, t: u64) -> Option<usize> {
        self.residue_to_coset.get(&self.norm(t)).copied()
    }
    pub fn coords(&self, i: usize) -> &[u64] {
        &self.coords[i]
    }
    fn norm(&self, t: u64) -> u64 {
        if self.f == 1 {
            1
        } else {
            let r = t % self.f;
            if r == 0 {
                t % self.f
            } else {
                r
            }
        }
    }
    pub fn pow(&self, i: usize, mut e: u64) -> usize {
        let mut acc = 0usize; // identity
        let mut base = i;
        loop {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = self.mul(base, base);
        }
        acc
    }
    /// Order of a coset in G.
    pub fn element_order(&self, i: usize) -> u64 {
        let mut e = 1u64;
        let mut cur = i;
        while cur != 0 {
            cur = self.mul(cur, i);
            e += 1;
        }
        e
    }
}

/// A real abelian field: conductor-normalized (f, H) plus the odd prime p
/// and the decomposition f = d * p^a.
#[derive(Clone, Debug)]
pub struct FieldSpec {
    pub f: u64,
    pub p: u64,
    pub d: u64,
    pub a: u32,
    pub group: QuotientGroup,
}

impl FieldSpec {
    /// Build a field from a conductor and subgroup generators; normalizes to
    /// the true conductor (largest kernel of reduction contained in <H>).
    pub fn new(f: u64, h_gens: &[u64], p: u64) -> Result<FieldSpec> {
        if p < 3 || p % 2 == 0 || !crate::modarith::is_prime(p) {
            return Err(Error::BadPrime(p));
        }
        if f == 0 || (f % 4 == 2) {
            return Err(Error::BadConductor(
                f,
                "conductor must be positive and not 2 mod 4".into(),
            ));
        }
        // Close the given generators into a subgroup of (Z/f)^*.
        let norm = |t: u64| -> u64 {
            if f == 1 {
                1
            } else {
                t % f
            }
        };
        let mut h_set: BTreeSet<u64> = [norm(1)].into();
        let mut frontier: Vec<u64> = vec![norm(1)];
        let gens: Vec<u64> = h_gens.iter().map(|&g| norm(g)).collect();
        for &g in &gens {
            if f > 1 && gcd(g, f) != 1 {
                return Err(Error::BadConductor(
                    f,
                    format!("subgroup generator {g} is not a unit mod {f}"),
                ));
            }
        }
        while let Some(x) = frontier.pop() {
            for &g in &gens {
                let y = if f == 1 { 1 } else { mul_mod(x, g, f) };
                if h_set.insert(y) {
                    frontier.push(y);
                }
            }
        }
        // Totally real: -1 must lie in <H>.
        if f > 2 && !h_set.contains(&(f - 1)) {
            return Err(Error::NotTotallyReal);
        }
        // Conductor normalization: smallest divisor f' of f (not 2 mod 4)
        // whose reduction kernel is contained in <H>.
        let mut divisors: Vec<u64> = (1..=f).filter(|d| f % d == 0 && d % 4 != 2).collect();
        divisors.sort();
        for f0 in divisors {
            if f0 == f {
                break;
            }
            let kernel_in_h = (1..=f)
                .filter(|&t| gcd(t, f) == 1 && t % f0 == 1 % f0.max(1))
                .all(|t| h_set.contains(&t));
            if kernel_in_h {
                let new_gens: Vec<u64> = h_set.iter().map(|&t| t % f0).collect();
                return FieldSpec::new(f0, &new_gens, p);
            }
        }
        let group = quotient_structure(f, &h_set)?;
        let mut d = f;
        let mut a = 0u32;
        while d % p == 0 {
            d /= p;
            a += 1;
        }
        Ok(FieldSpec { f, p, d, a, group })
    }

    /// Convenience: the real cyclotomic field of conductor f (H = {+-1}).
    pub fn real_cyclotomic(f: u64, p: u64) -> Result<FieldSpec> {
        if f <= 2 {
            return FieldSpec::new(1, &[], p);
        }
        FieldSpec::new(f, &[f - 1], p)
    }

    /// The rationals, seen through this machinery.
    pub fn rationals(p: u64) -> Result<FieldSpec> {
        FieldSpec::new(1, &[], p)
    }
}

/// Compute the quotient group structure (Z/f)^*/H for a subgroup given as a
/// full set of residues.
pub fn quotient_structure(f: u64, h_set: &BTreeSet<u64>) -> Result<QuotientGroup> {
    let units: Vec<u64> = if f == 1 {
        vec![1]
    } else {
        (1..f).filter(|&t| gcd(t, f) == 1).collect()
    };
    let g_order = units.len() as u64 / h_set.len().max(1) as u64;
    if g_order > GROUP_ORDER_CAP {
        return Err(Error::GroupTooLarge(g_order, GROUP_ORDER_CAP));
    }

    // Cosets: group units by coset of h_set, keyed by smallest member.
    let h_vec: Vec<u64> = h_set.iter().copied().collect();
    let mut coset_key: HashMap<u64, u64> = HashMap::new();
    for &t in &units {
        let key = h_vec
            .iter()
            .map(|&h| if f == 1 { 1 } else { mul_mod(t, h, f) })
            .min()
            .unwrap();
        coset_key.insert(t, key);
    }
    let mut cosets: Vec<u64> = coset_key.values().copied().collect::<BTreeSet<_>>().into_iter().collect();
    cosets.sort();
    debug_assert_eq!(cosets.len() as u64, g_order);
    let coset_index: HashMap<u64, usize> =
        cosets.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let residue_to_coset: HashMap<u64, usize> = coset_key
        .iter()
        .map(|(&t, &k)| (t, coset_index[&k]))
        .collect();

    let n = cosets.len();
    let mut mul_table = vec![vec![0usize; n]; n];
    for i in 0..n {
        for j in 0..n {
            let prod = if f == 1 {
                1
            } else {
                mul_mod(cosets[i], cosets[j], f)
            };
            mul_table[i][j] = residue_to_coset[&prod];
        }
    }
    let mut inv_table = vec![0usize; n];
    for i in 0..n {
        inv_table[i] = (0..n).find(|&j| mul_table[i][j] == 0).unwrap();
    }

    // Structure of G via the presentation Z^k -> (Z/f)^* -> G:
    // relations are the component orders and the coordinates of <H>'s
    // generators (here: all elements of h_set, which is safe and simple).
    let ambient = unit_group_structure(f)?;
    let k = ambient.generators.len();
    let (gens, gen_orders, coords) = if n == 1 {
        (vec![], vec![], vec![vec![]])
    } else {
        // Coordinates of every unit in the ambient structure.
        let unit_coords = ambient_coordinates(f, &ambient);
        let mut relation_cols: Vec<Vec<BigInt>> = Vec::new();
        for (i, &m) in ambient.orders.iter().enumerate() {
            let mut col = vec![BigInt::zero(); k];
            col[i] = BigInt::from(m);
            relation_cols.push(col);
        }
        for &h in &h_vec {
            let c = &unit_coords[&h];
            relation_cols.push(c.iter().map(|&x| BigInt::from(x)).collect());
        }
        // Row-major matrix with relations as columns.
        let mat: Vec<Vec<BigInt>> = (0..k)
            .map(|i| relation_cols.iter().map(|c| c[i].clone()).collect())
            .collect();
        let diag = snf::diagonalize(&mat, true);
        let basis = diag.basis.unwrap();
        let mut gens = Vec::new();
        let mut gen_orders = Vec::new();
        for (t, dv) in diag.divisors.iter().enumerate() {
            let d = dv.to_i64().unwrap().unsigned_abs();
            if d <= 1 {
                continue;
            }
            // Generator = product of ambient generators with exponents from
            // column t of U^{-1}.
            let mut g = 1u64;
            for i in 0..k {
                let e = basis[i][t]
                    .clone()
                    .to_i64()
                    .expect("basis exponent fits i64")
                    .rem_euclid(ambient.orders[i] as i64) as u64;
                g = mul_mod(g, crate::modarith::pow_mod(ambient.generators[i], e, f), f);
            }
            gens.push(residue_to_coset[&g]);
            gen_orders.push(d);
        }
        debug_assert_eq!(gen_orders.iter().product::<u64>(), n as u64);
        // Coordinates of every coset on the generators, by enumerating all
        // exponent tuples.
        let mut coords = vec![Vec::new(); n];
        let mut seen = vec![false; n];
        let mut tuple = vec![0u64; gens.len()];
        loop {
            let mut idx = 0usize;
            for (j, &g) in gens.iter().enumerate() {
                idx = mul_table[idx][pow_in(&mul_table, g, tuple[j])];
            }
            if !seen[idx] {
                seen[idx] = true;
                coords[idx] = tuple.clone();
            }
            // next tuple
            let mut j = 0;
            loop {
                if j == gens.len() {
                    break;
                }
                tuple[j] += 1;
                if tuple[j] < gen_orders[j] {
                    break;
                }
                tuple[j] = 0;
                j += 1;
            }
            if j == gens.len() {
                break;
            }
        }
        debug_assert!(seen.iter().all(|&s| s), "generators must span G");
        (gens, gen_orders, coords)
    };

    Ok(QuotientGroup {
        f,
        h_set: h_set.clone(),
        cosets,
        residue_to_coset,
        mul_table,
        inv_table,
        gens,
        gen_orders,
        coords,
    })
}

fn pow_in(mul_table: &[Vec<usize>], i: usize, mut e: u64) -> usize {
    let mut acc = 0usize;
    let mut base = i;
    loop {
        if e & 1 == 1 {
            acc = mul_table[acc][base];
        }
        e >>= 1;
        if e == 0 {
            return acc;
        }
        base = mul_table[base][base];
    }
}

/// Coordinates of every unit mod f on the ambient generators, by
/// enumerating all exponent tuples.
fn ambient_coordinates(f: u64, ambient: &AbelianStructure) -> HashMap<u64, Vec<u64>> {
    let k = ambient.generators.len();
    let mut out = HashMap::new();
    let mut tuple = vec![0u64; k];
    loop {
        let mut g = 1u64 % f.max(2);
        for i in 0..k {
            g = mul_mod(g, crate::modarith::pow_mod(ambient.generators[i], tuple[i], f), f);
        }
        out.entry(g).or_insert_with(|| tuple.clone());
        let mut j = 0;
        loop {
            if j == k {
                break;
            }
            tuple[j] += 1;
            if tuple[j] < ambient.orders[j] {
                break;
            }
            tuple[j] = 0;
            j += 1;
        }
        if j == k {
            break;
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Characters
// ---------------------------------------------------------------------------

/// A character of G, stored as exponents on the fixed generators of G:
/// chi(gen_i) = zeta_{ord_i}^{gen_exponents[i]}. `order` is o(chi) and
/// `zeta_exponents[i]` re-expresses the value as zeta_{o(chi)}^{k_i}.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Character {
    pub gen_exponents: Vec<u64>,
    pub order: u64,
    pub zeta_exponents: Vec<u64>,
}

impl Character {
    pub fn from_gen_exponents(group: &QuotientGroup, exps: &[u64]) -> Result<Character> {
        if exps.len() != group.gens.len() {
            return Err(Error::Invalid(format!(
                "expected {} exponents, got {}",
                group.gens.len(),
                exps.len()
            )));
        }
        let exps: Vec<u64> = exps
            .iter()
            .zip(&group.gen_orders)
            .map(|(&e, &m)| e % m)
            .collect();
        let order = exps
            .iter()
            .zip(&group.gen_orders)
            .map(|(&e, &m)| m / gcd(e, m))
            .fold(1u64, num_integer::lcm);
        let zeta_exponents = exps
            .iter()
            .zip(&group.gen_orders)
            .map(|(&e, &m)| e * order / m % order)
            .collect();
        Ok(Character {
            gen_exponents: exps,
            order,
            zeta_exponents,
        })
    }

    /// chi(g) = zeta_{o(chi)}^k; returns k.
    pub fn value_exponent(&self, group: &QuotientGroup, g: usize) -> u64 {
        let coords = group.coords(g);
        let mut k = 0u64;
        for (j, &t) in coords.iter().enumerate() {
            if self.order == 0 {
                continue;
            }
            k = (k + t % self.order * (self.zeta_exponents[j] % self.order)) % self.order;
        }
        k
    }

    pub fn is_trivial_on(&self, group: &QuotientGroup, g: usize) -> bool {
        self.value_exponent(group, g) == 0
    }

    /// chi^t (t must be prime to o(chi) to preserve the order).
    pub fn power(&self, group: &QuotientGroup, t: u64) -> Character {
        let exps: Vec<u64> = self
            .gen_exponents
            .iter()
            .zip(&group.gen_orders)
            .map(|(&e, &m)| e * (t % m) % m)
            .collect();
        Character::from_gen_exponents(group, &exps).expect("same length")
    }

    /// Kernel of chi as a set of coset indices.
    pub fn kernel(&self, group: &QuotientGroup) -> Vec<usize> {
        (0..group.order())
            .filter(|&g| self.is_trivial_on(group, g))
            .collect()
    }
}

/// All characters of G, in lexicographic order of generator exponents.
pub fn enumerate_characters(group: &QuotientGroup) -> Vec<Character> {
    let k = group.gens.len();
    let mut out = Vec::new();
    let mut tuple = vec![0u64; k];
    loop {
        out.push(Character::from_gen_exponents(group, &tuple).unwrap());
        let mut j = k;
        for i in (0..k).rev() {
            tuple[i] += 1;
            if tuple[i] < group.gen_orders[i] {
                j = i;
                break;
            }
            tuple[i] = 0;
        }
        if j == k {
            break;
        }
    }
    out.sort();
    out
}

/// d_chi = [Q_p(chi) : Q_p] = phi(p^s) * ord of p mod m', where
/// o(chi) = p^s * m'.
pub fn qp_degree(order: u64, p: u64) -> u64 {
    let s = valuation(order, p);
    let ps = p.pow(s);
    let mp = order / ps;
    euler_phi(ps) * order_mod(p % mp.max(1), mp.max(1))
}

/// A Q_p-conjugacy class of characters: the orbit of chi under chi -> chi^t
/// for t in the decomposition subgroup of (Z/o(chi))^*.
#[derive(Clone, Debug)]
pub struct CharacterClass {
    /// Lexicographically smallest orbit member.
    pub rep: Character,
    pub orbit: Vec<Character>,
    pub degree: u64,
}

/// Partition characters into Q_p-conjugacy classes, sorted by representative.
pub fn qp_conjugacy_classes(group: &QuotientGroup, chars: &[Character], p: u64) -> Vec<CharacterClass> {
    let mut remaining: BTreeSet<Character> = chars.iter().cloned().collect();
    let mut classes = Vec::new();
    while let Some(chi) = remaining.iter().next().cloned() {
        let d = crate::poly::decomposition_subgroup(chi.order, p);
        let mut orbit: BTreeSet<Character> = BTreeSet::new();
        for t in d {
            orbit.insert(chi.power(group, t));
        }
        for member in &orbit {
            remaining.remove(member);
        }
        let orbit: Vec<Character> = orbit.into_iter().collect();
        let degree = qp_degree(chi.order, p);
        debug_assert_eq!(orbit.len() as u64, degree, "orbit size must equal d_chi");
        classes.push(CharacterClass {
            rep: orbit[0].clone(),
            orbit,
            degree,
        });
    }
    classes.sort_by(|a, b| a.rep.cmp(&b.rep));
    classes
}

// ---------------------------------------------------------------------------
// Galois representatives
// ---------------------------------------------------------------------------

/// Integer representatives in (Z/(b p^n))^* of the subgroup fixing
/// Q(zeta_{b p^a}) \cap F, for a divisor b of d. For b = d this is the
/// subgroup of classes whose reduction mod f lies in H.
pub fn galois_representatives(fs: &FieldSpec, b: u64, n: u32) -> Result<Vec<u64>> {
    if b == 0 || fs.d % b != 0 {
        return Err(Error::BadDivisor { b, d: fs.d });
    }
    let n_min = fs.a.max(1);
    if n < n_min {
        return Err(Error::InvalidLevel {
            n,
            requirement: format!("n must be at least max(a,1) = {n_min}"),
        });
    }
    let s_b = fixed_field_subgroup(fs, b, n)?;
    let bpa = b * fs.p.pow(fs.a);
    let bpn = b * fs.p.pow(n);
    let reduce = |u: u64| if bpa == 1 { 1 } else { u % bpa };
    let out: Vec<u64> = (1..=bpn)
        .filter(|&u| gcd(u, bpn) == 1 && s_b.contains(&reduce(u)))
        .collect();
    Ok(out)
}

/// The subgroup S_b of (Z/(b p^a))^* cutting out Q(zeta_{b p^a}) \cap F:
/// the image mod b p^a of the preimage of H in (Z/(d p^max(a,n)))^*.
pub(crate) fn fixed_field_subgroup(fs: &FieldSpec, b: u64, n: u32) -> Result<BTreeSet<u64>> {
    let bpa = b * fs.p.pow(fs.a);
    if bpa == 1 {
        return Ok([1u64].into());
    }
    let m = fs.d * fs.p.pow(fs.a.max(n));
    let mut out = BTreeSet::new();
    for t in 1..=m {
        if gcd(t, m) != 1 {
            continue;
        }
        let tf = if fs.f == 1 { 1 } else { t % fs.f };
        if fs.group.h_set.contains(&tf) {
            out.insert(t % bpa);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_group_examples() {
        let s = unit_group_structure(5).unwrap();
        assert_eq!(s.generators, vec![2]);
        assert_eq!(s.orders, vec![4]);
        let s = unit_group_structure(8).unwrap();
        assert_eq!(s.generators, vec![7, 5]);
        assert_eq!(s.orders, vec![2, 2]);
        let s = unit_group_structure(1).unwrap();
        assert_eq!(s.order, 1);
        // Exactness of generator orders, independence, and spanning.
        for f in [3u64, 4, 5, 7, 8, 9, 12, 13, 15, 16, 20, 21, 35, 36, 40] {
            let s = unit_group_structure(f).unwrap();
            assert_eq!(s.order, euler_phi(f));
            for (g, o) in s.generators.iter().zip(&s.orders) {
                assert_eq!(crate::modarith::order_mod(*g, f), *o, "f={f} g={g}");
            }
            let coords = ambient_coordinates(f, &s);
            assert_eq!(coords.len() as u64, s.order, "f={f}: generators span");
        }
    }

    #[test]
    fn real_quadratic_field() {
        // F = Q(sqrt 5): f=5, H={1,4}; G = C2.
        let fs = FieldSpec::new(5, &[4], 3).unwrap();
        assert_eq!((fs.f, fs.d, fs.a), (5, 5, 0));
        assert_eq!(fs.group.order(), 2);
        assert_eq!(fs.group.cosets, vec![1, 2]);
        assert_eq!(fs.group.gen_orders, vec![2]);
    }

    #[test]
    fn conductor_normalization() {
        // Full subgroup mod 5 -> F = Q, conductor 1.
        let fs = FieldSpec::new(5, &[2], 3).unwrap();
        assert_eq!(fs.f, 1);
        assert_eq!(fs.group.order(), 1);
        // H = {1,4,11,14} mod 15 contains the kernel of reduction to mod 5:
        // {1, 11}? no: kernel = {1, 11}? 11 = 1 mod 5, 11 mod 3 = 2. The
        // subgroup <4, 11> mod 15 = {1,4,11,14} contains kernel {1,11},
        // so the conductor drops to 5.
        let fs = FieldSpec::new(15, &[4, 11], 7).unwrap();
        assert_eq!(fs.f, 5);
        assert_eq!(fs.group.order(), 2);
        // Normalization is idempotent: rebuilding from the normalized data
        // is stable.
        let fs2 = FieldSpec::new(fs.f, &fs.group.h_set.iter().copied().collect::<Vec<_>>(), 7).unwrap();
        assert_eq!(fs2.f, fs.f);
        assert_eq!(fs2.group.cosets, fs.group.cosets);
    }

    #[test]
    fn rejects_imaginary_subgroup() {
        assert!(matches!(
            FieldSpec::new(5, &[1], 3),
            Err(Error::NotTotallyReal)
        ));
        assert!(matches!(FieldSpec::new(7, &[2], 3), Err(Error::NotTotallyReal)));
    }

    #[test]
    fn character_enumeration_klein_four() {
        // (Z/24)^*/{+-1} is C2 x C2.
        let fs = FieldSpec::new(24, &[23], 5).unwrap();
        assert_eq!(fs.group.order(), 4);
        let chars = enumerate_characters(&fs.group);
        let mut orders: Vec<u64> = chars.iter().map(|c| c.order).collect();
        orders.sort();
        assert_eq!(orders, vec![1, 2, 2, 2]);
    }

    #[test]
    fn characters_are_homomorphisms() {
        for (f, h, p) in [(16u64, vec![15u64], 3u64), (13, vec![12], 5), (20, vec![19], 3)] {
            let fs = FieldSpec::new(f, &h, p).unwrap();
            let g = &fs.group;
            for chi in enumerate_characters(g) {
                for i in 0..g.order() {
                    for j in 0..g.order() {
                        let lhs = chi.value_exponent(g, g.mul(i, j));
                        let rhs = (chi.value_exponent(g, i) + chi.value_exponent(g, j))
                            % chi.order.max(1);
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn qp_classes_cyclic_four() {
        // G = C4 (f=16, H={+-1}), p=3: classes {chi^0}, {chi^2}, {chi, chi^3}.
        let fs = FieldSpec::new(16, &[15], 3).unwrap();
        assert_eq!(fs.group.gen_orders, vec![4]);
        let chars = enumerate_characters(&fs.group);
        let classes = qp_conjugacy_classes(&fs.group, &chars, 3);
        let mut sizes: Vec<usize> = classes.iter().map(|c| c.orbit.len()).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 1, 2]);
        for c in &classes {
            assert_eq!(c.degree, qp_degree(c.rep.order, 3));
        }
    }

    #[test]
    fn qp_degree_examples() {
        assert_eq!(qp_degree(4, 3), 2); // ord_4(3) = 2
        assert_eq!(qp_degree(4, 5), 1); // 5 = 1 mod 4
        assert_eq!(qp_degree(9, 3), 6); // phi(9)
        assert_eq!(qp_degree(1, 3), 1);
        assert_eq!(qp_degree(6, 3), 2); // phi(3) * ord_2(3) = 2
    }

    #[test]
    fn galois_representatives_examples() {
        // F = Q(sqrt 5), p=3, n=1, b=5: {1,4,11,14}.
        let fs = FieldSpec::new(5, &[4], 3).unwrap();
        assert_eq!(galois_representatives(&fs, 5, 1).unwrap(), vec![1, 4, 11, 14]);
        // b=1: Q(zeta_3) cap F = Q, so all units mod 3.
        assert_eq!(galois_representatives(&fs, 1, 1).unwrap(), vec![1, 2]);
        // F = Q: all of (Z/p^n)^*.
        let q = FieldSpec::rationals(3).unwrap();
        assert_eq!(galois_representatives(&q, 1, 2).unwrap().len(), 6);
        // Cardinality: for b=d, #J = phi(d p^n)/#G.
        for (f, h, p) in [(15u64, vec![14u64], 7u64), (16, vec![15], 3), (13, vec![12], 3)] {
            let fs = FieldSpec::new(f, &h, p).unwrap();
            for n in fs.a.max(1)..=2 {
                let j = galois_representatives(&fs, fs.d, n).unwrap();
                assert_eq!(
                    j.len() as u64,
                    euler_phi(fs.d * p.pow(n)) / fs.group.order() as u64
                );
            }
        }
        // Level below max(a,1) is rejected.
        assert!(galois_representatives(&q, 1, 0).is_err());
    }

    #[test]
    fn representatives_form_subgroup() {
        // J_{b,n} is a subgroup of (Z/bp^n)^* (closed under multiplication).
        for (f, h, p, b) in [
            (15u64, vec![14u64], 7u64, 15u64),
            (15, vec![14], 7, 5),
            (15, vec![14], 7, 3),
            (15, vec![14], 7, 1),
            (5, vec![4], 3, 5),
            (5, vec![4], 3, 1),
        ] {
            let fs = FieldSpec::new(f, &h, p).unwrap();
            let n = fs.a.max(1);
            let j = galois_representatives(&fs, b, n).unwrap();
            let m = b * p.pow(n);
            let set: BTreeSet<u64> = j.iter().copied().collect();
            for &x in &j {
                for &y in &j {
                    assert!(set.contains(&mul_mod(x, y, m)), "b={b}: {x}*{y}");
                }
            }
        }
    }
}
