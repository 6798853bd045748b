//! Candidate scan over auxiliary primes and levels, and aggregation of the
//! per-candidate residual indices into certified upper bounds per character
//! class.

use crate::chipart::ima;
use crate::error::{Error, Result};
use crate::fieldspec::{
    enumerate_characters, qp_conjugacy_classes, qp_degree, Character, CharacterClass, FieldSpec,
};
use crate::modarith::primes_in_progression;
use crate::residual::{residual_index, residual_vector, ResidualContext};
use rayon::prelude::*;
use serde::Serialize;

/// Sampling policy for the scan.
#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Largest auxiliary prime considered.
    pub ell_bound: u64,
    /// Largest level n; the smallest is always max(a, 1).
    pub n_max: u32,
    /// Number of primes sampled per level.
    pub primes_per_level: usize,
    /// Number of trailing productive levels over which the running minimum
    /// must be constant for the bound to count as stabilized.
    pub stabilization_window: u32,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            ell_bound: 10_000_000,
            n_max: 6,
            primes_per_level: 4,
            stabilization_window: 2,
        }
    }
}

impl SearchConfig {
    fn validate(&self, fs: &FieldSpec) -> Result<()> {
        let n_min = fs.a.max(1);
        if self.n_max < n_min || self.primes_per_level == 0 || self.stabilization_window == 0 {
            return Err(Error::BadSearchConfig(format!(
                "need n_max >= {n_min}, primes_per_level >= 1, stabilization_window >= 1"
            )));
        }
        Ok(())
    }
}

/// One evaluated auxiliary prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CandidateRecord {
    pub ell: u64,
    pub n: u32,
    /// Valuation of the residual index at this candidate.
    pub ire: u64,
    /// Valuation of the ambient chi-part order at this level.
    pub ima: u64,
    /// ire < ima: the candidate certifies an upper bound.
    pub accepted: bool,
}

/// Identifying data of a character class in a report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CharacterDescriptor {
    pub order: u64,
    pub exponents: Vec<u64>,
    pub qp_degree: u64,
}

impl CharacterDescriptor {
    pub fn new(chi: &Character, p: u64) -> Self {
        CharacterDescriptor {
            order: chi.order,
            exponents: chi.gen_exponents.clone(),
            qp_degree: qp_degree(chi.order, p),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub ell: u64,
    pub n: u32,
}

/// Certified upper bound for one character class, with the full candidate
/// trail. The bound is the minimum over accepted candidates; it equals the
/// exact chi-index once some sampled prime at a large enough level induces
/// an isomorphism on chi-parts, which is expected but not certified.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexReport {
    pub character: CharacterDescriptor,
    pub upper_bound_valuation: Option<u64>,
    pub stabilized: bool,
    pub witness: Option<Witness>,
    pub candidates: Vec<CandidateRecord>,
}

/// The primes sampled at each level: for n in [max(a,1), n_max], up to K
/// primes ell = 1 mod d p^n with ell <= ell_bound, ascending.
pub fn sampled_primes(fs: &FieldSpec, config: &SearchConfig) -> Result<Vec<(u32, u64)>> {
    config.validate(fs)?;
    let n_min = fs.a.max(1);
    let mut out = Vec::new();
    for n in n_min..=config.n_max {
        let dpn = fs.d * fs.p.pow(n);
        let primes = primes_in_progression(dpn, config.ell_bound);
        for ell in primes.into_iter().take(config.primes_per_level) {
            out.push((n, ell));
        }
    }
    Ok(out)
}

/// Scan all candidates for one character, in deterministic order
/// (ascending ell within ascending n).
pub fn scan_candidates(
    fs: &FieldSpec,
    chi: &Character,
    r: u64,
    config: &SearchConfig,
) -> Result<Vec<CandidateRecord>> {
    if r < 3 || r % 2 == 0 {
        return Err(Error::BadTwist(r));
    }
    let tasks = sampled_primes(fs, config)?;
    let vectors = residual_vectors_for(fs, r, &tasks)?;
    let mut out = Vec::with_capacity(vectors.len());
    for (ctx, v) in &vectors {
        let ire = residual_index(ctx, chi, v)?;
        let ima_v = ima(chi, fs.p, ctx.n);
        out.push(CandidateRecord {
            ell: ctx.ell,
            n: ctx.n,
            ire,
            ima: ima_v,
            accepted: ire < ima_v,
        });
    }
    Ok(out)
}

/// Shared candidate evaluation: one context and residual vector per
/// sampled (n, ell), computed in parallel and returned in task order.
fn residual_vectors_for(
    fs: &FieldSpec,
    r: u64,
    tasks: &[(u32, u64)],
) -> Result<Vec<(ResidualContext, crate::chipart::GroupRingElt)>> {
    tasks
        .par_iter()
        .map(|&(n, ell)| {
            let ctx = ResidualContext::new(fs.clone(), ell, n, r)?;
            let v = residual_vector(&ctx, fs.d.max(1))?;
            Ok((ctx, v))
        })
        .collect()
}

/// The minimum over accepted records, with the earliest witnessing
/// candidate; None when no candidate is accepted.
pub fn index_upper_bound(records: &[CandidateRecord]) -> (Option<u64>, Option<Witness>) {
    let mut best: Option<u64> = None;
    let mut witness = None;
    for rec in records {
        if rec.accepted && best.is_none_or(|b| rec.ire < b) {
            best = Some(rec.ire);
            witness = Some(Witness {
                ell: rec.ell,
                n: rec.n,
            });
        }
    }
    (best, witness)
}

/// Whether the running minimum is unchanged across the last `window`
/// productive levels (levels contributing at least one accepted candidate).
pub fn is_stabilized(records: &[CandidateRecord], window: u32) -> bool {
    let mut running: Option<u64> = None;
    let mut mins_after_level: Vec<u64> = Vec::new();
    let mut levels: Vec<u32> = records.iter().map(|r| r.n).collect();
    levels.dedup();
    for &n in &levels {
        let level_min = records
            .iter()
            .filter(|r| r.n == n && r.accepted)
            .map(|r| r.ire)
            .min();
        if let Some(m) = level_min {
            running = Some(running.map_or(m, |b| b.min(m)));
            mins_after_level.push(running.unwrap());
        }
    }
    let w = window as usize;
    if mins_after_level.len() < w {
        return false;
    }
    let tail = &mins_after_level[mins_after_level.len() - w..];
    tail.iter().all(|&m| m == tail[0])
}

/// Assemble the report for one class from its candidate trail.
pub fn assemble_report(
    descriptor: CharacterDescriptor,
    candidates: Vec<CandidateRecord>,
    window: u32,
) -> IndexReport {
    let (bound, witness) = index_upper_bound(&candidates);
    let stabilized = bound.is_some() && is_stabilized(&candidates, window);
    IndexReport {
        character: descriptor,
        upper_bound_valuation: bound,
        stabilized,
        witness,
        candidates,
    }
}

/// Run the full scan: one report per Q_p-conjugacy class of characters of
/// G, sharing the residual vectors across classes.
pub fn full_run(fs: &FieldSpec, r: u64, config: &SearchConfig) -> Result<Vec<IndexReport>> {
    if r < 3 || r % 2 == 0 {
        return Err(Error::BadTwist(r));
    }
    let tasks = sampled_primes(fs, config)?;
    let vectors = residual_vectors_for(fs, r, &tasks)?;
    let chars = enumerate_characters(&fs.group);
    let classes: Vec<CharacterClass> = qp_conjugacy_classes(&fs.group, &chars, fs.p);
    let reports: Result<Vec<IndexReport>> = classes
        .par_iter()
        .map(|class| {
            let chi = &class.rep;
            let mut candidates = Vec::with_capacity(vectors.len());
            for (ctx, v) in &vectors {
                let ire = residual_index(ctx, chi, v)?;
                let ima_v = ima(chi, fs.p, ctx.n);
                candidates.push(CandidateRecord {
                    ell: ctx.ell,
                    n: ctx.n,
                    ire,
                    ima: ima_v,
                    accepted: ire < ima_v,
                });
            }
            Ok(assemble_report(
                CharacterDescriptor::new(chi, fs.p),
                candidates,
                config.stabilization_window,
            ))
        })
        .collect();
    reports
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small_config(ell_bound: u64, n_max: u32, k: usize) -> SearchConfig {
        SearchConfig {
            ell_bound,
            n_max,
            primes_per_level: k,
            stabilization_window: 2,
        }
    }

    #[test]
    fn rational_level_one_scan() {
        let fs = FieldSpec::rationals(3).unwrap();
        let chi = enumerate_characters(&fs.group).remove(0);
        let recs = scan_candidates(&fs, &chi, 3, &small_config(100, 1, 3)).unwrap();
        let ells: Vec<u64> = recs.iter().map(|r| r.ell).collect();
        assert_eq!(ells, vec![7, 13, 19]);
        assert!(recs.iter().all(|r| r.ima == 1));
        let first = &recs[0];
        assert_eq!((first.ire, first.ima, first.accepted), (0, 1, true));
    }

    #[test]
    fn empty_progression() {
        let fs = FieldSpec::rationals(3).unwrap();
        let chi = enumerate_characters(&fs.group).remove(0);
        let recs = scan_candidates(&fs, &chi, 3, &small_config(5, 1, 3)).unwrap();
        assert!(recs.is_empty());
    }

    #[test]
    fn full_run_rational_regular() {
        let fs = FieldSpec::rationals(5).unwrap();
        let reports = full_run(&fs, 3, &small_config(1000, 2, 3)).unwrap();
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].upper_bound_valuation, Some(0));
        assert!(reports[0].stabilized);
    }

    #[test]
    fn full_run_quadratic() {
        let fs = FieldSpec::new(5, &[4], 3).unwrap();
        let reports = full_run(&fs, 3, &small_config(10000, 2, 3)).unwrap();
        assert_eq!(reports.len(), 2);
        for rep in &reports {
            assert!(rep.upper_bound_valuation.is_some());
        }
    }

    #[test]
    fn degenerate_config_rejected() {
        let fs = FieldSpec::new(9, &[8], 3).unwrap(); // a = 2, so n_min = 2
        let cfg = small_config(1000, 1, 3);
        let chi = enumerate_characters(&fs.group).remove(0);
        assert!(scan_candidates(&fs, &chi, 3, &cfg).is_err());
        assert!(full_run(&fs, 4, &small_config(1000, 2, 3)).is_err()); // even twist
    }

    #[test]
    fn no_accepted_candidates() {
        let recs = vec![CandidateRecord {
            ell: 7,
            n: 1,
            ire: 1,
            ima: 1,
            accepted: false,
        }];
        let rep = assemble_report(
            CharacterDescriptor {
                order: 1,
                exponents: vec![],
                qp_degree: 1,
            },
            recs,
            2,
        );
        assert_eq!(rep.upper_bound_valuation, None);
        assert!(!rep.stabilized);
        assert!(rep.witness.is_none());
    }

    proptest! {
        #[test]
        fn bound_monotone_under_appending(
            base in proptest::collection::vec((1u64..100, 1u32..4, 0u64..5, 1u64..5), 0..12),
            extra in proptest::collection::vec((1u64..100, 1u32..4, 0u64..5, 1u64..5), 0..6),
        ) {
            let make = |v: &[(u64, u32, u64, u64)]| -> Vec<CandidateRecord> {
                v.iter().map(|&(ell, n, ire, ima)| CandidateRecord {
                    ell, n, ire: ire.min(ima), ima, accepted: ire.min(ima) < ima,
                }).collect()
            };
            let short = make(&base);
            let mut long = short.clone();
            long.extend(make(&extra));
            let (b1, _) = index_upper_bound(&short);
            let (b2, _) = index_upper_bound(&long);
            match (b1, b2) {
                (Some(x), Some(y)) => prop_assert!(y <= x),
                (Some(_), None) => prop_assert!(false, "bound disappeared"),
                _ => {}
            }
        }
    }
}
