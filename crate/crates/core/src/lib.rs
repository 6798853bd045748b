//! Residual computation of chi-indices of circular-unit cohomology classes
//! over real abelian fields.
//!
//! The library computes, for a real abelian field F, an odd prime p, an odd
//! twist r >= 3, and characters chi of Gal(F/Q), certified upper bounds for
//! the p-valuation of the chi-index of the canonical circular classes inside
//! the corresponding cohomology lattice. All arithmetic happens in finite
//! fields F_ell and finite group rings (Z/p^n)[G]; no p-adic approximation
//! is involved.

pub mod chipart;
pub mod error;
pub mod fieldspec;
pub mod modarith;
pub mod oracle;
pub mod poly;
pub mod residual;
pub mod search;
pub mod snf;

pub use chipart::{
    build_t_chi, chi_part_order_oracle, chi_span_order, ima, ring_multiply, span_order,
    GroupRingElt, SpanOrderResult,
};
pub use error::{Error, Result};
pub use fieldspec::{
    enumerate_characters, galois_representatives, qp_conjugacy_classes, qp_degree,
    unit_group_structure, AbelianStructure, Character, CharacterClass, FieldSpec, QuotientGroup,
};
pub use modarith::{dlog_prime_power, is_prime, pow_mod, primes_in_progression, primitive_root};
pub use poly::{cyclotomic_polynomial, trace_root_of_unity, UnramifiedRealization};
pub use residual::{
    check_norm_relation, kurihara_index, residual_index, residual_vector, teichmuller,
    ResidualContext,
};
pub use search::{
    full_run, index_upper_bound, scan_candidates, CandidateRecord, IndexReport, SearchConfig,
};
