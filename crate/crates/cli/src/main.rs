//! Command-line front end: parse a field/prime/twist configuration, run the
//! candidate scan, and emit a human-readable table or a deterministic JSON
//! report.

use circindex_core::fieldspec::{enumerate_characters, FieldSpec};
use circindex_core::modarith::{dlog_prime_power, is_primitive_root, pow_mod};
use circindex_core::oracle::is_regular;
use circindex_core::residual::{check_norm_relation, residual_vector, ResidualContext};
use circindex_core::search::{full_run, IndexReport, SearchConfig};
use clap::error::ErrorKind;
use clap::Parser;
use serde::Serialize;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "circindex",
    about = "Certified upper bounds for chi-indices of circular classes over real abelian fields",
    disable_help_flag = false
)]
struct Args {
    /// Odd prime p.
    #[arg(long)]
    p: Option<u64>,

    /// Odd twist r >= 3.
    #[arg(long)]
    r: Option<u64>,

    /// Conductor of the defining cyclotomic field (with --subgroup).
    #[arg(long, conflicts_with = "field")]
    conductor: Option<u64>,

    /// Comma-separated generators of the fixing subgroup H (must contain -1).
    #[arg(long, value_delimiter = ',', conflicts_with = "field")]
    subgroup: Vec<u64>,

    /// Field shorthand: "Q" or "real-cyclotomic:<f>".
    #[arg(long)]
    field: Option<String>,

    /// Restrict to the character class containing the character with these
    /// comma-separated generator exponents (default: all classes).
    #[arg(long = "char", value_delimiter = ',')]
    char_exponents: Option<Vec<u64>>,

    /// Largest auxiliary prime scanned.
    #[arg(long, default_value_t = 10_000_000)]
    ell_bound: u64,

    /// Largest level n.
    #[arg(long, default_value_t = 6)]
    n_max: u32,

    /// Primes sampled per level.
    #[arg(long, default_value_t = 4)]
    primes_per_level: usize,

    /// Stabilization window (productive levels with an unchanged minimum).
    #[arg(long, default_value_t = 2)]
    window: u32,

    /// Write the report to this path instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Emit the JSON report instead of the table.
    #[arg(long)]
    json: bool,

    /// Run the built-in consistency suite and exit.
    #[arg(long)]
    check: bool,
}

#[derive(Serialize)]
struct FieldBlock {
    conductor: u64,
    subgroup: Vec<u64>,
}

#[derive(Serialize)]
struct Report {
    p: u64,
    r: u64,
    field: FieldBlock,
    classes: Vec<IndexReport>,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };

    if args.check {
        return if run_check_suite() { 0 } else { 3 };
    }

    let (Some(p), Some(r)) = (args.p, args.r) else {
        eprintln!("error: --p and --r are required (or use --check)");
        return 1;
    };
    if p < 3 || p % 2 == 0 {
        eprintln!("error: p must be an odd prime");
        return 1;
    }
    let fs = match build_field(&args, p) {
        Ok(fs) => fs,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 1;
        }
    };
    let config = SearchConfig {
        ell_bound: args.ell_bound,
        n_max: args.n_max,
        primes_per_level: args.primes_per_level,
        stabilization_window: args.window,
    };
    let mut classes = match full_run(&fs, r, &config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("computation error: {e}");
            return 2;
        }
    };
    if let Some(sel) = &args.char_exponents {
        let sel: Vec<u64> = sel
            .iter()
            .zip(&fs.group.gen_orders)
            .map(|(&e, &m)| e % m)
            .collect();
        // Keep the class whose orbit contains the selected character.
        let chars = enumerate_characters(&fs.group);
        let Some(target) = chars.iter().find(|c| c.gen_exponents == sel) else {
            eprintln!("computation error: --char exponents do not define a character");
            return 2;
        };
        let classes_all = circindex_core::fieldspec::qp_conjugacy_classes(&fs.group, &chars, p);
        let Some(class) = classes_all
            .iter()
            .find(|cl| cl.orbit.iter().any(|c| c == target))
        else {
            eprintln!("computation error: no conjugacy class contains the selected character");
            return 2;
        };
        classes.retain(|rep| rep.character.exponents == class.rep.gen_exponents);
    }
    let report = Report {
        p,
        r,
        field: FieldBlock {
            conductor: fs.f,
            subgroup: fs.group.h_set.iter().copied().collect(),
        },
        classes,
    };

    let output = if args.json {
        let mut s = serde_json::to_string_pretty(&report).expect("serializable report");
        s.push('\n');
        s
    } else {
        render_table(&report)
    };
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, output) {
                eprintln!("computation error: writing {}: {e}", path.display());
                return 2;
            }
        }
        None => print!("{output}"),
    }
    0
}

fn build_field(args: &Args, p: u64) -> Result<FieldSpec, String> {
    match (&args.field, args.conductor) {
        (Some(spec), None) => {
            if spec == "Q" {
                FieldSpec::rationals(p).map_err(|e| e.to_string())
            } else if let Some(f) = spec.strip_prefix("real-cyclotomic:") {
                let f: u64 = f.parse().map_err(|_| format!("bad conductor in {spec:?}"))?;
                FieldSpec::real_cyclotomic(f, p).map_err(|e| e.to_string())
            } else {
                Err(format!(
                    "unknown --field {spec:?}; expected \"Q\" or \"real-cyclotomic:<f>\""
                ))
            }
        }
        (None, Some(f)) => {
            if args.subgroup.is_empty() {
                return Err("--conductor requires --subgroup".into());
            }
            FieldSpec::new(f, &args.subgroup, p).map_err(|e| e.to_string())
        }
        (None, None) => Err("specify --field or --conductor/--subgroup".into()),
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    }
}

fn render_table(report: &Report) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "p = {}, r = {}, conductor = {}, subgroup = {:?}",
        report.p, report.r, report.field.conductor, report.field.subgroup
    );
    let _ = writeln!(
        out,
        "{:<20} {:>5} {:>5} {:>12} {:>11} {:>14}",
        "character", "order", "d", "bound v_p", "stabilized", "witness"
    );
    for class in &report.classes {
        let bound = class
            .upper_bound_valuation
            .map_or("-".to_string(), |v| v.to_string());
        let witness = class
            .witness
            .as_ref()
            .map_or("-".to_string(), |w| format!("ell={} n={}", w.ell, w.n));
        let _ = writeln!(
            out,
            "{:<20} {:>5} {:>5} {:>12} {:>11} {:>14}",
            format!("{:?}", class.character.exponents),
            class.character.order,
            class.character.qp_degree,
            bound,
            class.stabilized,
            witness
        );
    }
    out
}

/// Built-in consistency suite: quick cross-checks of the main pipelines.
/// Prints one line per check; returns false if any fails.
fn run_check_suite() -> bool {
    let mut ok = true;
    let mut check = |name: &str, result: bool| {
        println!("{}: {}", name, if result { "ok" } else { "FAIL" });
        ok &= result;
    };

    check("regular primes 3,5,7", {
        [3u64, 5, 7].iter().all(|&p| is_regular(p).unwrap_or(false))
    });

    check("dlog round-trip mod 101", {
        (0..25u64).all(|e| {
            let w = pow_mod(pow_mod(2, 4, 101), e, 101); // order-25 subgroup
            dlog_prime_power(101, pow_mod(2, 4, 101), w, 5, 2).is_ok_and(|d| d == e % 25)
        })
    });

    check("generator law f=5,7,16", {
        [(5u64, 3u64), (7, 3), (16, 5)].iter().all(|&(f, p)| {
            FieldSpec::real_cyclotomic(f, p).is_ok_and(|fs| {
                enumerate_characters(&fs.group).iter().all(|chi| {
                    let one = circindex_core::chipart::GroupRingElt::one(&fs.group, p, 2);
                    circindex_core::chipart::chi_span_order(&fs.group, chi, p, 2, &one)
                        .is_ok_and(|v| v == circindex_core::chipart::ima(chi, p, 2))
                })
            })
        })
    });

    check("norm relations conductor 15", {
        FieldSpec::real_cyclotomic(15, 3).is_ok_and(|fs| {
            ResidualContext::new(fs, 31, 1, 3).is_ok_and(|ctx| {
                check_norm_relation(&ctx, 5, 1).unwrap_or(false)
            })
        })
    });

    check("primitive-root independence f=5, ell=31", {
        FieldSpec::new(5, &[4], 3).is_ok_and(|fs| {
            let chars = enumerate_characters(&fs.group);
            let mut seen: Option<Vec<u64>> = None;
            for eta in 1..31 {
                if !is_primitive_root(eta, 31) {
                    continue;
                }
                let Ok(ctx) = ResidualContext::with_root(fs.clone(), 31, 1, 3, eta) else {
                    return false;
                };
                let Ok(v) = residual_vector(&ctx, 5) else {
                    return false;
                };
                let idx: Result<Vec<u64>, _> = chars
                    .iter()
                    .map(|chi| circindex_core::residual::residual_index(&ctx, chi, &v))
                    .collect();
                let Ok(idx) = idx else { return false };
                match &seen {
                    None => seen = Some(idx),
                    Some(prev) => {
                        if prev != &idx {
                            return false;
                        }
                    }
                }
            }
            seen.is_some()
        })
    });

    ok
}
