use std::io::Write;

use anyhow::Result;
use heckenil_core::arith::gcd;
use heckenil_core::nilpotency::{
    crossover_check, nilpotency_indices, remark_bound, thm13_bound, verify_conjectures, verify_thm13, BoundTable,
    IndexSpec, Variant,
};
use heckenil_core::partitions::{
    brute_force_tcore, check_prop15, check_thm16, check_thm18, power_partition_series, power_partition_series_in,
    prop15_ell, tcore_series, tcore_series_in, Prop15Case,
};
use heckenil_core::report::CongruenceReport;
use heckenil_core::ring::Integers;
use heckenil_core::Error;
use num_bigint::BigInt;

use crate::args::{Cli, Command, Global, IndexArgs, PartitionArgs, PartitionKind, SpaceArg, Suite, VerifyArgs};
use crate::cache::{Cache, CacheRecord, SCHEMA_VERSION};
use crate::output::{write_index_rows, write_reports, write_rows, IndexRow, PartitionRow};
use crate::suites;

/// A configuration the library refuses; exit status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid configuration: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

/// Hypothesis-type library errors are configuration errors; the rest are computational.
fn classify(e: Error) -> anyhow::Error {
    match e {
        Error::Hypothesis(_) | Error::ModulusMismatch { .. } | Error::UnsupportedForm(_) => config(e.to_string()),
        other => anyhow::anyhow!("{}: {other}", error_code(&other)),
    }
}

pub fn error_code(e: &Error) -> &'static str {
    match e {
        Error::ResidualNonzero { .. } => "RESIDUAL_NONZERO",
        Error::BoundViolated { .. } => "BOUND_VIOLATED",
        Error::CeilingExceeded { .. } => "CEILING_EXCEEDED",
        Error::PrecisionTooLow { .. } => "PRECISION_TOO_LOW",
        Error::TooLarge(_) => "TOO_LARGE",
        Error::OperatorPhase(_) => "OPERATOR_PHASE",
        _ => "ERROR",
    }
}

/// Runs one command and returns the exit status.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(w) = cli.global.workers {
            if w == 0 {
                return Err(config("--workers must be positive"));
            }
            b = b.num_threads(w);
        }
        b.build()?
    };
    // Output is buffered so the workers never touch the caller's streams.
    let (code, o, e) = pool.install(|| {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = match &cli.command {
            Command::Index(a) => cmd_index(&cli.global, a, &mut o, &mut e),
            Command::Verify(a) => cmd_verify(&cli.global, a, &mut o, &mut e),
            Command::Partition(a) => cmd_partition(&cli.global, a, &mut o),
        };
        (code, o, e)
    });
    out.write_all(&o)?;
    err.write_all(&e)?;
    code
}

pub fn index_spec(g: &Global, a: &IndexArgs) -> Result<IndexSpec> {
    let spec = match a.space {
        SpaceArg::Delta => IndexSpec::delta(a.p.ok_or_else(|| config("--p is required for --space delta"))?, a.ell),
        SpaceArg::D2 => {
            if a.p.is_some_and(|p| p != 3) {
                return Err(config("the d2 space lives mod 3"));
            }
            IndexSpec::d2(a.ell)
        }
    }
    .with_slack(g.slack);
    spec.validate().map_err(classify)?;
    Ok(spec)
}

pub fn cmd_index(g: &Global, a: &IndexArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let spec = index_spec(g, a)?;
    let space = spec.space.name();
    let ks: Vec<u64> = match a.space {
        SpaceArg::D2 => a.k.0.iter().copied().filter(|&k| gcd(k, 6) == 1).collect(),
        SpaceArg::Delta => a.k.0.clone(),
    };

    let mut cache = Cache::open(g.cache.as_deref())?;
    if cache.skipped > 0 {
        writeln!(err, "warning: skipped {} unreadable cache line(s)", cache.skipped)?;
    }
    let missing: Vec<u64> = ks.iter().copied().filter(|&k| cache.get(spec.p, spec.ell, &space, k, spec.slack).is_none()).collect();
    let computed = nilpotency_indices(&missing, &spec).map_err(classify)?;
    let records: Vec<CacheRecord> = missing
        .iter()
        .zip(&computed)
        .map(|(&k, &index)| CacheRecord { v: SCHEMA_VERSION, p: spec.p, ell: spec.ell, space: space.clone(), k, slack: spec.slack, index })
        .collect();
    cache.append(&records)?;

    let mut rows = Vec::with_capacity(ks.len());
    let mut violations = 0;
    for &k in &ks {
        let index = cache.get(spec.p, spec.ell, &space, k, spec.slack).expect("computed or cached");
        let mut bound = thm13_bound(k, &spec).map_err(classify)?;
        if a.refined && a.space == SpaceArg::Delta {
            if let Some(r) = remark_bound(k, spec.p, spec.ell) {
                bound = Some(bound.map_or(r, |b| b.min(r)));
            }
        }
        if let Some(b) = bound {
            if index > b {
                violations += 1;
                writeln!(err, "BOUND_VIOLATED: k = {k}: index {index} > bound {b}")?;
            }
        }
        rows.push(IndexRow {
            p: spec.p,
            ell: spec.ell,
            space: space.clone(),
            k,
            index,
            bound,
            slack_observed: bound.map(|b| b as i64 - index as i64),
        });
    }
    write_index_rows(&rows, g.format, out)?;
    Ok(if violations > 0 { 1 } else { 0 })
}

fn default_ells(p: u32) -> Vec<u64> {
    match p {
        2 => vec![3, 5, 7],
        3 => vec![2, 5, 7, 13],
        5 => vec![11, 19, 29, 31],
        _ => vec![13, 29, 41, 43],
    }
}

pub fn cmd_verify(g: &Global, a: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let reports = collect_reports(g, a)?;
    write_reports(&reports, g.format, out)?;
    let failed: Vec<&CongruenceReport> = reports.iter().filter(|r| !r.passed()).collect();
    for r in &failed {
        let tag = if a.suite.is_conjecture() { "warning" } else { "FAIL" };
        writeln!(err, "{tag}: {}", r.summary())?;
    }
    Ok(if failed.is_empty() || a.suite.is_conjecture() { 0 } else { 1 })
}

fn collect_reports(g: &Global, a: &VerifyArgs) -> Result<Vec<CongruenceReport>> {
    let mut reports = Vec::new();
    match a.suite {
        Suite::Thm13 => match a.space {
            SpaceArg::Delta => {
                let ps = a.p.map_or(vec![3, 5, 7], |p| vec![p]);
                let ks: Vec<u64> = (1..=a.kmax.unwrap_or(500)).collect();
                for p in ps {
                    let ells = if a.ell.is_empty() { default_ells(p) } else { a.ell.clone() };
                    for ell in ells {
                        let spec = IndexSpec::delta(p, ell).with_slack(g.slack);
                        reports.push(verify_thm13(&ks, &spec, a.remark).map_err(classify)?);
                    }
                }
            }
            SpaceArg::D2 => {
                let ks: Vec<u64> = (1..=a.kmax.unwrap_or(300)).collect();
                let ells = if a.ell.is_empty() { vec![5, 7, 11, 13] } else { a.ell.clone() };
                for ell in ells {
                    reports.push(verify_thm13(&ks, &IndexSpec::d2(ell).with_slack(g.slack), false).map_err(classify)?);
                }
            }
        },
        Suite::Table2 => reports.push(verify_conjectures(a.kmax.unwrap_or(2000), Variant::D19Table).map_err(classify)?),
        Suite::Conj17 => reports.push(verify_conjectures(a.kmax.unwrap_or(2000), Variant::S19Prime).map_err(classify)?),
        Suite::Mod7 => reports.push(verify_conjectures(a.kmax.unwrap_or(1000), Variant::S29Double).map_err(classify)?),
        Suite::Mod3Level4 => {
            let ells = if a.ell.is_empty() { vec![7, 11] } else { a.ell.clone() };
            for ell in ells {
                reports.push(verify_conjectures(a.kmax.unwrap_or(500), Variant::STriple(ell)).map_err(classify)?);
            }
        }
        Suite::Prop15 => {
            let case: Prop15Case = a.case.as_deref().ok_or_else(|| config("--case is required"))?.parse().map_err(classify)?;
            let p = a.p.ok_or_else(|| config("--p is required"))?;
            let ms = if a.m.is_empty() { vec![1] } else { a.m.clone() };
            let n = g.precision.unwrap_or(10_000);
            for m in ms {
                let ell = match a.ell.as_slice() {
                    [] => prop15_ell(case, p, m),
                    [ell] => *ell,
                    _ => return Err(config("prop1_5 takes a single --ell")),
                };
                reports.push(check_prop15(case, p, ell, m, n, a.d3).map_err(classify)?);
            }
        }
        Suite::Thm16 => match a.p {
            None => {
                reports.push(check_thm16(3, 1, 1, &[2], 1, a.max_n.unwrap_or(10_000)).map_err(classify)?);
                reports.push(check_thm16(5, 1, 2, &[19], 1, a.max_n.unwrap_or(1000)).map_err(classify)?);
                reports.push(check_thm16(7, 1, 2, &[13, 41], 1, a.max_n.unwrap_or(200)).map_err(classify)?);
            }
            Some(p) => {
                if a.ell.is_empty() {
                    return Err(config("--ell is required with --p"));
                }
                let r = a.r.unwrap_or(1) as u32;
                let rep = check_thm16(p, a.t.unwrap_or(1), a.variant.unwrap_or(1), &a.ell, r, a.max_n.unwrap_or(1000));
                reports.push(rep.map_err(classify)?);
            }
        },
        Suite::Thm18 => match a.r {
            None => {
                reports.push(check_thm18(1, 2, &[5], 0, a.max_n.unwrap_or(10_000)).map_err(classify)?);
                reports.push(check_thm18(5, 1, &[5], 1, a.max_n.unwrap_or(1000)).map_err(classify)?);
            }
            Some(r) => {
                let ells = if a.ell.is_empty() { vec![5] } else { a.ell.clone() };
                let rep = check_thm18(r, a.variant.unwrap_or(1), &ells, a.j.unwrap_or(1), a.max_n.unwrap_or(1000));
                reports.push(rep.map_err(classify)?);
            }
        },
        Suite::Basis => reports.extend(suites::basis_suite(g.seed, a.samples, g.slack).map_err(classify)?),
        Suite::Crossover => reports.push(crossover_check(&BoundTable::medvedovsky())),
    }
    Ok(reports)
}

pub fn cmd_partition(g: &Global, a: &PartitionArgs, out: &mut dyn Write) -> Result<i32> {
    let n = usize::try_from(a.max_n + 1).map_err(|_| config("--max-n too large"))?;
    let param = |v: Option<u64>, flag: &str| v.ok_or_else(|| config(format!("--{flag} is required")));
    let values: Vec<String> = match (a.kind, a.brute_force, a.exact) {
        (PartitionKind::Tcore, true, _) => {
            let t = param(a.t, "t")?;
            (0..=a.max_n)
                .map(|m| brute_force_tcore(t, m).map(|c| match a.modulus {
                    Some(p) if !a.exact => (c % p as u64).to_string(),
                    _ => c.to_string(),
                }))
                .collect::<heckenil_core::Result<_>>()
                .map_err(classify)?
        }
        (PartitionKind::Power, true, _) => return Err(config("--brute-force applies to t-cores only")),
        (kind, false, true) => {
            let ring = Integers::<BigInt>::new();
            let s = match kind {
                PartitionKind::Tcore => tcore_series_in(ring, param(a.t, "t")?, n),
                PartitionKind::Power => power_partition_series_in(ring, param(a.r, "r")?, n),
            };
            s.coeffs().iter().map(BigInt::to_string).collect()
        }
        (kind, false, false) => {
            let p = a.modulus.ok_or_else(|| config("--mod is required unless --exact"))?;
            let s = match kind {
                PartitionKind::Tcore => tcore_series(param(a.t, "t")?, p, n),
                PartitionKind::Power => power_partition_series(param(a.r, "r")?, n, p),
            }
            .map_err(classify)?;
            s.coeffs().iter().map(u32::to_string).collect()
        }
    };
    let rows: Vec<PartitionRow> = values.into_iter().enumerate().map(|(i, value)| PartitionRow { n: i as u64, value }).collect();
    write_rows(&rows, g.format, out)?;
    Ok(0)
}
