use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heckenil_core::basis::DEFAULT_SLACK;

#[derive(Parser, Debug, Clone)]
#[command(name = "heckenil", version, about = "Nilpotency indices of Hecke operators mod p, and the congruences they imply")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// JSON-lines result cache for index sweeps.
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Seed for the randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Series precision for truncated checks.
    #[arg(long, global = true)]
    pub precision: Option<usize>,
    /// Extra coefficients checked when solving back into a basis.
    #[arg(long, global = true, default_value_t = DEFAULT_SLACK)]
    pub slack: usize,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Indices of nilpotency for a range of exponents.
    Index(IndexArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Partition generating functions.
    Partition(PartitionArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpaceArg {
    Delta,
    D2,
}

#[derive(Args, Debug, Clone)]
pub struct IndexArgs {
    /// Modulus (3 for d2).
    #[arg(long)]
    pub p: Option<u32>,
    #[arg(long)]
    pub ell: u64,
    /// Exponents: `a..b` (inclusive), comma lists, or both (`1..10,15`).
    #[arg(long)]
    pub k: KSet,
    #[arg(long, value_enum, default_value_t = SpaceArg::Delta)]
    pub space: SpaceArg,
    /// Use the refined bounds for ell = 1 mod p where they apply.
    #[arg(long)]
    pub refined: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    #[value(name = "thm1_3")]
    Thm13,
    #[value(name = "table2")]
    Table2,
    #[value(name = "conj1_7")]
    Conj17,
    #[value(name = "mod7")]
    Mod7,
    #[value(name = "mod3_level4")]
    Mod3Level4,
    #[value(name = "prop1_5")]
    Prop15,
    #[value(name = "thm1_6")]
    Thm16,
    #[value(name = "thm1_8")]
    Thm18,
    #[value(name = "basis")]
    Basis,
    #[value(name = "crossover")]
    Crossover,
}

impl Suite {
    /// Conjectural suites report mismatches but never fail the run.
    pub fn is_conjecture(self) -> bool {
        matches!(self, Suite::Table2 | Suite::Conj17 | Suite::Mod7 | Suite::Mod3Level4)
    }
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long)]
    pub p: Option<u32>,
    #[arg(long, value_delimiter = ',')]
    pub ell: Vec<u64>,
    #[arg(long)]
    pub kmax: Option<u64>,
    #[arg(long, value_enum, default_value_t = SpaceArg::Delta)]
    pub space: SpaceArg,
    /// Also check the refined bounds (thm1_3).
    #[arg(long)]
    pub remark: bool,
    /// Case of the vanishing statement: 1a, 1b, 1c, 1d or 2.
    #[arg(long)]
    pub case: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub m: Vec<u32>,
    /// Use D_3 instead of Delta in case 2.
    #[arg(long)]
    pub d3: bool,
    #[arg(long)]
    pub t: Option<u32>,
    #[arg(long)]
    pub r: Option<u64>,
    #[arg(long)]
    pub variant: Option<u8>,
    #[arg(long)]
    pub j: Option<u32>,
    #[arg(long)]
    pub max_n: Option<u64>,
    /// Random samples per check (basis).
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PartitionKind {
    Tcore,
    Power,
}

#[derive(Args, Debug, Clone)]
pub struct PartitionArgs {
    #[arg(long, value_enum)]
    pub kind: PartitionKind,
    #[arg(long)]
    pub t: Option<u64>,
    #[arg(long)]
    pub r: Option<u64>,
    /// Reduce mod this prime.
    #[arg(long = "mod")]
    pub modulus: Option<u32>,
    #[arg(long)]
    pub max_n: u64,
    /// Exact integer counts instead of residues.
    #[arg(long)]
    pub exact: bool,
    /// Count t-cores by enumerating partitions (n <= 40).
    #[arg(long)]
    pub brute_force: bool,
}

/// A set of exponents, kept in the order given with duplicates removed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct KSet(pub Vec<u64>);

impl FromStr for KSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if let Some((a, b)) = part.split_once("..") {
                let b = b.strip_prefix('=').unwrap_or(b);
                let a: u64 = a.trim().parse().map_err(|_| format!("bad range start in {part:?}"))?;
                let b: u64 = b.trim().parse().map_err(|_| format!("bad range end in {part:?}"))?;
                out.extend(a..=b);
            } else {
                out.push(part.parse().map_err(|_| format!("bad exponent {part:?}"))?);
            }
        }
        if out.contains(&0) {
            return Err("exponents must be positive".into());
        }
        let mut seen = std::collections::HashSet::new();
        out.retain(|k| seen.insert(*k));
        Ok(KSet(out))
    }
}
