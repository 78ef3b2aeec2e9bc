use std::ops::Range;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use chainforge::extension::{Backend, Precision};
use chainforge::RegionPartition;

#[derive(Debug, Parser)]
#[command(
    name = "chainforge",
    version,
    about = "Design and analyse spin-chain extensions for encoded state transfer"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Tolerance override: spectral tolerance for extend/verify, ladder
    /// tolerance in units of δ for encode.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Time grid `start:stop:count`, endpoints included.
    #[arg(long, global = true, value_parser = parse_grid)]
    pub grid: Option<Grid>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an extension problem and write the assembled chain.
    Extend {
        problem: PathBuf,
        #[arg(long, value_enum, default_value_t = BackendArg::Linearized)]
        backend: BackendArg,
        #[arg(long, value_enum, default_value_t = PrecisionArg::Auto)]
        precision: PrecisionArg,
        /// Residual report path; defaults to `<out>.report.json`, or stderr.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Eigenvalues and mirror sectors of a chain as CSV.
    Spectrum { chain: PathBuf },
    /// Optimal transfer fidelity over a time grid as CSV.
    Sweep {
        chain: PathBuf,
        #[command(flatten)]
        regions: RegionArgs,
    },
    /// Null-space encodings for perfect transfer at `t₀`.
    Encode {
        chain: PathBuf,
        #[command(flatten)]
        regions: RegionArgs,
        #[command(flatten)]
        time: TimeArgs,
        /// Ladder offset `c` in `λ/δ ≡ c + [σ = −] (mod 2)`; inferred when absent.
        #[arg(long)]
        offset: Option<f64>,
    },
    /// Analytic error bounds for the given chain lengths.
    Bounds {
        /// Comma-separated chain lengths.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        /// Success probability in the Chernoff estimate.
        #[arg(long, default_value_t = 0.5)]
        p: f64,
    },
    /// State-creation spectrum, or the best starting state for a target.
    Create {
        chain: PathBuf,
        /// Bulk sites to prepare, `a..b` (0-based, end exclusive).
        #[arg(long, value_parser = parse_range)]
        bulk: Range<usize>,
        /// Comma-separated output ranges, `a..b,c..d`.
        #[arg(long, value_parser = parse_ranges)]
        output: RangeList,
        #[command(flatten)]
        time: TimeArgs,
        /// Target state JSON; prints the spectrum when absent.
        #[arg(long)]
        target: Option<PathBuf>,
    },
    /// Check a chain: folding, unitarity on random states, and optionally the
    /// targets of a problem file.
    Verify {
        chain: PathBuf,
        #[arg(long)]
        problem: Option<PathBuf>,
        /// Random states propagated in the unitarity check.
        #[arg(long, default_value_t = 16)]
        samples: usize,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BackendArg {
    Linearized,
    Thiele,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Linearized => Backend::Linearized,
            BackendArg::Thiele => Backend::Thiele,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PrecisionArg {
    Auto,
    Double,
    DoubleDouble,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::Auto => Precision::Auto,
            PrecisionArg::Double => Precision::Double,
            PrecisionArg::DoubleDouble => Precision::DoubleDouble,
        }
    }
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    /// Prefix and suffix sizes `M_in,M_out`.
    #[arg(long, value_parser = parse_pair, conflicts_with = "regions")]
    pub partition: Option<(usize, usize)>,
    /// Explicit `input,bulk,output` ranges, e.g. `0..3,3..5,5..8`.
    #[arg(long, value_parser = parse_ranges)]
    pub regions: Option<RangeList>,
}

impl RegionArgs {
    pub fn resolve(&self, n: usize) -> Result<RegionPartition, String> {
        match (&self.partition, &self.regions) {
            (Some((a, b)), None) => RegionPartition::ends(n, *a, *b).map_err(|e| e.to_string()),
            (None, Some(RangeList(r))) if r.len() == 3 => {
                RegionPartition::new(n, r[0].clone(), r[1].clone(), r[2].clone()).map_err(|e| e.to_string())
            }
            (None, Some(_)) => Err("--regions needs exactly three ranges: input,bulk,output".into()),
            _ => Err("give --partition M_in,M_out or --regions".into()),
        }
    }
}

#[derive(Debug, Args)]
pub struct TimeArgs {
    /// Transfer time.
    #[arg(long, conflicts_with = "delta")]
    pub t0: Option<f64>,
    /// Ladder spacing; sets `t₀ = π/δ`.
    #[arg(long)]
    pub delta: Option<f64>,
}

impl TimeArgs {
    pub fn resolve(&self) -> Result<f64, String> {
        let t0 = match (self.t0, self.delta) {
            (Some(t), None) => t,
            (None, Some(d)) => std::f64::consts::PI / d,
            _ => return Err("give --t0 or --delta".into()),
        };
        if t0.is_finite() && t0 >= 0.0 {
            Ok(t0)
        } else {
            Err(format!("transfer time {t0} is not a finite nonnegative number"))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RangeList(pub Vec<Range<usize>>);

pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(format!("grid {s:?} is not start:stop:count"));
    };
    let num = |x: &str| {
        x.trim()
            .parse::<f64>()
            .map_err(|e| format!("bad grid bound {x:?}: {e}"))
    };
    let (start, stop) = (num(a)?, num(b)?);
    let count: usize = n.trim().parse().map_err(|e| format!("bad grid count {n:?}: {e}"))?;
    if count == 0 {
        return Err("grid count must be at least 1".into());
    }
    if !start.is_finite() || !stop.is_finite() {
        return Err("grid bounds must be finite".into());
    }
    Ok(Grid { start, stop, count })
}

pub fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("{s:?} is not M_in,M_out"))?;
    let p = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("bad size {x:?}: {e}"));
    Ok((p(a)?, p(b)?))
}

pub fn parse_range(s: &str) -> Result<Range<usize>, String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("{s:?} is not a range a..b"))?;
    let p = |x: &str| {
        x.trim()
            .parse::<usize>()
            .map_err(|e| format!("bad range bound {x:?}: {e}"))
    };
    let r = p(a)?..p(b)?;
    if r.start > r.end {
        return Err(format!("range {s:?} is reversed"));
    }
    Ok(r)
}

pub fn parse_ranges(s: &str) -> Result<RangeList, String> {
    s.split(',').map(parse_range).collect::<Result<_, _>>().map(RangeList)
}
