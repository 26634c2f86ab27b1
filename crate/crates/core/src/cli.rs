//! The `cpdist` command line.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::alaw::{ALaw, Family};
use crate::bench::{bench_bruteforce, bench_density};
use crate::density::DensityEngine;
use crate::error::Error;
use crate::estimate::{
    compare_models, mle_fit, mom_fit, CompareMode, FitResult, FrequencyDataset, SearchConfig,
};
use crate::ingest::{read_counts, read_text, word_counts, write_counts, CorpusConfig};
use crate::moments::{
    alt_kurtosis_formula, alt_skewness_formula, closed_form_mean_var, cumulative_finiteness,
    finiteness, moment_report, Order,
};
use crate::sampler::{OverflowPolicy, SampleConfig, Sampler};

#[derive(Debug, Parser)]
#[command(
    name = "cpdist",
    version,
    about = "Compound-product distributions: density, sampling, moments and fitting"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// P(X = n) for n = 1..=limit
    Density(DensityArgs),
    /// Random variates of X
    Sample(SampleArgs),
    /// Moments of X with finiteness flags
    Moments(MomentsArgs),
    /// Fit one family, or all four, to observed counts
    Fit(FitArgs),
    /// Fit all four families and rank them by AIC
    Compare(CompareArgs),
    /// Time the density recursion and the brute-force enumeration
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct LawArgs {
    #[arg(long, value_parser = parse_family)]
    pub family: Family,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long)]
    pub p: Option<f64>,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl LawArgs {
    fn law(&self) -> Result<ALaw, CliError> {
        fn need<T>(v: Option<T>, flag: &str, family: Family) -> Result<T, CliError> {
            v.ok_or_else(|| CliError::Usage(format!("--{flag} is required for {family}")))
        }
        let law = match self.family {
            Family::Poisson => ALaw::poisson(need(self.lambda, "lambda", self.family)?),
            Family::Binomial => ALaw::binomial(
                need(self.n, "n", self.family)?,
                need(self.p, "p", self.family)?,
            ),
            Family::NegBinomial => ALaw::neg_binomial(
                need(self.r, "r", self.family)?,
                need(self.p, "p", self.family)?,
            ),
            Family::Geometric => ALaw::geometric(need(self.p, "p", self.family)?),
        };
        law.map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write to this file instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[command(flatten)]
    pub law: LawArgs,
    #[arg(long, default_value_t = 10_000)]
    pub limit: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub law: LawArgs,
    #[arg(long)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_steps: u64,
    /// Emit u64::MAX for overflowing variates instead of failing
    #[arg(long)]
    pub saturate: bool,
    /// Emit `value,count` rows instead of one variate per line
    #[arg(long)]
    pub histogram: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub law: LawArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitFamily {
    Poisson,
    Binomial,
    Negbinomial,
    Geometric,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitMethod {
    Mom,
    Mle,
    /// Moments for Poisson and geometric, likelihood for the others
    #[value(name = "paper")]
    Mixed,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// `value,count` records
    #[arg(long, conflicts_with = "text", required_unless_present = "text")]
    pub input: Option<PathBuf>,
    /// UTF-8 text whose per-word occurrence counts form the observations
    #[arg(long)]
    pub text: Option<PathBuf>,
    /// Keep letter case when tokenizing --text
    #[arg(long)]
    pub keep_case: bool,
    #[arg(long, default_value_t = 1)]
    pub min_count: u64,
    /// Upper end of the integer scan for n or r
    #[arg(long, default_value_t = 50)]
    pub int_max: u32,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

impl DataArgs {
    fn dataset(&self) -> Result<FrequencyDataset, CliError> {
        match (&self.input, &self.text) {
            (Some(path), _) => Ok(read_counts(path)?),
            (None, Some(path)) => {
                let config = CorpusConfig {
                    lowercase: !self.keep_case,
                    min_count: self.min_count,
                };
                Ok(word_counts(&read_text(path)?, &config)?)
            }
            (None, None) => Err(CliError::Usage(
                "one of --input or --text is required".into(),
            )),
        }
    }

    fn search(&self) -> Result<SearchConfig, CliError> {
        if self.int_max == 0 {
            return Err(CliError::Usage("--int-max must be >= 1".into()));
        }
        if !(self.tol > 0.0 && self.tol < 0.1) {
            return Err(CliError::Usage("--tol must lie in (0, 0.1)".into()));
        }
        Ok(SearchConfig {
            int_max: self.int_max,
            tol: self.tol,
            ..Default::default()
        })
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long, value_enum)]
    pub family: FitFamily,
    #[arg(long, value_enum, default_value_t = FitMethod::Mle)]
    pub method: FitMethod,
    #[command(flatten)]
    pub data: DataArgs,
    /// Also write the ingested dataset as `value,count` rows to this file
    #[arg(long)]
    pub save_counts: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CompareModeArg {
    #[value(name = "paper")]
    Mixed,
    Mle,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long, value_enum, default_value_t = CompareModeArg::Mixed)]
    pub mode: CompareModeArg,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchMethodArg {
    Recursion,
    Bruteforce,
    Both,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub law: LawArgs,
    /// Comma-separated, strictly increasing density limits
    #[arg(long, value_delimiter = ',', required = true)]
    pub limits: Vec<usize>,
    /// Limits for the brute-force rows (each at most 14)
    #[arg(long, value_delimiter = ',', default_values_t = [6usize, 8, 10, 12])]
    pub brute_limits: Vec<usize>,
    #[arg(long, value_enum, default_value_t = BenchMethodArg::Recursion)]
    pub method: BenchMethodArg,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Compute(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Compute(e.into())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Compute(e) => write!(f, "error: {e}"),
        }
    }
}

fn open_output<'a>(
    path: &Option<PathBuf>,
    stdout: &'a mut dyn Write,
) -> Result<Box<dyn Write + 'a>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(stdout),
    })
}

fn write_json(out: &mut dyn Write, value: &serde_json::Value) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

fn run_density(args: &DensityArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let law = args.law.law()?;
    if args.limit == 0 {
        return Err(CliError::Usage("--limit must be >= 1".into()));
    }
    let density = DensityEngine::new(args.limit)?.density(&law, args.limit)?;
    let mut out = open_output(&args.out.output, stdout)?;
    match args.format {
        Format::Csv => density.write_csv(&mut out)?,
        Format::Json => write_json(&mut out, &density.to_json())?,
    }
    out.flush()?;
    Ok(())
}

fn run_sample(args: &SampleArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let law = args.law.law()?;
    if args.count == 0 {
        return Err(CliError::Usage("--count must be >= 1".into()));
    }
    if args.max_steps == 0 {
        return Err(CliError::Usage("--max-steps must be >= 1".into()));
    }
    let config = SampleConfig {
        seed: args.seed,
        max_steps: args.max_steps,
        overflow_policy: if args.saturate {
            OverflowPolicy::Saturate
        } else {
            OverflowPolicy::Error
        },
    };
    let values = Sampler::new(law, config)?.sample(args.count)?;
    let mut out = open_output(&args.out.output, stdout)?;
    if args.histogram {
        write_counts(&FrequencyDataset::from_values(&values)?, &mut out)?;
    } else {
        for v in values {
            writeln!(out, "{v}")?;
        }
    }
    out.flush()?;
    Ok(())
}

fn run_moments(args: &MomentsArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let law = args.law.law()?;
    let report = moment_report(&law);
    let (cf_mean, cf_var) = closed_form_mean_var(&law);
    let mut value = serde_json::to_value(&report).map_err(|e| Error::Io(e.to_string()))?;
    value["closed_form"] = json!({ "mean": cf_mean, "variance": cf_var });
    value["finite"] = json!({
        "mean": finiteness(&law, Order::Mean),
        "variance": finiteness(&law, Order::Variance),
    });
    value["alt_formula"] = json!({
        "skewness": cumulative_finiteness(&law, 3).then(|| alt_skewness_formula(&law)),
        "kurtosis": cumulative_finiteness(&law, 4).then(|| alt_kurtosis_formula(&law)),
    });
    let mut out = open_output(&args.out.output, stdout)?;
    write_json(&mut out, &value)?;
    out.flush()?;
    Ok(())
}

fn fit_one(
    data: &FrequencyDataset,
    family: Family,
    method: FitMethod,
    search: &SearchConfig,
) -> Result<FitResult, CliError> {
    let use_moments = match method {
        FitMethod::Mom => true,
        FitMethod::Mle => false,
        FitMethod::Mixed => matches!(family, Family::Poisson | Family::Geometric),
    };
    Ok(if use_moments {
        mom_fit(data, family)?.with_likelihood(data)?
    } else {
        mle_fit(data, family, search)?
    })
}

fn run_fit(args: &FitArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let search = args.data.search()?;
    let data = args.data.dataset()?;
    if let Some(path) = &args.save_counts {
        let file = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        write_counts(&data, BufWriter::new(file))?;
    }
    let value = match args.family {
        FitFamily::All => {
            let fits = match args.method {
                FitMethod::Mixed => compare_models(&data, CompareMode::Mixed, &search)?,
                FitMethod::Mle => compare_models(&data, CompareMode::Mle, &search)?,
                FitMethod::Mom => {
                    // Two-parameter moment fits may legitimately fail on
                    // heavy data; report those as errors in place.
                    let mut items = Vec::new();
                    for family in Family::ALL {
                        items.push(match fit_one(&data, family, FitMethod::Mom, &search) {
                            Ok(fit) => serde_json::to_value(fit).expect("fit serializes"),
                            Err(e) => {
                                json!({ "family": family, "method": "mom", "error": e.to_string() })
                            }
                        });
                    }
                    let mut out = open_output(&args.out.output, stdout)?;
                    write_json(&mut out, &serde_json::Value::Array(items))?;
                    out.flush()?;
                    return Ok(());
                }
            };
            serde_json::to_value(fits)
        }
        single => {
            let family = match single {
                FitFamily::Poisson => Family::Poisson,
                FitFamily::Binomial => Family::Binomial,
                FitFamily::Negbinomial => Family::NegBinomial,
                FitFamily::Geometric => Family::Geometric,
                FitFamily::All => unreachable!(),
            };
            serde_json::to_value(fit_one(&data, family, args.method, &search)?)
        }
    }
    .map_err(|e| Error::Io(e.to_string()))?;
    let mut out = open_output(&args.out.output, stdout)?;
    write_json(&mut out, &value)?;
    out.flush()?;
    Ok(())
}

fn run_compare(args: &CompareArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let search = args.data.search()?;
    let data = args.data.dataset()?;
    let mode = match args.mode {
        CompareModeArg::Mixed => CompareMode::Mixed,
        CompareModeArg::Mle => CompareMode::Mle,
    };
    let fits = compare_models(&data, mode, &search)?;
    let value = serde_json::to_value(fits).map_err(|e| Error::Io(e.to_string()))?;
    let mut out = open_output(&args.out.output, stdout)?;
    write_json(&mut out, &value)?;
    out.flush()?;
    Ok(())
}

fn run_bench(args: &BenchArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let law = args.law.law()?;
    let increasing = |v: &[usize]| !v.is_empty() && v[0] > 0 && v.windows(2).all(|w| w[0] < w[1]);
    if !increasing(&args.limits) {
        return Err(CliError::Usage(
            "--limits must be positive and strictly increasing".into(),
        ));
    }
    let brute = matches!(
        args.method,
        BenchMethodArg::Bruteforce | BenchMethodArg::Both
    );
    if brute && (!increasing(&args.brute_limits) || args.brute_limits.iter().any(|&l| l > 14)) {
        return Err(CliError::Usage(
            "--brute-limits must be strictly increasing and at most 14".into(),
        ));
    }
    let mut out = open_output(&args.out.output, stdout)?;
    let mut header = true;
    if matches!(
        args.method,
        BenchMethodArg::Recursion | BenchMethodArg::Both
    ) {
        bench_density(&law, &args.limits)?.write_csv(&mut out, header)?;
        header = false;
    }
    if brute {
        bench_bruteforce(&law, &args.brute_limits)?.write_csv(&mut out, header)?;
    }
    out.flush()?;
    Ok(())
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Density(a) => run_density(a, stdout),
        Command::Sample(a) => run_sample(a, stdout),
        Command::Moments(a) => run_moments(a, stdout),
        Command::Fit(a) => run_fit(a, stdout),
        Command::Compare(a) => run_compare(a, stdout),
        Command::Bench(a) => run_bench(a, stdout),
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let target: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => 0,
        Err(CliError::Compute(Error::Io(m))) if m.contains("Broken pipe") => 0,
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            e.exit_code()
        }
    }
}
