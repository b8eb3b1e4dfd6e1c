use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "cauchy", version, about = "Cauchy kernels and uniformity tests on the classical groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Compare closed-form kernels with the truncated character series.
    Verify(VerifyArgs),
    /// Evaluate a kernel at explicit spectra.
    Kernel(KernelArgs),
    /// Draw random rotations or spectra and write them as CSV.
    Sample(SampleArgs),
    /// Run a uniformity test and print a JSON report.
    Test(TestArgs),
    /// Evaluate the z -> 1 limit of the differentiated SO(2m+1) identity.
    Limit(LimitArgs),
    /// Re-run the configuration embedded in a JSON report and compare.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupArg {
    SoOdd,
    OOdd,
    Sp,
    SoEven,
    Unitary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

fn angle_list(s: &str) -> Result<f64, String> {
    s.trim().parse::<f64>().map_err(|e| format!("invalid angle {s:?}: {e}"))
}

fn det_sign(s: &str) -> Result<i8, String> {
    match s.trim() {
        "1" | "+1" => Ok(1),
        "-1" => Ok(-1),
        other => Err(format!("determinant must be 1 or -1, got {other:?}")),
    }
}

fn z_value(s: &str) -> Result<f64, String> {
    let z: f64 = s.trim().parse().map_err(|e| format!("invalid z {s:?}: {e}"))?;
    if (0.0..1.0).contains(&z) {
        Ok(z)
    } else {
        Err(format!("z must lie in [0, 1), got {z}"))
    }
}

/// Spectra given on the command line.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SpectrumArgs {
    /// Angles of the first spectrum, comma separated (radians).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = angle_list)]
    pub angles_x: Vec<f64>,
    /// Angles of the second spectrum.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = angle_list)]
    pub angles_y: Vec<f64>,
    /// det of the first element (o-odd only).
    #[arg(long, default_value = "1", allow_hyphen_values = true, value_parser = det_sign)]
    pub det_x: i8,
    /// det of the second element (o-odd only).
    #[arg(long, default_value = "1", allow_hyphen_values = true, value_parser = det_sign)]
    pub det_y: i8,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub group: GroupArg,
    /// Ranks to check (dimension n for unitary); taken from the angles when given.
    #[arg(long, value_delimiter = ',')]
    pub m: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true, value_parser = z_value)]
    pub z: Vec<f64>,
    #[command(flatten)]
    pub spectra: SpectrumArgs,
    /// Number of random generic pairs per (m, z) cell.
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Type D normalization factor: 0.25 matches the series, 1 is the unscaled form.
    #[arg(long, default_value_t = 0.25)]
    pub normalization: f64,
    /// Allowed excess of |closed form - series| over the certified tail bound.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct KernelArgs {
    #[arg(long, value_enum)]
    pub group: GroupArg,
    #[arg(long, value_parser = z_value)]
    pub z: f64,
    #[command(flatten)]
    pub spectra: SpectrumArgs,
    #[arg(long, default_value_t = 0.25)]
    pub normalization: f64,
    /// Pair the second argument's characters with their complex conjugates (unitary only).
    #[arg(long)]
    pub conjugate: bool,
    /// Also evaluate the truncated series and its tail bound.
    #[arg(long)]
    pub check: bool,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampler {
    HaarSo3,
    NaiveSo3,
    HaarSpectrum,
    HaarUnitary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NaiveRange {
    /// Angle uniform on [0, 2π).
    #[default]
    Full,
    /// Angle uniform on [0, π].
    Half,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumGroup {
    #[default]
    SoOdd,
    Sp,
    SoEven,
}

/// Where the random sample comes from.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SamplerArgs {
    #[arg(long, value_enum)]
    pub sampler: Option<Sampler>,
    /// Sample size.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: Option<u64>,
    /// Rank m of haar-spectrum draws, dimension n of haar-unitary draws.
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// Group of haar-spectrum draws.
    #[arg(long, value_enum, default_value_t)]
    pub spectrum_group: SpectrumGroup,
    #[arg(long, value_enum, default_value_t)]
    pub naive_range: NaiveRange,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SampleArgs {
    #[command(flatten)]
    pub source: SamplerArgs,
    /// Also write a 50-bin angle histogram.
    #[arg(long)]
    pub hist: bool,
    /// Output CSV path; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistic {
    Rayleigh,
    SobolevSoOdd,
    SobolevUnitary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Asymptotic,
    MonteCarlo,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TestArgs {
    #[arg(long, value_enum)]
    pub statistic: Statistic,
    /// CSV sample as written by `sample`; otherwise drawn with --sampler.
    #[arg(long, conflicts_with = "sampler")]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub source: SamplerArgs,
    /// Default: asymptotic for rayleigh, monte-carlo otherwise.
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    #[arg(long, default_value_t = 1000)]
    pub sims: usize,
    #[arg(long, default_value_t = 0.5, value_parser = z_value)]
    pub z: f64,
    /// Check the closed form against the series on a few pairs (sobolev-so-odd).
    #[arg(long)]
    pub verify_kernel: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct LimitArgs {
    #[command(flatten)]
    pub spectra: SpectrumArgs,
    /// Smallest admissible gap between the shifted traces.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Also print the normalized derivative at z = 0.99 and 0.999.
    #[arg(long)]
    pub check: bool,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    pub report: PathBuf,
}

impl GroupArg {
    pub fn name(self) -> &'static str {
        match self {
            GroupArg::SoOdd => "so-odd",
            GroupArg::OOdd => "o-odd",
            GroupArg::Sp => "sp",
            GroupArg::SoEven => "so-even",
            GroupArg::Unitary => "unitary",
        }
    }
}
