use std::fs::File;
use std::io::{BufReader, Write};
use std::time::Instant;

use cauchy_core::uniformity::{
    mc_pvalue, rayleigh_pvalue, rayleigh_statistic, sobolev_statistic_so_odd, sobolev_statistic_unitary,
    spot_check_so_odd, PValueMethod, StatisticKind,
};
use cauchy_core::{KernelParams, RngStream};
use serde::{Deserialize, Serialize};

use crate::args::{Command, Method, ReplayArgs, Sampler, Statistic, TestArgs};
use crate::data::{read_sample, Sample, SampleKind};
use crate::error::{CliError, CliResult, EXIT_FAIL};
use crate::sample::draw;

/// JSON report of a `test` run; `config` reproduces it.
#[derive(Debug, Serialize, Deserialize)]
pub struct Report {
    pub config: Command,
    pub statistic: f64,
    pub p_value: f64,
    pub method: PValueMethod,
    pub n_obs: usize,
    pub n_sims: usize,
    pub seed: Option<u64>,
    pub elapsed_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_check_excess: Option<f64>,
}

/// Tolerance on the excess of the closed form over the series tail bound in
/// `--verify-kernel` spot checks.
const SPOT_CHECK_TOLERANCE: f64 = 1e-9;
const SPOT_CHECK_PAIRS: usize = 10;

fn expected_kind(statistic: Statistic) -> SampleKind {
    match statistic {
        Statistic::Rayleigh => SampleKind::Rotations,
        Statistic::SobolevSoOdd => SampleKind::Spectra,
        Statistic::SobolevUnitary => SampleKind::Unitary,
    }
}

fn load(args: &TestArgs) -> CliResult<Sample> {
    let kind = expected_kind(args.statistic);
    if let Some(path) = &args.input {
        let file = File::open(path).map_err(|e| CliError::data(format!("cannot open {}: {e}", path.display())))?;
        return read_sample(BufReader::new(file), kind).map_err(|e| e.context(path.display()));
    }
    let compatible = match (kind, args.source.sampler) {
        (SampleKind::Rotations, Some(Sampler::HaarSo3 | Sampler::NaiveSo3)) => true,
        (SampleKind::Spectra, Some(Sampler::HaarSpectrum)) => true,
        (SampleKind::Unitary, Some(Sampler::HaarUnitary)) => true,
        (_, None) => return Err(CliError::usage("give --input or --sampler")),
        _ => false,
    };
    if !compatible {
        return Err(CliError::usage(format!(
            "sampler {:?} does not produce observations for {:?}",
            args.source.sampler.unwrap(),
            args.statistic
        )));
    }
    draw(&args.source)
}

pub fn evaluate(args: &TestArgs) -> CliResult<Report> {
    let start = Instant::now();
    let sample = load(args)?;
    let method = match (args.method, args.statistic) {
        (Some(m), _) => m,
        (None, Statistic::Rayleigh) => Method::Asymptotic,
        (None, _) => Method::MonteCarlo,
    };
    if method == Method::Asymptotic && args.statistic != Statistic::Rayleigh {
        return Err(CliError::usage("asymptotic p-values are available for rayleigh only"));
    }
    let stream = match (method, args.source.seed) {
        (Method::MonteCarlo, None) => return Err(CliError::usage("--seed is required for Monte Carlo p-values")),
        (_, seed) => RngStream::new(seed.unwrap_or(0), 0),
    };
    let params = KernelParams::new(args.z)?;
    let n_obs = sample.len();
    let mut kernel_check_excess = None;
    let (statistic, kind) = match &sample {
        Sample::Rotations(rs) => (rayleigh_statistic(rs)?, StatisticKind::Rayleigh),
        Sample::Spectra(ss) => {
            if args.verify_kernel {
                kernel_check_excess = Some(spot_check_so_odd(ss, &params, SPOT_CHECK_PAIRS, 1e-12)?);
            }
            let m = ss[0].rank();
            (sobolev_statistic_so_odd(ss, &params)?, StatisticKind::SobolevSoOdd { m, params })
        }
        Sample::Unitary(us) => {
            let n = us[0].dim();
            (sobolev_statistic_unitary(us, &params)?, StatisticKind::SobolevUnitary { n, params })
        }
    };
    let report = match method {
        Method::Asymptotic => rayleigh_pvalue(statistic, PValueMethod::Asymptotic, n_obs, 0, stream)?,
        Method::MonteCarlo => mc_pvalue(&kind, statistic, n_obs, args.sims, stream)?,
    };
    Ok(Report {
        config: Command::Test(args.clone()),
        statistic: report.statistic,
        p_value: report.p_value,
        method: report.method,
        n_obs: report.n_obs,
        n_sims: report.n_sims,
        seed: args.source.seed,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        kernel_check_excess,
    })
}

pub fn run_test(args: &TestArgs, out: &mut impl Write) -> CliResult<i32> {
    let report = evaluate(args)?;
    serde_json::to_writer_pretty(&mut *out, &report)?;
    writeln!(out)?;
    let check_failed = report.kernel_check_excess.is_some_and(|e| !(e <= SPOT_CHECK_TOLERANCE));
    if check_failed {
        eprintln!("kernel spot check FAIL: closed form exceeds the series tail bound");
        return Ok(EXIT_FAIL);
    }
    Ok(0)
}

pub fn run_replay(args: &ReplayArgs, out: &mut impl Write) -> CliResult<i32> {
    let file = File::open(&args.report)
        .map_err(|e| CliError::data(format!("cannot open {}: {e}", args.report.display())))?;
    let original: Report = serde_json::from_reader(BufReader::new(file))
        .map_err(|e| CliError::data(format!("{} is not a test report: {e}", args.report.display())))?;
    let Command::Test(config) = &original.config else {
        return Err(CliError::data("only test reports can be replayed"));
    };
    let again = evaluate(config)?;
    let same = again.statistic.to_bits() == original.statistic.to_bits()
        && again.p_value.to_bits() == original.p_value.to_bits()
        && again.n_obs == original.n_obs
        && again.n_sims == original.n_sims;
    let summary = serde_json::json!({
        "identical": same,
        "original": { "statistic": original.statistic, "p_value": original.p_value },
        "replayed": { "statistic": again.statistic, "p_value": again.p_value },
    });
    serde_json::to_writer_pretty(&mut *out, &summary)?;
    writeln!(out)?;
    Ok(if same { 0 } else { EXIT_FAIL })
}

