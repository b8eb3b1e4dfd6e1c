use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use cauchy_core::sampling::{
    sample_haar_so3, sample_haar_spectrum, sample_naive_so3, sample_unitary_spectrum, NaiveAngleRange,
};
use cauchy_core::{GroupTag, RngStream};

use crate::args::{NaiveRange, SampleArgs, Sampler, SamplerArgs, SpectrumGroup};
use crate::data::Sample;
use crate::error::{CliError, CliResult};

/// Overrides the directory that relative output paths are resolved against.
pub const OUT_DIR_ENV: &str = "CAUCHY_OUT_DIR";

pub fn resolve_output(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// The observed sample is drawn from stream 0 of the seed.
pub fn draw(source: &SamplerArgs) -> CliResult<Sample> {
    let sampler = source.sampler.ok_or_else(|| CliError::usage("--sampler is required"))?;
    let n = source.n.ok_or_else(|| CliError::usage("--n is required"))? as usize;
    let seed = source.seed.ok_or_else(|| CliError::usage("--seed is required for random sampling"))?;
    let mut rng = RngStream::new(seed, 0).rng();
    Ok(match sampler {
        Sampler::HaarSo3 => Sample::Rotations((0..n).map(|_| sample_haar_so3(&mut rng)).collect()),
        Sampler::NaiveSo3 => {
            let range = match source.naive_range {
                NaiveRange::Full => NaiveAngleRange::Full,
                NaiveRange::Half => NaiveAngleRange::Half,
            };
            Sample::Rotations((0..n).map(|_| sample_naive_so3(&mut rng, range)).collect())
        }
        Sampler::HaarSpectrum => {
            let group = match source.spectrum_group {
                SpectrumGroup::SoOdd => GroupTag::SoOdd,
                SpectrumGroup::Sp => GroupTag::Sp,
                SpectrumGroup::SoEven => GroupTag::SoEven,
            };
            Sample::Spectra((0..n).map(|_| sample_haar_spectrum(group, source.m, &mut rng)).collect::<Result<_, _>>()?)
        }
        Sampler::HaarUnitary => {
            Sample::Unitary((0..n).map(|_| sample_unitary_spectrum(source.m, &mut rng)).collect::<Result<_, _>>()?)
        }
    })
}

fn hist_path(output: &Path) -> PathBuf {
    let stem = output.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "sample".into());
    output.with_file_name(format!("{stem}_hist.csv"))
}

pub fn run(args: &SampleArgs, out: &mut impl Write) -> CliResult<i32> {
    let sample = draw(&args.source)?;
    match &args.output {
        Some(path) => {
            let path = resolve_output(path);
            let file = File::create(&path).map_err(|e| CliError::data(format!("cannot create {}: {e}", path.display())))?;
            sample.write_csv(BufWriter::new(file))?;
            eprintln!("wrote {} rows to {}", sample.len(), path.display());
            if args.hist {
                let hist = hist_path(&path);
                let file =
                    File::create(&hist).map_err(|e| CliError::data(format!("cannot create {}: {e}", hist.display())))?;
                sample.write_histogram(BufWriter::new(file))?;
                eprintln!("wrote histogram to {}", hist.display());
            }
        }
        None => {
            sample.write_csv(&mut *out)?;
            if args.hist {
                sample.write_histogram(io::stderr().lock())?;
            }
        }
    }
    Ok(0)
}
