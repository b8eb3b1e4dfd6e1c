use std::f64::consts::PI;
use std::io::Write;

use cauchy_core::kernels::{kernel, kernel_so_even, kernel_unitary};
use cauchy_core::oracle::{truncated_kernel, truncated_kernel_unitary, TruncationPolicy};
use cauchy_core::sampling::{sample_haar_spectrum, sample_unitary_spectrum};
use cauchy_core::{GroupTag, HalfSpectrum, KernelParams, RngStream, SoEvenNormalization, UnitarySpectrum};
use rand::Rng;

use crate::args::{Format, GroupArg, VerifyArgs};
use crate::error::{CliError, CliResult, EXIT_FAIL};
use crate::spectra::{build_half, group_tag, half_pair, pair_context, unitary_pair};
use crate::table::{angles, num, text, Table};

enum Pair {
    Half(HalfSpectrum, HalfSpectrum),
    Unitary(UnitarySpectrum, UnitarySpectrum),
}

impl Pair {
    fn angles(&self) -> (&[f64], &[f64]) {
        match self {
            Pair::Half(x, y) => (x.angles(), y.angles()),
            Pair::Unitary(x, y) => (x.angles(), y.angles()),
        }
    }
}

/// Haar spectra away from the walls and from each other, so that the
/// character bounds and hence the truncation orders stay moderate.
fn generic_half<R: Rng>(tag: GroupTag, m: usize, det: i8, rng: &mut R) -> CliResult<HalfSpectrum> {
    let base = if tag == GroupTag::OOdd { GroupTag::SoOdd } else { tag };
    loop {
        let s = sample_haar_spectrum(base, m, rng)?;
        let near_wall = s.angles().iter().any(|&a| a < 0.05 || a > PI - 0.05);
        if near_wall || s.min_cos_gap() < 0.05 {
            continue;
        }
        return build_half(tag, s.angles(), det, "random");
    }
}

fn random_pair<R: Rng>(args: &VerifyArgs, m: usize, rng: &mut R) -> CliResult<Pair> {
    match group_tag(args.group) {
        Some(tag) => Ok(Pair::Half(
            generic_half(tag, m, args.spectra.det_x, rng)?,
            generic_half(tag, m, args.spectra.det_y, rng)?,
        )),
        None => Ok(Pair::Unitary(sample_unitary_spectrum(m, rng)?, sample_unitary_spectrum(m, rng)?)),
    }
}

/// (closed form, oracle, tail bound, |difference|, stated/oracle for type D)
fn evaluate(args: &VerifyArgs, pair: &Pair, z: f64) -> CliResult<(f64, f64, f64, f64, Option<f64>)> {
    let p = KernelParams::new(z)?;
    let policy = TruncationPolicy::auto(args.tol / 10.0);
    match pair {
        Pair::Half(x, y) => {
            let series = truncated_kernel(x, y, z, &policy)?;
            let (closed, ratio) = if x.group() == GroupTag::SoEven {
                let normalization = SoEvenNormalization::from_factor(args.normalization)?;
                let stated = kernel_so_even(x, y, &p, SoEvenNormalization::Stated)?;
                (kernel_so_even(x, y, &p, normalization)?, Some(stated / series.value))
            } else {
                (kernel(x, y, &p)?, None)
            };
            Ok((closed, series.value, series.tail_bound, (closed - series.value).abs(), ratio))
        }
        Pair::Unitary(x, y) => {
            let closed = kernel_unitary(x, y, &p, false)?;
            let series = truncated_kernel_unitary(x, y, z, false, &policy)?;
            Ok((closed.re, series.value.re, series.tail_bound, (closed - series.value).norm(), None))
        }
    }
}

pub fn run(args: &VerifyArgs, out: &mut impl Write) -> CliResult<i32> {
    let explicit = !args.spectra.angles_x.is_empty() || !args.spectra.angles_y.is_empty();
    let mut pairs: Vec<(usize, f64, usize, Pair)> = Vec::new();
    if explicit {
        let pair = match group_tag(args.group) {
            Some(tag) => {
                let (x, y) = half_pair(tag, &args.spectra)?;
                Pair::Half(x, y)
            }
            None => {
                let (x, y) = unitary_pair(&args.spectra)?;
                Pair::Unitary(x, y)
            }
        };
        let m = pair.angles().0.len();
        if args.m.iter().any(|&k| k != m) {
            return Err(CliError::usage(format!("--m disagrees with the {m} angles given")));
        }
        for &z in &args.z {
            let again = match &pair {
                Pair::Half(x, y) => Pair::Half(x.clone(), y.clone()),
                Pair::Unitary(x, y) => Pair::Unitary(x.clone(), y.clone()),
            };
            pairs.push((m, z, 0, again));
        }
    } else {
        let Some(count) = args.random else {
            return Err(CliError::usage("give --angles-x/--angles-y or --random N"));
        };
        let Some(seed) = args.seed else {
            return Err(CliError::usage("--random needs --seed"));
        };
        if args.m.is_empty() {
            return Err(CliError::usage("--random needs --m"));
        }
        for (cell, (m, z)) in args.m.iter().flat_map(|&m| args.z.iter().map(move |&z| (m, z))).enumerate() {
            if m == 0 {
                return Err(CliError::usage("--m must be at least 1"));
            }
            let mut rng = RngStream::new(seed, cell as u64).rng();
            for k in 0..count {
                pairs.push((m, z, k, random_pair(args, m, &mut rng)?));
            }
        }
    }

    let so_even = args.group == GroupArg::SoEven;
    let mut headers = vec!["group", "m", "z", "pair", "x", "y", "closed_form", "oracle", "tail_bound", "abs_diff"];
    if so_even {
        headers.push("fitted_ratio");
    }
    headers.push("status");
    let mut table = Table::new(&headers);
    let mut passed = 0;
    for (m, z, k, pair) in &pairs {
        let (ax, ay) = pair.angles();
        let (closed, oracle, tail, diff, ratio) =
            evaluate(args, pair, *z).map_err(|e| e.context(pair_context(ax, ay)))?;
        let ok = diff <= tail + args.tol;
        passed += usize::from(ok);
        let mut row = vec![
            text(args.group.name()),
            (*m).into(),
            num(*z),
            (*k).into(),
            angles(ax),
            angles(ay),
            num(closed),
            num(oracle),
            num(tail),
            num(diff),
        ];
        if so_even {
            row.push(num(ratio.unwrap_or(f64::NAN)));
        }
        row.push(text(if ok { "PASS" } else { "FAIL" }));
        table.push(row);
    }
    table.write(args.format, out)?;
    if args.format == Format::Text {
        writeln!(out, "{passed}/{} PASS at tol {:e}", pairs.len(), args.tol)?;
    }
    Ok(if passed == pairs.len() { 0 } else { EXIT_FAIL })
}
