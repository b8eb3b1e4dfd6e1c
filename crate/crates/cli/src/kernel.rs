use std::io::Write;

use cauchy_core::kernels::{
    kernel, kernel_derivative_so_odd_with, kernel_so_even, kernel_unitary, limit_kernel_so_odd, DerivativeOptions,
};
use cauchy_core::oracle::{truncated_kernel, truncated_kernel_unitary, TruncationPolicy};
use cauchy_core::{GroupTag, KernelParams, SoEvenNormalization};

use crate::args::{KernelArgs, LimitArgs};
use crate::error::{CliError, CliResult};
use crate::spectra::{group_tag, half_pair, pair_context, unitary_pair};
use crate::table::{num, text, Table};

pub fn run_kernel(args: &KernelArgs, out: &mut impl Write) -> CliResult<i32> {
    let p = KernelParams::new(args.z)?;
    let context = pair_context(&args.spectra.angles_x, &args.spectra.angles_y);
    let policy = TruncationPolicy::auto(args.tol);
    let mut headers = vec!["group", "z", "value"];
    let mut row = vec![text(args.group.name()), num(args.z)];
    match group_tag(args.group) {
        Some(tag) => {
            let (x, y) = half_pair(tag, &args.spectra)?;
            let value = if tag == GroupTag::SoEven {
                kernel_so_even(&x, &y, &p, SoEvenNormalization::from_factor(args.normalization)?)
            } else {
                kernel(&x, &y, &p)
            }
            .map_err(|e| CliError::from(e).context(&context))?;
            row.push(num(value));
            if args.check {
                let series = truncated_kernel(&x, &y, args.z, &policy).map_err(|e| CliError::from(e).context(&context))?;
                headers.extend(["oracle", "tail_bound", "abs_diff"]);
                row.extend([num(series.value), num(series.tail_bound), num((value - series.value).abs())]);
            }
        }
        None => {
            let (x, y) = unitary_pair(&args.spectra)?;
            let value = kernel_unitary(&x, &y, &p, args.conjugate)?;
            headers.push("value_im");
            row.extend([num(value.re), num(value.im)]);
            if args.check {
                let series = truncated_kernel_unitary(&x, &y, args.z, args.conjugate, &policy)?;
                headers.extend(["oracle", "oracle_im", "tail_bound", "abs_diff"]);
                row.extend([
                    num(series.value.re),
                    num(series.value.im),
                    num(series.tail_bound),
                    num((value - series.value).norm()),
                ]);
            }
        }
    }
    let mut table = Table::new(&headers);
    table.push(row);
    table.write(args.format, out)?;
    Ok(0)
}

pub fn run_limit(args: &LimitArgs, out: &mut impl Write) -> CliResult<i32> {
    let (x, y) = half_pair(GroupTag::SoOdd, &args.spectra)?;
    let context = pair_context(x.angles(), y.angles());
    let value = limit_kernel_so_odd(&x, &y, args.tol).map_err(|e| CliError::from(e).context(&context))?;
    let mut table = Table::new(&["z", "value", "error_estimate"]);
    if args.check {
        let m = x.rank();
        let factorial: f64 = (1..=m).map(|k| k as f64).product();
        let opts = DerivativeOptions { rel_tol: 1e-4, ..DerivativeOptions::default() };
        for z in [0.99, 0.999] {
            let est = kernel_derivative_so_odd_with(&x, &y, z, m, &opts)?;
            table.push(vec![num(z), num(est.value / factorial), num(est.error / factorial)]);
        }
    }
    table.push(vec![text("limit"), num(value), serde_json::Value::Null]);
    table.write(args.format, out)?;
    Ok(0)
}
