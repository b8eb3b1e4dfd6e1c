use cauchy_core::{GroupTag, HalfSpectrum, UnitarySpectrum};

use crate::args::{GroupArg, SpectrumArgs};
use crate::error::{CliError, CliResult};

pub fn group_tag(group: GroupArg) -> Option<GroupTag> {
    match group {
        GroupArg::SoOdd => Some(GroupTag::SoOdd),
        GroupArg::OOdd => Some(GroupTag::OOdd),
        GroupArg::Sp => Some(GroupTag::Sp),
        GroupArg::SoEven => Some(GroupTag::SoEven),
        GroupArg::Unitary => None,
    }
}

fn check_lengths(args: &SpectrumArgs) -> CliResult<usize> {
    let (nx, ny) = (args.angles_x.len(), args.angles_y.len());
    if nx == 0 || ny == 0 {
        return Err(CliError::usage("both --angles-x and --angles-y are required"));
    }
    if nx != ny {
        return Err(CliError::usage(format!("--angles-x has {nx} angles but --angles-y has {ny}")));
    }
    Ok(nx)
}

fn echo(name: &str, angles: &[f64]) -> String {
    let list: Vec<String> = angles.iter().map(f64::to_string).collect();
    format!("{name} = ({})", list.join(", "))
}

pub fn build_half(tag: GroupTag, angles: &[f64], det: i8, name: &str) -> CliResult<HalfSpectrum> {
    let s = if tag == GroupTag::OOdd {
        HalfSpectrum::o_odd(angles, det)
    } else {
        HalfSpectrum::new(tag, angles)
    };
    s.map_err(|e| CliError::from(e).context(echo(name, angles)))
}

pub fn half_pair(tag: GroupTag, args: &SpectrumArgs) -> CliResult<(HalfSpectrum, HalfSpectrum)> {
    check_lengths(args)?;
    Ok((
        build_half(tag, &args.angles_x, args.det_x, "x")?,
        build_half(tag, &args.angles_y, args.det_y, "y")?,
    ))
}

pub fn unitary_pair(args: &SpectrumArgs) -> CliResult<(UnitarySpectrum, UnitarySpectrum)> {
    check_lengths(args)?;
    Ok((UnitarySpectrum::new(args.angles_x.clone())?, UnitarySpectrum::new(args.angles_y.clone())?))
}

/// Attach both spectra to a kernel evaluation error.
pub fn pair_context(x: &[f64], y: &[f64]) -> String {
    format!("{}, {}", echo("x", x), echo("y", y))
}
