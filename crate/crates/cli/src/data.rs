//! CSV sample files: rotations as `axis_x, axis_y, axis_z, angle, r11 … r33`,
//! half-spectra as `theta_1 … theta_m`, unitary spectra as `phi_1 … phi_n`.

use std::f64::consts::PI;
use std::io::{Read, Write};

use cauchy_core::uniformity::{bin_probabilities, haar_so3_angle_cdf, histogram};
use cauchy_core::{GroupTag, HalfSpectrum, Rotation3, UnitarySpectrum};

use crate::error::{CliError, CliResult};

pub const HIST_BINS: usize = 50;
const ENTRY_NAMES: [&str; 9] = ["r11", "r12", "r13", "r21", "r22", "r23", "r31", "r32", "r33"];

/// An in-memory sample of one of the three kinds.
pub enum Sample {
    Rotations(Vec<Rotation3>),
    Spectra(Vec<HalfSpectrum>),
    Unitary(Vec<UnitarySpectrum>),
}

impl Sample {
    pub fn len(&self) -> usize {
        match self {
            Sample::Rotations(v) => v.len(),
            Sample::Spectra(v) => v.len(),
            Sample::Unitary(v) => v.len(),
        }
    }

    pub fn write_csv(&self, out: impl Write) -> CliResult<()> {
        let mut w = csv::Writer::from_writer(out);
        match self {
            Sample::Rotations(rs) => {
                let mut header = vec!["axis_x", "axis_y", "axis_z", "angle"];
                header.extend(ENTRY_NAMES);
                w.write_record(&header)?;
                for r in rs {
                    let axis = r.axis();
                    let mut row = vec![axis.x, axis.y, axis.z, r.angle()];
                    row.extend(r.row_major());
                    w.write_record(row.iter().map(f64::to_string))?;
                }
            }
            Sample::Spectra(ss) => {
                let m = ss.first().map_or(0, HalfSpectrum::rank);
                w.write_record((1..=m).map(|i| format!("theta_{i}")))?;
                for s in ss {
                    w.write_record(s.angles().iter().map(f64::to_string))?;
                }
            }
            Sample::Unitary(us) => {
                let n = us.first().map_or(0, UnitarySpectrum::dim);
                w.write_record((1..=n).map(|i| format!("phi_{i}")))?;
                for u in us {
                    w.write_record(u.angles().iter().map(f64::to_string))?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    /// The angles binned by `--hist`, with the histogram range and, for
    /// rotations, the Haar reference CDF.
    fn histogram_input(&self) -> (Vec<f64>, f64, Option<fn(f64) -> f64>) {
        match self {
            Sample::Rotations(rs) => (rs.iter().map(Rotation3::angle).collect(), PI, Some(haar_so3_angle_cdf)),
            Sample::Spectra(ss) => (ss.iter().flat_map(|s| s.angles().to_vec()).collect(), PI, None),
            Sample::Unitary(us) => (us.iter().flat_map(|u| u.angles().to_vec()).collect(), 2.0 * PI, None),
        }
    }

    pub fn write_histogram(&self, out: impl Write) -> CliResult<()> {
        let (values, hi, cdf) = self.histogram_input();
        let counts = histogram(&values, HIST_BINS, 0.0, hi);
        let width = hi / HIST_BINS as f64;
        let total = values.len().max(1) as f64;
        let reference = cdf.map(|f| bin_probabilities(f, HIST_BINS, 0.0, hi));
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["bin_lo", "bin_hi", "count", "density", "haar_density"])?;
        for (k, c) in counts.iter().enumerate() {
            let lo = k as f64 * width;
            let haar = reference.as_ref().map_or(String::new(), |p| (p[k] / width).to_string());
            w.write_record([
                lo.to_string(),
                (lo + width).to_string(),
                c.to_string(),
                (*c as f64 / (total * width)).to_string(),
                haar,
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// What a test expects to find in its input file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleKind {
    Rotations,
    Spectra,
    Unitary,
}

fn row_error(row: usize, message: impl std::fmt::Display) -> CliError {
    CliError::data(format!("row {row}: {message}"))
}

/// Read a sample, reporting malformed rows by their 1-based data row number.
pub fn read_sample(input: impl Read, kind: SampleKind) -> CliResult<Sample> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h == name);
    let prefix = match kind {
        SampleKind::Rotations => None,
        SampleKind::Spectra => Some("theta_"),
        SampleKind::Unitary => Some("phi_"),
    };
    let columns: Vec<usize> = match prefix {
        None => ENTRY_NAMES
            .iter()
            .map(|n| find(n).ok_or_else(|| CliError::data(format!("missing column {n}"))))
            .collect::<CliResult<_>>()?,
        Some(p) => {
            let cols: Vec<usize> = (1..).map_while(|i| find(&format!("{p}{i}"))).collect();
            if cols.is_empty() {
                return Err(CliError::data(format!("no {p}1 column in header")));
            }
            cols
        }
    };

    let mut rotations = Vec::new();
    let mut spectra = Vec::new();
    let mut unitary = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let row = k + 1;
        let record = record.map_err(|e| row_error(row, e))?;
        let values = columns
            .iter()
            .map(|&c| {
                let field = record.get(c).ok_or_else(|| row_error(row, format!("missing field {}", headers[c].to_string())))?;
                let v: f64 = field.parse().map_err(|_| row_error(row, format!("{} = {field:?} is not a number", &headers[c])))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(row_error(row, format!("{} is not finite", &headers[c])))
                }
            })
            .collect::<CliResult<Vec<f64>>>()?;
        match kind {
            SampleKind::Rotations => {
                let entries: [f64; 9] = values.try_into().expect("nine columns");
                rotations.push(Rotation3::from_row_major(entries).map_err(|e| row_error(row, e))?);
            }
            SampleKind::Spectra => {
                spectra.push(HalfSpectrum::new(GroupTag::SoOdd, values).map_err(|e| row_error(row, e))?);
            }
            SampleKind::Unitary => unitary.push(UnitarySpectrum::new(values).map_err(|e| row_error(row, e))?),
        }
    }
    let sample = match kind {
        SampleKind::Rotations => Sample::Rotations(rotations),
        SampleKind::Spectra => Sample::Spectra(spectra),
        SampleKind::Unitary => Sample::Unitary(unitary),
    };
    if sample.len() == 0 {
        return Err(CliError::data("input has no data rows"));
    }
    Ok(sample)
}
