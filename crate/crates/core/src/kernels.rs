//! Closed-form Cauchy kernels `Σ_λ z^{|λ|} χ_λ(g) χ_λ(h)` for the unitary,
//! orthogonal and symplectic groups.
//!
//! Every kernel on a rank-`m` half-spectrum has the shape
//!
//! ```text
//!   prefactor(z) · det(M(z)) / (z^{C(m,2)} · V(x) · V(y)),   V(x) = Π_{i<j} (2cos θ_i − 2cos θ_j)
//! ```
//!
//! and the four pole factors `(1 − z x^{±1} y^{±1})` are multiplied out into
//! the real quadratics `1 − 2z cos(θ ± θ') + z²`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::findiff::{self, Estimate};
use crate::linalg::det_from_fn;
use crate::oracle::{self, TruncationPolicy};
use crate::partitions::pairs;
use crate::spectrum::{GroupTag, HalfSpectrum, UnitarySpectrum};

pub const DEFAULT_DEGENERACY_TOLERANCE: f64 = 1e-8;

/// Below this `z`, ranks `m ≥ 2` are evaluated by the series instead of the
/// closed form, which is `0/0` at `z = 0`.
pub const SERIES_FALLBACK_Z: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    z: f64,
    degeneracy_tolerance: f64,
}

impl KernelParams {
    /// `z` must lie in `[0, 1)`; `z = 0` is the limit returning the `λ = ()` term.
    pub fn new(z: f64) -> Result<Self> {
        Self::with_tolerance(z, DEFAULT_DEGENERACY_TOLERANCE)
    }

    pub fn with_tolerance(z: f64, degeneracy_tolerance: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&z) {
            return Err(Error::InvalidParameter(format!("z must lie in [0, 1), got {z}")));
        }
        if !(degeneracy_tolerance > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "degeneracy tolerance must be positive, got {degeneracy_tolerance}"
            )));
        }
        Ok(Self { z, degeneracy_tolerance })
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn degeneracy_tolerance(&self) -> f64 {
        self.degeneracy_tolerance
    }
}

/// Constant in front of the type D kernel.
///
/// The printed closed form divides by the Vandermonde products, but the
/// cosine Weyl denominator `det(x^{m-i} + x^{-(m-i)})` equals twice the
/// Vandermonde product (its last row is all 2s). The stated form therefore
/// equals four times the `χ`-series; `SeriesMatched` removes that factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SoEvenNormalization {
    /// Factor 1: the determinant ratio exactly as stated.
    Stated,
    /// Factor ¼: equals `Σ_λ z^{|λ|} χ_λ(g) χ_λ(h)`.
    #[default]
    SeriesMatched,
}

impl SoEvenNormalization {
    pub fn factor(self) -> f64 {
        match self {
            SoEvenNormalization::Stated => 1.0,
            SoEvenNormalization::SeriesMatched => 0.25,
        }
    }

    pub fn from_factor(factor: f64) -> Result<Self> {
        if factor == 1.0 {
            Ok(SoEvenNormalization::Stated)
        } else if factor == 0.25 {
            Ok(SoEvenNormalization::SeriesMatched)
        } else {
            Err(Error::InvalidParameter(format!(
                "type D normalization must be 1 or 0.25, got {factor}"
            )))
        }
    }
}

/// `Π_{i,j} 1 / (1 − z α_i β_j)`, with `β` conjugated when `conjugate_second`
/// is set (the form pairing `χ_λ(g)` with `conj(χ_λ(h))`).
pub fn kernel_unitary(
    a: &UnitarySpectrum,
    b: &UnitarySpectrum,
    p: &KernelParams,
    conjugate_second: bool,
) -> Result<Complex64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let z = p.z();
    let sign = if conjugate_second { -1.0 } else { 1.0 };
    let mut prod = Complex64::new(1.0, 0.0);
    for &phi in a.angles() {
        for &psi in b.angles() {
            prod *= Complex64::new(1.0, 0.0) - Complex64::from_polar(z, phi + sign * psi);
        }
    }
    Ok(prod.inv())
}

/// `(1 − z x y)(1 − z x⁻¹ y⁻¹)(1 − z x⁻¹ y)(1 − z x y⁻¹)` for `x = e^{iθ}`, `y = e^{iθ'}`.
#[inline]
fn pole_product(theta: f64, theta_p: f64, z: f64) -> f64 {
    let zz = 1.0 + z * z;
    (zz - 2.0 * z * (theta + theta_p).cos()) * (zz - 2.0 * z * (theta - theta_p).cos())
}

/// `Π_{i<j} (2cos θ_i − 2cos θ_j)`, rejecting spectra whose cosines nearly coincide.
fn vandermonde(s: &HalfSpectrum, tol: f64) -> Result<f64> {
    let c = s.traces();
    let mut v = 1.0;
    for i in 0..c.len() {
        for j in i + 1..c.len() {
            let d = c[i] - c[j];
            if d.abs() < 2.0 * tol {
                return Err(Error::DegenerateSpectrum(format!(
                    "cos θ_{} and cos θ_{} differ by {:e} in {} angles {:?}",
                    i + 1,
                    j + 1,
                    d.abs() / 2.0,
                    s.group(),
                    s.angles()
                )));
            }
            v *= d;
        }
    }
    Ok(v)
}

fn check_pair(x: &HalfSpectrum, y: &HalfSpectrum, group: GroupTag) -> Result<()> {
    for s in [x, y] {
        if s.group() != group {
            return Err(Error::GroupMismatch {
                expected: group.to_string(),
                got: s.group().to_string(),
            });
        }
    }
    if x.rank() != y.rank() {
        return Err(Error::DimensionMismatch(x.rank(), y.rank()));
    }
    Ok(())
}

/// `prefactor · det(entry) / (V(x) V(y))`, without the `z^{C(m,2)}` factor.
fn scaled_closed_form(
    x: &HalfSpectrum,
    y: &HalfSpectrum,
    tol: f64,
    prefactor: f64,
    entry: impl Fn(f64, f64) -> f64,
) -> Result<f64> {
    let vx = vandermonde(x, tol)?;
    let vy = vandermonde(y, tol)?;
    let (ax, ay) = (x.angles(), y.angles());
    let det: f64 = det_from_fn(x.rank(), |i, j| entry(ax[i], ay[j]));
    Ok(prefactor * det / (vx * vy))
}

fn divide_by_z_power(value: f64, z: f64, m: usize) -> f64 {
    value / z.powi(pairs(m) as i32)
}

fn needs_series(m: usize, z: f64) -> bool {
    m >= 2 && z < SERIES_FALLBACK_Z
}

fn series_fallback(x: &HalfSpectrum, y: &HalfSpectrum, p: &KernelParams) -> Result<f64> {
    // Both spectra must still be non-degenerate in the kernel's sense.
    vandermonde(x, p.degeneracy_tolerance())?;
    vandermonde(y, p.degeneracy_tolerance())?;
    let policy = TruncationPolicy::auto(1e-15);
    Ok(oracle::truncated_kernel(x, y, p.z(), &policy)?.value)
}

fn so_odd_entry(z: f64) -> impl Fn(f64, f64) -> f64 {
    move |a, b| {
        let num = (1.0 + z) * (1.0 + z) + z * (2.0 * a.cos() + 2.0 * b.cos());
        num / pole_product(a, b, z)
    }
}

/// `z^{C(m,2)}` times the `SO(2m+1)` kernel: `(1−z)^m det C / (V(x) V(y))`.
/// Well defined at `z = 0`, and the function differentiated in the `z → 1`
/// analysis.
pub fn scaled_kernel_so_odd(x: &HalfSpectrum, y: &HalfSpectrum, z: f64, tol: f64) -> Result<f64> {
    check_pair(x, y, GroupTag::SoOdd)?;
    let m = x.rank();
    scaled_closed_form(x, y, tol, (1.0 - z).powi(m as i32), so_odd_entry(z))
}

/// Cauchy kernel of `SO(2m+1)`.
pub fn kernel_so_odd(x: &HalfSpectrum, y: &HalfSpectrum, p: &KernelParams) -> Result<f64> {
    check_pair(x, y, GroupTag::SoOdd)?;
    let (m, z) = (x.rank(), p.z());
    if needs_series(m, z) {
        return series_fallback(x, y, p);
    }
    let scaled = scaled_kernel_so_odd(x, y, z, p.degeneracy_tolerance())?;
    Ok(divide_by_z_power(scaled, z, m))
}

/// Cauchy kernel of `O(2m+1)`; the spectra carry `det(g)` and `det(h)`.
pub fn kernel_o_odd(x: &HalfSpectrum, y: &HalfSpectrum, p: &KernelParams) -> Result<f64> {
    check_pair(x, y, GroupTag::OOdd)?;
    let (m, z) = (x.rank(), p.z());
    if needs_series(m, z) {
        return series_fallback(x, y, p);
    }
    let det_g = f64::from(x.det_sign());
    let det_h = f64::from(y.det_sign());
    let d = det_g * det_h;
    let prefactor = (1.0 - d * z).powi(m as i32);
    let entry = move |a: f64, b: f64| {
        let num = (1.0 + d * z).powi(2) + z * (det_h * 2.0 * a.cos() + det_g * 2.0 * b.cos());
        num / pole_product(a, b, z)
    };
    let scaled = scaled_closed_form(x, y, p.degeneracy_tolerance(), prefactor, entry)?;
    Ok(divide_by_z_power(scaled, z, m))
}

/// Cauchy kernel of `Sp(2m)`.
pub fn kernel_sp(x: &HalfSpectrum, y: &HalfSpectrum, p: &KernelParams) -> Result<f64> {
    check_pair(x, y, GroupTag::Sp)?;
    let (m, z) = (x.rank(), p.z());
    if needs_series(m, z) {
        return series_fallback(x, y, p);
    }
    let prefactor = (1.0 - z * z).powi(m as i32);
    let scaled = scaled_closed_form(x, y, p.degeneracy_tolerance(), prefactor, |a, b| {
        1.0 / pole_product(a, b, z)
    })?;
    Ok(divide_by_z_power(scaled, z, m))
}

/// Cauchy kernel of `SO(2m)` for the characters `χ_λ`, scaled by `normalization`.
pub fn kernel_so_even(
    x: &HalfSpectrum,
    y: &HalfSpectrum,
    p: &KernelParams,
    normalization: SoEvenNormalization,
) -> Result<f64> {
    check_pair(x, y, GroupTag::SoEven)?;
    let (m, z) = (x.rank(), p.z());
    if needs_series(m, z) {
        // The series is the ¼-normalized quantity.
        return Ok(series_fallback(x, y, p)? * normalization.factor() / 0.25);
    }
    let zz = 1.0 + z * z;
    let entry = move |a: f64, b: f64| {
        let (cp, cm) = ((a + b).cos(), (a - b).cos());
        (2.0 - 2.0 * z * cp) / (zz - 2.0 * z * cp) + (2.0 - 2.0 * z * cm) / (zz - 2.0 * z * cm)
    };
    let scaled = scaled_closed_form(x, y, p.degeneracy_tolerance(), normalization.factor(), entry)?;
    Ok(divide_by_z_power(scaled, z, m))
}

/// Dispatch on the spectra's group tag (type D uses the series-matched normalization).
pub fn kernel(x: &HalfSpectrum, y: &HalfSpectrum, p: &KernelParams) -> Result<f64> {
    match x.group() {
        GroupTag::SoOdd => kernel_so_odd(x, y, p),
        GroupTag::OOdd => kernel_o_odd(x, y, p),
        GroupTag::Sp => kernel_sp(x, y, p),
        GroupTag::SoEven => kernel_so_even(x, y, p, SoEvenNormalization::SeriesMatched),
    }
}

/// The `z → 1` limit of the `m`-times differentiated `SO(2m+1)` identity,
/// divided by `m!`:
///
/// `(−1)^m det((u_i + v_j)/(u_i − v_j)²) / (Π_{i<j}(u_i − u_j) Π_{i<j}(v_i − v_j))`
/// with `u_i = 2cos θ^x_i + 2`, `v_j = 2cos θ^y_j + 2`.
///
/// `tol` bounds every gap `|u_i − u_j|`, `|v_i − v_j|` and `|u_i − v_j|` from
/// below; the last one excludes eigenvalues shared between `g` and `h`.
pub fn limit_kernel_so_odd(x: &HalfSpectrum, y: &HalfSpectrum, tol: f64) -> Result<f64> {
    check_pair(x, y, GroupTag::SoOdd)?;
    let m = x.rank();
    let u: Vec<f64> = x.traces().iter().map(|c| c + 2.0).collect();
    let v: Vec<f64> = y.traces().iter().map(|c| c + 2.0).collect();
    for (i, ui) in u.iter().enumerate() {
        for (j, vj) in v.iter().enumerate() {
            if (ui - vj).abs() < tol {
                return Err(Error::DegenerateSpectrum(format!(
                    "g and h share an eigenvalue: θ^x_{} = {} vs θ^y_{} = {}",
                    i + 1,
                    x.angles()[i],
                    j + 1,
                    y.angles()[j]
                )));
            }
        }
    }
    let vx = vandermonde(x, tol / 2.0)?;
    let vy = vandermonde(y, tol / 2.0)?;
    let det: f64 = det_from_fn(m, |i, j| (u[i] + v[j]) / (u[i] - v[j]).powi(2));
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * det / (vx * vy))
}

/// Settings for [`kernel_derivative_so_odd_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeOptions {
    /// Requested relative accuracy of the derivative.
    pub rel_tol: f64,
    /// Largest initial step.
    pub max_step: f64,
    /// Number of step halvings in the Richardson tableau.
    pub levels: usize,
}

impl Default for DerivativeOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-7, max_step: 0.05, levels: 8 }
    }
}

/// `d^order/dz^order [(1−z)^m det C(z)] / (V(x) V(y))` at `z`, by fourth-order
/// central differences with Richardson extrapolation.
pub fn kernel_derivative_so_odd(x: &HalfSpectrum, y: &HalfSpectrum, z: f64, order: usize) -> Result<Estimate> {
    kernel_derivative_so_odd_with(x, y, z, order, &DerivativeOptions::default())
}

pub fn kernel_derivative_so_odd_with(
    x: &HalfSpectrum,
    y: &HalfSpectrum,
    z: f64,
    order: usize,
    opts: &DerivativeOptions,
) -> Result<Estimate> {
    if order == 0 || order > 8 {
        return Err(Error::InvalidParameter(format!("derivative order must be in 1..=8, got {order}")));
    }
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::InvalidParameter(format!("z must lie in (0, 1), got {z}")));
    }
    let tol = DEFAULT_DEGENERACY_TOLERANCE;
    // Validate once so the closure below cannot fail on the spectra.
    scaled_kernel_so_odd(x, y, z, tol)?;
    let margin = z.min(1.0 - z);
    let h0 = (margin / 10.0).min(opts.max_step);
    if h0 < 1e-7 {
        return Err(Error::StepUnderflow {
            z,
            reason: format!("admissible step {h0:e} is too small"),
        });
    }
    let f = |t: f64| scaled_kernel_so_odd(x, y, t, tol).unwrap_or(f64::NAN);
    let est = findiff::richardson_derivative(f, z, order, h0, opts.levels);
    if !est.value.is_finite() || est.error > opts.rel_tol * est.value.abs() + 1e-14 {
        return Err(Error::StepUnderflow {
            z,
            reason: format!(
                "estimated error {:e} exceeds requested relative accuracy {:e} (value {:e})",
                est.error, opts.rel_tol, est.value
            ),
        });
    }
    Ok(est)
}

/// `lim_{z→1} kernel_derivative_so_odd(order m) / m!`, obtained by
/// extrapolating finite-difference derivatives at `z = 1 − d`, `d = 0.04·2^{-k}`.
/// Independent of the closed-form limit in [`limit_kernel_so_odd`].
pub fn finite_difference_limit_so_odd(x: &HalfSpectrum, y: &HalfSpectrum) -> Result<Estimate> {
    check_pair(x, y, GroupTag::SoOdd)?;
    let m = x.rank();
    let factorial: f64 = (1..=m).map(|k| k as f64).product();
    let opts = DerivativeOptions { rel_tol: 1e-4, ..DerivativeOptions::default() };
    let mut first_error = None;
    let est = findiff::extrapolate_to_zero(
        |d| match kernel_derivative_so_odd_with(x, y, 1.0 - d, m, &opts) {
            Ok(e) => Some(e.value / factorial),
            Err(e) => {
                first_error.get_or_insert(e);
                None
            }
        },
        0.04,
        4,
    );
    match (est, first_error) {
        (Some(e), _) => Ok(e),
        (None, Some(err)) => Err(err),
        (None, None) => Err(Error::StepUnderflow { z: 1.0, reason: "extrapolation failed".into() }),
    }
}
