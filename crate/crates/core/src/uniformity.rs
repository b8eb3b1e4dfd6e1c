//! Goodness-of-fit statistics for uniformity on a compact group, their
//! p-values, and the distributional diagnostics used to check samplers.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::kernels::{kernel_so_odd, kernel_unitary, KernelParams};
use crate::oracle::{truncated_kernel, TruncationPolicy};
use crate::parallel::{map_indexed, try_map_indexed};
use crate::sampling::{sample_haar_so3, sample_haar_spectrum, sample_unitary_spectrum, Rotation3, RngStream};
use crate::spectrum::{GroupTag, HalfSpectrum, UnitarySpectrum};
use crate::sum::order_independent_sum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PValueMethod {
    Asymptotic,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub statistic: f64,
    pub p_value: f64,
    pub method: PValueMethod,
    pub n_obs: usize,
    /// Zero for asymptotic p-values.
    pub n_sims: usize,
    pub seed: RngStream,
    pub elapsed_ms: f64,
}

/// Whether the `i = j` terms enter the double sums. The default keeps them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DiagonalTerms {
    #[default]
    Included,
    /// Off-diagonal terms only, still divided by `N²`.
    Excluded,
}

/// `T_R = 3N tr(X̄ᵀX̄)` with `X̄` the entrywise mean of the sample.
pub fn rayleigh_statistic(sample: &[Rotation3]) -> Result<f64> {
    let mean = mean_matrix(sample)?;
    Ok(3.0 * sample.len() as f64 * mean.norm_squared())
}

/// Survival function of `χ²₉`, the null limit of `T_R`.
pub fn rayleigh_asymptotic_pvalue(t: f64) -> f64 {
    chi_square_sf(t, 9.0)
}

fn chi_square_sf(t: f64, df: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    ChiSquared::new(df).expect("positive degrees of freedom").sf(t)
}

/// `(1 + #{simulated ≥ observed}) / (n_sims + 1)`.
pub fn add_one_pvalue(observed: f64, simulated: &[f64]) -> f64 {
    let exceed = simulated.iter().filter(|&&s| s >= observed).count();
    (1 + exceed) as f64 / (simulated.len() + 1) as f64
}

/// p-value of an observed `T_R`. Monte Carlo simulates `n_sims` Haar samples
/// of size `n_obs`, replication `r` drawing from `stream.offset(1 + r)`.
pub fn rayleigh_pvalue(
    t: f64,
    method: PValueMethod,
    n_obs: usize,
    n_sims: usize,
    stream: RngStream,
) -> Result<TestReport> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("Rayleigh statistic must be non-negative, got {t}")));
    }
    match method {
        PValueMethod::Asymptotic => {
            let start = Instant::now();
            Ok(TestReport {
                statistic: t,
                p_value: rayleigh_asymptotic_pvalue(t),
                method,
                n_obs,
                n_sims: 0,
                seed: stream,
                elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
            })
        }
        PValueMethod::MonteCarlo => mc_pvalue(&StatisticKind::Rayleigh, t, n_obs, n_sims, stream),
    }
}

/// Lexicographic order on angle bit patterns, used to evaluate each unordered
/// pair with its arguments in a fixed order.
fn angle_order(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or_else(|| a.len().cmp(&b.len()))
}

/// `(1/N²) Σ_{i,j} (K(x_i, x_j) − 1)` over canonical pairs `i ≤ j`, the
/// off-diagonal ones counted twice. Each pair value is computed with its
/// arguments in [`angle_order`], and the terms are summed with
/// [`order_independent_sum`], so the result does not depend on the order of
/// the observations.
fn pair_statistic<S, F>(
    items: &[S],
    angles: impl Fn(&S) -> &[f64] + Sync,
    diagonal: DiagonalTerms,
    kernel: F,
) -> Result<f64>
where
    S: Sync,
    F: Fn(&S, &S) -> Result<f64> + Sync,
{
    let n = items.len();
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let rows = try_map_indexed(n, |i| {
        let mut row = Vec::with_capacity(n - i);
        for j in i..n {
            if i == j && diagonal == DiagonalTerms::Excluded {
                continue;
            }
            let (a, b) = match angle_order(angles(&items[i]), angles(&items[j])) {
                Ordering::Greater => (&items[j], &items[i]),
                _ => (&items[i], &items[j]),
            };
            let k = kernel(a, b).map_err(|e| match e {
                Error::DegenerateSpectrum(msg) => {
                    Error::DegenerateSpectrum(format!("observation pair ({i}, {j}): {msg}"))
                }
                other => other,
            })?;
            let term = k - 1.0;
            row.push(if i == j { term } else { 2.0 * term });
        }
        Ok(row)
    })?;
    let mut terms: Vec<f64> = rows.into_iter().flatten().collect();
    Ok(order_independent_sum(&mut terms) / (n * n) as f64)
}

fn check_so_odd_sample(spectra: &[HalfSpectrum]) -> Result<()> {
    let Some(first) = spectra.first() else {
        return Err(Error::EmptySample);
    };
    for s in spectra {
        if s.group() != GroupTag::SoOdd {
            return Err(Error::GroupMismatch { expected: GroupTag::SoOdd.to_string(), got: s.group().to_string() });
        }
        if s.rank() != first.rank() {
            return Err(Error::DimensionMismatch(first.rank(), s.rank()));
        }
    }
    Ok(())
}

/// `S_N^z = (1/N²) Σ_{i,j} (K_z(x_i, x_j) − 1)` for `SO(2m+1)` half-spectra.
pub fn sobolev_statistic_so_odd(spectra: &[HalfSpectrum], p: &KernelParams) -> Result<f64> {
    sobolev_statistic_so_odd_with(spectra, p, DiagonalTerms::Included)
}

pub fn sobolev_statistic_so_odd_with(
    spectra: &[HalfSpectrum],
    p: &KernelParams,
    diagonal: DiagonalTerms,
) -> Result<f64> {
    check_so_odd_sample(spectra)?;
    pair_statistic(spectra, HalfSpectrum::angles, diagonal, |a, b| kernel_so_odd(a, b, p))
}

fn check_unitary_sample(spectra: &[UnitarySpectrum]) -> Result<()> {
    let Some(first) = spectra.first() else {
        return Err(Error::EmptySample);
    };
    match spectra.iter().find(|s| s.dim() != first.dim()) {
        Some(s) => Err(Error::DimensionMismatch(first.dim(), s.dim())),
        None => Ok(()),
    }
}

/// `T_N^z = (1/N²) Σ_{i,j} (Π_{k,l} 1/(1 − z α^i_k conj(α^j_l)) − 1)`, the
/// `z^{|λ|}`-weighted sum of `|N⁻¹ Σ_i s_λ(x_i)|²` over non-empty partitions
/// with at most `n` parts. Returned as the real part.
pub fn sobolev_statistic_unitary(spectra: &[UnitarySpectrum], p: &KernelParams) -> Result<f64> {
    sobolev_statistic_unitary_with(spectra, p, DiagonalTerms::Included)
}

pub fn sobolev_statistic_unitary_with(
    spectra: &[UnitarySpectrum],
    p: &KernelParams,
    diagonal: DiagonalTerms,
) -> Result<f64> {
    check_unitary_sample(spectra)?;
    pair_statistic(spectra, UnitarySpectrum::angles, diagonal, |a, b| {
        Ok(kernel_unitary(a, b, p, true)?.re)
    })
}

/// Compare the closed form against the truncated series on the first
/// `pairs` canonical pairs `(i, j)`, `i ≤ j`, and return the largest
/// deviation in excess of the series tail bound (zero when all agree).
pub fn spot_check_so_odd(spectra: &[HalfSpectrum], p: &KernelParams, pairs: usize, tolerance: f64) -> Result<f64> {
    check_so_odd_sample(spectra)?;
    let n = spectra.len();
    let chosen: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).take(pairs).collect();
    let policy = TruncationPolicy::auto(tolerance);
    let excess = try_map_indexed(chosen.len(), |k| {
        let (i, j) = chosen[k];
        let closed = kernel_so_odd(&spectra[i], &spectra[j], p)?;
        let series = truncated_kernel(&spectra[i], &spectra[j], p.z(), &policy)?;
        Ok::<_, Error>(((closed - series.value).abs() - series.tail_bound).max(0.0))
    })?;
    Ok(excess.into_iter().fold(0.0, f64::max))
}

/// A statistic together with the Haar null it is simulated under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StatisticKind {
    /// `T_R` on `SO(3)`.
    Rayleigh,
    /// `S_N^z` on `SO(2m+1)` half-spectra.
    SobolevSoOdd { m: usize, params: KernelParams },
    /// `T_N^z` on `U(n)` spectra.
    SobolevUnitary { n: usize, params: KernelParams },
}

impl StatisticKind {
    /// Draw a Haar sample of size `n_obs` from `stream` and evaluate the statistic.
    pub fn simulate_null(&self, n_obs: usize, stream: RngStream) -> Result<f64> {
        let mut rng = stream.rng();
        match self {
            StatisticKind::Rayleigh => {
                let sample: Vec<Rotation3> = (0..n_obs).map(|_| sample_haar_so3(&mut rng)).collect();
                rayleigh_statistic(&sample)
            }
            StatisticKind::SobolevSoOdd { m, params } => {
                let sample = (0..n_obs)
                    .map(|_| sample_haar_spectrum(GroupTag::SoOdd, *m, &mut rng))
                    .collect::<Result<Vec<_>>>()?;
                sobolev_statistic_so_odd(&sample, params)
            }
            StatisticKind::SobolevUnitary { n, params } => {
                let sample = (0..n_obs)
                    .map(|_| sample_unitary_spectrum(*n, &mut rng))
                    .collect::<Result<Vec<_>>>()?;
                sobolev_statistic_unitary(&sample, params)
            }
        }
    }
}

/// The `n_sims` null statistics, replication `r` drawn from `stream.offset(1 + r)`.
/// Stream offset 0 is left to the observed sample.
pub fn simulate_null(kind: &StatisticKind, n_obs: usize, n_sims: usize, stream: RngStream) -> Result<Vec<f64>> {
    try_map_indexed(n_sims, |r| kind.simulate_null(n_obs, stream.offset(1 + r as u64)))
}

/// Add-one Monte Carlo p-value of `observed` under the Haar null.
pub fn mc_pvalue(
    kind: &StatisticKind,
    observed: f64,
    n_obs: usize,
    n_sims: usize,
    stream: RngStream,
) -> Result<TestReport> {
    if n_sims == 0 {
        return Err(Error::InvalidMethodParams("Monte Carlo p-value needs n_sims ≥ 1".into()));
    }
    if n_obs == 0 {
        return Err(Error::EmptySample);
    }
    let start = Instant::now();
    let simulated = simulate_null(kind, n_obs, n_sims, stream)?;
    Ok(TestReport {
        statistic: observed,
        p_value: add_one_pvalue(observed, &simulated),
        method: PValueMethod::MonteCarlo,
        n_obs,
        n_sims,
        seed: stream,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Rotation angles of a sample.
pub fn rotation_angles(sample: &[Rotation3]) -> Vec<f64> {
    map_indexed(sample.len(), |i| sample[i].angle())
}

/// CDF `(θ − sin θ)/π` of the rotation angle of a Haar element of `SO(3)`.
pub fn haar_so3_angle_cdf(theta: f64) -> f64 {
    let t = theta.clamp(0.0, PI);
    (t - t.sin()) / PI
}

/// Equal-width histogram on `[lo, hi]`; the right edge falls in the last bin
/// and values outside the range are dropped.
pub fn histogram(values: &[f64], bins: usize, lo: f64, hi: f64) -> Vec<u64> {
    let mut counts = vec![0u64; bins];
    if bins == 0 {
        return counts;
    }
    let width = (hi - lo) / bins as f64;
    for &v in values {
        if !(v >= lo && v <= hi) {
            continue;
        }
        let k = (((v - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    counts
}

/// Expected bin probabilities of a distribution with CDF `cdf` for the
/// equal-width bins of [`histogram`].
pub fn bin_probabilities(cdf: impl Fn(f64) -> f64, bins: usize, lo: f64, hi: f64) -> Vec<f64> {
    let width = (hi - lo) / bins as f64;
    (0..bins)
        .map(|k| cdf(lo + (k + 1) as f64 * width) - cdf(lo + k as f64 * width))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GofResult {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

/// Pearson chi-square test of `observed` counts against bin probabilities.
pub fn chi_square_gof(observed: &[u64], probabilities: &[f64]) -> Result<GofResult> {
    if observed.len() != probabilities.len() {
        return Err(Error::DimensionMismatch(observed.len(), probabilities.len()));
    }
    if observed.len() < 2 {
        return Err(Error::InvalidParameter("chi-square test needs at least two bins".into()));
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(Error::EmptySample);
    }
    let mut statistic = 0.0;
    for (&o, &p) in observed.iter().zip(probabilities) {
        let e = p * total as f64;
        if !(e > 0.0) {
            return Err(Error::InvalidParameter(format!("bin with expected count {e}")));
        }
        statistic += (o as f64 - e).powi(2) / e;
    }
    let degrees_of_freedom = observed.len() - 1;
    Ok(GofResult {
        statistic,
        degrees_of_freedom,
        p_value: chi_square_sf(statistic, degrees_of_freedom as f64),
    })
}

/// Kolmogorov-Smirnov distance `sup |F_N − F|` of a sample to `cdf`.
pub fn ks_distance(values: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let d = sorted.iter().enumerate().fold(0.0_f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    });
    Ok(d)
}

/// Distance of a sample to the uniform law on `[0, 1]`.
pub fn ks_distance_uniform(values: &[f64]) -> Result<f64> {
    ks_distance(values, |x| x.clamp(0.0, 1.0))
}

/// Asymptotic Kolmogorov p-value for a distance `d` from `n` observations,
/// with the Stephens small-sample correction.
pub fn ks_pvalue(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Entrywise sample mean `X̄`, each entry summed independently of the sample order.
pub fn mean_matrix(sample: &[Rotation3]) -> Result<Matrix3<f64>> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = sample.len() as f64;
    let mut column = vec![0.0; sample.len()];
    let mut out = [0.0; 9];
    for (k, slot) in out.iter_mut().enumerate() {
        for (c, r) in column.iter_mut().zip(sample) {
            *c = r.row_major()[k];
        }
        *slot = order_independent_sum(&mut column) / n;
    }
    Ok(Matrix3::from_row_slice(&out))
}
