//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fails.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use cauchy_core::kernels::{
    finite_difference_limit_so_odd, kernel_derivative_so_odd, kernel_o_odd, kernel_so_even, kernel_so_odd, kernel_sp,
    limit_kernel_so_odd,
};
use cauchy_core::oracle::{truncated_kernel, weighted_truncated_series, TruncationPolicy};
use cauchy_core::partitions::{enumerate_partitions, partitions_of};
use cauchy_core::sampling::{sample_haar_so3, sample_haar_spectrum, sample_naive_so3, NaiveAngleRange};
use cauchy_core::uniformity::{
    bin_probabilities, chi_square_gof, haar_so3_angle_cdf, histogram, ks_distance_uniform, mc_pvalue, rayleigh_pvalue,
    rayleigh_statistic, rotation_angles, sobolev_statistic_so_odd, sobolev_statistic_unitary,
    PValueMethod, StatisticKind,
};
use cauchy_core::weyl::char_so_odd;
use cauchy_core::{parallel, GroupTag, HalfSpectrum, KernelParams, Partition, RngStream, SoEvenNormalization};
use common::{count_partitions, generic_spectrum, separated_pair};
use nalgebra::DMatrix;

const MS: [usize; 3] = [1, 2, 3];
const ZS: [f64; 3] = [0.1, 0.3, 0.6];
const PER_CELL: usize = 20;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

/// Worst `|closed − oracle| − tail` over the grid; pass when it stays below 1e-9.
fn identity_grid(
    group: GroupTag,
    seed: u64,
    det_signs: (i8, i8),
    closed: impl Fn(&HalfSpectrum, &HalfSpectrum, &KernelParams) -> f64 + Sync,
) -> (bool, f64, usize) {
    let cells: Vec<(usize, f64)> = MS.iter().flat_map(|&m| ZS.iter().map(move |&z| (m, z))).collect();
    let worst = parallel::map_indexed(cells.len(), |c| {
        let (m, z) = cells[c];
        let mut rng = RngStream::new(seed, c as u64).rng();
        let p = KernelParams::new(z).unwrap();
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..PER_CELL {
            let (x, y) = if group == GroupTag::OOdd {
                let x = generic_spectrum(GroupTag::SoOdd, m, &mut rng);
                let y = generic_spectrum(GroupTag::SoOdd, m, &mut rng);
                (
                    HalfSpectrum::o_odd(x.angles(), det_signs.0).unwrap(),
                    HalfSpectrum::o_odd(y.angles(), det_signs.1).unwrap(),
                )
            } else {
                (generic_spectrum(group, m, &mut rng), generic_spectrum(group, m, &mut rng))
            };
            let series = truncated_kernel(&x, &y, z, &TruncationPolicy::auto(1e-11)).unwrap();
            let excess = (closed(&x, &y, &p) - series.value).abs() - series.tail_bound;
            worst = worst.max(excess);
        }
        worst
    });
    let worst = worst.into_iter().fold(f64::NEG_INFINITY, f64::max);
    (worst <= 1e-9, worst, cells.len() * PER_CELL)
}

fn criterion_1() -> Outcome {
    let (pass, worst, n) = identity_grid(GroupTag::SoOdd, 101, (1, 1), |x, y, p| kernel_so_odd(x, y, p).unwrap());
    Outcome::new(pass, format!("SO(2m+1) identity, {n} pairs, max(|diff| - tail) = {worst:.3e} <= 1e-9"))
}

fn criterion_2() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let (ok, worst, n) = identity_grid(GroupTag::Sp, 102, (1, 1), |x, y, p| kernel_sp(x, y, p).unwrap());
    pass &= ok;
    parts.push(format!("Sp {n} pairs {worst:.2e}"));
    for (k, signs) in [(1, 1), (1, -1), (-1, 1), (-1, -1)].into_iter().enumerate() {
        let (ok, worst, n) =
            identity_grid(GroupTag::OOdd, 110 + k as u64, signs, |x, y, p| kernel_o_odd(x, y, p).unwrap());
        pass &= ok;
        parts.push(format!("O{signs:?} {n} pairs {worst:.2e}"));
    }
    let half = HalfSpectrum::new(GroupTag::Sp, vec![PI / 2.0]).unwrap();
    let sp_anchor = kernel_sp(&half, &half, &KernelParams::new(0.5).unwrap()).unwrap();
    let ok = (sp_anchor - 4.0 / 3.0).abs() <= 1e-12;
    pass &= ok;
    parts.push(format!("Sp anchor {sp_anchor:.15}"));
    let pi = HalfSpectrum::new(GroupTag::SoOdd, vec![PI]).unwrap();
    let mut anchor_err: f64 = 0.0;
    for z in [0.1, 0.3, 0.5, 0.6, 0.9] {
        let k = kernel_so_odd(&pi, &pi, &KernelParams::new(z).unwrap()).unwrap();
        anchor_err = anchor_err.max((k - 1.0 / (1.0 - z)).abs());
    }
    pass &= anchor_err <= 1e-12;
    parts.push(format!("1/(1-z) anchor err {anchor_err:.1e}"));
    Outcome::new(pass, parts.join("; "))
}

fn criterion_3() -> Outcome {
    let cells: Vec<(usize, f64)> = MS.iter().flat_map(|&m| ZS.iter().map(move |&z| (m, z))).collect();
    let results = parallel::map_indexed(cells.len(), |c| {
        let (m, z) = cells[c];
        let mut rng = RngStream::new(103, c as u64).rng();
        let p = KernelParams::new(z).unwrap();
        let (mut ratio_dev, mut excess) = (0.0_f64, f64::NEG_INFINITY);
        for _ in 0..PER_CELL {
            let x = generic_spectrum(GroupTag::SoEven, m, &mut rng);
            let y = generic_spectrum(GroupTag::SoEven, m, &mut rng);
            let series = truncated_kernel(&x, &y, z, &TruncationPolicy::auto(1e-13)).unwrap();
            let stated = kernel_so_even(&x, &y, &p, SoEvenNormalization::Stated).unwrap();
            let corrected = kernel_so_even(&x, &y, &p, SoEvenNormalization::SeriesMatched).unwrap();
            ratio_dev = ratio_dev.max((stated / series.value - 4.0).abs());
            excess = excess.max((corrected - series.value).abs() - series.tail_bound);
        }
        (ratio_dev, excess)
    });
    let ratio_dev = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let excess = results.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    Outcome::new(
        ratio_dev <= 1e-6 && excess <= 1e-9,
        format!("SO(2m) fitted constant |ratio - 4| <= {ratio_dev:.2e} (1e-6); corrected kernel max(|diff| - tail) = {excess:.2e}"),
    )
}

fn criterion_4() -> Outcome {
    let mut worst = 0.0_f64;
    let mut count = 0;
    for m in [1, 2] {
        for (k, z) in [0.3, 0.5].into_iter().enumerate() {
            let mut rng = RngStream::new(104, (2 * m + k) as u64).rng();
            for _ in 0..10 {
                let x = generic_spectrum(GroupTag::SoOdd, m, &mut rng);
                let y = generic_spectrum(GroupTag::SoOdd, m, &mut rng);
                let series = weighted_truncated_series(&x, &y, z, &TruncationPolicy::auto(1e-13)).unwrap();
                let fd = kernel_derivative_so_odd(&x, &y, z, m).unwrap();
                worst = worst.max((series.value - fd.value).abs() / series.value.abs().max(1e-300));
                count += 1;
            }
        }
    }
    Outcome::new(worst <= 1e-5, format!("differentiated identity, {count} pairs, max relative diff {worst:.2e} <= 1e-5"))
}

fn criterion_5() -> Outcome {
    let mut rng = RngStream::new(105, 0).rng();
    let near_one = KernelParams::new(1.0 - 1e-6).unwrap();
    let mut max_kernel = 0.0_f64;
    for m in MS {
        for _ in 0..20 {
            let (x, y) = separated_pair(m, 0.3, &mut rng);
            max_kernel = max_kernel.max(kernel_so_odd(&x, &y, &near_one).unwrap().abs());
        }
    }
    let mut m1_err = 0.0_f64;
    for _ in 0..50 {
        let (x, y) = separated_pair(1, 0.3, &mut rng);
        let u = 2.0 * x.angles()[0].cos() + 2.0;
        let v = 2.0 * y.angles()[0].cos() + 2.0;
        let expected = -(u + v) / (u - v).powi(2);
        let got = limit_kernel_so_odd(&x, &y, 1e-8).unwrap();
        m1_err = m1_err.max((got - expected).abs());
    }
    let mut m2_rel = 0.0_f64;
    for _ in 0..10 {
        let (x, y) = separated_pair(2, 0.3, &mut rng);
        let closed = limit_kernel_so_odd(&x, &y, 1e-8).unwrap();
        let fd = finite_difference_limit_so_odd(&x, &y).unwrap();
        m2_rel = m2_rel.max((closed - fd.value).abs() / closed.abs());
    }
    Outcome::new(
        max_kernel <= 1e-3 && m1_err <= 1e-12 && m2_rel <= 1e-3,
        format!(
            "max |K(z=1-1e-6)| = {max_kernel:.2e} (1e-3); m=1 limit err {m1_err:.1e} (1e-12); m=2 limit vs finite differences rel {m2_rel:.2e} (1e-3)"
        ),
    )
}

fn naive_sample(n: usize, stream: RngStream) -> Vec<cauchy_core::Rotation3> {
    let mut rng = stream.rng();
    (0..n).map(|_| sample_naive_so3(&mut rng, NaiveAngleRange::Full)).collect()
}

fn criterion_6() -> Outcome {
    let stats = parallel::map_indexed(50, |r| rayleigh_statistic(&naive_sample(1500, RngStream::new(106, r as u64))).unwrap());
    let mean = stats.iter().sum::<f64>() / stats.len() as f64;
    let (lo, hi) = stats.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &t| (a.min(t), b.max(t)));
    let reference_draw = 1379.452;
    let bracket = (1400.0..=1600.0).contains(&mean)
        && stats.iter().all(|t| (1200.0..=1800.0).contains(t))
        && (1200.0..=1800.0).contains(&reference_draw);

    let observed = stats[0];
    let mc = rayleigh_pvalue(observed, PValueMethod::MonteCarlo, 1500, 1000, RngStream::new(106, 0)).unwrap();
    let mc_ok = mc.p_value == 1.0 / 1001.0;

    let mut small: Vec<f64> = parallel::map_indexed(50, |r| {
        let t = rayleigh_statistic(&naive_sample(20, RngStream::new(1061, r as u64))).unwrap();
        rayleigh_pvalue(t, PValueMethod::Asymptotic, 20, 0, RngStream::new(1061, r as u64)).unwrap().p_value
    });
    small.sort_by(f64::total_cmp);
    let median = 0.5 * (small[24] + small[25]);
    Outcome::new(
        bracket && mc_ok && median < 0.01,
        format!(
            "naive N=1500: mean T_R {mean:.1} in [1400,1600], range [{lo:.1}, {hi:.1}] within [1200,1800]; MC p = {:.6} (1/1001); N=20 median asymptotic p = {median:.2e} < 0.01",
            mc.p_value
        ),
    )
}

fn criterion_7() -> Outcome {
    const REPS: usize = 200;
    const SIMS: usize = 199;
    let n_rot = 100;
    let rayleigh = parallel::map_indexed(REPS, |r| {
        let stream = RngStream::new(107, (r as u64) << 32);
        let mut rng = stream.rng();
        let sample: Vec<_> = (0..n_rot).map(|_| sample_haar_so3(&mut rng)).collect();
        let t = rayleigh_statistic(&sample).unwrap();
        let p = rayleigh_pvalue(t, PValueMethod::MonteCarlo, n_rot, SIMS, stream).unwrap().p_value;
        (t, p)
    });
    let mean_t = rayleigh.iter().map(|r| r.0).sum::<f64>() / REPS as f64;
    let ks_rayleigh = ks_distance_uniform(&rayleigh.iter().map(|r| r.1).collect::<Vec<_>>()).unwrap();

    let so_kind = StatisticKind::SobolevSoOdd { m: 1, params: KernelParams::new(0.5).unwrap() };
    let n_spec = 40;
    let so_p = parallel::map_indexed(REPS, |r| {
        let stream = RngStream::new(1071, (r as u64) << 32);
        let observed = so_kind.simulate_null(n_spec, stream).unwrap();
        mc_pvalue(&so_kind, observed, n_spec, SIMS, stream).unwrap().p_value
    });
    let ks_so = ks_distance_uniform(&so_p).unwrap();

    let u_kind = StatisticKind::SobolevUnitary { n: 2, params: KernelParams::new(0.5).unwrap() };
    let u_p = parallel::map_indexed(REPS, |r| {
        let stream = RngStream::new(1072, (r as u64) << 32);
        let observed = u_kind.simulate_null(n_spec, stream).unwrap();
        mc_pvalue(&u_kind, observed, n_spec, SIMS, stream).unwrap().p_value
    });
    let ks_u = ks_distance_uniform(&u_p).unwrap();

    Outcome::new(
        ks_rayleigh < 0.12 && ks_so < 0.12 && ks_u < 0.12 && (8.0..=10.0).contains(&mean_t),
        format!(
            "Haar null, {REPS} reps x {SIMS} sims: KS rayleigh {ks_rayleigh:.3}, sobolev SO(3) {ks_so:.3}, sobolev U(2) {ks_u:.3} (< 0.12); mean T_R {mean_t:.2} in [8,10]"
        ),
    )
}

fn criterion_8() -> Outcome {
    const N: usize = 100_000;
    const BINS: usize = 50;
    let mut rng = RngStream::new(108, 0).rng();
    let haar: Vec<_> = (0..N).map(|_| sample_haar_so3(&mut rng)).collect();
    let haar_probs = bin_probabilities(haar_so3_angle_cdf, BINS, 0.0, PI);
    let haar_fit = chi_square_gof(&histogram(&rotation_angles(&haar), BINS, 0.0, PI), &haar_probs).unwrap();

    let mut rng = RngStream::new(108, 1).rng();
    let naive: Vec<_> = (0..N).map(|_| sample_naive_so3(&mut rng, NaiveAngleRange::Full)).collect();
    let flat = vec![1.0 / BINS as f64; BINS];
    let naive_fit = chi_square_gof(&histogram(&rotation_angles(&naive), BINS, 0.0, PI), &flat).unwrap();

    let mut rng = RngStream::new(108, 2).rng();
    let spectral: Vec<f64> = (0..N)
        .map(|_| sample_haar_spectrum(GroupTag::SoOdd, 1, &mut rng).unwrap().angles()[0])
        .collect();
    let spectral_fit = chi_square_gof(&histogram(&spectral, BINS, 0.0, PI), &haar_probs).unwrap();

    let alpha = 0.001;
    Outcome::new(
        haar_fit.p_value > alpha && naive_fit.p_value > alpha && spectral_fit.p_value > alpha,
        format!(
            "chi-square, {BINS} bins, N={N}: Haar subgroup p = {:.3}, naive folded-uniform p = {:.3}, SO(3) eigen-angle p = {:.3} (> {alpha})",
            haar_fit.p_value, naive_fit.p_value, spectral_fit.p_value
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;

    // Symmetry and permutation invariance.
    let mut rng = RngStream::new(109, 0).rng();
    let mut sym: f64 = 0.0;
    for m in MS {
        for z in ZS {
            let p = KernelParams::new(z).unwrap();
            for _ in 0..20 {
                let x = generic_spectrum(GroupTag::SoOdd, m, &mut rng);
                let y = generic_spectrum(GroupTag::SoOdd, m, &mut rng);
                let order: Vec<usize> = (0..m).rev().collect();
                let k = kernel_so_odd(&x, &y, &p).unwrap();
                sym = sym.max((k - kernel_so_odd(&y, &x, &p).unwrap()).abs());
                sym = sym.max((k - kernel_so_odd(&x.permuted(&order), &y, &p).unwrap()).abs());
            }
        }
    }
    pass &= sym <= 1e-12;
    notes.push(format!("symmetry {sym:.1e}"));

    // Gram matrix and diagonal.
    let mut min_ratio = f64::INFINITY;
    let mut min_diag = f64::INFINITY;
    for m in MS {
        let spectra: Vec<_> = (0..30).map(|_| sample_haar_spectrum(GroupTag::SoOdd, m, &mut rng).unwrap()).collect();
        let p = KernelParams::new(0.5).unwrap();
        let gram = DMatrix::from_fn(30, 30, |i, j| kernel_so_odd(&spectra[i], &spectra[j], &p).unwrap());
        let gram = (&gram + gram.transpose()) * 0.5;
        let min_eig = gram.symmetric_eigenvalues().min();
        min_ratio = min_ratio.min(min_eig / gram.trace());
        min_diag = min_diag.min((0..30).map(|i| gram[(i, i)]).fold(f64::INFINITY, f64::min));
    }
    pass &= min_ratio >= -1e-8 && min_diag > 1.0;
    notes.push(format!("Gram min eig/trace {min_ratio:.1e}, min diagonal {min_diag:.3}"));

    // Character orthogonality under Haar measure.
    let mut worst_se: f64 = 0.0;
    for (m, stream) in [(1usize, 0u64), (2, 1)] {
        let draws = parallel::map_indexed(100, |b| {
            let mut rng = RngStream::new(1091, stream * 1000 + b as u64).rng();
            (0..1000).map(|_| sample_haar_spectrum(GroupTag::SoOdd, m, &mut rng).unwrap()).collect::<Vec<_>>()
        });
        let sample: Vec<HalfSpectrum> = draws.into_iter().flatten().collect();
        let lambdas = enumerate_partitions(m, 2);
        for (a, la) in lambdas.iter().enumerate() {
            for lb in &lambdas[a..] {
                let prod: Vec<f64> = sample
                    .iter()
                    .map(|s| char_so_odd(la, s).unwrap() * char_so_odd(lb, s).unwrap())
                    .collect();
                let n = prod.len() as f64;
                let mean = prod.iter().sum::<f64>() / n;
                let var = prod.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
                let target = if la == lb { 1.0 } else { 0.0 };
                worst_se = worst_se.max((mean - target).abs() / (var / n).sqrt());
            }
        }
    }
    pass &= worst_se <= 5.0;
    notes.push(format!("orthogonality worst {worst_se:.2} SE"));

    // Partition counts.
    let mut counts_ok = true;
    for k in 1..=4 {
        for n in 0..=30 {
            counts_ok &= partitions_of(n, k).len() as u64 == count_partitions(n, k);
        }
        let total = enumerate_partitions(k, 30).len() as u64;
        counts_ok &= total == (0..=30).map(|n| count_partitions(n, k)).sum::<u64>();
    }
    counts_ok &= partitions_of(4, 4).len() == 5 && Partition::new(vec![3, 1]).unwrap().transpose().parts() == [2, 1, 1];
    pass &= counts_ok;
    notes.push(format!("partition counts {}", if counts_ok { "match" } else { "differ" }));

    Outcome::new(pass, notes.join("; "))
}

fn power_study() -> Outcome {
    let kind = StatisticKind::SobolevSoOdd { m: 1, params: KernelParams::new(0.5).unwrap() };
    let params = KernelParams::new(0.5).unwrap();
    let rejections = (0..50)
        .filter(|&r| {
            let stream = RngStream::new(110, (r as u64) << 32);
            let mut rng = stream.rng();
            let sample: Vec<_> = (0..100)
                .map(|_| {
                    use rand::Rng;
                    HalfSpectrum::new(GroupTag::SoOdd, vec![rng.random_range(0.0..PI)]).unwrap()
                })
                .collect();
            let s = sobolev_statistic_so_odd(&sample, &params).unwrap();
            mc_pvalue(&kind, s, 100, 500, stream).unwrap().p_value < 0.05
        })
        .count();
    Outcome::new(
        rejections >= 45,
        format!("Sobolev SO(3) against uniform angles, N=100: {rejections}/50 replications with p < 0.05 (>= 45)"),
    )
}

fn unitary_identity() -> Outcome {
    use cauchy_core::oracle::truncated_kernel_unitary;
    use cauchy_core::sampling::sample_unitary_spectrum;
    let mut rng = RngStream::new(111, 0).rng();
    let p = KernelParams::new(0.3).unwrap();
    let spectra: Vec<_> = (0..5).map(|_| sample_unitary_spectrum(2, &mut rng).unwrap()).collect();
    let closed = sobolev_statistic_unitary(&spectra, &p).unwrap();
    let mut direct = 0.0;
    for a in &spectra {
        for b in &spectra {
            direct += truncated_kernel_unitary(a, b, 0.3, true, &TruncationPolicy::fixed(50)).unwrap().value.re - 1.0;
        }
    }
    direct /= 25.0;
    Outcome::new(
        (closed - direct).abs() <= 1e-9,
        format!("T_N^z closed form vs character double sum (|λ| <= 50): diff {:.1e} (1e-9)", (closed - direct).abs()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("1 SO(2m+1) identity", criterion_1),
        ("2 Sp(2m) and O(2m+1) identities", criterion_2),
        ("3 SO(2m) identity", criterion_3),
        ("4 differentiated identity", criterion_4),
        ("5 z -> 1 limit", criterion_5),
        ("6 Rayleigh experiment", criterion_6),
        ("7 null calibration", criterion_7),
        ("8 sampler distributions", criterion_8),
        ("9 property checks", criterion_9),
        ("power study", power_study),
        ("unitary statistic", unitary_identity),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("{tag}  [{name}] {} ({:.1}s)", outcome.detail, start.elapsed().as_secs_f64());
        if !outcome.pass {
            failed.push(name);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
