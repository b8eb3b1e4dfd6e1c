#![allow(dead_code)]

use std::f64::consts::PI;

use cauchy_core::{GroupTag, HalfSpectrum};
use rand::Rng;

/// Angles drawn uniformly from `[margin, π − margin]`, redrawn until every
/// pair of cosines is at least `gap` apart.
pub fn generic_angles<R: Rng>(m: usize, margin: f64, gap: f64, rng: &mut R) -> Vec<f64> {
    loop {
        let mut a: Vec<f64> = (0..m).map(|_| rng.random_range(margin..PI - margin)).collect();
        a.sort_by(f64::total_cmp);
        let ok = a
            .iter()
            .enumerate()
            .all(|(i, x)| a[i + 1..].iter().all(|y| (x.cos() - y.cos()).abs() >= gap));
        if ok {
            return a;
        }
    }
}

pub fn generic_spectrum<R: Rng>(group: GroupTag, m: usize, rng: &mut R) -> HalfSpectrum {
    HalfSpectrum::new(group, generic_angles(m, 0.1, 0.2, rng)).unwrap()
}

/// Two spectra whose angles, pooled, are pairwise at least `gap` apart.
pub fn separated_pair<R: Rng>(m: usize, gap: f64, rng: &mut R) -> (HalfSpectrum, HalfSpectrum) {
    loop {
        let a: Vec<f64> = (0..2 * m).map(|_| rng.random_range(gap..PI - gap)).collect();
        let ok = a
            .iter()
            .enumerate()
            .all(|(i, x)| a[i + 1..].iter().all(|y| (x - y).abs() >= gap));
        if ok {
            let x = HalfSpectrum::new(GroupTag::SoOdd, a[..m].to_vec()).unwrap();
            let y = HalfSpectrum::new(GroupTag::SoOdd, a[m..].to_vec()).unwrap();
            return (x, y);
        }
    }
}

/// Number of partitions of `n` into at most `k` parts, by the recursion
/// `p(n, k) = p(n, k − 1) + p(n − k, k)`.
pub fn count_partitions(n: u32, k: usize) -> u64 {
    fn go(n: i64, k: i64, memo: &mut std::collections::HashMap<(i64, i64), u64>) -> u64 {
        if n == 0 {
            return 1;
        }
        if n < 0 || k == 0 {
            return 0;
        }
        if let Some(&v) = memo.get(&(n, k)) {
            return v;
        }
        let v = go(n, k - 1, memo) + go(n - k, k, memo);
        memo.insert((n, k), v);
        v
    }
    go(n as i64, k as i64, &mut Default::default())
}

/// Regularized upper incomplete gamma `Q(a, x)` by its series and continued
/// fraction, independent of the statistics crate used in the library.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    let ln_gamma_a = ln_gamma(a);
    if x < a + 1.0 {
        let (mut sum, mut term, mut ap) = (1.0 / a, 1.0 / a, a);
        for _ in 0..500 {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-16 {
                break;
            }
        }
        1.0 - sum * (-x + a * x.ln() - ln_gamma_a).exp()
    } else {
        // Lentz
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (-x + a * x.ln() - ln_gamma_a).exp() * h
    }
}

/// Lanczos approximation, g = 7.
fn ln_gamma(x: f64) -> f64 {
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    let x = x - 1.0;
    let t = x + 7.5;
    let s = C[1..].iter().enumerate().fold(C[0], |s, (i, c)| s + c / (x + i as f64 + 1.0));
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + s.ln()
}
