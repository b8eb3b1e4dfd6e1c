//! Brute-force evaluation of the Cauchy kernels as truncated partition
//! series, with a certified bound on the discarded tail.
//!
//! The tail bound uses `p_m(n) ≤ (n+1)^{m-1}` for the number of partitions of
//! `n` into at most `m` parts and the per-spectrum character bound
//! `|χ_λ| ≤ min(m!, m^{m/2}) / |Weyl denominator|`. It is loose, which costs a
//! few extra shells, but it never under-reports. At large `m` and `z` near 1
//! it can force large truncation weights.
//!
//! Nothing here calls the closed forms in [`crate::kernels`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::parallel;
use crate::partitions::{pairs, partitions_of};
use crate::spectrum::{HalfSpectrum, UnitarySpectrum};
use crate::sum::Neumaier;
use crate::weyl::{PreparedSpectrum, PreparedUnitary};

pub const DEFAULT_WEIGHT_CAP: u32 = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    /// Sum all shells up to `max_weight`. With a tolerance, fail if the tail
    /// bound exceeds it.
    Fixed { max_weight: u32, tolerance: Option<f64> },
    /// Smallest weight whose tail bound is below `tolerance`.
    Auto { tolerance: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub mode: Truncation,
    /// Largest weight AUTO mode may choose.
    pub cap: u32,
}

impl TruncationPolicy {
    pub fn fixed(max_weight: u32) -> Self {
        Self { mode: Truncation::Fixed { max_weight, tolerance: None }, cap: DEFAULT_WEIGHT_CAP }
    }

    pub fn fixed_with_tolerance(max_weight: u32, tolerance: f64) -> Self {
        Self {
            mode: Truncation::Fixed { max_weight, tolerance: Some(tolerance) },
            cap: DEFAULT_WEIGHT_CAP,
        }
    }

    pub fn auto(tolerance: f64) -> Self {
        Self { mode: Truncation::Auto { tolerance }, cap: DEFAULT_WEIGHT_CAP }
    }

    pub fn with_cap(mut self, cap: u32) -> Self {
        self.cap = cap;
        self
    }
}

/// A truncated series value with the weight it was truncated at and a bound
/// on everything beyond.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue<T> {
    pub value: T,
    pub tail_bound: f64,
    pub max_weight: u32,
}

/// Coefficient sequence multiplying `z^{…} χ_λ(g) χ_λ(h)` in a shell of weight `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Weighting {
    /// `z^n`.
    Plain,
    /// `(c+n)!/(c+n−m)! · z^{c+n−m}` with `c = C(m,2)`: the `m`-th `z`-derivative
    /// of `z^{c+n}`.
    Derivative { m: usize },
}

impl Weighting {
    fn coefficient(self, n: u32, z: f64) -> f64 {
        match self {
            Weighting::Plain => z.powi(n as i32),
            Weighting::Derivative { m } => {
                let top = pairs(m) + n;
                if (top as usize) < m {
                    return 0.0;
                }
                let falling: f64 = (0..m).map(|k| (top as usize - k) as f64).product();
                falling * z.powi((top as usize - m) as i32)
            }
        }
    }

    /// `sup_{k ≥ n} coef(k+1)/coef(k)` for `n` with `coef(n) > 0`.
    fn ratio(self, n: u32, z: f64) -> f64 {
        match self {
            Weighting::Plain => z,
            Weighting::Derivative { m } => {
                let top = (pairs(m) + n) as f64;
                z * (top + 1.0) / (top + 1.0 - m as f64)
            }
        }
    }
}

/// Rigorous bound on `Σ_{n>L} (n+1)^{m-1} coef(n) B_x B_y`.
fn tail_sum(weighting: Weighting, z: f64, m: usize, bx: f64, by: f64, max_weight: u32) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    if z >= 1.0 {
        return f64::INFINITY;
    }
    let scale = bx * by;
    let count = |n: u32| ((n + 1) as f64).powi(m as i32 - 1);
    let term = |n: u32| count(n) * weighting.coefficient(n, z) * scale;
    let mut acc = 0.0;
    let mut n = max_weight + 1;
    // The term ratio decreases towards z; once it is below (1+z)/2 the rest
    // is dominated by a geometric series.
    let threshold = 0.5 * (1.0 + z);
    loop {
        let t = term(n);
        let growth = ((n + 2) as f64 / (n + 1) as f64).powi(m as i32 - 1);
        let r = growth * weighting.ratio(n, z);
        if t > 0.0 && r < threshold {
            return acc + t / (1.0 - r);
        }
        acc += t;
        n += 1;
        if n > max_weight + 100_000 {
            return f64::INFINITY;
        }
    }
}

/// Tail bound of the plain series truncated at weight `max_weight`.
pub fn tail_bound(z: f64, m: usize, bx: f64, by: f64, max_weight: u32) -> f64 {
    tail_sum(Weighting::Plain, z, m, bx, by, max_weight)
}

/// Smallest `L` whose tail bound is below `tol`, capped at `cap`.
pub fn auto_truncation(z: f64, m: usize, bx: f64, by: f64, tol: f64, cap: u32) -> Result<u32> {
    choose_weight(Weighting::Plain, z, m, bx, by, tol, cap)
}

fn choose_weight(w: Weighting, z: f64, m: usize, bx: f64, by: f64, tol: f64, cap: u32) -> Result<u32> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    for l in 0..=cap {
        if tail_sum(w, z, m, bx, by, l) < tol {
            return Ok(l);
        }
    }
    Err(Error::TruncationTooSmall {
        max_weight: cap,
        tail_bound: tail_sum(w, z, m, bx, by, cap),
        tolerance: tol,
    })
}

/// Per-evaluation memo of the shell sums `S_n = Σ_{|λ|=n} χ_λ(g) χ_λ(h)`.
/// Shell sums do not depend on `z`, so one oracle serves a whole `z` grid and
/// both the plain and the differentiated series.
pub struct SeriesOracle<'a> {
    x: PreparedSpectrum<'a>,
    y: PreparedSpectrum<'a>,
    same: bool,
    shells: Vec<Neumaier>,
}

impl<'a> SeriesOracle<'a> {
    pub fn new(x: &'a HalfSpectrum, y: &'a HalfSpectrum) -> Result<Self> {
        if x.group() != y.group() {
            return Err(Error::GroupMismatch { expected: x.group().to_string(), got: y.group().to_string() });
        }
        if x.rank() != y.rank() {
            return Err(Error::DimensionMismatch(x.rank(), y.rank()));
        }
        let same = x.fingerprint() == y.fingerprint() && x == y;
        Ok(Self {
            x: PreparedSpectrum::new(x)?,
            y: PreparedSpectrum::new(y)?,
            same,
            shells: Vec::new(),
        })
    }

    pub fn rank(&self) -> usize {
        self.x.spectrum().rank()
    }

    /// Character bounds `(B_x, B_y)`.
    pub fn bounds(&self) -> (f64, f64) {
        (self.x.character_bound(), self.y.character_bound())
    }

    fn ensure_shells(&mut self, max_weight: u32) -> Result<()> {
        let have = self.shells.len() as u32;
        if have > max_weight {
            return Ok(());
        }
        let m = self.rank();
        let (x, y, same) = (&self.x, &self.y, self.same);
        let new = parallel::try_map_indexed((max_weight + 1 - have) as usize, |k| {
            let n = have + k as u32;
            let mut acc = Neumaier::new();
            for lambda in partitions_of(n, m) {
                let cx = x.character(&lambda)?;
                let cy = if same { cx } else { y.character(&lambda)? };
                acc.add(cx * cy);
            }
            Ok::<_, Error>(acc)
        })?;
        self.shells.extend(new);
        Ok(())
    }

    fn resolve_weight(&self, w: Weighting, z: f64, policy: &TruncationPolicy) -> Result<(u32, f64)> {
        let m = self.rank();
        let (bx, by) = self.bounds();
        match policy.mode {
            Truncation::Fixed { max_weight, tolerance } => {
                let tail = tail_sum(w, z, m, bx, by, max_weight);
                if let Some(tol) = tolerance {
                    if tail > tol {
                        return Err(Error::TruncationTooSmall { max_weight, tail_bound: tail, tolerance: tol });
                    }
                }
                Ok((max_weight, tail))
            }
            Truncation::Auto { tolerance } => {
                let l = choose_weight(w, z, m, bx, by, tolerance, policy.cap)?;
                Ok((l, tail_sum(w, z, m, bx, by, l)))
            }
        }
    }

    fn evaluate(&mut self, w: Weighting, z: f64, policy: &TruncationPolicy) -> Result<SeriesValue<f64>> {
        if !(0.0..1.0).contains(&z) {
            return Err(Error::InvalidParameter(format!("z must lie in [0, 1), got {z}")));
        }
        let (max_weight, tail_bound) = self.resolve_weight(w, z, policy)?;
        self.ensure_shells(max_weight)?;
        let mut acc = Neumaier::new();
        for (n, shell) in self.shells[..=max_weight as usize].iter().enumerate() {
            let c = w.coefficient(n as u32, z);
            if c != 0.0 {
                acc.add(c * shell.value());
            }
        }
        Ok(SeriesValue { value: acc.value(), tail_bound, max_weight })
    }

    /// `Σ_{|λ| ≤ L} z^{|λ|} χ_λ(g) χ_λ(h)`.
    pub fn kernel(&mut self, z: f64, policy: &TruncationPolicy) -> Result<SeriesValue<f64>> {
        self.evaluate(Weighting::Plain, z, policy)
    }

    /// `Σ_λ (c+|λ|)!/(c+|λ|−m)! z^{c+|λ|−m} χ_λ(g) χ_λ(h)`, `c = C(m,2)`.
    pub fn weighted(&mut self, z: f64, policy: &TruncationPolicy) -> Result<SeriesValue<f64>> {
        self.evaluate(Weighting::Derivative { m: self.rank() }, z, policy)
    }
}

/// Truncated series for the kernel of the spectra's group (type D: the
/// `χ_λ` series).
pub fn truncated_kernel(x: &HalfSpectrum, y: &HalfSpectrum, z: f64, policy: &TruncationPolicy) -> Result<SeriesValue<f64>> {
    SeriesOracle::new(x, y)?.kernel(z, policy)
}

/// Truncated `m`-times differentiated `SO(2m+1)` series.
pub fn weighted_truncated_series(
    x: &HalfSpectrum,
    y: &HalfSpectrum,
    z: f64,
    policy: &TruncationPolicy,
) -> Result<SeriesValue<f64>> {
    SeriesOracle::new(x, y)?.weighted(z, policy)
}

/// Truncated Schur-function series `Σ z^{|λ|} s_λ(α) s_λ(β)` (or with
/// `conj(s_λ(β))` when `conjugate_second`).
pub fn truncated_kernel_unitary(
    a: &UnitarySpectrum,
    b: &UnitarySpectrum,
    z: f64,
    conjugate_second: bool,
    policy: &TruncationPolicy,
) -> Result<SeriesValue<Complex64>> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    if !(0.0..1.0).contains(&z) {
        return Err(Error::InvalidParameter(format!("z must lie in [0, 1), got {z}")));
    }
    let pa = PreparedUnitary::new(a)?;
    let pb = PreparedUnitary::new(b)?;
    let n = a.dim();
    let (ba, bb) = (pa.character_bound(), pb.character_bound());
    let (max_weight, tail) = match policy.mode {
        Truncation::Fixed { max_weight, tolerance } => {
            let tail = tail_bound(z, n, ba, bb, max_weight);
            if let Some(tol) = tolerance {
                if tail > tol {
                    return Err(Error::TruncationTooSmall { max_weight, tail_bound: tail, tolerance: tol });
                }
            }
            (max_weight, tail)
        }
        Truncation::Auto { tolerance } => {
            let l = auto_truncation(z, n, ba, bb, tolerance, policy.cap)?;
            (l, tail_bound(z, n, ba, bb, l))
        }
    };
    let shells = parallel::try_map_indexed(max_weight as usize + 1, |k| {
        let (mut re, mut im) = (Neumaier::new(), Neumaier::new());
        for lambda in partitions_of(k as u32, n) {
            let sa = pa.schur(&lambda)?;
            let mut sb = pb.schur(&lambda)?;
            if conjugate_second {
                sb = sb.conj();
            }
            let t = sa * sb;
            re.add(t.re);
            im.add(t.im);
        }
        Ok::<_, Error>((re.value(), im.value()))
    })?;
    let (mut re, mut im) = (Neumaier::new(), Neumaier::new());
    for (k, (sr, si)) in shells.into_iter().enumerate() {
        let c = z.powi(k as i32);
        re.add(c * sr);
        im.add(c * si);
    }
    Ok(SeriesValue { value: Complex64::new(re.value(), im.value()), tail_bound: tail, max_weight })
}
