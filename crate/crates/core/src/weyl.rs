//! Irreducible characters of the classical groups via the Weyl character
//! formula.
//!
//! For the orthogonal and symplectic families the alternants are written over
//! the reals: `x^a - x^{-a} = 2i sin(aθ)` and `x^a + x^{-a} = 2 cos(aθ)`, and the
//! common factors cancel between numerator and denominator. Type D at rank 1
//! follows the determinant-ratio convention, which gives `χ_(k)(θ) = cos(kθ)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::det_from_fn;
use crate::partitions::Partition;
use crate::spectrum::{GroupTag, HalfSpectrum, UnitarySpectrum};

/// Relative floor below which a Weyl denominator is treated as zero.
pub const DEFAULT_DENOMINATOR_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Alternant {
    /// Entries `sin((λ_j + m - 1 - j + shift) θ_i)`.
    Sine(f64),
    /// Entries `cos((λ_j + m - 1 - j + shift) θ_i)`.
    Cosine(f64),
}

impl Alternant {
    fn for_spectrum(s: &HalfSpectrum) -> Self {
        match (s.group(), s.det_sign()) {
            (GroupTag::SoOdd, _) | (GroupTag::OOdd, 1) => Alternant::Sine(0.5),
            (GroupTag::OOdd, _) => Alternant::Cosine(0.5),
            (GroupTag::Sp, _) => Alternant::Sine(1.0),
            (GroupTag::SoEven, _) => Alternant::Cosine(0.0),
        }
    }

    fn det(self, angles: &[f64], lambda: &Partition) -> f64 {
        let m = angles.len();
        let exponent = |j: usize| lambda.part(j) as f64 + (m - 1 - j) as f64;
        match self {
            Alternant::Sine(s) => det_from_fn(m, |i, j| ((exponent(j) + s) * angles[i]).sin()),
            Alternant::Cosine(s) => det_from_fn(m, |i, j| ((exponent(j) + s) * angles[i]).cos()),
        }
    }
}

/// A half-spectrum with its Weyl denominator evaluated once, for repeated
/// character evaluation over many partitions.
#[derive(Debug, Clone)]
pub struct PreparedSpectrum<'a> {
    spectrum: &'a HalfSpectrum,
    alternant: Alternant,
    denominator: f64,
}

impl<'a> PreparedSpectrum<'a> {
    pub fn new(spectrum: &'a HalfSpectrum) -> Result<Self> {
        Self::with_floor(spectrum, DEFAULT_DENOMINATOR_FLOOR)
    }

    pub fn with_floor(spectrum: &'a HalfSpectrum, floor: f64) -> Result<Self> {
        let alternant = Alternant::for_spectrum(spectrum);
        let angles = spectrum.angles();
        // Alternant entries are sines or cosines, so the entry scale is 1.
        let denominator = alternant.det(angles, &Partition::empty());
        if !(denominator.abs() >= floor) {
            return Err(Error::DegenerateSpectrum(format!(
                "Weyl denominator {denominator:e} below floor {floor:e} for {} angles {:?}",
                spectrum.group(),
                angles
            )));
        }
        Ok(Self { spectrum, alternant, denominator })
    }

    pub fn spectrum(&self) -> &HalfSpectrum {
        self.spectrum
    }

    /// The Weyl denominator in the real normalization used here.
    pub fn denominator(&self) -> f64 {
        self.denominator
    }

    /// Upper bound on `|χ_λ|` valid for every `λ`: the numerator entries are
    /// bounded by 1, so `|det| ≤ min(m!, m^{m/2})`.
    pub fn character_bound(&self) -> f64 {
        numerator_bound(self.spectrum.rank()) / self.denominator.abs()
    }

    /// Character value for a partition with at most `m` parts. For `O(2m+1)`
    /// the associated partitions `λ̃` with more than `m` parts are accepted too.
    pub fn character(&self, lambda: &Partition) -> Result<f64> {
        let m = self.spectrum.rank();
        if lambda.len() <= m {
            return Ok(self.alternant.det(self.spectrum.angles(), lambda) / self.denominator);
        }
        if self.spectrum.group() == GroupTag::OOdd {
            if let Ok(assoc) = lambda.associate(2 * m + 1) {
                if assoc.len() <= m {
                    let base = self.alternant.det(self.spectrum.angles(), &assoc) / self.denominator;
                    return Ok(f64::from(self.spectrum.det_sign()) * base);
                }
            }
        }
        Err(too_long(lambda, m))
    }
}

pub(crate) fn numerator_bound(m: usize) -> f64 {
    let factorial: f64 = (1..=m).map(|k| k as f64).product();
    let hadamard = (m as f64).powf(m as f64 / 2.0);
    factorial.min(hadamard).max(1.0)
}

fn too_long(lambda: &Partition, m: usize) -> Error {
    Error::InvalidPartition {
        partition: lambda.parts().to_vec(),
        reason: format!("more than {m} parts"),
    }
}

fn expect_group(s: &HalfSpectrum, expected: GroupTag) -> Result<()> {
    if s.group() != expected {
        return Err(Error::GroupMismatch {
            expected: expected.to_string(),
            got: s.group().to_string(),
        });
    }
    Ok(())
}

/// Character `so_λ` of `SO(2m+1)`.
pub fn char_so_odd(lambda: &Partition, s: &HalfSpectrum) -> Result<f64> {
    expect_group(s, GroupTag::SoOdd)?;
    PreparedSpectrum::new(s)?.character(lambda)
}

/// Character `sp_λ` of `Sp(2m)`.
pub fn char_sp(lambda: &Partition, s: &HalfSpectrum) -> Result<f64> {
    expect_group(s, GroupTag::Sp)?;
    PreparedSpectrum::new(s)?.character(lambda)
}

/// `χ_λ` on `SO(2m)`: `so_λ` when `λ_m = 0`, otherwise `so_λ + so_{λ^-}`.
/// In both cases this is a single cosine-alternant ratio.
pub fn char_so_even_chi(lambda: &Partition, s: &HalfSpectrum) -> Result<f64> {
    expect_group(s, GroupTag::SoEven)?;
    PreparedSpectrum::new(s)?.character(lambda)
}

/// The two irreducible characters `so_λ` (`sign = +1`) and `so_{λ^-}`
/// (`sign = -1`) of `SO(2m)` for a partition with exactly `m` parts.
///
/// In real alternants this is `(D_cos ∓ i^m D_sin) / (2 D_cos^0)`, so the values
/// are complex conjugates of each other when `m` is odd.
pub fn char_so_even_pm(lambda: &Partition, sign: i8, s: &HalfSpectrum) -> Result<Complex64> {
    expect_group(s, GroupTag::SoEven)?;
    let m = s.rank();
    if m < 2 {
        return Err(Error::InvalidParameter(
            "the so(λ)/so(λ^-) split needs rank m ≥ 2".into(),
        ));
    }
    if sign != 1 && sign != -1 {
        return Err(Error::InvalidParameter(format!("sign must be ±1, got {sign}")));
    }
    if lambda.len() != m {
        return Err(Error::InvalidPartition {
            partition: lambda.parts().to_vec(),
            reason: format!("the split requires exactly {m} nonzero parts"),
        });
    }
    let prepared = PreparedSpectrum::new(s)?;
    let angles = s.angles();
    let d_cos = Alternant::Cosine(0.0).det(angles, lambda);
    let d_sin = Alternant::Sine(0.0).det(angles, lambda);
    let i_pow_m = Complex64::i().powu(m as u32);
    let value = (Complex64::from(d_cos) - f64::from(sign) * i_pow_m * d_sin)
        / (2.0 * prepared.denominator());
    Ok(value)
}

/// Character `o_λ` of `O(2m+1)` at an element with the spectrum's determinant.
/// Satisfies `o_{λ̃}(g) = det(g) o_λ(g)` for the associated partition.
pub fn char_o_odd(lambda: &Partition, s: &HalfSpectrum) -> Result<f64> {
    expect_group(s, GroupTag::OOdd)?;
    PreparedSpectrum::new(s)?.character(lambda)
}

/// Character of whichever family the spectrum is tagged with (type D uses `χ_λ`).
pub fn character(lambda: &Partition, s: &HalfSpectrum) -> Result<f64> {
    PreparedSpectrum::new(s)?.character(lambda)
}

/// A unitary spectrum with its Vandermonde denominator evaluated once.
#[derive(Debug, Clone)]
pub struct PreparedUnitary {
    eigenvalues: Vec<Complex64>,
    denominator: Complex64,
}

impl PreparedUnitary {
    pub fn new(s: &UnitarySpectrum) -> Result<Self> {
        Self::with_floor(s, DEFAULT_DENOMINATOR_FLOOR)
    }

    pub fn with_floor(s: &UnitarySpectrum, floor: f64) -> Result<Self> {
        let eigenvalues = s.eigenvalues();
        let n = eigenvalues.len();
        let denominator: Complex64 = det_from_fn(n, |i, j| eigenvalues[i].powu((n - 1 - j) as u32));
        if !(denominator.norm() >= floor) {
            return Err(Error::DegenerateSpectrum(format!(
                "eigenvalues nearly coincide (Vandermonde {:e}) at phases {:?}",
                denominator.norm(),
                s.angles()
            )));
        }
        Ok(Self { eigenvalues, denominator })
    }

    pub fn character_bound(&self) -> f64 {
        numerator_bound(self.eigenvalues.len()) / self.denominator.norm()
    }

    /// Schur polynomial `s_λ` of the eigenvalues, by the bialternant formula.
    pub fn schur(&self, lambda: &Partition) -> Result<Complex64> {
        let n = self.eigenvalues.len();
        if lambda.len() > n {
            return Err(too_long(lambda, n));
        }
        let num: Complex64 = det_from_fn(n, |i, j| {
            self.eigenvalues[i].powu(lambda.part(j) + (n - 1 - j) as u32)
        });
        Ok(num / self.denominator)
    }
}

/// Character `χ_λ(g) = s_λ(α_1, …, α_n)` of `U(n)`.
pub fn char_schur(lambda: &Partition, s: &UnitarySpectrum) -> Result<Complex64> {
    PreparedUnitary::new(s)?.schur(lambda)
}
