//! Eigenvalue spectra of elements of the compact classical groups.

use std::collections::hash_map::DefaultHasher;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The family of a rank-`m` group whose non-trivial eigenvalues come in
/// conjugate pairs `e^{±iθ}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupTag {
    /// `SO(2m+1)`, type B.
    SoOdd,
    /// `Sp(2m)`, type C.
    Sp,
    /// `SO(2m)`, type D.
    SoEven,
    /// `O(2m+1)`; the extra eigenvalue is the determinant.
    OOdd,
}

impl GroupTag {
    pub fn name(self) -> &'static str {
        match self {
            GroupTag::SoOdd => "so-odd",
            GroupTag::Sp => "sp",
            GroupTag::SoEven => "so-even",
            GroupTag::OOdd => "o-odd",
        }
    }
}

impl fmt::Display for GroupTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GroupTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "so-odd" => Ok(GroupTag::SoOdd),
            "sp" => Ok(GroupTag::Sp),
            "so-even" => Ok(GroupTag::SoEven),
            "o-odd" => Ok(GroupTag::OOdd),
            other => Err(Error::InvalidParameter(format!("unknown group '{other}'"))),
        }
    }
}

/// The `m` angles `θ_i ∈ [0, π]` of the conjugate eigenvalue pairs
/// `e^{±iθ_i}`, plus the group they belong to.
///
/// Angles on the boundary are accepted; whether a particular character or
/// kernel can be evaluated there is decided by its own degeneracy check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpectrum {
    angles: Vec<f64>,
    group: GroupTag,
    det_sign: i8,
}

impl HalfSpectrum {
    pub fn new(group: GroupTag, angles: impl Into<Vec<f64>>) -> Result<Self> {
        Self::with_det_sign(group, angles, 1)
    }

    /// Element of `O(2m+1)` with the given determinant.
    pub fn o_odd(angles: impl Into<Vec<f64>>, det_sign: i8) -> Result<Self> {
        Self::with_det_sign(GroupTag::OOdd, angles, det_sign)
    }

    fn with_det_sign(group: GroupTag, angles: impl Into<Vec<f64>>, det_sign: i8) -> Result<Self> {
        let angles = angles.into();
        for &a in &angles {
            if !a.is_finite() || !(0.0..=PI).contains(&a) {
                return Err(Error::InvalidAngle {
                    angle: a,
                    reason: "half-spectrum angles must lie in [0, π]".into(),
                });
            }
        }
        if det_sign != 1 && det_sign != -1 {
            return Err(Error::InvalidParameter(format!("det sign must be ±1, got {det_sign}")));
        }
        if det_sign == -1 && group != GroupTag::OOdd {
            return Err(Error::InvalidParameter(format!(
                "det sign -1 is only meaningful for o-odd, not {group}"
            )));
        }
        Ok(Self { angles, group, det_sign })
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn rank(&self) -> usize {
        self.angles.len()
    }

    pub fn group(&self) -> GroupTag {
        self.group
    }

    pub fn det_sign(&self) -> i8 {
        self.det_sign
    }

    /// `x_i + x_i^{-1} = 2 cos θ_i`.
    pub fn traces(&self) -> Vec<f64> {
        self.angles.iter().map(|t| 2.0 * t.cos()).collect()
    }

    /// Smallest `|cos θ_i - cos θ_j|` over `i < j`; infinite for rank ≤ 1.
    pub fn min_cos_gap(&self) -> f64 {
        let mut gap = f64::INFINITY;
        for i in 0..self.angles.len() {
            for j in i + 1..self.angles.len() {
                gap = gap.min((self.angles[i].cos() - self.angles[j].cos()).abs());
            }
        }
        gap
    }

    /// Same spectrum with the angles permuted by `order`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        Self {
            angles: order.iter().map(|&i| self.angles[i]).collect(),
            ..self.clone()
        }
    }

    /// Content hash over the exact angle bits, group and determinant.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.group.hash(&mut h);
        self.det_sign.hash(&mut h);
        for a in &self.angles {
            a.to_bits().hash(&mut h);
        }
        h.finish()
    }
}

/// Eigenphases `φ_i ∈ [0, 2π)` of a unitary matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitarySpectrum {
    angles: Vec<f64>,
}

impl UnitarySpectrum {
    pub fn new(angles: impl Into<Vec<f64>>) -> Result<Self> {
        let mut angles = angles.into();
        for a in angles.iter_mut() {
            if !a.is_finite() {
                return Err(Error::InvalidAngle {
                    angle: *a,
                    reason: "eigenphase must be finite".into(),
                });
            }
            let mut r = a.rem_euclid(TAU);
            if r >= TAU {
                r = 0.0;
            }
            *a = r;
        }
        Ok(Self { angles })
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn dim(&self) -> usize {
        self.angles.len()
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.angles.iter().map(|&a| Complex64::from_polar(1.0, a)).collect()
    }

    /// Spectrum of the inverse (complex-conjugate eigenvalues).
    pub fn inverse(&self) -> Self {
        Self::new(self.angles.iter().map(|a| -a).collect::<Vec<_>>()).expect("finite")
    }

    pub fn permuted(&self, order: &[usize]) -> Self {
        Self {
            angles: order.iter().map(|&i| self.angles[i]).collect(),
        }
    }

    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        for a in &self.angles {
            a.to_bits().hash(&mut h);
        }
        h.finish()
    }
}
