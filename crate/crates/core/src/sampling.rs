//! Haar-uniform and naive random rotations, and Haar eigenvalue spectra of
//! the classical groups.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, UnitSphere};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::DEFAULT_DEGENERACY_TOLERANCE;
use crate::spectrum::{GroupTag, HalfSpectrum, UnitarySpectrum};

/// A reproducible random stream. The same `(seed, stream_id)` always yields
/// the same sequence, whichever thread consumes it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// Stream `offset` positions further along under the same seed.
    pub fn offset(&self, offset: u64) -> Self {
        Self { seed: self.seed, stream_id: self.stream_id.wrapping_add(offset) }
    }
}

/// Orthogonality tolerance for matrices accepted from outside.
const ROTATION_TOLERANCE: f64 = 1e-9;

/// A 3x3 rotation matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation3(Matrix3<f64>);

impl Rotation3 {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Validates `RᵀR = I` and `det R = 1`.
    pub fn from_matrix(m: Matrix3<f64>) -> Result<Self> {
        let defect = (m.transpose() * m - Matrix3::identity()).abs().max();
        let det = m.determinant();
        if !(defect <= ROTATION_TOLERANCE) || !((det - 1.0).abs() <= ROTATION_TOLERANCE) {
            return Err(Error::InvalidParameter(format!(
                "not a rotation: orthogonality defect {defect:e}, determinant {det}"
            )));
        }
        Ok(Self(m))
    }

    /// Row-major entries `r11, r12, …, r33`.
    pub fn from_row_major(entries: [f64; 9]) -> Result<Self> {
        Self::from_matrix(Matrix3::from_row_slice(&entries))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn row_major(&self) -> [f64; 9] {
        let m = &self.0;
        [m[(0, 0)], m[(0, 1)], m[(0, 2)], m[(1, 0)], m[(1, 1)], m[(1, 2)], m[(2, 0)], m[(2, 1)], m[(2, 2)]]
    }

    /// Rotation angle in `[0, π]`.
    pub fn angle(&self) -> f64 {
        rotation_angle(self)
    }

    /// Unit rotation axis. For the identity the axis is arbitrary and `e_z`
    /// is returned; for half-turns the sign is arbitrary.
    pub fn axis(&self) -> Vector3<f64> {
        let m = &self.0;
        let theta = self.angle();
        let skew = Vector3::new(m[(2, 1)] - m[(1, 2)], m[(0, 2)] - m[(2, 0)], m[(1, 0)] - m[(0, 1)]);
        if theta.sin() > 1e-6 {
            return skew / (2.0 * theta.sin());
        }
        if theta < 1.0 {
            return Vector3::z();
        }
        // Near a half-turn (R + I)/2 ≈ uuᵀ.
        let b = (m + Matrix3::identity()) * 0.5;
        let k = (0..3).max_by(|&i, &j| b[(i, i)].total_cmp(&b[(j, j)])).unwrap();
        let mut u = b.column(k).into_owned().normalize();
        if u.dot(&skew) < 0.0 {
            u = -u;
        }
        u
    }

    pub fn compose(&self, other: &Rotation3) -> Rotation3 {
        Rotation3(self.0 * other.0)
    }
}

/// Rodrigues' formula `cos ψ I + sin ψ [u]_× + (1 − cos ψ) uuᵀ`.
pub fn axis_angle_to_matrix(axis: [f64; 3], psi: f64) -> Result<Rotation3> {
    let u = Vector3::from(axis);
    let norm = u.norm();
    if !((norm - 1.0).abs() <= 1e-10) {
        return Err(Error::InvalidAxis(norm));
    }
    Ok(Rotation3(rodrigues(&u, psi)))
}

fn rodrigues(u: &Vector3<f64>, psi: f64) -> Matrix3<f64> {
    let (s, c) = psi.sin_cos();
    c * Matrix3::identity() + s * u.cross_matrix() + (1.0 - c) * (u * u.transpose())
}

/// `arccos(clamp((tr R − 1)/2, −1, 1))`.
pub fn rotation_angle(r: &Rotation3) -> f64 {
    ((r.0.trace() - 1.0) / 2.0).clamp(-1.0, 1.0).acos()
}

fn uniform_on_sphere<R: Rng + ?Sized>(rng: &mut R) -> Vector3<f64> {
    let p: [f64; 3] = UnitSphere.sample(rng);
    Vector3::from(p)
}

/// Haar rotation by the subgroup algorithm: a uniform rotation about the
/// north pole, followed by a rotation carrying the north pole to a uniform
/// point on the sphere.
pub fn sample_haar_so3<R: Rng + ?Sized>(rng: &mut R) -> Rotation3 {
    let psi = rng.random::<f64>() * TAU;
    let about_pole = rodrigues(&Vector3::z(), psi);
    let target = uniform_on_sphere(rng);
    Rotation3(pole_to(&target) * about_pole)
}

/// Rotation about `e_z × target` by the angle between them; a fixed
/// half-turn about `e_x` at the antipode.
fn pole_to(target: &Vector3<f64>) -> Matrix3<f64> {
    let axis = Vector3::z().cross(target);
    let s = axis.norm();
    if s < 1e-12 {
        return if target.z > 0.0 {
            Matrix3::identity()
        } else {
            rodrigues(&Vector3::x(), PI)
        };
    }
    let angle = s.atan2(target.z);
    rodrigues(&(axis / s), angle)
}

/// Range of the rotation angle used by the naive sampler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum NaiveAngleRange {
    /// `ψ ~ U[0, 2π)`.
    #[default]
    Full,
    /// `ψ ~ U[0, π]`.
    Half,
}

/// Uniform axis and independent uniform angle. Not Haar: the folded angle is
/// uniform on `[0, π]` instead of having density `(1 − cos θ)/π`.
pub fn sample_naive_so3<R: Rng + ?Sized>(rng: &mut R, range: NaiveAngleRange) -> Rotation3 {
    let axis = uniform_on_sphere(rng);
    let span = match range {
        NaiveAngleRange::Full => TAU,
        NaiveAngleRange::Half => PI,
    };
    let psi = rng.random::<f64>() * span;
    Rotation3(rodrigues(&axis, psi))
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(gaussian(rng), gaussian(rng)) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar element of `O(n)` (or `SO(n)` when `special`): QR of a Gaussian
/// matrix with the signs of `diag(R)` moved into `Q`.
pub fn haar_orthogonal<R: Rng + ?Sized>(n: usize, special: bool, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| gaussian(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    if special && q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

/// Haar element of `U(n)`: QR of a complex Gaussian matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(n, n, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Quaternionic partner of a column `(a; b)`: `(−conj b; conj a)`.
fn symplectic_partner(v: &DVector<Complex64>, m: usize) -> DVector<Complex64> {
    DVector::from_fn(2 * m, |i, _| if i < m { -v[i + m].conj() } else { v[i - m].conj() })
}

/// Haar element of the compact symplectic group `USp(2m)` as a `2m x 2m`
/// unitary matrix, by Gram-Schmidt on complex Gaussian columns that keeps
/// column `k + m` equal to the quaternionic partner of column `k`.
pub fn haar_symplectic<R: Rng + ?Sized>(m: usize, rng: &mut R) -> DMatrix<Complex64> {
    let n = 2 * m;
    let mut q = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..m {
        let mut v = DVector::from_fn(n, |_, _| complex_gaussian(rng));
        // Two passes of classical Gram-Schmidt.
        for _ in 0..2 {
            for j in (0..k).chain(m..m + k) {
                let u = q.column(j);
                let proj = u.dotc(&v);
                v -= u * proj;
            }
        }
        let norm = v.norm();
        v /= Complex64::new(norm, 0.0);
        let w = symplectic_partner(&v, m);
        q.set_column(k, &v);
        q.set_column(k + m, &w);
    }
    q
}

const MAX_SPECTRUM_ATTEMPTS: usize = 100;

/// Eigen-angles in `(0, π)` from the eigenvalues with positive imaginary part,
/// sorted by descending cosine. `None` if the count is wrong or two folded
/// angles collide.
fn fold_upper_half(eigenvalues: impl Iterator<Item = Complex64>, m: usize) -> Option<Vec<f64>> {
    let mut angles: Vec<f64> = eigenvalues.filter(|e| e.im > 0.0).map(|e| e.arg()).collect();
    if angles.len() != m || angles.iter().any(|a| !(*a > 0.0 && *a < PI)) {
        return None;
    }
    angles.sort_by(f64::total_cmp);
    let collide = angles
        .windows(2)
        .any(|w| (w[0].cos() - w[1].cos()).abs() < DEFAULT_DEGENERACY_TOLERANCE);
    (!collide).then_some(angles)
}

/// Half-spectrum of a Haar element of `SO(2m+1)`, `Sp(2m)` or `SO(2m)`.
/// The forced eigenvalue 1 of `SO(2m+1)` is dropped.
pub fn sample_haar_spectrum<R: Rng + ?Sized>(group: GroupTag, m: usize, rng: &mut R) -> Result<HalfSpectrum> {
    if m == 0 {
        return Err(Error::InvalidParameter("rank must be at least 1".into()));
    }
    for _ in 0..MAX_SPECTRUM_ATTEMPTS {
        let folded = match group {
            GroupTag::SoOdd => {
                let q = haar_orthogonal(2 * m + 1, true, rng);
                fold_upper_half(q.complex_eigenvalues().iter().copied(), m)
            }
            GroupTag::SoEven => {
                let q = haar_orthogonal(2 * m, true, rng);
                fold_upper_half(q.complex_eigenvalues().iter().copied(), m)
            }
            GroupTag::Sp => {
                let q = haar_symplectic(m, rng);
                q.schur().eigenvalues().and_then(|e| fold_upper_half(e.iter().copied(), m))
            }
            GroupTag::OOdd => {
                return Err(Error::InvalidParameter(
                    "Haar spectra are provided for so-odd, sp and so-even".into(),
                ))
            }
        };
        if let Some(angles) = folded {
            return HalfSpectrum::new(group, angles);
        }
    }
    Err(Error::DegenerateSpectrum(format!(
        "no generic {group} spectrum after {MAX_SPECTRUM_ATTEMPTS} draws"
    )))
}

/// Eigenphases of a Haar element of `U(n)`, sorted ascending.
pub fn sample_unitary_spectrum<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<UnitarySpectrum> {
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    for _ in 0..MAX_SPECTRUM_ATTEMPTS {
        let q = haar_unitary(n, rng);
        if let Some(e) = q.schur().eigenvalues() {
            let mut phases: Vec<f64> = e.iter().map(|v| v.arg().rem_euclid(TAU)).collect();
            phases.sort_by(f64::total_cmp);
            return UnitarySpectrum::new(phases);
        }
    }
    Err(Error::DegenerateSpectrum(format!("Schur form of a U({n}) draw did not converge")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_rotation(r: &Rotation3) {
        let m = r.matrix();
        assert!((m.transpose() * m - Matrix3::identity()).abs().max() < 1e-12);
        assert!((m.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let draw = |s: RngStream| -> Vec<u64> {
            let mut rng = s.rng();
            (0..4).map(|_| rng.random()).collect()
        };
        assert_eq!(draw(RngStream::new(7, 3)), draw(RngStream::new(7, 3)));
        assert_ne!(draw(RngStream::new(7, 3)), draw(RngStream::new(7, 4)));
        assert_ne!(draw(RngStream::new(7, 3)), draw(RngStream::new(8, 3)));
    }

    #[test]
    fn axis_angle_examples() {
        let r = axis_angle_to_matrix([0.0, 0.6, 0.8], 0.0).unwrap();
        assert!((r.matrix() - Matrix3::identity()).abs().max() < 1e-15);
        let r = axis_angle_to_matrix([0.0, 0.0, 1.0], PI / 2.0).unwrap();
        let ex = r.matrix() * Vector3::x();
        assert!((ex - Vector3::y()).norm() < 1e-15);
        let u = [0.48, 0.6, 0.64];
        let r = axis_angle_to_matrix(u, 0.7).unwrap();
        assert!((rotation_angle(&r) - 0.7).abs() < 1e-12);
        let r = axis_angle_to_matrix(u, 2.0).unwrap();
        assert!((r.angle() - 2.0).abs() < 1e-12);
        assert!((r.axis() - Vector3::from(u)).norm() < 1e-12);
    }

    #[test]
    fn axis_must_be_unit() {
        assert!(matches!(axis_angle_to_matrix([1.0, 1.0, 0.0], 0.3), Err(Error::InvalidAxis(_))));
    }

    #[test]
    fn rotation_angle_examples() {
        assert_eq!(rotation_angle(&Rotation3::identity()), 0.0);
        let half_turn = Rotation3::from_matrix(Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, -1.0))).unwrap();
        assert!((rotation_angle(&half_turn) - PI).abs() < 1e-15);
        assert!((half_turn.axis().x.abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn from_matrix_rejects_reflections() {
        let reflection = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0));
        assert!(Rotation3::from_matrix(reflection).is_err());
    }

    #[test]
    fn samplers_produce_rotations() {
        let mut rng = RngStream::new(1, 0).rng();
        for _ in 0..500 {
            assert_rotation(&sample_haar_so3(&mut rng));
            assert_rotation(&sample_naive_so3(&mut rng, NaiveAngleRange::Full));
            assert_rotation(&sample_naive_so3(&mut rng, NaiveAngleRange::Half));
        }
    }

    #[test]
    fn pole_section_handles_antipode() {
        let k = pole_to(&Vector3::new(0.0, 0.0, -1.0));
        assert!((k * Vector3::z() + Vector3::z()).norm() < 1e-15);
        let t = Vector3::new(0.3, -0.4, 0.5).normalize();
        assert!((pole_to(&t) * Vector3::z() - t).norm() < 1e-14);
    }

    #[test]
    fn haar_matrices_are_in_their_groups() {
        let mut rng = RngStream::new(2, 0).rng();
        for n in 1..6 {
            let q = haar_orthogonal(n, true, &mut rng);
            assert!((q.transpose() * &q - DMatrix::identity(n, n)).abs().max() < 1e-12);
            assert!((q.determinant() - 1.0).abs() < 1e-12);
            let u = haar_unitary(n, &mut rng);
            let defect = (u.adjoint() * &u - DMatrix::<Complex64>::identity(n, n)).map(|c| c.norm()).max();
            assert!(defect < 1e-12);
        }
        for m in 1..4 {
            let s = haar_symplectic(m, &mut rng);
            let n = 2 * m;
            let defect = (s.adjoint() * &s - DMatrix::<Complex64>::identity(n, n)).map(|c| c.norm()).max();
            assert!(defect < 1e-12);
            // Uᵀ J U = J
            let mut j = DMatrix::<Complex64>::zeros(n, n);
            for i in 0..m {
                j[(i, i + m)] = Complex64::new(1.0, 0.0);
                j[(i + m, i)] = Complex64::new(-1.0, 0.0);
            }
            let defect = (s.transpose() * &j * &s - &j).map(|c| c.norm()).max();
            assert!(defect < 1e-12);
        }
    }

    #[test]
    fn spectra_have_rank_m_and_open_angles() {
        let mut rng = RngStream::new(3, 0).rng();
        for group in [GroupTag::SoOdd, GroupTag::Sp, GroupTag::SoEven] {
            for m in 1..4 {
                let s = sample_haar_spectrum(group, m, &mut rng).unwrap();
                assert_eq!(s.rank(), m);
                assert_eq!(s.group(), group);
                assert!(s.angles().iter().all(|&a| a > 0.0 && a < PI));
                assert!(s.angles().windows(2).all(|w| w[0].cos() > w[1].cos()));
            }
        }
        assert!(sample_haar_spectrum(GroupTag::OOdd, 1, &mut rng).is_err());
    }

    #[test]
    fn so3_spectrum_matches_rotation_angle_law() {
        // The SO(3) eigen-angle is the rotation angle.
        let mut rng = RngStream::new(4, 0).rng();
        let q = haar_orthogonal(3, true, &mut rng);
        let r = Rotation3::from_matrix(Matrix3::from_iterator(q.iter().copied())).unwrap();
        let s = fold_upper_half(q.complex_eigenvalues().iter().copied(), 1).unwrap();
        assert!((s[0] - r.angle()).abs() < 1e-10);
    }

    #[test]
    fn unitary_spectrum_dimension() {
        let mut rng = RngStream::new(5, 0).rng();
        let s = sample_unitary_spectrum(4, &mut rng).unwrap();
        assert_eq!(s.dim(), 4);
        assert!(sample_unitary_spectrum(0, &mut rng).is_err());
    }
}
