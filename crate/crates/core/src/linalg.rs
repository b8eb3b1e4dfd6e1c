//! Small dense determinants.

use nalgebra::ComplexField;

/// Determinant of a row-major `n x n` matrix by Gaussian elimination with
/// partial pivoting. The input buffer is overwritten.
pub fn det_in_place<T>(a: &mut [T], n: usize) -> T
where
    T: ComplexField<RealField = f64> + Copy,
{
    debug_assert_eq!(a.len(), n * n);
    let mut det = T::one();
    for col in 0..n {
        let mut pivot = col;
        let mut best = a[col * n + col].modulus();
        for row in col + 1..n {
            let v = a[row * n + col].modulus();
            if v > best {
                best = v;
                pivot = row;
            }
        }
        if best == 0.0 {
            return T::zero();
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det *= p;
        for row in col + 1..n {
            let factor = a[row * n + col] / p;
            if factor == T::zero() {
                continue;
            }
            for k in col + 1..n {
                let v = a[col * n + k];
                a[row * n + k] -= factor * v;
            }
        }
    }
    det
}

/// Determinant of the matrix with entries `entry(i, j)`.
pub fn det_from_fn<T, F>(n: usize, mut entry: F) -> T
where
    T: ComplexField<RealField = f64> + Copy,
    F: FnMut(usize, usize) -> T,
{
    let mut a = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            a.push(entry(i, j));
        }
    }
    det_in_place(&mut a, n)
}
