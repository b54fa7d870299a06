//! Dense symmetric linear algebra used across the crate.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Eigenvalues below this are treated as zero when forming pseudo-inverses
/// and range/null-space bases.
pub const RANK_TOL: f64 = 1e-10;

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

const JACOBI_SWEEPS: usize = 30;

/// Eigen-decomposition of the symmetric part of `m`.
///
/// The QR-iteration result can be off by ~1e-7 for tightly clustered
/// eigenvalues, so it is polished with cyclic Jacobi sweeps on `Vᵀ M V`,
/// which is already nearly diagonal and converges quadratically.
pub fn sym_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let sym = symmetrize(m);
    let eig = SymmetricEigen::new(sym.clone());
    let mut v = eig.eigenvectors;
    let mut a = symmetrize(&(v.transpose() * &sym * &v));
    jacobi_polish(&mut a, &mut v);
    (a.diagonal(), v)
}

fn jacobi_polish(a: &mut DMatrix<f64>, v: &mut DMatrix<f64>) {
    let n = a.nrows();
    // Off-diagonal entries below roundoff of the whole matrix are left alone.
    let tiny = a.norm() * f64::EPSILON;
    if n < 2 || tiny == 0.0 {
        return;
    }
    for _ in 0..JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() <= tiny {
                    continue;
                }
                rotated = true;
                let tau = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
}

/// `U diag(vals) Uᵀ`, symmetrized.
pub fn from_spectrum(vecs: &DMatrix<f64>, vals: &DVector<f64>) -> DMatrix<f64> {
    let mut scaled = vecs.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= vals[j];
    }
    symmetrize(&(scaled * vecs.transpose()))
}

/// Applies `f` to every eigenvalue of the symmetric matrix `m`.
pub fn map_spectrum(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let (vals, vecs) = sym_eigen(m);
    from_spectrum(&vecs, &vals.map(f))
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    let (vals, _) = sym_eigen(m);
    vals.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Eigenvalues sorted in descending order.
pub fn sorted_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let (vals, _) = sym_eigen(m);
    let mut v: Vec<f64> = vals.iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Orthonormal basis (as columns) of the eigenvectors of symmetric `m` whose
/// eigenvalues satisfy `keep`.
pub fn eigen_basis(m: &DMatrix<f64>, keep: impl Fn(f64) -> bool) -> DMatrix<f64> {
    let (vals, vecs) = sym_eigen(m);
    let cols: Vec<_> = (0..vals.len())
        .filter(|&i| keep(vals[i]))
        .map(|i| vecs.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(m.nrows(), 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Pseudo-inverse of a symmetric PSD matrix with eigenvalue cutoff `tol`.
pub fn pinv_sym(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    map_spectrum(m, |s| if s > tol { 1.0 / s } else { 0.0 })
}

/// Ridge regression: the `W` minimizing `‖W X − Y‖² + ridge ‖W‖²` where
/// columns of `inputs` (X) and `targets` (Y) are paired samples.
pub fn ridge_regression(
    inputs: &DMatrix<f64>,
    targets: &DMatrix<f64>,
    ridge: f64,
) -> Result<DMatrix<f64>> {
    if inputs.ncols() != targets.ncols() {
        return Err(Error::DimensionMismatch {
            expected: inputs.ncols(),
            got: targets.ncols(),
        });
    }
    let k = inputs.nrows();
    let gram = inputs * inputs.transpose() + DMatrix::identity(k, k) * ridge;
    let cross = inputs * targets.transpose();
    let chol = gram.cholesky().ok_or_else(|| {
        Error::InvalidParameter("ridge normal equations are not positive definite".into())
    })?;
    Ok(chol.solve(&cross).transpose())
}

/// Largest eigenvalue magnitude of a general square matrix.
pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

pub fn frobenius_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ridge_recovers_exact_map() {
        let x = DMatrix::from_row_slice(2, 4, &[1.0, 0.0, 2.0, -1.0, 0.0, 1.0, 1.0, 3.0]);
        let w = DMatrix::from_row_slice(1, 2, &[0.5, -2.0]);
        let y = &w * &x;
        let fit = ridge_regression(&x, &y, 1e-12).unwrap();
        assert!((fit - w).norm() < 1e-9);
    }

    #[test]
    fn ridge_shrinks_towards_zero() {
        let x = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let y = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        // (x xᵀ + r)⁻¹ x yᵀ = 2 / (2 + 2)
        let fit = ridge_regression(&x, &y, 2.0).unwrap();
        assert!((fit[(0, 0)] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn spectral_radius_of_rotation() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, -2.0, 2.0, 0.0]);
        assert!((spectral_radius(&m) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn pinv_drops_null_space() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 0.0]));
        let p = pinv_sym(&m, RANK_TOL);
        assert!((p[(0, 0)] - 0.25).abs() < 1e-15);
        assert_eq!(p[(1, 1)], 0.0);
    }

    #[test]
    fn eigen_reconstructs_clustered_spectra() {
        let n = 10;
        let g = DMatrix::from_fn(n, n, |i, j| ((i * 7 + j * 3) as f64).sin());
        let q = g.qr().q();
        let vals = DVector::from_fn(n, |i, _| 0.98 + 1e-3 * i as f64);
        let m = from_spectrum(&q, &vals);
        let (ev, vecs) = sym_eigen(&m);
        let back = &vecs * DMatrix::from_diagonal(&ev) * vecs.transpose();
        assert!((back - &m).norm() < 1e-14);
        assert!((vecs.transpose() * &vecs - DMatrix::identity(n, n)).norm() < 1e-14);
    }
}
