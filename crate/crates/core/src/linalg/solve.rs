use super::matrix::{Matrix, Scalar};
use super::{tol, LinalgError};

/// Gauss-Jordan inverse with partial pivoting.
///
/// A pivot smaller than `tol::SINGULAR_PIVOT_REL` times the largest input
/// entry is reported as [`LinalgError::Singular`].
pub fn invert<T: Scalar>(m: &Matrix<T>) -> Result<Matrix<T>, LinalgError> {
    let n = m.require_square()?;
    solve(m, &Matrix::identity(n))
}

/// Solves `A X = B` by partial-pivot Gaussian elimination.
pub fn solve<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>, LinalgError> {
    let n = a.require_square()?;
    if b.rows() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: (n, b.cols()),
            found: (b.rows(), b.cols()),
        });
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let scale = a.max_abs();
    let threshold = tol::SINGULAR_PIVOT_REL * scale;
    if scale == 0.0 {
        return Err(LinalgError::Singular {
            pivot: 0.0,
            threshold,
        });
    }

    let mut lu = a.clone();
    let mut x = b.clone();
    let m = b.cols();

    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| lu[(i, k)].modulus().total_cmp(&lu[(j, k)].modulus()))
            .unwrap_or(k);
        let pivot = lu[(p, k)].modulus();
        if pivot < threshold || pivot == 0.0 {
            return Err(LinalgError::Singular { pivot, threshold });
        }
        lu.swap_rows(p, k);
        x.swap_rows(p, k);

        let inv_piv = T::one() / lu[(k, k)];
        for i in (k + 1)..n {
            let f = lu[(i, k)] * inv_piv;
            if f == T::zero() {
                continue;
            }
            for j in k..n {
                let v = lu[(k, j)];
                lu[(i, j)] = lu[(i, j)] - f * v;
            }
            for j in 0..m {
                let v = x[(k, j)];
                x[(i, j)] = x[(i, j)] - f * v;
            }
        }
    }

    // back substitution
    for k in (0..n).rev() {
        let inv_piv = T::one() / lu[(k, k)];
        for j in 0..m {
            let mut acc = x[(k, j)];
            for c in (k + 1)..n {
                acc = acc - lu[(k, c)] * x[(c, j)];
            }
            x[(k, j)] = acc * inv_piv;
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ComplexMat, RealMat};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_inverts_to_identity() {
        let i6 = RealMat::identity(6);
        assert_eq!(invert(&i6).unwrap(), i6);
    }

    #[test]
    fn diagonal_inverse() {
        let d = RealMat::diag(&[2.0, 4.0]);
        let inv = invert(&d).unwrap();
        assert_eq!(inv, RealMat::diag(&[0.5, 0.25]));
    }

    #[test]
    fn random_well_conditioned_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            // diagonally dominated so the condition number stays modest
            let a = RealMat::from_fn(6, 6, |i, j| {
                rng.gen_range(-1.0..1.0) + if i == j { 6.0 } else { 0.0 }
            });
            let b = invert(&a).unwrap();
            let r = (&a * &b).max_abs_diff(&RealMat::identity(6));
            assert!(r < tol::INVERSE_RESIDUAL, "residual {r}");
        }
    }

    #[test]
    fn complex_resolvent_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = ComplexMat::from_fn(6, 6, |i, j| {
            Complex64::new(
                rng.gen_range(-1.0..1.0) - if i == j { 3.0 } else { 0.0 },
                if i == j { 0.7 } else { 0.0 },
            )
        });
        let b = invert(&a).unwrap();
        assert!((&a * &b).max_abs_diff(&ComplexMat::identity(6)) < tol::INVERSE_RESIDUAL);
    }

    #[test]
    fn singular_matrix_reports_pivot() {
        let a = RealMat::from_rows(&[[1.0, 2.0], [2.0, 4.0]]);
        match invert(&a) {
            Err(LinalgError::Singular { pivot, threshold }) => {
                assert!(pivot < threshold);
            }
            other => panic!("expected singular error, got {other:?}"),
        }
        assert!(matches!(
            invert(&RealMat::zeros(3, 3)),
            Err(LinalgError::Singular { .. })
        ));
    }

    #[test]
    fn non_square_rejected() {
        assert!(matches!(
            invert(&RealMat::zeros(2, 3)),
            Err(LinalgError::NotSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn solve_matches_inverse() {
        let a = RealMat::from_rows(&[[4.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 2.0]]);
        let b = RealMat::from_rows(&[[1.0], [2.0], [3.0]]);
        let x = solve(&a, &b).unwrap();
        let x2 = &invert(&a).unwrap() * &b;
        assert!(x.max_abs_diff(&x2) < 1e-14);
        assert!((&a * &x).max_abs_diff(&b) < 1e-14);
    }
}
