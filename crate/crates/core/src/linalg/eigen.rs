use num_complex::Complex64;

use super::matrix::{ComplexMat, RealMat, Scalar};
use super::{tol, LinalgError};

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in the order of `values`.
    pub vectors: RealMat,
}

impl SymEigen {
    /// `V diag(f(λ)) V^T`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> RealMat {
        let n = self.values.len();
        let v = &self.vectors;
        RealMat::from_fn(n, n, |i, j| {
            (0..n).map(|k| v[(i, k)] * f(self.values[k]) * v[(j, k)]).sum()
        })
    }
}

fn symmetry_bound(m: &RealMat) -> f64 {
    tol::SYMMETRY * m.max_abs().max(1.0)
}

/// Cyclic Jacobi eigensolver for symmetric matrices.
///
/// The asymmetry tolerance is relative to the largest entry (absolute for
/// entries of order one).
pub fn sym_eig(m: &RealMat) -> Result<SymEigen, LinalgError> {
    let n = m.require_square()?;
    if !m.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let asym = m.asymmetry();
    if asym > symmetry_bound(m) {
        return Err(LinalgError::NotSymmetric { asymmetry: asym });
    }
    let mut a = m.symmetrized();
    let mut v = RealMat::identity(n);
    let scale = a.frobenius();

    let off_norm = |a: &RealMat| -> f64 {
        (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum::<f64>()
            .sqrt()
    };

    let mut sweeps = 0;
    while off_norm(&a) > 1e-15 * scale {
        if sweeps == tol::JACOBI_MAX_SWEEPS {
            return Err(LinalgError::NoConvergence { iterations: sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].total_cmp(&a[(y, y)]));
    let values = order.iter().map(|&k| a[(k, k)]).collect();
    let vectors = RealMat::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(SymEigen { values, vectors })
}

/// Principal square root of a symmetric positive-definite matrix.
pub fn sqrt_spd(m: &RealMat) -> Result<RealMat, LinalgError> {
    let eig = sym_eig(m)?;
    let min = eig.values.first().copied().unwrap_or(1.0);
    if min <= 0.0 {
        return Err(LinalgError::NotPositiveDefinite {
            min_eigenvalue: min,
        });
    }
    Ok(eig.reconstruct_with(f64::sqrt).symmetrized())
}

/// Eigenvalue with a unit-norm right eigenvector.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: Complex64,
    pub vector: Vec<Complex64>,
}

/// Eigenpairs of a general square matrix.
///
/// Eigenvalues come from shifted QR on the Hessenberg form; eigenvectors
/// from inverse iteration against the original matrix. Pairs are sorted by
/// descending real part, then descending imaginary part.
pub fn eig_general(m: &ComplexMat) -> Result<Vec<EigenPair>, LinalgError> {
    let n = m.require_square()?;
    if !m.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let values = hessenberg_qr_eigenvalues(m)?;
    let mut pairs = Vec::with_capacity(n);
    for value in values {
        let vector = inverse_iteration(m, value)?;
        pairs.push(EigenPair { value, vector });
    }
    pairs.sort_by(|a, b| {
        b.value
            .re
            .total_cmp(&a.value.re)
            .then(b.value.im.total_cmp(&a.value.im))
    });
    Ok(pairs)
}

/// Eigenvalues of a general complex matrix, sorted like [`eig_general`].
///
/// Unlike [`eig_general`] this does not need eigenvectors and so also
/// succeeds on defective matrices.
pub fn eigvals_general(m: &ComplexMat) -> Result<Vec<Complex64>, LinalgError> {
    m.require_square()?;
    if !m.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let mut values = hessenberg_qr_eigenvalues(m)?;
    values.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    Ok(values)
}

/// `||A v - λ v||_2` for a unit vector.
pub(crate) fn eigen_residual(m: &ComplexMat, pair: &EigenPair) -> f64 {
    let n = m.rows();
    (0..n)
        .map(|i| {
            let av: Complex64 = (0..n).map(|j| m[(i, j)] * pair.vector[j]).sum();
            (av - pair.value * pair.vector[i]).norm_sqr()
        })
        .sum::<f64>()
        .sqrt()
}

fn hessenberg(m: &ComplexMat) -> ComplexMat {
    // elimination with row pivoting, applied as a similarity transform
    let n = m.rows();
    let mut a = m.clone();
    for col in 1..n.saturating_sub(1) {
        let piv = (col..n)
            .max_by(|&x, &y| a[(x, col - 1)].norm().total_cmp(&a[(y, col - 1)].norm()))
            .unwrap_or(col);
        if piv != col {
            a.swap_rows(piv, col);
            for r in 0..n {
                let t = a[(r, piv)];
                a[(r, piv)] = a[(r, col)];
                a[(r, col)] = t;
            }
        }
        let x = a[(col, col - 1)];
        if x.norm() == 0.0 {
            continue;
        }
        for i in (col + 1)..n {
            let y = a[(i, col - 1)] / x;
            if y.norm() == 0.0 {
                continue;
            }
            for j in (col - 1)..n {
                let v = a[(col, j)];
                a[(i, j)] -= y * v;
            }
            for r in 0..n {
                let v = a[(r, i)];
                a[(r, col)] += y * v;
            }
        }
    }
    for i in 2..n {
        for j in 0..(i - 1) {
            a[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    a
}

fn givens(a: Complex64, b: Complex64) -> (Complex64, Complex64) {
    let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if r == 0.0 {
        (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    } else {
        (a / r, b / r)
    }
}

fn hessenberg_qr_eigenvalues(m: &ComplexMat) -> Result<Vec<Complex64>, LinalgError> {
    let n = m.rows();
    let mut h = hessenberg(m);
    let norm = m.max_abs().max(f64::MIN_POSITIVE);
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return Ok(out);
    }
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;

    loop {
        if hi == 0 {
            out.push(h[(0, 0)]);
            break;
        }
        let mut l = hi;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let mut diag = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if diag == 0.0 {
                diag = norm;
            }
            if sub <= f64::EPSILON * diag {
                h[(l, l - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            out.push(h[(hi, hi)]);
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > tol::QR_MAX_ITERATIONS {
            return Err(LinalgError::NoConvergence { iterations: total });
        }

        let shift = if iter % 11 == 10 {
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            let a = h[(hi - 1, hi - 1)];
            let b = h[(hi - 1, hi)];
            let c = h[(hi, hi - 1)];
            let d = h[(hi, hi)];
            let half_tr = (a + d) * 0.5;
            let disc = ((a - d) * 0.5 * ((a - d) * 0.5) + b * c).sqrt();
            let e1 = half_tr + disc;
            let e2 = half_tr - disc;
            if (e1 - d).norm() <= (e2 - d).norm() {
                e1
            } else {
                e2
            }
        };

        for k in l..=hi {
            h[(k, k)] -= shift;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..=hi {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = c.conj() * x + s.conj() * y;
                h[(k + 1, j)] = -s * x + c * y;
            }
            rots.push((c, s));
        }
        for (idx, &(c, s)) in rots.iter().enumerate() {
            let k = l + idx;
            let top = (k + 2).min(hi);
            for i in l..=top {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + y * s;
                h[(i, k + 1)] = -(x * s.conj()) + y * c.conj();
            }
        }
        for k in l..=hi {
            h[(k, k)] += shift;
        }
    }
    Ok(out)
}

/// Solves `(A - σ I) x = b`, clamping tiny pivots instead of failing.
fn shifted_solve(a: &ComplexMat, sigma: Complex64, b: &[Complex64]) -> Vec<Complex64> {
    let n = a.rows();
    let mut lu = a.clone();
    for i in 0..n {
        lu[(i, i)] -= sigma;
    }
    let mut x = b.to_vec();
    let floor = f64::EPSILON * a.max_abs().max(1.0);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| lu[(i, k)].norm().total_cmp(&lu[(j, k)].norm()))
            .unwrap_or(k);
        lu.swap_rows(p, k);
        x.swap(p, k);
        if lu[(k, k)].norm() < floor {
            lu[(k, k)] = Complex64::new(floor, 0.0);
        }
        let piv = lu[(k, k)];
        for i in (k + 1)..n {
            let f = lu[(i, k)] / piv;
            if f.norm() == 0.0 {
                continue;
            }
            for j in k..n {
                let v = lu[(k, j)];
                lu[(i, j)] -= f * v;
            }
            let xk = x[k];
            x[i] -= f * xk;
        }
    }
    for k in (0..n).rev() {
        let mut acc = x[k];
        for c in (k + 1)..n {
            acc -= lu[(k, c)] * x[c];
        }
        x[k] = acc / lu[(k, k)];
    }
    x
}

fn normalize(v: &mut [Complex64]) -> bool {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return false;
    }
    for z in v.iter_mut() {
        *z /= norm;
    }
    true
}

fn inverse_iteration(a: &ComplexMat, lambda: Complex64) -> Result<Vec<Complex64>, LinalgError> {
    let n = a.rows();
    let scale = a.max_abs().max(1.0);
    let delta = Complex64::new(1e-10 * scale, 0.0);
    let bound = tol::GENERAL_EIG_RESIDUAL * scale;
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    for attempt in 0..4 {
        let mut v: Vec<Complex64> = (0..n)
            .map(|i| {
                let t = (i + 1 + 3 * attempt) as f64;
                Complex64::new(1.0 / t, 0.1 * t.sin())
            })
            .collect();
        normalize(&mut v);
        for _ in 0..4 {
            let mut w = shifted_solve(a, lambda + delta, &v);
            if !normalize(&mut w) {
                break;
            }
            v = w;
        }
        let pair = EigenPair {
            value: lambda,
            vector: v,
        };
        let res = eigen_residual(a, &pair);
        if res <= bound {
            return Ok(pair.vector);
        }
        if best.as_ref().is_none_or(|(r, _)| res < *r) {
            best = Some((res, pair.vector));
        }
    }
    Err(LinalgError::NoConvergence {
        iterations: best.map_or(0, |_| 16),
    })
}
