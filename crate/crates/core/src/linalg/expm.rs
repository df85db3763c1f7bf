use super::matrix::RealMat;
use super::{tol, LinalgError};

fn one_norm(m: &RealMat) -> f64 {
    (0..m.cols())
        .map(|j| (0..m.rows()).map(|i| m[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring around a truncated Taylor series.
///
/// The argument is scaled by `2^-s` until its 1-norm is at most 1/2; the
/// series is summed until the last term falls below `tol::EXPM_REL * 2^-s`
/// relative to the partial sum, then squared `s` times.
pub fn expm(g: &RealMat) -> Result<RealMat, LinalgError> {
    let n = g.require_square()?;
    if !g.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let norm = one_norm(g);
    let mut squarings = 0u32;
    let mut scaled_norm = norm;
    while scaled_norm > 0.5 {
        scaled_norm *= 0.5;
        squarings += 1;
    }
    let a = g.scale(0.5f64.powi(squarings as i32));

    // squaring amplifies the truncation error by roughly 2^s
    let stop = tol::EXPM_REL * 0.5f64.powi(squarings as i32);
    let mut sum = RealMat::identity(n);
    let mut term = RealMat::identity(n);
    for k in 1..64 {
        term = (&term * &a).scale(1.0 / k as f64);
        sum = &sum + &term;
        if term.max_abs() <= stop * sum.max_abs() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{invert, symplectic_form, symplectic_residual};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn zero_gives_identity() {
        assert_eq!(expm(&RealMat::zeros(4, 4)).unwrap(), RealMat::identity(4));
    }

    #[test]
    fn quarter_turn_rotation() {
        let g = RealMat::from_rows(&[[0.0, FRAC_PI_2], [-FRAC_PI_2, 0.0]]);
        let e = expm(&g).unwrap();
        let expected = RealMat::from_rows(&[[0.0, 1.0], [-1.0, 0.0]]);
        assert!(e.max_abs_diff(&expected) < 1e-12, "{e:?}");
    }

    #[test]
    fn two_mode_squeezer_closed_form() {
        // generator Ω G for H = X1 P2 + P1 X2
        let r = 0.83_f64;
        let mut gen = RealMat::zeros(4, 4);
        gen[(0, 3)] = 1.0;
        gen[(3, 0)] = 1.0;
        gen[(1, 2)] = 1.0;
        gen[(2, 1)] = 1.0;
        let s = expm(&(&symplectic_form(2) * &gen).scale(r)).unwrap();
        let (c, sh) = (r.cosh(), r.sinh());
        let expected = RealMat::from_rows(&[
            [c, 0.0, sh, 0.0],
            [0.0, c, 0.0, -sh],
            [sh, 0.0, c, 0.0],
            [0.0, -sh, 0.0, c],
        ]);
        assert!(s.max_abs_diff(&expected) < 1e-12, "{s:?}");
        assert!(symplectic_residual(&s) < 1e-12);
    }

    #[test]
    fn exp_times_exp_neg_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..300 {
            let n = 2 + rng.gen_range(0..5);
            let mut g = RealMat::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
            let f = g.frobenius();
            g = g.scale(rng.gen_range(0.0..5.0) / f);
            let p = &expm(&g).unwrap() * &expm(&-&g).unwrap();
            assert!(p.max_abs_diff(&RealMat::identity(n)) < 1e-9);
        }
    }

    #[test]
    fn symplectic_generators_stay_symplectic() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let omega = symplectic_form(3);
        for _ in 0..200 {
            let a = RealMat::from_fn(6, 6, |_, _| rng.gen_range(-0.6..0.6));
            let sym = (&a + &a.transpose()).scale(0.5);
            let s = expm(&(&omega * &sym)).unwrap();
            assert!(symplectic_residual(&s) < 1e-9);
            let inv = invert(&s).unwrap();
            assert!((&s * &inv).max_abs_diff(&RealMat::identity(6)) < 1e-10);
        }
    }
}
