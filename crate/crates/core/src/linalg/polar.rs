use serde::Serialize;

use super::eigen::sqrt_spd;
use super::matrix::RealMat;
use super::solve::invert;
use super::LinalgError;

/// Which side the positive factor sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PolarSide {
    /// `S = R U`
    Left,
    /// `S = U R`
    Right,
}

impl std::str::FromStr for PolarSide {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "left" => Ok(PolarSide::Left),
            "right" => Ok(PolarSide::Right),
            other => Err(format!("unknown polar side `{other}` (expected left|right)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PolarFactors {
    /// Symmetric positive-definite factor.
    pub r: RealMat,
    /// Orthogonal factor.
    pub u: RealMat,
    pub side: PolarSide,
}

impl PolarFactors {
    pub fn product(&self) -> RealMat {
        match self.side {
            PolarSide::Left => &self.r * &self.u,
            PolarSide::Right => &self.u * &self.r,
        }
    }
}

/// Polar decomposition of an invertible matrix.
///
/// Left: `R = (S S^T)^{1/2}`, `U = R^{-1} S`. Right: `R = (S^T S)^{1/2}`, `U = S R^{-1}`.
pub fn polar(s: &RealMat, side: PolarSide) -> Result<PolarFactors, LinalgError> {
    s.require_square()?;
    // fail early with a pivot report when S itself is singular
    invert(s)?;
    let st = s.transpose();
    let (r, u) = match side {
        PolarSide::Left => {
            let r = sqrt_spd(&(s * &st).symmetrized())?;
            let u = &invert(&r)? * s;
            (r, u)
        }
        PolarSide::Right => {
            let r = sqrt_spd(&(&st * s).symmetrized())?;
            let u = s * &invert(&r)?;
            (r, u)
        }
    };
    Ok(PolarFactors { r, u, side })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{expm, symplectic_form, tol};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check_factors(s: &RealMat, f: &PolarFactors) {
        let n = s.rows();
        assert!(f.r.asymmetry() < 1e-10);
        assert!((&f.u.transpose() * &f.u).max_abs_diff(&RealMat::identity(n)) < 1e-9);
        assert!(f.product().max_abs_diff(s) < tol::POLAR_RECONSTRUCTION);
    }

    #[test]
    fn orthogonal_input_has_identity_positive_part() {
        let th = 0.4_f64;
        let q = RealMat::from_rows(&[[th.cos(), th.sin()], [-th.sin(), th.cos()]]);
        for side in [PolarSide::Left, PolarSide::Right] {
            let f = polar(&q, side).unwrap();
            assert!(f.r.max_abs_diff(&RealMat::identity(2)) < 1e-14);
            assert!(f.u.max_abs_diff(&q) < 1e-14);
        }
    }

    #[test]
    fn spd_input_has_identity_orthogonal_part() {
        let p = RealMat::from_rows(&[[2.0, 0.5], [0.5, 1.0]]);
        for side in [PolarSide::Left, PolarSide::Right] {
            let f = polar(&p, side).unwrap();
            assert!(f.u.max_abs_diff(&RealMat::identity(2)) < 1e-13);
            assert!(f.r.max_abs_diff(&p) < 1e-13);
        }
    }

    #[test]
    fn singular_input_rejected() {
        let s = RealMat::from_rows(&[[1.0, 1.0], [1.0, 1.0]]);
        assert!(matches!(
            polar(&s, PolarSide::Left),
            Err(LinalgError::Singular { .. })
        ));
    }

    #[test]
    fn random_symplectic_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let omega = symplectic_form(3);
        for _ in 0..200 {
            let a = RealMat::from_fn(6, 6, |_, _| rng.gen_range(-0.5..0.5));
            let s = expm(&(&omega * &(&a + &a.transpose()))).unwrap();
            for side in [PolarSide::Left, PolarSide::Right] {
                let f = polar(&s, side).unwrap();
                check_factors(&s, &f);
                // factors of a symplectic matrix are themselves symplectic
                assert!(crate::linalg::symplectic_residual(&f.r) < 1e-9);
                assert!(crate::linalg::symplectic_residual(&f.u) < 1e-9);
            }
        }
    }

    #[test]
    fn sqrt_of_s_st_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let omega = symplectic_form(3);
        let a = RealMat::from_fn(6, 6, |_, _| rng.gen_range(-0.5..0.5));
        let s = expm(&(&omega * &(&a + &a.transpose()))).unwrap();
        let sst = &s * &s.transpose();
        let r = sqrt_spd(&sst.symmetrized()).unwrap();
        assert!((&r * &r).max_abs_diff(&sst) < 1e-9);
    }
}
