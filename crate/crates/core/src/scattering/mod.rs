//! Input-output scattering of the monitored channels.

pub mod closed_form;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{invert, ComplexMat, Matrix, RealMat, Scalar};
use crate::model::{LinearNetwork, LoopParams, ModePair, TmsParams};

/// Imaginary parts below this are discarded when a resonant result is made real.
pub const REAL_TOL: f64 = 1e-12;

/// Block norms below this count as a forbidden transmission direction.
pub const FORBIDDEN_NORM: f64 = 1e-10;

/// Both directional norms below this and the pair is reported as decoupled.
pub const DECOUPLED_NORM: f64 = 1e-13;

/// Scattering at `+ω` together with `-ω`, as needed for symmetrised spectra.
#[derive(Debug, Clone)]
pub struct ScatteringResult {
    pub omega: f64,
    /// Monitored input to monitored output at `+ω`.
    pub s_e: ComplexMat,
    /// Internal noise to monitored output at `+ω`.
    pub t_int: ComplexMat,
    pub s_e_neg: ComplexMat,
    pub t_int_neg: ComplexMat,
}

impl ScatteringResult {
    /// `s_e` as a real matrix, if its imaginary part is negligible.
    pub fn s_e_real(&self) -> Option<RealMat> {
        (self.s_e.max_imag() < REAL_TOL).then(|| self.s_e.re())
    }

    pub fn t_int_real(&self) -> Option<RealMat> {
        (self.t_int.max_imag() < REAL_TOL).then(|| self.t_int.re())
    }
}

/// 2x2 block `(j, k)` with 1-based mode labels: input `k` to output `j`.
pub fn block<T: Scalar>(m: &Matrix<T>, j: usize, k: usize) -> Matrix<T> {
    m.block(2 * (j - 1), 2 * (k - 1), 2, 2)
}

fn transfer<N: LinearNetwork + ?Sized>(p: &N, omega: f64) -> Result<(ComplexMat, ComplexMat)> {
    let m = p.dynamical_matrix().to_complex();
    let n = m.rows();
    let mut a = m;
    for i in 0..n {
        a[(i, i)] += Complex64::new(0.0, omega);
    }
    let res = invert(&a)?;
    let ke = p.sqrt_kappa_e().to_complex();
    let ki = p.sqrt_kappa_int().to_complex();
    let left = &ke * &res;
    let s_e = &ComplexMat::identity(n) + &(&left * &ke);
    let t_int = &left * &ki;
    Ok((s_e, t_int))
}

/// `S_e = I + √κ_e (iω + M)⁻¹ √κ_e` and `T_int = √κ_e (iω + M)⁻¹ √κ_int`.
pub fn scattering_at<N: LinearNetwork + ?Sized>(p: &N, omega: f64) -> Result<ScatteringResult> {
    if !omega.is_finite() {
        return Err(Error::invalid("omega", "must be finite"));
    }
    let (s_e, t_int) = transfer(p, omega)?;
    let (s_e_neg, t_int_neg) = if omega == 0.0 {
        (s_e.clone(), t_int.clone())
    } else {
        transfer(p, -omega)?
    };
    Ok(ScatteringResult {
        omega,
        s_e,
        t_int,
        s_e_neg,
        t_int_neg,
    })
}

/// Real `(S_e, T_int)` on resonance, losses allowed.
pub fn scattering_zero_frequency<N: LinearNetwork + ?Sized>(p: &N) -> Result<(RealMat, RealMat)> {
    let (s_e, t_int) = transfer(p, 0.0)?;
    Ok((s_e.re(), t_int.re()))
}

/// Resonant scattering matrix of a lossless loop.
pub fn scattering_resonant(p: &LoopParams) -> Result<RealMat> {
    if !p.is_lossless() {
        return Err(Error::Precondition(
            "resonant closed form needs kappa_int = 0 on every mode".into(),
        ));
    }
    Ok(scattering_zero_frequency(p)?.0)
}

/// `r = artanh(2√C / (1 + C))`, the squeezing of a below-threshold amplifier.
pub fn squeezing_parameter(c: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&c) {
        return Err(Error::Domain(format!("cooperativity {c} not in [0, 1)")));
    }
    Ok((2.0 * c.sqrt() / (1.0 + c)).atanh())
}

/// Resonant scattering of the open two-mode squeezer.
pub fn tms_scattering(p: &TmsParams) -> Result<RealMat> {
    if p.c12 >= 1.0 {
        return Err(Error::Unstable {
            max_real_part: crate::model::max_drift_real_part(p)?,
        });
    }
    Ok(scattering_zero_frequency(p)?.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum NonreciprocityDegree {
    Degree(f64),
    /// Neither direction transmits; the ratio is undefined.
    Decoupled,
}

impl NonreciprocityDegree {
    pub fn value(self) -> Option<f64> {
        match self {
            Self::Degree(v) => Some(v),
            Self::Decoupled => None,
        }
    }
}

/// Transmission direction for a pair `(j, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Only `a_j -> a_k`.
    Forward,
    /// Only `a_j <- a_k`.
    Backward,
    Bidirectional,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonreciprocityReport {
    pub pair: ModePair,
    pub omega: f64,
    pub degree: NonreciprocityDegree,
    pub direction: Direction,
    /// `||S_kj||`, transmission from `a_j` to `a_k`.
    pub norm_forward: f64,
    /// `||S_jk||`, transmission from `a_k` to `a_j`.
    pub norm_backward: f64,
    /// `||S_ll||` for every mode.
    pub impedance: Vec<f64>,
}

impl NonreciprocityReport {
    pub fn describe(&self) -> String {
        let (j, k) = (self.pair.0, self.pair.1);
        match self.direction {
            Direction::Forward => format!("a{j} -> a{k}"),
            Direction::Backward => format!("a{j} <- a{k}"),
            Direction::Bidirectional => format!("a{j} <-> a{k}"),
            Direction::None => "decoupled".into(),
        }
    }
}

/// `||abs S_jk - abs S_kj|| / (||S_jk|| + ||S_kj||)` from a scattering matrix.
///
/// `abs` is the entrywise modulus, so complex blocks off resonance are allowed.
pub fn nonreciprocity_of(s: &ComplexMat, pair: ModePair, omega: f64) -> Result<NonreciprocityReport> {
    let n_modes = s.rows() / 2;
    pair.check_within(n_modes)?;
    let (j, k) = (pair.0, pair.1);
    let s_jk = block(s, j, k);
    let s_kj = block(s, k, j);
    let norm_backward = s_jk.frobenius();
    let norm_forward = s_kj.frobenius();
    let denom = norm_forward + norm_backward;
    let (degree, direction) = if denom <= DECOUPLED_NORM {
        (NonreciprocityDegree::Decoupled, Direction::None)
    } else {
        let diff = &s_jk.abs_entrywise() - &s_kj.abs_entrywise();
        let n = (diff.frobenius() / denom).clamp(0.0, 1.0);
        let dir = if norm_backward < FORBIDDEN_NORM {
            Direction::Forward
        } else if norm_forward < FORBIDDEN_NORM {
            Direction::Backward
        } else {
            Direction::Bidirectional
        };
        (NonreciprocityDegree::Degree(n), dir)
    };
    let impedance = (1..=n_modes).map(|l| block(s, l, l).frobenius()).collect();
    Ok(NonreciprocityReport {
        pair,
        omega,
        degree,
        direction,
        norm_forward,
        norm_backward,
        impedance,
    })
}

/// Nonreciprocity of the monitored scattering at detuning `omega`.
pub fn nonreciprocity_at<N: LinearNetwork + ?Sized>(
    p: &N,
    pair: ModePair,
    omega: f64,
) -> Result<NonreciprocityReport> {
    let s = scattering_at(p, omega)?;
    nonreciprocity_of(&s.s_e, pair, omega)
}

/// Resonant nonreciprocity.
pub fn nonreciprocity<N: LinearNetwork + ?Sized>(p: &N, pair: ModePair) -> Result<NonreciprocityReport> {
    nonreciprocity_at(p, pair, 0.0)
}
