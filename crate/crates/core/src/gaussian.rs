//! Output covariance matrices, symplectic invariants and two-mode entanglement.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{sqrt_spd, sym_eig, symplectic_form, ComplexMat, RealMat};
use crate::model::{require_stable, LinearNetwork, LoopParams, ModePair};
use crate::scattering::scattering_at;

/// Allowed asymmetry of a covariance matrix.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Allowed negative eigenvalue of `V + iΩ/2`, relative to `max(1, |V|_max)`.
pub const PHYSICALITY_TOL: f64 = 1e-9;
/// `|2ν₋ - 1|` below this is reported as the separability boundary.
pub const BOUNDARY_TOL: f64 = 1e-9;
/// Negative two-mode discriminant allowed before reporting an unphysical state.
pub const DISCRIMINANT_TOL: f64 = 1e-12;
/// Imaginary residue tolerated in a symmetrised spectrum.
pub const IMAG_TOL: f64 = 1e-10;

/// Symmetric matrix of symmetrised quadrature moments, vacuum variance 1/2.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    v: RealMat,
}

impl CovarianceMatrix {
    /// Validates symmetry and the uncertainty relation `V + iΩ/2 ⪰ 0`.
    pub fn new(v: RealMat) -> Result<Self> {
        if !v.is_square() || !v.rows().is_multiple_of(2) || v.rows() == 0 {
            return Err(Error::invalid(
                "covariance",
                format!("expected 2n x 2n, got {}x{}", v.rows(), v.cols()),
            ));
        }
        let asym = v.asymmetry();
        if asym > SYMMETRY_TOL * v.max_abs().max(1.0) {
            return Err(Error::Unphysical(format!("covariance asymmetry {asym:e}")));
        }
        let c = Self { v: v.symmetrized() };
        let margin = c.physicality_margin()?;
        if margin < -PHYSICALITY_TOL * c.v.max_abs().max(1.0) {
            return Err(Error::Unphysical(format!(
                "V + iΩ/2 has eigenvalue {margin:e}"
            )));
        }
        Ok(c)
    }

    /// Vacuum state of `n_modes` modes.
    pub fn vacuum(n_modes: usize) -> Self {
        Self {
            v: RealMat::identity(2 * n_modes).scale(0.5),
        }
    }

    pub fn matrix(&self) -> &RealMat {
        &self.v
    }

    pub fn into_matrix(self) -> RealMat {
        self.v
    }

    pub fn mode_count(&self) -> usize {
        self.v.rows() / 2
    }

    /// Smallest eigenvalue of `V + iΩ/2`, via its real symmetric embedding.
    pub fn physicality_margin(&self) -> Result<f64> {
        let n = self.v.rows();
        let half_omega = symplectic_form(n / 2).scale(0.5);
        let mut big = RealMat::zeros(2 * n, 2 * n);
        big.set_block(0, 0, &self.v);
        big.set_block(n, n, &self.v);
        big.set_block(0, n, &-&half_omega);
        big.set_block(n, 0, &half_omega);
        Ok(sym_eig(&big)?.values[0])
    }

    /// Reduced covariance of modes `pair.0` and `pair.1`, in that order.
    pub fn pair_block(&self, pair: ModePair) -> Result<CovarianceMatrix> {
        pair.check_within(self.mode_count())?;
        let (a, b) = pair.indices();
        let idx = [2 * a, 2 * a + 1, 2 * b, 2 * b + 1];
        let v = RealMat::from_fn(4, 4, |i, j| self.v[(idx[i], idx[j])]);
        Ok(Self { v })
    }

    /// `1 / (2^n √det V)`; equals `1/(4√det V)` for two modes.
    pub fn purity(&self) -> f64 {
        let n = self.mode_count() as i32;
        1.0 / (2f64.powi(n) * self.v.det().sqrt())
    }

    /// Flips the momentum of `mode` (0-based), i.e. transposes its density operator.
    pub fn partially_transposed(&self, mode: usize) -> RealMat {
        let mut v = self.v.clone();
        let p = 2 * mode + 1;
        for k in 0..v.rows() {
            if k != p {
                v[(p, k)] = -v[(p, k)];
                v[(k, p)] = -v[(k, p)];
            }
        }
        v
    }
}

/// Uncorrelated thermal inputs on the monitored and internal channels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputCovariance {
    pub n_th: Vec<f64>,
    pub n_th_int: Vec<f64>,
}

impl InputCovariance {
    pub fn of<N: LinearNetwork + ?Sized>(p: &N) -> Self {
        Self {
            n_th: p.modes().iter().map(|m| m.n_th).collect(),
            n_th_int: p.modes().iter().map(|m| m.n_th_int).collect(),
        }
    }

    fn thermal(n: &[f64]) -> RealMat {
        let d: Vec<f64> = n.iter().flat_map(|&x| [x + 0.5, x + 0.5]).collect();
        RealMat::diag(&d)
    }

    pub fn monitored(&self) -> RealMat {
        Self::thermal(&self.n_th)
    }

    pub fn internal(&self) -> RealMat {
        Self::thermal(&self.n_th_int)
    }
}

/// `½(A V Bᵀ + B V Aᵀ)` with `A = S[ω]`, `B = S[-ω]`.
fn symmetrised(a: &ComplexMat, b: &ComplexMat, v: &RealMat) -> ComplexMat {
    let v = v.to_complex();
    let x = &(a * &v) * &b.transpose();
    let y = &(b * &v) * &a.transpose();
    (&x + &y).scale(num_complex::Complex64::new(0.5, 0.0))
}

/// Output-field covariance at detuning `omega`, including internal-bath noise.
pub fn output_covariance<N: LinearNetwork + ?Sized>(p: &N, omega: f64) -> Result<CovarianceMatrix> {
    require_stable(p)?;
    let s = scattering_at(p, omega)?;
    let input = InputCovariance::of(p);
    let total = &symmetrised(&s.s_e, &s.s_e_neg, &input.monitored())
        + &symmetrised(&s.t_int, &s.t_int_neg, &input.internal());
    let imag = total.max_imag();
    if imag > IMAG_TOL * total.max_abs().max(1.0) {
        return Err(Error::Unphysical(format!(
            "symmetrised spectrum has imaginary part {imag:e}"
        )));
    }
    CovarianceMatrix::new(total.re())
}

/// `(ν₋, ν₊)` of a two-mode covariance, optionally partially transposed.
///
/// Uses `Δ = det A + det B ± 2 det C` and `ν∓² = (Δ ∓ √(Δ² − 4 det V)) / 2`,
/// with the small root taken as `2 det V / (Δ + √…)` to avoid cancellation.
pub fn symplectic_eig_2mode(v: &CovarianceMatrix, partial_transpose: bool) -> Result<(f64, f64)> {
    if v.mode_count() != 2 {
        return Err(Error::invalid("covariance", "two-mode block required"));
    }
    let m = v.matrix();
    let det_a = m.block(0, 0, 2, 2).det();
    let det_b = m.block(2, 2, 2, 2).det();
    let det_c = m.block(0, 2, 2, 2).det();
    let det_v = m.det();
    let sign = if partial_transpose { -1.0 } else { 1.0 };
    let delta = det_a + det_b + sign * 2.0 * det_c;
    let mut disc = delta * delta - 4.0 * det_v;
    if disc < 0.0 {
        if disc < -DISCRIMINANT_TOL * (delta * delta).max(1.0) {
            return Err(Error::Unphysical(format!(
                "negative symplectic discriminant {disc:e}"
            )));
        }
        disc = 0.0;
    }
    let root = disc.sqrt();
    let big = (delta + root) / 2.0;
    if big <= 0.0 || det_v <= 0.0 {
        return Err(Error::Unphysical("non-positive two-mode invariants".into()));
    }
    let small = det_v / big;
    Ok((small.sqrt(), big.sqrt()))
}

/// Symplectic spectrum of any covariance from the eigenvalues of `V^{1/2} Ωᵀ V Ω V^{1/2}`,
/// ascending and with the double degeneracy removed.
pub fn symplectic_spectrum(v: &RealMat) -> Result<Vec<f64>> {
    let n = v.rows();
    let omega = symplectic_form(n / 2);
    let root = sqrt_spd(&v.symmetrized())?;
    let k = &(&(&root * &omega.transpose()) * v) * &(&omega * &root);
    let eig = sym_eig(&k.symmetrized())?;
    Ok(eig
        .values
        .chunks(2)
        .map(|pair| (0.5 * (pair[0] + pair[1])).max(0.0).sqrt())
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    #[serde(rename = "e")]
    E,
    #[serde(rename = "2")]
    Two,
}

impl LogBase {
    pub fn ln_factor(self) -> f64 {
        match self {
            LogBase::E => 1.0,
            LogBase::Two => std::f64::consts::LOG2_E,
        }
    }
}

impl std::str::FromStr for LogBase {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "e" => Ok(LogBase::E),
            "2" => Ok(LogBase::Two),
            other => Err(format!("unknown log base `{other}` (expected e|2)")),
        }
    }
}

impl std::fmt::Display for LogBase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LogBase::E => "e",
            LogBase::Two => "2",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntanglementReport {
    pub pair: ModePair,
    /// Smallest symplectic eigenvalue of the partial transpose.
    pub nu_minus: f64,
    pub log_negativity: f64,
    pub purity: f64,
    /// `2ν₋ ≥ 1`, with the boundary band counted as separable.
    pub separable: bool,
    pub boundary: bool,
}

/// Entanglement and purity of one pair of a multimode covariance.
pub fn entanglement_of(v: &CovarianceMatrix, pair: ModePair, base: LogBase) -> Result<EntanglementReport> {
    let pv = v.pair_block(pair)?;
    let (nu_minus, _) = symplectic_eig_2mode(&pv, true)?;
    let x = 2.0 * nu_minus;
    let boundary = (x - 1.0).abs() < BOUNDARY_TOL;
    let separable = boundary || x >= 1.0;
    let log_negativity = (-x.ln()).max(0.0) * base.ln_factor();
    Ok(EntanglementReport {
        pair,
        nu_minus,
        log_negativity,
        purity: pv.purity(),
        separable,
        boundary,
    })
}

/// Entanglement of a pair of output fields, natural-log units.
pub fn entanglement_report<N: LinearNetwork + ?Sized>(
    p: &N,
    pair: ModePair,
    omega: f64,
) -> Result<EntanglementReport> {
    entanglement_of(&output_covariance(p, omega)?, pair, LogBase::E)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SimonVerdict {
    Decided {
        lhs: f64,
        rhs: f64,
        separable: bool,
        boundary: bool,
    },
    /// A cooperativity in a ratio vanishes.
    Decoupled,
}

impl SimonVerdict {
    pub fn separable(self) -> Option<bool> {
        match self {
            Self::Decided { separable, .. } => Some(separable),
            Self::Decoupled => None,
        }
    }
}

/// Closed-form separability of the resonant vacuum outputs of a lossless loop.
///
/// Pair (1,2): `√(C12/(C13 C23)) + √(C13 C23/C12) ≤ −2 sin φ`.
/// Pair (2,3): `√(C23/(C12 C13)) + √(C12 C13/C23) ≤ 2 sin φ`.
pub fn simon_separability_nrl(p: &LoopParams, pair: ModePair) -> Result<SimonVerdict> {
    let (num, den, rhs) = match (pair.0.min(pair.1), pair.0.max(pair.1)) {
        (1, 2) => (p.c12, p.c13 * p.c23, -2.0 * p.phi.sin()),
        (2, 3) => (p.c23, p.c12 * p.c13, 2.0 * p.phi.sin()),
        _ => {
            return Err(Error::invalid(
                "pair",
                format!("{pair} has no closed-form criterion; use (1,2) or (2,3)"),
            ))
        }
    };
    if num == 0.0 || den == 0.0 {
        return Ok(SimonVerdict::Decoupled);
    }
    let ratio = (num / den).sqrt();
    let lhs = ratio + 1.0 / ratio;
    let boundary = (lhs - rhs).abs() < BOUNDARY_TOL;
    Ok(SimonVerdict::Decided {
        lhs,
        rhs,
        separable: boundary || lhs <= rhs,
        boundary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModeParams, TmsParams};
    use crate::scattering::scattering_resonant;
    use std::f64::consts::FRAC_PI_2;

    fn pair(j: usize, k: usize) -> ModePair {
        ModePair::new(j, k).unwrap()
    }

    /// Two-mode squeezed vacuum with squeezing `r`.
    fn tmsv(r: f64) -> CovarianceMatrix {
        let (c, s) = ((2.0 * r).cosh() / 2.0, (2.0 * r).sinh() / 2.0);
        CovarianceMatrix::new(RealMat::from_rows(&[
            [c, 0.0, s, 0.0],
            [0.0, c, 0.0, -s],
            [s, 0.0, c, 0.0],
            [0.0, -s, 0.0, c],
        ]))
        .unwrap()
    }

    #[test]
    fn vacuum_invariants() {
        let v = CovarianceMatrix::vacuum(2);
        let (lo, hi) = symplectic_eig_2mode(&v, true).unwrap();
        assert!((lo - 0.5).abs() < 1e-15 && (hi - 0.5).abs() < 1e-15);
        let e = entanglement_of(&v, pair(1, 2), LogBase::E).unwrap();
        assert_eq!(e.log_negativity, 0.0);
        assert!(e.separable && e.boundary);
        assert!((e.purity - 1.0).abs() < 1e-15);
    }

    #[test]
    fn squeezed_vacuum_negativity() {
        for r in [0.1, 0.8, 1.7627] {
            let v = tmsv(r);
            let (lo, _) = symplectic_eig_2mode(&v, true).unwrap();
            assert!((lo - (-2.0 * r).exp() / 2.0).abs() < 1e-12);
            let e = entanglement_of(&v, pair(1, 2), LogBase::E).unwrap();
            assert!((e.log_negativity - 2.0 * r).abs() < 1e-12);
            let e2 = entanglement_of(&v, pair(1, 2), LogBase::Two).unwrap();
            assert!((e2.log_negativity - 2.0 * r / 2f64.ln()).abs() < 1e-12);
            assert!(!e.separable);
        }
    }

    #[test]
    fn thermal_product_is_separable() {
        let v = CovarianceMatrix::new(RealMat::diag(&[10.5, 10.5, 0.5, 0.5])).unwrap();
        let (lo, hi) = symplectic_eig_2mode(&v, true).unwrap();
        assert!((lo - 0.5).abs() < 1e-14 && (hi - 10.5).abs() < 1e-12);
        let e = entanglement_of(&v, pair(1, 2), LogBase::E).unwrap();
        assert!(e.separable);
        assert!((e.purity - 1.0 / 21.0).abs() < 1e-15);
    }

    #[test]
    fn closed_form_matches_numeric_spectrum() {
        for r in [0.0, 0.3, 1.1] {
            let v = tmsv(r);
            let (lo, hi) = symplectic_eig_2mode(&v, false).unwrap();
            let num = symplectic_spectrum(v.matrix()).unwrap();
            assert!((num[0] - lo).abs() < 1e-9 && (num[1] - hi).abs() < 1e-9);
            let pt = v.partially_transposed(1);
            let (lo_pt, _) = symplectic_eig_2mode(&v, true).unwrap();
            let num_pt = symplectic_spectrum(&pt).unwrap();
            assert!((num_pt[0] - lo_pt).abs() < 1e-9);
        }
    }

    #[test]
    fn unphysical_matrix_rejected() {
        let bad = RealMat::diag(&[0.1, 0.1, 0.5, 0.5]);
        assert!(matches!(CovarianceMatrix::new(bad), Err(Error::Unphysical(_))));
        let asym = RealMat::from_rows(&[[1.0, 0.2], [0.0, 1.0]]);
        assert!(CovarianceMatrix::new(asym).is_err());
    }

    #[test]
    fn lossless_vacuum_output_is_half_s_st() {
        let p = LoopParams::nrl_matched(0.4, 0.8, 0.9).unwrap();
        let s = scattering_resonant(&p).unwrap();
        let v = output_covariance(&p, 0.0).unwrap();
        let expected = (&s * &s.transpose()).scale(0.5);
        assert!(v.matrix().max_abs_diff(&expected) < 1e-12);
        assert!((v.purity() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn uncoupled_vacuum_output() {
        let p = LoopParams::new([ModeParams::lossless(1.0).unwrap(); 3], 0.0, 0.0, 0.0, 0.0).unwrap();
        let v = output_covariance(&p, 0.0).unwrap();
        assert!(v.matrix().max_abs_diff(&RealMat::identity(6).scale(0.5)) < 1e-15);
    }

    #[test]
    fn quarter_phase_key_points() {
        let r = 2.0 * 0.5f64.sqrt().atanh();
        let plus = LoopParams::symmetric_matched(0.5, FRAC_PI_2).unwrap();
        let e12 = entanglement_report(&plus, pair(1, 2), 0.0).unwrap();
        assert!((e12.log_negativity - 2.0 * r).abs() < 1e-9);
        assert!((e12.log_negativity - 2.0 * 3f64.acosh()).abs() < 1e-9);
        assert!((e12.purity - 1.0).abs() < 1e-9);
        let e23 = entanglement_report(&plus, pair(2, 3), 0.0).unwrap();
        assert!(e23.log_negativity.abs() < 1e-9 && e23.separable);

        let minus = LoopParams::symmetric_matched(0.5, -FRAC_PI_2).unwrap();
        let e12 = entanglement_report(&minus, pair(1, 2), 0.0).unwrap();
        assert!(e12.log_negativity.abs() < 1e-9);
        let e23 = entanglement_report(&minus, pair(2, 3), 0.0).unwrap();
        assert!((e23.purity - 1.0).abs() < 1e-9);
    }

    #[test]
    fn tms_purity_ignores_squeezing() {
        for c in [0.1, 0.5, 0.9] {
            let t = TmsParams::thermal(c, [10.0, 0.0]).unwrap();
            let e = entanglement_report(&t, pair(1, 2), 0.0).unwrap();
            assert!((e.purity - 1.0 / 21.0).abs() < 1e-10, "c={c}");
        }
    }

    #[test]
    fn unstable_rejected() {
        let t = TmsParams::thermal(1.5, [0.0, 0.0]).unwrap();
        assert!(matches!(output_covariance(&t, 0.0), Err(Error::Unstable { .. })));
    }

    #[test]
    fn off_resonance_covariance_is_physical() {
        let p = LoopParams::nrl_matched(0.5, 1.0, 0.4)
            .unwrap()
            .with_thermal([2.0, 0.0, 1.0])
            .unwrap()
            .with_loss_ratios([0.1, 0.2, 0.0])
            .unwrap();
        for w in [0.1, 0.7, 3.0] {
            let v = output_covariance(&p, w).unwrap();
            assert!(v.physicality_margin().unwrap() > -1e-9);
        }
    }

    #[test]
    fn simon_boundary_cases() {
        let p = LoopParams::nrl_matched(0.5, 0.7, -FRAC_PI_2).unwrap();
        match simon_separability_nrl(&p, pair(1, 2)).unwrap() {
            SimonVerdict::Decided { lhs, rhs, separable, boundary } => {
                assert!((lhs - 2.0).abs() < 1e-15 && (rhs - 2.0).abs() < 1e-15);
                assert!(separable && boundary);
            }
            SimonVerdict::Decoupled => panic!(),
        }
        let q = LoopParams::nrl_matched(0.5, 0.7, 0.0).unwrap();
        assert_eq!(simon_separability_nrl(&q, pair(1, 2)).unwrap().separable(), Some(false));
        let z = LoopParams::nrl_matched(0.0, 0.7, 0.0).unwrap();
        assert_eq!(simon_separability_nrl(&z, pair(1, 2)).unwrap(), SimonVerdict::Decoupled);
        assert!(simon_separability_nrl(&q, pair(1, 3)).is_err());
    }
}
