//! Gaussian-circuit factorisations of the resonant scattering matrix and the
//! two-loop entanglement-swapping figure of merit.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{expm, polar, symplectic_form, PolarFactors, PolarSide, RealMat};
use crate::model::{quarter_phase_sign, LinearNetwork, LoopParams, ModePair};
use crate::scattering::scattering_resonant;

/// Tolerance for being on the perfect-nonreciprocity manifold.
pub const MANIFOLD_TOL: f64 = 1e-12;
/// Factor agreement needed for a polar decomposition to match the prediction.
pub const FACTOR_MATCH_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OpKind {
    BeamSplitter,
    TwoModeSqueezer,
}

/// A two-mode Gaussian unitary embedded in the three-mode quadrature space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianCircuitOp {
    pub kind: OpKind,
    pub pair: ModePair,
    /// Mixing angle for a beam-splitter, squeezing for a squeezer.
    pub parameter: f64,
    /// Squeezing phase; zero for beam-splitters.
    pub phase: f64,
    #[serde(skip)]
    pub symplectic: RealMat,
}

fn quadratic_form(pair: ModePair, entries: [(usize, usize, f64); 2], n_modes: usize) -> RealMat {
    let (a, b) = pair.indices();
    let mut g = RealMat::zeros(2 * n_modes, 2 * n_modes);
    for (qa, qb, w) in entries {
        let (r, c) = (2 * a + qa, 2 * b + qb);
        g[(r, c)] += w;
        g[(c, r)] += w;
    }
    g
}

impl GaussianCircuitOp {
    /// `exp(θ Ω G)` with `G` the form of `X_j X_k + P_j P_k`.
    pub fn beam_splitter(pair: ModePair, theta: f64) -> Result<Self> {
        pair.check_within(3)?;
        let g = quadratic_form(pair, [(0, 0, 1.0), (1, 1, 1.0)], 3);
        Ok(Self {
            kind: OpKind::BeamSplitter,
            pair,
            parameter: theta,
            phase: 0.0,
            symplectic: expm(&(&symplectic_form(3) * &g).scale(theta))?,
        })
    }

    /// `exp(r Ω G)` with `G` the form of
    /// `cos θ (X_j X_k − P_j P_k) + sin θ (X_j P_k + P_j X_k)`.
    pub fn two_mode_squeezer(pair: ModePair, r: f64, theta: f64) -> Result<Self> {
        pair.check_within(3)?;
        let (s, c) = theta.sin_cos();
        let (a, b) = pair.indices();
        let mut g = RealMat::zeros(6, 6);
        let mut put = |i: usize, j: usize, w: f64| {
            g[(i, j)] += w;
            g[(j, i)] += w;
        };
        put(2 * a, 2 * b, c);
        put(2 * a + 1, 2 * b + 1, -c);
        put(2 * a, 2 * b + 1, s);
        put(2 * a + 1, 2 * b, s);
        Ok(Self {
            kind: OpKind::TwoModeSqueezer,
            pair,
            parameter: r,
            phase: theta,
            symplectic: expm(&(&symplectic_form(3) * &g).scale(r))?,
        })
    }
}

/// A predicted polar factorisation `−S = R U` (left) or `−S = U R` (right).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Factorization {
    pub side: PolarSide,
    /// Squeezing factor `R`.
    pub active: GaussianCircuitOp,
    /// Passive factor `U`.
    pub passive: GaussianCircuitOp,
}

impl Factorization {
    pub fn product(&self) -> RealMat {
        match self.side {
            PolarSide::Left => &self.active.symplectic * &self.passive.symplectic,
            PolarSide::Right => &self.passive.symplectic * &self.active.symplectic,
        }
    }

    pub fn describe(&self) -> String {
        let (a, p) = (self.active.pair, self.passive.pair);
        let ra = format!("R{a}");
        let up = format!("U{p}");
        match self.side {
            PolarSide::Left => format!("-S = {ra} {up}"),
            PolarSide::Right => format!("-S = {up} {ra}"),
        }
    }
}

/// Circuit factorisations of `−S` on the perfect-nonreciprocity manifold
/// `C12 = C13 C23`, `φ = ±π/2`.
///
/// The beam-splitter angle is `2 arctan √C13` and the squeezing `2 artanh √C23`;
/// the squeezer phase equals the loop phase. At `φ = −π/2` the squeezer acts
/// last (`R U`), at `+π/2` first (`U R`). With `C13 = 1` and `φ = +π/2` the
/// complementary form `R^(1,2) U_swap^(1,3)` is appended.
pub fn predicted_factors(p: &LoopParams) -> Result<Vec<Factorization>> {
    if !p.is_lossless() {
        return Err(Error::Precondition("factorisation needs a lossless loop".into()));
    }
    let sign = quarter_phase_sign(p.phi, MANIFOLD_TOL).ok_or_else(|| {
        Error::Precondition(format!("phi = {} is not ±π/2", p.phi))
    })?;
    let matched = p.c13 * p.c23;
    if (p.c12 - matched).abs() > MANIFOLD_TOL * matched.max(1.0) {
        return Err(Error::Precondition(format!(
            "C12 = {} differs from C13 C23 = {matched}",
            p.c12
        )));
    }
    if p.c23 >= 1.0 {
        return Err(Error::Precondition(format!("C23 = {} must be below 1", p.c23)));
    }
    let p13 = ModePair::new(1, 3)?;
    let r = 2.0 * p.c23.sqrt().atanh();
    let bs = GaussianCircuitOp::beam_splitter(p13, 2.0 * p.c13.sqrt().atan())?;
    let tms = GaussianCircuitOp::two_mode_squeezer(ModePair::new(2, 3)?, r, sign * FRAC_PI_2)?;
    let mut out = vec![Factorization {
        side: if sign < 0.0 { PolarSide::Left } else { PolarSide::Right },
        active: tms,
        passive: bs.clone(),
    }];
    if sign > 0.0 && (p.c13 - 1.0).abs() <= MANIFOLD_TOL {
        out.push(Factorization {
            side: PolarSide::Left,
            active: GaussianCircuitOp::two_mode_squeezer(ModePair::new(1, 2)?, r, 0.0)?,
            passive: bs,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct PolarReport {
    pub side: PolarSide,
    /// `max |polar product − S|`.
    pub reconstruction_residual: f64,
    /// `max |sign · S − predicted product|` for the best sign, if a prediction exists.
    pub prediction_residual: Option<f64>,
    pub factor_match: bool,
    /// Global sign relating `S` to the predicted product.
    pub sign: Option<f64>,
    pub predicted: Option<Factorization>,
    #[serde(skip)]
    pub factors: PolarFactors,
}

/// Polar-decomposes the resonant scattering matrix and compares with
/// [`predicted_factors`], allowing either global sign.
pub fn verify_polar(p: &LoopParams, side: PolarSide) -> Result<PolarReport> {
    let s = scattering_resonant(p)?;
    let factors = polar(&s, side)?;
    let reconstruction_residual = factors.product().max_abs_diff(&s);
    let predicted = predicted_factors(p)
        .ok()
        .and_then(|all| all.into_iter().find(|f| f.side == side));
    let mut report = PolarReport {
        side,
        reconstruction_residual,
        prediction_residual: None,
        factor_match: false,
        sign: None,
        predicted: None,
        factors,
    };
    if let Some(pred) = predicted {
        let product = pred.product();
        let (sign, residual) = [1.0, -1.0]
            .into_iter()
            .map(|sg| (sg, s.scale(sg).max_abs_diff(&product)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("two candidates");
        let r_diff = report.factors.r.max_abs_diff(&pred.active.symplectic);
        let u_diff = report.factors.u.scale(sign).max_abs_diff(&pred.passive.symplectic);
        report.factor_match = r_diff < FACTOR_MATCH_TOL && u_diff < FACTOR_MATCH_TOL;
        report.sign = Some(sign);
        report.prediction_residual = Some(residual);
        report.predicted = Some(pred);
    }
    Ok(report)
}

/// Two symmetric matched loops at `φ = +π/2`, each fixed by one cooperativity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SwapConfig {
    pub coop_a: f64,
    pub coop_b: f64,
}

impl SwapConfig {
    pub fn new(coop_a: f64, coop_b: f64) -> Result<Self> {
        for (field, c) in [("coop_a", coop_a), ("coop_b", coop_b)] {
            if !(0.0..1.0).contains(&c) {
                return Err(Error::invalid(field, format!("{c} not in [0, 1)")));
            }
        }
        Ok(Self { coop_a, coop_b })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SwapFigure {
    pub tanh_r: f64,
    pub r: f64,
    pub log_negativity: f64,
    pub purity: f64,
}

/// Ideal swapped entanglement: `tanh r = 4√(C_A C_B) / ((1 + C_A)(1 + C_B))`, `E_N = 2r`.
pub fn swap_figure_of_merit(c: SwapConfig) -> Result<SwapFigure> {
    let SwapConfig { coop_a, coop_b } = SwapConfig::new(c.coop_a, c.coop_b)?;
    let tanh_r = 4.0 * (coop_a * coop_b).sqrt() / ((1.0 + coop_a) * (1.0 + coop_b));
    if tanh_r >= 1.0 {
        return Err(Error::Domain(format!("tanh r = {tanh_r} is not below 1")));
    }
    let r = tanh_r.atanh();
    Ok(SwapFigure {
        tanh_r,
        r,
        log_negativity: 2.0 * r,
        purity: 1.0,
    })
}
