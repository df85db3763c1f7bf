//! System parameterisations, the quadrature-space drift matrix and stability.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, pauli, solve, EigenPair, RealMat};

/// Distance from ±π/2 within which the closed-form Routh-Hurwitz conditions are used.
pub const PHASE_TOL: f64 = 1e-6;

/// Residual bound for the Lyapunov steady state.
pub const LYAPUNOV_RESIDUAL: f64 = 1e-9;

/// Decay rates and bath occupations of one mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeParams {
    /// Decay into the monitored (external) channel.
    pub kappa_e: f64,
    /// Decay into unmonitored (internal) channels.
    pub kappa_int: f64,
    /// Thermal occupation of the monitored bath.
    pub n_th: f64,
    /// Thermal occupation of the internal bath.
    pub n_th_int: f64,
}

impl ModeParams {
    pub fn new(kappa_e: f64, kappa_int: f64, n_th: f64, n_th_int: f64) -> Result<Self> {
        let m = Self {
            kappa_e,
            kappa_int,
            n_th,
            n_th_int,
        };
        m.validate()?;
        Ok(m)
    }

    /// Lossless mode with a vacuum bath.
    pub fn lossless(kappa: f64) -> Result<Self> {
        Self::new(kappa, 0.0, 0.0, 0.0)
    }

    /// Total rate `kappa` split so that `kappa_int / kappa = ratio`; both baths at `n_th`.
    pub fn with_loss_ratio(kappa: f64, ratio: f64, n_th: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&ratio) {
            return Err(Error::invalid("kappa_int_ratio", format!("{ratio} not in [0, 1]")));
        }
        Self::new(kappa * (1.0 - ratio), kappa * ratio, n_th, n_th)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa_e + self.kappa_int
    }

    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("kappa_e", self.kappa_e),
            ("kappa_int", self.kappa_int),
            ("n_th", self.n_th),
            ("n_th_int", self.n_th_int),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(field, format!("{v} must be finite and >= 0")));
            }
        }
        if self.kappa() <= 0.0 {
            return Err(Error::invalid("kappa", "total decay rate must be positive"));
        }
        Ok(())
    }
}

/// Unordered-by-meaning but ordered-by-storage pair of 1-based mode labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ModePair(pub usize, pub usize);

impl ModePair {
    pub fn new(j: usize, k: usize) -> Result<Self> {
        if j == 0 || k == 0 {
            return Err(Error::invalid("pair", "mode labels are 1-based"));
        }
        if j == k {
            return Err(Error::invalid("pair", format!("({j},{k}) needs two distinct modes")));
        }
        Ok(Self(j, k))
    }

    /// Zero-based indices.
    pub fn indices(self) -> (usize, usize) {
        (self.0 - 1, self.1 - 1)
    }

    pub(crate) fn check_within(self, n_modes: usize) -> Result<()> {
        if self.0 > n_modes || self.1 > n_modes {
            return Err(Error::invalid(
                "pair",
                format!("({},{}) exceeds {n_modes} modes", self.0, self.1),
            ));
        }
        Ok(())
    }
}

impl std::fmt::Display for ModePair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.0, self.1)
    }
}

/// A linear bosonic network with Markovian baths: anything that can be
/// scattered and whose output state can be computed.
pub trait LinearNetwork {
    fn modes(&self) -> &[ModeParams];

    /// Drift matrix `M` of `dR/dt = M R - sqrt(κ_e) R_in - sqrt(κ_int) R_int`.
    fn dynamical_matrix(&self) -> RealMat;

    fn mode_count(&self) -> usize {
        self.modes().len()
    }

    /// `diag(κ_1, κ_1, κ_2, κ_2, ...)` of the chosen channel, square-rooted.
    fn sqrt_kappa_e(&self) -> RealMat {
        quadrature_diag(self.modes().iter().map(|m| m.kappa_e.sqrt()))
    }

    fn sqrt_kappa_int(&self) -> RealMat {
        quadrature_diag(self.modes().iter().map(|m| m.kappa_int.sqrt()))
    }

    fn is_lossless(&self) -> bool {
        self.modes().iter().all(|m| m.kappa_int == 0.0)
    }
}

fn quadrature_diag(per_mode: impl Iterator<Item = f64>) -> RealMat {
    let d: Vec<f64> = per_mode.flat_map(|x| [x, x]).collect();
    RealMat::diag(&d)
}

fn check_coop(field: &'static str, c: f64) -> Result<()> {
    if !c.is_finite() || c < 0.0 {
        return Err(Error::invalid(field, format!("{c} must be finite and >= 0")));
    }
    Ok(())
}

/// `C = 4 g^2 / (κ_j κ_k)`.
pub fn cooperativity(g: f64, kappa_j: f64, kappa_k: f64) -> f64 {
    4.0 * g * g / (kappa_j * kappa_k)
}

/// Inverse of [`cooperativity`] for `g >= 0`.
pub fn coupling(c: f64, kappa_j: f64, kappa_k: f64) -> f64 {
    0.5 * (c * kappa_j * kappa_k).sqrt()
}

/// Three-mode nonreciprocal loop: two-mode squeezers on (1,2) and (2,3), a
/// beam-splitter on (1,3) and the loop phase on the (2,3) link.
///
/// Cooperativities are the canonical parameters; couplings are derived from
/// them and the total decay rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LoopParams {
    pub modes: [ModeParams; 3],
    pub c12: f64,
    pub c13: f64,
    pub c23: f64,
    /// Loop phase in radians.
    pub phi: f64,
}

impl LoopParams {
    pub fn new(modes: [ModeParams; 3], c12: f64, c13: f64, c23: f64, phi: f64) -> Result<Self> {
        for m in &modes {
            m.validate()?;
        }
        check_coop("c12", c12)?;
        check_coop("c13", c13)?;
        check_coop("c23", c23)?;
        if !phi.is_finite() {
            return Err(Error::invalid("phi", "must be finite"));
        }
        Ok(Self {
            modes,
            c12,
            c13,
            c23,
            phi,
        })
    }

    pub fn from_couplings(
        modes: [ModeParams; 3],
        g12: f64,
        g13: f64,
        g23: f64,
        phi: f64,
    ) -> Result<Self> {
        for (field, g) in [("g12", g12), ("g13", g13), ("g23", g23)] {
            if !g.is_finite() || g < 0.0 {
                return Err(Error::invalid(field, format!("{g} must be finite and >= 0")));
            }
        }
        for m in &modes {
            m.validate()?;
        }
        let k = modes.map(|m| m.kappa());
        Self::new(
            modes,
            cooperativity(g12, k[0], k[1]),
            cooperativity(g13, k[0], k[2]),
            cooperativity(g23, k[1], k[2]),
            phi,
        )
    }

    /// Unit decay rates, vacuum baths, and the matching condition
    /// `C12 = C13 * C23` applied explicitly.
    pub fn nrl_matched(c23: f64, c13: f64, phi: f64) -> Result<Self> {
        let unit = ModeParams::lossless(1.0)?;
        Self::new([unit; 3], c13 * c23, c13, c23, phi)
    }

    /// Symmetric matched loop: `C12 = C23 = c`, `C13 = 1`.
    pub fn symmetric_matched(c: f64, phi: f64) -> Result<Self> {
        Self::nrl_matched(c, 1.0, phi)
    }

    /// Sets both bath occupations of every mode.
    pub fn with_thermal(mut self, n_th: [f64; 3]) -> Result<Self> {
        for (m, n) in self.modes.iter_mut().zip(n_th) {
            m.n_th = n;
            m.n_th_int = n;
            m.validate()?;
        }
        Ok(self)
    }

    /// Keeps each total rate and moves the given fraction into the internal channel.
    pub fn with_loss_ratios(mut self, ratios: [f64; 3]) -> Result<Self> {
        for (m, r) in self.modes.iter_mut().zip(ratios) {
            let n = *m;
            *m = ModeParams::with_loss_ratio(n.kappa(), r, n.n_th)?;
            m.n_th_int = n.n_th_int;
        }
        Ok(self)
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = phi;
        self
    }

    pub fn kappas(&self) -> [f64; 3] {
        self.modes.map(|m| m.kappa())
    }

    pub fn g12(&self) -> f64 {
        let k = self.kappas();
        coupling(self.c12, k[0], k[1])
    }

    pub fn g13(&self) -> f64 {
        let k = self.kappas();
        coupling(self.c13, k[0], k[2])
    }

    pub fn g23(&self) -> f64 {
        let k = self.kappas();
        coupling(self.c23, k[1], k[2])
    }

    /// Coupling asymmetry `g23 / g13`, undefined without a beam-splitter.
    pub fn eta(&self) -> Option<f64> {
        let g13 = self.g13();
        (g13 > 0.0).then(|| self.g23() / g13)
    }

    /// Cooperativity of the given link.
    pub fn coop(&self, pair: ModePair) -> Result<f64> {
        pair.check_within(3)?;
        let (a, b) = pair.indices();
        Ok(match (a.min(b), a.max(b)) {
            (0, 1) => self.c12,
            (0, 2) => self.c13,
            _ => self.c23,
        })
    }
}

impl LinearNetwork for LoopParams {
    fn modes(&self) -> &[ModeParams] {
        &self.modes
    }

    fn dynamical_matrix(&self) -> RealMat {
        dynamical_matrix(self)
    }
}

/// Open two-mode squeezer with Hamiltonian `i g (a1† a2† - a1 a2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TmsParams {
    pub modes: [ModeParams; 2],
    pub c12: f64,
}

impl TmsParams {
    pub fn new(modes: [ModeParams; 2], c12: f64) -> Result<Self> {
        for m in &modes {
            m.validate()?;
        }
        check_coop("c12", c12)?;
        Ok(Self { modes, c12 })
    }

    /// Unit decay rates with the given bath occupations.
    pub fn thermal(c12: f64, n_th: [f64; 2]) -> Result<Self> {
        let m = |n| ModeParams::new(1.0, 0.0, n, n);
        Self::new([m(n_th[0])?, m(n_th[1])?], c12)
    }

    pub fn with_loss_ratios(mut self, ratios: [f64; 2]) -> Result<Self> {
        for (m, r) in self.modes.iter_mut().zip(ratios) {
            let n = *m;
            *m = ModeParams::with_loss_ratio(n.kappa(), r, n.n_th)?;
            m.n_th_int = n.n_th_int;
        }
        Ok(self)
    }

    pub fn g12(&self) -> f64 {
        coupling(self.c12, self.modes[0].kappa(), self.modes[1].kappa())
    }
}

impl LinearNetwork for TmsParams {
    fn modes(&self) -> &[ModeParams] {
        &self.modes
    }

    fn dynamical_matrix(&self) -> RealMat {
        let g = self.g12();
        let mut m = RealMat::zeros(4, 4);
        m.set_block(0, 0, &pauli::id2().scale(-0.5 * self.modes[0].kappa()));
        m.set_block(2, 2, &pauli::id2().scale(-0.5 * self.modes[1].kappa()));
        let off = pauli::z().scale(g);
        m.set_block(0, 2, &off);
        m.set_block(2, 0, &off);
        m
    }
}

/// Drift matrix of the loop in the `(X1, P1, X2, P2, X3, P3)` basis.
pub fn dynamical_matrix(p: &LoopParams) -> RealMat {
    let k = p.kappas();
    let (g12, g13, g23) = (p.g12(), p.g13(), p.g23());
    let mut m = RealMat::zeros(6, 6);
    for (j, kj) in k.iter().enumerate() {
        m.set_block(2 * j, 2 * j, &pauli::id2().scale(-0.5 * kj));
    }
    let b12 = pauli::x().scale(-g12);
    let b13 = pauli::j().scale(g13);
    let b23 = &pauli::z().scale(g23 * p.phi.sin()) - &pauli::x().scale(g23 * p.phi.cos());
    m.set_block(0, 2, &b12);
    m.set_block(2, 0, &b12);
    m.set_block(0, 4, &b13);
    m.set_block(4, 0, &b13);
    m.set_block(2, 4, &b23);
    m.set_block(4, 2, &b23);
    m
}

/// Maps a phase to (-π, π].
pub fn wrap_phase(phi: f64) -> f64 {
    let mut x = phi.rem_euclid(2.0 * PI);
    if x > PI {
        x -= 2.0 * PI;
    }
    x
}

/// `Some(+1)` / `Some(-1)` when `phi` sits at `±π/2` within `tol`.
pub fn quarter_phase_sign(phi: f64, tol: f64) -> Option<f64> {
    let w = wrap_phase(phi);
    if (w - FRAC_PI_2).abs() <= tol {
        Some(1.0)
    } else if (w + FRAC_PI_2).abs() <= tol {
        Some(-1.0)
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityMethod {
    /// Closed-form Routh-Hurwitz conditions at φ = ±π/2.
    RouthHurwitz,
    /// Sign of the drift-matrix spectrum.
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityCondition {
    pub label: String,
    pub value: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityVerdict {
    pub stable: bool,
    pub method: StabilityMethod,
    pub conditions: Vec<StabilityCondition>,
    pub max_eig_real_part: f64,
}

/// Eigenvalues of the drift matrix, sorted by descending real part.
pub fn drift_eigenvalues<N: LinearNetwork + ?Sized>(p: &N) -> Result<Vec<Complex64>> {
    Ok(linalg::eigvals_general(&p.dynamical_matrix().to_complex())?)
}

pub fn drift_eigenpairs<N: LinearNetwork + ?Sized>(p: &N) -> Result<Vec<EigenPair>> {
    Ok(linalg::eig_general(&p.dynamical_matrix().to_complex())?)
}

pub fn max_drift_real_part<N: LinearNetwork + ?Sized>(p: &N) -> Result<f64> {
    Ok(drift_eigenvalues(p)?
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Errors with [`Error::Unstable`] unless every drift eigenvalue has negative real part.
pub fn require_stable<N: LinearNetwork + ?Sized>(p: &N) -> Result<()> {
    let max_real_part = max_drift_real_part(p)?;
    if max_real_part < 0.0 {
        Ok(())
    } else {
        Err(Error::Unstable { max_real_part })
    }
}

/// Stability verdict for the loop.
///
/// At φ = ±π/2 the three closed-form Routh-Hurwitz conditions decide; the
/// drift spectrum is always computed and reported alongside. Elsewhere the
/// spectrum alone decides and the single condition is labelled `numeric`.
pub fn routh_hurwitz(p: &LoopParams) -> Result<StabilityVerdict> {
    let max_eig_real_part = max_drift_real_part(p)?;
    if quarter_phase_sign(p.phi, PHASE_TOL).is_none() {
        let value = -max_eig_real_part;
        return Ok(StabilityVerdict {
            stable: value > 0.0,
            method: StabilityMethod::Numeric,
            conditions: vec![StabilityCondition {
                label: "numeric: -max Re(eig M) > 0".into(),
                value,
                satisfied: value > 0.0,
            }],
            max_eig_real_part,
        });
    }
    let [k1, k2, k3] = p.kappas();
    let (c12, c13, c23) = (p.c12, p.c13, p.c23);
    let first = k1 + k2 + k3;
    let second = 1.0 - c12 + c13 - c23;
    let third = 1.0 - c12 / ((1.0 + k3 / k1) * (1.0 + k3 / k2))
        + c13 / ((1.0 + k2 / k1) * (1.0 + k2 / k3))
        - c23 / ((1.0 + k1 / k2) * (1.0 + k1 / k3));
    let conditions: Vec<StabilityCondition> = [
        ("k1 + k2 + k3 > 0", first),
        ("1 - C12 + C13 - C23 > 0", second),
        (
            "1 - C12/((1+k3/k1)(1+k3/k2)) + C13/((1+k2/k1)(1+k2/k3)) - C23/((1+k1/k2)(1+k1/k3)) > 0",
            third,
        ),
    ]
    .into_iter()
    .map(|(label, value)| StabilityCondition {
        label: label.into(),
        value,
        satisfied: value > 0.0,
    })
    .collect();
    Ok(StabilityVerdict {
        stable: conditions.iter().all(|c| c.satisfied),
        method: StabilityMethod::RouthHurwitz,
        conditions,
        max_eig_real_part,
    })
}

/// Second Routh-Hurwitz condition once `C12 = C13 C23` is imposed.
pub fn matched_second_condition(c23: f64, c13: f64) -> f64 {
    (1.0 - c23) * (1.0 + c13)
}

/// Diffusion matrix `κ_e (n + 1/2) + κ_int (n_int + 1/2)` per quadrature.
pub fn diffusion_matrix<N: LinearNetwork + ?Sized>(p: &N) -> RealMat {
    quadrature_diag(
        p.modes()
            .iter()
            .map(|m| m.kappa_e * (m.n_th + 0.5) + m.kappa_int * (m.n_th_int + 0.5)),
    )
}

/// Intracavity steady-state covariance from `M V + V M^T + D = 0`.
///
/// Solved by vectorisation; for three modes that is a 36x36 linear system.
pub fn lyapunov_steady_state<N: LinearNetwork + ?Sized>(p: &N) -> Result<RealMat> {
    require_stable(p)?;
    let m = p.dynamical_matrix();
    let d = diffusion_matrix(p);
    let n = m.rows();
    let mut big = RealMat::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            for k in 0..n {
                big[(row, k * n + j)] += m[(i, k)];
                big[(row, i * n + k)] += m[(j, k)];
            }
        }
    }
    let rhs = RealMat::from_fn(n * n, 1, |r, _| -d[(r / n, r % n)]);
    let x = solve(&big, &rhs)?;
    let v = RealMat::from_fn(n, n, |i, j| x[(i * n + j, 0)]).symmetrized();
    let residual = lyapunov_residual(&m, &v, &d);
    if residual > LYAPUNOV_RESIDUAL * d.max_abs().max(1.0) {
        return Err(Error::Domain(format!(
            "Lyapunov residual {residual:e} exceeds tolerance"
        )));
    }
    Ok(v)
}

/// `max |M V + V M^T + D|`.
pub fn lyapunov_residual(m: &RealMat, v: &RealMat, d: &RealMat) -> f64 {
    let r = &(&(m * v) + &(v * &m.transpose())) + d;
    r.max_abs()
}
