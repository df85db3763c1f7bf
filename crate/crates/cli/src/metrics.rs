//! The metric enumeration and per-point evaluation.

use std::cell::OnceCell;
use std::fmt;

use nrloop::circuits::swap_figure_of_merit;
use nrloop::gaussian::{entanglement_of, output_covariance, CovarianceMatrix, EntanglementReport, LogBase};
use nrloop::model::{max_drift_real_part, LinearNetwork};
use nrloop::scattering::{block, nonreciprocity_of, scattering_at, NonreciprocityDegree, ScatteringResult};
use nrloop::ModePair;
use serde::{Deserialize, Serialize};

use crate::config::{ParamSpec, SystemKind};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Metric {
    /// Logarithmic negativity of a pair of outputs.
    En(ModePair),
    /// Purity of a pair of outputs.
    Mu(ModePair),
    /// Smallest partially transposed symplectic eigenvalue.
    Nu(ModePair),
    /// Degree of nonreciprocity.
    Nr(ModePair),
    /// Frobenius norm of the reflection block `S_jj`.
    Refl(usize),
    Stable,
    MaxReEig,
    TmsEn,
    TmsMu,
    TmsNu,
    TmsStable,
    SwapEn,
    SwapR,
    SwapTanhR,
    SwapMu,
}

const PAIRS: [ModePair; 3] = [ModePair(1, 2), ModePair(1, 3), ModePair(2, 3)];

impl Metric {
    pub fn all() -> Vec<Metric> {
        let mut v = Vec::new();
        for ctor in [Metric::En, Metric::Mu, Metric::Nu, Metric::Nr] {
            v.extend(PAIRS.map(ctor));
        }
        v.extend((1..=3).map(Metric::Refl));
        v.extend([
            Metric::Stable,
            Metric::MaxReEig,
            Metric::TmsEn,
            Metric::TmsMu,
            Metric::TmsNu,
            Metric::TmsStable,
            Metric::SwapEn,
            Metric::SwapR,
            Metric::SwapTanhR,
            Metric::SwapMu,
        ]);
        v
    }

    pub fn name(self) -> String {
        let pair = |p: ModePair| format!("{}{}", p.0, p.1);
        match self {
            Metric::En(p) => format!("en_{}", pair(p)),
            Metric::Mu(p) => format!("mu_{}", pair(p)),
            Metric::Nu(p) => format!("nu_{}", pair(p)),
            Metric::Nr(p) => format!("nr_{}", pair(p)),
            Metric::Refl(j) => format!("refl_{j}"),
            Metric::Stable => "stable".into(),
            Metric::MaxReEig => "max_re_eig".into(),
            Metric::TmsEn => "tms_en_12".into(),
            Metric::TmsMu => "tms_mu_12".into(),
            Metric::TmsNu => "tms_nu_12".into(),
            Metric::TmsStable => "tms_stable".into(),
            Metric::SwapEn => "swap_en".into(),
            Metric::SwapR => "swap_r".into(),
            Metric::SwapTanhR => "swap_tanh_r".into(),
            Metric::SwapMu => "swap_mu".into(),
        }
    }

    pub fn parse(s: &str) -> Result<Metric, String> {
        Metric::all().into_iter().find(|m| m.name() == s).ok_or_else(|| {
            let names: Vec<String> = Metric::all().into_iter().map(Metric::name).collect();
            format!("unknown metric `{s}`; expected one of {}", names.join(", "))
        })
    }

    /// Whether the column carries a logarithm and hence a base.
    pub fn is_logarithmic(self) -> bool {
        matches!(self, Metric::En(_) | Metric::TmsEn | Metric::SwapEn)
    }

    pub fn available_for(self, system: SystemKind) -> bool {
        let two_mode = |p: ModePair| p == ModePair(1, 2);
        match system {
            SystemKind::Nrl => !matches!(
                self,
                Metric::SwapEn | Metric::SwapR | Metric::SwapTanhR | Metric::SwapMu
            ),
            SystemKind::Tms => match self {
                Metric::En(p) | Metric::Mu(p) | Metric::Nu(p) | Metric::Nr(p) => two_mode(p),
                Metric::Refl(j) => j <= 2,
                Metric::Stable | Metric::MaxReEig => true,
                _ => false,
            },
            SystemKind::Swap => matches!(
                self,
                Metric::SwapEn | Metric::SwapR | Metric::SwapTanhR | Metric::SwapMu
            ),
        }
    }

    pub fn defaults(system: SystemKind) -> &'static [Metric] {
        match system {
            SystemKind::Nrl => &[
                Metric::En(ModePair(1, 2)),
                Metric::En(ModePair(2, 3)),
                Metric::Mu(ModePair(1, 2)),
                Metric::Mu(ModePair(2, 3)),
                Metric::Nr(ModePair(1, 2)),
                Metric::Stable,
            ],
            SystemKind::Tms => &[Metric::En(ModePair(1, 2)), Metric::Mu(ModePair(1, 2)), Metric::Stable],
            SystemKind::Swap => &[Metric::SwapEn, Metric::SwapR, Metric::SwapMu],
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl TryFrom<String> for Metric {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        Metric::parse(&s)
    }
}

impl From<Metric> for String {
    fn from(m: Metric) -> String {
        m.name()
    }
}

/// One table entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Num(f64),
    Bool(bool),
    Unstable,
    Decoupled,
}

impl Serialize for Cell {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match *self {
            Cell::Num(x) => s.serialize_f64(x),
            Cell::Bool(b) => s.serialize_bool(b),
            Cell::Unstable => s.serialize_str("unstable"),
            Cell::Decoupled => s.serialize_str("decoupled"),
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Num(x) => write!(f, "{x:.16e}"),
            Cell::Bool(b) => write!(f, "{b}"),
            Cell::Unstable => f.write_str("unstable"),
            Cell::Decoupled => f.write_str("decoupled"),
        }
    }
}

/// Lazily computed quantities of one network at one detuning.
struct NetworkPoint<'a> {
    net: &'a dyn LinearNetwork,
    omega: f64,
    max_re: f64,
    cov: OnceCell<CovarianceMatrix>,
    scattering: OnceCell<ScatteringResult>,
}

impl<'a> NetworkPoint<'a> {
    fn new(net: &'a dyn LinearNetwork, omega: f64) -> Result<Self, CliError> {
        Ok(Self {
            net,
            omega,
            max_re: max_drift_real_part(net)?,
            cov: OnceCell::new(),
            scattering: OnceCell::new(),
        })
    }

    fn stable(&self) -> bool {
        self.max_re < 0.0
    }

    fn covariance(&self) -> Result<&CovarianceMatrix, CliError> {
        if self.cov.get().is_none() {
            let _ = self.cov.set(output_covariance(self.net, self.omega)?);
        }
        Ok(self.cov.get().expect("set above"))
    }

    fn scattering(&self) -> Result<&ScatteringResult, CliError> {
        if self.scattering.get().is_none() {
            let _ = self.scattering.set(scattering_at(self.net, self.omega)?);
        }
        Ok(self.scattering.get().expect("set above"))
    }

    fn pair(&self, p: ModePair, base: LogBase) -> Result<EntanglementReport, CliError> {
        Ok(entanglement_of(self.covariance()?, p, base)?)
    }

    /// Steady-state quantities are meaningless past threshold, so they become sentinels.
    fn cell(&self, m: Metric, base: LogBase) -> Result<Cell, CliError> {
        match m {
            Metric::Stable => return Ok(Cell::Bool(self.stable())),
            Metric::MaxReEig => return Ok(Cell::Num(self.max_re)),
            _ if !self.stable() => return Ok(Cell::Unstable),
            _ => {}
        }
        Ok(match m {
            Metric::En(p) => Cell::Num(self.pair(p, base)?.log_negativity),
            Metric::Mu(p) => Cell::Num(self.pair(p, base)?.purity),
            Metric::Nu(p) => Cell::Num(self.pair(p, base)?.nu_minus),
            Metric::Nr(p) => match nonreciprocity_of(&self.scattering()?.s_e, p, self.omega)?.degree {
                NonreciprocityDegree::Degree(x) => Cell::Num(x),
                NonreciprocityDegree::Decoupled => Cell::Decoupled,
            },
            Metric::Refl(j) => Cell::Num(block(&self.scattering()?.s_e, j, j).frobenius()),
            other => unreachable!("{other} is not a network metric"),
        })
    }
}

fn tms_metric(m: Metric) -> Option<Metric> {
    let p = ModePair(1, 2);
    match m {
        Metric::TmsEn => Some(Metric::En(p)),
        Metric::TmsMu => Some(Metric::Mu(p)),
        Metric::TmsNu => Some(Metric::Nu(p)),
        Metric::TmsStable => Some(Metric::Stable),
        _ => None,
    }
}

/// Evaluates `metrics` at one parameter point.
pub fn evaluate(
    system: SystemKind,
    p: &ParamSpec,
    metrics: &[Metric],
    base: LogBase,
) -> Result<Vec<Cell>, CliError> {
    if system == SystemKind::Swap {
        let f = swap_figure_of_merit(p.swap_config()?)?;
        return Ok(metrics
            .iter()
            .map(|m| match m {
                Metric::SwapEn => Cell::Num(f.log_negativity * base.ln_factor()),
                Metric::SwapR => Cell::Num(f.r),
                Metric::SwapTanhR => Cell::Num(f.tanh_r),
                Metric::SwapMu => Cell::Num(f.purity),
                other => unreachable!("{other} rejected during validation"),
            })
            .collect());
    }
    let needs_tms = system == SystemKind::Tms || metrics.iter().any(|m| tms_metric(*m).is_some());
    let tms = if needs_tms { Some(p.tms_params()?) } else { None };
    let lp;
    let main: &dyn LinearNetwork = match (system, &tms) {
        (SystemKind::Tms, Some(t)) => t,
        _ => {
            lp = p.loop_params()?;
            &lp
        }
    };
    let point = NetworkPoint::new(main, p.omega)?;
    let tms_point = match (system, &tms) {
        (SystemKind::Nrl, Some(t)) => Some(NetworkPoint::new(t, p.omega)?),
        _ => None,
    };
    metrics
        .iter()
        .map(|&m| match (tms_metric(m), &tms_point) {
            (Some(inner), Some(t)) => t.cell(inner, base),
            _ => point.cell(m, base),
        })
        .collect()
}
