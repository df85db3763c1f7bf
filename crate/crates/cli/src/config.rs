//! Scenario documents: system, parameters, sweep axes and requested metrics.

use std::f64::consts::PI;
use std::str::FromStr;

use nrloop::circuits::SwapConfig;
use nrloop::gaussian::LogBase;
use nrloop::model::ModeParams;
use nrloop::{LoopParams, TmsParams};
use serde::{Deserialize, Serialize};

use crate::metrics::Metric;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    #[default]
    Nrl,
    Tms,
    Swap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Physical parameters. Rates are in units of the first mode's linewidth by convention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamSpec {
    /// Defaults to the matched value `c13 * c23`.
    pub c12: Option<f64>,
    pub c13: f64,
    pub c23: f64,
    /// Loop phase in radians.
    pub phi: f64,
    pub omega: f64,
    /// Total linewidths `κ_j = κ_j^e + κ_j^int`.
    pub kappa: [f64; 3],
    /// Internal-loss ratios `κ_j^int / κ_j`.
    pub loss: [f64; 3],
    pub n_th: [f64; 3],
    /// Internal-bath occupations; defaults to `n_th`.
    pub n_th_int: Option<[f64; 3]>,
    pub coop_a: f64,
    pub coop_b: f64,
}

impl Default for ParamSpec {
    fn default() -> Self {
        Self {
            c12: None,
            c13: 1.0,
            c23: 0.5,
            phi: PI / 2.0,
            omega: 0.0,
            kappa: [1.0; 3],
            loss: [0.0; 3],
            n_th: [0.0; 3],
            n_th_int: None,
            coop_a: 0.5,
            coop_b: 0.5,
        }
    }
}

impl ParamSpec {
    pub fn effective_c12(&self) -> f64 {
        self.c12.unwrap_or(self.c13 * self.c23)
    }

    fn mode_params(&self) -> nrloop::Result<[ModeParams; 3]> {
        let mut out = [ModeParams::lossless(1.0)?; 3];
        for j in 0..3 {
            let mut m = ModeParams::with_loss_ratio(self.kappa[j], self.loss[j], self.n_th[j])?;
            if let Some(n_int) = self.n_th_int {
                m.n_th_int = n_int[j];
                m.validate()?;
            }
            out[j] = m;
        }
        Ok(out)
    }

    pub fn loop_params(&self) -> nrloop::Result<LoopParams> {
        LoopParams::new(self.mode_params()?, self.effective_c12(), self.c13, self.c23, self.phi)
    }

    /// The two-mode squeezer on modes 1 and 2 with the same cooperativity as the loop's (1,2) link.
    pub fn tms_params(&self) -> nrloop::Result<TmsParams> {
        let [m1, m2, _] = self.mode_params()?;
        TmsParams::new([m1, m2], self.effective_c12())
    }

    pub fn swap_config(&self) -> nrloop::Result<SwapConfig> {
        SwapConfig::new(self.coop_a, self.coop_b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Phi,
    Omega,
    N1,
    N2,
    N3,
    C12,
    C13,
    C23,
    Loss1,
    Loss2,
    Loss3,
    CoopA,
    CoopB,
}

impl Axis {
    pub const ALL: [Axis; 13] = [
        Axis::Phi,
        Axis::Omega,
        Axis::N1,
        Axis::N2,
        Axis::N3,
        Axis::C12,
        Axis::C13,
        Axis::C23,
        Axis::Loss1,
        Axis::Loss2,
        Axis::Loss3,
        Axis::CoopA,
        Axis::CoopB,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axis::Phi => "phi",
            Axis::Omega => "omega",
            Axis::N1 => "n1",
            Axis::N2 => "n2",
            Axis::N3 => "n3",
            Axis::C12 => "c12",
            Axis::C13 => "c13",
            Axis::C23 => "c23",
            Axis::Loss1 => "loss1",
            Axis::Loss2 => "loss2",
            Axis::Loss3 => "loss3",
            Axis::CoopA => "coop_a",
            Axis::CoopB => "coop_b",
        }
    }

    /// Sets the axis variable. Thermal axes move the internal bath along with the
    /// monitored one unless internal occupations were given explicitly.
    pub fn apply(self, p: &mut ParamSpec, x: f64) {
        match self {
            Axis::Phi => p.phi = x,
            Axis::Omega => p.omega = x,
            Axis::N1 | Axis::N2 | Axis::N3 => {
                let j = self as usize - Axis::N1 as usize;
                p.n_th[j] = x;
            }
            Axis::C12 => p.c12 = Some(x),
            Axis::C13 => p.c13 = x,
            Axis::C23 => p.c23 = x,
            Axis::Loss1 | Axis::Loss2 | Axis::Loss3 => {
                let j = self as usize - Axis::Loss1 as usize;
                p.loss[j] = x;
            }
            Axis::CoopA => p.coop_a = x,
            Axis::CoopB => p.coop_b = x,
        }
    }
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Axis::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown axis `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: Axis,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.from.is_finite() && self.to.is_finite()) {
            return Err(CliError::usage(format!("sweep over {}: range must be finite", self.axis.name())));
        }
        if self.steps == 0 {
            return Err(CliError::usage(format!("sweep over {}: steps must be >= 1", self.axis.name())));
        }
        Ok(())
    }

    /// Evenly spaced points including both ends; a single step yields `from`.
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.from];
        }
        let n = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.to
                } else {
                    self.from + (self.to - self.from) * (i as f64 / n)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub system: SystemKind,
    #[serde(default)]
    pub params: ParamSpec,
    /// Sweep axes, outermost first; empty for a single evaluation.
    #[serde(default)]
    pub sweep: Vec<SweepSpec>,
    /// Empty selects the system's default metrics.
    #[serde(default)]
    pub outputs: Vec<Metric>,
    #[serde(default)]
    pub log_base: LogBase,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            system: SystemKind::Nrl,
            params: ParamSpec::default(),
            sweep: Vec::new(),
            outputs: Vec::new(),
            log_base: LogBase::E,
            format: Format::Csv,
            seed: 0,
        }
    }
}

impl ScenarioConfig {
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| {
            CliError::usage(format!(
                "{origin}:{}:{}: {}",
                e.line(),
                e.column(),
                strip_position(&e.to_string())
            ))
        })
    }

    pub fn metrics(&self) -> Vec<Metric> {
        if self.outputs.is_empty() {
            Metric::defaults(self.system).to_vec()
        } else {
            self.outputs.clone()
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        for s in &self.sweep {
            s.validate()?;
        }
        for (i, a) in self.sweep.iter().enumerate() {
            if self.sweep[..i].iter().any(|b| b.axis == a.axis) {
                return Err(CliError::usage(format!("axis {} swept twice", a.axis.name())));
            }
        }
        for m in self.metrics() {
            if !m.available_for(self.system) {
                return Err(CliError::usage(format!(
                    "metric {} is not available for system {:?}",
                    m.name(),
                    self.system
                )));
            }
        }
        let check = |r: nrloop::Result<()>| r.map_err(|e| CliError::usage(format!("params: {e}")));
        match self.system {
            SystemKind::Nrl => check(self.params.loop_params().map(drop)),
            SystemKind::Tms => check(self.params.tms_params().map(drop)),
            SystemKind::Swap => check(self.params.swap_config().map(drop)),
        }
    }
}

fn strip_position(msg: &str) -> &str {
    msg.rfind(" at line ").map_or(msg, |i| &msg[..i])
}

/// Parses radians, optionally written with `pi`: `1.57`, `pi/2`, `-3pi/4`, `0.5*pi`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase().replace(' ', "");
    if let Ok(x) = t.parse::<f64>() {
        return if x.is_finite() { Ok(x) } else { Err(format!("angle `{s}` is not finite")) };
    }
    let bad = || format!("cannot parse angle `{s}`");
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().map_err(|_| bad())?),
        None => (t.as_str(), 1.0),
    };
    let coef = num.strip_suffix("pi").ok_or_else(bad)?;
    let coef = coef.strip_suffix('*').unwrap_or(coef);
    let c = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let x = c * PI / den;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(bad())
    }
}

/// Parses a comma-separated list of exactly `N` numbers.
pub fn parse_list<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}")))
        .collect::<Result<_, _>>()?;
    v.try_into().map_err(|v: Vec<f64>| format!("expected {N} values, got {}", v.len()))
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format `{s}`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("-pi/2").unwrap(), -PI / 2.0);
        assert_eq!(parse_angle("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_angle("0.5*pi").unwrap(), 0.5 * PI);
        assert_eq!(parse_angle("1.25").unwrap(), 1.25);
        assert!(parse_angle("pie").is_err());
        assert!(parse_angle("inf").is_err());
    }

    #[test]
    fn sweep_points_hit_both_ends() {
        let s = SweepSpec { axis: Axis::Phi, from: -PI, to: PI, steps: 5 };
        let p = s.points();
        assert_eq!(p.len(), 5);
        assert_eq!(p[0], -PI);
        assert_eq!(p[2], 0.0);
        assert_eq!(p[4], PI);
        let one = SweepSpec { steps: 1, ..s };
        assert_eq!(one.points(), vec![-PI]);
    }

    #[test]
    fn config_errors_carry_position() {
        let err = ScenarioConfig::parse("{\n  \"system\": \"nrl\",\n  \"bogus\": 1\n}", "cfg.json").unwrap_err();
        assert!(err.message.starts_with("cfg.json:3:"), "{}", err.message);
        assert!(err.message.contains("bogus"));
        let err = ScenarioConfig::parse("{\"params\": {\"c23\": \"x\"}}", "c").unwrap_err();
        assert!(err.message.contains("c:1:"), "{}", err.message);
    }

    #[test]
    fn defaults_are_symmetric_matched() {
        let c = ScenarioConfig::parse("{}", "-").unwrap();
        let p = c.params.loop_params().unwrap();
        assert_eq!((p.c12, p.c13, p.c23), (0.5, 1.0, 0.5));
        c.validate().unwrap();
    }

    #[test]
    fn config_round_trips() {
        let mut c = ScenarioConfig::default();
        c.sweep.push(SweepSpec { axis: Axis::N1, from: 0.0, to: 20.0, steps: 21 });
        c.outputs = vec![Metric::parse("en_12").unwrap()];
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(ScenarioConfig::parse(&text, "-").unwrap(), c);
    }

    #[test]
    fn lists() {
        assert_eq!(parse_list::<3>("0.5, 7.5,10.5").unwrap(), [0.5, 7.5, 10.5]);
        assert!(parse_list::<3>("1,2").is_err());
    }
}
