//! Parametric pump bookkeeping: pump frequencies, spurious processes, RWA margin
//! and pump amplitudes.

use serde::Serialize;

use crate::error::{Error, Result};

/// Relative distance (to the largest frequency) below which two frequencies collide.
pub const COLLISION_TOL: f64 = 1e-12;

/// Default ratio of detuning margin to coupling for the rotating-wave approximation.
pub const DEFAULT_RWA_RATIO: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelledFreq {
    pub label: String,
    pub value: f64,
}

fn lf(label: &str, value: f64) -> LabelledFreq {
    LabelledFreq {
        label: label.into(),
        value,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyPlan {
    pub mode_freqs: [f64; 3],
    /// `(ω2 + ω3, ω3 − ω1, ω1 + ω2)`.
    pub pump_freqs: [f64; 3],
    /// `(ω2 − ω1, ω3 − ω2)`.
    pub spurious_diff: Vec<f64>,
    /// `(ω1 + ω3, 2ω1, 2ω2, 2ω3)`.
    pub spurious_sum: Vec<f64>,
    /// Smallest `|ν_i − f|` over spurious processes and the mode frequencies.
    pub min_margin: f64,
    /// Pump and frequency attaining the margin.
    pub closest: (String, String),
}

fn forbidden(w: [f64; 3]) -> Vec<LabelledFreq> {
    let [w1, w2, w3] = w;
    vec![
        lf("w2-w1", w2 - w1),
        lf("w3-w2", w3 - w2),
        lf("w1+w3", w1 + w3),
        lf("2w1", 2.0 * w1),
        lf("2w2", 2.0 * w2),
        lf("2w3", 2.0 * w3),
        lf("w1", w1),
        lf("w2", w2),
        lf("w3", w3),
    ]
}

/// Pump frequencies for the loop couplings and their distance to unwanted processes.
pub fn plan_frequencies(mode_freqs: [f64; 3]) -> Result<FrequencyPlan> {
    let [w1, w2, w3] = mode_freqs;
    if mode_freqs.iter().any(|w| !w.is_finite()) {
        return Err(Error::invalid("mode_freqs", "must be finite"));
    }
    if !(0.0 < w1 && w1 < w3) {
        return Err(Error::invalid("mode_freqs", "need 0 < w1 < w3"));
    }
    if w1 == w2 || w2 == w3 {
        return Err(Error::invalid("mode_freqs", "mode frequencies must be distinct"));
    }
    let pumps = [lf("nu1", w2 + w3), lf("nu2", w3 - w1), lf("nu3", w1 + w2)];
    let others = forbidden(mode_freqs);
    let scale = mode_freqs.iter().fold(0.0f64, |a, w| a.max(w.abs()));
    let mut min_margin = f64::INFINITY;
    let mut closest = (String::new(), String::new());
    let mut collisions = Vec::new();
    for p in &pumps {
        for f in &others {
            let d = (p.value - f.value).abs();
            if d < min_margin {
                min_margin = d;
                closest = (p.label.clone(), f.label.clone());
            }
            if d <= COLLISION_TOL * scale {
                collisions.push(format!("{}={} ~ {}={}", p.label, p.value, f.label, f.value));
            }
        }
    }
    if !collisions.is_empty() {
        return Err(Error::FrequencyCollision(collisions));
    }
    Ok(FrequencyPlan {
        mode_freqs,
        pump_freqs: pumps.map(|p| p.value),
        spurious_diff: others[..2].iter().map(|f| f.value).collect(),
        spurious_sum: others[2..6].iter().map(|f| f.value).collect(),
        min_margin,
        closest,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RwaCheck {
    pub ok: bool,
    /// `min_margin / max g`; infinite when every coupling vanishes.
    pub worst_ratio: f64,
    pub threshold: f64,
}

/// Compares the detuning margin with the strongest coupling, in the same units.
pub fn rwa_check(plan: &FrequencyPlan, couplings: [f64; 3], ratio_threshold: f64) -> Result<RwaCheck> {
    if couplings.iter().any(|g| !g.is_finite() || *g < 0.0) {
        return Err(Error::invalid("couplings", "must be finite and >= 0"));
    }
    let g_max = couplings.iter().fold(0.0f64, |a, &g| a.max(g));
    let worst_ratio = if g_max == 0.0 {
        f64::INFINITY
    } else {
        plan.min_margin / g_max
    };
    Ok(RwaCheck {
        ok: worst_ratio >= ratio_threshold,
        worst_ratio,
        threshold: ratio_threshold,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PumpAmplitudes {
    pub c123: f64,
    /// `(g12, g13, g23)`.
    pub target_g: [f64; 3],
    /// `(|α3|, |α2|, |α1|)`, the pumps driving `g12`, `g13` and `g23`.
    pub amplitudes: [f64; 3],
    /// `(φp1, φp2, φp3)`.
    pub pump_phases: [f64; 3],
    /// `φ = φp3 + φp2 − φp1`; the remaining phases are absorbed into the mode operators.
    pub loop_phase: f64,
}

/// Pump amplitudes `|α| = g / (3 c123)` and the resulting loop phase.
pub fn pump_amplitudes(c123: f64, target_g: [f64; 3], pump_phases: [f64; 3]) -> Result<PumpAmplitudes> {
    if !(c123.is_finite() && c123 > 0.0) {
        return Err(Error::Domain(format!("c123 = {c123} must be positive")));
    }
    if target_g.iter().any(|g| !g.is_finite() || *g < 0.0) {
        return Err(Error::invalid("target_g", "must be finite and >= 0"));
    }
    let [p1, p2, p3] = pump_phases;
    Ok(PumpAmplitudes {
        c123,
        target_g,
        amplitudes: target_g.map(|g| g / (3.0 * c123)),
        pump_phases,
        loop_phase: p3 + p2 - p1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn reference_plan() {
        let p = plan_frequencies([0.5, 7.5, 10.5]).unwrap();
        assert_eq!(p.pump_freqs, [18.0, 10.0, 8.0]);
        assert_eq!(p.spurious_diff, vec![7.0, 3.0]);
        assert_eq!(p.spurious_sum, vec![11.0, 1.0, 15.0, 21.0]);
        assert_eq!(p.min_margin, 0.5);
    }

    #[test]
    fn collisions_listed() {
        match plan_frequencies([1.0, 2.0, 3.0]) {
            Err(Error::FrequencyCollision(list)) => {
                assert!(list.iter().any(|s| s.starts_with("nu2=2 ~ w2=2")), "{list:?}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn scale_equivariance() {
        let a = plan_frequencies([0.5, 7.5, 10.5]).unwrap();
        let b = plan_frequencies([1.0, 15.0, 21.0]).unwrap();
        assert_eq!(b.min_margin, 2.0 * a.min_margin);
        for (x, y) in a.pump_freqs.iter().zip(b.pump_freqs) {
            assert_eq!(2.0 * x, y);
        }
    }

    #[test]
    fn bad_orderings_rejected() {
        assert!(plan_frequencies([3.0, 2.0, 1.0]).is_err());
        assert!(plan_frequencies([0.0, 2.0, 3.0]).is_err());
        assert!(plan_frequencies([1.0, 1.0, 3.0]).is_err());
    }

    #[test]
    fn rwa_ratios() {
        let p = plan_frequencies([0.5, 7.5, 10.5]).unwrap();
        let ok = rwa_check(&p, [1e-3, 0.5e-3, 1e-3], DEFAULT_RWA_RATIO).unwrap();
        assert!(ok.ok && (ok.worst_ratio - 500.0).abs() < 1e-9);
        let bad = rwa_check(&p, [0.05, 0.0, 0.0], DEFAULT_RWA_RATIO).unwrap();
        assert!(!bad.ok && (bad.worst_ratio - 10.0).abs() < 1e-12);
        let zero = rwa_check(&p, [0.0; 3], DEFAULT_RWA_RATIO).unwrap();
        assert!(zero.ok && zero.worst_ratio.is_infinite());
    }

    #[test]
    fn amplitudes_and_phase() {
        let a = pump_amplitudes(1.0, [3.0, 3.0, 3.0], [0.0, FRAC_PI_2, 0.0]).unwrap();
        assert_eq!(a.amplitudes, [1.0, 1.0, 1.0]);
        assert_eq!(a.loop_phase, FRAC_PI_2);
        assert!(pump_amplitudes(0.0, [1.0; 3], [0.0; 3]).is_err());
        let d = 0.3;
        let b = pump_amplitudes(1.0, [1.0; 3], [d, FRAC_PI_2 + d, 0.0]).unwrap();
        assert!((b.loop_phase - FRAC_PI_2).abs() < 1e-15);
    }
}
