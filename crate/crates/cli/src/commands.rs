//! Subcommand implementations. Each returns the text to print on success.

use std::io::Read;

use nrloop::circuits::{predicted_factors, swap_figure_of_merit, verify_polar, SwapConfig};
use nrloop::gaussian::LogBase;
use nrloop::linalg::{PolarSide, RealMat};
use nrloop::model::{max_drift_real_part, routh_hurwitz, ModeParams, StabilityMethod};
use nrloop::pumpplan::{plan_frequencies, pump_amplitudes, rwa_check};
use nrloop::{LoopParams, ModePair};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::FRAC_PI_2;

use crate::config::{Axis, Format, ScenarioConfig, SweepSpec, SystemKind};
use crate::metrics::Metric;
use crate::output::{Field, Report};
use crate::sweep::run_scenario;
use crate::{log_base, CliError, Command, OutputArgs, ParamArgs, RangeArgs};

pub fn dispatch(cmd: Command) -> Result<String, CliError> {
    match cmd {
        Command::Run { params, out } => {
            if out.config.is_none() {
                return Err(CliError::usage("run requires --config"));
            }
            let cfg = build_config(&params, &out)?;
            Ok(run_scenario("run", &cfg)?.render(cfg.format))
        }
        Command::SweepPhase { params, out, range } => {
            let pair12 = ModePair(1, 2);
            let pair23 = ModePair(2, 3);
            let defaults = [Metric::En(pair12), Metric::En(pair23), Metric::Mu(pair12), Metric::Mu(pair23)];
            let sweeps = [(Axis::Phi, -std::f64::consts::PI, std::f64::consts::PI, 73)];
            run_sweep("sweep-phase", &params, &out, &range, &sweeps, &defaults)
        }
        Command::SweepThermal { params, out, range, mode } => {
            let axis = [Axis::N1, Axis::N2, Axis::N3][usize::from(mode) - 1];
            let p = ModePair(1, 2);
            let defaults = [Metric::En(p), Metric::Mu(p), Metric::TmsEn, Metric::TmsMu];
            run_sweep("sweep-thermal", &params, &out, &range, &[(axis, 0.0, 20.0, 21)], &defaults)
        }
        Command::SweepLoss { params, out, range } => {
            let p = ModePair(1, 2);
            let sweeps = [(Axis::Loss1, 0.0, 0.5, 6), (Axis::Loss3, 0.0, 0.5, 6)];
            run_sweep("sweep-loss", &params, &out, &range, &sweeps, &[Metric::En(p), Metric::Mu(p)])
        }
        Command::SweepFreq { params, out, range } => {
            let p = ModePair(1, 2);
            let defaults = [Metric::En(p), Metric::Mu(p), Metric::Nr(p)];
            run_sweep("sweep-freq", &params, &out, &range, &[(Axis::Omega, -3.0, 3.0, 61)], &defaults)
        }
        Command::Decompose { params, side, format } => decompose(&params, &side, format),
        Command::Stability { params, random, seed, format } => match random {
            Some(n) => stability_random(n, seed, format),
            None => stability(&params, format),
        },
        Command::PlanPumps { modes, couplings, rwa_ratio, c123, pump_phases, format } => {
            plan_pumps(modes, couplings, rwa_ratio, c123, pump_phases, format)
        }
        Command::Swap { ca, cb, log_base: base, format } => {
            let base = log_base(&base);
            let f = swap_figure_of_merit(SwapConfig::new(ca, cb)?)?;
            let mut r = Report::new("swap");
            r.push("coop_a", ca);
            r.push("coop_b", cb);
            r.push("tanh_r", f.tanh_r);
            r.push("r", f.r);
            r.push(format!("log_negativity[{}]", base_label(base)), f.log_negativity * base.ln_factor());
            r.push("purity", f.purity);
            Ok(r.render(format))
        }
    }
}

fn base_label(b: LogBase) -> &'static str {
    match b {
        LogBase::E => "ln",
        LogBase::Two => "log2",
    }
}

fn read_config(path: &std::path::Path) -> Result<ScenarioConfig, CliError> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::usage(format!("stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?
    };
    ScenarioConfig::parse(&text, &path.display().to_string())
}

fn build_config(params: &ParamArgs, out: &OutputArgs) -> Result<ScenarioConfig, CliError> {
    let mut cfg = match &out.config {
        Some(path) => read_config(path)?,
        None => ScenarioConfig::default(),
    };
    let p = &mut cfg.params;
    if params.c12.is_some() {
        p.c12 = params.c12;
    }
    let set = |dst: &mut f64, src: Option<f64>| {
        if let Some(x) = src {
            *dst = x;
        }
    };
    set(&mut p.c13, params.c13);
    set(&mut p.c23, params.c23);
    set(&mut p.phi, params.phi);
    set(&mut p.phi, params.phi_deg.map(f64::to_radians));
    set(&mut p.omega, params.omega);
    if let Some(k) = params.kappa {
        p.kappa = k;
    }
    if let Some(l) = params.loss {
        p.loss = l;
    }
    if let Some(n) = params.n_th {
        p.n_th = n;
    }
    if params.n_th_int.is_some() {
        p.n_th_int = params.n_th_int;
    }
    if let Some(m) = &out.metrics {
        cfg.outputs = m.clone();
    }
    if let Some(b) = &out.log_base {
        cfg.log_base = log_base(b);
    }
    if let Some(f) = out.format {
        cfg.format = f;
    }
    Ok(cfg)
}

fn run_sweep(
    command: &str,
    params: &ParamArgs,
    out: &OutputArgs,
    range: &RangeArgs,
    sweeps: &[(Axis, f64, f64, usize)],
    default_metrics: &[Metric],
) -> Result<String, CliError> {
    let mut cfg = build_config(params, out)?;
    cfg.sweep = sweeps
        .iter()
        .map(|&(axis, from, to, steps)| SweepSpec {
            axis,
            from: range.from.unwrap_or(from),
            to: range.to.unwrap_or(to),
            steps: range.steps.unwrap_or(steps),
        })
        .collect();
    if cfg.outputs.is_empty() {
        cfg.outputs = if cfg.system == SystemKind::Nrl {
            default_metrics.to_vec()
        } else {
            Metric::defaults(cfg.system).to_vec()
        };
    }
    Ok(run_scenario(command, &cfg)?.render(cfg.format))
}

fn push_matrix(r: &mut Report, key: &str, m: &RealMat) {
    for i in 0..m.rows() {
        r.push_row(format!("{key}[{}]", i + 1), (0..m.cols()).map(|j| m[(i, j)]));
    }
}

fn decompose(params: &ParamArgs, side: &str, format: Format) -> Result<String, CliError> {
    let cfg = build_config(params, &OutputArgs::default())?;
    let p = cfg.params.loop_params()?;
    let both = vec![PolarSide::Left, PolarSide::Right];
    let sides = match side {
        "both" => both,
        "auto" => match predicted_factors(&p) {
            Ok(f) => both.into_iter().filter(|s| f.iter().any(|x| x.side == *s)).collect(),
            Err(_) => both,
        },
        s => vec![s.parse::<PolarSide>().map_err(CliError::usage)?],
    };
    let mut r = Report::new("decompose");
    r.push("c12", p.c12);
    r.push("c13", p.c13);
    r.push("c23", p.c23);
    r.push("phi", p.phi);
    for side in sides {
        let rep = verify_polar(&p, side)?;
        let tag = match side {
            PolarSide::Left => "left",
            PolarSide::Right => "right",
        };
        r.push(format!("{tag}.reconstruction_residual"), rep.reconstruction_residual);
        match &rep.predicted {
            Some(pred) => {
                r.push(format!("{tag}.predicted"), pred.describe());
                r.push(format!("{tag}.prediction_residual"), rep.prediction_residual.unwrap_or(f64::NAN));
                r.push(format!("{tag}.sign"), rep.sign.unwrap_or(f64::NAN));
                r.push(format!("{tag}.squeezing"), pred.active.parameter);
                r.push(format!("{tag}.squeezing_phase"), pred.active.phase);
                r.push(format!("{tag}.mixing_angle"), pred.passive.parameter);
            }
            None => r.push(format!("{tag}.predicted"), "none"),
        }
        r.push(format!("{tag}.factor_match"), rep.factor_match);
        push_matrix(&mut r, &format!("{tag}.R"), &rep.factors.r);
        push_matrix(&mut r, &format!("{tag}.U"), &rep.factors.u);
    }
    Ok(r.render(format))
}

fn stability(params: &ParamArgs, format: Format) -> Result<String, CliError> {
    let cfg = build_config(params, &OutputArgs::default())?;
    let p = cfg.params.loop_params()?;
    let v = routh_hurwitz(&p)?;
    let mut r = Report::new("stability");
    r.push("c12", p.c12);
    r.push("c13", p.c13);
    r.push("c23", p.c23);
    r.push("phi", p.phi);
    r.push(
        "method",
        match v.method {
            StabilityMethod::RouthHurwitz => "routh_hurwitz",
            StabilityMethod::Numeric => "numeric",
        },
    );
    for (i, c) in v.conditions.iter().enumerate() {
        r.push(
            format!("condition_{}", i + 1),
            Field::Row(vec![c.label.as_str().into(), c.value.into(), c.satisfied.into()]),
        );
    }
    r.push("max_re_eig", v.max_eig_real_part);
    r.push("stable", v.stable);
    Ok(r.render(format))
}

/// Random points at φ = ±π/2: the closed-form verdict against the drift spectrum.
fn stability_random(n: usize, seed: u64, format: Format) -> Result<String, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut disagreements = 0usize;
    let mut stable = 0usize;
    for _ in 0..n {
        let mut mode = || ModeParams::lossless(rng.gen_range(0.1..10.0));
        let modes = [mode()?, mode()?, mode()?];
        let [c12, c13, c23] = [0; 3].map(|_| rng.gen_range(0.0..2.0));
        let phi = if rng.gen_bool(0.5) { FRAC_PI_2 } else { -FRAC_PI_2 };
        let p = LoopParams::new(modes, c12, c13, c23, phi)?;
        let v = routh_hurwitz(&p)?;
        let spectral = max_drift_real_part(&p)? < 0.0;
        stable += usize::from(spectral);
        disagreements += usize::from(v.stable != spectral);
    }
    let mut r = Report::new("stability");
    r.push("samples", n);
    r.push("seed", seed);
    r.push("stable_samples", stable);
    r.push("disagreements", disagreements);
    let text = r.render(format);
    if disagreements > 0 {
        print!("{text}");
        return Err(CliError::runtime(format!(
            "{disagreements} of {n} samples disagree with the drift spectrum"
        )));
    }
    Ok(text)
}

fn plan_pumps(
    modes: [f64; 3],
    couplings: Option<[f64; 3]>,
    rwa_ratio: f64,
    c123: Option<f64>,
    pump_phases: Option<[f64; 3]>,
    format: Format,
) -> Result<String, CliError> {
    let plan = plan_frequencies(modes).map_err(|e| match e {
        nrloop::Error::FrequencyCollision(_) => CliError::runtime(e.to_string()),
        e => e.into(),
    })?;
    let mut r = Report::new("plan-pumps");
    for (i, w) in modes.iter().enumerate() {
        r.push(format!("w{}", i + 1), *w);
    }
    for (i, nu) in plan.pump_freqs.iter().enumerate() {
        r.push(format!("nu{}", i + 1), *nu);
    }
    for (label, x) in ["w2-w1", "w3-w2"].iter().zip(&plan.spurious_diff) {
        r.push(*label, *x);
    }
    for (label, x) in ["w1+w3", "2w1", "2w2", "2w3"].iter().zip(&plan.spurious_sum) {
        r.push(*label, *x);
    }
    r.push("min_margin", plan.min_margin);
    r.push("closest", format!("{} ~ {}", plan.closest.0, plan.closest.1));
    if let Some(g) = couplings {
        let chk = rwa_check(&plan, g, rwa_ratio)?;
        r.push("rwa_threshold", chk.threshold);
        r.push("rwa_worst_ratio", chk.worst_ratio);
        r.push("rwa_ok", chk.ok);
    }
    if let Some(c) = c123 {
        let g = couplings.ok_or_else(|| CliError::usage("--c123 needs --couplings"))?;
        let a = pump_amplitudes(c, g, pump_phases.unwrap_or([0.0; 3]))?;
        for (label, x) in ["alpha3", "alpha2", "alpha1"].iter().zip(a.amplitudes) {
            r.push(*label, x);
        }
        r.push("loop_phase", a.loop_phase);
    }
    Ok(r.render(format))
}
