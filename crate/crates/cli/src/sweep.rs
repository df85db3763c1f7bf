//! Grid evaluation. Points are computed on the rayon pool and collected in sweep order.

use rayon::prelude::*;

use crate::config::ScenarioConfig;
use crate::metrics::{evaluate, Cell};
use crate::output::Table;
use crate::CliError;

/// Cartesian product of the sweep axes, outermost axis first.
pub fn grid(config: &ScenarioConfig) -> Vec<Vec<f64>> {
    let mut points = vec![Vec::new()];
    for s in &config.sweep {
        let xs = s.points();
        points = points
            .into_iter()
            .flat_map(|prefix| {
                xs.iter().map(move |&x| {
                    let mut p = prefix.clone();
                    p.push(x);
                    p
                })
            })
            .collect();
    }
    points
}

pub fn run_scenario(command: &str, config: &ScenarioConfig) -> Result<Table, CliError> {
    config.validate()?;
    let metrics = config.metrics();
    let axes: Vec<_> = config.sweep.iter().map(|s| s.axis).collect();
    let results: Vec<Result<Vec<Cell>, CliError>> = grid(config)
        .into_par_iter()
        .map(|xs| {
            let mut p = config.params.clone();
            for (axis, &x) in axes.iter().zip(&xs) {
                axis.apply(&mut p, x);
            }
            let mut row: Vec<Cell> = xs.into_iter().map(Cell::Num).collect();
            row.extend(evaluate(config.system, &p, &metrics, config.log_base)?);
            Ok(row)
        })
        .collect();
    let rows = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(Table {
        command: command.into(),
        config: config.clone(),
        axes,
        metrics,
        rows,
    })
}
