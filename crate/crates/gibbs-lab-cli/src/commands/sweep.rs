//! `sweep`: evaluate the closed forms, optional Monte-Carlo estimates,
//! and every bound along an `n` or `alpha` axis; fit log-log slopes and
//! emit a chart.

use rayon::prelude::*;

use gibbs_lab::bounds::{ismi_bound, IsmiMode};
use gibbs_lab::estimators::loglog_slope;
use gibbs_lab::gaussian_mean::GaussianMeanProblem;
use gibbs_lab::model::LossFunction;
use gibbs_lab::samplers::sample_exact_posterior;

use super::{parallel_mc_gen_error, timed_ms, write_and_report, RunContext};
use crate::config::{Config, GaussianProblemConfig};
use crate::csvio::{Field, Table};
use crate::error::{CliError, CliResult};
use crate::svg::{warn_only, write_loglog_chart, Series};

/// Unified result-row schema shared with `bounds-compare`.
pub const RESULT_HEADER: [&str; 15] = [
    "sweep_value",
    "exact_gen",
    "mc_gen",
    "mc_gen_se",
    "iskl",
    "mutual",
    "lautum",
    "thm2",
    "dp",
    "raginsky",
    "kuzborskij",
    "ismi_printed",
    "ismi_derived",
    "ismi_numeric",
    "wall_ms",
];

#[derive(Debug, Clone, Copy)]
enum Axis {
    N,
    Alpha,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ResultRow {
    pub sweep_value: f64,
    pub exact_gen: Option<f64>,
    pub mc_gen: Option<f64>,
    pub mc_gen_se: Option<f64>,
    pub iskl: Option<f64>,
    pub mutual: Option<f64>,
    pub lautum: Option<f64>,
    pub thm2: Option<f64>,
    pub dp: Option<f64>,
    pub raginsky: Option<f64>,
    pub kuzborskij: Option<f64>,
    pub ismi_printed: Option<f64>,
    pub ismi_derived: Option<f64>,
    pub ismi_numeric: Option<f64>,
    pub wall_ms: Option<f64>,
}

impl ResultRow {
    pub fn fields(&self) -> Vec<Field> {
        vec![
            Field::from(self.sweep_value),
            Field::opt_f64(self.exact_gen),
            Field::opt_f64(self.mc_gen),
            Field::opt_f64(self.mc_gen_se),
            Field::opt_f64(self.iskl),
            Field::opt_f64(self.mutual),
            Field::opt_f64(self.lautum),
            Field::opt_f64(self.thm2),
            Field::opt_f64(self.dp),
            Field::opt_f64(self.raginsky),
            Field::opt_f64(self.kuzborskij),
            Field::opt_f64(self.ismi_printed),
            Field::opt_f64(self.ismi_derived),
            Field::opt_f64(self.ismi_numeric),
            Field::opt_f64(self.wall_ms),
        ]
    }
}

/// Evaluate the closed-form and bound columns for one problem.
pub fn closed_form_row(problem: &GaussianMeanProblem, sweep_value: f64) -> CliResult<ResultRow> {
    let info = problem.mi_lautum_closed();
    Ok(ResultRow {
        sweep_value,
        exact_gen: Some(problem.gen_error_closed()),
        iskl: Some(problem.iskl_closed()),
        mutual: Some(info.mutual),
        lautum: Some(info.lautum),
        // no uniform sub-Gaussian constant exists for the unbounded
        // squared loss, so the bounded-loss bounds stay absent here
        ismi_printed: Some(ismi_bound(problem, IsmiMode::Printed)?),
        ismi_derived: Some(ismi_bound(problem, IsmiMode::Derived)?),
        ismi_numeric: Some(ismi_bound(problem, IsmiMode::Numeric)?),
        ..ResultRow::default()
    })
}

pub fn run(mut cfg: Config, ctx: &RunContext) -> CliResult<()> {
    let problem_cfg = GaussianProblemConfig::read(&mut cfg, 1, 16)?;
    let axis = match cfg.string("sweep.axis", "n")?.as_str() {
        "n" => Axis::N,
        "alpha" => Axis::Alpha,
        other => return Err(CliError::Config(format!("sweep.axis must be n or alpha, got {other:?}"))),
    };
    let values = match axis {
        Axis::N => cfg
            .usize_array("sweep.values", &[4, 8, 16, 32, 64, 128])?
            .into_iter()
            .map(|v| v as f64)
            .collect::<Vec<f64>>(),
        Axis::Alpha => cfg.f64_array("sweep.values", &[0.25, 0.5, 1.0, 2.0, 4.0, 8.0])?,
    };
    let outer = cfg.usize("mc.outer", 0)?;
    let fresh = cfg.usize("mc.fresh_per_risk", 400)?;
    let emit_svg = cfg.bool("svg", true)?;
    cfg.finish()?;

    if values.len() < 2 {
        return Err(CliError::Config("sweep.values needs at least 2 points".into()));
    }
    if !values.windows(2).all(|w| w[0] < w[1]) {
        return Err(CliError::Config("sweep.values must be strictly increasing".into()));
    }
    if values[0] <= 0.0 {
        return Err(CliError::Config("sweep.values must be positive".into()));
    }

    let rows: Vec<CliResult<ResultRow>> = values
        .par_iter()
        .enumerate()
        .map(|(idx, &value)| {
            let (row, wall_ms) = timed_ms(ctx.timing, || -> CliResult<ResultRow> {
                let problem = match axis {
                    Axis::N => problem_cfg.build_at_n(value as usize)?,
                    Axis::Alpha => {
                        // alpha fixes the temperature surrogate via
                        // sigma^2 = n / (2 alpha)
                        let mut pc = problem_cfg.clone();
                        pc.sigma_sq = pc.n as f64 / (2.0 * value);
                        pc.build()?
                    }
                };
                let mut row = closed_form_row(&problem, value)?;
                if outer > 0 {
                    let est = parallel_mc_gen_error(
                        &problem.data_model(),
                        |s, rng| sample_exact_posterior(&problem, s, rng),
                        &LossFunction::SquaredError,
                        outer,
                        fresh,
                        ctx.seed,
                        idx as u64,
                    )?;
                    row.mc_gen = Some(est.value);
                    row.mc_gen_se = Some(est.std_error);
                }
                Ok(row)
            });
            let mut row = row?;
            row.wall_ms = wall_ms;
            Ok(row)
        })
        .collect();
    let rows: Vec<ResultRow> = rows.into_iter().collect::<CliResult<_>>()?;

    let mut table = Table::new("sweep.v1", &RESULT_HEADER);
    for row in &rows {
        table.push(row.fields());
    }

    // footer row of fitted log-log slopes, one per populated series
    let slope_of = |pick: fn(&ResultRow) -> Option<f64>| -> Option<f64> {
        let pts: Vec<(f64, f64)> =
            rows.iter().filter_map(|r| pick(r).map(|y| (r.sweep_value, y))).collect();
        loglog_slope(&pts)
    };
    let slopes = ResultRow {
        sweep_value: f64::NAN, // replaced by the label below
        exact_gen: slope_of(|r| r.exact_gen),
        mc_gen: slope_of(|r| r.mc_gen),
        iskl: slope_of(|r| r.iskl),
        mutual: slope_of(|r| r.mutual),
        lautum: slope_of(|r| r.lautum),
        ismi_printed: slope_of(|r| r.ismi_printed),
        ismi_derived: slope_of(|r| r.ismi_derived),
        ismi_numeric: slope_of(|r| r.ismi_numeric),
        ..ResultRow::default()
    };
    let mut slope_fields = slopes.fields();
    slope_fields[0] = Field::from("loglog_slope");
    table.push(slope_fields);

    write_and_report(&table, &ctx.out_path("sweep.csv"))?;
    if let (Some(g), Some(i)) = (slopes.exact_gen, slopes.ismi_derived) {
        println!("loglog slopes: exact_gen {g:.4}, ismi_derived {i:.4}");
    }

    if emit_svg {
        let series_of = |name: &str, pick: fn(&ResultRow) -> Option<f64>| Series {
            name: name.to_string(),
            points: rows.iter().filter_map(|r| pick(r).map(|y| (r.sweep_value, y))).collect(),
        };
        let mut series = vec![
            series_of("exact_gen", |r| r.exact_gen),
            series_of("ismi_printed", |r| r.ismi_printed),
            series_of("ismi_derived", |r| r.ismi_derived),
            series_of("ismi_numeric", |r| r.ismi_numeric),
        ];
        if outer > 0 {
            series.push(series_of("mc_gen", |r| r.mc_gen));
        }
        let x_label = match axis {
            Axis::N => "n",
            Axis::Alpha => "alpha",
        };
        warn_only(
            write_loglog_chart(
                &ctx.out_path("sweep.svg"),
                "generalization error and bounds",
                x_label,
                &series,
            ),
            "sweep.svg",
        );
    }
    Ok(())
}
