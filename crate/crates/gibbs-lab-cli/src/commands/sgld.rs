//! `sgld-converge`: how fast the Langevin chain settles onto the
//! conjugate posterior, and how close a Langevin-trained learner's
//! generalization error gets to the closed form, checkpoint by
//! checkpoint.

use rayon::prelude::*;

use gibbs_lab::model::{Dataset, LossFunction};
use gibbs_lab::samplers::{langevin_chain, squared_error_energy_grad, ChainConfig};

use super::{parallel_mc_gen_error, stream2, timed_ms, write_and_report, RunContext};
use crate::config::{Config, GaussianProblemConfig};
use crate::csvio::{Field, Table};
use crate::error::{CliError, CliResult};

const HEADER: [&str; 12] = [
    "checkpoint",
    "chain_mean",
    "chain_var",
    "post_mean",
    "post_var",
    "mean_rel_err",
    "var_rel_err",
    "mc_gen",
    "mc_gen_se",
    "gen_closed",
    "gap",
    "wall_ms",
];

/// Namespace tags for the command's substreams.
const NS_DATASET: u64 = 0xD5;
const NS_DIAG: u64 = 0x1000;
const NS_LEARNER: u64 = 0x2000;

pub fn run(mut cfg: Config, ctx: &RunContext) -> CliResult<()> {
    let problem_cfg = GaussianProblemConfig::read(&mut cfg, 1, 10)?;
    let step_size = cfg.f64("chain.step_size", 1e-3)?;
    let checkpoints = cfg.usize_array("chain.checkpoints", &[500, 2_000, 10_000, 50_000, 200_000])?;
    let outer = cfg.usize("mc.outer", 1_000)?;
    let fresh = cfg.usize("mc.fresh_per_risk", 400)?;
    let fixed_mean = {
        let v = cfg.f64("dataset.fixed_mean", f64::NAN)?;
        v.is_finite().then_some(v)
    };
    cfg.finish()?;

    let problem = problem_cfg.build()?;
    if !(step_size.is_finite() && step_size >= 0.0) {
        return Err(CliError::Config("chain.step_size must be >= 0".into()));
    }
    if checkpoints.is_empty() || !checkpoints.windows(2).all(|w| w[0] < w[1]) {
        return Err(CliError::Config("chain.checkpoints must be non-empty and increasing".into()));
    }
    if checkpoints[0] < 2 {
        return Err(CliError::Config("chain.checkpoints must start at >= 2".into()));
    }

    let spec = problem.gibbs_spec();
    let gen_closed = problem.gen_error_closed();
    let model = problem.data_model();

    // one fixed diagnostic dataset for the moment comparison
    let diag_dataset = match fixed_mean {
        Some(v) => Dataset::from_points(vec![vec![v; problem.d]; problem.n])
            .map_err(|e| CliError::Config(e.to_string()))?,
        None => model.sample_dataset(&mut stream2(ctx.seed, NS_DATASET, 0)),
    };
    let post = problem.posterior_params(&diag_dataset).map_err(CliError::from)?;

    let rows: Vec<CliResult<Vec<Field>>> = checkpoints
        .par_iter()
        .enumerate()
        .map(|(kidx, &steps)| {
            let (row, wall_ms) = timed_ms(ctx.timing, || -> CliResult<Vec<Field>> {
                let burn_in = ((steps as f64 * 0.2) as usize).min(steps - 1);
                let diag_cfg =
                    ChainConfig::new(steps, burn_in, step_size).map_err(CliError::from)?;
                let mut rng = stream2(ctx.seed, NS_DIAG, kidx as u64);
                let chain = langevin_chain(
                    &spec,
                    &diag_dataset,
                    squared_error_energy_grad,
                    &diag_cfg,
                    &mut rng,
                )?;
                let mean_rel_err = chain
                    .diagnostics
                    .mean
                    .iter()
                    .zip(&post.mean)
                    .map(|(c, p)| (c - p).abs() / p.abs().max(post.sigma1_sq.sqrt()))
                    .fold(0.0f64, f64::max);
                let var_rel_err = chain
                    .diagnostics
                    .variance
                    .iter()
                    .map(|v| (v - post.sigma1_sq).abs() / post.sigma1_sq)
                    .fold(0.0f64, f64::max);

                // learner: fresh short chain per replicate, keep the last state
                let learner_cfg =
                    ChainConfig::new(steps, steps - 1, step_size).map_err(CliError::from)?;
                let est = parallel_mc_gen_error(
                    &model,
                    |s, rng| {
                        let chain = langevin_chain(
                            &spec,
                            s,
                            squared_error_energy_grad,
                            &learner_cfg,
                            rng,
                        )?;
                        Ok(chain.draws.into_iter().next_back().expect("one kept draw"))
                    },
                    &LossFunction::SquaredError,
                    outer,
                    fresh,
                    ctx.seed,
                    NS_LEARNER + kidx as u64,
                )?;

                Ok(vec![
                    Field::from(steps),
                    Field::from(chain.diagnostics.mean[0]),
                    Field::from(chain.diagnostics.variance[0]),
                    Field::from(post.mean[0]),
                    Field::from(post.sigma1_sq),
                    Field::from(mean_rel_err),
                    Field::from(var_rel_err),
                    Field::from(est.value),
                    Field::from(est.std_error),
                    Field::from(gen_closed),
                    Field::from((est.value - gen_closed).abs()),
                ])
            });
            let mut row = row?;
            row.push(Field::opt_f64(wall_ms));
            Ok(row)
        })
        .collect();

    let mut table = Table::new("sgld-converge.v1", &HEADER);
    let mut final_errs = (0.0, 0.0, 0.0);
    for row in rows {
        let row = row?;
        if let (Field::F64(me), Field::F64(ve), Field::F64(gap)) = (&row[5], &row[6], &row[10]) {
            final_errs = (*me, *ve, *gap);
        }
        table.push(row);
    }
    write_and_report(&table, &ctx.out_path("sgld_converge.csv"))?;
    println!(
        "final checkpoint: mean_rel_err {:.4}, var_rel_err {:.4}, gap to closed form {:.4}",
        final_errs.0, final_errs.1, final_errs.2
    );
    Ok(())
}
