//! `verify-thm1-gaussian`: Monte-Carlo generalization error of the
//! Gaussian mean problem against its closed form, plus the identity
//! columns.

use gibbs_lab::model::LossFunction;
use gibbs_lab::samplers::sample_exact_posterior;

use super::{parallel_mc_gen_error, timed_ms, write_and_report, RunContext};
use crate::config::{Config, GaussianProblemConfig};
use crate::csvio::{Field, Table};
use crate::error::{CliError, CliResult};

const HEADER: [&str; 8] =
    ["alpha", "exact_gen", "mc_gen", "mc_gen_se", "iskl", "iskl_over_alpha", "n_samples", "wall_ms"];

pub fn run(mut cfg: Config, ctx: &RunContext) -> CliResult<()> {
    let problem_cfg = GaussianProblemConfig::read(&mut cfg, 2, 10)?;
    let outer = cfg.usize("mc.outer", 200_000)?;
    let fresh = cfg.usize("mc.fresh_per_risk", 400)?;
    cfg.finish()?;
    let problem = problem_cfg.build()?;
    if outer < 2 {
        return Err(CliError::Config("mc.outer must be >= 2".into()));
    }
    if fresh == 0 && problem.sigmaz_sq > 0.0 {
        return Err(CliError::Config("mc.fresh_per_risk must be >= 1".into()));
    }

    let exact = problem.gen_error_closed();
    let iskl = problem.iskl_closed();
    let alpha = problem.alpha();
    let model = problem.data_model();

    let (est, wall_ms) = timed_ms(ctx.timing, || {
        parallel_mc_gen_error(
            &model,
            |s, rng| sample_exact_posterior(&problem, s, rng),
            &LossFunction::SquaredError,
            outer,
            fresh,
            ctx.seed,
            0,
        )
    });
    let est = est?;

    let mut table = Table::new("thm1-gaussian.v1", &HEADER);
    table.push(vec![
        Field::from(alpha),
        Field::from(exact),
        Field::from(est.value),
        Field::from(est.std_error),
        Field::from(iskl),
        Field::from(iskl / alpha),
        Field::from(est.n_samples),
        Field::opt_f64(wall_ms),
    ]);
    write_and_report(&table, &ctx.out_path("thm1_gaussian.csv"))?;

    println!(
        "mc_gen = {} +- {} vs exact {exact} (z = {:.2})",
        est.value,
        est.std_error,
        (est.value - exact) / est.std_error.max(f64::MIN_POSITIVE)
    );
    if !est.within(exact, 3.0) {
        return Err(CliError::Assertion(format!(
            "mc_gen {} deviates from exact {exact} by more than 3 standard errors ({})",
            est.value, est.std_error
        )));
    }
    Ok(())
}
