//! `mixture-concavity`: the generalization error of a mixture of data
//! domains must dominate the mixture of per-domain errors, exactly, for
//! a fixed Gibbs learner.

use rayon::prelude::*;

use gibbs_lab::estimators::{
    mixture_concavity_check, random_two_domain_pair, InstanceBounds, MixtureCheck,
    MIXTURE_SLACK_TOL,
};
use gibbs_lab::seed;

use super::{timed_ms, unit_grid, write_and_report, RunContext};
use crate::config::Config;
use crate::csvio::{Field, Table};
use crate::error::{CliError, CliResult};

const HEADER: [&str; 7] =
    ["instance", "seed", "lambda", "gen_mixture", "avg_gen", "slack", "wall_ms"];

pub fn run(mut cfg: Config, ctx: &RunContext) -> CliResult<()> {
    let instances = cfg.usize("instances", 50)?;
    let lambda_points = cfg.usize("lambda.points", 11)?;
    let bounds = InstanceBounds {
        max_z: cfg.usize("max.z", 4)?,
        max_w: cfg.usize("max.w", 4)?,
        max_n: cfg.usize("max.n", 2)?,
        alphas: cfg.f64_array("alphas", &[1.0])?,
    };
    cfg.finish()?;
    if instances == 0 || lambda_points < 2 {
        return Err(CliError::Config("need instances >= 1 and lambda.points >= 2".into()));
    }

    let lambdas = unit_grid(lambda_points);
    type InstanceResult = (u64, Vec<(f64, MixtureCheck)>, Option<f64>);
    let per_instance: Vec<CliResult<InstanceResult>> = (0..instances)
        .into_par_iter()
        .map(|i| {
            let instance_seed = seed::substream_seed(ctx.seed, i as u64);
            let (checks, wall_ms) = timed_ms(ctx.timing, || -> CliResult<_> {
                let mut rng = seed::stream(ctx.seed, i as u64);
                let (a, b) = random_two_domain_pair(&bounds, &mut rng)?;
                lambdas
                    .iter()
                    .map(|&l| Ok((l, mixture_concavity_check(&a, &b, l)?)))
                    .collect::<CliResult<Vec<_>>>()
            });
            Ok((instance_seed, checks?, wall_ms))
        })
        .collect();

    let mut table = Table::new("mixture-concavity.v1", &HEADER);
    let mut worst: Option<(usize, u64, f64, f64)> = None;
    for (i, item) in per_instance.into_iter().enumerate() {
        let (instance_seed, checks, wall_ms) = item?;
        for (lambda, check) in checks {
            table.push(vec![
                Field::from(i),
                Field::from(instance_seed),
                Field::from(lambda),
                Field::from(check.gen_mixture),
                Field::from(check.avg_gen),
                Field::from(check.slack),
                Field::opt_f64(wall_ms),
            ]);
            if worst.is_none_or(|(_, _, _, s)| check.slack < s) {
                worst = Some((i, instance_seed, lambda, check.slack));
            }
        }
    }
    write_and_report(&table, &ctx.out_path("mixture_concavity.csv"))?;

    let (wi, wseed, wlambda, wslack) = worst.expect("at least one row");
    println!(
        "{instances} instances x {lambda_points} lambdas: min slack = {wslack:.3e} (tolerance {:.0e})",
        -MIXTURE_SLACK_TOL
    );
    if wslack < -MIXTURE_SLACK_TOL {
        return Err(CliError::Assertion(format!(
            "concavity violated on instance {wi} (substream seed {wseed}) at lambda {wlambda}: slack {wslack:.3e}"
        )));
    }
    Ok(())
}
