//! `bounds-compare`: every bound next to the exact value it bounds.
//!
//! Gaussian mode puts the three per-sample mutual-information bound
//! realizations side by side (they differ by constants) and reports
//! whenever the exact error exceeds the literal closed-form one, since
//! only the envelope-derived form is certified. Discrete mode compares
//! the bounded-loss temperature bounds against enumeration-exact errors.

use rayon::prelude::*;

use gibbs_lab::bounds::{prior_bounds, thm2_bound, BoundInputs};
use gibbs_lab::estimators::{
    enumerate_joint, exact_gen_discrete, exact_info_discrete, random_discrete_problem,
    InstanceBounds,
};
use gibbs_lab::seed;

use super::{timed_ms, write_and_report, RunContext};
use crate::commands::sweep::closed_form_row;
use crate::config::{Config, GaussianProblemConfig};
use crate::csvio::{Field, Table};
use crate::error::{CliError, CliResult};

const GAUSSIAN_HEADER: [&str; 10] = [
    "n",
    "exact_gen",
    "iskl",
    "mutual",
    "lautum",
    "ismi_printed",
    "ismi_derived",
    "ismi_numeric",
    "exact_gt_printed",
    "wall_ms",
];

const DISCRETE_HEADER: [&str; 16] = [
    "instance",
    "seed",
    "alpha",
    "n",
    "sigma",
    "c_e_exact",
    "exact_gen",
    "iskl",
    "mutual",
    "lautum",
    "thm2",
    "thm2_exact_ce",
    "dp",
    "raginsky",
    "kuzborskij",
    "wall_ms",
];

pub fn run(mut cfg: Config, ctx: &RunContext) -> CliResult<()> {
    match cfg.string("problem.kind", "gaussian")?.as_str() {
        "gaussian" => gaussian(cfg, ctx),
        "discrete" => discrete(cfg, ctx),
        other => Err(CliError::Config(format!(
            "problem.kind must be gaussian or discrete, got {other:?}"
        ))),
    }
}

fn gaussian(mut cfg: Config, ctx: &RunContext) -> CliResult<()> {
    let problem_cfg = GaussianProblemConfig::read(&mut cfg, 2, 10)?;
    let ns = cfg.usize_array("sweep.values", &[problem_cfg.n])?;
    cfg.finish()?;
    if ns.is_empty() || !ns.windows(2).all(|w| w[0] < w[1]) {
        return Err(CliError::Config("sweep.values must be non-empty and increasing".into()));
    }

    let mut table = Table::new("bounds-compare-gaussian.v1", &GAUSSIAN_HEADER);
    let mut printed_violations = 0usize;
    for &n in &ns {
        let (row, wall_ms) = timed_ms(ctx.timing, || -> CliResult<_> {
            let problem = problem_cfg.build_at_n(n)?;
            closed_form_row(&problem, n as f64)
        });
        let row = row?;
        let exact = row.exact_gen.expect("closed form populated");
        let printed = row.ismi_printed.expect("closed form populated");
        let violated = exact > printed;
        if violated {
            printed_violations += 1;
            eprintln!(
                "warning: exact gen {exact} exceeds the literal closed-form bound {printed} at n = {n}; \
                 only the envelope-derived form is certified"
            );
        }
        table.push(vec![
            Field::from(n),
            Field::from(exact),
            Field::opt_f64(row.iskl),
            Field::opt_f64(row.mutual),
            Field::opt_f64(row.lautum),
            Field::from(printed),
            Field::opt_f64(row.ismi_derived),
            Field::opt_f64(row.ismi_numeric),
            Field::from(if violated { "true" } else { "false" }),
            Field::opt_f64(wall_ms),
        ]);
    }
    write_and_report(&table, &ctx.out_path("bounds_compare.csv"))?;
    println!("{} rows, {printed_violations} literal-form violations", ns.len());
    Ok(())
}

fn discrete(mut cfg: Config, ctx: &RunContext) -> CliResult<()> {
    let instances = cfg.usize("instances", 100)?;
    let bounds = InstanceBounds {
        max_z: cfg.usize("max.z", 4)?,
        max_w: cfg.usize("max.w", 5)?,
        max_n: cfg.usize("max.n", 3)?,
        alphas: cfg.f64_array("alphas", &[0.5, 1.0, 2.0])?,
    };
    cfg.finish()?;
    if instances == 0 {
        return Err(CliError::Config("instances must be >= 1".into()));
    }

    let rows: Vec<CliResult<Vec<Field>>> = (0..instances)
        .into_par_iter()
        .map(|i| {
            let instance_seed = seed::substream_seed(ctx.seed, i as u64);
            let (row, wall_ms) = timed_ms(ctx.timing, || -> CliResult<Vec<Field>> {
                let mut rng = seed::stream(ctx.seed, i as u64);
                let p = random_discrete_problem(&bounds, &mut rng).map_err(CliError::from)?;
                let t = enumerate_joint(&p).map_err(CliError::from)?;
                let gen = exact_gen_discrete(&t);
                let info = exact_info_discrete(&t);
                let (lo, hi) = p.loss.range();
                let sigma = 0.5 * (hi - lo);
                let c_e = if info.mutual > 1e-12 { info.lautum / info.mutual } else { 0.0 };
                let loose = thm2_bound(&BoundInputs::new(sigma, p.alpha, p.n, 0.0)?);
                let tight = thm2_bound(&BoundInputs::new(sigma, p.alpha, p.n, c_e)?);
                let pb = prior_bounds(sigma, p.alpha, p.n, Some(info.mutual));
                if gen > loose || gen > tight {
                    eprintln!(
                        "warning: exact gen {gen} exceeds a temperature bound on instance {i} \
                         (substream seed {instance_seed})"
                    );
                }
                Ok(vec![
                    Field::from(i),
                    Field::from(instance_seed),
                    Field::from(p.alpha),
                    Field::from(p.n),
                    Field::from(sigma),
                    Field::from(c_e),
                    Field::from(gen),
                    Field::from(info.skl),
                    Field::from(info.mutual),
                    Field::from(info.lautum),
                    Field::from(loose),
                    Field::from(tight),
                    Field::from(pb.dp),
                    Field::from(pb.raginsky),
                    Field::from(pb.kuzborskij),
                ])
            });
            let mut row = row?;
            row.push(Field::opt_f64(wall_ms));
            Ok(row)
        })
        .collect();

    let mut table = Table::new("bounds-compare-discrete.v1", &DISCRETE_HEADER);
    for row in rows {
        table.push(row?);
    }
    write_and_report(&table, &ctx.out_path("bounds_compare.csv"))?;
    println!("{instances} instances compared");
    Ok(())
}
