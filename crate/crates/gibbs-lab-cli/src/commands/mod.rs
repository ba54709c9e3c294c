//! Command implementations. Every command is deterministic given
//! (config, seed): all randomness flows through fixed substream indices,
//! work is decomposed into a worker-count-independent set of chunks, and
//! results are reduced in task-index order.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use gibbs_lab::estimators::{mc_gen_error, merge_estimates, EstimateWithError};
use gibbs_lab::model::{DataModel, Dataset, Hypothesis, LossFunction};
use gibbs_lab::seed::{self, Stream};

use crate::error::{CliError, CliResult};

pub mod bounds_compare;
pub mod mixture;
pub mod sgld;
pub mod sweep;
pub mod thm1_discrete;
pub mod thm1_gaussian;

/// Shared invocation context.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Emit wall-clock columns. Off by default so re-runs stay
    /// byte-identical.
    pub timing: bool,
}

impl RunContext {
    pub fn out_path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}

/// Second-level substream: task `b` inside namespace `a`.
pub fn stream2(master: u64, a: u64, b: u64) -> Stream {
    seed::stream(seed::substream_seed(master, a), b)
}

/// Milliseconds elapsed, reported only when timing is on.
pub fn timed_ms<T>(timing: bool, f: impl FnOnce() -> T) -> (T, Option<f64>) {
    let start = Instant::now();
    let value = f();
    let ms = timing.then(|| start.elapsed().as_secs_f64() * 1e3);
    (value, ms)
}

/// Fixed chunk decomposition of `total` replicates: independent of the
/// worker count, every chunk at least two replicates.
pub fn chunk_sizes(total: usize) -> Vec<usize> {
    let chunks = (total / 2).clamp(1, 64);
    let base = total / chunks;
    let extra = total % chunks;
    (0..chunks).map(|c| base + usize::from(c < extra)).collect()
}

/// Monte-Carlo generalization error over a fixed chunk decomposition,
/// fanned out on the worker pool and merged in chunk order.
pub fn parallel_mc_gen_error<F>(
    model: &DataModel,
    learner: F,
    loss: &LossFunction,
    outer: usize,
    fresh_per_risk: usize,
    master: u64,
    namespace: u64,
) -> CliResult<EstimateWithError>
where
    F: Fn(&Dataset, &mut Stream) -> gibbs_lab::Result<Hypothesis> + Sync,
{
    let sizes = chunk_sizes(outer);
    let parts: Vec<gibbs_lab::Result<EstimateWithError>> = sizes
        .par_iter()
        .enumerate()
        .map(|(c, &size)| {
            let mut rng = stream2(master, namespace, c as u64);
            mc_gen_error(model, &learner, loss, size, fresh_per_risk, &mut rng)
        })
        .collect();
    let parts: Vec<EstimateWithError> =
        parts.into_iter().collect::<gibbs_lab::Result<_>>().map_err(CliError::from)?;
    merge_estimates(&parts).map_err(CliError::from)
}

/// Evenly spaced grid on [0, 1] inclusive.
pub fn unit_grid(points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![0.5];
    }
    (0..points).map(|i| i as f64 / (points - 1) as f64).collect()
}

pub fn write_and_report(table: &crate::csvio::Table, path: &Path) -> CliResult<()> {
    table.write_to(path)?;
    println!("wrote {}", path.display());
    Ok(())
}
