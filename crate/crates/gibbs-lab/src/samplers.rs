//! Draw hypotheses from Gibbs kernels: exact conjugate sampling for the
//! Gaussian mean problem, random-walk Metropolis for general energies,
//! and an unadjusted Langevin integrator whose stationary law
//! approximates the Gibbs distribution.
//!
//! Chains are sequential by nature; run several concurrently on disjoint
//! seed substreams if needed. Identical streams give bit-identical
//! chains.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::gaussian_mean::GaussianMeanProblem;
use crate::model::{Dataset, GibbsSpec, Hypothesis, Prior};
use crate::{Error, Result};

/// Fraction of the chain discarded by default.
pub const DEFAULT_BURN_IN_FRACTION: f64 = 0.2;

/// Coordinate-norm threshold at which a Langevin chain is declared
/// divergent.
pub const DIVERGENCE_NORM: f64 = 1e6;

/// Chain length, burn-in, and the single scale knob: the proposal
/// standard deviation for Metropolis, the step size for Langevin.
#[derive(Debug, Clone, Copy)]
pub struct ChainConfig {
    pub steps: usize,
    pub burn_in: usize,
    pub scale: f64,
}

impl ChainConfig {
    /// `scale = 0` is accepted only so the degenerate frozen-chain
    /// diagnostic stays expressible; ordinary runs want `scale > 0`.
    pub fn new(steps: usize, burn_in: usize, scale: f64) -> Result<Self> {
        if steps == 0 || burn_in >= steps {
            return Err(Error::InvalidParameter(format!(
                "need steps > burn_in >= 0, got steps={steps}, burn_in={burn_in}"
            )));
        }
        if !(scale.is_finite() && scale >= 0.0) {
            return Err(Error::InvalidParameter(format!("scale must be >= 0, got {scale}")));
        }
        Ok(Self { steps, burn_in, scale })
    }

    /// Config with the default 20% burn-in.
    pub fn with_default_burn_in(steps: usize, scale: f64) -> Result<Self> {
        Self::new(steps, (steps as f64 * DEFAULT_BURN_IN_FRACTION) as usize, scale)
    }
}

/// Well-mixing default for random-walk proposals: `2.4 sigma / sqrt(d)`.
pub fn default_proposal_scale(prior: &Prior) -> f64 {
    match prior {
        Prior::IsotropicGaussian { mean, variance } => {
            2.4 * variance.sqrt() / (mean.len() as f64).sqrt()
        }
        // finite priors use uniform point proposals; the scale is unused
        Prior::Finite { .. } => 1.0,
    }
}

/// Per-coordinate moments of the kept draws.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainDiagnostics {
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
}

/// Post-burn-in draws plus acceptance and moment diagnostics.
#[derive(Debug, Clone)]
pub struct ChainResult {
    pub draws: Vec<Hypothesis>,
    /// Fraction of accepted proposals; `None` for samplers without an
    /// accept/reject step.
    pub acceptance_rate: Option<f64>,
    pub diagnostics: ChainDiagnostics,
}

fn diagnostics_of(draws: &[Hypothesis]) -> ChainDiagnostics {
    let d = draws.first().map_or(0, Hypothesis::dim);
    let n = draws.len() as f64;
    let mut mean = vec![0.0; d];
    for h in draws {
        for (m, x) in mean.iter_mut().zip(&h.w) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let mut variance = vec![0.0; d];
    for h in draws {
        for ((v, m), x) in variance.iter_mut().zip(&mean).zip(&h.w) {
            *v += (x - m) * (x - m);
        }
    }
    for v in &mut variance {
        *v /= n - 1.0;
    }
    ChainDiagnostics { mean, variance }
}

/// One exact draw from the conjugate posterior of the Gaussian mean
/// problem.
pub fn sample_exact_posterior<R: Rng + ?Sized>(
    p: &GaussianMeanProblem,
    s: &Dataset,
    rng: &mut R,
) -> Result<Hypothesis> {
    let post = p.posterior_params(s)?;
    let sd = post.sigma1_sq.sqrt();
    let w = post.mean.iter().map(|m| m + sd * rng.sample::<f64, _>(StandardNormal)).collect();
    Ok(Hypothesis { w })
}

/// Log acceptance ratio of a Metropolis move: the difference of
/// `log prior - alpha * energy` at the proposal and the current state.
/// The partition function cancels and is never evaluated.
pub fn mh_log_acceptance(
    spec: &GibbsSpec,
    s: &Dataset,
    current: &Hypothesis,
    proposal: &Hypothesis,
) -> Result<f64> {
    Ok(spec.log_unnormalized(proposal, s)? - spec.log_unnormalized(current, s)?)
}

/// Random-walk Metropolis chain targeting the Gibbs law.
///
/// Continuous priors get an isotropic Gaussian random walk with standard
/// deviation `cfg.scale`; finite priors get uniform proposals over the
/// support (symmetric, so the plain Metropolis ratio applies). The chain
/// starts from a prior draw.
pub fn mh_gibbs_chain<R: Rng + ?Sized>(
    spec: &GibbsSpec,
    s: &Dataset,
    cfg: &ChainConfig,
    rng: &mut R,
) -> Result<ChainResult> {
    if matches!(spec.prior, Prior::IsotropicGaussian { .. }) && cfg.scale == 0.0 {
        return Err(Error::InvalidParameter("Metropolis proposal scale must be > 0".into()));
    }
    let mut current = spec.prior.sample(rng);
    let mut current_logp = spec.log_unnormalized(&current, s)?;
    if !current_logp.is_finite() {
        return Err(Error::NonFinite("energy at the initialization point"));
    }

    let mut draws = Vec::with_capacity(cfg.steps - cfg.burn_in);
    let mut accepted = 0usize;
    for step in 0..cfg.steps {
        let proposal = match &spec.prior {
            Prior::IsotropicGaussian { .. } => Hypothesis {
                w: current
                    .w
                    .iter()
                    .map(|x| x + cfg.scale * rng.sample::<f64, _>(StandardNormal))
                    .collect(),
            },
            Prior::Finite { points, .. } => points[rng.random_range(0..points.len())].clone(),
        };
        let proposal_logp = spec.log_unnormalized(&proposal, s)?;
        let log_acc = proposal_logp - current_logp;
        if log_acc >= 0.0 || rng.random::<f64>().ln() < log_acc {
            current = proposal;
            current_logp = proposal_logp;
            accepted += 1;
        }
        if step >= cfg.burn_in {
            draws.push(current.clone());
        }
    }
    if accepted == 0 {
        return Err(Error::ZeroAcceptance);
    }
    let diagnostics = diagnostics_of(&draws);
    Ok(ChainResult {
        draws,
        acceptance_rate: Some(accepted as f64 / cfg.steps as f64),
        diagnostics,
    })
}

/// Unadjusted Langevin chain:
/// `w <- w - gamma * grad(alpha * f(w, s) - log prior(w)) + sqrt(2 gamma) * xi`.
///
/// The energy gradient is supplied analytically; the prior gradient
/// comes from the (necessarily Gaussian) prior. The chain starts from a
/// prior draw and aborts if a coordinate norm exceeds
/// [`DIVERGENCE_NORM`].
pub fn langevin_chain<R: Rng + ?Sized>(
    spec: &GibbsSpec,
    s: &Dataset,
    grad_energy: impl Fn(&[f64], &Dataset) -> Vec<f64>,
    cfg: &ChainConfig,
    rng: &mut R,
) -> Result<ChainResult> {
    langevin_core(spec, s, grad_energy, cfg, |buf| {
        for x in buf {
            *x = rng.sample(StandardNormal);
        }
    })
}

fn langevin_core(
    spec: &GibbsSpec,
    s: &Dataset,
    grad_energy: impl Fn(&[f64], &Dataset) -> Vec<f64>,
    cfg: &ChainConfig,
    mut noise: impl FnMut(&mut [f64]),
) -> Result<ChainResult> {
    let Prior::IsotropicGaussian { mean: prior_mean, variance: prior_var } = &spec.prior else {
        return Err(Error::InvalidParameter("Langevin needs a differentiable (Gaussian) prior".into()));
    };
    let gamma = cfg.scale;
    let noise_scale = (2.0 * gamma).sqrt();
    let d = prior_mean.len();

    let mut rng_buf = vec![0.0; d];
    let mut current = {
        // initial point from the prior, through the same noise source so
        // zero-noise runs start at the prior mean
        noise(&mut rng_buf);
        let sd = prior_var.sqrt();
        Hypothesis {
            w: prior_mean.iter().zip(&rng_buf).map(|(m, xi)| m + sd * xi).collect(),
        }
    };

    let mut draws = Vec::with_capacity(cfg.steps - cfg.burn_in);
    for step in 0..cfg.steps {
        let grad_f = grad_energy(&current.w, s);
        if grad_f.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: grad_f.len() });
        }
        noise(&mut rng_buf);
        let mut norm_sq = 0.0;
        for i in 0..d {
            let drift = spec.alpha * grad_f[i] + (current.w[i] - prior_mean[i]) / prior_var;
            current.w[i] += -gamma * drift + noise_scale * rng_buf[i];
            norm_sq += current.w[i] * current.w[i];
        }
        if !norm_sq.is_finite() || norm_sq > DIVERGENCE_NORM * DIVERGENCE_NORM {
            return Err(Error::Diverged(DIVERGENCE_NORM));
        }
        if step >= cfg.burn_in {
            draws.push(current.clone());
        }
    }
    let diagnostics = diagnostics_of(&draws);
    Ok(ChainResult { draws, acceptance_rate: None, diagnostics })
}

/// Gradient of the squared-error empirical risk: `2 (w - mean(z))`.
///
/// Panics if the dataset holds symbol samples; Langevin runs only make
/// sense for point data.
pub fn squared_error_energy_grad(w: &[f64], s: &Dataset) -> Vec<f64> {
    let zbar = s.mean_point().expect("Langevin needs point samples");
    w.iter().zip(&zbar).map(|(wi, zi)| 2.0 * (wi - zi)).collect()
}
