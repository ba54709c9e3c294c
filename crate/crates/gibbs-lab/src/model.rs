//! Domain types and exact evaluations shared by every other module:
//! losses, risks, data models, and the Gibbs kernel itself.
//!
//! Everything here is pure given its inputs and an explicitly passed
//! random stream; values may be shared across threads read-only.

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::quad;
use crate::{Error, Result};

/// A point in hypothesis space: a real vector of fixed dimension.
///
/// Finite-alphabet problems encode the hypothesis symbol index in a
/// single coordinate (see [`LossFunction::BoundedTable`]).
#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    pub w: Vec<f64>,
}

impl Hypothesis {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::InvalidParameter("hypothesis must have dimension >= 1".into()));
        }
        if !w.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("hypothesis coordinates"));
        }
        Ok(Self { w })
    }

    /// Hypothesis standing for a finite-alphabet symbol.
    pub fn symbol(index: usize) -> Self {
        Self { w: vec![index as f64] }
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    /// Symbol index encoded in a one-dimensional hypothesis, if any.
    pub fn as_symbol(&self) -> Result<usize> {
        if self.w.len() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: self.w.len() });
        }
        let rounded = self.w[0].round();
        if !rounded.is_finite() || (rounded - self.w[0]).abs() > 1e-9 || rounded < 0.0 {
            return Err(Error::OutOfDomain(format!(
                "hypothesis coordinate {} does not encode a symbol index",
                self.w[0]
            )));
        }
        Ok(rounded as usize)
    }
}

/// One training sample: either a real vector or a finite-alphabet symbol.
#[derive(Debug, Clone, PartialEq)]
pub enum Sample {
    Point(Vec<f64>),
    Symbol(usize),
}

impl Sample {
    fn is_point(&self) -> bool {
        matches!(self, Sample::Point(_))
    }
}

/// An ordered training set `z_1 .. z_n` of homogeneous sample kind.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    samples: Vec<Sample>,
}

impl Dataset {
    pub fn new(samples: Vec<Sample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidParameter("dataset needs n >= 1 samples".into()));
        }
        let first_is_point = samples[0].is_point();
        for s in &samples {
            if s.is_point() != first_is_point {
                return Err(Error::InvalidParameter("dataset mixes point and symbol samples".into()));
            }
            if let Sample::Point(p) = s {
                if !p.iter().all(|x| x.is_finite()) {
                    return Err(Error::NonFinite("dataset sample"));
                }
            }
        }
        Ok(Self { samples })
    }

    pub fn from_points(points: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(points.into_iter().map(Sample::Point).collect())
    }

    pub fn from_symbols(symbols: Vec<usize>) -> Result<Self> {
        Self::new(symbols.into_iter().map(Sample::Symbol).collect())
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    /// Coordinate-wise mean of point samples.
    pub fn mean_point(&self) -> Result<Vec<f64>> {
        let mut acc: Option<Vec<f64>> = None;
        for s in &self.samples {
            let Sample::Point(p) = s else {
                return Err(Error::InvalidParameter("mean_point requires point samples".into()));
            };
            match &mut acc {
                None => acc = Some(p.clone()),
                Some(a) => {
                    if a.len() != p.len() {
                        return Err(Error::DimensionMismatch { expected: a.len(), got: p.len() });
                    }
                    for (ai, pi) in a.iter_mut().zip(p) {
                        *ai += pi;
                    }
                }
            }
        }
        let mut m = acc.expect("dataset is non-empty");
        let n = self.samples.len() as f64;
        for x in &mut m {
            *x /= n;
        }
        Ok(m)
    }
}

/// Loss table for finite alphabets, `values[w * n_z + z] = loss(w, z)`.
#[derive(Debug, Clone)]
pub struct LossTable {
    values: Vec<f64>,
    n_w: usize,
    n_z: usize,
}

impl LossTable {
    pub fn new(values: Vec<f64>, n_w: usize, n_z: usize) -> Result<Self> {
        if values.len() != n_w * n_z || n_w == 0 || n_z == 0 {
            return Err(Error::InvalidParameter(format!(
                "loss table of {} entries does not match {n_w} x {n_z}",
                values.len()
            )));
        }
        // Infinite losses are rejected outright; everything downstream
        // assumes finite non-negative losses.
        if !values.iter().all(|v| v.is_finite() && *v >= 0.0) {
            return Err(Error::InvalidParameter("loss table entries must be finite and >= 0".into()));
        }
        Ok(Self { values, n_w, n_z })
    }

    pub fn get(&self, w: usize, z: usize) -> Result<f64> {
        if w >= self.n_w || z >= self.n_z {
            return Err(Error::OutOfDomain(format!("loss table index ({w}, {z})")));
        }
        Ok(self.values[w * self.n_z + z])
    }

    pub fn n_w(&self) -> usize {
        self.n_w
    }

    pub fn n_z(&self) -> usize {
        self.n_z
    }

    /// Smallest and largest entry; the half-range is the sub-Gaussian
    /// parameter of a bounded loss.
    pub fn range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in &self.values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }
}

/// Non-negative loss `loss(w, z)`.
#[derive(Debug, Clone)]
pub enum LossFunction {
    /// Squared Euclidean distance between the hypothesis and the sample.
    SquaredError,
    /// 0 when the hypothesis matches the sample exactly, 1 otherwise.
    ZeroOne,
    /// Table lookup on finite alphabets; the hypothesis encodes a symbol.
    BoundedTable(LossTable),
}

impl LossFunction {
    pub fn evaluate(&self, w: &Hypothesis, z: &Sample) -> Result<f64> {
        match (self, z) {
            (LossFunction::SquaredError, Sample::Point(p)) => {
                if p.len() != w.dim() {
                    return Err(Error::DimensionMismatch { expected: w.dim(), got: p.len() });
                }
                Ok(p.iter().zip(&w.w).map(|(a, b)| (a - b) * (a - b)).sum())
            }
            (LossFunction::SquaredError, Sample::Symbol(_)) => {
                Err(Error::InvalidParameter("squared loss needs point samples".into()))
            }
            (LossFunction::ZeroOne, Sample::Point(p)) => {
                if p.len() != w.dim() {
                    return Err(Error::DimensionMismatch { expected: w.dim(), got: p.len() });
                }
                Ok(if p == &w.w { 0.0 } else { 1.0 })
            }
            (LossFunction::ZeroOne, Sample::Symbol(sym)) => {
                Ok(if w.as_symbol()? == *sym { 0.0 } else { 1.0 })
            }
            (LossFunction::BoundedTable(table), Sample::Symbol(sym)) => {
                table.get(w.as_symbol()?, *sym)
            }
            (LossFunction::BoundedTable(_), Sample::Point(_)) => {
                Err(Error::InvalidParameter("table loss needs symbol samples".into()))
            }
        }
    }
}

/// Empirical risk `(1/n) sum_i loss(w, z_i)`.
pub fn empirical_risk(loss: &LossFunction, w: &Hypothesis, s: &Dataset) -> Result<f64> {
    let mut total = 0.0;
    for z in s.samples() {
        total += loss.evaluate(w, z)?;
    }
    Ok(total / s.n() as f64)
}

/// Prior over hypotheses.
#[derive(Debug, Clone)]
pub enum Prior {
    IsotropicGaussian { mean: Vec<f64>, variance: f64 },
    Finite { points: Vec<Hypothesis>, pmf: Vec<f64> },
}

/// Tolerance for pmf normalization checks.
pub const PMF_TOL: f64 = 1e-12;

pub(crate) fn check_pmf(pmf: &[f64]) -> Result<()> {
    if pmf.is_empty() {
        return Err(Error::InvalidParameter("pmf must be non-empty".into()));
    }
    if !pmf.iter().all(|p| p.is_finite() && *p >= 0.0) {
        return Err(Error::InvalidParameter("pmf entries must be finite and >= 0".into()));
    }
    let sum: f64 = pmf.iter().sum();
    if (sum - 1.0).abs() > PMF_TOL {
        return Err(Error::NotNormalized(sum));
    }
    Ok(())
}

pub(crate) fn sample_index(pmf: &[f64], rng: &mut (impl Rng + ?Sized)) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in pmf.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    pmf.len() - 1
}

impl Prior {
    pub fn gaussian(mean: Vec<f64>, variance: f64) -> Result<Self> {
        if mean.is_empty() || !mean.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("prior mean"));
        }
        if !(variance.is_finite() && variance > 0.0) {
            return Err(Error::InvalidParameter(format!("prior variance must be > 0, got {variance}")));
        }
        Ok(Prior::IsotropicGaussian { mean, variance })
    }

    pub fn finite(points: Vec<Hypothesis>, pmf: Vec<f64>) -> Result<Self> {
        if points.len() != pmf.len() {
            return Err(Error::DimensionMismatch { expected: points.len(), got: pmf.len() });
        }
        check_pmf(&pmf)?;
        Ok(Prior::Finite { points, pmf })
    }

    /// Uniform prior over the symbols `0 .. size`.
    pub fn uniform_symbols(size: usize) -> Result<Self> {
        let points = (0..size).map(Hypothesis::symbol).collect();
        Self::finite(points, vec![1.0 / size as f64; size])
    }

    pub fn dim(&self) -> usize {
        match self {
            Prior::IsotropicGaussian { mean, .. } => mean.len(),
            Prior::Finite { points, .. } => points.first().map_or(0, Hypothesis::dim),
        }
    }

    /// Log density (continuous) or log pmf (finite). A point outside a
    /// finite support has log weight negative infinity.
    pub fn log_density(&self, w: &Hypothesis) -> f64 {
        match self {
            Prior::IsotropicGaussian { mean, variance } => {
                let d = mean.len() as f64;
                let sq: f64 = mean.iter().zip(&w.w).map(|(m, x)| (x - m) * (x - m)).sum();
                -0.5 * sq / variance - 0.5 * d * (2.0 * std::f64::consts::PI * variance).ln()
            }
            Prior::Finite { points, pmf } => points
                .iter()
                .position(|p| p == w)
                .map_or(f64::NEG_INFINITY, |i| pmf[i].ln()),
        }
    }

    pub fn sample(&self, rng: &mut (impl Rng + ?Sized)) -> Hypothesis {
        match self {
            Prior::IsotropicGaussian { mean, variance } => {
                let sd = variance.sqrt();
                let w = mean
                    .iter()
                    .map(|m| m + sd * rng.sample::<f64, _>(StandardNormal))
                    .collect();
                Hypothesis { w }
            }
            Prior::Finite { points, pmf } => points[sample_index(pmf, rng)].clone(),
        }
    }
}

/// Energy function of the Gibbs kernel; defaults to the empirical risk.
#[derive(Clone)]
pub enum Energy {
    EmpiricalRisk(LossFunction),
    Custom(Arc<dyn Fn(&Hypothesis, &Dataset) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for Energy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Energy::EmpiricalRisk(loss) => write!(f, "EmpiricalRisk({loss:?})"),
            Energy::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl Energy {
    pub fn evaluate(&self, w: &Hypothesis, s: &Dataset) -> Result<f64> {
        match self {
            Energy::EmpiricalRisk(loss) => empirical_risk(loss, w, s),
            Energy::Custom(f) => Ok(f(w, s)),
        }
    }
}

/// The Gibbs kernel `P(w|s) ∝ prior(w) · exp(-alpha · energy(w, s))`.
///
/// `alpha = 0` reduces to the prior; `alpha → ∞` concentrates on the
/// energy minimizer (randomized empirical risk minimization when the
/// energy is the empirical risk).
#[derive(Debug, Clone)]
pub struct GibbsSpec {
    pub alpha: f64,
    pub prior: Prior,
    pub energy: Energy,
}

/// Partition-function estimate from prior sampling.
#[derive(Debug, Clone, Copy)]
pub struct LogPartitionEstimate {
    pub log_value: f64,
    /// Relative standard error of the partition estimate.
    pub rel_error: f64,
}

/// Width, in prior standard deviations, of the quadrature window used
/// for one-dimensional continuous partition functions.
const PARTITION_WINDOW_SDS: f64 = 10.0;

impl GibbsSpec {
    pub fn new(alpha: f64, prior: Prior, energy: Energy) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::InvalidParameter(format!("alpha must be >= 0, got {alpha}")));
        }
        Ok(Self { alpha, prior, energy })
    }

    /// `log prior(w) - alpha * energy(w, s)`: everything the samplers
    /// need; the partition function never enters acceptance ratios.
    pub fn log_unnormalized(&self, w: &Hypothesis, s: &Dataset) -> Result<f64> {
        let e = self.energy.evaluate(w, s)?;
        if !e.is_finite() {
            return Err(Error::NonFinite("energy"));
        }
        Ok(self.prior.log_density(w) - self.alpha * e)
    }

    /// Exact `log V(s, alpha)`: a finite sum for finite priors, adaptive
    /// quadrature over a prior-centered window for one-dimensional
    /// continuous priors. Higher dimensions need [`Self::log_partition_mc`].
    pub fn log_partition(&self, s: &Dataset) -> Result<f64> {
        match &self.prior {
            Prior::Finite { points, pmf } => {
                let mut terms = Vec::with_capacity(points.len());
                for (p, &mass) in points.iter().zip(pmf) {
                    if mass == 0.0 {
                        continue;
                    }
                    terms.push(mass.ln() - self.alpha * self.energy.evaluate(p, s)?);
                }
                let v = log_sum_exp(&terms);
                if !v.is_finite() {
                    return Err(Error::NonFinite("partition function"));
                }
                Ok(v)
            }
            Prior::IsotropicGaussian { mean, variance } => {
                if mean.len() != 1 {
                    return Err(Error::ExactUnavailable);
                }
                let sd = variance.sqrt();
                let (a, b) = (mean[0] - PARTITION_WINDOW_SDS * sd, mean[0] + PARTITION_WINDOW_SDS * sd);
                let g = |x: f64| -> f64 {
                    let w = Hypothesis { w: vec![x] };
                    match self.log_unnormalized(&w, s) {
                        Ok(v) => v,
                        Err(_) => f64::NEG_INFINITY,
                    }
                };
                // Shift by the max over a probe grid so the integrand is O(1).
                let probes = 128;
                let mut m = f64::NEG_INFINITY;
                for i in 0..=probes {
                    m = m.max(g(a + (b - a) * i as f64 / probes as f64));
                }
                if !m.is_finite() {
                    return Err(Error::NonFinite("partition integrand"));
                }
                let (integral, _) = quad::integrate(&|x| (g(x) - m).exp(), a, b, 1e-12);
                if !(integral.is_finite() && integral > 0.0) {
                    return Err(Error::NonFinite("partition function"));
                }
                Ok(m + integral.ln())
            }
        }
    }

    /// Importance-sampling estimate of `log V(s, alpha)` from the prior,
    /// with its relative standard error.
    pub fn log_partition_mc(
        &self,
        s: &Dataset,
        budget: usize,
        rng: &mut (impl Rng + ?Sized),
    ) -> Result<LogPartitionEstimate> {
        if budget < 2 {
            return Err(Error::BudgetTooSmall { min: 2, got: budget });
        }
        let mut logs = Vec::with_capacity(budget);
        for _ in 0..budget {
            let w = self.prior.sample(rng);
            logs.push(-self.alpha * self.energy.evaluate(&w, s)?);
        }
        let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let scaled: Vec<f64> = logs.iter().map(|v| (v - m).exp()).collect();
        let mean = scaled.iter().sum::<f64>() / budget as f64;
        let var = scaled.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (budget as f64 - 1.0);
        Ok(LogPartitionEstimate {
            log_value: m + mean.ln(),
            rel_error: (var / budget as f64).sqrt() / mean,
        })
    }

    /// Normalized log density of the Gibbs kernel at `w` given `s`.
    pub fn gibbs_log_density(&self, w: &Hypothesis, s: &Dataset) -> Result<f64> {
        Ok(self.log_unnormalized(w, s)? - self.log_partition(s)?)
    }

    /// Bind the spec to a dataset, computing the partition function once.
    pub fn density<'a>(&'a self, s: &'a Dataset) -> Result<GibbsDensity<'a>> {
        Ok(GibbsDensity { spec: self, dataset: s, log_partition: self.log_partition(s)? })
    }
}

/// A Gibbs density with its normalizer cached for one dataset.
#[derive(Debug, Clone)]
pub struct GibbsDensity<'a> {
    spec: &'a GibbsSpec,
    dataset: &'a Dataset,
    log_partition: f64,
}

impl GibbsDensity<'_> {
    pub fn log_density(&self, w: &Hypothesis) -> Result<f64> {
        Ok(self.spec.log_unnormalized(w, self.dataset)? - self.log_partition)
    }

    pub fn log_partition(&self) -> f64 {
        self.log_partition
    }
}

pub(crate) fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// Per-sample law `P_Z`.
#[derive(Debug, Clone)]
pub enum SampleLaw {
    Finite { support: Vec<Sample>, pmf: Vec<f64> },
    GaussianIso { mean: Vec<f64>, variance: f64 },
    PointMass(Vec<f64>),
}

impl SampleLaw {
    pub fn finite(support: Vec<Sample>, pmf: Vec<f64>) -> Result<Self> {
        if support.len() != pmf.len() {
            return Err(Error::DimensionMismatch { expected: support.len(), got: pmf.len() });
        }
        check_pmf(&pmf)?;
        Ok(SampleLaw::Finite { support, pmf })
    }

    /// Finite law over symbols `0 .. pmf.len()`.
    pub fn symbols(pmf: Vec<f64>) -> Result<Self> {
        let support = (0..pmf.len()).map(Sample::Symbol).collect();
        Self::finite(support, pmf)
    }

    pub fn gaussian(mean: Vec<f64>, variance: f64) -> Result<Self> {
        if mean.is_empty() || !mean.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("sample law mean"));
        }
        if !(variance.is_finite() && variance >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sample variance must be >= 0, got {variance}"
            )));
        }
        if variance == 0.0 {
            // degenerate Gaussians are point masses; this keeps exact
            // expectations available for them
            return Ok(SampleLaw::PointMass(mean));
        }
        Ok(SampleLaw::GaussianIso { mean, variance })
    }

    pub fn sample(&self, rng: &mut (impl Rng + ?Sized)) -> Sample {
        match self {
            SampleLaw::Finite { support, pmf } => support[sample_index(pmf, rng)].clone(),
            SampleLaw::GaussianIso { mean, variance } => {
                if *variance == 0.0 {
                    return Sample::Point(mean.clone());
                }
                let sd = variance.sqrt();
                Sample::Point(
                    mean.iter().map(|m| m + sd * rng.sample::<f64, _>(StandardNormal)).collect(),
                )
            }
            SampleLaw::PointMass(p) => Sample::Point(p.clone()),
        }
    }

    /// Exact `E[loss(w, Z)]` where a closed form exists.
    fn exact_expected_loss(&self, loss: &LossFunction, w: &Hypothesis) -> Result<f64> {
        match self {
            SampleLaw::Finite { support, pmf } => {
                let mut acc = 0.0;
                for (z, &p) in support.iter().zip(pmf) {
                    if p > 0.0 {
                        acc += p * loss.evaluate(w, z)?;
                    }
                }
                Ok(acc)
            }
            SampleLaw::PointMass(p) => loss.evaluate(w, &Sample::Point(p.clone())),
            SampleLaw::GaussianIso { mean, variance } => match loss {
                LossFunction::SquaredError => {
                    if mean.len() != w.dim() {
                        return Err(Error::DimensionMismatch { expected: w.dim(), got: mean.len() });
                    }
                    let sq: f64 = mean.iter().zip(&w.w).map(|(m, x)| (x - m) * (x - m)).sum();
                    Ok(mean.len() as f64 * variance + sq)
                }
                // A continuous draw misses any fixed point almost surely.
                LossFunction::ZeroOne if *variance > 0.0 => Ok(1.0),
                _ => Err(Error::ExactUnavailable),
            },
        }
    }
}

/// Law of the whole training set.
#[derive(Debug, Clone)]
pub enum DataModel {
    /// `n` i.i.d. draws from one per-sample law.
    Iid { law: SampleLaw, n: usize },
    /// Latent domain `D` with the given weights; given `D = k` the set is
    /// `n` i.i.d. draws from `laws[k]`. Samples are exchangeable but not
    /// independent across the mixture.
    DomainMixture { weights: Vec<f64>, laws: Vec<SampleLaw>, n: usize },
}

impl DataModel {
    pub fn iid(law: SampleLaw, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("data model needs n >= 1".into()));
        }
        Ok(DataModel::Iid { law, n })
    }

    pub fn mixture(weights: Vec<f64>, laws: Vec<SampleLaw>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("data model needs n >= 1".into()));
        }
        if weights.len() != laws.len() {
            return Err(Error::DimensionMismatch { expected: laws.len(), got: weights.len() });
        }
        check_pmf(&weights)?;
        Ok(DataModel::DomainMixture { weights, laws, n })
    }

    pub fn n(&self) -> usize {
        match self {
            DataModel::Iid { n, .. } | DataModel::DomainMixture { n, .. } => *n,
        }
    }

    pub fn sample_dataset(&self, rng: &mut (impl Rng + ?Sized)) -> Dataset {
        let samples = match self {
            DataModel::Iid { law, n } => (0..*n).map(|_| law.sample(rng)).collect(),
            DataModel::DomainMixture { weights, laws, n } => {
                let k = sample_index(weights, rng);
                (0..*n).map(|_| laws[k].sample(rng)).collect()
            }
        };
        Dataset { samples }
    }

    /// Draw one sample from the per-sample marginal (the mixture of the
    /// component marginals for domain mixtures).
    pub fn sample_one(&self, rng: &mut (impl Rng + ?Sized)) -> Sample {
        match self {
            DataModel::Iid { law, .. } => law.sample(rng),
            DataModel::DomainMixture { weights, laws, .. } => {
                laws[sample_index(weights, rng)].sample(rng)
            }
        }
    }

    /// Exact population risk when a closed form exists.
    pub fn exact_population_risk(&self, loss: &LossFunction, w: &Hypothesis) -> Result<f64> {
        match self {
            DataModel::Iid { law, .. } => law.exact_expected_loss(loss, w),
            DataModel::DomainMixture { weights, laws, .. } => {
                let mut acc = 0.0;
                for (law, &wt) in laws.iter().zip(weights) {
                    if wt > 0.0 {
                        acc += wt * law.exact_expected_loss(loss, w)?;
                    }
                }
                Ok(acc)
            }
        }
    }
}

/// Monte-Carlo point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateWithError {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: usize,
}

impl EstimateWithError {
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::BudgetTooSmall { min: 2, got: samples.len() });
        }
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        Ok(Self { value: mean, std_error: (var / n).sqrt(), n_samples: samples.len() })
    }

    /// |value - target| <= k * std_error.
    pub fn within(&self, target: f64, k_sigma: f64) -> bool {
        (self.value - target).abs() <= k_sigma * self.std_error
    }
}

/// How to evaluate an expectation: closed form / exact sum, or sampling.
#[derive(Debug, Clone, Copy)]
pub enum RiskMode {
    Exact,
    MonteCarlo { budget: usize },
}

/// Exact value or Monte-Carlo estimate, behind one signature.
#[derive(Debug, Clone, Copy)]
pub enum RiskValue {
    Exact(f64),
    Estimate(EstimateWithError),
}

impl RiskValue {
    pub fn value(&self) -> f64 {
        match self {
            RiskValue::Exact(v) => *v,
            RiskValue::Estimate(e) => e.value,
        }
    }
}

/// Population risk `L_P(w) = E[L_E(w, S)]`, exactly where the model
/// admits it, otherwise by Monte Carlo over fresh per-sample draws.
pub fn population_risk(
    loss: &LossFunction,
    w: &Hypothesis,
    model: &DataModel,
    mode: RiskMode,
    rng: &mut (impl Rng + ?Sized),
) -> Result<RiskValue> {
    match mode {
        RiskMode::Exact => Ok(RiskValue::Exact(model.exact_population_risk(loss, w)?)),
        RiskMode::MonteCarlo { budget } => {
            if budget < 2 {
                return Err(Error::BudgetTooSmall { min: 2, got: budget });
            }
            let mut vals = Vec::with_capacity(budget);
            for _ in 0..budget {
                vals.push(loss.evaluate(w, &model.sample_one(rng))?);
            }
            Ok(RiskValue::Estimate(EstimateWithError::from_samples(&vals)?))
        }
    }
}
