//! Estimators that are independent of the closed forms: Monte-Carlo
//! generalization error, the partition-free energy-gap estimator of the
//! symmetrized KL information, and an exact finite-alphabet enumeration
//! oracle for the identity `alpha * gen = I_SKL`.

use rand::Rng;

use crate::gaussian_mean::InfoTriple;
use crate::model::{
    check_pmf, empirical_risk, log_sum_exp, sample_index, DataModel, Dataset, Energy, GibbsSpec,
    Hypothesis, LossFunction, LossTable, Prior, SampleLaw,
};
pub use crate::model::{EstimateWithError, RiskMode, RiskValue};
use crate::{Error, Result};

/// Hard cap on `|Z|^n * |W|` for enumeration.
pub const ENUMERATION_CAP: u128 = 1_000_000;

const MAX_ALPHABET: usize = 16;
const MAX_N: usize = 4;

/// Law of the training set over a finite alphabet.
#[derive(Debug, Clone)]
pub enum DiscreteSampleLaw {
    /// Product of one pmf over `Z`.
    Iid(Vec<f64>),
    /// Domain mixture: weights with per-domain pmfs over `Z`.
    Mixture(Vec<(f64, Vec<f64>)>),
    /// Arbitrary joint pmf over `Z^n`, row-major in base-`|Z|` digits;
    /// the identity holds even for non-i.i.d. training samples.
    Joint(Vec<f64>),
}

/// A fully enumerable learning problem: finite sample and hypothesis
/// alphabets, a loss table, and a Gibbs learner at inverse temperature
/// `alpha` under a strictly positive prior.
#[derive(Debug, Clone)]
pub struct DiscreteProblem {
    pub z_size: usize,
    pub w_size: usize,
    pub n: usize,
    pub sample_law: DiscreteSampleLaw,
    pub prior: Vec<f64>,
    pub loss: LossTable,
    pub alpha: f64,
}

impl DiscreteProblem {
    pub fn new(
        z_size: usize,
        w_size: usize,
        n: usize,
        sample_law: DiscreteSampleLaw,
        prior: Vec<f64>,
        loss: LossTable,
        alpha: f64,
    ) -> Result<Self> {
        if z_size == 0 || z_size > MAX_ALPHABET || w_size == 0 || w_size > MAX_ALPHABET {
            return Err(Error::InvalidParameter(format!(
                "alphabet sizes must be in 1..={MAX_ALPHABET}, got |Z|={z_size}, |W|={w_size}"
            )));
        }
        if n == 0 || n > MAX_N {
            return Err(Error::InvalidParameter(format!("n must be in 1..={MAX_N}, got {n}")));
        }
        if prior.len() != w_size {
            return Err(Error::DimensionMismatch { expected: w_size, got: prior.len() });
        }
        check_pmf(&prior)?;
        // A zero-mass hypothesis breaks mutual absolute continuity of the
        // joint and the product of marginals, which the information
        // measures require.
        if prior.iter().any(|p| *p <= 0.0) {
            return Err(Error::InvalidParameter("prior must be strictly positive".into()));
        }
        if loss.n_w() != w_size || loss.n_z() != z_size {
            return Err(Error::InvalidParameter("loss table does not match alphabet sizes".into()));
        }
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::InvalidParameter(format!("alpha must be >= 0, got {alpha}")));
        }
        match &sample_law {
            DiscreteSampleLaw::Iid(pz) => {
                if pz.len() != z_size {
                    return Err(Error::DimensionMismatch { expected: z_size, got: pz.len() });
                }
                check_pmf(pz)?;
            }
            DiscreteSampleLaw::Mixture(parts) => {
                if parts.is_empty() {
                    return Err(Error::InvalidParameter("mixture needs at least one domain".into()));
                }
                let weights: Vec<f64> = parts.iter().map(|(w, _)| *w).collect();
                check_pmf(&weights)?;
                for (_, pz) in parts {
                    if pz.len() != z_size {
                        return Err(Error::DimensionMismatch { expected: z_size, got: pz.len() });
                    }
                    check_pmf(pz)?;
                }
            }
            DiscreteSampleLaw::Joint(p) => {
                let states = (z_size as u128).pow(n as u32);
                if p.len() as u128 != states {
                    return Err(Error::DimensionMismatch {
                        expected: states as usize,
                        got: p.len(),
                    });
                }
                check_pmf(p)?;
            }
        }
        Ok(Self { z_size, w_size, n, sample_law, prior, loss, alpha })
    }

    /// Number of dataset states `|Z|^n`.
    pub fn n_states(&self) -> usize {
        (self.z_size as u64).pow(self.n as u32) as usize
    }

    /// The Gibbs kernel as a [`GibbsSpec`] over symbol hypotheses.
    pub fn gibbs_spec(&self) -> Result<GibbsSpec> {
        let points = (0..self.w_size).map(Hypothesis::symbol).collect();
        let prior = Prior::finite(points, self.prior.clone())?;
        GibbsSpec::new(self.alpha, prior, Energy::EmpiricalRisk(self.loss_fn()))
    }

    pub fn loss_fn(&self) -> LossFunction {
        LossFunction::BoundedTable(self.loss.clone())
    }

    /// The sampleable data law. Arbitrary joint pmfs over `Z^n` are
    /// enumeration-only and have no product/mixture representation.
    pub fn data_model(&self) -> Result<DataModel> {
        match &self.sample_law {
            DiscreteSampleLaw::Iid(pz) => DataModel::iid(SampleLaw::symbols(pz.clone())?, self.n),
            DiscreteSampleLaw::Mixture(parts) => {
                let weights = parts.iter().map(|(w, _)| *w).collect();
                let laws = parts
                    .iter()
                    .map(|(_, pz)| SampleLaw::symbols(pz.clone()))
                    .collect::<Result<Vec<_>>>()?;
                DataModel::mixture(weights, laws, self.n)
            }
            DiscreteSampleLaw::Joint(_) => Err(Error::ExactUnavailable),
        }
    }

    /// State index of a symbol dataset in base-`|Z|` digits.
    pub fn state_index(&self, s: &Dataset) -> Result<usize> {
        if s.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: s.n() });
        }
        let mut idx = 0usize;
        for sample in s.samples() {
            let crate::model::Sample::Symbol(z) = sample else {
                return Err(Error::InvalidParameter("state_index needs symbol samples".into()));
            };
            if *z >= self.z_size {
                return Err(Error::OutOfDomain(format!("symbol {z} outside alphabet")));
            }
            idx = idx * self.z_size + z;
        }
        Ok(idx)
    }

    fn digits(&self, mut state: usize) -> Vec<usize> {
        let mut out = vec![0usize; self.n];
        for slot in out.iter_mut().rev() {
            *slot = state % self.z_size;
            state /= self.z_size;
        }
        out
    }

    /// Exact pmf over dataset states.
    pub fn dataset_pmf(&self) -> Vec<f64> {
        let states = self.n_states();
        let mut p_s = vec![0.0; states];
        match &self.sample_law {
            DiscreteSampleLaw::Iid(pz) => {
                for (state, slot) in p_s.iter_mut().enumerate() {
                    *slot = self.digits(state).iter().map(|&z| pz[z]).product();
                }
            }
            DiscreteSampleLaw::Mixture(parts) => {
                for (state, slot) in p_s.iter_mut().enumerate() {
                    let digits = self.digits(state);
                    *slot = parts
                        .iter()
                        .map(|(w, pz)| w * digits.iter().map(|&z| pz[z]).product::<f64>())
                        .sum();
                }
            }
            DiscreteSampleLaw::Joint(p) => p_s.copy_from_slice(p),
        }
        p_s
    }
}

/// The exact joint law of `(S, W)` on a finite alphabet.
#[derive(Debug, Clone)]
pub struct JointTable {
    pub n_states: usize,
    pub w_size: usize,
    /// pmf over dataset states.
    pub p_s: Vec<f64>,
    /// Gibbs kernel rows, `n_states x w_size` row-major; every row sums to 1.
    pub p_w_given_s: Vec<f64>,
    /// Joint pmf, same layout.
    pub p_joint: Vec<f64>,
    /// Hypothesis marginal.
    pub p_w: Vec<f64>,
    /// Empirical risk `L_E(w, s)`, same layout as the kernel rows.
    pub empirical_risk: Vec<f64>,
}

/// Enumerate the exact joint law of a [`DiscreteProblem`].
///
/// Gibbs rows are normalized in log space, so large `alpha` values stay
/// stable.
pub fn enumerate_joint(p: &DiscreteProblem) -> Result<JointTable> {
    let states_u128 = (p.z_size as u128).pow(p.n as u32);
    let total = states_u128 * p.w_size as u128;
    if total > ENUMERATION_CAP {
        return Err(Error::StateSpaceTooLarge { size: total, cap: ENUMERATION_CAP });
    }
    let n_states = p.n_states();
    let w_size = p.w_size;

    let mut energy = vec![0.0; n_states * w_size];
    for state in 0..n_states {
        let digits = p.digits(state);
        for w in 0..w_size {
            let mut acc = 0.0;
            for &z in &digits {
                acc += p.loss.get(w, z)?;
            }
            energy[state * w_size + w] = acc / p.n as f64;
        }
    }

    let log_prior: Vec<f64> = p.prior.iter().map(|x| x.ln()).collect();
    let mut rows = vec![0.0; n_states * w_size];
    let mut logits = vec![0.0; w_size];
    for state in 0..n_states {
        for w in 0..w_size {
            logits[w] = log_prior[w] - p.alpha * energy[state * w_size + w];
        }
        let log_v = log_sum_exp(&logits);
        for w in 0..w_size {
            rows[state * w_size + w] = (logits[w] - log_v).exp();
        }
    }

    let p_s = p.dataset_pmf();
    let mut p_joint = vec![0.0; n_states * w_size];
    let mut p_w = vec![0.0; w_size];
    for state in 0..n_states {
        for w in 0..w_size {
            let v = p_s[state] * rows[state * w_size + w];
            p_joint[state * w_size + w] = v;
            p_w[w] += v;
        }
    }

    Ok(JointTable { n_states, w_size, p_s, p_w_given_s: rows, p_joint, p_w, empirical_risk: energy })
}

/// Exact expected generalization error from the enumerated joint law.
pub fn exact_gen_discrete(t: &JointTable) -> f64 {
    // population risk of each hypothesis under the dataset law
    let mut l_p = vec![0.0; t.w_size];
    for state in 0..t.n_states {
        for w in 0..t.w_size {
            l_p[w] += t.p_s[state] * t.empirical_risk[state * t.w_size + w];
        }
    }
    let mut gen = 0.0;
    for state in 0..t.n_states {
        for w in 0..t.w_size {
            gen += t.p_joint[state * t.w_size + w] * (l_p[w] - t.empirical_risk[state * t.w_size + w]);
        }
    }
    gen
}

/// Exact mutual, lautum, and symmetrized KL information from the
/// enumerated joint law, in conditional-KL form:
///
/// ```text
/// I = sum_s p(s) sum_w p(w|s) log(p(w|s) / p(w))
/// L = sum_s p(s) sum_w p(w)   log(p(w)   / p(w|s))
/// ```
pub fn exact_info_discrete(t: &JointTable) -> InfoTriple {
    let mut mutual = 0.0;
    let mut lautum = 0.0;
    let log_p_w: Vec<f64> = t.p_w.iter().map(|x| x.ln()).collect();
    for state in 0..t.n_states {
        if t.p_s[state] == 0.0 {
            continue;
        }
        let mut mi_s = 0.0;
        let mut la_s = 0.0;
        for w in 0..t.w_size {
            let row = t.p_w_given_s[state * t.w_size + w];
            let log_row = row.ln();
            mi_s += row * (log_row - log_p_w[w]);
            la_s += t.p_w[w] * (log_p_w[w] - log_row);
        }
        mutual += t.p_s[state] * mi_s;
        lautum += t.p_s[state] * la_s;
    }
    InfoTriple { mutual, lautum, skl: mutual + lautum }
}

/// Both sides of the mixture-concavity inequality for two domains that
/// share the same Gibbs learner.
#[derive(Debug, Clone, Copy)]
pub struct MixtureCheck {
    pub gen_mixture: f64,
    pub avg_gen: f64,
    /// `gen_mixture - avg_gen`; concavity demands this be >= -1e-12.
    pub slack: f64,
    pub holds: bool,
}

/// Slack tolerance for the mixture-concavity check.
pub const MIXTURE_SLACK_TOL: f64 = 1e-12;

/// Check that the generalization error of the `lambda`-mixture of two
/// domains is at least the mixture of the per-domain errors. The two
/// problems must share hypothesis alphabet, loss, prior, and `alpha`
/// (the learner is fixed; only the data law varies).
pub fn mixture_concavity_check(
    a: &DiscreteProblem,
    b: &DiscreteProblem,
    lambda: f64,
) -> Result<MixtureCheck> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::OutOfDomain(format!("lambda must be in [0, 1], got {lambda}")));
    }
    if a.z_size != b.z_size || a.n != b.n {
        return Err(Error::InvalidParameter("mismatched sample alphabets".into()));
    }
    if a.w_size != b.w_size
        || a.prior != b.prior
        || a.alpha != b.alpha
        || a.loss.range() != b.loss.range()
    {
        return Err(Error::InvalidParameter("domains must share (W, loss, prior, alpha)".into()));
    }
    for w in 0..a.w_size {
        for z in 0..a.z_size {
            if a.loss.get(w, z)? != b.loss.get(w, z)? {
                return Err(Error::InvalidParameter("domains must share the loss table".into()));
            }
        }
    }

    let table_a = enumerate_joint(a)?;
    let p_s_b = b.dataset_pmf();
    let gen_a = exact_gen_discrete(&table_a);
    let gen_b = exact_gen_discrete(&JointTable {
        p_s: p_s_b.clone(),
        p_joint: mix_joint(&table_a.p_w_given_s, &p_s_b),
        p_w: marginal_w(&table_a.p_w_given_s, &p_s_b, a.w_size),
        ..table_a.clone()
    });
    let p_s_mix: Vec<f64> = table_a
        .p_s
        .iter()
        .zip(&p_s_b)
        .map(|(pa, pb)| lambda * pa + (1.0 - lambda) * pb)
        .collect();
    let gen_mixture = exact_gen_discrete(&JointTable {
        p_joint: mix_joint(&table_a.p_w_given_s, &p_s_mix),
        p_w: marginal_w(&table_a.p_w_given_s, &p_s_mix, a.w_size),
        p_s: p_s_mix,
        ..table_a.clone()
    });
    let avg_gen = lambda * gen_a + (1.0 - lambda) * gen_b;
    let slack = gen_mixture - avg_gen;
    Ok(MixtureCheck { gen_mixture, avg_gen, slack, holds: slack >= -MIXTURE_SLACK_TOL })
}

fn mix_joint(rows: &[f64], p_s: &[f64]) -> Vec<f64> {
    let w_size = rows.len() / p_s.len();
    let mut joint = vec![0.0; rows.len()];
    for (state, &ps) in p_s.iter().enumerate() {
        for w in 0..w_size {
            joint[state * w_size + w] = ps * rows[state * w_size + w];
        }
    }
    joint
}

fn marginal_w(rows: &[f64], p_s: &[f64], w_size: usize) -> Vec<f64> {
    let mut p_w = vec![0.0; w_size];
    for (state, &ps) in p_s.iter().enumerate() {
        for w in 0..w_size {
            p_w[w] += ps * rows[state * w_size + w];
        }
    }
    p_w
}

/// Learner drawing exactly from the enumerated Gibbs rows.
pub fn gibbs_row_learner<'a, R: Rng + ?Sized>(
    p: &'a DiscreteProblem,
    t: &'a JointTable,
) -> impl Fn(&Dataset, &mut R) -> Result<Hypothesis> + 'a {
    move |s, rng| {
        let state = p.state_index(s)?;
        let row = &t.p_w_given_s[state * t.w_size..(state + 1) * t.w_size];
        Ok(Hypothesis::symbol(sample_index(row, rng)))
    }
}

/// Monte-Carlo estimate of the expected generalization error
/// `E[L_P(W) - L_E(W, S)]` for an arbitrary learner.
///
/// Each replicate draws `(S, W)`, evaluates the empirical risk, and the
/// population risk either exactly (finite data laws) or from
/// `fresh_per_risk` independent samples. The standard error is that of
/// the paired differences.
pub fn mc_gen_error<R: Rng + ?Sized>(
    model: &DataModel,
    mut learner: impl FnMut(&Dataset, &mut R) -> Result<Hypothesis>,
    loss: &LossFunction,
    outer: usize,
    fresh_per_risk: usize,
    rng: &mut R,
) -> Result<EstimateWithError> {
    if outer < 2 {
        return Err(Error::BudgetTooSmall { min: 2, got: outer });
    }
    let exact_available = matches!(
        model,
        DataModel::Iid { law: SampleLaw::Finite { .. } | SampleLaw::PointMass(_), .. }
            | DataModel::DomainMixture { .. }
    ) && {
        // probe once so mixtures of non-finite laws fall back to sampling
        let mut probe_rng = crate::seed::stream(0, 0);
        let s = model.sample_dataset(&mut probe_rng);
        s.samples().iter().all(|z| matches!(z, crate::model::Sample::Symbol(_)))
            || matches!(model, DataModel::Iid { law: SampleLaw::PointMass(_), .. })
    };
    if !exact_available && fresh_per_risk == 0 {
        return Err(Error::BudgetTooSmall { min: 1, got: 0 });
    }

    let mut diffs = Vec::with_capacity(outer);
    for _ in 0..outer {
        let s = model.sample_dataset(rng);
        let w = learner(&s, rng)?;
        let le = empirical_risk(loss, &w, &s)?;
        let lp = if exact_available {
            model.exact_population_risk(loss, &w)?
        } else {
            let mut acc = 0.0;
            for _ in 0..fresh_per_risk {
                acc += loss.evaluate(&w, &model.sample_one(rng))?;
            }
            acc / fresh_per_risk as f64
        };
        diffs.push(lp - le);
    }
    EstimateWithError::from_samples(&diffs)
}

/// Partition-free estimate of the symmetrized KL information through the
/// energy gap: `alpha * (E_decoupled[f] - E_paired[f])`.
///
/// Decoupled pairs come from a cyclic shift of the hypothesis column
/// against the dataset column, which is unbiased and reproducible. Valid
/// for any energy, not just the empirical risk.
pub fn iskl_energy_gap<R: Rng + ?Sized>(
    spec: &GibbsSpec,
    model: &DataModel,
    mut learner: impl FnMut(&Dataset, &mut R) -> Result<Hypothesis>,
    outer: usize,
    rng: &mut R,
) -> Result<EstimateWithError> {
    if outer < 2 {
        return Err(Error::BudgetTooSmall { min: 2, got: outer });
    }
    let mut datasets = Vec::with_capacity(outer);
    let mut hypotheses = Vec::with_capacity(outer);
    for _ in 0..outer {
        let s = model.sample_dataset(rng);
        let w = learner(&s, rng)?;
        datasets.push(s);
        hypotheses.push(w);
    }
    let mut gaps = Vec::with_capacity(outer);
    for i in 0..outer {
        let paired = spec.energy.evaluate(&hypotheses[i], &datasets[i])?;
        let decoupled = spec.energy.evaluate(&hypotheses[(i + 1) % outer], &datasets[i])?;
        gaps.push(decoupled - paired);
    }
    let est = EstimateWithError::from_samples(&gaps)?;
    Ok(EstimateWithError {
        value: spec.alpha * est.value,
        std_error: spec.alpha * est.std_error,
        n_samples: est.n_samples,
    })
}

/// Streaming mean/variance with exact merging, so chunked parallel runs
/// reduce to the same numbers in deterministic task order.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunningMoments {
    count: usize,
    mean: f64,
    m2: f64,
}

impl RunningMoments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: RunningMoments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = other;
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let delta = other.mean - self.mean;
        let total = na + nb;
        self.mean += delta * nb / total;
        self.m2 += other.m2 + delta * delta * na * nb / total;
        self.count += other.count;
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return f64::NAN;
        }
        self.m2 / (self.count as f64 - 1.0)
    }

    pub fn finalize(&self) -> Result<EstimateWithError> {
        if self.count < 2 {
            return Err(Error::BudgetTooSmall { min: 2, got: self.count });
        }
        Ok(EstimateWithError {
            value: self.mean,
            std_error: (self.variance() / self.count as f64).sqrt(),
            n_samples: self.count,
        })
    }
}

/// Pool chunked Monte-Carlo estimates into one, merging their moments in
/// the given order. Chunked parallel runs reduce to the same pooled
/// numbers as long as the chunk decomposition is fixed.
pub fn merge_estimates(parts: &[EstimateWithError]) -> Result<EstimateWithError> {
    let mut acc = RunningMoments::default();
    for part in parts {
        let n = part.n_samples as f64;
        let variance = part.std_error * part.std_error * n;
        acc.merge(RunningMoments {
            count: part.n_samples,
            mean: part.value,
            m2: variance * (n - 1.0),
        });
    }
    acc.finalize()
}

/// Least-squares slope of `log y` against `log x`. `None` when fewer
/// than two points have positive coordinates or the x-spread vanishes.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 2 {
        return None;
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|(x, _)| x).sum::<f64>() / n;
    let my = logs.iter().map(|(_, y)| y).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

/// Bounds on the random instances drawn by [`random_discrete_problem`].
#[derive(Debug, Clone)]
pub struct InstanceBounds {
    pub max_z: usize,
    pub max_w: usize,
    pub max_n: usize,
    pub alphas: Vec<f64>,
}

impl Default for InstanceBounds {
    fn default() -> Self {
        Self { max_z: 4, max_w: 5, max_n: 3, alphas: vec![0.5, 1.0, 2.0] }
    }
}

fn random_pmf<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<f64> {
    let mut v: Vec<f64> = (0..len).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = v.iter().sum();
    for x in &mut v {
        *x /= total;
    }
    // nudge the last entry so the sum is exactly representable as 1
    let head: f64 = v[..len - 1].iter().sum();
    v[len - 1] = 1.0 - head;
    v
}

/// A random i.i.d. instance with losses in `[0, 1]`.
pub fn random_discrete_problem<R: Rng + ?Sized>(
    bounds: &InstanceBounds,
    rng: &mut R,
) -> Result<DiscreteProblem> {
    let z_size = rng.random_range(2..=bounds.max_z);
    let w_size = rng.random_range(2..=bounds.max_w);
    let n = rng.random_range(1..=bounds.max_n);
    let pz = random_pmf(z_size, rng);
    let prior = random_pmf(w_size, rng);
    let loss: Vec<f64> = (0..w_size * z_size).map(|_| rng.random_range(0.0..1.0)).collect();
    let alpha = bounds.alphas[rng.random_range(0..bounds.alphas.len())];
    DiscreteProblem::new(
        z_size,
        w_size,
        n,
        DiscreteSampleLaw::Iid(pz),
        prior,
        LossTable::new(loss, w_size, z_size)?,
        alpha,
    )
}

/// Two random domains sharing the hypothesis alphabet, loss, prior, and
/// `alpha`, differing only in the per-sample pmf.
pub fn random_two_domain_pair<R: Rng + ?Sized>(
    bounds: &InstanceBounds,
    rng: &mut R,
) -> Result<(DiscreteProblem, DiscreteProblem)> {
    let a = random_discrete_problem(bounds, rng)?;
    let pz_b = random_pmf(a.z_size, rng);
    let b = DiscreteProblem::new(
        a.z_size,
        a.w_size,
        a.n,
        DiscreteSampleLaw::Iid(pz_b),
        a.prior.clone(),
        a.loss.clone(),
        a.alpha,
    )?;
    Ok((a, b))
}

/// The canonical hand-checkable instance: binary alphabets, uniform pmfs,
/// zero-one loss, one sample, `alpha = 1`. Its exact generalization error
/// is `tanh(1/2) / 2`.
pub fn binary_symmetric_instance() -> DiscreteProblem {
    DiscreteProblem::new(
        2,
        2,
        1,
        DiscreteSampleLaw::Iid(vec![0.5, 0.5]),
        vec![0.5, 0.5],
        LossTable::new(vec![0.0, 1.0, 1.0, 0.0], 2, 2).expect("static table"),
        1.0,
    )
    .expect("static instance")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;

    #[test]
    fn rows_equal_prior_at_alpha_zero() {
        let mut rng = seed::stream(21, 0);
        let mut p = random_discrete_problem(&InstanceBounds::default(), &mut rng).unwrap();
        p.alpha = 0.0;
        let t = enumerate_joint(&p).unwrap();
        for state in 0..t.n_states {
            for w in 0..t.w_size {
                assert!(
                    (t.p_w_given_s[state * t.w_size + w] - p.prior[w]).abs() < 1e-14,
                    "alpha = 0 must reproduce the prior"
                );
            }
        }
        assert!(exact_gen_discrete(&t).abs() < 1e-15);
        let info = exact_info_discrete(&t);
        assert!(info.mutual.abs() < 1e-14 && info.lautum.abs() < 1e-14);
    }

    #[test]
    fn two_point_row_value() {
        let p = binary_symmetric_instance();
        let t = enumerate_joint(&p).unwrap();
        // state 1 is the dataset {z = 1}; P(w = 1 | z = 1) = 1/(1 + e^-1)
        let got = t.p_w_given_s[1 * 2 + 1];
        let want = 1.0 / (1.0 + (-1.0f64).exp());
        assert!((got - want).abs() < 1e-14, "got {got}, want {want}");
    }

    #[test]
    fn rows_normalize_on_random_instances() {
        let mut rng = seed::stream(22, 0);
        for _ in 0..50 {
            let p = random_discrete_problem(&InstanceBounds::default(), &mut rng).unwrap();
            let t = enumerate_joint(&p).unwrap();
            for state in 0..t.n_states {
                let sum: f64 = t.p_w_given_s[state * t.w_size..(state + 1) * t.w_size].iter().sum();
                assert!((sum - 1.0).abs() < 1e-14, "row {state} sums to {sum}");
            }
            let total: f64 = t.p_joint.iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "joint sums to {total}");
        }
    }

    #[test]
    fn binary_instance_closed_forms() {
        let p = binary_symmetric_instance();
        let t = enumerate_joint(&p).unwrap();
        let gen = exact_gen_discrete(&t);
        assert!((gen - 0.5 * 0.5f64.tanh()).abs() < 1e-14, "gen = {gen}");

        // closed forms with a = 1/(1 + e^-1):
        //   I = ln 2 + a ln a + (1-a) ln(1-a),  L = -(1/2) ln(4 a (1-a))
        let a = 1.0 / (1.0 + (-1.0f64).exp());
        let info = exact_info_discrete(&t);
        let mi_closed = 2.0f64.ln() + a * a.ln() + (1.0 - a) * (1.0 - a).ln();
        let lautum_closed = -0.5 * (4.0 * a * (1.0 - a)).ln();
        assert!((info.mutual - mi_closed).abs() < 1e-13);
        assert!((info.lautum - lautum_closed).abs() < 1e-13);
        assert!((info.skl - p.alpha * gen).abs() < 1e-13, "identity at the binary instance");
    }

    #[test]
    fn identity_on_random_instances() {
        let mut rng = seed::stream(23, 0);
        let mut worst = 0.0f64;
        for _ in 0..200 {
            let p = random_discrete_problem(&InstanceBounds::default(), &mut rng).unwrap();
            let t = enumerate_joint(&p).unwrap();
            let residual = (p.alpha * exact_gen_discrete(&t) - exact_info_discrete(&t).skl).abs();
            worst = worst.max(residual);
        }
        assert!(worst <= 1e-10, "worst residual {worst}");
    }

    #[test]
    fn identity_on_non_iid_joint_law() {
        // correlated two-sample law over Z = {0, 1}: both samples equal
        let p = DiscreteProblem::new(
            2,
            3,
            2,
            DiscreteSampleLaw::Joint(vec![0.5, 0.0, 0.0, 0.5]),
            vec![0.2, 0.3, 0.5],
            LossTable::new(vec![0.1, 0.9, 0.4, 0.6, 0.8, 0.2], 3, 2).unwrap(),
            2.0,
        )
        .unwrap();
        let t = enumerate_joint(&p).unwrap();
        let residual = (p.alpha * exact_gen_discrete(&t) - exact_info_discrete(&t).skl).abs();
        assert!(residual <= 1e-12, "identity must hold for non-i.i.d. laws, residual {residual}");
    }

    #[test]
    fn constant_loss_table_gives_zero_gen() {
        let p = DiscreteProblem::new(
            3,
            2,
            2,
            DiscreteSampleLaw::Iid(vec![0.2, 0.3, 0.5]),
            vec![0.4, 0.6],
            LossTable::new(vec![0.7; 6], 2, 3).unwrap(),
            1.5,
        )
        .unwrap();
        let t = enumerate_joint(&p).unwrap();
        assert!(exact_gen_discrete(&t).abs() < 1e-15);
    }

    #[test]
    fn info_triple_invariant_under_relabeling() {
        let mut rng = seed::stream(24, 0);
        let p = random_discrete_problem(&InstanceBounds::default(), &mut rng).unwrap();
        let info = exact_info_discrete(&enumerate_joint(&p).unwrap());

        // reverse both alphabets
        let pz = match &p.sample_law {
            DiscreteSampleLaw::Iid(pz) => {
                let mut v = pz.clone();
                v.reverse();
                v
            }
            _ => unreachable!(),
        };
        let mut prior = p.prior.clone();
        prior.reverse();
        let mut loss = vec![0.0; p.w_size * p.z_size];
        for w in 0..p.w_size {
            for z in 0..p.z_size {
                loss[w * p.z_size + z] =
                    p.loss.get(p.w_size - 1 - w, p.z_size - 1 - z).unwrap();
            }
        }
        let relabeled = DiscreteProblem::new(
            p.z_size,
            p.w_size,
            p.n,
            DiscreteSampleLaw::Iid(pz),
            prior,
            LossTable::new(loss, p.w_size, p.z_size).unwrap(),
            p.alpha,
        )
        .unwrap();
        let info_r = exact_info_discrete(&enumerate_joint(&relabeled).unwrap());
        assert!((info.mutual - info_r.mutual).abs() < 1e-13);
        assert!((info.lautum - info_r.lautum).abs() < 1e-13);
    }

    #[test]
    fn gen_is_non_negative_for_gibbs_learners() {
        let mut rng = seed::stream(25, 0);
        for _ in 0..100 {
            let p = random_discrete_problem(&InstanceBounds::default(), &mut rng).unwrap();
            let gen = exact_gen_discrete(&enumerate_joint(&p).unwrap());
            assert!(gen >= -1e-12, "gen = {gen} went negative");
        }
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let p = DiscreteProblem::new(
            16,
            16,
            4,
            DiscreteSampleLaw::Iid(vec![1.0 / 16.0; 16]),
            vec![1.0 / 16.0; 16],
            LossTable::new(vec![0.5; 256], 16, 16).unwrap(),
            1.0,
        )
        .unwrap();
        // 16^4 * 16 = 2^20 > 1e6
        assert!(matches!(enumerate_joint(&p), Err(Error::StateSpaceTooLarge { .. })));
    }

    #[test]
    fn mc_gen_error_matches_enumeration_on_binary_instance() {
        let p = binary_symmetric_instance();
        let t = enumerate_joint(&p).unwrap();
        let exact = exact_gen_discrete(&t);
        let model = p.data_model().unwrap();
        let mut rng = seed::stream(26, 0);
        let est = mc_gen_error(
            &model,
            gibbs_row_learner(&p, &t),
            &p.loss_fn(),
            60_000,
            0,
            &mut rng,
        )
        .unwrap();
        assert!(
            est.within(exact, 3.0),
            "mc {} +- {} vs exact {exact}",
            est.value,
            est.std_error
        );
    }

    #[test]
    fn mc_gen_error_zero_variance_data() {
        // sigmaZ^2 = 0: every replicate difference is exactly zero
        // (n = 2 keeps the empirical-risk mean exact in floating point)
        let model = DataModel::iid(SampleLaw::gaussian(vec![2.0], 0.0).unwrap(), 2).unwrap();
        let mut rng = seed::stream(26, 1);
        let est = mc_gen_error(
            &model,
            |_s, rng: &mut seed::Stream| {
                Ok(Hypothesis::new(vec![2.0 + rng.random_range(-1.0..1.0)]).unwrap())
            },
            &LossFunction::SquaredError,
            200,
            16,
            &mut rng,
        )
        .unwrap();
        assert_eq!(est.value, 0.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn energy_gap_is_exactly_zero_at_alpha_zero() {
        let mut p = binary_symmetric_instance();
        p.alpha = 0.0;
        let t = enumerate_joint(&p).unwrap();
        let spec = p.gibbs_spec().unwrap();
        let model = p.data_model().unwrap();
        let mut rng = seed::stream(27, 0);
        let est =
            iskl_energy_gap(&spec, &model, gibbs_row_learner(&p, &t), 500, &mut rng).unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn energy_gap_matches_enumeration_on_binary_instance() {
        let p = binary_symmetric_instance();
        let t = enumerate_joint(&p).unwrap();
        let exact = exact_info_discrete(&t).skl;
        let spec = p.gibbs_spec().unwrap();
        let model = p.data_model().unwrap();
        let mut rng = seed::stream(27, 1);
        let est =
            iskl_energy_gap(&spec, &model, gibbs_row_learner(&p, &t), 60_000, &mut rng).unwrap();
        assert!(
            est.within(exact, 3.0),
            "energy gap {} +- {} vs exact {exact}",
            est.value,
            est.std_error
        );
    }

    #[test]
    fn mixture_identical_domains_has_zero_slack() {
        let mut rng = seed::stream(28, 0);
        let p = random_discrete_problem(&InstanceBounds::default(), &mut rng).unwrap();
        for lambda in [0.0, 0.3, 0.5, 1.0] {
            let check = mixture_concavity_check(&p, &p, lambda).unwrap();
            assert!(check.slack.abs() < 1e-14, "identical domains, slack {}", check.slack);
            assert!(check.holds);
        }
    }

    #[test]
    fn mixture_endpoints_are_equalities() {
        let mut rng = seed::stream(28, 1);
        let (a, b) = random_two_domain_pair(&InstanceBounds::default(), &mut rng).unwrap();
        for lambda in [0.0, 1.0] {
            let check = mixture_concavity_check(&a, &b, lambda).unwrap();
            assert!(check.slack.abs() < 1e-13, "endpoint slack {}", check.slack);
        }
    }

    #[test]
    fn mixture_concavity_holds_on_random_pairs() {
        let mut rng = seed::stream(28, 2);
        for _ in 0..50 {
            let (a, b) = random_two_domain_pair(&InstanceBounds::default(), &mut rng).unwrap();
            let check = mixture_concavity_check(&a, &b, 0.5).unwrap();
            assert!(check.holds, "slack {} at 0.5", check.slack);
        }
    }

    #[test]
    fn mixture_rejects_mismatched_alphabets() {
        let mut rng = seed::stream(28, 3);
        let bounds = InstanceBounds { max_z: 2, max_w: 2, max_n: 1, alphas: vec![1.0] };
        let a = random_discrete_problem(&bounds, &mut rng).unwrap();
        let bounds_b = InstanceBounds { max_z: 3, max_w: 3, max_n: 1, alphas: vec![1.0] };
        let mut b = random_discrete_problem(&bounds_b, &mut rng).unwrap();
        while b.z_size == a.z_size {
            b = random_discrete_problem(&bounds_b, &mut rng).unwrap();
        }
        assert!(mixture_concavity_check(&a, &b, 0.5).is_err());
    }

    #[test]
    fn running_moments_merge_matches_single_pass() {
        let mut rng = seed::stream(29, 0);
        let xs: Vec<f64> = (0..1000).map(|_| rng.random_range(-2.0..5.0)).collect();
        let mut whole = RunningMoments::default();
        for &x in &xs {
            whole.push(x);
        }
        let mut left = RunningMoments::default();
        let mut right = RunningMoments::default();
        for &x in &xs[..337] {
            left.push(x);
        }
        for &x in &xs[337..] {
            right.push(x);
        }
        left.merge(right);
        assert!((whole.mean() - left.mean()).abs() < 1e-12);
        assert!((whole.variance() - left.variance()).abs() < 1e-12);
        assert_eq!(whole.count(), left.count());
    }

    #[test]
    fn merged_chunk_estimates_match_single_pass() {
        let mut rng = seed::stream(29, 1);
        let xs: Vec<f64> = (0..4096).map(|_| rng.random_range(-1.0..3.0)).collect();
        let whole = EstimateWithError::from_samples(&xs).unwrap();
        let parts: Vec<EstimateWithError> = xs
            .chunks(700)
            .map(|c| EstimateWithError::from_samples(c).unwrap())
            .collect();
        let merged = merge_estimates(&parts).unwrap();
        assert!((whole.value - merged.value).abs() < 1e-12);
        assert!((whole.std_error - merged.std_error).abs() < 1e-12);
        assert_eq!(whole.n_samples, merged.n_samples);
    }

    #[test]
    fn loglog_slope_recovers_power_law() {
        let points: Vec<(f64, f64)> = (1..20).map(|i| (i as f64, 3.0 / (i as f64).powi(2))).collect();
        let slope = loglog_slope(&points).unwrap();
        assert!((slope + 2.0).abs() < 1e-12, "slope {slope}");
        assert!(loglog_slope(&[(1.0, 1.0)]).is_none());
    }

    #[test]
    fn se_shrinks_like_inverse_sqrt_outer() {
        let p = binary_symmetric_instance();
        let t = enumerate_joint(&p).unwrap();
        let model = p.data_model().unwrap();
        let loss = p.loss_fn();
        let mut ratios = Vec::new();
        for trial in 0..10 {
            let mut rng = seed::stream(30, trial);
            let small =
                mc_gen_error(&model, gibbs_row_learner(&p, &t), &loss, 4_000, 0, &mut rng).unwrap();
            let big =
                mc_gen_error(&model, gibbs_row_learner(&p, &t), &loss, 8_000, 0, &mut rng).unwrap();
            ratios.push(big.std_error / small.std_error);
        }
        let mean_ratio = ratios.iter().sum::<f64>() / ratios.len() as f64;
        assert!(
            (0.6..=0.85).contains(&mean_ratio),
            "doubling outer should shrink the SE by about 1/sqrt(2), got {mean_ratio}"
        );
    }
}
