//! The three samplers must agree: exact conjugate draws, the Metropolis
//! chain, and the Langevin chain all target the same posterior, and a
//! Langevin-trained learner reproduces the closed-form generalization
//! error.

use gibbs_lab::estimators::mc_gen_error;
use gibbs_lab::gaussian_mean::GaussianMeanProblem;
use gibbs_lab::model::{Dataset, LossFunction};
use gibbs_lab::samplers::{
    default_proposal_scale, langevin_chain, mh_gibbs_chain, sample_exact_posterior,
    squared_error_energy_grad, ChainConfig,
};
use gibbs_lab::seed;

fn fixture() -> (GaussianMeanProblem, Dataset) {
    let p = GaussianMeanProblem::centered(1, 10, 1.0, 1.0, 1.0).unwrap();
    let s = Dataset::from_points(vec![vec![1.1]; 10]).unwrap();
    (p, s)
}

#[test]
fn all_three_samplers_agree_on_posterior_moments() {
    let (p, s) = fixture();
    let spec = p.gibbs_spec();
    let post = p.posterior_params(&s).unwrap();

    let mut rng = seed::stream(71, 0);
    let n_exact = 100_000;
    let mut mean = 0.0;
    let mut var = 0.0;
    let draws: Vec<f64> =
        (0..n_exact).map(|_| sample_exact_posterior(&p, &s, &mut rng).unwrap().w[0]).collect();
    for &x in &draws {
        mean += x;
    }
    mean /= n_exact as f64;
    for &x in &draws {
        var += (x - mean) * (x - mean);
    }
    var /= (n_exact - 1) as f64;

    let mut rng = seed::stream(71, 1);
    let mh = mh_gibbs_chain(
        &spec,
        &s,
        &ChainConfig::with_default_burn_in(200_000, default_proposal_scale(&spec.prior)).unwrap(),
        &mut rng,
    )
    .unwrap();

    let mut rng = seed::stream(71, 2);
    let ula = langevin_chain(
        &spec,
        &s,
        squared_error_energy_grad,
        &ChainConfig::with_default_burn_in(200_000, 1e-3).unwrap(),
        &mut rng,
    )
    .unwrap();

    for (name, m, v) in [
        ("exact", mean, var),
        ("metropolis", mh.diagnostics.mean[0], mh.diagnostics.variance[0]),
        ("langevin", ula.diagnostics.mean[0], ula.diagnostics.variance[0]),
    ] {
        assert!(
            (m - post.mean[0]).abs() / post.mean[0].abs() < 0.03,
            "{name} mean {m} vs posterior {}",
            post.mean[0]
        );
        assert!(
            (v - post.sigma1_sq).abs() / post.sigma1_sq < 0.03,
            "{name} variance {v} vs posterior {}",
            post.sigma1_sq
        );
    }
}

#[test]
fn langevin_learner_reproduces_closed_form_gen_error() {
    let (p, _) = fixture();
    let spec = p.gibbs_spec();
    let exact = p.gen_error_closed();
    let model = p.data_model();

    // each replicate trains by running a fresh short chain and taking its
    // last state as the learned hypothesis
    let chain_cfg = ChainConfig::new(1_500, 1_499, 1e-3).unwrap();
    let mut rng = seed::stream(72, 0);
    let est = mc_gen_error(
        &model,
        |s, rng: &mut seed::Stream| {
            let chain = langevin_chain(&spec, s, squared_error_energy_grad, &chain_cfg, rng)?;
            Ok(chain.draws.into_iter().next_back().expect("one kept draw"))
        },
        &LossFunction::SquaredError,
        1_500,
        200,
        &mut rng,
    )
    .unwrap();
    assert!(
        est.within(exact, 3.0),
        "langevin-learner gen {} +- {} vs closed {exact}",
        est.value,
        est.std_error
    );
}
