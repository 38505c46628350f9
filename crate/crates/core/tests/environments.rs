use isd_linucb::env::{generate_offline_log, HypercubeInstance, InstanceConfig, Round, SyntheticInstance};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instance(p: usize, p_res: usize, n_actions: usize, t0: usize, sigma: f64, seed: u64) -> SyntheticInstance {
    let cfg = InstanceConfig {
        p,
        p_res,
        n_actions,
        t0,
        horizon: 10,
        noise_sigma: sigma,
    };
    SyntheticInstance::sample(cfg, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

/// Rotated draws `Uᵀφ` for `n` feature vectors at an online round.
fn rotated_draws(inst: &SyntheticInstance, n: usize, seed: u64) -> Vec<DVector<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        for phi in inst.features_at(Round::Online(1), &mut rng).unwrap().into_iter().take(n - out.len()) {
            out.push(inst.u().transpose() * phi);
        }
    }
    out
}

#[test]
fn feature_covariance_matches_spectrum() {
    let inst = instance(4, 2, 5, 100, 0.1, 11);
    let n = 100_000;
    let draws = rotated_draws(&inst, n, 1);
    let v = inst.spectrum(Round::Online(1));
    let mut cov = DMatrix::zeros(4, 4);
    for z in &draws {
        cov += z * z.transpose();
    }
    cov /= n as f64;
    for i in 0..4 {
        for j in 0..4 {
            let target = if i == j { v[i] } else { 0.0 };
            // Var(z_i z_j) for independent centered Gaussians.
            let var = if i == j { 2.0 * v[i] * v[i] } else { v[i] * v[j] };
            let se = (var / n as f64).sqrt();
            assert!((cov[(i, j)] - target).abs() <= 4.0 * se, "({i},{j}): {} vs {target}", cov[(i, j)]);
        }
    }
}

#[test]
fn invariant_and_residual_projections_are_uncorrelated() {
    let inst = instance(5, 2, 5, 100, 0.1, 12);
    let n = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (pi, pr) = (inst.basis().projection_inv(), inst.basis().projection_res());
    let mut cross = DMatrix::zeros(5, 5);
    let mut count = 0usize;
    while count < n {
        for phi in inst.features_at(Round::Offline(37), &mut rng).unwrap() {
            let (a, b) = (&pi * &phi, &pr * &phi);
            cross += &a * b.transpose();
            count += 1;
        }
    }
    cross /= count as f64;
    let v = inst.spectrum(Round::Offline(37));
    let bound = 4.0 * v.max() / (count as f64).sqrt();
    assert!(cross.amax() <= bound, "{} > {bound}", cross.amax());
}

#[test]
fn reward_noise_is_centered() {
    let inst = instance(4, 1, 3, 10, 0.7, 13);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let phi = inst.features_at(Round::Online(1), &mut rng).unwrap().remove(0);
    let mean = inst.mean_reward(Round::Online(1), &phi).unwrap();
    let n = 100_000;
    let total: f64 = (0..n).map(|_| inst.reward(Round::Online(1), &phi, &mut rng).unwrap() - mean).sum();
    assert!((total / n as f64).abs() <= 3.0 * 0.7 / (n as f64).sqrt());
}

#[test]
fn logged_actions_are_uniform() {
    let k = 4;
    let t0 = 100_000;
    let inst = instance(3, 1, k, t0, 0.1, 14);
    let log = generate_offline_log(&inst, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
    assert_eq!(log.len(), t0);
    let mut counts = vec![0usize; k];
    for r in log.records() {
        counts[r.action - 1] += 1;
    }
    let q = 1.0 / k as f64;
    let tol = 3.0 * (q * (1.0 - q) / t0 as f64).sqrt();
    for c in counts {
        assert!((c as f64 / t0 as f64 - q).abs() <= tol, "{c}");
    }
}

#[test]
fn sampling_is_reproducible() {
    let a = generate_offline_log(&instance(6, 2, 5, 300, 0.1, 15), &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
    let b = generate_offline_log(&instance(6, 2, 5, 300, 0.1, 15), &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
    assert_eq!(a.records(), b.records());
}

#[test]
fn online_parameter_is_constant() {
    let inst = instance(6, 3, 5, 50, 0.1, 16);
    let g1 = inst.gamma(Round::Online(1)).unwrap();
    for t in 2..=10 {
        assert_eq!(inst.gamma(Round::Online(t)).unwrap(), g1);
    }
}

#[test]
fn parameter_norm_is_bounded_by_m() {
    let inst = instance(8, 3, 5, 400, 0.1, 17);
    let m = inst.param_bound();
    let rounds = (1..=400).map(Round::Offline).chain((1..=10).map(Round::Online));
    for r in rounds {
        assert!(inst.gamma(r).unwrap().norm() <= m + 1e-12);
    }
}

#[test]
fn hypercube_gamma_has_exact_magnitude() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for p in [1, 3, 8, 12] {
        let h = HypercubeInstance::sample(p, 400, &mut rng).unwrap();
        assert!(h.gamma().iter().all(|g| (g.abs() - 0.05).abs() <= 1e-15));
        let best = if p <= 10 { p as f64 / 20.0 } else { 0.05 };
        assert!((h.optimal_reward() - best).abs() <= 1e-12);
    }
}
