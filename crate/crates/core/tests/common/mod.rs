//! Numerical checks shared by the numerical tests and the acceptance run.
//! Each returns the largest observed error.

use isd_linucb::policy::radius::{rho_inv, rho_res, InvariantRadiusInputs, ResidualRadiusInputs};
use isd_linucb::policy::RidgeState;
use isd_linucb::subspace::{joint_block_diagonalize, principal_angle_distance};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn gaussian_matrix(r: usize, c: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.sample(StandardNormal))
}

fn orthonormal(p: usize, k: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    gaussian_matrix(p, k, rng).qr().q()
}

/// Incremental ridge statistics vs recomputation after 1000 updates.
pub fn gram_error() -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (p, lambda) = (8, 0.1);
    let mut state = RidgeState::new(p, lambda).unwrap();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for _ in 0..1000 {
        let x = DVector::from_fn(p, |_, _| rng.sample::<f64, _>(StandardNormal));
        let y: f64 = rng.sample(StandardNormal);
        state.update(&x, y).unwrap();
        xs.push(x);
        ys.push(y);
    }
    let mut gram = DMatrix::identity(p, p) * lambda;
    let mut moment = DVector::zeros(p);
    for (x, y) in xs.iter().zip(&ys) {
        gram += x * x.transpose();
        moment += x * *y;
    }
    let theta = gram.clone().lu().solve(&moment).unwrap();
    [
        (state.gram() - &gram).amax(),
        (state.moment() - &moment).amax(),
        (state.theta() - theta).amax(),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

/// Principal-angle distance vs the spectral norm of the projector difference, 100 pairs.
pub fn angle_error() -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let p = rng.random_range(2..12);
        let k = rng.random_range(1..p);
        let a = orthonormal(p, k, &mut rng);
        let b = orthonormal(p, k, &mut rng);
        let diff = &a * a.transpose() - &b * b.transpose();
        let direct = diff.symmetric_eigenvalues().amax();
        worst = worst.max((principal_angle_distance(&a, &b).unwrap() - direct).abs());
    }
    worst
}

fn block_family(u: &DMatrix<f64>, sizes: &[usize], m: usize, rng: &mut ChaCha8Rng) -> Vec<DMatrix<f64>> {
    let p = u.nrows();
    (0..m)
        .map(|_| {
            let mut inner = DMatrix::zeros(p, p);
            let mut start = 0;
            for &s in sizes {
                let a = gaussian_matrix(s, s, rng);
                let block = &a * a.transpose() + DMatrix::identity(s, s) * 0.5;
                inner.view_mut((start, start), (s, s)).copy_from(&block);
                start += s;
            }
            u * inner * u.transpose()
        })
        .collect()
}

/// Worst block-span error of the JBD over 50 noiseless families; 1 if the block sizes are wrong.
pub fn jbd_error() -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n_blocks = rng.random_range(2..5);
        let sizes: Vec<usize> = (0..n_blocks).map(|_| rng.random_range(1..4)).collect();
        let p: usize = sizes.iter().sum();
        let u = orthonormal(p, p, &mut rng);
        let covs = block_family(&u, &sizes, 6, &mut rng);
        let jbd = joint_block_diagonalize(&covs, None, &mut rng).unwrap();

        let mut found: Vec<usize> = jbd.blocks.iter().map(Vec::len).collect();
        let mut expected = sizes.clone();
        found.sort();
        expected.sort();
        if found != expected {
            return 1.0;
        }
        let mut start = 0;
        for &s in &sizes {
            let truth = u.columns(start, s).into_owned();
            start += s;
            let best = jbd
                .blocks
                .iter()
                .filter(|b| b.len() == s)
                .map(|b| {
                    let cols: Vec<_> = b.iter().map(|&j| jbd.u.column(j).into_owned()).collect();
                    principal_angle_distance(&truth, &DMatrix::from_columns(&cols)).unwrap()
                })
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(best);
        }
    }
    worst
}

fn ln1(x: f64) -> f64 {
    if x > 1.0 {
        x.ln()
    } else {
        0.0
    }
}

fn scalar_rho_inv(t0: f64, eta: f64, l: f64, m: f64, s: f64, l0: f64, pi: f64, dpi: f64, oracle: bool) -> f64 {
    let first = s * (2.0 * ln1(1.0 / eta) + pi * ln1(l * l / (pi * l0))).sqrt();
    let second = 2.0 * l * l * m * ((2.0 / l0) * ln1((pi + 1.0) / eta)).sqrt();
    let extra = if oracle {
        0.0
    } else {
        (pi * t0).sqrt() * dpi * l * m + (t0 / l0).sqrt() * dpi * l * l * m
    };
    first + second + extra
}

fn scalar_rho_res(t: f64, eta: f64, l: f64, m: f64, s: f64, lam: f64, pr: f64, dpi: f64, be: f64) -> f64 {
    s * (2.0 * ln1(1.0 / eta) + pr * ln1(1.0 + t * l * l / (lam * pr))).sqrt()
        + lam.sqrt() * m
        + l * m * dpi * (pr * t).sqrt()
        + l * be * (pr * t).sqrt()
}

/// Relative error of the radius formulas against the scalar transcription,
/// on a fixed example and 20 random tuples.
pub fn radius_error() -> f64 {
    let x = InvariantRadiusInputs {
        t0: 1000,
        eta: 0.01,
        l: 2.0,
        m: 3.0,
        sigma: 1.0,
        lambda0: 0.5,
        p_inv: 7,
        delta_pi: 0.0,
        oracle_subspaces: false,
    };
    let want = scalar_rho_inv(1000.0, 0.01, 2.0, 3.0, 1.0, 0.5, 7.0, 0.0, false);
    let mut worst = (rho_inv(&x).unwrap() - want).abs() / want.max(1.0);

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let t0 = rng.random_range(100..10_000);
        let eta = rng.random_range(0.001..0.5);
        let l = rng.random_range(0.2..4.0);
        let m = rng.random_range(0.1..5.0);
        let sigma = rng.random_range(0.05..2.0);
        let lambda0 = rng.random_range(0.05..3.0);
        let p_inv = rng.random_range(1..12);
        let delta_pi = rng.random_range(0.0..0.5);
        let oracle = rng.random_bool(0.5);
        let got = rho_inv(&InvariantRadiusInputs {
            t0,
            eta,
            l,
            m,
            sigma,
            lambda0,
            p_inv,
            delta_pi,
            oracle_subspaces: oracle,
        })
        .unwrap();
        let want = scalar_rho_inv(t0 as f64, eta, l, m, sigma, lambda0, p_inv as f64, delta_pi, oracle);
        worst = worst.max((got - want).abs() / want.max(1.0));

        let t = rng.random_range(1..1000);
        let lambda = rng.random_range(0.01..2.0);
        let p_res = rng.random_range(1..10);
        let beta_err = rng.random_range(0.0..0.3);
        let got = rho_res(&ResidualRadiusInputs {
            t,
            eta,
            l,
            m,
            sigma,
            lambda,
            p_res,
            delta_pi,
            beta_err,
        })
        .unwrap();
        let want = scalar_rho_res(t as f64, eta, l, m, sigma, lambda, p_res as f64, delta_pi, beta_err);
        worst = worst.max((got - want).abs() / want.max(1.0));
    }
    worst
}
