mod common;

use isd_linucb::policy::radius::{rho_res, ResidualRadiusInputs};

#[test]
fn incremental_gram_matches_recomputation() {
    assert!(common::gram_error() <= 1e-8);
}

#[test]
fn principal_angles_match_projector_difference() {
    assert!(common::angle_error() <= 1e-8);
}

#[test]
fn jbd_recovers_noiseless_block_spans() {
    let e = common::jbd_error();
    assert!(e <= 1e-6, "{e:e}");
}

#[test]
fn radii_match_scalar_transcription() {
    let e = common::radius_error();
    assert!(e <= 1e-12, "{e:e}");
}

#[test]
fn residual_radius_example() {
    let (sigma, eta, l, p_res) = (0.5, 0.05, 1.5, 3);
    let got = rho_res(&ResidualRadiusInputs {
        t: 1,
        eta,
        l,
        m: 1.0,
        sigma,
        lambda: 0.1,
        p_res,
        delta_pi: 0.0,
        beta_err: 0.0,
    })
    .unwrap();
    let want = sigma * (2.0 * (1.0f64 / eta).ln() + 3.0 * (1.0 + l * l / 0.3f64).ln()).sqrt() + 0.1f64.sqrt();
    assert!((got - want).abs() <= 1e-12);
}
