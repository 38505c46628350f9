//! Confidence radii. Every radius bounds the unsquared Gram-norm of the
//! estimation error. Logarithm arguments are floored at 1.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// How ISD policies size their confidence sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusMode {
    /// Worst-case radii with every concentration and subspace-error term.
    Theory,
    /// Self-normalized terms only, with the invariant noise level estimated
    /// from the offline residuals.
    #[default]
    PlugIn,
}

fn ln_floor(x: f64) -> f64 {
    x.max(1.0).ln()
}

fn check_eta(eta: f64) -> Result<()> {
    if eta > 0.0 && eta < 1.0 {
        Ok(())
    } else {
        invalid(format!("eta must lie in (0, 1), got {eta}"))
    }
}

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        invalid(format!("{name} must be finite and nonnegative, got {v}"))
    }
}

/// `σ·sqrt(2 ln(1/η) + d·ln(x))`, the self-normalized martingale term.
pub fn self_normalized(sigma: f64, eta: f64, d: usize, log_arg: f64) -> f64 {
    sigma * (2.0 * ln_floor(1.0 / eta) + d as f64 * ln_floor(log_arg)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantRadiusInputs {
    pub t0: usize,
    pub eta: f64,
    pub l: f64,
    pub m: f64,
    pub sigma: f64,
    pub lambda0: f64,
    pub p_inv: usize,
    pub delta_pi: f64,
    pub oracle_subspaces: bool,
}

/// Radius of the offline invariant confidence set.
///
/// Oracle subspaces:
/// `σ√(2ln(1/η) + p_inv·ln(L²/(p_inv λ₀))) + 2L²M√((2/λ₀)·ln((p_inv+1)/η))`;
/// with estimated subspaces `√(p_inv T₀)·ΔΠ·LM + √(T₀/λ₀)·ΔΠ·L²M` is added.
pub fn rho_inv(x: &InvariantRadiusInputs) -> Result<f64> {
    check_eta(x.eta)?;
    for (n, v) in [("L", x.l), ("M", x.m), ("sigma", x.sigma), ("delta_pi", x.delta_pi)] {
        check_nonneg(n, v)?;
    }
    if x.p_inv == 0 {
        return Ok(0.0);
    }
    if !(x.lambda0 > 0.0) {
        return invalid(format!("lambda0 must be positive, got {}", x.lambda0));
    }
    let p = x.p_inv as f64;
    let l2 = x.l * x.l;
    let noise = self_normalized(x.sigma, x.eta, x.p_inv, l2 / (p * x.lambda0));
    let cross = 2.0 * l2 * x.m * (2.0 / x.lambda0 * ln_floor((p + 1.0) / x.eta)).sqrt();
    let mut rho = noise + cross;
    if !x.oracle_subspaces {
        let t0 = x.t0 as f64;
        rho += (p * t0).sqrt() * x.delta_pi * x.l * x.m + (t0 / x.lambda0).sqrt() * x.delta_pi * l2 * x.m;
    }
    Ok(rho)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualRadiusInputs {
    pub t: usize,
    pub eta: f64,
    pub l: f64,
    pub m: f64,
    pub sigma: f64,
    pub lambda: f64,
    pub p_res: usize,
    pub delta_pi: f64,
    pub beta_err: f64,
}

/// Radius of the online residual confidence set at round `t`:
/// `σ√(2ln(1/η) + p_res·ln(1 + tL²/(λ p_res))) + √λ·M + LM·ΔΠ·√(p_res t) + L·β_err·√(p_res t)`.
///
/// With `ΔΠ = β_err = 0` and `p_res = p` this is the LinUCB radius.
pub fn rho_res(x: &ResidualRadiusInputs) -> Result<f64> {
    check_eta(x.eta)?;
    for (n, v) in [("L", x.l), ("M", x.m), ("sigma", x.sigma), ("delta_pi", x.delta_pi), ("beta_err", x.beta_err)] {
        check_nonneg(n, v)?;
    }
    if x.t < 1 {
        return invalid("round index must be >= 1");
    }
    if !(x.lambda > 0.0) {
        return invalid(format!("lambda must be positive, got {}", x.lambda));
    }
    if x.p_res == 0 {
        return invalid("residual dimension must be >= 1");
    }
    let (t, d) = (x.t as f64, x.p_res as f64);
    let noise = self_normalized(x.sigma, x.eta, x.p_res, 1.0 + t * x.l * x.l / (x.lambda * d));
    let sqrt_dt = (d * t).sqrt();
    Ok(noise + x.lambda.sqrt() * x.m + x.l * x.m * x.delta_pi * sqrt_dt + x.l * x.beta_err * sqrt_dt)
}

/// Subspace-error surrogate `c·sqrt(ln(p/η)/T₀)`.
pub fn delta_pi_surrogate(c: f64, p: usize, eta: f64, t0: usize) -> Result<f64> {
    check_eta(eta)?;
    check_nonneg("c", c)?;
    if t0 == 0 {
        return invalid("T0 must be >= 1");
    }
    Ok(c * (ln_floor(p as f64 / eta) / t0 as f64).sqrt())
}

/// 2-norm error bound on the invariant estimate, `sqrt(ρ_inv/(λ₀ T₀))`.
pub fn beta_err_bound(rho_inv: f64, lambda0: f64, t0: usize) -> Result<f64> {
    check_nonneg("rho_inv", rho_inv)?;
    if !(lambda0 > 0.0) || t0 == 0 {
        return invalid("beta error bound needs lambda0 > 0 and T0 >= 1");
    }
    Ok((rho_inv / (lambda0 * t0 as f64)).sqrt())
}

/// Exploration scale of discounted LinUCB after `n` discounted updates:
/// `√λ·M + σ√(2ln(1/η) + p·ln(1 + L²(1−ρ^{2n})/(λp(1−ρ²))))`.
pub fn discounted_radius(n: usize, eta: f64, l: f64, m: f64, sigma: f64, lambda: f64, p: usize, rho: f64) -> Result<f64> {
    check_eta(eta)?;
    if !(rho > 0.0 && rho < 1.0) {
        return invalid(format!("discount must lie in (0, 1), got {rho}"));
    }
    if !(lambda > 0.0) || p == 0 {
        return invalid("discounted radius needs lambda > 0 and p >= 1");
    }
    let d = p as f64;
    let arg = 1.0 + l * l * (1.0 - rho.powi(2 * n as i32)) / (lambda * d * (1.0 - rho * rho));
    Ok(lambda.sqrt() * m + self_normalized(sigma, eta, p, arg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn inv(delta_pi: f64, oracle: bool) -> InvariantRadiusInputs {
        InvariantRadiusInputs {
            t0: 2000,
            eta: 0.01,
            l: 2.0,
            m: 3.0,
            sigma: 1.0,
            lambda0: 0.5,
            p_inv: 7,
            delta_pi,
            oracle_subspaces: oracle,
        }
    }

    #[test]
    fn zero_subspace_error_matches_oracle() {
        assert_eq!(rho_inv(&inv(0.0, false)).unwrap(), rho_inv(&inv(0.0, true)).unwrap());
        assert!(rho_inv(&inv(0.1, false)).unwrap() > rho_inv(&inv(0.1, true)).unwrap());
    }

    #[test]
    fn reference_value() {
        let expected = (2.0 * 100f64.ln() + 7.0 * (4.0f64 / 3.5).ln()).sqrt() + 24.0 * (4.0 * 800f64.ln()).sqrt();
        assert_abs_diff_eq!(rho_inv(&inv(0.0, true)).unwrap(), expected, epsilon = 1e-12);
        // L²/(p_inv λ₀) < 1 is floored to a zero log
        let mut x = inv(0.0, true);
        x.lambda0 = 2.0;
        let floored = (2.0 * 100f64.ln()).sqrt() + 24.0 * (800f64.ln()).sqrt();
        assert_abs_diff_eq!(rho_inv(&x).unwrap(), floored, epsilon = 1e-12);
    }

    #[test]
    fn eta_outside_unit_interval_rejected() {
        for eta in [0.0, 1.0, 1.5, -0.1] {
            let mut x = inv(0.0, true);
            x.eta = eta;
            assert!(rho_inv(&x).is_err());
        }
        assert!(delta_pi_surrogate(1.0, 3, 1.0, 10).is_err());
    }

    #[test]
    fn residual_radius_first_round() {
        let x = ResidualRadiusInputs {
            t: 1,
            eta: 0.05,
            l: 3.0,
            m: 1.0,
            sigma: 0.5,
            lambda: 0.1,
            p_res: 2,
            delta_pi: 0.0,
            beta_err: 0.0,
        };
        let expected = 0.5 * (2.0 * 20f64.ln() + 2.0 * (1.0 + 9.0 / 0.2f64).ln()).sqrt() + 0.1f64.sqrt();
        assert_abs_diff_eq!(rho_res(&x).unwrap(), expected, epsilon = 1e-12);
    }

    #[test]
    fn discounted_radius_limits() {
        // after zero updates only the regularization term survives
        let r = discounted_radius(0, 0.1, 2.0, 1.5, 1.0, 0.1, 3, 0.99).unwrap();
        assert_abs_diff_eq!(r, 0.1f64.sqrt() * 1.5 + (2.0 * 10f64.ln()).sqrt(), epsilon = 1e-12);
        assert!(discounted_radius(5, 0.1, 2.0, 1.5, 1.0, 0.1, 3, 1.0).is_err());
    }
}
