//! Invariant and residual confidence radii for a range of offline sizes.

use isd_linucb::policy::radius::{beta_err_bound, delta_pi_surrogate, rho_inv, rho_res, InvariantRadiusInputs, ResidualRadiusInputs};

fn main() -> isd_linucb::Result<()> {
    let (eta, l, m, sigma, lambda0) = (0.01, 4.0, 3.0, 0.1, 0.5);
    println!("{:>6} {:>10} {:>10} {:>12}", "T0", "dPi", "rho_inv", "rho_res(100)");
    for t0 in [1000, 3500, 8000] {
        let delta_pi = delta_pi_surrogate(1.0, 10, eta, t0)?;
        let inv = rho_inv(&InvariantRadiusInputs {
            t0,
            eta,
            l,
            m,
            sigma,
            lambda0,
            p_inv: 7,
            delta_pi,
            oracle_subspaces: false,
        })?;
        let res = rho_res(&ResidualRadiusInputs {
            t: 100,
            eta,
            l,
            m,
            sigma,
            lambda: 0.1,
            p_res: 3,
            delta_pi,
            beta_err: beta_err_bound(inv, lambda0, t0)?,
        })?;
        println!("{t0:>6} {delta_pi:>10.4} {inv:>10.2} {res:>12.2}");
    }
    Ok(())
}
