//! Distance between subspaces as the sine of the largest principal angle.

use isd_linucb::subspace::{principal_angle_distance, projection_distance};
use nalgebra::DMatrix;

fn main() -> isd_linucb::Result<()> {
    let e1 = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
    for theta in [0.0f64, 0.3, 1.0, std::f64::consts::FRAC_PI_2] {
        let line = DMatrix::from_column_slice(2, 1, &[theta.cos(), theta.sin()]);
        println!(
            "theta = {theta:.3}: distance {:.5}, sin(theta) {:.5}",
            principal_angle_distance(&e1, &line)?,
            theta.sin()
        );
    }
    let plane = DMatrix::from_column_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
    let axis = DMatrix::from_column_slice(3, 1, &[0.0, 0.0, 1.0]);
    println!("plane vs normal axis: {}", projection_distance(&plane, &axis)?);
    Ok(())
}
