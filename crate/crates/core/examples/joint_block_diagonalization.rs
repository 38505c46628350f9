//! Recover a hidden block structure shared by several covariance matrices.

use isd_linucb::subspace::{joint_block_diagonalize, principal_angle_distance};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn main() -> isd_linucb::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let sizes = [2, 3, 1];
    let p: usize = sizes.iter().sum();
    let q = DMatrix::<f64>::from_fn(p, p, |_, _| rng.sample(StandardNormal)).qr().q();

    let covs: Vec<DMatrix<f64>> = (0..4)
        .map(|_| {
            let mut inner = DMatrix::zeros(p, p);
            let mut at = 0;
            for &s in &sizes {
                let a = DMatrix::<f64>::from_fn(s, s, |_, _| rng.sample(StandardNormal));
                inner.view_mut((at, at), (s, s)).copy_from(&(&a * a.transpose() + DMatrix::identity(s, s)));
                at += s;
            }
            &q * inner * q.transpose()
        })
        .collect();

    let jbd = joint_block_diagonalize(&covs, None, &mut rng)?;
    println!("blocks: {:?}", jbd.blocks);
    println!("max off-block entry: {:.2e}", jbd.max_off_block);

    let mut at = 0;
    for &s in &sizes {
        let truth = q.columns(at, s).into_owned();
        at += s;
        for b in jbd.blocks.iter().filter(|b| b.len() == s) {
            let cols: Vec<_> = b.iter().map(|&j| jbd.u.column(j).into_owned()).collect();
            let d = principal_angle_distance(&truth, &DMatrix::from_columns(&cols))?;
            println!("true block of size {s} vs {b:?}: {d:.2e}");
        }
    }
    Ok(())
}
