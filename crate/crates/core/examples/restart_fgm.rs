// Restarted FGM on an ill-conditioned quadratic: the distance to the minimizer halves every epoch.

use std::error::Error;

use minmax_fne::fgm::{restart_fgm_epochs, restart_params_from_radius, FgmConfig, InexactOracle};
use minmax_fne::{FeasibleSet, VectorPoint};
use nalgebra::DMatrix;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let d = 30;
    let (mu, l) = (0.01, 1.0);
    let a = DMatrix::from_diagonal(&VectorPoint::from_fn(d, |i, _| mu + (l - mu) * i as f64 / (d - 1) as f64));
    let b = VectorPoint::from_fn(d, |i, _| ((i + 1) as f64).sin());
    let z_star = VectorPoint::from_fn(d, |i, _| b[i] / a[(i, i)]);

    let z0 = VectorPoint::zeros(d);
    let r = z_star.norm();
    let eps = 1e-6;
    let (t, s) = restart_params_from_radius(l / mu, l, r, eps)?;
    println!("kappa {:.0}: T = {t}, S = {s}", l / mu);

    let set = FeasibleSet::whole_space(d)?;
    let mut oracle = InexactOracle::new(l, |z: &VectorPoint| &a * z - &b)?;
    let epochs = restart_fgm_epochs(&z0, &set, FgmConfig::new(1.0 / l, t, s)?, &mut oracle)?;
    let mut prev = r;
    for (k, z) in epochs.iter().enumerate() {
        let dist = (z - &z_star).norm();
        println!("epoch {:>2}: |z - z*| = {dist:.3e} (ratio {:.3})", k + 1, dist / prev);
        prev = dist;
        if dist < 1e-12 {
            break;
        }
    }
    println!("gradient calls: {}", oracle.counts().grad);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
