// Non-Euclidean geometry on an l1 ball: the l_p distance-generating function, restarted
// Bregman FGM on a sparse regression, and l_p steepest descent on the whole space.

use std::error::Error;

use minmax_fne::bregman::{bregman_restart_fgm, bregman_restart_params, lp_dgf, steepest_descent, BregmanFgmParams};
use minmax_fne::fgm::InexactOracle;
use minmax_fne::{FeasibleSet, VectorPoint};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let d = 100;
    let geo = lp_dgf(d)?;
    println!("d = {d}: geometry {:?}, growth constant {:.3}", geo.kind(), geo.growth());

    // f(z) = |A z - b|^2 / 2 + lambda |z|^2 / 2 over the unit l1 ball, sparse ground truth.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let m = 40;
    let a = DMatrix::from_fn(m, d, |_, _| rng.gen_range(-1.0..1.0) / (m as f64).sqrt());
    let mut truth = VectorPoint::zeros(d);
    truth[3] = 0.6;
    truth[40] = -0.3;
    let b = &a * &truth;
    let lambda = 1e-2;
    // Smoothness w.r.t. l1: the largest |column|^2 of A plus lambda.
    let l = a.column_iter().map(|c| c.norm_squared()).fold(0.0, f64::max) + lambda;
    let set = FeasibleSet::l1_ball(VectorPoint::zeros(d), 1.0)?;
    let params = BregmanFgmParams { smoothness: l, lambda, eps: 1e-4, radius: 2.0 };
    let (t, s) = bregman_restart_params(&geo, &params)?;
    let mut oracle = InexactOracle::new(l, |z: &VectorPoint| a.transpose() * (&a * z - &b) + z * lambda)?;
    let z = bregman_restart_fgm(&VectorPoint::zeros(d), &set, &geo, &params, &mut oracle)?;
    let support: Vec<usize> = (0..d).filter(|&i| z[i].abs() > 0.05).collect();
    println!("T = {t}, S = {s}; {} gradient calls; large coordinates {support:?}", oracle.counts().grad);
    println!("z[3] = {:.3}, z[40] = {:.3}, |z|_1 = {:.3}", z[3], z[40], z.lp_norm(1));

    // Steepest descent in the l_p norm with p close to 1.
    let p = 1.0 + 1.0 / (d as f64).ln();
    let target = VectorPoint::from_fn(d, |i, _| if i % 50 == 0 { 1.0 } else { 0.0 });
    let (_, norms) = steepest_descent(&VectorPoint::zeros(d), p, |x: &VectorPoint| x - &target, 1.0, 200)?;
    println!("steepest descent: dual gradient norm {:.3e} -> {:.3e}", norms[0], norms[norms.len() - 1]);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
