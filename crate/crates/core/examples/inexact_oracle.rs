// FGM driven by a perturbed gradient oracle: the error floor grows with the number of steps.

use std::error::Error;

use minmax_fne::fgm::{fgm, InexactOracle};
use minmax_fne::{FeasibleSet, VectorPoint};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let d = 40;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
    let a = &g * g.transpose() / d as f64;
    let b = VectorPoint::from_fn(d, |_, _| rng.gen_range(-1.0..1.0));
    let l = a.symmetric_eigenvalues().max();
    let f = |z: &VectorPoint| 0.5 * z.dot(&(&a * z)) - b.dot(z);

    // Minimize over a ball so the gap to the constrained optimum is well defined.
    let set = FeasibleSet::ball(VectorPoint::zeros(d), 1.0)?;
    let mut exact = InexactOracle::new(l, |z: &VectorPoint| &a * z - &b)?;
    let f_star = f(&fgm(&VectorPoint::zeros(d), &set, 1.0 / l, 5000, &mut exact)?);

    for noise in [0.0, 1e-4, 1e-2] {
        let mut noisy_rng = ChaCha8Rng::seed_from_u64(9);
        let mut oracle = InexactOracle::new(l, |z: &VectorPoint| {
            let e = VectorPoint::from_fn(d, |_, _| noisy_rng.gen_range(-1.0..1.0));
            &a * z - &b + e.normalize() * noise
        })?
        .with_delta(2.0 * noise)?;
        let line: Vec<String> = [10, 100, 1000]
            .iter()
            .map(|&t| {
                fgm(&VectorPoint::zeros(d), &set, 1.0 / l, t, &mut oracle).map(|z| format!("T={t}: {:.2e}", f(&z) - f_star))
            })
            .collect::<Result<_, _>>()?;
        println!("gradient error {noise:<6} {}", line.join("  "));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
