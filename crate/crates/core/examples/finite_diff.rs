// Validate analytic oracle gradients against central differences.

use std::error::Error;

use minmax_fne::harness::finite_diff::finite_diff_check;
use minmax_fne::harness::problems::FAMILIES;
use minmax_fne::harness::{build_problem, ProblemDims};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for name in FAMILIES {
        let inst = build_problem(name, 0, &ProblemDims::default())?;
        let (spec, f) = (&inst.spec, inst.spec.oracle());
        let xs: Vec<_> = (0..4).map(|_| spec.x_set().sample(&mut rng)).collect();
        let y = spec.y_set().sample(&mut rng);
        let rx = finite_diff_check(|x| f.value(x, &y), |x| f.grad_x(x, &y), &xs, 1e-5)?;
        println!("{name:<22} grad_x worst relative error {:.2e} (point {}, coordinate {})", rx.max_rel_error, rx.point, rx.coord);
    }

    // A wrong gradient is caught immediately.
    let bad = finite_diff_check(
        |x| x[0].powi(3),
        |x| x.map(|v| 2.0 * v * v),
        &[nalgebra::dvector![0.7]],
        1e-4,
    )?;
    println!("corrupted gradient: relative error {:.2e}", bad.max_rel_error);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
