// Proximal-point steps on a weakly convex function, each solved by the T = 11 restart scheme.

use std::error::Error;

use minmax_fne::fgm::prox_point_via_fgm;
use minmax_fne::stationarity::measures;
use minmax_fne::{FeasibleSet, VectorPoint};
use nalgebra::dvector;

/// `phi(x) = sum x_i^4 / 4 - x_i^2 / 2`, stationary at `x_i in {-1, 0, 1}`.
fn grad(x: &VectorPoint) -> VectorPoint {
    x.map(|v| v * v * v - v)
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let set = FeasibleSet::boxed(dvector![-2.0, -2.0], dvector![2.0, 2.0])?;
    let l = 11.0;
    let mut x = dvector![0.2, -1.8];
    for t in 1..=60 {
        let next = prox_point_via_fgm(&x, grad, l, &set, 1e-8, 20.0)?;
        let step = (&next - &x).norm();
        x = next;
        let s = measures(&x, &grad(&x), l, &set)?.strong;
        if t % 10 == 0 {
            println!("t {t:>2}  x = ({:+.6}, {:+.6})  step {step:.2e}  S {s:.2e}", x[0], x[1]);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
