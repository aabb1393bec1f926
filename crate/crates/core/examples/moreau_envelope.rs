// Moreau envelope gradient of the primal function, and its agreement with the stationarity measures.

use std::error::Error;
use std::sync::Arc;

use minmax_fne::moreau::{envelope_measures, moreau_gradient};
use minmax_fne::saddle::DualMode;
use minmax_fne::{FeasibleSet, ProblemConstants, ProblemSpec, SaddleOracle, VectorPoint};
use nalgebra::dvector;

/// `F(x, y) = x y` on `Y = [-1, 1]`, so `phi(x) = |x|`.
struct Bilinear;

impl SaddleOracle for Bilinear {
    fn value(&self, x: &VectorPoint, y: &VectorPoint) -> f64 {
        x[0] * y[0]
    }
    fn grad_x(&self, _: &VectorPoint, y: &VectorPoint) -> VectorPoint {
        y.clone()
    }
    fn grad_y(&self, x: &VectorPoint, _: &VectorPoint) -> VectorPoint {
        x.clone()
    }
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let constants = ProblemConstants { l_xx: 0.5, l_xy: 1.0, l_yy: 0.5, r_y: 1.0, delta: 4.0 };
    let spec = ProblemSpec::new(
        Arc::new(Bilinear),
        FeasibleSet::boxed(dvector![-4.0], dvector![4.0])?,
        FeasibleSet::boxed(dvector![-1.0], dvector![1.0])?,
        constants,
        dvector![0.0],
        dvector![0.0],
    )?;
    // The envelope of |x| with weight L_xx = 0.5 is a Huber function with slope 1 for |x| >= 1.
    for x in [3.0, 1.5, 0.5, 0.0] {
        let report = moreau_gradient(&dvector![x], &spec, 1e-3, DualMode::Concave)?;
        let (g, s, w) = envelope_measures(&dvector![x], &report, &spec)?;
        println!("x {x:<4} prox {:+.6}  |grad| {g:.6}  S {s:.6}  W {w:.6}", report.x_plus[0]);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
