//! Problem description shared by the solver, the diagnostics and the harness.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{ensure_nonnegative, ensure_positive, invalid, Result};
use crate::geometry::{check_dim, FeasibleSet, VectorPoint, FEASIBILITY_TOL};

/// First-order access to `F(x, y)`.
pub trait SaddleOracle: Send + Sync {
    fn value(&self, x: &VectorPoint, y: &VectorPoint) -> f64;
    fn grad_x(&self, x: &VectorPoint, y: &VectorPoint) -> VectorPoint;
    fn grad_y(&self, x: &VectorPoint, y: &VectorPoint) -> VectorPoint;
}

/// Gradient and projection evaluations performed by a routine.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CallCounts {
    pub grad: u64,
    pub proj: u64,
}

impl CallCounts {
    pub fn add(&mut self, other: CallCounts) {
        self.grad += other.grad;
        self.proj += other.proj;
    }
}

/// Smoothness and size constants of a problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemConstants {
    pub l_xx: f64,
    pub l_yy: f64,
    pub l_xy: f64,
    /// Radius of a ball around `y_bar` containing `Y`.
    pub r_y: f64,
    /// Upper bound on `phi(x0) - inf phi`.
    pub delta: f64,
}

#[derive(Clone)]
pub struct ProblemSpec {
    oracle: Arc<dyn SaddleOracle>,
    x_set: FeasibleSet,
    y_set: FeasibleSet,
    constants: ProblemConstants,
    x0: VectorPoint,
    y_bar: VectorPoint,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("x_set", &self.x_set)
            .field("y_set", &self.y_set)
            .field("constants", &self.constants)
            .field("x0", &self.x0)
            .field("y_bar", &self.y_bar)
            .finish_non_exhaustive()
    }
}

impl ProblemSpec {
    pub fn new(
        oracle: Arc<dyn SaddleOracle>,
        x_set: FeasibleSet,
        y_set: FeasibleSet,
        constants: ProblemConstants,
        x0: VectorPoint,
        y_bar: VectorPoint,
    ) -> Result<Self> {
        ensure_positive("L_xx", constants.l_xx)?;
        ensure_positive("L_yy", constants.l_yy)?;
        ensure_nonnegative("L_xy", constants.l_xy)?;
        ensure_positive("R_y", constants.r_y)?;
        ensure_nonnegative("Delta", constants.delta)?;
        check_dim(&x0, x_set.dim())?;
        check_dim(&y_bar, y_set.dim())?;
        if !x_set.contains(&x0, FEASIBILITY_TOL)? {
            return Err(invalid("x0 must lie in X"));
        }
        if !y_set.contains(&y_bar, FEASIBILITY_TOL)? {
            return Err(invalid("y_bar must lie in Y"));
        }
        if !y_set.is_bounded() {
            return Err(invalid("Y must be bounded"));
        }
        // Y must sit inside the ball of radius R_y around y_bar.
        let c = y_set.center();
        let r = y_set.radius_bound().unwrap_or(f64::INFINITY);
        let reach = (&c - &y_bar).norm() + r;
        if reach > constants.r_y * (1.0 + 1e-12) + 1e-12 {
            return Err(invalid(format!(
                "R_y = {} does not bound Y around y_bar (need at least {reach})",
                constants.r_y
            )));
        }
        Ok(Self { oracle, x_set, y_set, constants, x0, y_bar })
    }

    pub fn oracle(&self) -> &dyn SaddleOracle {
        self.oracle.as_ref()
    }

    pub fn shared_oracle(&self) -> Arc<dyn SaddleOracle> {
        Arc::clone(&self.oracle)
    }

    pub fn x_set(&self) -> &FeasibleSet {
        &self.x_set
    }

    pub fn y_set(&self) -> &FeasibleSet {
        &self.y_set
    }

    pub fn constants(&self) -> &ProblemConstants {
        &self.constants
    }

    pub fn x0(&self) -> &VectorPoint {
        &self.x0
    }

    pub fn y_bar(&self) -> &VectorPoint {
        &self.y_bar
    }

    /// `L_yy + L_xy^2 / L_xx`, the smoothness of the dual function.
    pub fn l_yy_plus(&self) -> f64 {
        let c = &self.constants;
        c.l_yy + c.l_xy * c.l_xy / c.l_xx
    }

    /// Same problem started from another point.
    pub fn with_start(&self, x0: VectorPoint) -> Result<Self> {
        Self::new(
            Arc::clone(&self.oracle),
            self.x_set.clone(),
            self.y_set.clone(),
            self.constants,
            x0,
            self.y_bar.clone(),
        )
    }

    /// Same problem with a different Delta.
    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        let mut constants = self.constants;
        constants.delta = delta;
        self.with_constants(constants)
    }

    /// Same problem with replaced constants, validated like [`ProblemSpec::new`].
    pub fn with_constants(&self, constants: ProblemConstants) -> Result<Self> {
        Self::new(
            Arc::clone(&self.oracle),
            self.x_set.clone(),
            self.y_set.clone(),
            constants,
            self.x0.clone(),
            self.y_bar.clone(),
        )
    }

    /// Largest difference quotients seen on random pairs.
    ///
    /// Unbounded `X` is sampled in a unit Gaussian cloud around `x0`.
    pub fn observed_lipschitz<R: Rng + ?Sized>(&self, samples: usize, rng: &mut R) -> ProblemConstants {
        let mut obs = ProblemConstants { l_xx: 0.0, l_yy: 0.0, l_xy: 0.0, ..self.constants };
        let draw_x = |rng: &mut R| {
            if self.x_set.is_bounded() {
                self.x_set.sample(rng)
            } else {
                &self.x0 + self.x_set.sample(rng)
            }
        };
        let f = self.oracle();
        for _ in 0..samples {
            let (x, x2) = (draw_x(rng), draw_x(rng));
            let (y, y2) = (self.y_set.sample(rng), self.y_set.sample(rng));
            let dx = (&x - &x2).norm();
            let dy = (&y - &y2).norm();
            if dx > 1e-12 {
                obs.l_xx = obs.l_xx.max((f.grad_x(&x, &y) - f.grad_x(&x2, &y)).norm() / dx);
                obs.l_xy = obs.l_xy.max((f.grad_y(&x, &y) - f.grad_y(&x2, &y)).norm() / dx);
            }
            if dy > 1e-12 {
                obs.l_yy = obs.l_yy.max((f.grad_y(&x, &y) - f.grad_y(&x, &y2)).norm() / dy);
                obs.l_xy = obs.l_xy.max((f.grad_x(&x, &y) - f.grad_x(&x, &y2)).norm() / dy);
            }
        }
        obs
    }
}
