//! Strong and weak stationarity measures over a convex set.

use crate::error::{ensure_positive, invalid, Error, Result};
use crate::geometry::{check_dim, check_finite, FeasibleSet, VectorPoint, FEASIBILITY_TOL};
use crate::problem::ProblemSpec;

/// Both measures together with the prox point they share.
#[derive(Debug, Clone, PartialEq)]
pub struct StationarityReport {
    pub strong: f64,
    pub weak: f64,
    /// `Proj_Z(z - zeta / L)`.
    pub prox_point: VectorPoint,
}

fn validate(z: &VectorPoint, zeta: &VectorPoint, l: f64, set: &FeasibleSet) -> Result<()> {
    ensure_positive("L", l)?;
    check_dim(z, set.dim())?;
    check_dim(zeta, set.dim())?;
    check_finite(z, "point")?;
    check_finite(zeta, "gradient")?;
    if set.distance(z)? > FEASIBILITY_TOL {
        return Err(Error::Precondition("point must lie in the feasible set".into()));
    }
    Ok(())
}

/// Computes the strong measure `S` and the weak measure `W` in one projection.
pub fn measures(z: &VectorPoint, zeta: &VectorPoint, l: f64, set: &FeasibleSet) -> Result<StationarityReport> {
    validate(z, zeta, l, set)?;
    measures_unchecked(z, zeta, l, set)
}

pub(crate) fn measures_unchecked(
    z: &VectorPoint,
    zeta: &VectorPoint,
    l: f64,
    set: &FeasibleSet,
) -> Result<StationarityReport> {
    let mut p = z - zeta / l;
    set.project_in_place(&mut p);
    let d = z - &p;
    let weak_sq = l * l * d.norm_squared();
    // S^2 = W^2 + 2L^2 <n, d> with n = p - (z - zeta/L) the normal part of the step; the
    // projection inequality makes <n, d> >= 0 up to rounding, so no cancellation occurs.
    let n = zeta / l - &d;
    let inner = n.dot(&d);
    let strong_sq = weak_sq + 2.0 * l * l * inner.max(0.0);
    Ok(StationarityReport { strong: strong_sq.sqrt(), weak: l * d.norm(), prox_point: p })
}

/// `S_Z(z, zeta, L) = sqrt(2L max_{z'} [-<zeta, z' - z> - L/2 |z' - z|^2])`.
pub fn strong_measure(z: &VectorPoint, zeta: &VectorPoint, l: f64, set: &FeasibleSet) -> Result<f64> {
    Ok(measures(z, zeta, l, set)?.strong)
}

/// `W_Z(z, zeta, L) = L |z - Proj_Z(z - zeta / L)|`.
pub fn weak_measure(z: &VectorPoint, zeta: &VectorPoint, l: f64, set: &FeasibleSet) -> Result<f64> {
    Ok(measures(z, zeta, l, set)?.weak)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FneVerdict {
    pub passed: bool,
    pub x: StationarityReport,
    pub y: StationarityReport,
}

/// Tests whether `(x, y)` is an `(eps_x, eps_y)` first-order Nash equilibrium.
pub fn fne_check(
    x: &VectorPoint,
    y: &VectorPoint,
    problem: &ProblemSpec,
    eps_x: f64,
    eps_y: f64,
) -> Result<FneVerdict> {
    if !(eps_x >= 0.0 && eps_y >= 0.0) {
        return Err(invalid("tolerances must be nonnegative"));
    }
    let c = problem.constants();
    let f = problem.oracle();
    let gx = f.grad_x(x, y);
    let gy = -f.grad_y(x, y);
    let rx = measures(x, &gx, c.l_xx, problem.x_set())?;
    let ry = measures(y, &gy, c.l_yy, problem.y_set())?;
    Ok(FneVerdict { passed: rx.strong <= eps_x && ry.strong <= eps_y, x: rx, y: ry })
}
