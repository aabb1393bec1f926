//! Moreau-envelope diagnostics and the constrained-concavity inequality.

use log::debug;

use crate::error::{ensure_positive, Error, Result};
use crate::fgm::{ceil_count, fgm, prox_point_restarts, InexactOracle, PROX_POINT_ITERATIONS};
use crate::geometry::{check_dim, FeasibleSet, VectorPoint, FEASIBILITY_TOL};
use crate::problem::{CallCounts, ProblemSpec};
use crate::saddle::{prox_saddle, reg_primal_with, DualMode};
use crate::stationarity::measures;

#[derive(Debug, Clone, PartialEq)]
pub struct MoreauReport {
    /// Approximate minimizer of `phi(x') + L_xx |x' - x|^2`.
    pub x_plus: VectorPoint,
    /// `2 L_xx |x - x_plus|`.
    pub grad_norm: f64,
    /// Bound on the distance from `x_plus` to the exact minimizer.
    pub inner_accuracy: f64,
    /// Resulting error bar on `grad_norm`.
    pub grad_norm_error: f64,
}

/// Envelope gradient `2 L_xx (x - x+)` of `phi_{2 L_xx}` at `x`, with `phi = max_Y F(., y)`.
///
/// `x+` is recovered from the dual `psi(y) = min_x' F(x', y) + L_xx |x' - x|^2`. Strong convexity
/// of the inner problem gives `|x~(y) - x+|^2 <= (2 / L_xx) (max psi - psi(y))`, so in concave mode a
/// single FGM run on `psi` with a small enough gap suffices. In strongly concave mode the dual is
/// solved by the restart scheme.
pub fn moreau_gradient(x: &VectorPoint, spec: &ProblemSpec, inner_tol: f64, mode: DualMode) -> Result<MoreauReport> {
    ensure_positive("inner_tol", inner_tol)?;
    check_dim(x, spec.x_set().dim())?;
    if spec.x_set().distance(x)? > FEASIBILITY_TOL {
        return Err(Error::Precondition("x must lie in X".into()));
    }
    let c = spec.constants();
    let solved = match mode {
        DualMode::Concave => dual_gap_prox(x, spec, inner_tol),
        DualMode::StronglyConcave { lambda_y } => {
            ensure_positive("lambda_y", lambda_y)?;
            prox_saddle(x, spec, 0.0, lambda_y, inner_tol).map(|(x_plus, _)| x_plus)
        }
    };
    let x_plus = solved.map_err(|e| match e {
        Error::NumericalFailure { iteration, epoch, detail } => Error::NumericalFailure {
            iteration,
            epoch,
            detail: format!("moreau envelope inner solve: {detail}"),
        },
        other => other,
    })?;
    let two_l = 2.0 * c.l_xx;
    Ok(MoreauReport {
        grad_norm: two_l * (x - &x_plus).norm(),
        x_plus,
        inner_accuracy: inner_tol,
        grad_norm_error: two_l * inner_tol,
    })
}

/// `x+` to within `tol` by FGM on the unsmoothed dual, with inner primal solves accurate enough
/// that the accumulated oracle error stays below half the target gap.
fn dual_gap_prox(x: &VectorPoint, spec: &ProblemSpec, tol: f64) -> Result<VectorPoint> {
    let c = spec.constants();
    let mu = c.l_xx;
    let l_psi = spec.l_yy_plus();
    let mut counts = CallCounts::default();
    let primal = |y: &VectorPoint, eta: f64, counts: &mut CallCounts| -> Result<VectorPoint> {
        let g = spec.oracle().grad_x(x, y);
        let gap = (g.norm_squared() / (2.0 * mu)).max(f64::MIN_POSITIVE);
        // Restarted FGM on the 3L-smooth subproblem lands within eps / (9L) of its minimizer.
        let s = prox_point_restarts(mu, 9.0 * mu * eta, gap)?;
        reg_primal_with(y, x, spec, 1.0 / (2.0 * mu), PROX_POINT_ITERATIONS, s, counts)
    };
    let single_point = spec.y_set().radius_bound() == Some(0.0);
    if single_point {
        return primal(spec.y_bar(), 0.5 * tol, &mut counts);
    }
    let target_gap = mu * tol * tol / 8.0;
    let t = ceil_count(8.0 * c.r_y * (l_psi / mu).sqrt() / tol)?;
    let eta = if c.l_xy > 0.0 { (target_gap / (8.0 * t as f64 * c.r_y * c.l_xy)).min(0.5 * tol) } else { 0.5 * tol };
    debug!("moreau dual solve: T = {t}, inner accuracy {eta:.3e}");
    let y = {
        let mut oracle = InexactOracle::fallible(l_psi, |y: &VectorPoint| {
            let xt = primal(y, eta, &mut counts)?;
            Ok(-spec.oracle().grad_y(&xt, y))
        })?;
        fgm(spec.y_bar(), spec.y_set(), 1.0 / l_psi, t, &mut oracle)?
    };
    let x_plus = primal(&y, eta, &mut counts)?;
    debug!("moreau dual solve used {} gradient calls", counts.grad);
    Ok(x_plus)
}

/// `(|g|, S_X(x, g, 2L), W_X(x, g, 2L))` for the envelope gradient `g = 2L (x - x+)`.
pub fn envelope_measures(x: &VectorPoint, report: &MoreauReport, spec: &ProblemSpec) -> Result<(f64, f64, f64)> {
    let two_l = 2.0 * spec.constants().l_xx;
    let g = (x - &report.x_plus) * two_l;
    let r = measures(x, &g, two_l, spec.x_set())?;
    Ok((g.norm(), r.strong, r.weak))
}

/// Both sides of `h(y') - h(y) <= <zeta, y' - y> + (S^2 - W^2) / (2L)` for concave `h`,
/// where `zeta = L (Proj(y + grad h(y) / L) - y)` and the measures use `-grad h(y)`.
pub fn constrained_concavity_check<V, G>(
    h: V,
    grad_h: G,
    y: &VectorPoint,
    y_prime: &VectorPoint,
    l: f64,
    set: &FeasibleSet,
) -> Result<(f64, f64)>
where
    V: Fn(&VectorPoint) -> f64,
    G: Fn(&VectorPoint) -> VectorPoint,
{
    check_dim(y_prime, set.dim())?;
    if set.distance(y_prime)? > FEASIBILITY_TOL {
        return Err(Error::Precondition("y' must lie in the feasible set".into()));
    }
    let g = grad_h(y);
    let r = measures(y, &(-&g), l, set)?;
    let zeta = (&r.prox_point - y) * l;
    let lhs = h(y_prime) - h(y);
    let rhs = zeta.dot(&(y_prime - y)) + (r.strong * r.strong - r.weak * r.weak) / (2.0 * l);
    Ok((lhs, rhs))
}

/// Dual tolerance `min(eps_x^2 / (L_xx R_y), eps_x sqrt(L_yy / L_xx))` that makes an FNE
/// near-stationary for the Moreau envelope.
pub fn epsilon_y_for_moreau(eps_x: f64, spec: &ProblemSpec) -> Result<f64> {
    ensure_positive("eps_x", eps_x)?;
    let c = spec.constants();
    Ok((eps_x * eps_x / (c.l_xx * c.r_y)).min(eps_x * (c.l_yy / c.l_xx).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    #[test]
    fn remark_instance_sides() {
        let (a, eps) = (1.0, 0.5);
        let set = FeasibleSet::boxed(dvector![-1.0], dvector![0.0]).unwrap();
        let (lhs, rhs) = constrained_concavity_check(
            |y: &VectorPoint| -0.5 * (y[0] - a).powi(2),
            |y: &VectorPoint| dvector![a - y[0]],
            &dvector![-eps],
            &dvector![0.0],
            1.0,
            &set,
        )
        .unwrap();
        assert!((lhs - 0.625).abs() < 1e-15);
        assert!((rhs - 0.75).abs() < 1e-15);
    }
}
