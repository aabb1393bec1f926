//! Central-difference gradient checks.

use crate::error::{ensure_positive, invalid, Result};
use crate::geometry::{check_dim, VectorPoint};

/// Worst coordinate of a finite-difference comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdReport {
    /// `|g_i - fd_i| / max(1, |g_i|, |fd_i|)`, maximized over points and coordinates.
    pub max_rel_error: f64,
    pub point: usize,
    pub coord: usize,
}

/// Compares `grad` with central differences of `value` at every point.
pub fn finite_diff_check<V, G>(value: V, grad: G, points: &[VectorPoint], h: f64) -> Result<FdReport>
where
    V: Fn(&VectorPoint) -> f64,
    G: Fn(&VectorPoint) -> VectorPoint,
{
    ensure_positive("h", h)?;
    if points.is_empty() {
        return Err(invalid("finite-difference check needs at least one point"));
    }
    let mut worst = FdReport { max_rel_error: 0.0, point: 0, coord: 0 };
    for (k, x) in points.iter().enumerate() {
        let g = grad(x);
        check_dim(&g, x.len())?;
        let mut probe = x.clone();
        for i in 0..x.len() {
            probe[i] = x[i] + h;
            let up = value(&probe);
            probe[i] = x[i] - h;
            let down = value(&probe);
            probe[i] = x[i];
            let fd = (up - down) / (2.0 * h);
            let err = (g[i] - fd).abs() / 1f64.max(g[i].abs()).max(fd.abs());
            if !(err <= worst.max_rel_error) {
                worst = FdReport { max_rel_error: err, point: k, coord: i };
            }
        }
    }
    Ok(worst)
}
