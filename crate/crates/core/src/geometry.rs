//! Feasible sets and Euclidean projections.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{ensure_nonnegative, invalid, Error, Result};

/// Points and gradients share one representation.
pub type VectorPoint = DVector<f64>;

/// Tolerance used to decide set membership of solver iterates.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Shape of a closed convex set with a cheap projection.
#[derive(Debug, Clone, PartialEq)]
pub enum SetKind {
    WholeSpace,
    Box { lo: VectorPoint, hi: VectorPoint },
    Ball { center: VectorPoint, radius: f64 },
    /// `{z >= 0, sum(z) = scale}`.
    Simplex { scale: f64 },
    L1Ball { center: VectorPoint, radius: f64 },
}

impl SetKind {
    pub fn name(&self) -> &'static str {
        match self {
            SetKind::WholeSpace => "whole-space",
            SetKind::Box { .. } => "box",
            SetKind::Ball { .. } => "ball",
            SetKind::Simplex { .. } => "simplex",
            SetKind::L1Ball { .. } => "l1-ball",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleSet {
    dim: usize,
    kind: SetKind,
}

pub(crate) fn check_finite(z: &VectorPoint, what: &str) -> Result<()> {
    if z.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(invalid(format!("{what} has non-finite entries")))
    }
}

pub(crate) fn check_dim(z: &VectorPoint, dim: usize) -> Result<()> {
    if z.len() == dim {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: dim, got: z.len() })
    }
}

impl FeasibleSet {
    pub fn whole_space(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be positive"));
        }
        Ok(Self { dim, kind: SetKind::WholeSpace })
    }

    pub fn boxed(lo: VectorPoint, hi: VectorPoint) -> Result<Self> {
        if lo.is_empty() {
            return Err(invalid("dimension must be positive"));
        }
        check_dim(&hi, lo.len())?;
        check_finite(&lo, "box lower bound")?;
        check_finite(&hi, "box upper bound")?;
        if lo.iter().zip(hi.iter()).any(|(l, h)| l > h) {
            return Err(invalid("box requires lo <= hi componentwise"));
        }
        Ok(Self { dim: lo.len(), kind: SetKind::Box { lo, hi } })
    }

    pub fn ball(center: VectorPoint, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(invalid("dimension must be positive"));
        }
        check_finite(&center, "ball center")?;
        ensure_nonnegative("ball radius", radius)?;
        Ok(Self { dim: center.len(), kind: SetKind::Ball { center, radius } })
    }

    pub fn simplex(dim: usize, scale: f64) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be positive"));
        }
        ensure_nonnegative("simplex scale", scale)?;
        Ok(Self { dim, kind: SetKind::Simplex { scale } })
    }

    pub fn l1_ball(center: VectorPoint, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(invalid("dimension must be positive"));
        }
        check_finite(&center, "l1-ball center")?;
        ensure_nonnegative("l1-ball radius", radius)?;
        Ok(Self { dim: center.len(), kind: SetKind::L1Ball { center, radius } })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &SetKind {
        &self.kind
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self.kind, SetKind::WholeSpace)
    }

    /// Euclidean projection. Fails on wrong dimension or non-finite input.
    pub fn project(&self, z: &VectorPoint) -> Result<VectorPoint> {
        check_dim(z, self.dim)?;
        check_finite(z, "point to project")?;
        let mut out = z.clone();
        self.project_in_place(&mut out);
        Ok(out)
    }

    /// Projection without argument checks, for hot loops that validated upstream.
    pub fn project_in_place(&self, z: &mut VectorPoint) {
        match &self.kind {
            SetKind::WholeSpace => {}
            SetKind::Box { lo, hi } => {
                for i in 0..self.dim {
                    z[i] = z[i].max(lo[i]).min(hi[i]);
                }
            }
            SetKind::Ball { center, radius } => {
                let mut norm2 = 0.0;
                for i in 0..self.dim {
                    let d = z[i] - center[i];
                    norm2 += d * d;
                }
                let norm = norm2.sqrt();
                if norm > *radius {
                    let scale = radius / norm;
                    for i in 0..self.dim {
                        z[i] = center[i] + (z[i] - center[i]) * scale;
                    }
                }
            }
            SetKind::Simplex { scale } => project_simplex(z.as_mut_slice(), *scale),
            SetKind::L1Ball { center, radius } => {
                let mut w: Vec<f64> = (0..self.dim).map(|i| z[i] - center[i]).collect();
                if w.iter().map(|v| v.abs()).sum::<f64>() <= *radius {
                    return;
                }
                project_l1(&mut w, *radius);
                for i in 0..self.dim {
                    z[i] = center[i] + w[i];
                }
            }
        }
    }

    /// Euclidean distance from `z` to the set.
    pub fn distance(&self, z: &VectorPoint) -> Result<f64> {
        let p = self.project(z)?;
        Ok((z - p).norm())
    }

    pub fn contains(&self, z: &VectorPoint, tol: f64) -> Result<bool> {
        Ok(self.distance(z)? <= tol)
    }

    /// Natural center used as the default anchor of a bounded set.
    pub fn center(&self) -> VectorPoint {
        match &self.kind {
            SetKind::WholeSpace => VectorPoint::zeros(self.dim),
            SetKind::Box { lo, hi } => (lo + hi) * 0.5,
            SetKind::Ball { center, .. } | SetKind::L1Ball { center, .. } => center.clone(),
            SetKind::Simplex { scale } => VectorPoint::from_element(self.dim, scale / self.dim as f64),
        }
    }

    /// Radius of a Euclidean ball around [`Self::center`] containing the set.
    pub fn radius_bound(&self) -> Option<f64> {
        match &self.kind {
            SetKind::WholeSpace => None,
            SetKind::Box { lo, hi } => Some((hi - lo).norm() * 0.5),
            SetKind::Ball { radius, .. } | SetKind::L1Ball { radius, .. } => Some(*radius),
            SetKind::Simplex { scale } => {
                let d = self.dim as f64;
                Some(scale * ((d - 1.0) / d).sqrt())
            }
        }
    }

    /// The same set shifted by `offset`. The simplex is anchored at the origin and cannot move.
    pub fn translated(&self, offset: &VectorPoint) -> Result<Self> {
        check_dim(offset, self.dim)?;
        check_finite(offset, "offset")?;
        let kind = match &self.kind {
            SetKind::WholeSpace => SetKind::WholeSpace,
            SetKind::Box { lo, hi } => SetKind::Box { lo: lo + offset, hi: hi + offset },
            SetKind::Ball { center, radius } => SetKind::Ball { center: center + offset, radius: *radius },
            SetKind::L1Ball { center, radius } => {
                SetKind::L1Ball { center: center + offset, radius: *radius }
            }
            SetKind::Simplex { .. } => {
                return Err(Error::Unsupported("translating a simplex".into()));
            }
        };
        Ok(Self { dim: self.dim, kind })
    }

    /// Draws a point of the set. Whole space draws a standard Gaussian.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> VectorPoint {
        let d = self.dim;
        match &self.kind {
            SetKind::WholeSpace => gaussian(d, rng),
            SetKind::Box { lo, hi } => {
                VectorPoint::from_fn(d, |i, _| lo[i] + (hi[i] - lo[i]) * rng.gen::<f64>())
            }
            SetKind::Ball { center, radius } => {
                let g = gaussian(d, rng);
                let n = g.norm().max(f64::MIN_POSITIVE);
                let r = radius * rng.gen::<f64>().powf(1.0 / d as f64);
                center + g * (r / n)
            }
            SetKind::Simplex { scale } => dirichlet(d, rng) * *scale,
            SetKind::L1Ball { center, radius } => {
                let r = radius * rng.gen::<f64>().powf(1.0 / d as f64);
                let w = dirichlet(d, rng);
                center
                    + VectorPoint::from_fn(d, |i, _| {
                        let s = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                        s * r * w[i]
                    })
            }
        }
    }
}

fn gaussian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> VectorPoint {
    VectorPoint::from_fn(d, |_, _| StandardNormal.sample(rng))
}

fn dirichlet<R: Rng + ?Sized>(d: usize, rng: &mut R) -> VectorPoint {
    let e = VectorPoint::from_fn(d, |_, _| -(1.0 - rng.gen::<f64>()).ln());
    let s = e.sum();
    e / s
}

/// Sort-based projection onto `{z >= 0, sum(z) = scale}`.
pub(crate) fn project_simplex(z: &mut [f64], scale: f64) {
    if scale <= 0.0 {
        z.iter_mut().for_each(|v| *v = 0.0);
        return;
    }
    let mut u = z.to_vec();
    u.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cum += uj;
        let t = (cum - scale) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    z.iter_mut().for_each(|v| *v = (*v - theta).max(0.0));
}

/// Projection onto the centered l1 ball of the given radius.
pub(crate) fn project_l1(w: &mut [f64], radius: f64) {
    let l1: f64 = w.iter().map(|v| v.abs()).sum();
    if l1 <= radius {
        return;
    }
    let mut a: Vec<f64> = w.iter().map(|v| v.abs()).collect();
    project_simplex(&mut a, radius);
    for (wi, ai) in w.iter_mut().zip(a) {
        *wi = wi.signum() * ai;
    }
}

/// Euclidean prox-mapping `argmin_{z' in Z} <zeta, z'> + ||z' - z||^2 / 2`.
pub fn prox_map(z: &VectorPoint, zeta: &VectorPoint, set: &FeasibleSet) -> Result<VectorPoint> {
    check_dim(z, set.dim())?;
    check_dim(zeta, set.dim())?;
    check_finite(z, "prox center")?;
    check_finite(zeta, "prox direction")?;
    let mut out = z - zeta;
    set.project_in_place(&mut out);
    Ok(out)
}
