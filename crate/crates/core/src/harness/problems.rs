//! Deterministic test-problem families.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{FeasibleSet, VectorPoint};
use crate::problem::{ProblemConstants, ProblemSpec, SaddleOracle};

/// Family names accepted by [`build_problem`].
pub const FAMILIES: [&str; 4] = ["quad-bilinear", "max-of-quadratics", "scalar-remark54", "strongly-concave-toy"];

/// Size parameters of a family. Unused fields are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemDims {
    /// Dimension of `x`.
    pub d: usize,
    /// Dimension of `y` (number of pieces for max-of-quadratics).
    pub k: usize,
    /// Offset `a` of the scalar instance.
    pub a: f64,
    /// Strong concavity of the toy family.
    pub mu: f64,
}

impl Default for ProblemDims {
    fn default() -> Self {
        Self { d: 5, k: 4, a: 1.0, mu: 1.0 }
    }
}

#[derive(Debug, Clone)]
pub struct KnownSolution {
    pub x: VectorPoint,
    pub y: VectorPoint,
    pub note: &'static str,
}

#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub name: String,
    pub spec: ProblemSpec,
    pub known_solution: Option<KnownSolution>,
    pub seed: u64,
    /// Strong concavity modulus in `y`, when the family has one.
    pub strong_concavity: Option<f64>,
}

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

fn gaussian_vector(n: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

pub(crate) fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    m.singular_values().max()
}

/// Symmetric matrix with eigenvalues drawn uniformly from `[lo, hi]`.
fn symmetric_with_spectrum(n: usize, lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let q = gaussian_matrix(n, n, rng).qr().q();
    let eig = DVector::from_fn(n, |_, _| lo + (hi - lo) * rng.gen::<f64>());
    &q * DMatrix::from_diagonal(&eig) * q.transpose()
}

/// Builds the named family instance; the same `(name, seed, dims)` always gives the same instance.
pub fn build_problem(name: &str, seed: u64, dims: &ProblemDims) -> Result<ProblemInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (spec, known_solution, strong_concavity) = match name {
        "quad-bilinear" => quad_bilinear(dims, &mut rng)?,
        "max-of-quadratics" => max_of_quadratics(dims, &mut rng)?,
        "scalar-remark54" => scalar_remark54(dims)?,
        "strongly-concave-toy" => strongly_concave_toy(dims, &mut rng)?,
        other => {
            return Err(invalid(format!("unknown problem family '{other}'; expected one of {FAMILIES:?}")));
        }
    };
    Ok(ProblemInstance { name: name.to_string(), spec, known_solution, seed, strong_concavity })
}

type Built = (ProblemSpec, Option<KnownSolution>, Option<f64>);

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(invalid(msg))
    }
}

/// `F = x'Qx/2 + y'(Ax - b) - mu |y|^2 / 2`.
pub struct StronglyConcaveToy {
    pub q: DMatrix<f64>,
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub mu: f64,
}

impl SaddleOracle for StronglyConcaveToy {
    fn value(&self, x: &VectorPoint, y: &VectorPoint) -> f64 {
        0.5 * x.dot(&(&self.q * x)) + y.dot(&(&self.a * x - &self.b)) - 0.5 * self.mu * y.norm_squared()
    }
    fn grad_x(&self, x: &VectorPoint, y: &VectorPoint) -> VectorPoint {
        let mut g = &self.q * x;
        g.gemv_tr(1.0, &self.a, y, 1.0);
        g
    }
    fn grad_y(&self, x: &VectorPoint, y: &VectorPoint) -> VectorPoint {
        let mut g = &self.a * x - &self.b;
        g.axpy(-self.mu, y, 1.0);
        g
    }
}

impl StronglyConcaveToy {
    /// Unconstrained saddle point from the normal equations.
    pub fn saddle(&self) -> Option<(VectorPoint, VectorPoint)> {
        let h = &self.q + self.a.transpose() * &self.a / self.mu;
        let rhs = self.a.transpose() * &self.b / self.mu;
        let x = h.cholesky()?.solve(&rhs);
        let y = (&self.a * &x - &self.b) / self.mu;
        Some((x, y))
    }

    /// `max_y F(x, y)` over the whole space.
    pub fn primal_unconstrained(&self, x: &VectorPoint) -> f64 {
        0.5 * x.dot(&(&self.q * x)) + (&self.a * x - &self.b).norm_squared() / (2.0 * self.mu)
    }
}

fn strongly_concave_toy(dims: &ProblemDims, rng: &mut ChaCha8Rng) -> Result<Built> {
    let d = dims.d;
    require(d >= 1, "strongly-concave-toy needs d >= 1")?;
    require(dims.mu > 0.0, "strongly-concave-toy needs mu > 0")?;
    let m = d;
    let q = symmetric_with_spectrum(d, 0.5, 2.0, rng);
    let a = gaussian_matrix(m, d, rng) / (d as f64).sqrt();
    let b = gaussian_vector(m, rng);
    let toy = StronglyConcaveToy { q, a, b, mu: dims.mu };
    let (xs, ys) = toy.saddle().ok_or_else(|| invalid("toy saddle system is singular"))?;
    let r_x = 2.0 * xs.norm() + 1.0;
    let r_y = 2.0 * ys.norm() + 1.0;
    let x0 = VectorPoint::zeros(d);
    let delta = toy.primal_unconstrained(&x0) - toy.value(&xs, &ys);
    let constants = ProblemConstants {
        l_xx: toy.q.symmetric_eigenvalues().max(),
        l_yy: dims.mu,
        l_xy: spectral_norm(&toy.a),
        r_y,
        delta,
    };
    let spec = ProblemSpec::new(
        Arc::new(toy),
        FeasibleSet::ball(VectorPoint::zeros(d), r_x)?,
        FeasibleSet::ball(VectorPoint::zeros(m), r_y)?,
        constants,
        x0,
        VectorPoint::zeros(m),
    )?;
    let known = KnownSolution { x: xs, y: ys, note: "interior saddle from the normal equations" };
    Ok((spec, Some(known), Some(dims.mu)))
}

/// `F = sum_i y_i f_i(x)` with `f_i(x) = x'A_i x/2 + b_i'x + c_i + q_i sum_j x_j^4 / 4`.
pub struct MaxOfQuadratics {
    pub a: Vec<DMatrix<f64>>,
    pub b: Vec<DVector<f64>>,
    pub c: Vec<f64>,
    pub q: Vec<f64>,
}

impl MaxOfQuadratics {
    pub fn piece(&self, i: usize, x: &VectorPoint) -> f64 {
        let quartic: f64 = x.iter().map(|v| v.powi(4)).sum();
        0.5 * x.dot(&(&self.a[i] * x)) + self.b[i].dot(x) + self.c[i] + 0.25 * self.q[i] * quartic
    }

    /// `phi(x) = max_i f_i(x)`.
    pub fn primal(&self, x: &VectorPoint) -> f64 {
        (0..self.a.len()).map(|i| self.piece(i, x)).fold(f64::NEG_INFINITY, f64::max)
    }
}

impl SaddleOracle for MaxOfQuadratics {
    fn value(&self, x: &VectorPoint, y: &VectorPoint) -> f64 {
        (0..self.a.len()).map(|i| y[i] * self.piece(i, x)).sum()
    }
    fn grad_x(&self, x: &VectorPoint, y: &VectorPoint) -> VectorPoint {
        let mut g = VectorPoint::zeros(x.len());
        let mut qw = 0.0;
        for i in 0..self.a.len() {
            g.gemv(y[i], &self.a[i], x, 1.0);
            g.axpy(y[i], &self.b[i], 1.0);
            qw += y[i] * self.q[i];
        }
        for (gj, xj) in g.iter_mut().zip(x.iter()) {
            *gj += qw * xj * xj * xj;
        }
        g
    }
    fn grad_y(&self, x: &VectorPoint, _y: &VectorPoint) -> VectorPoint {
        VectorPoint::from_fn(self.a.len(), |i, _| self.piece(i, x))
    }
}

fn max_of_quadratics(dims: &ProblemDims, rng: &mut ChaCha8Rng) -> Result<Built> {
    let (d, k) = (dims.d, dims.k);
    require(d >= 1 && k >= 2, "max-of-quadratics needs d >= 1 and k >= 2")?;
    let r_x = 1.0;
    let mut pieces = MaxOfQuadratics { a: Vec::new(), b: Vec::new(), c: Vec::new(), q: Vec::new() };
    for _ in 0..k {
        pieces.a.push(symmetric_with_spectrum(d, -0.3, 1.0, rng));
        pieces.b.push(gaussian_vector(d, rng) * (0.5 / (d as f64).sqrt()));
        pieces.c.push(0.1 * rng.sample::<f64, _>(StandardNormal));
        pieces.q.push(0.05);
    }
    let mut l_xx: f64 = 0.0;
    let mut lower = f64::NEG_INFINITY;
    let mut grad_bound_sq = 0.0;
    for i in 0..k {
        let eig = pieces.a[i].symmetric_eigenvalues();
        let a_norm = eig.amax();
        l_xx = l_xx.max(a_norm + 3.0 * pieces.q[i] * r_x * r_x);
        let g = a_norm * r_x + pieces.b[i].norm() + pieces.q[i] * r_x.powi(3);
        grad_bound_sq += g * g;
        let lb = pieces.c[i] + 0.5 * eig.min().min(0.0) * r_x * r_x - pieces.b[i].norm() * r_x;
        lower = lower.max(lb);
    }
    let x0 = VectorPoint::zeros(d);
    let y_set = FeasibleSet::simplex(k, 1.0)?;
    let constants = ProblemConstants {
        l_xx,
        // F is linear in y, so every positive L_yy is valid; unit scale is used.
        l_yy: 1.0,
        l_xy: grad_bound_sq.sqrt(),
        r_y: y_set.radius_bound().unwrap_or(1.0),
        delta: pieces.primal(&x0) - lower,
    };
    let y_bar = y_set.center();
    let spec = ProblemSpec::new(
        Arc::new(pieces),
        FeasibleSet::ball(VectorPoint::zeros(d), r_x)?,
        y_set,
        constants,
        x0,
        y_bar,
    )?;
    Ok((spec, None, None))
}

/// `F = x'Px/2 + c'x + x'By - y'Cy/2` with indefinite `P` and PSD `C`.
pub struct QuadBilinear {
    pub p: DMatrix<f64>,
    pub c: DVector<f64>,
    pub b: DMatrix<f64>,
    pub cy: DMatrix<f64>,
}

impl SaddleOracle for QuadBilinear {
    fn value(&self, x: &VectorPoint, y: &VectorPoint) -> f64 {
        0.5 * x.dot(&(&self.p * x)) + self.c.dot(x) + x.dot(&(&self.b * y)) - 0.5 * y.dot(&(&self.cy * y))
    }
    fn grad_x(&self, x: &VectorPoint, y: &VectorPoint) -> VectorPoint {
        let mut g = &self.p * x + &self.c;
        g.gemv(1.0, &self.b, y, 1.0);
        g
    }
    fn grad_y(&self, x: &VectorPoint, y: &VectorPoint) -> VectorPoint {
        let mut g = self.b.transpose() * x;
        g.gemv(-1.0, &self.cy, y, 1.0);
        g
    }
}

fn quad_bilinear(dims: &ProblemDims, rng: &mut ChaCha8Rng) -> Result<Built> {
    let (d, m) = (dims.d, dims.k);
    require(d >= 1 && m >= 1, "quad-bilinear needs d >= 1 and k >= 1")?;
    let r_x = 2.0;
    let p = symmetric_with_spectrum(d, -0.5, 1.0, rng);
    let c = gaussian_vector(d, rng) * (0.5 / (d as f64).sqrt());
    let b = gaussian_matrix(d, m, rng) / ((d + m) as f64).sqrt();
    let rank = m.div_ceil(2);
    let n = gaussian_matrix(rank, m, rng);
    let cy = n.transpose() * &n / (2.0 * m as f64);
    let eig_p = p.symmetric_eigenvalues();
    let y_set = FeasibleSet::boxed(DVector::from_element(m, -1.0), DVector::from_element(m, 1.0))?;
    let constants = ProblemConstants {
        l_xx: eig_p.amax(),
        l_yy: cy.symmetric_eigenvalues().max().max(1e-3),
        l_xy: spectral_norm(&b),
        r_y: y_set.radius_bound().unwrap_or(1.0),
        // phi(0) = 0 and phi >= F(., 0) >= min over the ball of x'Px/2 + c'x.
        delta: -(0.5 * eig_p.min().min(0.0) * r_x * r_x - c.norm() * r_x),
    };
    let spec = ProblemSpec::new(
        Arc::new(QuadBilinear { p, c, b, cy }),
        FeasibleSet::ball(VectorPoint::zeros(d), r_x)?,
        y_set,
        constants,
        VectorPoint::zeros(d),
        VectorPoint::zeros(m),
    )?;
    Ok((spec, None, None))
}

/// `F = x^2/2 - (y - a)^2 / 2` on `Y = [-1, 0]`.
pub struct ScalarRemark {
    pub a: f64,
}

impl SaddleOracle for ScalarRemark {
    fn value(&self, x: &VectorPoint, y: &VectorPoint) -> f64 {
        0.5 * x[0] * x[0] - 0.5 * (y[0] - self.a).powi(2)
    }
    fn grad_x(&self, x: &VectorPoint, _y: &VectorPoint) -> VectorPoint {
        x.clone()
    }
    fn grad_y(&self, _x: &VectorPoint, y: &VectorPoint) -> VectorPoint {
        DVector::from_element(1, self.a - y[0])
    }
}

fn scalar_remark54(dims: &ProblemDims) -> Result<Built> {
    require(dims.a.is_finite() && dims.a >= 0.0, "scalar-remark54 needs a >= 0")?;
    let y_set = FeasibleSet::boxed(DVector::from_element(1, -1.0), DVector::from_element(1, 0.0))?;
    let x0 = DVector::from_element(1, 1.0);
    let constants = ProblemConstants { l_xx: 1.0, l_yy: 1.0, l_xy: 0.0, r_y: 0.5, delta: 0.5 };
    let spec = ProblemSpec::new(
        Arc::new(ScalarRemark { a: dims.a }),
        FeasibleSet::whole_space(1)?,
        y_set.clone(),
        constants,
        x0,
        y_set.center(),
    )?;
    let known = KnownSolution {
        x: DVector::zeros(1),
        y: DVector::zeros(1),
        note: "x* = 0 and y* = 0 since a >= 0",
    };
    Ok((spec, Some(known), Some(1.0)))
}
