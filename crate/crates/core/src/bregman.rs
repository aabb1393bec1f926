//! Non-Euclidean geometry: distance-generating functions, Bregman prox-mappings and
//! stationarity measures, the Bregman restart FGM, and the Bregman proximal-point loop.

use std::f64::consts::E;

use log::debug;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, invalid, Error, Result};
use crate::fgm::{ceil_count, fgm_loop, InexactOracle};
use crate::geometry::{check_dim, check_finite, FeasibleSet, SetKind, VectorPoint, FEASIBILITY_TOL};
use crate::stationarity::StationarityReport;

/// Universal constant `c` in `Omega[Z_1] <= c log d` for [`lp_dgf`].
///
/// The exact value at dimension `d` is `e C_d / 2`, which increases to `e^2 / 2`.
pub const LP_GROWTH_C: f64 = E * E / 2.0;

/// Relative width at which the multiplier bisections stop.
const BISECTION_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormId {
    L1,
    L2,
    Lp(f64),
}

impl NormId {
    pub fn norm(&self, v: &VectorPoint) -> f64 {
        match *self {
            NormId::L1 => v.lp_norm(1),
            NormId::L2 => v.norm(),
            NormId::Lp(p) => lp_norm(v, p),
        }
    }

    pub fn dual_norm(&self, v: &VectorPoint) -> f64 {
        match *self {
            NormId::L1 => v.amax(),
            NormId::L2 => v.norm(),
            NormId::Lp(p) => lp_norm(v, p / (p - 1.0)),
        }
    }
}

/// `(sum |v_i|^p)^(1/p)`, scaled by the largest entry to avoid overflow for large `p`.
pub fn lp_norm(v: &VectorPoint, p: f64) -> f64 {
    let m = v.amax();
    if m == 0.0 {
        return 0.0;
    }
    m * v.iter().map(|x| (x.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeometryKind {
    /// `omega = |z|_2^2 / 2`.
    Euclidean,
    /// `omega = (coef / 2) |z|_p^2`.
    LpSquared { p: f64, coef: f64 },
    /// Divergence replaced by `|z' - z|_p^2 / 2` (steepest descent in the `l_p` norm).
    NormSquared { p: f64 },
}

/// A distance-generating function together with its norm and the constants the methods need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgfGeometry {
    kind: GeometryKind,
    norm: NormId,
    /// `O~_d(1)` in `Omega[Z_r(0)] <= r^2 O~_d(1)`.
    growth: f64,
    /// Lipschitz constant of `grad omega` in the dual norm, when finite.
    smoothness: Option<f64>,
}

/// `p = 1 + 1/ln d` and `C_d = exp((ln d - 1)/(ln d + 1))`.
pub fn lp_dgf_constants(d: usize) -> Result<(f64, f64)> {
    if d < 3 {
        return Err(invalid(format!("lp d.g.f. needs d >= 3, got {d}")));
    }
    let ld = (d as f64).ln();
    Ok((1.0 + 1.0 / ld, ((ld - 1.0) / (ld + 1.0)).exp()))
}

/// The `|.|_p^2` distance-generating function for the `l_1` norm in dimension `d`.
///
/// The coefficient is `e ln(d) C_d`: with that scale the function is 1-strongly convex
/// with respect to `l_1`, and `Omega[Z_1] = e C_d ln(d) / 2`.
pub fn lp_dgf(d: usize) -> Result<DgfGeometry> {
    let (p, c_d) = lp_dgf_constants(d)?;
    let ld = (d as f64).ln();
    Ok(DgfGeometry {
        kind: GeometryKind::LpSquared { p, coef: E * ld * c_d },
        norm: NormId::L1,
        growth: LP_GROWTH_C * ld,
        smoothness: None,
    })
}

impl DgfGeometry {
    pub fn euclidean() -> Self {
        Self { kind: GeometryKind::Euclidean, norm: NormId::L2, growth: 0.5, smoothness: Some(1.0) }
    }

    /// `|z' - z|_p^2 / 2` in place of a Bregman divergence, `p` in `(1, 2]`.
    pub fn norm_squared(p: f64) -> Result<Self> {
        if !(p > 1.0 && p <= 2.0) {
            return Err(invalid(format!("norm-squared geometry needs p in (1, 2], got {p}")));
        }
        Ok(Self { kind: GeometryKind::NormSquared { p }, norm: NormId::Lp(p), growth: 0.5, smoothness: None })
    }

    pub fn kind(&self) -> GeometryKind {
        self.kind
    }

    pub fn norm_id(&self) -> NormId {
        self.norm
    }

    pub fn growth(&self) -> f64 {
        self.growth
    }

    /// `Omega[Z_r(0)]` bound `growth * r^2`.
    pub fn omega_radius(&self, r: f64) -> f64 {
        self.growth * r * r
    }

    pub fn smoothness_const(&self) -> Option<f64> {
        self.smoothness
    }

    pub fn norm(&self, v: &VectorPoint) -> f64 {
        self.norm.norm(v)
    }

    pub fn dual_norm(&self, v: &VectorPoint) -> f64 {
        self.norm.dual_norm(v)
    }

    fn p_coef(&self) -> (f64, f64) {
        match self.kind {
            GeometryKind::Euclidean => (2.0, 1.0),
            GeometryKind::LpSquared { p, coef } => (p, coef),
            GeometryKind::NormSquared { p } => (p, 1.0),
        }
    }

    pub fn omega(&self, z: &VectorPoint) -> f64 {
        match self.kind {
            GeometryKind::Euclidean => 0.5 * z.norm_squared(),
            _ => {
                let (p, coef) = self.p_coef();
                0.5 * coef * lp_norm(z, p).powi(2)
            }
        }
    }

    /// `coef |z|_p^(2-p) sign(z) |z|^(p-1)`, with the value 0 at the origin.
    pub fn grad_omega(&self, z: &VectorPoint) -> VectorPoint {
        match self.kind {
            GeometryKind::Euclidean => z.clone(),
            _ => {
                let (p, coef) = self.p_coef();
                power_map(z, p, coef)
            }
        }
    }

    /// Fenchel conjugate of `omega` on the whole space: `|s|_q^2 / (2 coef)`.
    pub fn conjugate(&self, s: &VectorPoint) -> f64 {
        match self.kind {
            GeometryKind::Euclidean => 0.5 * s.norm_squared(),
            _ => {
                let (p, coef) = self.p_coef();
                lp_norm(s, p / (p - 1.0)).powi(2) / (2.0 * coef)
            }
        }
    }

    /// Gradient of [`Self::conjugate`], the inverse of `grad omega`.
    pub fn grad_conjugate(&self, s: &VectorPoint) -> VectorPoint {
        match self.kind {
            GeometryKind::Euclidean => s.clone(),
            _ => {
                let (p, coef) = self.p_coef();
                power_map(s, p / (p - 1.0), 1.0 / coef)
            }
        }
    }
}

/// Gradient of `(k/2) |z|_r^2`.
fn power_map(z: &VectorPoint, r: f64, k: f64) -> VectorPoint {
    let n = lp_norm(z, r);
    if n == 0.0 {
        return VectorPoint::zeros(z.len());
    }
    z.map(|x| k * n * x.signum() * (x.abs() / n).powf(r - 1.0))
}

/// `D(z', z)`; for the norm-squared geometry this is `|z' - z|_p^2 / 2`.
pub fn bregman_div(geo: &DgfGeometry, z_prime: &VectorPoint, z: &VectorPoint) -> Result<f64> {
    check_dim(z_prime, z.len())?;
    let d = match geo.kind {
        GeometryKind::Euclidean => 0.5 * (z_prime - z).norm_squared(),
        GeometryKind::NormSquared { p } => 0.5 * lp_norm(&(z_prime - z), p).powi(2),
        GeometryKind::LpSquared { .. } => {
            geo.omega(z_prime) - geo.omega(z) - geo.grad_omega(z).dot(&(z_prime - z))
        }
    };
    Ok(d.max(0.0))
}

/// Composite term `weight * D(., anchor)` added to a prox-mapping.
#[derive(Debug, Clone, Copy)]
pub struct Composite<'a> {
    pub weight: f64,
    pub anchor: &'a VectorPoint,
}

/// `argmin_{z' in set} <zeta, z'> + D(z', z) + weight D(z', anchor)`.
pub fn bregman_prox(
    z: &VectorPoint,
    zeta: &VectorPoint,
    set: &FeasibleSet,
    geo: &DgfGeometry,
    reg: Option<Composite<'_>>,
) -> Result<VectorPoint> {
    check_dim(z, set.dim())?;
    check_dim(zeta, set.dim())?;
    check_finite(zeta, "linear term")?;
    if let Some(r) = &reg {
        check_dim(r.anchor, set.dim())?;
        if !(r.weight >= 0.0 && r.weight.is_finite()) {
            return Err(invalid(format!("composite weight must be finite and nonnegative, got {}", r.weight)));
        }
    }
    prox_unchecked(z, zeta, set, geo, reg)
}

fn prox_unchecked(
    z: &VectorPoint,
    zeta: &VectorPoint,
    set: &FeasibleSet,
    geo: &DgfGeometry,
    reg: Option<Composite<'_>>,
) -> Result<VectorPoint> {
    let c = reg.map_or(0.0, |r| r.weight);
    match geo.kind {
        GeometryKind::Euclidean => {
            let mut out = z - zeta;
            if let Some(r) = reg {
                out.axpy(c, r.anchor, 1.0);
                out /= 1.0 + c;
            }
            set.project_in_place(&mut out);
            Ok(out)
        }
        GeometryKind::NormSquared { p } => {
            if c > 0.0 {
                return Err(Error::Unsupported("norm-squared geometry has no composite prox".into()));
            }
            if !matches!(set.kind(), SetKind::WholeSpace) {
                return Err(Error::Unsupported("norm-squared prox is only available on the whole space".into()));
            }
            Ok(z - power_map(zeta, p / (p - 1.0), 1.0))
        }
        GeometryKind::LpSquared { p, coef } => {
            let mut theta = zeta - geo.grad_omega(z);
            if let Some(r) = reg {
                theta.axpy(-c, &geo.grad_omega(r.anchor), 1.0);
                theta /= 1.0 + c;
            }
            lp_linear_min(&theta, p, coef, set)
        }
    }
}

/// `argmin_{z in set} <theta, z> + (coef/2) |z|_p^2`.
fn lp_linear_min(theta: &VectorPoint, p: f64, coef: f64, set: &FeasibleSet) -> Result<VectorPoint> {
    let solve_at = |s: f64| -> VectorPoint {
        let mu = coef * s.powf(2.0 - p);
        match set.kind() {
            SetKind::Box { lo, hi } => {
                VectorPoint::from_fn(theta.len(), |i, _| coord_min(theta[i], mu, p).clamp(lo[i], hi[i]))
            }
            SetKind::L1Ball { center, radius } => l1_ball_solve(theta, mu, p, center, *radius),
            _ => unreachable!(),
        }
    };
    let upper = match set.kind() {
        SetKind::WholeSpace => {
            let coef_geo = DgfGeometry { kind: GeometryKind::LpSquared { p, coef }, norm: NormId::L1, growth: 0.0, smoothness: None };
            return Ok(coef_geo.grad_conjugate(&(-theta)));
        }
        SetKind::Box { lo, hi } => lp_norm(&lo.zip_map(hi, |a, b| a.abs().max(b.abs())), p),
        SetKind::L1Ball { center, radius } => lp_norm(center, p) + radius,
        _ => {
            return Err(Error::Unsupported(format!(
                "lp prox is available on the whole space, boxes and l1 balls, not {}",
                set.kind().name()
            )))
        }
    };
    // s -> |z(s)|_p - s is decreasing; its root is the norm of the minimizer.
    let (mut lo, mut hi) = (0.0, upper.max(f64::MIN_POSITIVE));
    if lp_norm(&solve_at(hi), p) >= hi {
        return Ok(solve_at(hi));
    }
    while hi - lo > BISECTION_TOL * hi.max(1e-300) {
        let mid = 0.5 * (lo + hi);
        if lp_norm(&solve_at(mid), p) > mid {
            lo = mid;
        } else {
            hi = mid;
        }
        if mid == lo && mid == hi {
            break;
        }
    }
    Ok(solve_at(0.5 * (lo + hi)))
}

/// Minimizer of `a z + (mu/p) |z|^p` over the reals.
fn coord_min(a: f64, mu: f64, p: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let mag = (a.abs() / mu).powf(1.0 / (p - 1.0));
    -a.signum() * if mag.is_finite() { mag } else { f64::MAX }
}

/// Separable solve over `{ |z - c|_1 <= r }` with the multiplier `nu` found by bisection.
fn l1_ball_solve(theta: &VectorPoint, mu: f64, p: f64, center: &VectorPoint, r: f64) -> VectorPoint {
    let at = |nu: f64| -> VectorPoint {
        VectorPoint::from_fn(theta.len(), |i, _| {
            let c = center[i];
            let right = coord_min(theta[i] + nu, mu, p);
            if right > c {
                return right;
            }
            let left = coord_min(theta[i] - nu, mu, p);
            if left < c {
                left
            } else {
                c
            }
        })
    };
    let free = at(0.0);
    if (&free - center).lp_norm(1) <= r {
        return free;
    }
    let mut hi = theta
        .iter()
        .zip(center.iter())
        .map(|(t, c)| (t + mu * c.signum() * c.abs().powf(p - 1.0)).abs())
        .fold(0.0, f64::max);
    let mut lo = 0.0;
    while hi - lo > BISECTION_TOL * hi.max(1e-300) {
        let mid = 0.5 * (lo + hi);
        if (&at(mid) - center).lp_norm(1) > r {
            lo = mid;
        } else {
            hi = mid;
        }
        if mid == lo && mid == hi {
            break;
        }
    }
    at(hi)
}

/// Bregman strong and weak measures. The weak measure is `L |z - z_m|` in the geometry's norm,
/// with `z_m` the mirror step from `z`.
pub fn bregman_measures(
    z: &VectorPoint,
    zeta: &VectorPoint,
    l: f64,
    set: &FeasibleSet,
    geo: &DgfGeometry,
) -> Result<StationarityReport> {
    ensure_positive("L", l)?;
    check_dim(z, set.dim())?;
    check_finite(z, "point")?;
    if set.distance(z)? > FEASIBILITY_TOL {
        return Err(Error::Precondition("point must lie in the feasible set".into()));
    }
    let zm = bregman_prox(z, &(zeta / l), set, geo, None)?;
    let lin = -zeta.dot(&(&zm - z));
    let m = lin - l * bregman_div(geo, &zm, z)?;
    let floor = -1e-12 * lin.abs().max(1.0);
    if m < floor {
        return Err(Error::Internal(format!("bregman strong measure squared is negative ({m})")));
    }
    Ok(StationarityReport { strong: (2.0 * l * m.max(0.0)).sqrt(), weak: l * geo.norm(&(z - &zm)), prox_point: zm })
}

/// `S_{Z,omega}(z, zeta, L) = sqrt(2L max_{z'} [-<zeta, z' - z> - L D(z', z)])`.
pub fn strong_measure_bregman(
    z: &VectorPoint,
    zeta: &VectorPoint,
    l: f64,
    set: &FeasibleSet,
    geo: &DgfGeometry,
) -> Result<f64> {
    Ok(bregman_measures(z, zeta, l, set, geo)?.strong)
}

pub fn weak_measure_bregman(
    z: &VectorPoint,
    zeta: &VectorPoint,
    l: f64,
    set: &FeasibleSet,
    geo: &DgfGeometry,
) -> Result<f64> {
    Ok(bregman_measures(z, zeta, l, set, geo)?.weak)
}

/// Inputs of [`bregman_restart_fgm`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BregmanFgmParams {
    /// Smoothness `L` of `f` in the geometry's norm.
    pub smoothness: f64,
    /// Weight `lambda` of the composite term `lambda D(., z0)`.
    pub lambda: f64,
    pub eps: f64,
    /// Bound `R` on the norm distance from `z0` to the composite minimizer.
    pub radius: f64,
}

/// `T = ceil(sqrt(40 O~ L / lambda))`, `S = ceil(log2(3 L sqrt(Omega) / eps))` with `Omega = O~ R^2`.
pub fn bregman_restart_params(geo: &DgfGeometry, params: &BregmanFgmParams) -> Result<(usize, usize)> {
    ensure_positive("L", params.smoothness)?;
    ensure_positive("lambda", params.lambda)?;
    ensure_positive("eps", params.eps)?;
    ensure_positive("radius", params.radius)?;
    let t = ceil_count((40.0 * geo.growth * params.smoothness / params.lambda).sqrt())?;
    let omega = geo.omega_radius(params.radius);
    let s = ceil_count((3.0 * params.smoothness * omega.sqrt() / params.eps).log2())?;
    Ok((t, s))
}

/// Restarted FGM with Bregman prox-mappings on `f + lambda D(., z0)`.
///
/// The d.g.f. is re-centered once at `z0` and kept for all epochs, so both divergences in each
/// prox-mapping share one potential and the mapping stays in closed form.
pub fn bregman_restart_fgm(
    z0: &VectorPoint,
    set: &FeasibleSet,
    geo: &DgfGeometry,
    params: &BregmanFgmParams,
    oracle: &mut InexactOracle<'_>,
) -> Result<VectorPoint> {
    check_dim(z0, set.dim())?;
    check_finite(z0, "starting point")?;
    if set.distance(z0)? > FEASIBILITY_TOL {
        return Err(Error::Precondition("starting point must lie in the feasible set".into()));
    }
    let (t, s) = bregman_restart_params(geo, params)?;
    debug!("bregman restart fgm: T = {t}, S = {s}");
    let shift_needed = !matches!(geo.kind, GeometryKind::Euclidean);
    let local = if shift_needed { set.translated(&(-z0))? } else { set.clone() };
    let anchor = if shift_needed { VectorPoint::zeros(z0.len()) } else { z0.clone() };
    let lambda = params.lambda;
    let mut prox = |center: &VectorPoint, zeta: &VectorPoint, weight: f64, out: &mut VectorPoint| -> Result<()> {
        let reg = Composite { weight: weight * lambda, anchor: &anchor };
        *out = prox_unchecked(center, zeta, &local, geo, Some(reg))?;
        Ok(())
    };
    let gamma = 1.0 / params.smoothness;
    let mut w = anchor.clone();
    if shift_needed {
        let mut shifted = InexactOracle::fallible(params.smoothness, |w: &VectorPoint| oracle.gradient(&(w + z0)))?;
        for epoch in 0..s {
            w = fgm_loop(&w, gamma, t, &mut shifted, epoch, &mut prox)?;
        }
        let proxes = shifted.counts().proj;
        drop(shifted);
        oracle.note_proxes(proxes);
        Ok(w + z0)
    } else {
        for epoch in 0..s {
            w = fgm_loop(&w, gamma, t, oracle, epoch, &mut prox)?;
        }
        Ok(w)
    }
}

/// One row of the Bregman proximal-point trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BregmanStep {
    pub t: usize,
    /// `S_{X,omega}(x_t, grad phi(x_t), L)`.
    pub strong: f64,
    /// `|x_t - x_{t-1}|` in the geometry's norm.
    pub step: f64,
}

/// Proximal-point iterations `x_t ~ argmin_x' phi(x') + 2L D_t(x', x_{t-1})` with `D_t` the
/// divergence of the d.g.f. re-centered at `x_{t-1}`; each step is solved by
/// [`bregman_restart_fgm`] with `lambda = L`.
///
/// Runs `T = ceil(16 L Delta / eps^2)` steps and returns the iterate with the smallest strong
/// measure together with the trace.
pub fn bregman_prox_point<G>(
    x0: &VectorPoint,
    set: &FeasibleSet,
    geo: &DgfGeometry,
    mut grad_phi: G,
    l: f64,
    delta: f64,
    eps: f64,
) -> Result<(VectorPoint, Vec<BregmanStep>)>
where
    G: FnMut(&VectorPoint) -> VectorPoint,
{
    ensure_positive("L", l)?;
    ensure_positive("Delta", delta)?;
    ensure_positive("eps", eps)?;
    let ell = geo.smoothness_const().ok_or_else(|| {
        Error::Unsupported("the d.g.f. has no finite smoothness constant on this set".into())
    })?;
    check_dim(x0, set.dim())?;
    if set.distance(x0)? > FEASIBILITY_TOL {
        return Err(Error::Precondition("x0 must lie in the feasible set".into()));
    }
    let outer = ceil_count(16.0 * l * delta / (eps * eps))?;
    debug!("bregman prox point: {outer} outer steps");
    let mut x = x0.clone();
    let mut trace = Vec::with_capacity(outer + 1);
    let mut best = (f64::INFINITY, x.clone());
    let mut record = |t: usize, x: &VectorPoint, g: &VectorPoint, step: f64| -> Result<()> {
        let strong = strong_measure_bregman(x, g, l, set, geo)?;
        trace.push(BregmanStep { t, strong, step });
        if strong < best.0 {
            best = (strong, x.clone());
        }
        Ok(())
    };
    let mut g = grad_phi(&x);
    record(0, &x, &g, 0.0)?;
    for t in 1..=outer {
        let radius = 2.0 * geo.dual_norm(&g) / l;
        let next = if radius > 0.0 {
            let center = x.clone();
            let mut oracle = InexactOracle::new(l * (1.0 + ell), |z: &VectorPoint| {
                let mut gz = grad_phi(z);
                gz.axpy(l, &geo.grad_omega(&(z - &center)), 1.0);
                gz
            })?;
            let params = BregmanFgmParams { smoothness: l * (1.0 + ell), lambda: l, eps: 0.5 * eps, radius };
            bregman_restart_fgm(&x, set, geo, &params, &mut oracle)?
        } else {
            x.clone()
        };
        let step = geo.norm(&(&next - &x));
        x = next;
        g = grad_phi(&x);
        record(t, &x, &g, step)?;
    }
    Ok((best.1, trace))
}

/// Steepest descent in `l_p`: `x+ = argmin <grad phi(x), x'> + (L/2) |x' - x|_p^2` on the whole
/// space. Returns the dual gradient norms `|grad phi(x_t)|_q` for `t = 0..=T`.
///
/// Each step decreases `phi` by `|grad phi|_q^2 / (2L)`, so `min_t |grad phi(x_t)|_q <= sqrt(2 L Delta / T)`.
pub fn steepest_descent<G>(
    x0: &VectorPoint,
    p: f64,
    mut grad_phi: G,
    l: f64,
    iterations: usize,
) -> Result<(VectorPoint, Vec<f64>)>
where
    G: FnMut(&VectorPoint) -> VectorPoint,
{
    let geo = DgfGeometry::norm_squared(p)?;
    ensure_positive("L", l)?;
    check_finite(x0, "starting point")?;
    let set = FeasibleSet::whole_space(x0.len())?;
    let mut x = x0.clone();
    let mut norms = Vec::with_capacity(iterations + 1);
    for t in 0..=iterations {
        let g = grad_phi(&x);
        if !g.iter().all(|v| v.is_finite()) {
            return Err(Error::NumericalFailure { iteration: t, epoch: 0, detail: "non-finite gradient".into() });
        }
        norms.push(geo.dual_norm(&g));
        if t < iterations {
            x = prox_unchecked(&x, &(g / l), &set, &geo, None)?;
        }
    }
    Ok((x, norms))
}
