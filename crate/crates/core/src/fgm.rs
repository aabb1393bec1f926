//! Fast Gradient Method with an inexact oracle, its restart scheme, and the
//! proximal-point operator implemented on top of it.

use log::{debug, info};

use crate::error::{ensure_nonnegative, ensure_positive, invalid, Error, Result};
use crate::geometry::{check_dim, check_finite, FeasibleSet, VectorPoint, FEASIBILITY_TOL};
use crate::problem::CallCounts;

type GradFn<'a> = Box<dyn FnMut(&VectorPoint) -> Result<VectorPoint> + 'a>;
type ValueFn<'a> = Box<dyn Fn(&VectorPoint) -> f64 + 'a>;

/// A `delta`-inexact first-order oracle for an `L`-smooth convex function.
///
/// The oracle also tallies the gradient and prox-mapping evaluations made on its behalf.
pub struct InexactOracle<'a> {
    grad: GradFn<'a>,
    value: Option<ValueFn<'a>>,
    delta: f64,
    smoothness: f64,
    counts: CallCounts,
}

impl<'a> InexactOracle<'a> {
    pub fn new(smoothness: f64, mut grad: impl FnMut(&VectorPoint) -> VectorPoint + 'a) -> Result<Self> {
        Self::fallible(smoothness, move |z| Ok(grad(z)))
    }

    /// Oracle whose gradient evaluation may itself fail, e.g. when it runs a nested solver.
    pub fn fallible(
        smoothness: f64,
        grad: impl FnMut(&VectorPoint) -> Result<VectorPoint> + 'a,
    ) -> Result<Self> {
        ensure_positive("smoothness", smoothness)?;
        Ok(Self { grad: Box::new(grad), value: None, delta: 0.0, smoothness, counts: CallCounts::default() })
    }

    pub fn with_delta(mut self, delta: f64) -> Result<Self> {
        ensure_nonnegative("delta", delta)?;
        self.delta = delta;
        Ok(self)
    }

    pub fn with_value(mut self, value: impl Fn(&VectorPoint) -> f64 + 'a) -> Self {
        self.value = Some(Box::new(value));
        self
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn smoothness(&self) -> f64 {
        self.smoothness
    }

    pub fn counts(&self) -> CallCounts {
        self.counts
    }

    pub fn value(&self, z: &VectorPoint) -> Option<f64> {
        self.value.as_ref().map(|f| f(z))
    }

    pub fn gradient(&mut self, z: &VectorPoint) -> Result<VectorPoint> {
        self.counts.grad += 1;
        (self.grad)(z)
    }

    pub(crate) fn note_prox(&mut self) {
        self.counts.proj += 1;
    }

    pub(crate) fn note_proxes(&mut self, n: u64) {
        self.counts.proj += n;
    }
}

/// Inputs of one restart-FGM run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FgmConfig {
    pub gamma: f64,
    pub iterations: usize,
    pub restarts: usize,
}

impl FgmConfig {
    pub fn new(gamma: f64, iterations: usize, restarts: usize) -> Result<Self> {
        ensure_positive("gamma", gamma)?;
        if iterations == 0 || restarts == 0 {
            return Err(invalid("iterations and restarts must be at least 1"));
        }
        Ok(Self { gamma, iterations, restarts })
    }
}

/// Weight `tau_t = 2(t+2) / ((t+1)(t+4))` of iteration `t`.
pub fn tau(t: usize) -> f64 {
    let t = t as f64;
    2.0 * (t + 2.0) / ((t + 1.0) * (t + 4.0))
}

/// Prox step used by the FGM loop: writes into `out` the minimizer of
/// `<zeta, z'> + D(z', center) + weight * r(z')` for the method's composite term `r`.
pub(crate) type ProxStep<'p> = dyn FnMut(&VectorPoint, &VectorPoint, f64, &mut VectorPoint) -> Result<()> + 'p;

/// Shared FGM loop. `weight` passed to `prox` is the accumulated coefficient of the composite term.
pub(crate) fn fgm_loop(
    z0: &VectorPoint,
    gamma: f64,
    iterations: usize,
    oracle: &mut InexactOracle<'_>,
    epoch: usize,
    prox: &mut ProxStep<'_>,
) -> Result<VectorPoint> {
    let n = z0.len();
    let mut g_sum = VectorPoint::zeros(n);
    let mut z = z0.clone();
    let mut u = VectorPoint::zeros(n);
    let mut v = VectorPoint::zeros(n);
    let mut w = VectorPoint::zeros(n);
    let mut scratch = VectorPoint::zeros(n);
    let mut weight_sum = 0.0;
    for t in 0..iterations {
        scratch.copy_from(&g_sum);
        scratch *= gamma;
        prox(z0, &scratch, gamma * weight_sum, &mut u)?;
        oracle.note_prox();

        let tau_t = tau(t);
        v.copy_from(&u);
        v *= tau_t;
        v.axpy(1.0 - tau_t, &z, 1.0);

        let a_t = (t as f64 + 2.0) / 2.0;
        let mut g = oracle.gradient(&v)?;
        if g.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: g.len() });
        }
        if !g.iter().all(|x| x.is_finite()) {
            return Err(Error::NumericalFailure {
                iteration: t,
                epoch,
                detail: "oracle returned a non-finite gradient".into(),
            });
        }
        g *= a_t;

        scratch.copy_from(&g);
        scratch *= gamma;
        prox(&u, &scratch, gamma * a_t, &mut w)?;
        oracle.note_prox();

        z *= 1.0 - tau_t;
        z.axpy(tau_t, &w, 1.0);
        g_sum += &g;
        weight_sum += a_t;
    }
    Ok(z)
}

fn validate_start(z0: &VectorPoint, set: &FeasibleSet, gamma: f64) -> Result<()> {
    ensure_positive("gamma", gamma)?;
    check_dim(z0, set.dim())?;
    check_finite(z0, "starting point")?;
    if set.distance(z0)? > FEASIBILITY_TOL {
        return Err(Error::Precondition("starting point must lie in the feasible set".into()));
    }
    Ok(())
}

fn euclidean_step(set: &FeasibleSet) -> impl FnMut(&VectorPoint, &VectorPoint, f64, &mut VectorPoint) -> Result<()> + '_ {
    move |center, zeta, _, out| {
        out.copy_from(center);
        *out -= zeta;
        set.project_in_place(out);
        Ok(())
    }
}

/// Runs `iterations` steps of the Fast Gradient Method from `z0` and returns `z_T`.
pub fn fgm(
    z0: &VectorPoint,
    set: &FeasibleSet,
    gamma: f64,
    iterations: usize,
    oracle: &mut InexactOracle<'_>,
) -> Result<VectorPoint> {
    validate_start(z0, set, gamma)?;
    fgm_loop(z0, gamma, iterations, oracle, 0, &mut euclidean_step(set))
}

/// `restarts` warm-started FGM runs of `iterations` steps each.
pub fn restart_fgm(
    z0: &VectorPoint,
    set: &FeasibleSet,
    config: FgmConfig,
    oracle: &mut InexactOracle<'_>,
) -> Result<VectorPoint> {
    validate_start(z0, set, config.gamma)?;
    let mut step = euclidean_step(set);
    let mut z = z0.clone();
    for s in 0..config.restarts {
        z = fgm_loop(&z, config.gamma, config.iterations, oracle, s, &mut step)?;
    }
    Ok(z)
}

/// Like [`restart_fgm`] but also returns the iterate after every epoch.
pub fn restart_fgm_epochs(
    z0: &VectorPoint,
    set: &FeasibleSet,
    config: FgmConfig,
    oracle: &mut InexactOracle<'_>,
) -> Result<Vec<VectorPoint>> {
    validate_start(z0, set, config.gamma)?;
    let mut step = euclidean_step(set);
    let mut out = Vec::with_capacity(config.restarts);
    let mut z = z0.clone();
    for s in 0..config.restarts {
        z = fgm_loop(&z, config.gamma, config.iterations, oracle, s, &mut step)?;
        out.push(z.clone());
    }
    Ok(out)
}

pub(crate) fn ceil_count(x: f64) -> Result<usize> {
    if !x.is_finite() {
        return Err(invalid(format!("iteration count is not finite ({x})")));
    }
    if x > 1e15 {
        return Err(invalid(format!("iteration count {x} is too large")));
    }
    Ok((x.ceil() as usize).max(1))
}

/// Restart parameters from an initial distance bound `R`: `T = ceil(sqrt(40 kappa))`,
/// `S = ceil(log2(3 L R / eps))`, both at least 1.
pub fn restart_params_from_radius(kappa: f64, l: f64, r: f64, eps: f64) -> Result<(usize, usize)> {
    validate_kappa(kappa)?;
    ensure_positive("L", l)?;
    ensure_positive("R", r)?;
    ensure_positive("eps", eps)?;
    let t = ceil_count((40.0 * kappa).sqrt())?;
    let s = ceil_count((3.0 * l * r / eps).log2())?;
    Ok((t, s))
}

/// Restart count from an initial gap bound: `S = ceil(log2(18 kappa L gap / eps^2) / 2)`, at least 1.
pub fn restart_params_from_gap(kappa: f64, l: f64, gap: f64, eps: f64) -> Result<usize> {
    validate_kappa(kappa)?;
    ensure_positive("L", l)?;
    ensure_positive("gap", gap)?;
    ensure_positive("eps", eps)?;
    let log2 = (18.0 * kappa * l).log2() + gap.log2() - 2.0 * eps.log2();
    ceil_count(0.5 * log2)
}

fn validate_kappa(kappa: f64) -> Result<()> {
    if kappa.is_finite() && kappa >= 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("condition number must be >= 1, got {kappa}")))
    }
}

/// Iterations per epoch of the proximal-point subsolver (`T > sqrt(40 * 3)`).
pub const PROX_POINT_ITERATIONS: usize = 11;

/// Restart count used by [`prox_point_via_fgm`].
pub fn prox_point_restarts(l: f64, eps: f64, gap_bound: f64) -> Result<usize> {
    ensure_positive("L", l)?;
    ensure_positive("eps", eps)?;
    ensure_positive("gap_bound", gap_bound)?;
    let log2 = (72.0 * l).log2() + gap_bound.log2() - 2.0 * eps.log2();
    ceil_count(0.5 * log2)
}

/// Approximates `argmin_{z in X} phi(z) + L |z - x|^2` by restarted FGM with `T = 11`,
/// `gamma = 1 / (3L)`.
///
/// `gap_bound` must bound `phi(x) - min_z [phi(z) + L |z - x|^2]`.
pub fn prox_point_via_fgm<G>(
    x: &VectorPoint,
    mut grad_phi: G,
    l: f64,
    set: &FeasibleSet,
    eps: f64,
    gap_bound: f64,
) -> Result<VectorPoint>
where
    G: FnMut(&VectorPoint) -> VectorPoint,
{
    let restarts = prox_point_restarts(l, eps, gap_bound)?;
    debug!("prox point: {restarts} restarts for gap bound {gap_bound:.3e}");
    if gap_bound > 1e6 * eps * eps / l {
        info!("prox point: loose gap bound {gap_bound:.3e} costs {restarts} restarts");
    }
    let config = FgmConfig::new(1.0 / (3.0 * l), PROX_POINT_ITERATIONS, restarts)?;
    let mut oracle = InexactOracle::new(3.0 * l, |z: &VectorPoint| {
        let mut g = grad_phi(z);
        g.axpy(2.0 * l, z, 1.0);
        g.axpy(-2.0 * l, x, 1.0);
        g
    })?;
    restart_fgm(x, set, config, &mut oracle)
}
