//! FNE search: the parameter schedule, the regularized dual oracle and the outer loop.

use log::{debug, info, warn};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, invalid, Error, Result};
use crate::fgm::{ceil_count, restart_fgm, FgmConfig, InexactOracle, PROX_POINT_ITERATIONS};
use crate::geometry::{check_dim, VectorPoint, FEASIBILITY_TOL};
use crate::problem::{CallCounts, ProblemSpec};
use crate::stationarity::measures;

/// How the dual side is made strongly concave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum DualMode {
    /// Add `-(eps_y / (2 R_y)) |y - y_bar|^2`.
    Concave,
    /// `F` is already `lambda_y`-strongly concave in `y`; no regularizer is added.
    StronglyConcave { lambda_y: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    /// Run all outer iterations and select the output afterwards.
    Fixed,
    /// Stop at the first outer iteration with `S_X <= 2 eps_x`.
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selection {
    /// Smallest `|x_t - x_{t-1}|`.
    Step,
    /// Smallest `|grad_x F(x_t, y_t)|`.
    GradNorm,
}

/// Optional increases of the scheduled counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleOverrides {
    pub tbar_x: Option<usize>,
    pub tbar_y: Option<usize>,
    pub s_y: Option<usize>,
    pub s_o: Option<usize>,
}

/// Default hard cap on scheduled gradient calls.
pub const DEFAULT_BUDGET_CAP: f64 = 1e9;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOptions {
    pub mode: DualMode,
    pub termination: Termination,
    pub selection: Selection,
    pub budget_cap: f64,
    pub overrides: ScheduleOverrides,
    /// Keep every `(x_t, y_t)` in the outcome.
    pub record_iterates: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            mode: DualMode::Concave,
            termination: Termination::Fixed,
            selection: Selection::Step,
            budget_cap: DEFAULT_BUDGET_CAP,
            overrides: ScheduleOverrides::default(),
            record_iterates: false,
        }
    }
}

/// Upper bounds on the oracle work of a whole run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Budget {
    /// `ceil(T_o S_o S_y Tbar_x Tbar_y)`, the leading term of the call count.
    pub nominal: f64,
    /// Exact bound on gradient evaluations, counting every partial gradient.
    pub grad: f64,
    pub proj: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverSchedule {
    pub eps_x: f64,
    pub eps_y: f64,
    pub lambda_y: f64,
    /// Weight of the explicit dual regularizer (`lambda_y` or 0).
    pub reg_weight: f64,
    pub theta: f64,
    pub theta_plus: f64,
    pub delta: f64,
    /// Set when the coupling term of `delta` vanished and was dropped.
    pub coupling_term_dropped: bool,
    pub gamma_x: f64,
    pub gamma_y: f64,
    pub tbar_x: usize,
    pub tbar_y: usize,
    pub s_y: usize,
    pub t_o: usize,
    pub s_o: usize,
    pub budget: Budget,
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// Parameter schedule for the given tolerances.
pub fn compute_schedule(spec: &ProblemSpec, eps_x: f64, eps_y: f64, mode: DualMode) -> Result<SolverSchedule> {
    ensure_positive("eps_x", eps_x)?;
    ensure_positive("eps_y", eps_y)?;
    let c = spec.constants();
    let r = c.r_y;
    let lp = spec.l_yy_plus();
    let (lambda_y, reg_weight) = match mode {
        DualMode::Concave => (eps_y / r, eps_y / r),
        DualMode::StronglyConcave { lambda_y } => {
            ensure_positive("lambda_y", lambda_y)?;
            (lambda_y, 0.0)
        }
    };
    let theta = c.l_yy * r * r;
    let theta_plus = lp * r * r;

    let tbar_x = ceil_count(10.0 * c.l_xx * (c.delta + 2.0 * eps_y * r) / (eps_x * eps_x))?;
    let tbar_y = ceil_count((40.0 * (lp + lambda_y) / lambda_y).sqrt())?;
    let (tx, ty) = (tbar_x as f64, tbar_y as f64);

    let d1 = 8.0 * eps_y * r;
    let d2 = theta / (2.0 * ty.powi(3));
    let d3 = (c.delta * (theta_plus - theta) / (tx * ty * ty)).sqrt();
    let coupling_term_dropped = !(d3 > 0.0);
    let delta = if coupling_term_dropped {
        warn!("coupling term of delta vanishes (L_xy = 0 or Delta = 0); dropping it from the min");
        d1.min(d2)
    } else {
        d1.min(d2).min(d3)
    };

    let s_y = ceil_count(2.0 * ty.max(theta_plus / delta).log2())?;
    let ln_a = (3.0 * c.delta + 2.0 * theta + 6.0 * eps_y * r).ln();
    let ln_b = log_sum_exp(&[
        (c.l_xx / (eps_x * eps_x)).ln(),
        (2.0 * theta_plus).ln() - 2.0 * delta.ln(),
        -(12.0 * delta).ln(),
    ]);
    let s_o = ceil_count(0.5 * (72f64.ln() + ln_a + ln_b) / std::f64::consts::LN_2)?;

    let mut sched = SolverSchedule {
        eps_x,
        eps_y,
        lambda_y,
        reg_weight,
        theta,
        theta_plus,
        delta,
        coupling_term_dropped,
        gamma_x: 1.0 / (2.0 * c.l_xx),
        gamma_y: 1.0 / (lp + lambda_y),
        tbar_x,
        tbar_y,
        s_y,
        t_o: PROX_POINT_ITERATIONS,
        s_o,
        budget: Budget { nominal: 0.0, grad: 0.0, proj: 0.0 },
    };
    if !(sched.delta > 0.0 && sched.delta.is_finite() && sched.gamma_y.is_finite()) {
        return Err(invalid("schedule is not finite"));
    }
    sched.budget = budget_of(&sched, spec);
    Ok(sched)
}

fn y_is_point(spec: &ProblemSpec) -> bool {
    spec.y_set().radius_bound() == Some(0.0)
}

/// Per-outer-iteration call counts: dual calls, x-solves and the diagnostics.
fn per_outer(sched: &SolverSchedule, spec: &ProblemSpec) -> (f64, f64) {
    let inner = (sched.t_o * sched.s_o) as f64;
    let dual_calls = if y_is_point(spec) { 0.0 } else { (sched.s_y * sched.tbar_y) as f64 };
    let grad = dual_calls * (inner + 1.0) + inner + 2.0;
    let proj = dual_calls * (2.0 * inner + 2.0) + 2.0 * inner + 4.0;
    (grad, proj)
}

fn budget_of(sched: &SolverSchedule, spec: &ProblemSpec) -> Budget {
    let (g, p) = per_outer(sched, spec);
    let tx = sched.tbar_x as f64;
    Budget {
        nominal: ((sched.t_o * sched.s_o * sched.s_y) as f64 * tx * sched.tbar_y as f64).ceil(),
        grad: tx * g,
        proj: tx * p,
    }
}

/// Schedule with overrides applied and the budget cap enforced.
pub fn plan(spec: &ProblemSpec, eps_x: f64, eps_y: f64, options: &SearchOptions) -> Result<SolverSchedule> {
    let mut sched = compute_schedule(spec, eps_x, eps_y, options.mode)?;
    let o = &options.overrides;
    let bump = |name: &str, current: &mut usize, value: Option<usize>| -> Result<()> {
        if let Some(v) = value {
            if v < *current {
                return Err(invalid(format!("override {name} = {v} is below the scheduled {current}")));
            }
            *current = v;
        }
        Ok(())
    };
    bump("tbar_x", &mut sched.tbar_x, o.tbar_x)?;
    bump("tbar_y", &mut sched.tbar_y, o.tbar_y)?;
    bump("s_y", &mut sched.s_y, o.s_y)?;
    bump("s_o", &mut sched.s_o, o.s_o)?;
    sched.budget = budget_of(&sched, spec);
    info!(
        "schedule: Tbar_x={} Tbar_y={} S_y={} T_o={} S_o={} delta={:.3e}; budget {:.3e} (nominal {:.3e})",
        sched.tbar_x, sched.tbar_y, sched.s_y, sched.t_o, sched.s_o, sched.delta, sched.budget.grad, sched.budget.nominal
    );
    if !(options.budget_cap > 0.0) {
        return Err(invalid("budget cap must be positive"));
    }
    if sched.budget.grad > options.budget_cap {
        return Err(Error::BudgetTooLarge { budget: sched.budget.grad, cap: options.budget_cap });
    }
    Ok(sched)
}

/// `T_x = L_xx Delta / eps_x^2` and `T_y = sqrt(L_yy^+ R_y / eps_y)`.
pub fn complexity_factors(spec: &ProblemSpec, eps_x: f64, eps_y: f64) -> Result<(f64, f64)> {
    ensure_positive("eps_x", eps_x)?;
    ensure_positive("eps_y", eps_y)?;
    let c = spec.constants();
    Ok((c.l_xx * c.delta / (eps_x * eps_x), (spec.l_yy_plus() * c.r_y / eps_y).sqrt()))
}

/// `F(x, y) - (w / 2) |y - y_bar|^2` with `w` the schedule's regularizer weight.
pub fn reg_value(spec: &ProblemSpec, sched: &SolverSchedule, x: &VectorPoint, y: &VectorPoint) -> f64 {
    spec.oracle().value(x, y) - 0.5 * sched.reg_weight * (y - spec.y_bar()).norm_squared()
}

/// `F^reg(x, y) + L_xx |x - x_prev|^2`.
pub fn prox_reg_value(
    spec: &ProblemSpec,
    sched: &SolverSchedule,
    x: &VectorPoint,
    y: &VectorPoint,
    x_prev: &VectorPoint,
) -> f64 {
    reg_value(spec, sched, x, y) + spec.constants().l_xx * (x - x_prev).norm_squared()
}

/// Approximate minimizer of `F(., y) + L_xx |. - x_prev|^2` over `X`.
pub fn reg_primal(
    y: &VectorPoint,
    x_prev: &VectorPoint,
    spec: &ProblemSpec,
    sched: &SolverSchedule,
    counts: &mut CallCounts,
) -> Result<VectorPoint> {
    reg_primal_with(y, x_prev, spec, sched.gamma_x, sched.t_o, sched.s_o, counts)
}

pub(crate) fn reg_primal_with(
    y: &VectorPoint,
    x_prev: &VectorPoint,
    spec: &ProblemSpec,
    gamma_x: f64,
    iterations: usize,
    restarts: usize,
    counts: &mut CallCounts,
) -> Result<VectorPoint> {
    let f = spec.oracle();
    let inv = 1.0 / gamma_x;
    let mut oracle = InexactOracle::new(1.5 * inv, |z: &VectorPoint| {
        let mut g = f.grad_x(z, y);
        g.axpy(inv, z, 1.0);
        g.axpy(-inv, x_prev, 1.0);
        g
    })?;
    let config = FgmConfig::new(2.0 * gamma_x / 3.0, iterations, restarts)?;
    let out = restart_fgm(x_prev, spec.x_set(), config, &mut oracle);
    counts.add(oracle.counts());
    out
}

/// Returns `x~(y)` and the inexact dual gradient `grad_y F(x~, y) - w (y - y_bar)`.
pub fn solve_reg_dual(
    y: &VectorPoint,
    x_prev: &VectorPoint,
    spec: &ProblemSpec,
    sched: &SolverSchedule,
    counts: &mut CallCounts,
) -> Result<(VectorPoint, VectorPoint)> {
    let x_tilde = reg_primal(y, x_prev, spec, sched, counts)?;
    let mut g = spec.oracle().grad_y(&x_tilde, y);
    counts.grad += 1;
    if sched.reg_weight > 0.0 {
        g.axpy(-sched.reg_weight, y, 1.0);
        g.axpy(sched.reg_weight, spec.y_bar(), 1.0);
    }
    Ok((x_tilde, g))
}

/// Inexact dual value `F^reg_t(x~, y) + delta / 4` paired with [`solve_reg_dual`].
pub fn dual_value_estimate(
    x_tilde: &VectorPoint,
    y: &VectorPoint,
    x_prev: &VectorPoint,
    spec: &ProblemSpec,
    sched: &SolverSchedule,
) -> f64 {
    prox_reg_value(spec, sched, x_tilde, y, x_prev) + 0.25 * sched.delta
}

/// Maximizes the regularized dual `psi_t` over `Y` for the given proximal center.
pub(crate) fn dual_ascent(
    x_prev: &VectorPoint,
    spec: &ProblemSpec,
    sched: &SolverSchedule,
    counts: &mut CallCounts,
) -> Result<VectorPoint> {
    if y_is_point(spec) {
        return spec.y_set().project(spec.y_bar());
    }
    let config = FgmConfig::new(sched.gamma_y, sched.tbar_y, sched.s_y)?;
    let mut inner = CallCounts::default();
    let smooth = 1.0 / sched.gamma_y;
    let (y, dual_proj) = {
        let mut oracle = InexactOracle::fallible(smooth, |y: &VectorPoint| {
            let (_, g) = solve_reg_dual(y, x_prev, spec, sched, &mut inner)?;
            Ok(-g)
        })?
        .with_delta(sched.delta)?;
        let y = restart_fgm(spec.y_bar(), spec.y_set(), config, &mut oracle)?;
        (y, oracle.counts().proj)
    };
    counts.add(inner);
    counts.proj += dual_proj;
    Ok(y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    /// Fixed mode ran every scheduled outer iteration.
    Completed,
    /// Adaptive mode met its stopping criterion.
    Converged,
    /// Adaptive mode ran out of outer iterations; `Delta` was probably too small.
    BudgetExceeded,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub outer_t: usize,
    pub step_norm: f64,
    #[serde(rename = "S_x")]
    pub s_x: f64,
    #[serde(rename = "S_y")]
    pub s_y: f64,
    #[serde(rename = "W_x")]
    pub w_x: f64,
    #[serde(rename = "W_y")]
    pub w_y: f64,
    pub grad_calls_cum: u64,
    pub proj_calls_cum: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveTrace {
    pub rows: Vec<TraceRow>,
    /// 1-based index of the returned iterate.
    pub tau: usize,
    pub status: SolveStatus,
    /// Whether the returned pair satisfies the `(2 eps_x, 5 eps_y)` target.
    pub verdict: bool,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub x: VectorPoint,
    pub y: VectorPoint,
    pub trace: SolveTrace,
    pub schedule: SolverSchedule,
    pub counts: CallCounts,
    /// `(x_t, y_t)` for `t = 1..`, when requested.
    pub iterates: Vec<(VectorPoint, VectorPoint)>,
}

fn selection_key(selection: Selection, row: &TraceRow, grad_norm: f64) -> f64 {
    match selection {
        Selection::Step => row.step_norm,
        Selection::GradNorm => grad_norm,
    }
}

/// Searches for a `(2 eps_x, 5 eps_y)` first-order Nash equilibrium.
pub fn fne_search(spec: &ProblemSpec, eps_x: f64, eps_y: f64, options: &SearchOptions) -> Result<SearchOutcome> {
    let sched = plan(spec, eps_x, eps_y, options)?;
    search_with_schedule(spec, sched, options)
}

/// Runs the outer loop with a precomputed schedule.
pub fn search_with_schedule(
    spec: &ProblemSpec,
    sched: SolverSchedule,
    options: &SearchOptions,
) -> Result<SearchOutcome> {
    let c = *spec.constants();
    let f = spec.oracle();
    let (per_grad, per_proj) = per_outer(&sched, spec);
    let mut counts = CallCounts::default();
    let mut rows = Vec::new();
    let mut iterates = Vec::new();
    let mut best: Option<(f64, usize, VectorPoint, VectorPoint)> = None;
    let mut closest: Option<(f64, usize, VectorPoint, VectorPoint)> = None;
    let mut status = SolveStatus::Completed;
    let mut x_prev = spec.x0().clone();

    for t in 1..=sched.tbar_x {
        let y_t = dual_ascent(&x_prev, spec, &sched, &mut counts)?;
        let x_t = reg_primal(&y_t, &x_prev, spec, &sched, &mut counts)?;

        let gx = f.grad_x(&x_t, &y_t);
        let gy = -f.grad_y(&x_t, &y_t);
        counts.grad += 2;
        let rx = measures(&x_t, &gx, c.l_xx, spec.x_set())?;
        let ry = measures(&y_t, &gy, c.l_yy, spec.y_set())?;
        counts.proj += 4;
        if counts.grad as f64 > per_grad * t as f64 || counts.proj as f64 > per_proj * t as f64 {
            return Err(Error::Internal(format!("oracle calls {counts:?} exceed the budget at t = {t}")));
        }

        let row = TraceRow {
            outer_t: t,
            step_norm: (&x_t - &x_prev).norm(),
            s_x: rx.strong,
            s_y: ry.strong,
            w_x: rx.weak,
            w_y: ry.weak,
            grad_calls_cum: counts.grad,
            proj_calls_cum: counts.proj,
        };
        debug!(
            "t={t} step={:.3e} S_x={:.3e} S_y={:.3e} grad_calls={}",
            row.step_norm, row.s_x, row.s_y, row.grad_calls_cum
        );
        let key = selection_key(options.selection, &row, gx.norm());
        if best.as_ref().is_none_or(|b| key < b.0) {
            best = Some((key, t, x_t.clone(), y_t.clone()));
        }
        if closest.as_ref().is_none_or(|b| row.s_x < b.0) {
            closest = Some((row.s_x, t, x_t.clone(), y_t.clone()));
        }
        rows.push(row);
        if options.record_iterates {
            iterates.push((x_t.clone(), y_t.clone()));
        }
        if options.termination == Termination::Adaptive && row.s_x <= 2.0 * sched.eps_x {
            status = SolveStatus::Converged;
            best = Some((key, t, x_t, y_t));
            break;
        }
        x_prev = x_t;
    }

    if options.termination == Termination::Adaptive && status != SolveStatus::Converged {
        warn!("adaptive criterion not met within {} outer iterations", sched.tbar_x);
        status = SolveStatus::BudgetExceeded;
        best = closest;
    }
    let (_, tau, x, y) = best.ok_or_else(|| Error::Internal("no outer iteration ran".into()))?;
    let chosen = &rows[tau - 1];
    let verdict = chosen.s_x <= 2.0 * sched.eps_x && chosen.s_y <= 5.0 * sched.eps_y;
    info!("search finished: status {status:?}, tau {tau}, verdict {verdict}, {} gradient calls", counts.grad);
    Ok(SearchOutcome {
        x,
        y,
        trace: SolveTrace { rows, tau, status, verdict },
        schedule: sched,
        counts,
        iterates,
    })
}

/// Approximates `argmin_{x'} max_y [F(x', y) - (w/2)|y - y_bar|^2] + L_xx |x' - x|^2` and the
/// maximizing `y`, to distance `tol` in `x'`.
///
/// With `w = 0` the dual must already be strongly concave with modulus `modulus`.
pub(crate) fn prox_saddle(
    x: &VectorPoint,
    spec: &ProblemSpec,
    reg_weight: f64,
    modulus: f64,
    tol: f64,
) -> Result<(VectorPoint, VectorPoint)> {
    check_dim(x, spec.x_set().dim())?;
    if spec.x_set().distance(x)? > FEASIBILITY_TOL {
        return Err(Error::Precondition("x must lie in X".into()));
    }
    ensure_positive("tol", tol)?;
    ensure_positive("modulus", modulus)?;
    let c = spec.constants();
    let lp = spec.l_yy_plus() + reg_weight;
    // y within r of the dual maximizer moves x~(y) by at most (L_xy / L_xx) r.
    let r_target = if c.l_xy > 0.0 { 0.25 * tol * c.l_xx / c.l_xy } else { 2.0 * c.r_y };
    let (t_y, s_y) = crate::fgm::restart_params_from_radius(lp / modulus, lp, 2.0 * c.r_y, 3.0 * lp * r_target)?;
    let gamma_x = 1.0 / (2.0 * c.l_xx);
    let primal = |y: &VectorPoint, counts: &mut CallCounts| -> Result<VectorPoint> {
        // Gap of the L_xx-strongly convex subproblem at x is at most |grad|^2 / (2 L_xx).
        let g = spec.oracle().grad_x(x, y);
        let gap = (g.norm_squared() / (2.0 * c.l_xx)).max(f64::MIN_POSITIVE);
        let s = crate::fgm::prox_point_restarts(c.l_xx, 1.5 * c.l_xx * tol, gap)?;
        reg_primal_with(y, x, spec, gamma_x, PROX_POINT_ITERATIONS, s, counts)
    };
    let mut counts = CallCounts::default();
    let y = if y_is_point(spec) {
        spec.y_bar().clone()
    } else {
        let mut oracle = InexactOracle::fallible(lp, |y: &VectorPoint| {
            let xt = primal(y, &mut counts)?;
            let mut g = spec.oracle().grad_y(&xt, y);
            if reg_weight > 0.0 {
                g.axpy(-reg_weight, y, 1.0);
                g.axpy(reg_weight, spec.y_bar(), 1.0);
            }
            Ok(-g)
        })?;
        let config = FgmConfig::new(1.0 / lp, t_y, s_y)?;
        restart_fgm(spec.y_bar(), spec.y_set(), config, &mut oracle)?
    };
    let x_plus = primal(&y, &mut counts)?;
    debug!("prox saddle used {} gradient calls", counts.grad);
    Ok((x_plus, y))
}
