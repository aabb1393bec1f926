//! Quick invariant suite behind the `check` subcommand.

use nalgebra::{dvector, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bregman::{bregman_div, bregman_measures, lp_dgf, DgfGeometry};
use crate::error::Result;
use crate::fgm::{fgm, prox_point_via_fgm, InexactOracle, PROX_POINT_ITERATIONS};
use crate::geometry::{prox_map, FeasibleSet, VectorPoint};
use crate::harness::finite_diff::finite_diff_check;
use crate::harness::problems::{build_problem, ProblemDims, FAMILIES};
use crate::moreau::constrained_concavity_check;
use crate::saddle::{compute_schedule, fne_search, DualMode, SearchOptions, Termination};
use crate::stationarity::measures;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = fn(&mut ChaCha8Rng) -> Result<(bool, String)>;

const CHECKS: [(&str, Check); 10] = [
    ("geometry/projection", projection_check),
    ("stationarity/weak-below-strong", measure_order_check),
    ("fgm/rate", fgm_rate_check),
    ("fgm/prox-point", prox_point_check),
    ("saddle/schedule", schedule_check),
    ("saddle/scalar-solve", scalar_solve_check),
    ("moreau/remark-family", remark_check),
    ("bregman/strong-convexity", bregman_convexity_check),
    ("bregman/euclidean-reduction", euclidean_reduction_check),
    ("harness/oracle-gradients", oracle_gradient_check),
];

/// Runs every check with a fixed seed. Errors count as failures.
pub fn run_checks() -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    CHECKS
        .iter()
        .map(|(name, check)| match check(&mut rng) {
            Ok((passed, detail)) => CheckResult { name, passed, detail },
            Err(e) => CheckResult { name, passed: false, detail: format!("error: {e}") },
        })
        .collect()
}

fn sample_sets(d: usize) -> Result<Vec<FeasibleSet>> {
    Ok(vec![
        FeasibleSet::whole_space(d)?,
        FeasibleSet::boxed(VectorPoint::from_element(d, -1.0), VectorPoint::from_element(d, 0.5))?,
        FeasibleSet::ball(VectorPoint::from_element(d, 0.3), 1.2)?,
        FeasibleSet::simplex(d, 2.0)?,
        FeasibleSet::l1_ball(VectorPoint::zeros(d), 1.0)?,
    ])
}

fn projection_check(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for set in sample_sets(4)? {
        for _ in 0..200 {
            let a = VectorPoint::from_fn(4, |_, _| rng.gen_range(-3.0..3.0));
            let b = VectorPoint::from_fn(4, |_, _| rng.gen_range(-3.0..3.0));
            let pa = set.project(&a)?;
            let pb = set.project(&b)?;
            worst = worst.max((set.project(&pa)? - &pa).amax());
            worst = worst.max(((&pa - &pb).norm() - (&a - &b).norm()).max(0.0));
        }
    }
    Ok((worst <= 1e-12, format!("idempotence and contraction defect {worst:.2e}")))
}

fn measure_order_check(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut violations = 0;
    for set in sample_sets(3)? {
        for _ in 0..500 {
            let z = set.sample(rng);
            let zeta = VectorPoint::from_fn(3, |_, _| rng.gen_range(-5.0..5.0));
            let m = measures(&z, &zeta, rng.gen_range(0.1..10.0), &set)?;
            if m.weak > m.strong * (1.0 + 1e-12) + 1e-12 {
                violations += 1;
            }
        }
    }
    Ok((violations == 0, format!("{violations} violations of W <= S in 2500 draws")))
}

fn fgm_rate_check(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let d = 20;
    let g = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
    let a = &g * g.transpose();
    let b = VectorPoint::from_fn(d, |_, _| rng.gen_range(-1.0..1.0));
    let l = a.symmetric_eigenvalues().max();
    let Some(z_star) = a.clone().cholesky().map(|c| c.solve(&b)) else {
        return Ok((false, "reference solve failed".into()));
    };
    let f = |z: &VectorPoint| 0.5 * z.dot(&(&a * z)) - b.dot(z);
    let z0 = VectorPoint::zeros(d);
    let r = z_star.norm();
    let set = FeasibleSet::whole_space(d)?;
    let t = 50;
    let mut oracle = InexactOracle::new(l, |z: &VectorPoint| &a * z - &b)?;
    let zt = fgm(&z0, &set, 1.0 / l, t, &mut oracle)?;
    let gap = f(&zt) - f(&z_star);
    let bound = 4.0 * l * r * r / (t * t) as f64;
    Ok((gap <= bound, format!("gap {gap:.3e} vs bound {bound:.3e}")))
}

fn prox_point_check(_: &mut ChaCha8Rng) -> Result<(bool, String)> {
    // phi(x) = x^4/4 - x^2/2 is 1-weakly convex on [-2, 2] with L = 11.
    let l = 11.0;
    let set = FeasibleSet::boxed(dvector![-2.0], dvector![2.0])?;
    let x = dvector![0.3];
    let grad = |z: &VectorPoint| dvector![z[0].powi(3) - z[0]];
    let eps = 1e-6;
    let xp = prox_point_via_fgm(&x, grad, l, &set, eps, 10.0)?;
    let sub_grad = grad(&xp) + (&xp - &x) * (2.0 * l);
    let s = measures(&xp, &sub_grad, 3.0 * l, &set)?.strong;
    Ok((s <= eps, format!("subproblem strong measure {s:.3e} after T = {PROX_POINT_ITERATIONS} epochs")))
}

fn schedule_check(_: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut ok = true;
    for name in FAMILIES {
        let inst = build_problem(name, 1, &ProblemDims::default())?;
        let s = compute_schedule(&inst.spec, 0.1, 0.1, DualMode::Concave)?;
        ok &= s.t_o == 11 && s.budget.grad >= s.budget.nominal && s.budget.grad.is_finite();
    }
    Ok((ok, "T_o = 11 and finite budgets for every family".into()))
}

fn scalar_solve_check(_: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let inst = build_problem("scalar-remark54", 0, &ProblemDims::default())?;
    let options = SearchOptions { termination: Termination::Adaptive, ..SearchOptions::default() };
    let out = fne_search(&inst.spec, 0.05, 0.05, &options)?;
    let max_sy = out.trace.rows.iter().map(|r| r.s_y).fold(0.0, f64::max);
    Ok((out.trace.verdict && max_sy <= 0.25, format!("verdict {} max S_y {max_sy:.3e}", out.trace.verdict)))
}

fn remark_check(_: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let set = FeasibleSet::boxed(dvector![-1.0], dvector![0.0])?;
    let mut worst: f64 = 0.0;
    for a in [0.5, 2.0, 7.0] {
        for eps in [0.1, 0.4] {
            let (lhs, rhs) = constrained_concavity_check(
                |v: &VectorPoint| -0.5 * (v[0] - a).powi(2),
                |v: &VectorPoint| dvector![a - v[0]],
                &dvector![-eps],
                &dvector![0.0],
                1.0,
                &set,
            )?;
            worst = worst.max((lhs - (0.5 * eps * eps + a * eps)).abs());
            worst = worst.max((rhs - (eps * eps + a * eps)).abs());
        }
    }
    Ok((worst <= 1e-12, format!("max deviation {worst:.2e}")))
}

fn bregman_convexity_check(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let d = 10;
    let geo = lp_dgf(d)?;
    let mut worst = f64::INFINITY;
    for _ in 0..1000 {
        let a = VectorPoint::from_fn(d, |_, _| rng.gen_range(-1.0..1.0)) / d as f64;
        let b = VectorPoint::from_fn(d, |_, _| rng.gen_range(-1.0..1.0)) / d as f64;
        let n = (&a - &b).lp_norm(1);
        worst = worst.min(bregman_div(&geo, &a, &b)? / (0.5 * n * n));
    }
    Ok((worst >= 1.0 - 1e-9, format!("min D / (|.|_1^2 / 2) = {worst:.4}")))
}

fn euclidean_reduction_check(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let geo = DgfGeometry::euclidean();
    let mut worst: f64 = 0.0;
    for set in sample_sets(3)? {
        for _ in 0..100 {
            let z = set.sample(rng);
            let zeta = VectorPoint::from_fn(3, |_, _| rng.gen_range(-2.0..2.0));
            let e = measures(&z, &zeta, 2.0, &set)?;
            let b = bregman_measures(&z, &zeta, 2.0, &set, &geo)?;
            worst = worst.max((e.strong - b.strong).abs()).max((e.weak - b.weak).abs());
            worst = worst.max((prox_map(&z, &(&zeta / 2.0), &set)? - &b.prox_point).amax());
        }
    }
    Ok((worst <= 1e-12, format!("max deviation {worst:.2e}")))
}

fn oracle_gradient_check(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for name in FAMILIES {
        let inst = build_problem(name, 2, &ProblemDims::default())?;
        let spec = &inst.spec;
        let f = spec.oracle();
        for _ in 0..5 {
            let x = spec.x_set().sample(rng);
            let y = spec.y_set().sample(rng);
            let rx = finite_diff_check(|v| f.value(v, &y), |v| f.grad_x(v, &y), std::slice::from_ref(&x), 1e-5)?;
            let ry = finite_diff_check(|v| f.value(&x, v), |v| f.grad_y(&x, v), std::slice::from_ref(&y), 1e-5)?;
            worst = worst.max(rx.max_rel_error).max(ry.max_rel_error);
        }
    }
    Ok((worst <= 1e-6, format!("worst relative error {worst:.2e}")))
}
