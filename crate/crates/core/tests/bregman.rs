use minmax_fne::bregman::{
    bregman_div, bregman_measures, bregman_prox, bregman_prox_point, bregman_restart_fgm, lp_dgf, lp_norm,
    steepest_descent, strong_measure_bregman, BregmanFgmParams, Composite, DgfGeometry, LP_GROWTH_C,
};
use minmax_fne::fgm::InexactOracle;
use minmax_fne::stationarity::measures;
use minmax_fne::{Error, FeasibleSet, VectorPoint};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn unit_l1_sample(rng: &mut ChaCha8Rng, d: usize) -> VectorPoint {
    let raw = VectorPoint::from_fn(d, |_, _| {
        let u: f64 = rng.gen_range(-1.0..1.0);
        u * u * u
    });
    let n = raw.lp_norm(1);
    raw * (rng.gen_range(0.0..1.0) / n.max(1e-300))
}

fn objective_gradient(geo: &DgfGeometry, zeta: &VectorPoint, z: &VectorPoint, zp: &VectorPoint) -> VectorPoint {
    zeta + geo.grad_omega(zp) - geo.grad_omega(z)
}

#[test]
fn strong_convexity_in_l1() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for d in [3, 10, 100] {
        let geo = lp_dgf(d).unwrap();
        let mut worst = f64::INFINITY;
        for _ in 0..10_000 {
            let a = unit_l1_sample(&mut rng, d);
            let b = unit_l1_sample(&mut rng, d);
            let gap = (&a - &b).lp_norm(1);
            if gap < 1e-6 {
                continue;
            }
            worst = worst.min(bregman_div(&geo, &a, &b).unwrap() / (0.5 * gap * gap));
        }
        assert!(worst >= 1.0 - 1e-9, "d = {d}: ratio {worst}");
    }
}

#[test]
fn growth_constant_is_uniform_in_dimension() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for d in [10, 100, 1000] {
        let geo = lp_dgf(d).unwrap();
        let r = 2.5;
        let mut sup = 0.0f64;
        let mut e1 = VectorPoint::zeros(d);
        e1[0] = r;
        sup = sup.max(geo.omega(&e1));
        for _ in 0..2_000 {
            sup = sup.max(geo.omega(&(unit_l1_sample(&mut rng, d) * r)));
        }
        let ratio = sup / ((d as f64).ln() * r * r);
        assert!(ratio <= LP_GROWTH_C, "d = {d}: {ratio}");
        assert!(ratio > 0.5 * LP_GROWTH_C, "d = {d}: vertex attains a constant fraction, {ratio}");
        assert!((geo.omega_radius(r) - LP_GROWTH_C * (d as f64).ln() * r * r).abs() < 1e-9);
    }
}

#[test]
fn dual_gradient_bound_on_unit_l1_ball() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for d in [10, 1000] {
        let geo = lp_dgf(d).unwrap();
        let coef = match geo.kind() {
            minmax_fne::bregman::GeometryKind::LpSquared { coef, .. } => coef,
            _ => unreachable!(),
        };
        let bound = (2.0 * coef * LP_GROWTH_C * (d as f64).ln()).sqrt();
        for _ in 0..10_000 {
            let z = unit_l1_sample(&mut rng, d);
            assert!(geo.grad_omega(&z).amax() <= bound);
        }
    }
}

#[test]
fn unconstrained_lp_prox_first_order_condition() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let d = 12;
    let geo = lp_dgf(d).unwrap();
    let set = FeasibleSet::whole_space(d).unwrap();
    for _ in 0..200 {
        let z = unit_l1_sample(&mut rng, d) * 3.0;
        let zeta = VectorPoint::from_fn(d, |_, _| rng.gen_range(-2.0..2.0));
        let zp = bregman_prox(&z, &zeta, &set, &geo, None).unwrap();
        let residual = geo.grad_omega(&zp) - (geo.grad_omega(&z) - &zeta);
        assert!(residual.amax() < 1e-10, "{}", residual.amax());
    }
}

#[test]
fn l1_ball_prox_satisfies_variational_inequality_at_vertices() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let d = 8;
    let geo = lp_dgf(d).unwrap();
    for _ in 0..100 {
        let center = VectorPoint::from_fn(d, |_, _| rng.gen_range(-0.3..0.3));
        let radius = rng.gen_range(0.2..1.5);
        let set = FeasibleSet::l1_ball(center.clone(), radius).unwrap();
        let z = &center + unit_l1_sample(&mut rng, d) * radius;
        let zeta = VectorPoint::from_fn(d, |_, _| rng.gen_range(-3.0..3.0));
        let anchor = &center + unit_l1_sample(&mut rng, d) * radius;
        let weight = rng.gen_range(0.0..2.0);
        let zp = bregman_prox(&z, &zeta, &set, &geo, Some(Composite { weight, anchor: &anchor })).unwrap();
        assert!((&zp - &center).lp_norm(1) <= radius * (1.0 + 1e-9));
        let grad = objective_gradient(&geo, &zeta, &z, &zp)
            + (geo.grad_omega(&zp) - geo.grad_omega(&anchor)) * weight;
        let scale = grad.amax().max(1.0);
        for i in 0..d {
            for sign in [-1.0, 1.0] {
                let mut v = center.clone();
                v[i] += sign * radius;
                assert!(grad.dot(&(&v - &zp)) >= -1e-7 * scale, "vertex {i}{sign}");
            }
        }
    }
}

#[test]
fn box_prox_matches_coordinate_kkt() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let d = 6;
    let geo = lp_dgf(d).unwrap();
    for _ in 0..100 {
        let lo = VectorPoint::from_fn(d, |_, _| rng.gen_range(-1.0..0.1));
        let hi = &lo + VectorPoint::from_fn(d, |_, _| rng.gen_range(0.05..1.0));
        let set = FeasibleSet::boxed(lo.clone(), hi.clone()).unwrap();
        let z = set.sample(&mut rng);
        let zeta = VectorPoint::from_fn(d, |_, _| rng.gen_range(-2.0..2.0));
        let zp = bregman_prox(&z, &zeta, &set, &geo, None).unwrap();
        let g = objective_gradient(&geo, &zeta, &z, &zp);
        let scale = g.amax().max(1.0);
        for i in 0..d {
            let ok = if (zp[i] - lo[i]).abs() < 1e-12 {
                g[i] >= -1e-7 * scale
            } else if (zp[i] - hi[i]).abs() < 1e-12 {
                g[i] <= 1e-7 * scale
            } else {
                g[i].abs() <= 1e-7 * scale
            };
            assert!(ok, "coordinate {i}: z = {}, g = {}", zp[i], g[i]);
        }
    }
}

#[test]
fn unsupported_pairs_are_rejected() {
    let geo = lp_dgf(3).unwrap();
    let simplex = FeasibleSet::simplex(3, 1.0).unwrap();
    let z = VectorPoint::from_element(3, 1.0 / 3.0);
    let zeta = VectorPoint::from_element(3, 0.1);
    assert!(matches!(bregman_prox(&z, &zeta, &simplex, &geo, None), Err(Error::Unsupported(_))));
    let steep = DgfGeometry::norm_squared(1.5).unwrap();
    let boxed = FeasibleSet::boxed(VectorPoint::zeros(3), VectorPoint::from_element(3, 1.0)).unwrap();
    assert!(matches!(bregman_prox(&z, &zeta, &boxed, &steep, None), Err(Error::Unsupported(_))));
    let grad = |x: &VectorPoint| x.clone();
    let whole = FeasibleSet::whole_space(3).unwrap();
    assert!(matches!(
        bregman_prox_point(&z, &whole, &geo, grad, 1.0, 1.0, 0.1),
        Err(Error::Unsupported(_))
    ));
}

#[test]
fn unconstrained_strong_measure_equals_conjugate_divergence() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let d = 10;
    let geo = lp_dgf(d).unwrap();
    let set = FeasibleSet::whole_space(d).unwrap();
    for _ in 0..200 {
        let z = unit_l1_sample(&mut rng, d) * 2.0;
        let zeta = VectorPoint::from_fn(d, |_, _| rng.gen_range(-1.0..1.0));
        let l = rng.gen_range(0.5..5.0);
        let s = strong_measure_bregman(&z, &zeta, l, &set, &geo).unwrap();
        let a = geo.grad_omega(&z) - &zeta / l;
        let b = geo.grad_omega(&z);
        let dstar = geo.conjugate(&a) - geo.conjugate(&b) - geo.grad_conjugate(&b).dot(&(&a - &b));
        let expected = (2.0 * l * l * dstar).sqrt();
        assert!((s - expected).abs() <= 1e-8 * expected.max(1.0), "{s} vs {expected}");
    }
}

#[test]
fn euclidean_geometry_reduces_to_projections() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let geo = DgfGeometry::euclidean();
    let d = 5;
    let sets = [
        FeasibleSet::whole_space(d).unwrap(),
        FeasibleSet::ball(VectorPoint::from_element(d, 0.2), 1.0).unwrap(),
        FeasibleSet::simplex(d, 1.0).unwrap(),
        FeasibleSet::boxed(VectorPoint::from_element(d, -1.0), VectorPoint::from_element(d, 0.5)).unwrap(),
    ];
    for set in &sets {
        for _ in 0..50 {
            let z = set.sample(&mut rng);
            let zp = set.sample(&mut rng);
            let zeta = VectorPoint::from_fn(d, |_, _| rng.gen_range(-2.0..2.0));
            let l = rng.gen_range(0.3..4.0);
            let bp = bregman_prox(&z, &zeta, set, &geo, None).unwrap();
            let ep = minmax_fne::prox_map(&z, &zeta, set).unwrap();
            assert!((&bp - &ep).amax() <= 1e-12);
            let div = bregman_div(&geo, &zp, &z).unwrap();
            assert!((div - 0.5 * (&zp - &z).norm_squared()).abs() <= 1e-12);
            let b = bregman_measures(&z, &zeta, l, set, &geo).unwrap();
            let e = measures(&z, &zeta, l, set).unwrap();
            assert!((b.strong - e.strong).abs() <= 1e-12 * e.strong.max(1.0));
            assert!((b.weak - e.weak).abs() <= 1e-12 * e.weak.max(1.0));
        }
    }
}

fn random_quadratic(rng: &mut ChaCha8Rng, d: usize) -> (DMatrix<f64>, VectorPoint) {
    let g = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
    let a = &g * g.transpose() / d as f64 + DMatrix::identity(d, d) * 0.05;
    let b = VectorPoint::from_fn(d, |_, _| rng.gen_range(-1.0..1.0));
    (a, b)
}

/// Largest `x^T A y` over `|x|_1, |y|_1 <= 1`: the largest absolute entry.
fn l1_smoothness(a: &DMatrix<f64>) -> f64 {
    a.amax()
}

#[test]
fn l1_restart_fgm_matches_long_run_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let d = 20;
    let geo = lp_dgf(d).unwrap();
    let set = FeasibleSet::whole_space(d).unwrap();
    let (a, b) = random_quadratic(&mut rng, d);
    let l = l1_smoothness(&a);
    let lambda = 0.1 * l;
    let z0 = VectorPoint::zeros(d);
    let grad_f = |z: &VectorPoint| &a * z - &b;

    // Long-run reference, accepted only if it solves A z - b + lambda grad omega(z) = 0.
    let mut oracle = InexactOracle::new(l, grad_f).unwrap();
    let long = BregmanFgmParams { smoothness: l, lambda, eps: 1e-9, radius: 50.0 };
    let reference = bregman_restart_fgm(&z0, &set, &geo, &long, &mut oracle).unwrap();
    let fixed_point = &a * &reference - &b + geo.grad_omega(&reference) * lambda;
    assert!(fixed_point.amax() < 1e-6, "reference residual {}", fixed_point.amax());

    let eps = 1e-3;
    let radius = 2.0 * b.amax() / lambda;
    let params = BregmanFgmParams { smoothness: l, lambda, eps, radius };
    let mut oracle = InexactOracle::new(l, grad_f).unwrap();
    let zs = bregman_restart_fgm(&z0, &set, &geo, &params, &mut oracle).unwrap();
    assert!((&zs - &reference).lp_norm(1) <= eps / (3.0 * l), "distance {}", (&zs - &reference).lp_norm(1));
    let grad_reg = grad_f(&zs) + geo.grad_omega(&zs) * lambda;
    assert!(grad_reg.amax() <= eps, "{}", grad_reg.amax());
    let s = strong_measure_bregman(&zs, &grad_reg, l + lambda, &set, &geo).unwrap();
    assert!(s <= eps / 3.0 * ((l + lambda) / l).sqrt());
    assert!(oracle.counts().proj > 0);
}

#[test]
fn euclidean_restart_fgm_reaches_regularized_minimizer() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let d = 10;
    let (a, b) = random_quadratic(&mut rng, d);
    let l = a.symmetric_eigenvalues().max();
    let lambda = 0.2;
    let z0 = VectorPoint::from_element(d, 0.1);
    let set = FeasibleSet::ball(VectorPoint::zeros(d), 3.0).unwrap();
    let geo = DgfGeometry::euclidean();
    let eps = 1e-6;
    let params = BregmanFgmParams { smoothness: l, lambda, eps, radius: 6.0 };
    let mut oracle = InexactOracle::new(l, |z: &VectorPoint| &a * z - &b).unwrap();
    let zs = bregman_restart_fgm(&z0, &set, &geo, &params, &mut oracle).unwrap();

    // Projected gradient on the lambda-regularized objective as the twin solver.
    let lr = l + lambda;
    let mut z = z0.clone();
    for _ in 0..200_000 {
        let g = &a * &z - &b + (&z - &z0) * lambda;
        z = set.project(&(&z - g / lr)).unwrap();
    }
    assert!((&zs - &z).norm() <= eps / (3.0 * l), "{}", (&zs - &z).norm());
}

#[test]
fn euclidean_prox_point_meets_rate() {
    // phi(x) = sum cos(x_i) + 0.05 |x|^2 is smooth with L = 1.1 and bounded below.
    let d = 4;
    let l = 1.1;
    let grad = |x: &VectorPoint| x.map(|v| -v.sin()) + x * 0.1;
    let phi = |x: &VectorPoint| x.iter().map(|v| v.cos()).sum::<f64>() + 0.05 * x.norm_squared();
    let x0 = VectorPoint::from_fn(d, |i, _| 0.3 + 0.2 * i as f64);
    let lower = -(d as f64);
    let delta = phi(&x0) - lower;
    let set = FeasibleSet::whole_space(d).unwrap();
    let eps = 0.5;
    let (xh, trace) = bregman_prox_point(&x0, &set, &DgfGeometry::euclidean(), grad, l, delta, eps).unwrap();
    let outer = trace.len() - 1;
    let best = trace.iter().skip(1).map(|r| r.strong).fold(f64::INFINITY, f64::min);
    let bound = (16.0 * l * delta / outer as f64 + 10.0 * eps * eps / 3.0).sqrt();
    assert!(best <= bound, "{best} vs {bound}");
    let s = strong_measure_bregman(&xh, &grad(&xh), l, &set, &DgfGeometry::euclidean()).unwrap();
    assert!(s <= trace[0].strong);
}

#[test]
fn constant_phi_leaves_prox_point_in_place() {
    let x0 = VectorPoint::from_vec(vec![0.4, -0.2]);
    let set = FeasibleSet::ball(VectorPoint::zeros(2), 1.0).unwrap();
    let (xh, trace) =
        bregman_prox_point(&x0, &set, &DgfGeometry::euclidean(), |x: &VectorPoint| x * 0.0, 1.0, 0.5, 1.0).unwrap();
    assert_eq!(xh, x0);
    assert!(trace.iter().all(|r| r.strong == 0.0 && r.step == 0.0));
}

#[test]
fn steepest_descent_meets_square_root_rate() {
    // Nonconvex, smooth, bounded below; the minimum over t of the dual norm obeys sqrt(2 L Delta / T).
    let p = 1.5;
    let d = 6;
    let phi = |x: &VectorPoint| x.iter().map(|v| (v * v).ln_1p()).sum::<f64>();
    let grad = |x: &VectorPoint| x.map(|v| 2.0 * v / (1.0 + v * v));
    // |phi''| <= 2 coordinatewise; in l_p with p < 2 the constant is unchanged since |h|_2 <= |h|_p.
    let l = 2.0;
    let x0 = VectorPoint::from_fn(d, |i, _| 3.0 - i as f64);
    let delta = phi(&x0);
    let mut last_ratio = 0.0;
    for t in [100, 1_000, 10_000] {
        let (_, norms) = steepest_descent(&x0, p, grad, l, t).unwrap();
        let best = norms.iter().copied().fold(f64::INFINITY, f64::min);
        let bound = (2.0 * l * delta / t as f64).sqrt();
        assert!(best <= bound, "T = {t}: {best} vs {bound}");
        last_ratio = best / bound;
    }
    assert!(last_ratio <= 1.0);
    let q = p / (p - 1.0);
    assert!(lp_norm(&grad(&x0), q) > 0.0);
}

proptest! {
    #[test]
    fn divergence_vanishes_on_diagonal(v in prop::collection::vec(-5.0f64..5.0, 3..30)) {
        let z = VectorPoint::from_vec(v);
        let geo = lp_dgf(z.len().max(3)).unwrap();
        if z.len() >= 3 {
            prop_assert!(bregman_div(&geo, &z, &z).unwrap() <= 1e-12 * geo.omega(&z).max(1.0));
        }
        let e = DgfGeometry::euclidean();
        prop_assert_eq!(bregman_div(&e, &z, &z).unwrap(), 0.0);
    }

    #[test]
    fn bregman_weak_never_exceeds_strong(
        seed in 0u64..10_000,
        l in 0.1f64..10.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = 5;
        let geo = lp_dgf(d).unwrap();
        let set = FeasibleSet::l1_ball(VectorPoint::zeros(d), 1.0).unwrap();
        let z = unit_l1_sample(&mut rng, d);
        let zeta = VectorPoint::from_fn(d, |_, _| rng.gen_range(-3.0..3.0));
        let r = bregman_measures(&z, &zeta, l, &set, &geo).unwrap();
        prop_assert!(r.weak <= r.strong * (1.0 + 1e-7) + 1e-9, "{} > {}", r.weak, r.strong);
    }

    #[test]
    fn zero_linear_term_returns_the_center(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = 4;
        let geo = lp_dgf(d).unwrap();
        let set = FeasibleSet::l1_ball(VectorPoint::zeros(d), 2.0).unwrap();
        let z = unit_l1_sample(&mut rng, d) * 2.0;
        let zp = bregman_prox(&z, &VectorPoint::zeros(d), &set, &geo, None).unwrap();
        prop_assert!((&zp - &z).amax() <= 1e-9, "{}", (&zp - &z).amax());
    }
}
