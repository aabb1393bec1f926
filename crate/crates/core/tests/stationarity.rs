mod common;

use common::strong_measure_grid;
use minmax_fne::harness::{build_problem, ProblemDims};
use minmax_fne::stationarity::{fne_check, measures, strong_measure, weak_measure};
use minmax_fne::{Error, FeasibleSet, VectorPoint};
use nalgebra::{dvector, DVector};
use proptest::prelude::*;

#[test]
fn whole_space_measures_are_the_gradient_norm() {
    let ws = FeasibleSet::whole_space(2).unwrap();
    assert!((strong_measure(&dvector![0.0, 0.0], &dvector![3.0, 4.0], 2.0, &ws).unwrap() - 5.0).abs() < 1e-12);
    assert!((weak_measure(&dvector![1.0, -1.0], &dvector![3.0, 4.0], 0.3, &ws).unwrap() - 5.0).abs() < 1e-12);
}

#[test]
fn remark_instance_values() {
    let set = FeasibleSet::boxed(dvector![-1.0], dvector![0.0]).unwrap();
    let r = measures(&dvector![-0.5], &dvector![-1.5], 1.0, &set).unwrap();
    assert!((r.strong * r.strong - 1.25).abs() < 1e-12);
    assert!((r.strong - 1.118_034).abs() < 1e-6);
    assert!((r.weak - 0.5).abs() < 1e-12);
}

#[test]
fn box_example_matches_grid() {
    let set = FeasibleSet::boxed(dvector![0.0, 0.0], dvector![1.0, 1.0]).unwrap();
    let (z, zeta) = (dvector![0.3, 0.7], dvector![1.0, -2.0]);
    let s = strong_measure(&z, &zeta, 1.5, &set).unwrap();
    let grid = strong_measure_grid(&z, &zeta, 1.5, &set, 0.0, 1.0);
    assert!((s - grid).abs() <= 1e-5, "{s} vs {grid}");
}

#[test]
fn fixed_point_has_zero_measures() {
    let set = FeasibleSet::ball(dvector![0.0, 0.0], 1.0).unwrap();
    // Boundary point whose step points straight out of the ball.
    let r = measures(&dvector![0.6, 0.8], &dvector![-0.6, -0.8], 2.0, &set).unwrap();
    assert!(r.strong < 1e-12 && r.weak < 1e-12);
}

#[test]
fn preconditions() {
    let set = FeasibleSet::boxed(dvector![0.0], dvector![1.0]).unwrap();
    assert!(matches!(measures(&dvector![2.0], &dvector![1.0], 1.0, &set), Err(Error::Precondition(_))));
    assert!(matches!(measures(&dvector![0.5], &dvector![1.0], 0.0, &set), Err(Error::InvalidArgument(_))));
    assert!(matches!(measures(&dvector![0.5, 0.5], &dvector![1.0], 1.0, &set), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn fne_check_at_known_saddle() {
    let inst = build_problem("strongly-concave-toy", 4, &ProblemDims::default()).unwrap();
    let sol = inst.known_solution.unwrap();
    let v = fne_check(&sol.x, &sol.y, &inst.spec, 1e-9, 1e-9).unwrap();
    assert!(v.passed);
    assert!(v.x.strong < 1e-9 && v.y.strong < 1e-9);
}

#[test]
fn strong_criterion_is_stricter_than_weak() {
    let inst = build_problem("scalar-remark54", 0, &ProblemDims::default()).unwrap();
    let v = fne_check(&dvector![0.0], &dvector![-0.5], &inst.spec, 1.0, 1.0).unwrap();
    assert!(!v.passed);
    assert!((v.y.strong - 1.118_034).abs() < 1e-6);
    assert!(v.y.weak <= 1.0);
    assert!(fne_check(&dvector![0.0], &dvector![2.0], &inst.spec, 1.0, 1.0).is_err());
}

#[test]
fn fne_check_agrees_with_grid_on_bilinear_pairs() {
    use rand::SeedableRng;
    let inst = build_problem("quad-bilinear", 5, &ProblemDims { d: 2, k: 2, ..ProblemDims::default() }).unwrap();
    let spec = &inst.spec;
    let f = spec.oracle();
    let c = spec.constants();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
    let (xlo, xhi) = grid_window(spec.x_set());
    let (ylo, yhi) = grid_window(spec.y_set());
    for _ in 0..5 {
        let x = spec.x_set().sample(&mut rng);
        let y = spec.y_set().sample(&mut rng);
        let v = fne_check(&x, &y, spec, 0.5, 0.5).unwrap();
        let sx = strong_measure_grid(&x, &f.grad_x(&x, &y), c.l_xx, spec.x_set(), xlo, xhi);
        let sy = strong_measure_grid(&y, &-f.grad_y(&x, &y), c.l_yy, spec.y_set(), ylo, yhi);
        assert!((v.x.strong - sx).abs() <= 1e-5 * sx.max(1.0), "{} vs {sx}", v.x.strong);
        assert!((v.y.strong - sy).abs() <= 1e-5 * sy.max(1.0), "{} vs {sy}", v.y.strong);
        let brute = sx <= 0.5 && sy <= 0.5;
        if (sx - 0.5).abs() > 1e-4 && (sy - 0.5).abs() > 1e-4 {
            assert_eq!(v.passed, brute);
        }
    }
}

/// Square window containing the set, for the grid oracle; unbounded sets get a wide window.
fn grid_window(set: &FeasibleSet) -> (f64, f64) {
    let c = set.center();
    let r = set.radius_bound().unwrap_or(50.0);
    (c.min() - r, c.max() + r)
}

fn sets_2d() -> Vec<FeasibleSet> {
    vec![
        FeasibleSet::whole_space(2).unwrap(),
        FeasibleSet::boxed(dvector![-1.0, 0.0], dvector![0.5, 2.0]).unwrap(),
        FeasibleSet::ball(dvector![0.3, -0.2], 1.1).unwrap(),
        FeasibleSet::simplex(2, 1.0).unwrap(),
        FeasibleSet::l1_ball(dvector![0.0, 0.5], 0.7).unwrap(),
    ]
}

proptest! {
    #[test]
    fn weak_below_strong_and_monotone_in_l(
        seed in 0u64..10_000,
        zeta in prop::collection::vec(-5.0..5.0f64, 2),
        l in 0.05..20.0f64,
        factor in 1.0..10.0f64,
    ) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let zeta = DVector::from_vec(zeta);
        for set in sets_2d() {
            let z: VectorPoint = set.sample(&mut rng);
            let a = measures(&z, &zeta, l, &set).unwrap();
            let b = measures(&z, &zeta, l * factor, &set).unwrap();
            prop_assert!(a.weak <= a.strong * (1.0 + 1e-12) + 1e-12);
            prop_assert!(a.strong <= b.strong * (1.0 + 1e-9) + 1e-12);
            prop_assert!(a.weak <= b.weak * (1.0 + 1e-9) + 1e-12);
            prop_assert!(a.strong <= zeta.norm() * (1.0 + 1e-12) + 1e-12);
        }
    }
}
