use minmax_fne::geometry::SetKind;
use minmax_fne::{prox_map, Error, FeasibleSet, VectorPoint};
use nalgebra::{dvector, DVector};
use proptest::prelude::*;

fn close(a: &VectorPoint, b: &VectorPoint, tol: f64) -> bool {
    (a - b).amax() <= tol
}

#[test]
fn box_and_ball_examples() {
    let b = FeasibleSet::boxed(dvector![0.0, 0.0], dvector![1.0, 1.0]).unwrap();
    assert_eq!(b.project(&dvector![2.0, -1.0]).unwrap(), dvector![1.0, 0.0]);
    let ball = FeasibleSet::ball(dvector![0.0, 0.0], 1.0).unwrap();
    assert!(close(&ball.project(&dvector![3.0, 4.0]).unwrap(), &dvector![0.6, 0.8], 1e-15));
}

/// Nearest point to `z` on a grid of the unit simplex in R^3, restricted to a square window.
fn simplex_grid_nearest(z: &VectorPoint, c0: f64, c1: f64, half: f64, n: usize) -> VectorPoint {
    let mut best = (f64::INFINITY, dvector![0.0, 0.0, 1.0]);
    for i in 0..=n {
        for j in 0..=n {
            let a = c0 - half + 2.0 * half * i as f64 / n as f64;
            let b = c1 - half + 2.0 * half * j as f64 / n as f64;
            let c = 1.0 - a - b;
            if a < 0.0 || b < 0.0 || c < 0.0 {
                continue;
            }
            let q = dvector![a, b, c];
            let d = (&q - z).norm_squared();
            if d < best.0 {
                best = (d, q);
            }
        }
    }
    best.1
}

#[test]
fn simplex_projection_matches_grid_minimizer() {
    let set = FeasibleSet::simplex(3, 1.0).unwrap();
    let z = dvector![0.8, 0.8, -0.2];
    let p = set.project(&z).unwrap();
    let coarse = simplex_grid_nearest(&z, 0.5, 0.5, 0.5, 400);
    let fine = simplex_grid_nearest(&z, coarse[0], coarse[1], 0.005, 2000);
    assert!(close(&p, &fine, 1e-6), "{p} vs {fine}");
    assert!(close(&p, &dvector![0.5, 0.5, 0.0], 1e-12));
}

#[test]
fn prox_map_examples() {
    let ws = FeasibleSet::whole_space(2).unwrap();
    assert_eq!(prox_map(&dvector![1.0, 1.0], &dvector![0.5, 0.0], &ws).unwrap(), dvector![0.5, 1.0]);
    let ball = FeasibleSet::ball(dvector![0.0, 0.0], 1.0).unwrap();
    assert!(close(&prox_map(&dvector![1.0, 0.0], &dvector![-2.0, 0.0], &ball).unwrap(), &dvector![1.0, 0.0], 1e-15));
    let seg = FeasibleSet::boxed(dvector![-1.0], dvector![0.0]).unwrap();
    let p = prox_map(&dvector![-0.5], &dvector![-1.5], &seg).unwrap();
    // Grid minimizer of |y - (z - zeta)| over [-1, 0].
    let grid = (0..=100_000)
        .map(|i| -1.0 + i as f64 * 1e-5)
        .min_by(|a: &f64, b: &f64| (a - 1.0).abs().total_cmp(&(b - 1.0).abs()))
        .unwrap();
    assert_eq!(p[0], 0.0);
    assert!((p[0] - grid).abs() <= 1e-5);
}

#[test]
fn invalid_inputs_are_rejected() {
    let b = FeasibleSet::boxed(dvector![0.0, 0.0], dvector![1.0, 1.0]).unwrap();
    assert!(matches!(b.project(&dvector![1.0]), Err(Error::DimensionMismatch { expected: 2, got: 1 })));
    assert!(matches!(prox_map(&dvector![0.0, 0.0], &dvector![1.0], &b), Err(Error::DimensionMismatch { .. })));
    assert!(FeasibleSet::boxed(dvector![1.0], dvector![0.0]).is_err());
    assert!(FeasibleSet::ball(dvector![0.0], -1.0).is_err());
    assert!(FeasibleSet::simplex(3, -1.0).is_err());
    assert!(FeasibleSet::l1_ball(dvector![0.0], f64::NAN).is_err());
    assert!(b.project(&dvector![f64::NAN, 0.0]).is_err());
}

#[test]
fn radius_metadata() {
    assert_eq!(FeasibleSet::whole_space(3).unwrap().radius_bound(), None);
    let ball = FeasibleSet::ball(dvector![1.0, 2.0], 0.5).unwrap();
    assert_eq!(ball.radius_bound(), Some(0.5));
    assert_eq!(ball.center(), dvector![1.0, 2.0]);
    assert_eq!(ball.kind().name(), "ball");
    assert!(matches!(ball.kind(), SetKind::Ball { .. }));
}

#[test]
fn translation_shifts_membership() {
    let b = FeasibleSet::boxed(dvector![0.0, 0.0], dvector![1.0, 2.0]).unwrap();
    let t = b.translated(&dvector![1.0, -1.0]).unwrap();
    assert!(t.contains(&dvector![1.5, 0.5], 0.0).unwrap());
    assert!(!t.contains(&dvector![0.5, 0.5], 1e-12).unwrap());
    assert!(FeasibleSet::simplex(2, 1.0).unwrap().translated(&dvector![1.0, 0.0]).is_err());
}

fn sets(d: usize) -> Vec<FeasibleSet> {
    vec![
        FeasibleSet::whole_space(d).unwrap(),
        FeasibleSet::boxed(DVector::from_element(d, -0.5), DVector::from_element(d, 1.5)).unwrap(),
        FeasibleSet::ball(DVector::from_element(d, 0.2), 0.8).unwrap(),
        FeasibleSet::simplex(d, 1.5).unwrap(),
        FeasibleSet::l1_ball(DVector::from_element(d, -0.1), 1.0).unwrap(),
    ]
}

/// Vertices of the polytope sets, where the projection's variational inequality is checked.
fn vertices(set: &FeasibleSet) -> Vec<VectorPoint> {
    let d = set.dim();
    match set.kind() {
        SetKind::Simplex { scale } => (0..d).map(|i| DVector::from_fn(d, |j, _| if i == j { *scale } else { 0.0 })).collect(),
        SetKind::L1Ball { center, radius } => (0..2 * d)
            .map(|k| {
                let s = if k < d { 1.0 } else { -1.0 };
                let mut v = center.clone();
                v[k % d] += s * radius;
                v
            })
            .collect(),
        _ => Vec::new(),
    }
}

fn point(d: usize) -> impl Strategy<Value = VectorPoint> {
    prop::collection::vec(-4.0..4.0f64, d).prop_map(DVector::from_vec)
}

proptest! {
    #[test]
    fn projection_invariants(a in point(4), b in point(4)) {
        for set in sets(4) {
            let pa = set.project(&a).unwrap();
            let pb = set.project(&b).unwrap();
            prop_assert!(set.contains(&pa, 1e-9).unwrap());
            prop_assert!(close(&set.project(&pa).unwrap(), &pa, 1e-12));
            prop_assert!((&pa - &pb).norm() <= (&a - &b).norm() + 1e-12);
            prop_assert!((set.distance(&a).unwrap() - (&a - &pa).norm()).abs() <= 1e-12);
            if let Some(r) = set.radius_bound() {
                prop_assert!((&pa - set.center()).norm() <= r + 1e-9);
            }
            for v in vertices(&set) {
                prop_assert!((&a - &pa).dot(&(&v - &pa)) <= 1e-9);
            }
        }
    }

    #[test]
    fn samples_are_members(seed in 0u64..1000) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for set in sets(3) {
            let z = set.sample(&mut rng);
            prop_assert!(set.contains(&z, 1e-9).unwrap());
        }
    }
}
