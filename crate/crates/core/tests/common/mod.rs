//! Brute-force reference oracles shared by integration tests.
#![allow(dead_code)]

use minmax_fne::{FeasibleSet, VectorPoint};
use nalgebra::DVector;

/// Maximizes `f` over the parameter box `[lo, hi]` (1 or 2 coordinates) by a zooming grid: `4n` cells
/// per axis in the first round and `n` afterwards, the window shrinking by `shrink` around the
/// incumbent for each of `rounds` rounds.
/// `f` returns `None` outside its domain.
pub fn zoom_max(lo: &[f64], hi: &[f64], n: usize, shrink: f64, rounds: usize, f: impl Fn(&[f64]) -> Option<f64>) -> f64 {
    let d = lo.len();
    assert!(d == 1 || d == 2);
    let mut best = (f64::NEG_INFINITY, lo.to_vec());
    let mut center: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let mut half: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (b - a)).collect();
    for round in 0..rounds {
        let n = if round == 0 { 4 * n } else { n };
        let at = |c: &[f64], h: &[f64], k: usize, i: usize| c[k] - h[k] + 2.0 * h[k] * i as f64 / n as f64;
        let cols = if d == 1 { 1 } else { n + 1 };
        for i in 0..=n {
            for j in 0..cols {
                let p = [at(&center, &half, 0, i), if d == 2 { at(&center, &half, 1, j) } else { 0.0 }];
                if let Some(v) = f(&p[..d]) {
                    if v > best.0 {
                        best = (v, p[..d].to_vec());
                    }
                }
            }
        }
        center = best.1.clone();
        half.iter_mut().for_each(|h| *h *= shrink);
    }
    best.0
}

/// `max_{z' in set} <zeta, z - z'> - (L/2)|z' - z|^2` by zooming grid search over the box `[lo, hi]^d`
/// (`d <= 2`), returned as the strong measure `sqrt(2 L max)`.
pub fn strong_measure_grid(z: &VectorPoint, zeta: &VectorPoint, l: f64, set: &FeasibleSet, lo: f64, hi: f64) -> f64 {
    let n = if z.len() == 1 { 1000 } else { 100 };
    strong_measure_zoom(z, zeta, l, set, lo, hi, n, 0.05, 8)
}

fn bracket(z: &VectorPoint, zeta: &VectorPoint, l: f64, q: &VectorPoint) -> f64 {
    (0..z.len()).map(|i| zeta[i] * (z[i] - q[i]) - 0.5 * l * (q[i] - z[i]).powi(2)).sum()
}

/// Cartesian zooming grid over `[lo, hi]^d` restricted to the set.
#[allow(clippy::too_many_arguments)]
pub fn strong_measure_zoom(
    z: &VectorPoint,
    zeta: &VectorPoint,
    l: f64,
    set: &FeasibleSet,
    lo: f64,
    hi: f64,
    n: usize,
    shrink: f64,
    rounds: usize,
) -> f64 {
    let d = z.len();
    let q = std::cell::RefCell::new(DVector::zeros(d));
    let best = zoom_max(&vec![lo; d], &vec![hi; d], n, shrink, rounds, |p| {
        let mut q = q.borrow_mut();
        q.copy_from_slice(p);
        set.contains(&q, 0.0).unwrap().then(|| bracket(z, zeta, l, &q))
    });
    (2.0 * l * best.max(0.0)).sqrt()
}

/// Zooming grid over the disc `|z' - c| <= r` in polar coordinates, which samples the boundary circle exactly.
#[allow(clippy::too_many_arguments)]
pub fn strong_measure_disc(z: &VectorPoint, zeta: &VectorPoint, l: f64, c: &VectorPoint, r: f64, n: usize, shrink: f64, rounds: usize) -> f64 {
    assert_eq!(z.len(), 2);
    let pi = std::f64::consts::PI;
    let best = zoom_max(&[0.0, -pi], &[r, pi], n, shrink, rounds, |p| {
        if !(0.0..=r).contains(&p[0]) {
            return None;
        }
        let q = nalgebra::dvector![c[0] + p[0] * p[1].cos(), c[1] + p[0] * p[1].sin()];
        Some(bracket(z, zeta, l, &q))
    });
    (2.0 * l * best.max(0.0)).sqrt()
}
