#![allow(dead_code)]

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use ucurve::rng::task_rng;

pub fn white_noise(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = task_rng(seed, &[0xA11CE]);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

pub fn ar1(phi: f64, n: usize, seed: u64) -> Vec<f64> {
    let e = white_noise(n + 200, seed);
    let mut x = vec![0.0; n + 200];
    for t in 1..x.len() {
        x[t] = phi * x[t - 1] + e[t];
    }
    x.split_off(200)
}

pub fn uniform(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = task_rng(seed, &[0xB0B]);
    (0..n).map(|_| rng.random::<f64>()).collect()
}

/// Two-sided Kolmogorov–Smirnov distance of a sample from U(0, 1).
pub fn ks_uniform(p: &[f64]) -> f64 {
    let mut s = p.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &v)| ((i as f64 + 1.0) / n - v).max(v - i as f64 / n))
        .fold(0.0, f64::max)
}
