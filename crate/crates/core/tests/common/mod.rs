//! Oracles shared by the integration tests. Nothing here calls into the
//! quantities under test.

#![allow(dead_code)]

use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite Gauss–Legendre over `panels` equal panels.
pub fn composite(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    panels: usize,
    rule: &(Vec<f64>, Vec<f64>),
) -> f64 {
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for (x, w) in rule.0.iter().zip(&rule.1) {
            sum += w * f(lo + 0.5 * h * (x + 1.0));
        }
    }
    0.5 * h * sum
}

/// η(V) as the nested mark integral: pair 1 carries mark t1 and must beat the
/// V_o region, pair 2 carries t2 < t1 and must beat the part of the union
/// covered by its own region only.
pub fn eta_double_integral(v: f64, vo: f64, lambda_p: f64) -> f64 {
    let rule = gauss_legendre(20);
    let (a, b) = (lambda_p * vo, lambda_p * (v - vo));
    composite(
        |t1| (-a * t1).exp() * composite(|t2| (-b * t2).exp(), 0.0, t1, 4, &rule),
        0.0,
        1.0,
        12,
        &rule,
    )
}

/// Hit-or-miss area of a union of disks `(x, y, r)`; returns (estimate, standard error).
pub fn darts_union_area(disks: &[(f64, f64, f64)], n: u64, seed: u64) -> (f64, f64) {
    let x0 = disks
        .iter()
        .map(|d| d.0 - d.2)
        .fold(f64::INFINITY, f64::min);
    let x1 = disks
        .iter()
        .map(|d| d.0 + d.2)
        .fold(f64::NEG_INFINITY, f64::max);
    let y0 = disks
        .iter()
        .map(|d| d.1 - d.2)
        .fold(f64::INFINITY, f64::min);
    let y1 = disks
        .iter()
        .map(|d| d.1 + d.2)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut rng = SmallRng::seed_from_u64(seed);
    let mut hits = 0u64;
    for _ in 0..n {
        let x = x0 + (x1 - x0) * rng.random::<f64>();
        let y = y0 + (y1 - y0) * rng.random::<f64>();
        if disks
            .iter()
            .any(|&(cx, cy, r)| (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r)
        {
            hits += 1;
        }
    }
    let box_area = (x1 - x0) * (y1 - y0);
    let p = hits as f64 / n as f64;
    (box_area * p, box_area * (p * (1.0 - p) / n as f64).sqrt())
}

/// Coverage of a typical user served by its nearest node in a unit-intensity
/// PPP with Rayleigh fading, simulated in a disk of radius `radius`.
/// Returns (estimate, standard error).
pub fn nearest_node_coverage(
    threshold: f64,
    alpha: f64,
    radius: f64,
    n: usize,
    seed: u64,
) -> (f64, f64) {
    let mut rng = SmallRng::seed_from_u64(seed);
    let mean = std::f64::consts::PI * radius * radius;
    let poisson = rand_distr::Poisson::new(mean).unwrap();
    let exp = rand_distr::Exp1;
    let mut covered = 0usize;
    let mut dists = Vec::new();
    for _ in 0..n {
        let k: f64 = rng.sample(poisson);
        dists.clear();
        for _ in 0..k as usize {
            dists.push(radius * rng.random::<f64>().sqrt());
        }
        let Some(near) = dists.iter().copied().reduce(f64::min) else {
            continue;
        };
        let mut signal = 0.0;
        let mut interference = 0.0;
        let mut seen = false;
        for &r in &dists {
            let h: f64 = rng.sample(exp);
            if r == near && !seen {
                signal = h * r.powf(-alpha);
                seen = true;
            } else {
                interference += h * r.powf(-alpha);
            }
        }
        if signal >= threshold * interference {
            covered += 1;
        }
    }
    let p = covered as f64 / n as f64;
    (p, (p * (1.0 - p) / n as f64).sqrt())
}
