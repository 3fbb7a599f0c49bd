#![allow(dead_code)]

use anneal::models::Graph;
use anneal::{Beta, GrossGibbsModel};
use rand::Rng;

/// Random model with a zero point and up to `extra` points in `[1, xmax]`.
pub fn random_model<R: Rng>(rng: &mut R, extra: usize, xmax: f64) -> GrossGibbsModel {
    let mut pts = vec![(0.0, rng.random_range(-3.0..3.0))];
    let n = rng.random_range(1..=extra);
    for _ in 0..n {
        pts.push((rng.random_range(1.0..xmax), rng.random_range(-4.0..4.0)));
    }
    GrossGibbsModel::new(pts).unwrap()
}

/// Kolmogorov–Smirnov statistic of `xs` against Exp(1).
pub fn ks_exp1(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = 1.0 - (-x).exp();
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    d
}

/// Asymptotic KS critical value at level 0.01.
pub fn ks_critical_01(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

/// Connected random graph on `n` vertices: a random spanning tree plus extras.
pub fn random_connected_graph<R: Rng>(rng: &mut R, n: usize, extra: usize) -> Graph {
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.random_range(0..v), v)).collect();
    for _ in 0..extra {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        let (a, b) = (u.min(v), u.max(v));
        if a != b && !edges.contains(&(a, b)) {
            edges.push((a, b));
        }
    }
    Graph::new(n, edges).unwrap()
}

/// `ln Σ_σ λ^{n₊} γ₁^{m₊} γ₂^{m₋}`, summed configuration by configuration
/// from the highest mask down, with per-edge inspection.
pub fn direct_two_spin(g: &Graph, gamma1: f64, gamma2: f64, lambda: f64) -> f64 {
    let mut total = 0.0f64;
    for sigma in (0..1u64 << g.n()).rev() {
        let mut w = 1.0;
        for v in 0..g.n() {
            if sigma >> v & 1 == 1 {
                w *= lambda;
            }
        }
        for &(u, v) in g.edges() {
            match (sigma >> u & 1, sigma >> v & 1) {
                (1, 1) => w *= gamma1,
                (0, 0) => w *= gamma2,
                _ => {}
            }
        }
        total += w;
    }
    total.ln()
}

/// `ln Σ_σ ∏_{+} λ_v ∏_{σ_u=σ_v} γ_e`.
pub fn direct_ising(g: &Graph, gamma: &[f64], lambda: &[f64]) -> f64 {
    let mut total = 0.0f64;
    for sigma in (0..1u64 << g.n()).rev() {
        let mut w = 1.0;
        for (v, l) in lambda.iter().enumerate() {
            if sigma >> v & 1 == 1 {
                w *= l;
            }
        }
        for (&(u, v), ge) in g.edges().iter().zip(gamma) {
            if (sigma >> u & 1) == (sigma >> v & 1) {
                w *= ge;
            }
        }
        total += w;
    }
    total.ln()
}

/// `ln Σ_M λ^{|M|}` by scanning every edge subset for vertex-disjointness.
pub fn direct_matchings(g: &Graph, lambda: f64) -> f64 {
    let mut total = 0.0f64;
    for mask in 0..1u64 << g.m() {
        let mut used = vec![false; g.n()];
        let mut ok = true;
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            if mask >> e & 1 == 1 {
                if used[u] || used[v] {
                    ok = false;
                    break;
                }
                used[u] = true;
                used[v] = true;
            }
        }
        if ok {
            total += lambda.powi(mask.count_ones() as i32);
        }
    }
    total.ln()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Exact `z(β)` by a plain sum, for cross-checks.
pub fn plain_log_z(model: &GrossGibbsModel, beta: Beta) -> f64 {
    let b = beta.value();
    let s: f64 = model
        .support()
        .iter()
        .map(|p| {
            if p.x == 0.0 {
                p.log_c.exp()
            } else {
                (p.log_c + b * p.x).exp()
            }
        })
        .sum();
    s.ln()
}
