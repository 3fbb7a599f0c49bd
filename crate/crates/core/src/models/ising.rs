//! Ferromagnetic Ising model with external field, annealed through the
//! rescaled field Hamiltonian `H(σ) = η Σ_{σ_v=+1} ln(1/λ_v)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::graph::Graph;
use super::two_spin::check_spin_cap;
use crate::beta::Beta;
use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::model::GrossGibbsModel;
use crate::numeric::{log_sum_exp, LogAccumulator};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsingSpec {
    /// Edge activities, in the graph's edge order.
    pub gamma: Vec<f64>,
    /// Vertex activities.
    pub lambda: Vec<f64>,
    pub delta: f64,
}

impl IsingSpec {
    /// Checks `γ_e ≥ 1+δ`, `0 ≤ λ_v ≤ 1-δ`, `δ ∈ (0,1)` against `g`.
    pub fn new(g: &Graph, gamma: Vec<f64>, lambda: Vec<f64>, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::param(format!("slack δ must lie in (0, 1), got {delta}")));
        }
        if gamma.len() != g.m() || lambda.len() != g.n() {
            return Err(Error::param(format!(
                "expected {} edge and {} vertex activities, got {} and {}",
                g.m(),
                g.n(),
                gamma.len(),
                lambda.len()
            )));
        }
        if let Some((e, &x)) = gamma.iter().enumerate().find(|(_, &x)| !(x >= 1.0 + delta && x.is_finite())) {
            return Err(Error::param(format!("γ_{e} = {x} violates γ ≥ 1 + δ = {}", 1.0 + delta)));
        }
        if let Some((v, &x)) = lambda.iter().enumerate().find(|(_, &x)| !(x >= 0.0 && x <= 1.0 - delta)) {
            return Err(Error::param(format!("λ_{v} = {x} violates 0 ≤ λ ≤ 1 - δ = {}", 1.0 - delta)));
        }
        Ok(IsingSpec { gamma, lambda, delta })
    }

    /// Uniform activities.
    pub fn uniform(g: &Graph, gamma: f64, lambda: f64, delta: f64) -> Result<Self> {
        Self::new(g, vec![gamma; g.m()], vec![lambda; g.n()], delta)
    }

    /// `η = -1/ln(1-δ)`.
    pub fn eta(&self) -> f64 {
        -1.0 / (-self.delta).ln_1p()
    }

    /// Per-vertex field values `η ln(1/λ_v)`; `∞` where `λ_v = 0`.
    pub fn field(&self) -> Vec<f64> {
        let eta = self.eta();
        self.lambda.iter().map(|&l| eta * -l.ln()).collect()
    }
}

/// `ln` of the unnormalized Ising weight of `sigma` (bitmask of `+` vertices).
pub(crate) fn ising_log_weight(g: &Graph, spec: &IsingSpec, sigma: u64) -> f64 {
    let mut w = 0.0;
    for (v, &l) in spec.lambda.iter().enumerate() {
        if sigma >> v & 1 == 1 {
            w += l.ln();
        }
    }
    for (&(u, v), &ge) in g.edges().iter().zip(&spec.gamma) {
        if (sigma >> u & 1) == (sigma >> v & 1) {
            w += ge.ln();
        }
    }
    w
}

fn monochromatic_log_weight(g: &Graph, spec: &IsingSpec, sigma: u64) -> f64 {
    g.edges()
        .iter()
        .zip(&spec.gamma)
        .filter(|(&(u, v), _)| (sigma >> u & 1) == (sigma >> v & 1))
        .map(|(_, &ge)| ge.ln())
        .sum()
}

/// Gross Gibbs histogram of `(H, F)` with `F(σ) = ∏_{σ_u=σ_v} γ_{uv}`, and the
/// bounds `β ∈ [-∞, -1/η]`, `q = n`, `h = nη/e`. Configurations putting `+1`
/// on a vertex with `λ_v = 0` have zero weight on that whole range and are
/// omitted.
pub fn enumerate_ising(g: &Graph, spec: &IsingSpec) -> Result<(GrossGibbsModel, Bounds)> {
    check_spin_cap(g)?;
    if spec.gamma.len() != g.m() || spec.lambda.len() != g.n() {
        return Err(Error::param("Ising spec does not match the graph"));
    }
    let field = spec.field();
    let pinned = field
        .iter()
        .enumerate()
        .filter(|(_, f)| f.is_infinite())
        .fold(0u64, |m, (v, _)| m | 1 << v);
    let points: Vec<(f64, f64)> = (0..1u64 << g.n())
        .into_par_iter()
        .filter(|s| s & pinned == 0)
        .map(|s| {
            let x: f64 = (0..g.n()).filter(|v| s >> v & 1 == 1).map(|v| field[v]).sum();
            (x, monochromatic_log_weight(g, spec, s))
        })
        .collect();
    let model = GrossGibbsModel::new(points)?;
    let eta = spec.eta();
    let n = g.n() as f64;
    let bounds = Bounds::new(n, n * eta / std::f64::consts::E, Beta::NEG_INFINITY, Beta::new(-1.0 / eta)?)?;
    Ok((model, bounds))
}

/// `ln Z^{Ising}` by direct configuration sum.
pub fn ising_log_partition(g: &Graph, spec: &IsingSpec) -> Result<f64> {
    check_spin_cap(g)?;
    let terms: Vec<f64> = (0..1u64 << g.n())
        .into_par_iter()
        .map(|s| ising_log_weight(g, spec, s))
        .collect();
    Ok(log_sum_exp(&terms))
}

/// Exact `Pr[σ_v = +1]` for every vertex.
pub fn ising_marginals(g: &Graph, spec: &IsingSpec) -> Result<Vec<f64>> {
    check_spin_cap(g)?;
    let n = g.n();
    let mut total = LogAccumulator::new();
    let mut plus = vec![LogAccumulator::new(); n];
    for s in 0..1u64 << n {
        let w = ising_log_weight(g, spec, s);
        total.add(w);
        for (v, acc) in plus.iter_mut().enumerate() {
            if s >> v & 1 == 1 {
                acc.add(w);
            }
        }
    }
    let lz = total.value();
    Ok(plus.iter().map(|a| (a.value() - lz).exp()).collect())
}

/// `max_v (Pr[σ_v = +1] - λ_v)`; never positive up to rounding.
pub fn ising_marginal_bound_check(g: &Graph, spec: &IsingSpec) -> Result<f64> {
    let marg = ising_marginals(g, spec)?;
    Ok(marg
        .iter()
        .zip(&spec.lambda)
        .map(|(p, l)| p - l)
        .fold(f64::NEG_INFINITY, f64::max))
}
