//! Random cluster model with vertex activities, its exact and
//! field-dynamics samplers, and the Edwards–Sokal map to Ising spins.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::graph::{Graph, UnionFind};
use super::ising::{ising_log_partition, IsingSpec};
use super::matchings::check_edge_cap;
use crate::error::{Error, Result};
use crate::numeric::LogAccumulator;

/// Edge subset as an indicator over the graph's edge order.
pub type EdgeSet = Vec<bool>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomClusterSpec {
    p: Vec<f64>,
    lambda: Vec<f64>,
}

impl RandomClusterSpec {
    /// Requires `p_e ∈ (0,1)` and `λ_v ∈ [0,1)`.
    pub fn new(g: &Graph, p: Vec<f64>, lambda: Vec<f64>) -> Result<Self> {
        if p.len() != g.m() || lambda.len() != g.n() {
            return Err(Error::param("random cluster spec does not match the graph"));
        }
        if let Some(x) = p.iter().find(|&&x| !(x > 0.0 && x < 1.0)) {
            return Err(Error::param(format!("edge probability {x} outside (0, 1)")));
        }
        if let Some(x) = lambda.iter().find(|&&x| !(0.0..1.0).contains(&x)) {
            return Err(Error::param(format!("vertex activity {x} outside [0, 1)")));
        }
        Ok(RandomClusterSpec { p, lambda })
    }

    /// `p_e = 1 - 1/γ_e`.
    pub fn from_ising(spec: &IsingSpec) -> Self {
        RandomClusterSpec {
            p: spec.gamma.iter().map(|g| 1.0 - 1.0 / g).collect(),
            lambda: spec.lambda.clone(),
        }
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn p_min(&self) -> f64 {
        self.p.iter().copied().fold(1.0, f64::min)
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda.iter().copied().fold(0.0, f64::max)
    }

    /// `p*_e = p_e/(p_e + θ(1-p_e))` on `keep`, `0` elsewhere.
    pub fn tilted(&self, theta: f64, keep: &[bool]) -> RandomClusterSpec {
        let p = self
            .p
            .iter()
            .zip(keep)
            .map(|(&p, &k)| if k { p / (p + theta * (1.0 - p)) } else { 0.0 })
            .collect();
        RandomClusterSpec {
            p,
            lambda: self.lambda.clone(),
        }
    }
}

fn components(g: &Graph, set: &[bool]) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::new(g.n());
    for (&(u, v), &on) in g.edges().iter().zip(set) {
        if on {
            uf.union(u, v);
        }
    }
    uf.components()
}

/// `ln w^{RC}(S)`; `-∞` when an edge with `p_e = 0` is open.
pub fn rc_log_weight(g: &Graph, spec: &RandomClusterSpec, set: &[bool]) -> f64 {
    let mut w = 0.0;
    for (&p, &on) in spec.p.iter().zip(set) {
        w += if on { p.ln() } else { (-p).ln_1p() };
    }
    for comp in components(g, set) {
        let prod: f64 = comp.iter().map(|&v| spec.lambda[v]).product();
        w += prod.ln_1p();
    }
    w
}

fn mask_to_set(mask: u64, m: usize) -> EdgeSet {
    (0..m).map(|e| mask >> e & 1 == 1).collect()
}

/// `ln Z^{RC}` by summing over all `2^m` edge subsets.
pub fn enumerate_rc(g: &Graph, spec: &RandomClusterSpec) -> Result<f64> {
    check_edge_cap(g)?;
    let mut acc = LogAccumulator::new();
    for mask in 0..1u64 << g.m() {
        acc.add(rc_log_weight(g, spec, &mask_to_set(mask, g.m())));
    }
    Ok(acc.value())
}

/// `|Z^{Ising} / (Z^{RC} ∏γ_e) - 1|` with `p_e = 1 - 1/γ_e`.
pub fn ising_rc_identity_check(g: &Graph, ising: &IsingSpec) -> Result<f64> {
    let rc = RandomClusterSpec::from_ising(ising);
    let lz_rc = enumerate_rc(g, &rc)?;
    let lz_ising = ising_log_partition(g, ising)?;
    let lg: f64 = ising.gamma.iter().map(|x| x.ln()).sum();
    Ok((lz_ising - lz_rc - lg).exp_m1().abs())
}

/// The exact distribution over edge subsets, for repeated sampling.
#[derive(Clone, Debug)]
pub struct RcDistribution {
    m: usize,
    cdf: Vec<f64>,
}

impl RcDistribution {
    pub fn new(g: &Graph, spec: &RandomClusterSpec) -> Result<Self> {
        check_edge_cap(g)?;
        let lw: Vec<f64> = (0..1u64 << g.m())
            .map(|mask| rc_log_weight(g, spec, &mask_to_set(mask, g.m())))
            .collect();
        let top = lw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut cdf = Vec::with_capacity(lw.len());
        let mut run = 0.0;
        for w in lw {
            run += (w - top).exp();
            cdf.push(run);
        }
        Ok(RcDistribution { m: g.m(), cdf })
    }

    /// `μ^{RC}(S)` for every subset mask.
    pub fn probabilities(&self) -> Vec<f64> {
        let total = *self.cdf.last().expect("nonempty");
        let mut prev = 0.0;
        self.cdf
            .iter()
            .map(|&c| {
                let p = (c - prev) / total;
                prev = c;
                p
            })
            .collect()
    }

    pub fn sample_mask<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let total = *self.cdf.last().expect("nonempty");
        let u: f64 = rng.random::<f64>() * total;
        self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1) as u64
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> EdgeSet {
        mask_to_set(self.sample_mask(rng), self.m)
    }
}

/// Heat-bath Glauber dynamics on `μ^{RC}`: pick an edge uniformly and
/// resample it given the rest. Edges with `p_e = 0` stay closed.
pub fn glauber_rc<R: Rng + ?Sized>(
    g: &Graph,
    spec: &RandomClusterSpec,
    start: EdgeSet,
    steps: u64,
    rng: &mut R,
) -> EdgeSet {
    let mut set = start;
    let m = g.m();
    if m == 0 {
        return set;
    }
    for _ in 0..steps {
        let e = rng.random_range(0..m);
        let p = spec.p[e];
        if p == 0.0 {
            set[e] = false;
            continue;
        }
        set[e] = false;
        let (u, v) = g.edges()[e];
        let (cu, cv) = component_products(g, spec, &set, u, v);
        // closing leaves two factors (1+Λ_u)(1+Λ_v); opening merges them
        let factor = match cv {
            None => 1.0,
            Some(cv) => (1.0 + cu * cv) / ((1.0 + cu) * (1.0 + cv)),
        };
        let open = p * factor;
        set[e] = rng.random::<f64>() * (open + 1.0 - p) < open;
    }
    set
}

/// `∏λ` over the component of `u`, and over that of `v` if it differs.
fn component_products(g: &Graph, spec: &RandomClusterSpec, set: &[bool], u: usize, v: usize) -> (f64, Option<f64>) {
    let mut seen = vec![false; g.n()];
    let mut stack = vec![u];
    seen[u] = true;
    let mut prod_u = 1.0;
    let mut joined = false;
    // adjacency is rebuilt lazily from the edge list
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); g.n()];
    for (&(a, b), &on) in g.edges().iter().zip(set) {
        if on {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    while let Some(x) = stack.pop() {
        prod_u *= spec.lambda[x];
        joined |= x == v;
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    if joined {
        return (prod_u, None);
    }
    let mut prod_v = 1.0;
    stack.push(v);
    seen[v] = true;
    while let Some(x) = stack.pop() {
        prod_v *= spec.lambda[x];
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    (prod_u, Some(prod_v))
}

/// One field-dynamics step: sparsify with rate `θ`, then resample `X` from
/// the tilted measure `μ^{RC}_{p*,λ}` via `inner(tilted, X, rng)`.
pub fn field_dynamics_step<R, F>(
    x: &[bool],
    spec: &RandomClusterSpec,
    theta: f64,
    rng: &mut R,
    mut inner: F,
) -> Result<EdgeSet>
where
    R: Rng + ?Sized,
    F: FnMut(&RandomClusterSpec, EdgeSet, &mut R) -> EdgeSet,
{
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::param(format!("θ must lie in (0, 1), got {theta}")));
    }
    let keep: Vec<bool> = x.iter().map(|&on| rng.random::<f64>() < theta || on).collect();
    let tilted = spec.tilted(theta, &keep);
    Ok(inner(&tilted, x.to_vec(), rng))
}

/// Sampler parameters, with the magnitudes that overflow `f64` held as logs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RcParams {
    pub c1: f64,
    pub log_c2: f64,
    pub log_n0: f64,
    pub theta: f64,
    pub log_t: f64,
}

impl RcParams {
    /// `C₁ = 10⁻²⁷(1-λ_max)p_min`, `C₂ = (2/(p_min(1-λ_max)))^{30/(1-λ_max)²}`,
    /// `N₀ = max(1/C₁, C₂)`, `θ = C₁/ln(n/ε)`, `T = C₂ θ^{-2·10⁵} ln(2n/ε)`.
    pub fn table(n: usize, p_min: f64, lambda_max: f64, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::param(format!("ε must lie in (0, 1), got {eps}")));
        }
        if !(p_min > 0.0 && p_min < 1.0 && (0.0..1.0).contains(&lambda_max)) {
            return Err(Error::param("need p_min ∈ (0,1) and λ_max ∈ [0,1)"));
        }
        let slack = 1.0 - lambda_max;
        let c1 = 1e-27 * slack * p_min;
        let log_c2 = 30.0 / (slack * slack) * (2.0 / (p_min * slack)).ln();
        let log_n0 = (-c1.ln()).max(log_c2);
        let nf = (n.max(1)) as f64;
        let theta = c1 / (nf / eps).ln();
        let log_t = log_c2 - 2e5 * theta.ln() + (2.0 * nf / eps).ln().ln();
        Ok(RcParams {
            c1,
            log_c2,
            log_n0,
            theta,
            log_t,
        })
    }
}

/// Replacements for the desk-impractical table values.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RcOverrides {
    pub theta: Option<f64>,
    pub steps: Option<u64>,
    pub n0: Option<f64>,
    /// Glauber updates per inner resample; defaults to `⌈10 m ln m⌉`.
    pub inner_steps: Option<u64>,
}

/// Field-dynamics step counts above this are refused.
pub const MAX_FIELD_STEPS: f64 = 1e9;

pub fn default_inner_steps(m: usize) -> u64 {
    let m = m.max(2) as f64;
    (10.0 * m * m.ln()).ceil() as u64
}

/// Brute force when `n < N₀`; otherwise `T` field-dynamics steps from
/// `X = E`, each resampled by Glauber dynamics on the tilted measure.
pub fn sample_rc<R: Rng + ?Sized>(
    g: &Graph,
    spec: &RandomClusterSpec,
    eps: f64,
    overrides: &RcOverrides,
    rng: &mut R,
) -> Result<EdgeSet> {
    let params = RcParams::table(g.n(), spec.p_min(), spec.lambda_max(), eps)?;
    let n0 = overrides.n0.map_or(params.log_n0, f64::ln);
    if (g.n() as f64).ln() < n0 {
        return Ok(RcDistribution::new(g, spec)?.sample(rng));
    }
    let theta = overrides.theta.unwrap_or(params.theta);
    let steps = match overrides.steps {
        Some(t) => t,
        None if params.log_t <= MAX_FIELD_STEPS.ln() => params.log_t.exp().ceil() as u64,
        None => return Err(Error::Infeasible { k: params.log_t.exp() }),
    };
    let inner = overrides.inner_steps.unwrap_or_else(|| default_inner_steps(g.m()));
    let mut x = vec![true; g.m()];
    for _ in 0..steps {
        x = field_dynamics_step(&x, spec, theta, rng, |tilted, start, r| glauber_rc(g, tilted, start, inner, r))?;
    }
    Ok(x)
}

/// Each component `C` of `(V, S)` is all `+1` with probability
/// `∏λ/(1+∏λ)`, else all `-1`. Returns `true` for `+1`.
pub fn edwards_sokal_spin<R: Rng + ?Sized>(g: &Graph, set: &[bool], spec: &RandomClusterSpec, rng: &mut R) -> Vec<bool> {
    let mut spins = vec![false; g.n()];
    for comp in components(g, set) {
        let prod: f64 = comp.iter().map(|&v| spec.lambda[v]).product();
        let plus = rng.random::<f64>() < prod / (1.0 + prod);
        for v in comp {
            spins[v] = plus;
        }
    }
    spins
}
