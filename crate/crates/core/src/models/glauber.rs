//! Single-site heat-bath Glauber dynamics and the sampling oracle built on
//! them. Every draw runs a fresh chain on its own substream.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::graph::Graph;
use super::ising::IsingSpec;
use super::two_spin::{Interval, TwoSpinSpec};
use crate::beta::Beta;
use crate::error::{Error, Result};
use crate::numeric::scaled;
use crate::oracle::{stream_rng, substream, GibbsOracle};

fn prob_from_log_odds(lo: f64) -> f64 {
    if lo == f64::INFINITY {
        1.0
    } else if lo == f64::NEG_INFINITY {
        0.0
    } else {
        1.0 / (1.0 + (-lo).exp())
    }
}

/// Heat-bath probability that `v` becomes `+` given the rest of `sigma`:
/// odds `λ γ₁^{k₊} / γ₂^{k₋}` over `+`/`-` neighbour counts.
pub fn two_spin_plus_probability(g: &Graph, spec: &TwoSpinSpec, log_lambda: f64, sigma: &[bool], v: usize) -> f64 {
    let kp = g.neighbors(v).iter().filter(|&&u| sigma[u]).count() as f64;
    let km = g.degree(v) as f64 - kp;
    let base = scaled(spec.gamma1.ln(), kp) - scaled(spec.gamma2.ln(), km);
    if base == f64::NEG_INFINITY {
        return 0.0;
    }
    prob_from_log_odds(log_lambda + base)
}

fn two_spin_chain<R: Rng + ?Sized>(
    g: &Graph,
    spec: &TwoSpinSpec,
    log_lambda: f64,
    mut sigma: Vec<bool>,
    steps: u64,
    rng: &mut R,
) -> Vec<bool> {
    if g.n() == 0 {
        return sigma;
    }
    for _ in 0..steps {
        let v = rng.random_range(0..g.n());
        let p = two_spin_plus_probability(g, spec, log_lambda, &sigma, v);
        sigma[v] = rng.random::<f64>() < p;
    }
    sigma
}

/// `steps` heat-bath updates at the spec's own activity, from `start`.
pub fn glauber_two_spin<R: Rng + ?Sized>(
    g: &Graph,
    spec: &TwoSpinSpec,
    start: Vec<bool>,
    steps: u64,
    rng: &mut R,
) -> Vec<bool> {
    two_spin_chain(g, spec, spec.lambda.ln(), start, steps, rng)
}

/// Heat-bath dynamics on matchings: pick an edge uniformly; if both ends are
/// otherwise free it is in the matching with probability `λ/(1+λ)`.
pub fn glauber_matchings<R: Rng + ?Sized>(
    g: &Graph,
    log_lambda: f64,
    mut matched: Vec<bool>,
    steps: u64,
    rng: &mut R,
) -> Vec<bool> {
    let m = g.m();
    if m == 0 {
        return matched;
    }
    let mut cover = vec![usize::MAX; g.n()];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if matched[e] {
            cover[u] = e;
            cover[v] = e;
        }
    }
    let p_in = prob_from_log_odds(log_lambda);
    for _ in 0..steps {
        let e = rng.random_range(0..m);
        let (u, v) = g.edges()[e];
        let free = |w: usize| cover[w] == usize::MAX || cover[w] == e;
        if !(free(u) && free(v)) {
            continue;
        }
        let take = rng.random::<f64>() < p_in;
        matched[e] = take;
        let c = if take { e } else { usize::MAX };
        cover[u] = c;
        cover[v] = c;
    }
    matched
}

/// Heat-bath Ising dynamics at annealing parameter `β`, where vertex `v`
/// carries activity `e^{β·field_v}`; vertices with infinite field stay `-`.
pub fn glauber_ising<R: Rng + ?Sized>(
    g: &Graph,
    spec: &IsingSpec,
    beta: Beta,
    mut sigma: Vec<bool>,
    steps: u64,
    rng: &mut R,
) -> Vec<bool> {
    if g.n() == 0 {
        return sigma;
    }
    let field = spec.field();
    let mut inc: Vec<Vec<(usize, f64)>> = vec![Vec::new(); g.n()];
    for (&(u, v), &ge) in g.edges().iter().zip(&spec.gamma) {
        inc[u].push((v, ge.ln()));
        inc[v].push((u, ge.ln()));
    }
    for _ in 0..steps {
        let v = rng.random_range(0..g.n());
        let p = if field[v].is_infinite() {
            0.0
        } else {
            let mut lo = scaled(beta.value(), field[v]);
            for &(u, lg) in &inc[v] {
                lo += if sigma[u] { lg } else { -lg };
            }
            prob_from_log_odds(lo)
        };
        sigma[v] = rng.random::<f64>() < p;
    }
    sigma
}

/// A model whose Gibbs distributions Glauber dynamics can sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpinModelSpec {
    TwoSpin { spec: TwoSpinSpec, interval: Interval },
    Matchings { lambda: f64 },
    Ising { spec: IsingSpec },
}

impl SpinModelSpec {
    /// Number of sites the chain updates: vertices, or edges for matchings.
    pub fn sites(&self, g: &Graph) -> usize {
        match self {
            SpinModelSpec::Matchings { .. } => g.m(),
            _ => g.n(),
        }
    }
}

/// `⌈10 N ln N⌉` single-site updates for `N` sites.
pub fn default_steps(sites: usize) -> u64 {
    let n = sites.max(2) as f64;
    (10.0 * n * n.ln()).ceil() as u64
}

/// Each draw at `β` runs a fresh chain from the `H = 0` configuration for
/// `steps_per_sample` updates and reports `H` of the final state.
#[derive(Debug)]
pub struct GlauberOracle {
    graph: Graph,
    model: SpinModelSpec,
    steps: u64,
    seed: u64,
    counter: AtomicU64,
}

impl GlauberOracle {
    pub fn new(graph: Graph, model: SpinModelSpec, steps_per_sample: u64, seed: u64) -> Result<Self> {
        if let SpinModelSpec::Ising { spec } = &model {
            if spec.gamma.len() != graph.m() || spec.lambda.len() != graph.n() {
                return Err(Error::param("Ising spec does not match the graph"));
            }
        }
        if let SpinModelSpec::TwoSpin { spec, interval: Interval::Second } = &model {
            if spec.gamma1 <= 0.0 {
                return Err(Error::param("the second interval requires γ₁ > 0"));
            }
        }
        Ok(GlauberOracle {
            graph,
            model,
            steps: steps_per_sample,
            seed,
            counter: AtomicU64::new(0),
        })
    }

    pub fn steps_per_sample(&self) -> u64 {
        self.steps
    }

    fn one<R: Rng + ?Sized>(&self, beta: Beta, rng: &mut R) -> f64 {
        let g = &self.graph;
        let b = beta.value();
        match &self.model {
            SpinModelSpec::TwoSpin { spec, interval } => {
                let (log_lambda, start) = match interval {
                    Interval::First => (b, vec![false; g.n()]),
                    Interval::Second => (-b, vec![true; g.n()]),
                };
                let s = two_spin_chain(g, spec, log_lambda, start, self.steps, rng);
                let plus = s.iter().filter(|&&x| x).count();
                match interval {
                    Interval::First => plus as f64,
                    Interval::Second => (g.n() - plus) as f64,
                }
            }
            SpinModelSpec::Matchings { .. } => {
                let mt = glauber_matchings(g, b, vec![false; g.m()], self.steps, rng);
                mt.iter().filter(|&&x| x).count() as f64
            }
            SpinModelSpec::Ising { spec } => {
                let s = glauber_ising(g, spec, beta, vec![false; g.n()], self.steps, rng);
                let field = spec.field();
                (0..g.n()).filter(|&v| s[v]).map(|v| field[v]).sum()
            }
        }
    }
}

/// Builds a [`GlauberOracle`]; `steps_per_sample` must be at least 1.
pub fn oracle_from_glauber(g: Graph, model: SpinModelSpec, steps_per_sample: u64, seed: u64) -> Result<GlauberOracle> {
    if steps_per_sample == 0 {
        return Err(Error::param("steps_per_sample must be at least 1"));
    }
    GlauberOracle::new(g, model, steps_per_sample, seed)
}

impl GibbsOracle for GlauberOracle {
    fn draw(&self, beta: Beta, count: usize, stream: u64) -> Result<Vec<f64>> {
        let out: Vec<f64> = (0..count as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream_rng(self.seed, substream(stream, i, 0));
                self.one(beta, &mut rng)
            })
            .collect();
        self.counter.fetch_add(count as u64, Ordering::Relaxed);
        Ok(out)
    }

    fn draws(&self) -> u64 {
        self.counter.load(Ordering::Relaxed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_steps_reports_initial_state() {
        let g = Graph::path(4);
        let model = SpinModelSpec::TwoSpin {
            spec: TwoSpinSpec::hardcore(1.0).unwrap(),
            interval: Interval::First,
        };
        let o = GlauberOracle::new(g, model, 0, 1).unwrap();
        assert_eq!(o.draw(Beta::finite(3.0), 5, 0).unwrap(), vec![0.0; 5]);
        assert!(oracle_from_glauber(Graph::path(2), SpinModelSpec::Matchings { lambda: 1.0 }, 0, 1).is_err());
    }

    #[test]
    fn replayable() {
        let g = Graph::cycle(5).unwrap();
        let o = oracle_from_glauber(g, SpinModelSpec::Matchings { lambda: 1.0 }, 50, 9).unwrap();
        let a = o.draw(Beta::ZERO, 100, 4).unwrap();
        assert_eq!(a, o.draw(Beta::ZERO, 100, 4).unwrap());
        assert_ne!(a, o.draw(Beta::ZERO, 100, 5).unwrap());
        assert_eq!(o.draws(), 300);
    }

    #[test]
    fn neg_infinity_gives_zero_hamiltonian() {
        let g = Graph::path(3);
        let spec = TwoSpinSpec::new(0.5, 0.8, 1.0).unwrap();
        for interval in [Interval::First, Interval::Second] {
            let o = oracle_from_glauber(g.clone(), SpinModelSpec::TwoSpin { spec, interval }, 100, 2).unwrap();
            assert!(o.draw(Beta::NEG_INFINITY, 20, 0).unwrap().iter().all(|&x| x == 0.0));
        }
    }
}
