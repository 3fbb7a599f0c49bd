//! Monomer-dimer model: matchings weighted `λ^{|M|}`.

use super::graph::Graph;
use crate::beta::Beta;
use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::model::GrossGibbsModel;

/// Largest edge count enumerated by brute force.
pub const MAX_MATCHING_EDGES: usize = 24;

pub(crate) fn check_edge_cap(g: &Graph) -> Result<()> {
    if g.m() > MAX_MATCHING_EDGES {
        return Err(Error::TooLarge(format!(
            "{} edges exceeds the brute-force cap of {MAX_MATCHING_EDGES}",
            g.m()
        )));
    }
    Ok(())
}

/// `counts[s]` = number of matchings with `s` edges.
pub fn matching_counts(g: &Graph) -> Result<Vec<u64>> {
    check_edge_cap(g)?;
    let mut counts = vec![0u64; g.n() / 2 + 1];
    let mut used = vec![false; g.n()];
    extend(g.edges(), 0, 0, &mut used, &mut counts);
    Ok(counts)
}

fn extend(edges: &[(usize, usize)], from: usize, size: usize, used: &mut [bool], counts: &mut [u64]) {
    counts[size] += 1;
    for (i, &(u, v)) in edges.iter().enumerate().skip(from) {
        if !used[u] && !used[v] {
            used[u] = true;
            used[v] = true;
            extend(edges, i + 1, size + 1, used, counts);
            used[u] = false;
            used[v] = false;
        }
    }
}

/// Histogram over `H = |M|` with `c_x` the number of matchings of size `x`.
pub fn enumerate_matchings(g: &Graph) -> Result<GrossGibbsModel> {
    let counts = matching_counts(g)?;
    GrossGibbsModel::from_weights(counts.iter().enumerate().map(|(s, &c)| (s as f64, c as f64)))
}

/// Anneal `β = ln λ` from `-∞` to `ln λ̂` with `q = m ln(1+λ̂)`, `h = m`.
pub fn matching_bounds(g: &Graph, lambda_hat: f64) -> Result<Bounds> {
    if !(lambda_hat > 0.0 && lambda_hat.is_finite()) {
        return Err(Error::param(format!("λ̂ must be positive and finite, got {lambda_hat}")));
    }
    if g.m() == 0 {
        return Err(Error::param("graph has no edges"));
    }
    let m = g.m() as f64;
    Bounds::new(m * lambda_hat.ln_1p(), m, Beta::NEG_INFINITY, Beta::new(lambda_hat.ln())?)
}
