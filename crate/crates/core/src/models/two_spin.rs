//! 2-spin systems `λ^{n₊} γ₁^{m₊} γ₂^{m₋}` as gross Gibbs models.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::graph::Graph;
use crate::beta::Beta;
use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::model::GrossGibbsModel;
use crate::numeric::{log_sum_exp, scaled};

/// Largest vertex count enumerated by brute force (`2²⁰` configurations).
pub const MAX_SPIN_VERTICES: usize = 20;
const BLOCK_BITS: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoSpinSpec {
    pub gamma1: f64,
    pub gamma2: f64,
    pub lambda: f64,
}

impl TwoSpinSpec {
    pub fn new(gamma1: f64, gamma2: f64, lambda: f64) -> Result<Self> {
        let ok = gamma1.is_finite() && gamma2.is_finite() && gamma1 >= 0.0 && gamma1 <= gamma2 && gamma2 > 0.0;
        if !ok {
            return Err(Error::param(format!(
                "2-spin parameters need 0 ≤ γ₁ ≤ γ₂, γ₂ > 0; got γ₁ = {gamma1}, γ₂ = {gamma2}"
            )));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::param(format!("λ must be positive and finite, got {lambda}")));
        }
        Ok(TwoSpinSpec { gamma1, gamma2, lambda })
    }

    /// Independent sets: `γ₁ = 0, γ₂ = 1`.
    pub fn hardcore(lambda: f64) -> Result<Self> {
        Self::new(0.0, 1.0, lambda)
    }

    pub fn is_antiferro(&self) -> bool {
        self.gamma1 * self.gamma2 < 1.0
    }

    pub fn with_lambda(self, lambda: f64) -> Result<Self> {
        Self::new(self.gamma1, self.gamma2, lambda)
    }
}

/// Which side of a non-uniqueness window the target activity lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Interval {
    /// Anneal from `λ = 0` up to `λ̂`: `H = n₊`, `β = ln λ`.
    First,
    /// Anneal from `λ = ∞` down to `λ̂`: `H = n − n₊`, `β = ln(1/λ)`.
    Second,
}

impl std::str::FromStr for Interval {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first" => Ok(Interval::First),
            "second" => Ok(Interval::Second),
            other => Err(Error::param(format!("unknown interval {other:?}"))),
        }
    }
}

pub(crate) fn check_spin_cap(g: &Graph) -> Result<()> {
    if g.n() > MAX_SPIN_VERTICES {
        return Err(Error::TooLarge(format!(
            "{} vertices exceeds the brute-force cap of {MAX_SPIN_VERTICES}",
            g.n()
        )));
    }
    Ok(())
}

/// `(n₊, m₊, m₋)` of a configuration given as a bitmask of `+` vertices.
pub(crate) fn spin_counts(masks: &[u64], n: usize, sigma: u64) -> (u32, u32, u32) {
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let minus = !sigma & full;
    let (mut pp, mut mm) = (0u32, 0u32);
    for (v, &nb) in masks.iter().enumerate() {
        if sigma >> v & 1 == 1 {
            pp += (nb & sigma).count_ones();
        } else {
            mm += (nb & minus).count_ones();
        }
    }
    (sigma.count_ones(), pp / 2, mm / 2)
}

/// Number of configurations with each `(n₊, m₊, m₋)`, reduced over
/// fixed-size blocks in a deterministic order.
pub fn spin_count_table(g: &Graph) -> Result<BTreeMap<(u32, u32, u32), u64>> {
    check_spin_cap(g)?;
    let n = g.n();
    let masks = g.adjacency_masks();
    let total = 1u64 << n;
    let block = 1u64 << BLOCK_BITS.min(n as u32);
    let blocks: Vec<BTreeMap<(u32, u32, u32), u64>> = (0..total / block)
        .into_par_iter()
        .map(|b| {
            let mut t = BTreeMap::new();
            for sigma in b * block..(b + 1) * block {
                *t.entry(spin_counts(&masks, n, sigma)).or_insert(0) += 1;
            }
            t
        })
        .collect();
    let mut out = BTreeMap::new();
    for t in blocks {
        for (key, c) in t {
            *out.entry(key).or_insert(0) += c;
        }
    }
    Ok(out)
}

/// Histogram over `H` with `c_x = Σ_{H(σ)=x} γ₁^{m₊} γ₂^{m₋}`. The activity
/// `λ` of `spec` is not used: it enters only through `β`.
pub fn enumerate_two_spin(g: &Graph, spec: &TwoSpinSpec, flipped: bool) -> Result<GrossGibbsModel> {
    let table = spin_count_table(g)?;
    let (l1, l2) = (spec.gamma1.ln(), spec.gamma2.ln());
    let n = g.n() as u32;
    let mut by_x: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
    for (&(np, mp, mm), &c) in &table {
        let w = (c as f64).ln() + scaled(l1, mp as f64) + scaled(l2, mm as f64);
        if w > f64::NEG_INFINITY {
            let x = if flipped { n - np } else { np };
            by_x.entry(x).or_default().push(w);
        }
    }
    GrossGibbsModel::new(by_x.into_iter().map(|(x, ws)| (x as f64, log_sum_exp(&ws))))
}

/// `ln Z^{2-spin}` at the spec's own `λ`, from the count table.
pub fn two_spin_log_partition(g: &Graph, spec: &TwoSpinSpec) -> Result<f64> {
    let table = spin_count_table(g)?;
    let (l1, l2, ll) = (spec.gamma1.ln(), spec.gamma2.ln(), spec.lambda.ln());
    let terms: Vec<f64> = table
        .iter()
        .map(|(&(np, mp, mm), &c)| {
            (c as f64).ln() + scaled(ll, np as f64) + scaled(l1, mp as f64) + scaled(l2, mm as f64)
        })
        .collect();
    Ok(log_sum_exp(&terms))
}

/// Annealing bounds for target activity `λ̂`.
///
/// First interval: `β ∈ [-∞, ln λ̂]`, `h = n`, and
/// `q = n ln(1+λ̂) + m·max(0, ln(1/γ₂))`. Second interval:
/// `β ∈ [-∞, ln(1/λ̂)]`, `h = n`, `q = m ln(max(1, γ₂)/γ₁) + n ln(1+1/λ̂)`.
/// The `γ₂`-terms vanish when `γ₂ ≥ 1`; otherwise they are needed for `q`
/// to bound `ln Q`.
pub fn two_spin_bounds(g: &Graph, spec: &TwoSpinSpec, lambda_hat: f64, interval: Interval) -> Result<Bounds> {
    if !(lambda_hat > 0.0 && lambda_hat.is_finite()) {
        return Err(Error::param(format!("λ̂ must be positive and finite, got {lambda_hat}")));
    }
    let (n, m) = (g.n() as f64, g.m() as f64);
    if n == 0.0 {
        return Err(Error::param("graph has no vertices"));
    }
    match interval {
        Interval::First => {
            let q = n * lambda_hat.ln_1p() + m * (-spec.gamma2.ln()).max(0.0);
            Bounds::new(q, n, Beta::NEG_INFINITY, Beta::new(lambda_hat.ln())?)
        }
        Interval::Second => {
            if spec.gamma1 <= 0.0 {
                return Err(Error::param("the second interval requires γ₁ > 0"));
            }
            let q = m * (spec.gamma2.max(1.0) / spec.gamma1).ln() + n * (1.0 / lambda_hat).ln_1p();
            Bounds::new(q, n, Beta::NEG_INFINITY, Beta::new(-lambda_hat.ln())?)
        }
    }
}
