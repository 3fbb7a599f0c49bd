//! Gross Gibbs distributions given by an explicit histogram of Hamiltonian
//! values, with exact evaluation of the log partition function and its
//! derived quantities.

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::beta::Beta;
use crate::error::{Error, Result};
use crate::numeric::{log_sum_exp, scaled};

/// Support points whose Hamiltonian values differ by at most this much are
/// merged into one.
pub const MERGE_TOLERANCE: f64 = 1e-12;

/// Values in `[1 - ONE_SLACK, 1)` are accepted as `1` up to rounding, which
/// arises from rescaled real-valued Hamiltonians.
const ONE_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupportPoint {
    /// Hamiltonian value, in `{0} ∪ [1, ∞)`.
    pub x: f64,
    /// Natural log of the (unnormalized) coefficient `c_x`.
    pub log_c: f64,
}

/// `μ_β(x) ∝ c_x e^{βx}` over a finite sorted support.
#[derive(Clone, Debug, PartialEq)]
pub struct GrossGibbsModel {
    support: Vec<SupportPoint>,
}

impl GrossGibbsModel {
    /// Builds a model from `(x, log_c)` pairs. Points are sorted and merged
    /// within [`MERGE_TOLERANCE`]; weights are only meaningful up to scaling.
    pub fn new(points: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut pts: Vec<SupportPoint> = Vec::new();
        for (x, log_c) in points {
            if !x.is_finite() {
                return Err(Error::InvalidModel(format!("Hamiltonian value {x} is not finite")));
            }
            if x != 0.0 && x < 1.0 - ONE_SLACK {
                return Err(Error::InvalidModel(format!(
                    "Hamiltonian value {x} outside {{0}} ∪ [1, ∞)"
                )));
            }
            if !log_c.is_finite() {
                return Err(Error::InvalidModel(format!(
                    "log-weight {log_c} at x = {x} is not finite"
                )));
            }
            pts.push(SupportPoint { x, log_c });
        }
        if pts.is_empty() {
            return Err(Error::InvalidModel("empty support".into()));
        }
        pts.sort_by(|a, b| a.x.total_cmp(&b.x));
        let mut merged: Vec<SupportPoint> = Vec::with_capacity(pts.len());
        for p in pts {
            match merged.last_mut() {
                Some(last) if (p.x - last.x).abs() <= MERGE_TOLERANCE => {
                    last.log_c = log_sum_exp(&[last.log_c, p.log_c]);
                }
                _ => merged.push(p),
            }
        }
        Ok(GrossGibbsModel { support: merged })
    }

    /// Builds a model from nonnegative weights, dropping zero-weight points.
    pub fn from_weights(points: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut logged = Vec::new();
        for (x, c) in points {
            if !(c >= 0.0) {
                return Err(Error::InvalidModel(format!("negative weight {c} at x = {x}")));
            }
            if c > 0.0 {
                logged.push((x, c.ln()));
            }
        }
        Self::new(logged)
    }

    /// A single support point `x` with unit weight.
    pub fn point(x: f64) -> Result<Self> {
        Self::new([(x, 0.0)])
    }

    pub fn support(&self) -> &[SupportPoint] {
        &self.support
    }

    /// `ln c_0`, if `0` is in the support.
    pub fn log_c0(&self) -> Option<f64> {
        self.support.first().filter(|p| p.x == 0.0).map(|p| p.log_c)
    }

    pub fn max_hamiltonian(&self) -> f64 {
        self.support.last().map(|p| p.x).unwrap_or(0.0)
    }

    /// Unnormalized log-probabilities `ln c_x + βx`.
    fn log_terms(&self, beta: Beta) -> Vec<f64> {
        let b = beta.value();
        self.support.iter().map(|p| p.log_c + scaled(b, p.x)).collect()
    }

    /// `z(β) = ln Z(β)`; `Z(-∞) = c_0`.
    pub fn log_partition(&self, beta: Beta) -> Result<f64> {
        if beta.is_neg_infinite() {
            return self.log_c0().ok_or(Error::DegenerateModel);
        }
        Ok(log_sum_exp(&self.log_terms(beta)))
    }

    /// `z(β₁, β₂) = z(β₂) - z(β₁)`.
    pub fn log_ratio(&self, from: Beta, to: Beta) -> Result<f64> {
        Ok(self.log_partition(to)? - self.log_partition(from)?)
    }

    /// Normalized probabilities of the support points under `μ_β`.
    pub fn probabilities(&self, beta: Beta) -> Result<Vec<f64>> {
        if beta.is_neg_infinite() {
            if self.log_c0().is_none() {
                return Err(Error::DegenerateModel);
            }
            let mut p = vec![0.0; self.support.len()];
            p[0] = 1.0;
            return Ok(p);
        }
        let terms = self.log_terms(beta);
        let z = log_sum_exp(&terms);
        Ok(terms.into_iter().map(|t| (t - z).exp()).collect())
    }

    /// `z'(β) = E[X]`.
    pub fn mean_hamiltonian(&self, beta: Beta) -> Result<f64> {
        let probs = self.probabilities(beta)?;
        Ok(self.support.iter().zip(&probs).map(|(s, p)| s.x * p).sum())
    }

    /// `z''(β) = Var[X]`.
    pub fn var_hamiltonian(&self, beta: Beta) -> Result<f64> {
        let probs = self.probabilities(beta)?;
        let mean: f64 = self.support.iter().zip(&probs).map(|(s, p)| s.x * p).sum();
        Ok(self
            .support
            .iter()
            .zip(&probs)
            .map(|(s, p)| (s.x - mean) * (s.x - mean) * p)
            .sum())
    }

    /// `κ(β₁, β₂) = z(β₁) - 2 z((β₁+β₂)/2) + z(β₂)`; the midpoint of an
    /// interval starting at `-∞` is `-∞`.
    pub fn curvature_pair(&self, lo: Beta, hi: Beta) -> Result<f64> {
        if lo >= hi {
            return Err(Error::param(format!("curvature needs β₁ < β₂, got {lo} and {hi}")));
        }
        let mid = lo.midpoint(hi);
        let k = self.log_partition(lo)? - 2.0 * self.log_partition(mid)? + self.log_partition(hi)?;
        // convexity makes κ nonnegative; clip rounding noise
        Ok(k.max(0.0))
    }

    /// Inverse-CDF sampler for `μ_β`.
    pub fn sampler(&self, beta: Beta) -> Result<ExactSampler> {
        let probs = self.probabilities(beta)?;
        let mut cdf = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for p in &probs {
            acc += p;
            cdf.push(acc);
        }
        if let Some(last) = cdf.last_mut() {
            *last = 1.0;
        }
        Ok(ExactSampler {
            values: self.support.iter().map(|s| s.x).collect(),
            probs,
            cdf,
        })
    }

    /// One exact draw from `μ_β`; `β = -∞` always yields `0`.
    pub fn exact_sample<R: Rng + ?Sized>(&self, beta: Beta, rng: &mut R) -> Result<f64> {
        Ok(self.sampler(beta)?.sample(rng))
    }
}

/// Precomputed cumulative distribution of `μ_β` for repeated draws.
#[derive(Clone, Debug)]
pub struct ExactSampler {
    values: Vec<f64>,
    probs: Vec<f64>,
    cdf: Vec<f64>,
}

impl ExactSampler {
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let idx = self.cdf.partition_point(|&c| c <= u);
        self.values[idx.min(self.values.len() - 1)]
    }

    /// Counts of each support value among `count` i.i.d. draws, obtained by
    /// sequential conditional binomials (an exact multinomial draw).
    pub fn sample_counts<R: Rng + ?Sized>(&self, count: u64, rng: &mut R) -> Vec<(f64, u64)> {
        let mut out = Vec::new();
        let mut remaining = count;
        let mut mass = 1.0;
        for (i, (&x, &p)) in self.values.iter().zip(&self.probs).enumerate() {
            if remaining == 0 {
                break;
            }
            let n = if i + 1 == self.values.len() || mass <= 0.0 {
                remaining
            } else {
                let cond = (p / mass).clamp(0.0, 1.0);
                Binomial::new(remaining, cond)
                    .expect("probability clamped to [0, 1]")
                    .sample(rng)
            };
            mass -= p;
            remaining -= n;
            if n > 0 {
                out.push((x, n));
            }
        }
        out
    }
}
