//! End-to-end estimators: the non-adaptive pipeline, the three-round
//! pipeline, a sequential TPA-based pipeline, and median boosting.

use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beta::Beta;
use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::oracle::GibbsOracle;
use crate::ppe::{check_epsilon, ppe_estimate, required_k, PpeSegmentStats};
use crate::schedule::Schedule;
use crate::schedules::{pseudo_tpa, static_schedule, tpa_union_counted, PseudoTpaTranscript};

/// Curvature cap behind the non-adaptive sample size.
pub const NONADAPTIVE_KAPPA: f64 = 3.0;
/// Curvature cap used by the adaptive pipelines unless overridden.
pub const DEFAULT_KAPPA_CAP: f64 = 30.0;
/// Per-side sample counts above this are refused unless explicitly allowed.
pub const FEASIBLE_K_LIMIT: u64 = 1_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "static")]
    Static,
    #[serde(rename = "three-round")]
    ThreeRound,
    #[serde(rename = "tpa")]
    Tpa,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Static => "static",
            Algorithm::ThreeRound => "three-round",
            Algorithm::Tpa => "tpa",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "static" => Ok(Algorithm::Static),
            "three-round" => Ok(Algorithm::ThreeRound),
            "tpa" => Ok(Algorithm::Tpa),
            other => Err(Error::param(format!("unknown algorithm {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimatorOptions {
    pub kappa_cap: f64,
    /// Run even when `k` exceeds [`FEASIBLE_K_LIMIT`].
    pub allow_infeasible: bool,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        EstimatorOptions {
            kappa_cap: DEFAULT_KAPPA_CAP,
            allow_infeasible: false,
        }
    }
}

impl EstimatorOptions {
    pub fn with_kappa_cap(kappa_cap: f64) -> Self {
        EstimatorOptions {
            kappa_cap,
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub log_q_hat: f64,
    pub schedule: Schedule,
    pub samples_total: u64,
    pub samples_by_round: Vec<u64>,
    pub epsilon: f64,
    pub algorithm: String,
    pub seed: u64,
    pub kappa_cap: f64,
    /// PPE samples per segment side.
    pub k: u64,
    pub segments: Vec<PpeSegmentStats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transcript: Option<PseudoTpaTranscript>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicas: Option<usize>,
}

impl EstimateReport {
    /// Number of barrier-separated sampling rounds.
    pub fn rounds(&self) -> usize {
        self.samples_by_round.len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// `θ = 1/(4 ln h)` with `h` lifted to at least 2, clamped to `(0, 1]`.
pub fn schedule_theta(bounds: &Bounds) -> f64 {
    (1.0 / (4.0 * bounds.effective_h().ln())).min(1.0)
}

fn feasible_k(kappa_cap: f64, eps: f64, allow: bool) -> Result<u64> {
    let k = required_k(kappa_cap, eps)?;
    if k > FEASIBLE_K_LIMIT && !allow {
        return Err(Error::Infeasible { k: k as f64 });
    }
    Ok(k)
}

/// The schedule and per-side sample count of the non-adaptive pipeline,
/// which depend on `(bounds, ε)` alone.
pub fn nonadaptive_plan(bounds: &Bounds, eps: f64) -> Result<(Schedule, u64)> {
    check_epsilon(eps)?;
    let schedule = static_schedule(bounds, schedule_theta(bounds))?;
    let k = required_k(NONADAPTIVE_KAPPA, eps)?;
    Ok((schedule, k))
}

/// Single sampling round: `PPE(StaticSchedule(1/(4 ln h)), ⌈100(e³-1)/ε²⌉)`.
pub fn estimate_nonadaptive<O>(oracle: &O, bounds: &Bounds, eps: f64, seed: u64) -> Result<EstimateReport>
where
    O: GibbsOracle + ?Sized,
{
    let (schedule, k) = nonadaptive_plan(bounds, eps)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let out = ppe_estimate(oracle, &schedule, k, &mut rng)?;
    Ok(EstimateReport {
        log_q_hat: out.log_q_hat,
        schedule,
        samples_total: out.samples,
        samples_by_round: vec![out.samples],
        epsilon: eps,
        algorithm: Algorithm::Static.name().into(),
        seed,
        kappa_cap: NONADAPTIVE_KAPPA,
        k,
        segments: out.segments,
        transcript: None,
        replicas: None,
    })
}

/// Three sampling rounds: the two rounds of `PseudoTPA(1/(4 ln h))`, then PPE
/// with `k = ⌈100(e^{κ_cap}-1)/ε²⌉`.
pub fn estimate_three_round<O>(
    oracle: &O,
    bounds: &Bounds,
    eps: f64,
    seed: u64,
    opts: &EstimatorOptions,
) -> Result<EstimateReport>
where
    O: GibbsOracle + ?Sized,
{
    check_epsilon(eps)?;
    // refuse before drawing anything
    let k = feasible_k(opts.kappa_cap, eps, opts.allow_infeasible)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (schedule, transcript) = pseudo_tpa(oracle, bounds, schedule_theta(bounds), &mut rng)?;
    let out = ppe_estimate(oracle, &schedule, k, &mut rng)?;
    let by_round = vec![transcript.round1_draws, transcript.round2_draws, out.samples];
    Ok(EstimateReport {
        log_q_hat: out.log_q_hat,
        schedule,
        samples_total: by_round.iter().sum(),
        samples_by_round: by_round,
        epsilon: eps,
        algorithm: Algorithm::ThreeRound.name().into(),
        seed,
        kappa_cap: opts.kappa_cap,
        k,
        segments: out.segments,
        transcript: Some(transcript),
        replicas: None,
    })
}

/// Sequential baseline: `TPA(⌈2/θ⌉)` with `θ = 1/(4 ln h)`, then PPE.
pub fn estimate_tpa<O>(
    oracle: &O,
    bounds: &Bounds,
    eps: f64,
    seed: u64,
    opts: &EstimatorOptions,
) -> Result<EstimateReport>
where
    O: GibbsOracle + ?Sized,
{
    check_epsilon(eps)?;
    let k = feasible_k(opts.kappa_cap, eps, opts.allow_infeasible)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let runs = (2.0 / schedule_theta(bounds)).ceil() as usize;
    let (schedule, tpa_draws) = tpa_union_counted(oracle, bounds, runs, &mut rng)?;
    let out = ppe_estimate(oracle, &schedule, k, &mut rng)?;
    let by_round = vec![tpa_draws, out.samples];
    Ok(EstimateReport {
        log_q_hat: out.log_q_hat,
        schedule,
        samples_total: by_round.iter().sum(),
        samples_by_round: by_round,
        epsilon: eps,
        algorithm: Algorithm::Tpa.name().into(),
        seed,
        kappa_cap: opts.kappa_cap,
        k,
        segments: out.segments,
        transcript: None,
        replicas: None,
    })
}

/// Dispatches on [`Algorithm`].
pub fn estimate<O>(
    oracle: &O,
    algorithm: Algorithm,
    bounds: &Bounds,
    eps: f64,
    seed: u64,
    opts: &EstimatorOptions,
) -> Result<EstimateReport>
where
    O: GibbsOracle + ?Sized,
{
    match algorithm {
        Algorithm::Static => estimate_nonadaptive(oracle, bounds, eps, seed),
        Algorithm::ThreeRound => estimate_three_round(oracle, bounds, eps, seed, opts),
        Algorithm::Tpa => estimate_tpa(oracle, bounds, eps, seed, opts),
    }
}

/// `⌈24 ln(1/δ)⌉` replicas.
pub fn boost_replicas(delta: f64) -> Result<usize> {
    if !(delta > 0.0 && delta <= 0.3) {
        return Err(Error::param(format!("delta must lie in (0, 0.3], got {delta}")));
    }
    Ok((24.0 * (1.0 / delta).ln()).ceil().max(1.0) as usize)
}

/// Runs `⌈24 ln(1/δ)⌉` independent replicas concurrently and reports the
/// median `ln Q̂` (the lower median for an even count). Sample counts are
/// summed over replicas.
pub fn median_boost<F>(run: F, delta: f64, seed: u64) -> Result<EstimateReport>
where
    F: Fn(u64) -> Result<EstimateReport> + Sync,
{
    let r = boost_replicas(delta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..r).map(|_| rng.next_u64()).collect();
    let mut reports: Vec<EstimateReport> = seeds.into_par_iter().map(&run).collect::<Result<_>>()?;
    let samples_total = reports.iter().map(|r| r.samples_total).sum();
    let rounds = reports.iter().map(|r| r.samples_by_round.len()).max().unwrap_or(0);
    let mut by_round = vec![0u64; rounds];
    for rep in &reports {
        for (slot, n) in by_round.iter_mut().zip(&rep.samples_by_round) {
            *slot += n;
        }
    }
    reports.sort_by(|a, b| a.log_q_hat.total_cmp(&b.log_q_hat));
    let mut median = reports.swap_remove((r - 1) / 2);
    median.algorithm = format!("{}+median", median.algorithm);
    median.samples_total = samples_total;
    median.samples_by_round = by_round;
    median.seed = seed;
    median.replicas = Some(r);
    Ok(median)
}

/// Converts a `ln Q̂` estimate to `ln Ẑ(β_max)` given the known `ln Z(β_min)`.
pub fn log_z_from_log_q(log_q: f64, log_z_min: f64) -> f64 {
    log_q + log_z_min
}

/// Convenience for reports: the schedule's endpoints.
pub fn report_range(report: &EstimateReport) -> (Beta, Beta) {
    (report.schedule.beta_min(), report.schedule.beta_max())
}
