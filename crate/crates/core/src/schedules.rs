//! Schedule generators: the non-adaptive static schedule (iterative and
//! closed form), the TPA process and its `k`-fold union, and the two-round
//! PseudoTPA construction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beta::Beta;
use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::oracle::GibbsOracle;
use crate::schedule::Schedule;

/// Hard cap on TPA steps and static-schedule iterations.
pub const STEP_CAP: u64 = 1_000_000_000;

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::param(format!("theta must lie in (0, 1], got {theta}")));
    }
    Ok(())
}

/// Unit-rate exponential as `-ln U`, `U` uniform on `(0, 1]`.
pub fn exp1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u = 1.0 - rng.random::<f64>();
    -u.ln()
}

/// Walks down from `β_max` with steps `θ/s_i`, `s_i = min{h, q/(β_max - β_i)}`,
/// stopping once `s_i < θ/2` or the next point would pass `β_min`.
pub fn static_schedule(bounds: &Bounds, theta: f64) -> Result<Schedule> {
    check_theta(theta)?;
    let (q, h) = (bounds.q, bounds.h);
    let top = bounds.beta_max.value();
    let floor = bounds.beta_min.value();
    let mut points = vec![bounds.beta_max];
    let mut beta = top;
    for i in 0..STEP_CAP {
        let s = if i == 0 { h } else { h.min(q / (top - beta)) };
        let next = beta - theta / s;
        if s < theta / 2.0 || next < floor {
            return Schedule::from_points(bounds.beta_min, bounds.beta_max, points);
        }
        points.push(Beta::finite(next));
        beta = next;
    }
    Err(Error::IterationLimit(STEP_CAP))
}

/// The same schedule from the two closed-form phases
/// `β_i = β_max - iθ/h` (`i ≤ t₁ = ⌈q/θ⌉`) and
/// `β_i = β_max - (β_max - β_{t₁})(1 + θ/q)^{i-t₁}` (`i > t₁`), with the
/// stopping index found by a parallel predicate scan.
pub fn static_schedule_closed_form(bounds: &Bounds, theta: f64) -> Result<Schedule> {
    check_theta(theta)?;
    let (q, h) = (bounds.q, bounds.h);
    let top = bounds.beta_max.value();
    let floor = bounds.beta_min.value();
    let t1 = (q / theta).ceil();
    if t1 > STEP_CAP as f64 {
        return Err(Error::IterationLimit(STEP_CAP));
    }
    let t1 = t1 as u64;
    let depth_t1 = t1 as f64 * theta / h;
    let growth = 1.0 + theta / q;

    let beta_at = |i: u64| -> f64 {
        if i <= t1 {
            top - i as f64 * theta / h
        } else {
            top - depth_t1 * growth.powf((i - t1) as f64)
        }
    };
    let step_at = |i: u64| -> f64 {
        if i == 0 {
            h
        } else {
            h.min(q / (top - beta_at(i)))
        }
    };
    let stops = |i: u64| -> bool {
        let s = step_at(i);
        s < theta / 2.0 || beta_at(i) - theta / s < floor
    };

    // After t₁ the step size shrinks geometrically, so s_i < θ/2 no later
    // than t₁ + ln(2q/(θ·depth_t1)) / ln(1 + θ/q).
    let tail = ((2.0 * q / (theta * depth_t1)).ln() / growth.ln()).ceil().max(0.0);
    let horizon = t1 as f64 + tail + 2.0;
    if horizon > STEP_CAP as f64 {
        return Err(Error::IterationLimit(STEP_CAP));
    }
    let horizon = horizon as u64;
    let stop = (0..=horizon)
        .into_par_iter()
        .find_first(|&i| stops(i))
        .ok_or(Error::IterationLimit(horizon))?;
    let points: Vec<Beta> = (0..=stop)
        .into_par_iter()
        .map(|i| Beta::finite(beta_at(i)))
        .collect();
    Schedule::from_points(bounds.beta_min, bounds.beta_max, points)
}

/// One TPA process: from `β_max`, repeatedly draw `X ~ μ_β`, `η ~ Exp(1)`
/// and move to `β - η/X` (`-∞` when `X = 0`) until passing `β_min`.
pub fn tpa_run<O, R>(oracle: &O, bounds: &Bounds, rng: &mut R) -> Result<Schedule>
where
    O: GibbsOracle + ?Sized,
    R: Rng + ?Sized,
{
    tpa_run_counted(oracle, bounds, rng).map(|(s, _)| s)
}

/// [`tpa_run`] together with the number of samples it drew.
pub fn tpa_run_counted<O, R>(oracle: &O, bounds: &Bounds, rng: &mut R) -> Result<(Schedule, u64)>
where
    O: GibbsOracle + ?Sized,
    R: Rng + ?Sized,
{
    let mut points = vec![bounds.beta_max];
    let mut beta = bounds.beta_max;
    for step in 1..=STEP_CAP {
        let x = oracle.draw(beta, 1, rng.next_u64())?[0];
        let eta = exp1(rng);
        let next = if x == 0.0 {
            Beta::NEG_INFINITY
        } else {
            Beta::new(beta.value() - eta / x)?
        };
        if next <= bounds.beta_min {
            return Ok((Schedule::from_points(bounds.beta_min, bounds.beta_max, points)?, step));
        }
        points.push(next);
        beta = next;
    }
    Err(Error::IterationLimit(STEP_CAP))
}

/// `TPA(k)`: the union of `k` independent TPA processes, run concurrently.
pub fn tpa_union<O, R>(oracle: &O, bounds: &Bounds, k: usize, rng: &mut R) -> Result<Schedule>
where
    O: GibbsOracle + ?Sized,
    R: Rng + ?Sized,
{
    tpa_union_counted(oracle, bounds, k, rng).map(|(s, _)| s)
}

/// [`tpa_union`] together with the total number of samples drawn.
pub fn tpa_union_counted<O, R>(oracle: &O, bounds: &Bounds, k: usize, rng: &mut R) -> Result<(Schedule, u64)>
where
    O: GibbsOracle + ?Sized,
    R: Rng + ?Sized,
{
    if k == 0 {
        return Err(Error::param("TPA(k) needs k >= 1"));
    }
    let seeds: Vec<u64> = (0..k).map(|_| rng.next_u64()).collect();
    let runs: Vec<(Schedule, u64)> = seeds
        .into_par_iter()
        .map(|s| tpa_run_counted(oracle, bounds, &mut ChaCha8Rng::seed_from_u64(s)))
        .collect::<Result<_>>()?;
    let draws = runs.iter().map(|r| r.1).sum();
    let points = runs.into_iter().flat_map(|(s, _)| Vec::<Beta>::from(s).into_iter());
    Ok((Schedule::from_points(bounds.beta_min, bounds.beta_max, points)?, draws))
}

/// Thinning probability multiplier in round one.
pub const PSEUDO_TPA_D: usize = 2;
/// Width parameter of the base static schedule.
pub const PSEUDO_TPA_BASE_THETA: f64 = 0.25;

/// Record of the two adaptive sampling rounds of [`pseudo_tpa`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PseudoTpaTranscript {
    pub base_length: usize,
    /// Exponential refinements per admitted point, `⌈8/θ⌉`.
    pub k: u64,
    /// `B'`, including both endpoints.
    pub admitted: Vec<Beta>,
    pub round1_draws: u64,
    pub round2_draws: u64,
}

/// Returns `k = ⌈8/θ⌉`.
pub fn pseudo_tpa_k(theta: f64) -> u64 {
    (8.0 / theta).ceil() as u64
}

/// Two-round local approximation of `TPA(⌈8/θ⌉)`.
///
/// Round one admits each interior point `β_i` of the `θ' = 1/4` static
/// schedule with probability `1 - exp(-(X₁+X₂)(β_{i+1} - β_i))`,
/// `X_j ~ μ_{β_{i+1}}`. Round two adds `β_i - η_j/Y_j`, `Y_j ~ μ_{β_i}`, for
/// every admitted point, then clips to `[β_min, β_max]`.
pub fn pseudo_tpa<O, R>(
    oracle: &O,
    bounds: &Bounds,
    theta: f64,
    rng: &mut R,
) -> Result<(Schedule, PseudoTpaTranscript)>
where
    O: GibbsOracle + ?Sized,
    R: Rng + ?Sized,
{
    check_theta(theta)?;
    let k = pseudo_tpa_k(theta);
    let base = static_schedule(bounds, PSEUDO_TPA_BASE_THETA)?;
    let b = base.betas();
    let t = b.len() - 1;

    // round one
    let streams: Vec<u64> = (1..t).map(|_| rng.next_u64()).collect();
    let draws: Vec<Vec<f64>> = (1..t)
        .into_par_iter()
        .map(|i| oracle.draw(b[i + 1], PSEUDO_TPA_D, streams[i - 1]))
        .collect::<Result<_>>()?;
    let mut admitted = vec![b[0]];
    for (i, xs) in (1..t).zip(&draws) {
        let gap = b[i + 1].value() - b[i].value();
        let sum: f64 = xs.iter().sum();
        let p = -(-sum * gap).exp_m1();
        if rng.random::<f64>() < p {
            admitted.push(b[i]);
        }
    }
    admitted.push(b[t]);
    let round1_draws = (PSEUDO_TPA_D * t.saturating_sub(1)) as u64;

    // round two
    let plan: Vec<(u64, Vec<f64>)> = admitted
        .iter()
        .map(|_| (rng.next_u64(), (0..k).map(|_| exp1(rng)).collect()))
        .collect();
    let refinements: Vec<Vec<Beta>> = admitted
        .par_iter()
        .zip(plan.par_iter())
        .map(|(&beta, (stream, etas))| {
            let ys = oracle.draw(beta, k as usize, *stream)?;
            let mut pts = Vec::with_capacity(k as usize + 1);
            pts.push(beta);
            for (eta, y) in etas.iter().zip(ys) {
                if y == 0.0 {
                    pts.push(Beta::NEG_INFINITY);
                } else {
                    pts.push(Beta::new(beta.value() - eta / y)?);
                }
            }
            Ok(pts)
        })
        .collect::<Result<_>>()?;
    let round2_draws = k * admitted.len() as u64;

    let candidates = refinements
        .into_iter()
        .flatten()
        .filter(|&c| c >= bounds.beta_min && c <= bounds.beta_max);
    let schedule = Schedule::from_points(bounds.beta_min, bounds.beta_max, candidates)?;
    Ok((
        schedule,
        PseudoTpaTranscript {
            base_length: base.len(),
            k,
            admitted,
            round1_draws,
            round2_draws,
        },
    ))
}
