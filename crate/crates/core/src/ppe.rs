//! The Paired Product Estimator.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{scaled, LogAccumulator};
use crate::oracle::{substream, GibbsOracle};
use crate::schedule::Schedule;

/// Largest number of samples requested from the oracle in one call.
pub const DRAW_CHUNK: u64 = 1 << 22;

/// `⌈100 (e^κ - 1) / ε²⌉`, the per-side sample count that puts the estimate
/// within relative error `ε` with probability at least 0.8 whenever
/// `κ(B) ≤ κ`.
pub fn required_k(kappa_cap: f64, eps: f64) -> Result<u64> {
    if !(kappa_cap > 0.0 && kappa_cap.is_finite()) {
        return Err(Error::param(format!("kappa cap must be positive, got {kappa_cap}")));
    }
    check_epsilon(eps)?;
    let k = (100.0 * kappa_cap.exp_m1() / (eps * eps)).ceil().max(1.0);
    if k >= u64::MAX as f64 {
        return Err(Error::param(format!("k = {k:.3e} overflows the sample counter")));
    }
    Ok(k as u64)
}

pub(crate) fn check_epsilon(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::param(format!("epsilon must lie in (0, 1/2), got {eps}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PpeSegmentStats {
    pub index: usize,
    pub log_u: f64,
    pub log_v: f64,
    pub k: u64,
    /// Empirical `Var/E²` of the `U_{i,j}` terms.
    pub rel_var_u: f64,
    pub rel_var_v: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PpeOutcome {
    pub log_q_hat: f64,
    pub segments: Vec<PpeSegmentStats>,
    pub samples: u64,
}

/// Log-mean and relative variance of `exp(a·x)` over a histogram of `x`.
struct SideSummary {
    log_mean: f64,
    rel_var: f64,
}

fn summarize(hist: &[(f64, u64)], a: f64, k: u64) -> SideSummary {
    let mut first = LogAccumulator::new();
    let mut second = LogAccumulator::new();
    for &(x, n) in hist {
        let t = scaled(a, x);
        let ln_n = (n as f64).ln();
        first.add(ln_n + t);
        second.add(ln_n + 2.0 * t);
    }
    let ln_k = (k as f64).ln();
    let log_mean = first.value() - ln_k;
    let log_second = second.value() - ln_k;
    let rel_var = if log_mean == f64::NEG_INFINITY {
        f64::NAN
    } else {
        (log_second - 2.0 * log_mean).exp_m1().max(0.0)
    };
    SideSummary { log_mean, rel_var }
}

fn merge_hist(into: &mut Vec<(f64, u64)>, more: Vec<(f64, u64)>) {
    for (x, n) in more {
        match into.iter_mut().find(|(y, _)| *y == x) {
            Some(slot) => slot.1 += n,
            None => into.push((x, n)),
        }
    }
}

fn draw_side<O: GibbsOracle + ?Sized>(
    oracle: &O,
    beta: crate::beta::Beta,
    k: u64,
    stream: u64,
) -> Result<Vec<(f64, u64)>> {
    let mut hist = Vec::new();
    let mut left = k;
    let mut chunk = 0u64;
    while left > 0 {
        let n = left.min(DRAW_CHUNK);
        merge_hist(&mut hist, oracle.draw_histogram(beta, n, substream(stream, chunk, 0))?);
        left -= n;
        chunk += 1;
    }
    Ok(hist)
}

/// `PPE(B, k)`: for each segment draw `k` samples at each end and return
/// `ln Q̂ = Σ ln U_i - Σ ln V_i`, accumulated in log space.
///
/// All `2k(len(B) - 1)` draws are fixed by `(B, k)` before any is observed.
pub fn ppe_estimate<O, R>(oracle: &O, schedule: &Schedule, k: u64, rng: &mut R) -> Result<PpeOutcome>
where
    O: GibbsOracle + ?Sized,
    R: Rng + ?Sized,
{
    if k == 0 {
        return Err(Error::param("PPE needs k >= 1"));
    }
    let base = rng.next_u64();
    let segments: Vec<_> = schedule.segments().enumerate().collect();
    let stats: Vec<PpeSegmentStats> = segments
        .into_par_iter()
        .map(|(i, (lo, hi))| {
            let half = 0.5 * (hi.value() - lo.value());
            let xs = draw_side(oracle, lo, k, substream(base, i as u64, 0))?;
            let ys = draw_side(oracle, hi, k, substream(base, i as u64, 1))?;
            let u = summarize(&xs, half, k);
            let v = summarize(&ys, -half, k);
            if v.log_mean == f64::NEG_INFINITY {
                return Err(Error::AllMassLost { segment: i });
            }
            Ok(PpeSegmentStats {
                index: i,
                log_u: u.log_mean,
                log_v: v.log_mean,
                k,
                rel_var_u: u.rel_var,
                rel_var_v: v.rel_var,
            })
        })
        .collect::<Result<_>>()?;
    let log_q_hat = stats.iter().map(|s| s.log_u).sum::<f64>() - stats.iter().map(|s| s.log_v).sum::<f64>();
    Ok(PpeOutcome {
        log_q_hat,
        samples: 2 * k * stats.len() as u64,
        segments: stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beta::Beta;
    use crate::model::GrossGibbsModel;
    use crate::oracle::make_exact_oracle;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn required_k_values() {
        // ⌈100(e³ - 1)/0.01⌉
        assert_eq!(required_k(3.0, 0.1).unwrap(), 190_856);
        assert_eq!(required_k((1e-6f64).ln_1p(), 0.1).unwrap(), 1);
        let k30 = required_k(30.0, 0.1).unwrap() as f64;
        // 1e4 · (e³⁰ - 1) ≈ 1.0686e17
        assert!((k30 / 1.068_647_458_152_446_2e17 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn required_k_rejects_bad_inputs() {
        assert!(required_k(0.0, 0.1).is_err());
        assert!(required_k(1.0, 0.5).is_err());
        assert!(required_k(1.0, 0.0).is_err());
        assert!(required_k(80.0, 0.1).is_err());
    }

    #[test]
    fn single_point_model_is_exact() {
        let o = make_exact_oracle(GrossGibbsModel::point(2.0).unwrap(), 3);
        let s = Schedule::new(vec![Beta::ZERO, Beta::finite(1.0)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for k in [1, 7, 1000] {
            let out = ppe_estimate(&o, &s, k, &mut rng).unwrap();
            assert!((out.log_q_hat - 2.0).abs() < 1e-12);
            assert_eq!(out.samples, 2 * k);
        }
    }

    #[test]
    fn infinite_segment_conventions() {
        let coin = GrossGibbsModel::new([(0.0, 0.0), (1.0, 0.0)]).unwrap();
        let o = make_exact_oracle(coin, 5);
        let s = Schedule::new(vec![Beta::NEG_INFINITY, Beta::ZERO]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let out = ppe_estimate(&o, &s, 10_000, &mut rng).unwrap();
        assert_eq!(out.segments[0].log_u, 0.0);
        // V is the fraction of zero draws at β = 0, close to 1/2
        let v = out.segments[0].log_v.exp();
        assert!((v - 0.5).abs() < 0.03, "{v}");
        assert!((out.log_q_hat - 2f64.ln()).abs() < 0.06);
    }

    #[test]
    fn all_mass_lost_is_reported() {
        let o = make_exact_oracle(GrossGibbsModel::new([(0.0, -50.0), (1.0, 0.0)]).unwrap(), 5);
        let s = Schedule::new(vec![Beta::NEG_INFINITY, Beta::ZERO]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!(matches!(
            ppe_estimate(&o, &s, 10, &mut rng),
            Err(Error::AllMassLost { segment: 0 })
        ));
    }

    #[test]
    fn deterministic_under_seed() {
        let m = GrossGibbsModel::new([(0.0, 0.0), (1.0, 1.0), (2.0, 0.5)]).unwrap();
        let s = Schedule::new(vec![Beta::NEG_INFINITY, Beta::finite(-1.0), Beta::ZERO]).unwrap();
        let run = || {
            let o = make_exact_oracle(m.clone(), 17);
            ppe_estimate(&o, &s, 5000, &mut ChaCha8Rng::seed_from_u64(4)).unwrap()
        };
        assert_eq!(run(), run());
    }
}
