//! End-to-end acceptance run: one line per criterion, non-zero exit on any failure.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use anneal::models::glauber::glauber_two_spin;
use anneal::models::ising::ising_marginal_bound_check;
use anneal::models::random_cluster::{edwards_sokal_spin, ising_rc_identity_check, sample_rc};
use anneal::models::uniqueness::{lambda_c, Threshold};
use anneal::models::*;
use anneal::oracle::{Query, RecordingOracle};
use anneal::pipeline::{nonadaptive_plan, schedule_theta};
use anneal::schedule::curvature_bound;
use anneal::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)*) => {
        if !$cond {
            return Err(format!($($fmt)*));
        }
    };
}

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 10] = [
        ("exactness oracle", 60, exactness),
        ("schedule guarantees", 10, schedule_guarantees),
        ("TPA law", 30, tpa_law),
        ("PseudoTPA widths", 300, pseudo_tpa_widths),
        ("PPE correctness", 120, ppe_correctness),
        ("non-adaptive pipeline", 600, nonadaptive_reproduction),
        ("three-round pipeline", 900, three_round_reproduction),
        ("complexity scaling", 600, complexity_scaling),
        ("models layer", 300, models_layer),
        ("median boosting", 60, median_boosting),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(d) if elapsed > Duration::from_secs(*limit) => Err(format!("{d}; exceeded {limit} s")),
            r => r,
        };
        let (tag, detail) = match &result {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!(
            "criterion {:>2} {name}: {tag} ({:.1} s) {detail}",
            i + 1,
            elapsed.as_secs_f64()
        );
        failed += result.is_err() as usize;
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

fn p4() -> (GrossGibbsModel, Bounds, f64) {
    let inst = named_instance("p4_hardcore").unwrap();
    let m = inst.gross_model().unwrap();
    let b = inst.bounds().unwrap();
    let lq = m.log_ratio(b.beta_min, b.beta_max).unwrap();
    (m, b, lq)
}

fn exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let mut check = |lz: f64, direct: f64| {
        worst = worst.max(common::rel_err(lz, direct).min((lz - direct).abs()));
        count += 1;
    };
    for _ in 0..8 {
        let n = rng.random_range(3..13);
        let g = common::random_connected_graph(&mut rng, n, 5);
        let g2 = rng.random_range(0.2..2.5);
        let g1 = if rng.random_bool(0.25) {
            0.0
        } else {
            rng.random_range(0.05..1.0) * g2
        };
        let s = TwoSpinSpec::new(g1, g2, rng.random_range(0.1..4.0)).unwrap();
        let m = enumerate_two_spin(&g, &s, false).unwrap();
        check(
            m.log_partition(Beta::finite(s.lambda.ln())).unwrap(),
            common::direct_two_spin(&g, g1, g2, s.lambda),
        );
    }
    for _ in 0..7 {
        let n = rng.random_range(3..10);
        let g = common::random_connected_graph(&mut rng, n, 6);
        let lam: f64 = rng.random_range(0.1..3.0);
        let m = enumerate_matchings(&g).unwrap();
        check(
            m.log_partition(Beta::finite(lam.ln())).unwrap(),
            common::direct_matchings(&g, lam),
        );
    }
    for _ in 0..7 {
        let n = rng.random_range(2..11);
        let g = common::random_connected_graph(&mut rng, n, 4);
        let delta = rng.random_range(0.05..0.6);
        let gamma: Vec<f64> = (0..g.m()).map(|_| rng.random_range(1.0 + delta..4.0)).collect();
        let lambda: Vec<f64> = (0..g.n()).map(|_| rng.random_range(0.0..1.0 - delta)).collect();
        let s = IsingSpec::new(&g, gamma.clone(), lambda.clone(), delta).unwrap();
        let (m, b) = enumerate_ising(&g, &s).unwrap();
        check(
            m.log_partition(b.beta_max).unwrap(),
            common::direct_ising(&g, &gamma, &lambda),
        );
    }
    ensure!(count >= 20 && worst <= 1e-10, "worst relative error {worst:.2e}");
    Ok(format!("{count} instances, worst relative error {worst:.2e}"))
}

fn schedule_guarantees() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let thetas = [0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8];
    let mut cases = 0;
    let mut worst_gap: f64 = 0.0;
    for j in 0..20 {
        let m = common::random_model(&mut rng, 1 + j % 6, 2.0 + 3.0 * j as f64);
        let lo = if j % 4 == 3 {
            Beta::finite(rng.random_range(-3.0..-0.5))
        } else {
            Beta::NEG_INFINITY
        };
        let hi = Beta::finite(rng.random_range(0.0..1.0));
        let b = Bounds::exact(&m, lo, hi).unwrap();
        for &theta in &thetas {
            cases += 1;
            let s = static_schedule(&b, theta).unwrap();
            let mw = s.maxwidth(&m).unwrap();
            ensure!(mw <= theta, "maxwidth {mw} > θ = {theta} (q = {}, h = {})", b.q, b.h);
            let kappa = s.curvature(&m).unwrap();
            let bound = curvature_bound(mw, b.h.max(2.0));
            ensure!(kappa <= bound + 1e-12, "κ = {kappa} > {bound} (θ = {theta})");
            let c = static_schedule_closed_form(&b, theta).unwrap();
            ensure!(c.len() == s.len(), "closed form length {} vs {}", c.len(), s.len());
            for (x, y) in c.betas().iter().zip(s.betas()) {
                if x != y {
                    let d = (x.value() - y.value()).abs();
                    worst_gap = worst_gap.max(d);
                    ensure!(d <= 1e-9 * x.value().abs().max(1.0), "closed form differs by {d}");
                }
            }
        }
    }
    Ok(format!("{cases} cases, closed-form max deviation {worst_gap:.1e}"))
}

fn tpa_law() -> Outcome {
    // q = 300 leaves the first 100 gaps of every run untouched by β_min;
    // pooling all complete gaps of a truncated path would favour short ones
    let m = GrossGibbsModel::point(3.0).unwrap();
    let b = Bounds::exact(&m, Beta::finite(-100.0), Beta::ZERO).unwrap();
    let o = make_exact_oracle(m.clone(), 103);
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut incs = Vec::new();
    while incs.len() < 10_000 {
        let s = tpa_run(&o, &b, &mut rng).unwrap();
        let z: Vec<f64> = s.betas().iter().rev().map(|&x| m.log_partition(x).unwrap()).collect();
        ensure!(z.len() > 101, "run too short: {}", z.len());
        incs.extend(z.windows(2).take(100).map(|w| w[0] - w[1]));
    }
    incs.truncate(10_000);
    let d = common::ks_exp1(incs);
    let crit = common::ks_critical_01(10_000);
    ensure!(d < crit, "KS {d:.4} ≥ {crit:.4}");

    let (m, b, lq) = p4();
    let o = make_exact_oracle(m, 104);
    let (k, reps) = (5usize, 2000);
    let total: usize = (0..reps)
        .map(|_| tpa_union(&o, &b, k, &mut rng).unwrap().len() - 2)
        .sum();
    let mean = total as f64 / reps as f64;
    let expect = k as f64 * lq;
    let sigma = (expect / reps as f64).sqrt();
    ensure!(
        (mean - expect).abs() <= 3.0 * sigma,
        "mean interior count {mean} vs {expect} ± {sigma}"
    );
    Ok(format!(
        "KS {d:.4} < {crit:.4}; interior {mean:.3} vs k·q = {expect:.3} (σ {sigma:.3})"
    ))
}

/// `β` with `z(β) = target`, by bisection.
fn invert_z(m: &GrossGibbsModel, hi: Beta, target: f64) -> Beta {
    let mut lo = hi.value() - 1.0;
    while m.log_partition(Beta::finite(lo)).unwrap() > target {
        lo = hi.value() - 2.0 * (hi.value() - lo);
    }
    let mut up = hi.value();
    for _ in 0..200 {
        let mid = 0.5 * (lo + up);
        if m.log_partition(Beta::finite(mid)).unwrap() < target {
            lo = mid;
        } else {
            up = mid;
        }
    }
    Beta::finite(0.5 * (lo + up))
}

fn pseudo_tpa_widths() -> Outcome {
    let mut notes = Vec::new();
    for (name, seed) in [("p4_hardcore", 105u64), ("c5_two_spin", 106)] {
        let inst = named_instance(name).unwrap();
        let m = inst.gross_model().unwrap();
        let b = inst.bounds().unwrap();
        let theta = schedule_theta(&b);
        let z0 = m.log_partition(b.beta_min).unwrap();
        let lq = m.log_ratio(b.beta_min, b.beta_max).unwrap();
        let probes: Vec<Beta> = (0..20)
            .map(|j| invert_z(&m, b.beta_max, z0 + (j as f64 + 0.5) / 20.0 * lq))
            .collect();
        let o = make_exact_oracle(m.clone(), seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let runs = 2000;
        let mut w = vec![(0.0f64, 0.0f64); probes.len()];
        let (mut len_sum, mut len_sq) = (0.0, 0.0);
        for _ in 0..runs {
            let (s, t) = pseudo_tpa(&o, &b, theta, &mut rng).unwrap();
            let l = t.admitted.len() as f64;
            len_sum += l;
            len_sq += l * l;
            for (acc, &x) in w.iter_mut().zip(&probes) {
                let v = s.width(&m, x).unwrap().total;
                acc.0 += v;
                acc.1 += v * v;
            }
        }
        let r = runs as f64;
        let mut worst: f64 = f64::NEG_INFINITY;
        for (j, &(s1, s2)) in w.iter().enumerate() {
            let mean = s1 / r;
            let se = ((s2 / r - mean * mean).max(0.0) / r).sqrt();
            ensure!(
                mean <= theta + 3.0 * se,
                "{name} probe {j}: E[W] = {mean:.4} > θ = {theta:.4} + 3·{se:.4}"
            );
            worst = worst.max(mean / theta);
        }
        let ml = len_sum / r;
        let sl = ((len_sq / r - ml * ml).max(0.0) / r).sqrt();
        ensure!(
            ml <= 2.0 * lq + 2.0 + 3.0 * sl,
            "{name}: E[len B'] = {ml} > {}",
            2.0 * lq + 2.0
        );
        notes.push(format!(
            "{name}: max E[W]/θ {worst:.3}, E[len B'] {ml:.2} ≤ {:.2}",
            2.0 * lq + 2.0
        ));
    }
    Ok(notes.join("; "))
}

fn ppe_correctness() -> Outcome {
    let mut checked = 0;
    let mut worst_z: f64 = 0.0;
    let mut worst_rv: f64 = 0.0;
    let mut worst_tel: f64 = 0.0;
    for (name, theta, seed) in [("p4_hardcore", 0.5, 107u64), ("c5_two_spin", 0.3, 108)] {
        let inst = named_instance(name).unwrap();
        let m = inst.gross_model().unwrap();
        let b = inst.bounds().unwrap();
        let o = make_exact_oracle(m.clone(), seed);
        // static schedules keep every κ tiny; the coarse one exercises larger curvatures
        let coarse = [-6.0, -3.0, -1.5, -0.5].map(Beta::finite);
        for (variant, s) in [
            static_schedule(&b, theta).unwrap(),
            Schedule::from_points(b.beta_min, b.beta_max, coarse).unwrap(),
        ]
        .into_iter()
        .enumerate()
        {
            let support: Vec<f64> = m.support().iter().map(|p| p.x).collect();
            // E[exp(a X)] under μ_β, summed directly over the support
            let moment = |beta: Beta, a: f64| -> f64 {
                let p = m.probabilities(beta).unwrap();
                support
                    .iter()
                    .zip(&p)
                    .filter(|(_, &pi)| pi > 0.0)
                    .map(|(&x, &pi)| pi * weight(a, x))
                    .sum()
            };
            let mut tele = 0.0;
            for (i, (lo, hi)) in s.segments().enumerate() {
                let half = 0.5 * (hi.value() - lo.value());
                let mid = lo.midpoint(hi);
                let zr = |a: Beta, c: Beta| (m.log_partition(a).unwrap() - m.log_partition(c).unwrap()).exp();
                let sides = [(lo, half, zr(mid, lo)), (hi, -half, zr(mid, hi))];
                let kappa = m.curvature_pair(lo, hi).unwrap();
                for (side, &(beta, a, target)) in sides.iter().enumerate() {
                    let mean_exact = moment(beta, a);
                    ensure!(
                        (mean_exact - target).abs() <= 1e-12 * target,
                        "{name} segment {i}: exact moment {mean_exact} vs {target}"
                    );
                    let second = moment(beta, 2.0 * a);
                    let rv_exact = second / (mean_exact * mean_exact) - 1.0;
                    // below a -∞ endpoint U ≡ 1; the whole variance sits on V
                    let rv_target = if beta.is_neg_infinite() { 0.0 } else { kappa.exp_m1() };
                    ensure!(
                        (rv_exact - rv_target).abs() <= 1e-9 * rv_exact + 1e-12,
                        "{name} segment {i}: exact relvar {rv_exact} vs {rv_target}"
                    );
                    let stream = 100_000 * variant as u64 + 1000 * i as u64 + side as u64;
                    let (mu, _) = empirical(&o.draw_histogram(beta, 100_000, stream).unwrap(), a);
                    let sigma = (rv_exact * mean_exact * mean_exact / 1e5).sqrt();
                    let z = if sigma > 0.0 {
                        (mu - target).abs() / sigma
                    } else {
                        (mu - target).abs() * 1e12
                    };
                    ensure!(
                        z <= 5.0,
                        "{name} segment {i} side {side}: mean {mu} vs {target} ({z:.1}σ)"
                    );
                    worst_z = worst_z.max(z);
                    if (0.01..=2.0).contains(&kappa) && !beta.is_neg_infinite() {
                        let (mu, m2) = empirical(&o.draw_histogram(beta, 1_000_000, stream + 500).unwrap(), a);
                        let rv = m2 / (mu * mu) - 1.0;
                        let rel = (rv / kappa.exp_m1() - 1.0).abs();
                        ensure!(
                            rel <= 0.1,
                            "{name} segment {i}: relvar {rv} vs {} ({rel:.3})",
                            kappa.exp_m1()
                        );
                        worst_rv = worst_rv.max(rel);
                        checked += 1;
                    }
                }
                tele += moment(lo, half).ln() - moment(hi, -half).ln();
            }
            let lq = m.log_ratio(b.beta_min, b.beta_max).unwrap();
            worst_tel = worst_tel.max((tele - lq).abs());
            ensure!((tele - lq).abs() <= 1e-9, "{name}: telescoped {tele} vs {lq}");
        }
    }
    ensure!(checked > 0, "no segment with κ in [0.01, 2]");
    Ok(format!(
        "max mean deviation {worst_z:.2}σ; relvar within {:.1}% on {checked} sides; telescoping error {worst_tel:.1e}",
        100.0 * worst_rv
    ))
}

/// `exp(a x)` with `0 · ∞ = 0`.
fn weight(a: f64, x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (a * x).exp()
    }
}

fn empirical(hist: &[(f64, u64)], a: f64) -> (f64, f64) {
    let n: u64 = hist.iter().map(|h| h.1).sum();
    let (s1, s2) = hist.iter().fold((0.0, 0.0), |(s1, s2), &(x, c)| {
        let w = weight(a, x);
        (s1 + c as f64 * w, s2 + c as f64 * w * w)
    });
    (s1 / n as f64, s2 / n as f64)
}

fn beta_counts(qs: &[Query]) -> Vec<(u64, u64)> {
    let mut v: Vec<(u64, u64)> = qs.iter().map(|q| (q.beta.value().to_bits(), q.count)).collect();
    v.sort();
    v
}

fn nonadaptive_reproduction() -> Outcome {
    let (m, b, lq) = p4();
    let eps = 0.1;
    let o = make_exact_oracle(m.clone(), 109);
    let trials = 200;
    let ok = (0..trials)
        .filter(|&t| (estimate_nonadaptive(&o, &b, eps, t).unwrap().log_q_hat - lq).abs() <= eps)
        .count();
    let frac = ok as f64 / trials as f64;
    ensure!(frac >= 0.6, "success {frac}");

    let first = RecordingOracle::new(make_exact_oracle(m, 110));
    let other = GrossGibbsModel::new([(0.0, 1.0), (1.0, -2.0), (3.0, 0.0)]).unwrap();
    let second = RecordingOracle::new(make_exact_oracle(other, 111));
    estimate_nonadaptive(&first, &b, eps, 5).unwrap();
    estimate_nonadaptive(&second, &b, eps, 6).unwrap();
    ensure!(
        beta_counts(&first.queries()) == beta_counts(&second.queries()),
        "query transcripts differ between oracles"
    );
    let (plan, k) = nonadaptive_plan(&b, eps).unwrap();
    ensure!(
        first.draws() == 2 * k * (plan.len() as u64 - 1),
        "sample count mismatch"
    );
    Ok(format!(
        "success {ok}/{trials}; transcripts replay identically ({} queries)",
        first.queries().len()
    ))
}

fn three_round_reproduction() -> Outcome {
    let (m, b, lq) = p4();
    let eps = 0.1;
    let opts = EstimatorOptions::with_kappa_cap(3.0);
    let trials = 200u64;
    let (mut ok, mut within_cap) = (0, 0);
    for t in 0..trials {
        let rec = RecordingOracle::new(make_exact_oracle(m.clone(), 1000 + t));
        let r = estimate_three_round(&rec, &b, eps, t, &opts).unwrap();
        let tr = r.transcript.as_ref().unwrap();
        ensure!(r.rounds() == 3, "trial {t}: {} rounds", r.rounds());
        let phase = |q: &Query| match q.count {
            2 => 0,
            c if c == tr.k => 1,
            _ => 2,
        };
        let phases: Vec<u8> = rec.queries().iter().map(phase).collect();
        let batches = 1 + phases.windows(2).filter(|w| w[0] != w[1]).count();
        ensure!(
            phases.windows(2).all(|w| w[0] <= w[1]) && batches == 3,
            "trial {t}: {batches} sampling batches"
        );
        ensure!(r.samples_total == rec.draws(), "trial {t}: sample accounting");
        if r.schedule.curvature(&m).unwrap() <= 3.0 {
            within_cap += 1;
        }
        if (r.log_q_hat - lq).abs() <= eps {
            ok += 1;
        }
    }
    let cap_frac = within_cap as f64 / trials as f64;
    let frac = ok as f64 / trials as f64;
    ensure!(cap_frac >= 0.9, "κ(B) ≤ 3 in only {cap_frac}");
    ensure!(frac >= 0.6, "success {frac}");
    Ok(format!(
        "success {ok}/{trials}; κ(B) ≤ 3 in {within_cap}/{trials}; 3 rounds each"
    ))
}

fn complexity_scaling() -> Outcome {
    let qs = [2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0, 1024.0];
    let hs = [2.0, 4.0, 16.0, 64.0, 256.0];
    let epss = [0.05, 0.1, 0.2];
    let samples = |q: f64, h: f64, eps: f64| {
        let b = Bounds::new(q, h, Beta::NEG_INFINITY, Beta::ZERO).unwrap();
        let (s, k) = nonadaptive_plan(&b, eps).unwrap();
        2 * k * (s.len() as u64 - 1)
    };
    let scale = |q: f64, h: f64, eps: f64| q * h.ln().powi(2) / (eps * eps);
    // fit on the smallest q, check on the whole grid
    let mut c: f64 = 0.0;
    for &h in &hs {
        for &eps in &epss {
            for &q in &qs[..3] {
                c = c.max(samples(q, h, eps) as f64 / scale(q, h, eps));
            }
        }
    }
    let mut slopes = Vec::new();
    for &h in &hs {
        for &eps in &epss {
            let pts: Vec<(f64, f64)> = qs.iter().map(|&q| (q.ln(), (samples(q, h, eps) as f64).ln())).collect();
            for &q in &qs {
                let n = samples(q, h, eps) as f64;
                ensure!(n <= c * scale(q, h, eps), "q={q} h={h} ε={eps}: {n} > {c:.2}·scale");
            }
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
            let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
                / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
            slopes.push(slope);
        }
    }
    let max_slope = slopes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    ensure!(max_slope < 1.5, "log-log slope in q reaches {max_slope:.3}");

    // the plan is what a run actually spends
    let (m, _, _) = p4();
    let b = Bounds::new(16.0, 16.0, Beta::NEG_INFINITY, Beta::ZERO).unwrap();
    let o = make_exact_oracle(m, 112);
    let r = estimate_nonadaptive(&o, &b, 0.2, 1).unwrap();
    ensure!(
        r.samples_total == samples(16.0, 16.0, 0.2) && o.draws() == r.samples_total,
        "plan/run mismatch"
    );
    Ok(format!(
        "C = {c:.2} over {} grid points; max slope in q {max_slope:.3}",
        qs.len() * hs.len() * epss.len()
    ))
}

fn models_layer() -> Outcome {
    let mut identity: f64 = 0.0;
    let mut marginal: f64 = 0.0;
    for (g, gamma, lambda) in [
        (Graph::path(4), 2.0, 0.5),
        (Graph::complete(4), 1.7, 0.3),
        (Graph::cycle(5).unwrap(), 3.0, 0.1),
    ] {
        let s = IsingSpec::uniform(&g, gamma, lambda, 0.3).unwrap();
        identity = identity.max(ising_rc_identity_check(&g, &s).unwrap());
        marginal = marginal.max(ising_marginal_bound_check(&g, &s).unwrap());
    }
    ensure!(identity <= 1e-10, "Ising/RC identity error {identity:.2e}");
    ensure!(marginal <= 1e-12, "marginal violation {marginal:.2e}");

    let mut es: f64 = 0.0;
    for (g, gamma, lambda, seed) in [
        (Graph::complete(2), vec![2.5], vec![0.5, 0.3], 113u64),
        (Graph::path(3), vec![2.0, 1.6], vec![0.6, 0.1, 0.4], 114),
    ] {
        let s = IsingSpec::new(&g, gamma.clone(), lambda.clone(), 0.3).unwrap();
        let rc = RandomClusterSpec::from_ising(&s);
        let lz = common::direct_ising(&g, &gamma, &lambda);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draws = 10_000;
        let mut counts = vec![0usize; 1 << g.n()];
        for _ in 0..draws {
            let set = sample_rc(&g, &rc, 0.1, &RcOverrides::default(), &mut rng).unwrap();
            let sigma = edwards_sokal_spin(&g, &set, &rc, &mut rng);
            counts[sigma.iter().enumerate().map(|(v, &b)| (b as usize) << v).sum::<usize>()] += 1;
        }
        let tv: f64 = 0.5
            * counts
                .iter()
                .enumerate()
                .map(|(sigma, &c)| {
                    let mut w = 1.0;
                    for (v, l) in lambda.iter().enumerate() {
                        if sigma >> v & 1 == 1 {
                            w *= l;
                        }
                    }
                    for (&(u, v), ge) in g.edges().iter().zip(&gamma) {
                        if (sigma >> u & 1) == (sigma >> v & 1) {
                            w *= ge;
                        }
                    }
                    (c as f64 / draws as f64 - w / lz.exp()).abs()
                })
                .sum::<f64>();
        es = es.max(tv);
    }
    ensure!(es <= 0.02, "Edwards–Sokal TV {es}");

    let g = Graph::complete(2);
    let s = TwoSpinSpec::hardcore(1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(115);
    let mut state = vec![false; 2];
    let mut counts = [0usize; 4];
    let sweeps = 100_000;
    for _ in 0..sweeps {
        state = glauber_two_spin(&g, &s, state, 2, &mut rng);
        counts[state[0] as usize + 2 * state[1] as usize] += 1;
    }
    ensure!(counts[3] == 0, "hardcore violated");
    let glauber: f64 = 0.5
        * counts[..3]
            .iter()
            .map(|&c| (c as f64 / sweeps as f64 - 1.0 / 3.0).abs())
            .sum::<f64>();
    ensure!(glauber <= 0.02, "Glauber TV {glauber}");

    let lc = match lambda_c(0.0, 1.0, 3).unwrap() {
        Threshold::Window { lambda_c, .. } => lambda_c,
        Threshold::AllUnique => return Err("hardcore Δ=3 reported all-unique".into()),
    };
    ensure!(lc == 4.0, "λ_c(0,1,3) = {lc}");
    Ok(format!(
        "identity {identity:.1e}, marginal {marginal:.1e}, ES TV {es:.4}, Glauber TV {glauber:.4}, λ_c = {lc}"
    ))
}

fn median_boosting() -> Outcome {
    let stub = |s: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let v = if rng.random_bool(0.7) {
            0.0
        } else if rng.random_bool(0.5) {
            10.0
        } else {
            -10.0
        };
        Ok(EstimateReport {
            log_q_hat: v,
            schedule: Schedule::new(vec![Beta::finite(-1.0), Beta::ZERO]).unwrap(),
            samples_total: 1,
            samples_by_round: vec![1],
            epsilon: 0.1,
            algorithm: "stub".into(),
            seed: s,
            kappa_cap: 3.0,
            k: 1,
            segments: vec![],
            transcript: None,
            replicas: None,
        })
    };
    let meta = 1000u64;
    let fails = (0..meta)
        .filter(|&t| median_boost(stub, 0.01, 7919 * t).unwrap().log_q_hat != 0.0)
        .count();
    let frac = fails as f64 / meta as f64;
    ensure!(frac <= 0.02, "failure fraction {frac}");
    Ok(format!(
        "failure {fails}/{meta} with {} replicas",
        anneal::pipeline::boost_replicas(0.01).unwrap()
    ))
}
