//! Tree-recursion uniqueness for anti-ferromagnetic 2-spin systems.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const BISECTION_TOL: f64 = 1e-12;

fn check_antiferro(gamma1: f64, gamma2: f64) -> Result<()> {
    let g = gamma1 * gamma2;
    if !(g < 1.0) {
        return Err(Error::NotAntiferro(g));
    }
    if !(gamma1 >= 0.0 && gamma2 > 0.0 && gamma1 <= gamma2) {
        return Err(Error::param(format!("need 0 ≤ γ₁ ≤ γ₂, γ₂ > 0; got ({gamma1}, {gamma2})")));
    }
    Ok(())
}

/// `(T_d(x), T_d'(x))` for `T_d(x) = λ((γ₁x+1)/(x+γ₂))^d`.
pub fn tree_recursion(gamma1: f64, gamma2: f64, lambda: f64, d: u32, x: f64) -> (f64, f64) {
    let t = lambda * ((gamma1 * x + 1.0) / (x + gamma2)).powi(d as i32);
    let dt = d as f64 * t * (gamma1 * gamma2 - 1.0) / ((gamma1 * x + 1.0) * (x + gamma2));
    (t, dt)
}

/// The unique positive fixed point of `T_d`, by bisection on
/// `T_d(x) - x`, which is strictly decreasing when `γ₁γ₂ < 1`.
pub fn fixed_point(gamma1: f64, gamma2: f64, lambda: f64, d: u32) -> Result<f64> {
    check_antiferro(gamma1, gamma2)?;
    if !(lambda > 0.0 && lambda.is_finite()) || d == 0 {
        return Err(Error::param(format!("need λ > 0 and d ≥ 1; got λ = {lambda}, d = {d}")));
    }
    let f = |x: f64| tree_recursion(gamma1, gamma2, lambda, d, x).0 - x;
    let (mut lo, mut hi) = (0.0, lambda * 1f64.max(gamma1.powi(-(d as i32))));
    if !hi.is_finite() {
        hi = lambda;
    }
    let mut grow = 0;
    while f(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        grow += 1;
        if grow > 2000 || !hi.is_finite() {
            return Err(Error::IterationLimit(grow));
        }
    }
    for _ in 0..4096 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= BISECTION_TOL * hi.max(1e-300) * 1e-3 {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `|T_d'(x̂_d)|`.
pub fn contraction(gamma1: f64, gamma2: f64, lambda: f64, d: u32) -> Result<f64> {
    let x = fixed_point(gamma1, gamma2, lambda, d)?;
    Ok(tree_recursion(gamma1, gamma2, lambda, d, x).1.abs())
}

/// Up-to-`Δ` uniqueness with gap `δ`: `|T_d'(x̂_d)| ≤ 1 - δ` for `1 ≤ d < Δ`.
pub fn uniqueness_check(gamma1: f64, gamma2: f64, lambda: f64, max_degree: u32, delta: f64) -> Result<bool> {
    check_antiferro(gamma1, gamma2)?;
    if max_degree < 2 {
        return Err(Error::param("Δ must be at least 2"));
    }
    for d in 1..max_degree {
        if contraction(gamma1, gamma2, lambda, d)? > 1.0 - delta {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Uniqueness regime in `λ` for given `(γ₁, γ₂, Δ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Threshold {
    /// Up-to-`Δ` unique for every `λ > 0`.
    AllUnique,
    /// Unique on `(0, λ_c) ∪ (λ̄_c, ∞)`; `λ̄_c` is absent when `γ₁ = 0`.
    /// `regular` holds the same pair at `d = Δ - 1` alone, which governs
    /// `Δ`-regular graphs.
    Window {
        lambda_c: f64,
        lambda_c_bar: Option<f64>,
        regular: (f64, Option<f64>),
    },
}

/// Positive roots `x₁ ≤ x₂` of `d(1-γ₁γ₂)x = (γ₁x+1)(x+γ₂)`, i.e. of
/// `γ₁x² + (1 + γ₁γ₂ - d(1-γ₁γ₂))x + γ₂ = 0`.
pub fn critical_roots(gamma1: f64, gamma2: f64, d: u32) -> Option<(f64, f64)> {
    let g = gamma1 * gamma2;
    let b = 1.0 + g - d as f64 * (1.0 - g);
    if gamma1 == 0.0 {
        // linear: bx + γ₂ = 0, a single root; x₂ = ∞
        return (b < 0.0).then(|| (-gamma2 / b, f64::INFINITY));
    }
    let disc = b * b - 4.0 * gamma1 * gamma2;
    if b >= 0.0 || disc < 0.0 {
        return None;
    }
    let s = disc.sqrt();
    // stable pairing: -b + s may cancel, so derive x₁ from the product γ₂/γ₁
    let x2 = (-b + s) / (2.0 * gamma1);
    let x1 = gamma2 / (gamma1 * x2);
    Some((x1, x2))
}

/// `λ_i(d) = x_i((x_i + γ₂)/(γ₁x_i + 1))^d`.
pub fn critical_lambda(gamma1: f64, gamma2: f64, d: u32, x: f64) -> f64 {
    x * ((x + gamma2) / (gamma1 * x + 1.0)).powi(d as i32)
}

/// Classifies the uniqueness regime. Non-uniqueness at degree `d` needs
/// `d ≥ Δ̄ = (1+√(γ₁γ₂))/(1-√(γ₁γ₂))`, so every `λ` is unique exactly when
/// `Δ - 1 < Δ̄`, i.e. `√(γ₁γ₂) > (Δ-2)/Δ`.
pub fn lambda_c(gamma1: f64, gamma2: f64, max_degree: u32) -> Result<Threshold> {
    check_antiferro(gamma1, gamma2)?;
    if max_degree < 2 {
        return Err(Error::param("Δ must be at least 2"));
    }
    let mut lc = f64::INFINITY;
    let mut lcb: Option<f64> = None;
    let mut regular = None;
    for d in 1..max_degree {
        let Some((x1, x2)) = critical_roots(gamma1, gamma2, d) else {
            continue;
        };
        let l1 = critical_lambda(gamma1, gamma2, d, x1);
        let l2 = x2.is_finite().then(|| critical_lambda(gamma1, gamma2, d, x2));
        lc = lc.min(l1);
        if let Some(l2) = l2 {
            lcb = Some(lcb.map_or(l2, |v: f64| v.max(l2)));
        }
        if d == max_degree - 1 {
            regular = Some((l1, l2));
        }
    }
    match regular {
        // roots at smaller d imply roots at Δ - 1
        None => Ok(Threshold::AllUnique),
        Some(regular) => Ok(Threshold::Window {
            lambda_c: lc,
            lambda_c_bar: lcb,
            regular,
        }),
    }
}

/// `√(γ₁γ₂) > (Δ-2)/Δ`.
pub fn all_unique_condition(gamma1: f64, gamma2: f64, max_degree: u32) -> bool {
    (gamma1 * gamma2).sqrt() > (max_degree as f64 - 2.0) / max_degree as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hardcore_threshold() {
        match lambda_c(0.0, 1.0, 3).unwrap() {
            Threshold::Window { lambda_c, lambda_c_bar, regular } => {
                assert!((lambda_c - 4.0).abs() < 1e-12);
                assert_eq!(lambda_c_bar, None);
                assert!((regular.0 - 4.0).abs() < 1e-12);
            }
            t => panic!("{t:?}"),
        }
        // Δ = 6: min over d ∈ {2..5} of d^d/(d-1)^{d+1} is at d = 5
        let expect = 5f64.powi(5) / 4f64.powi(6);
        match lambda_c(0.0, 1.0, 6).unwrap() {
            Threshold::Window { lambda_c, .. } => assert!((lambda_c - expect).abs() < 1e-12),
            t => panic!("{t:?}"),
        }
        assert_eq!(lambda_c(0.0, 1.0, 2).unwrap(), Threshold::AllUnique);
    }

    #[test]
    fn fixed_point_residual() {
        for &(g1, g2, l, d) in &[(0.0, 1.0, 1.0, 2), (0.3, 0.9, 5.0, 4), (0.1, 3.0, 0.01, 7), (0.0, 0.5, 100.0, 1)] {
            let x = fixed_point(g1, g2, l, d).unwrap();
            let (t, _) = tree_recursion(g1, g2, l, d, x);
            assert!((t - x).abs() <= 1e-10 * x.max(1.0), "{g1} {g2} {l} {d}");
        }
    }

    #[test]
    fn rejects_ferro() {
        assert!(matches!(uniqueness_check(1.0, 2.0, 1.0, 3, 0.1), Err(Error::NotAntiferro(_))));
        assert!(matches!(lambda_c(1.0, 1.0, 3), Err(Error::NotAntiferro(_))));
    }

    #[test]
    fn small_lambda_is_unique() {
        assert!(contraction(0.0, 1.0, 1e-9, 5).unwrap() < 1e-7);
        assert!(uniqueness_check(0.0, 1.0, 1e-9, 6, 0.5).unwrap());
    }

    #[test]
    fn all_unique_condition_matches_roots() {
        // √g = 0.6 > (4-2)/4: no window for Δ = 4
        assert!(all_unique_condition(0.36, 1.0, 4));
        assert_eq!(lambda_c(0.36, 1.0, 4).unwrap(), Threshold::AllUnique);
        // √g = 0.3 ≤ 0.5: a window exists
        assert!(!all_unique_condition(0.09, 1.0, 4));
        assert!(matches!(lambda_c(0.09, 1.0, 4).unwrap(), Threshold::Window { .. }));
    }
}
