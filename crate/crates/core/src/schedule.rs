//! Cooling schedules and the exact diagnostics computed against a model.

use serde::{Deserialize, Serialize};

use crate::beta::Beta;
use crate::error::{Error, Result};
use crate::model::GrossGibbsModel;

/// Finite schedule values closer than this are treated as one point.
pub const DEDUP_TOLERANCE: f64 = 1e-12;

/// Strictly increasing `β₀ = β_min < β₁ < … < β_t = β_max`, `t ≥ 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Beta>", into = "Vec<Beta>")]
pub struct Schedule {
    betas: Vec<Beta>,
}

fn near(a: Beta, b: Beta) -> bool {
    a == b || (a.value() - b.value()).abs() <= DEDUP_TOLERANCE
}

impl Schedule {
    /// Validates an already-ordered list, merging near-coincident neighbours.
    pub fn new(betas: Vec<Beta>) -> Result<Self> {
        if betas.len() < 2 {
            return Err(Error::param("a schedule needs at least two points"));
        }
        let lo = betas[0];
        let hi = *betas.last().expect("len checked");
        if betas.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::param("schedule values must be increasing"));
        }
        Schedule::from_points(lo, hi, betas)
    }

    /// Builds `{lo} ∪ (points ∩ (lo, hi)) ∪ {hi}`, sorted and deduplicated.
    /// Points within tolerance of an endpoint collapse onto it.
    pub fn from_points(lo: Beta, hi: Beta, points: impl IntoIterator<Item = Beta>) -> Result<Self> {
        if lo >= hi {
            return Err(Error::param(format!("schedule endpoints out of order: {lo} >= {hi}")));
        }
        let mut interior: Vec<Beta> = points
            .into_iter()
            .filter(|&b| lo < b && b < hi && !near(b, lo) && !near(b, hi))
            .collect();
        interior.sort();
        let mut betas = Vec::with_capacity(interior.len() + 2);
        betas.push(lo);
        for b in interior {
            if !near(*betas.last().expect("nonempty"), b) {
                betas.push(b);
            }
        }
        betas.push(hi);
        Ok(Schedule { betas })
    }

    pub fn betas(&self) -> &[Beta] {
        &self.betas
    }

    /// `len(B) = t + 1`.
    pub fn len(&self) -> usize {
        self.betas.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn beta_min(&self) -> Beta {
        self.betas[0]
    }

    pub fn beta_max(&self) -> Beta {
        self.betas[self.betas.len() - 1]
    }

    /// Consecutive pairs `(β_i, β_{i+1})`.
    pub fn segments(&self) -> impl Iterator<Item = (Beta, Beta)> + '_ {
        self.betas.windows(2).map(|w| (w[0], w[1]))
    }

    /// Index `v` with `x ∈ [β_v, β_{v+1})`, for `x` strictly inside the range.
    pub fn locate(&self, x: Beta) -> Result<usize> {
        if !(self.beta_min() < x && x < self.beta_max()) {
            return Err(Error::OutOfRange {
                value: x.value(),
                lo: self.beta_min().value(),
                hi: self.beta_max().value(),
            });
        }
        Ok(self.betas.partition_point(|&b| b <= x) - 1)
    }

    /// `W⁻(B,x) = z(B⁻(x), x)`, `W⁺(B,x) = z(x, B⁺(x))` and their sum.
    pub fn width(&self, model: &GrossGibbsModel, x: Beta) -> Result<Width> {
        let v = self.locate(x)?;
        let zx = model.log_partition(x)?;
        let lower = zx - model.log_partition(self.betas[v])?;
        let upper = model.log_partition(self.betas[v + 1])? - zx;
        Ok(Width {
            lower,
            upper,
            total: lower + upper,
        })
    }

    /// Largest `z(β_i, β_{i+1})` over all segments.
    pub fn maxwidth(&self, model: &GrossGibbsModel) -> Result<f64> {
        let z = self.log_partitions(model)?;
        Ok(z.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max))
    }

    /// `κ(B) = Σ κ(β_i, β_{i+1})`.
    pub fn curvature(&self, model: &GrossGibbsModel) -> Result<f64> {
        self.segments().map(|(a, b)| model.curvature_pair(a, b)).sum()
    }

    fn log_partitions(&self, model: &GrossGibbsModel) -> Result<Vec<f64>> {
        self.betas.iter().map(|&b| model.log_partition(b)).collect()
    }

    /// One value per line; `-inf` is spelled out.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for b in &self.betas {
            s.push_str(&b.to_string());
            s.push('\n');
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut betas = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let t = line.split('#').next().unwrap_or("").trim();
            if t.is_empty() {
                continue;
            }
            let b: Beta = t.parse().map_err(|e: Error| Error::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?;
            if b.is_neg_infinite() && !betas.is_empty() {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: "-inf is only allowed as the first value".into(),
                });
            }
            betas.push(b);
        }
        Schedule::new(betas)
    }
}

impl TryFrom<Vec<Beta>> for Schedule {
    type Error = Error;

    fn try_from(v: Vec<Beta>) -> Result<Self> {
        Schedule::new(v)
    }
}

impl From<Schedule> for Vec<Beta> {
    fn from(s: Schedule) -> Self {
        s.betas
    }
}

/// Interval width around a probe point, in `z`-units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Width {
    pub lower: f64,
    pub upper: f64,
    pub total: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleDiagnostics {
    pub length: usize,
    pub maxwidth: f64,
    pub curvature: f64,
    pub samples_used: u64,
    pub rounds: usize,
}

impl ScheduleDiagnostics {
    pub fn compute(
        schedule: &Schedule,
        model: &GrossGibbsModel,
        samples_used: u64,
        rounds: usize,
    ) -> Result<Self> {
        Ok(ScheduleDiagnostics {
            length: schedule.len(),
            maxwidth: schedule.maxwidth(model)?,
            curvature: schedule.curvature(model)?,
            samples_used,
            rounds,
        })
    }
}

/// Right-hand side of `κ(B) ≤ 4·mw·ln(h/mw)` for `mw = maxwidth(B) ≤ 1`.
pub fn curvature_bound(maxwidth: f64, h: f64) -> f64 {
    if maxwidth <= 0.0 {
        return 0.0;
    }
    4.0 * maxwidth * (h / maxwidth).ln()
}
