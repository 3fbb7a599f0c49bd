//! Text formats: gross Gibbs histograms and flat key-value model specs.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::GrossGibbsModel;
use crate::models::{Graph, Interval, IsingSpec, SpinModelSpec, TwoSpinSpec};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

/// One `x log_c` pair per line; `#` starts a comment.
pub fn parse_histogram(text: &str) -> Result<GrossGibbsModel> {
    let mut pts = Vec::new();
    for (line, l) in content_lines(text) {
        let bad = |msg: String| Error::Parse { line, msg };
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(bad(format!("expected `x log_c`, got {l:?}")));
        }
        let x: f64 = toks[0].parse().map_err(|_| bad(format!("bad value {:?}", toks[0])))?;
        let lc: f64 = toks[1].parse().map_err(|_| bad(format!("bad log-weight {:?}", toks[1])))?;
        pts.push((x, lc));
    }
    GrossGibbsModel::new(pts)
}

pub fn histogram_to_text(model: &GrossGibbsModel) -> String {
    let mut s = String::from("# x log_c\n");
    for p in model.support() {
        let _ = writeln!(s, "{:?} {:?}", p.x, p.log_c);
    }
    s
}

/// `key=value` lines; `#` starts a comment.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (line, l) in content_lines(text) {
        let (k, v) = l.split_once('=').ok_or_else(|| Error::Parse {
            line,
            msg: format!("expected key=value, got {l:?}"),
        })?;
        if out.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
            return Err(Error::Parse {
                line,
                msg: format!("duplicate key {:?}", k.trim()),
            });
        }
    }
    Ok(out)
}

struct Kv(BTreeMap<String, String>);

impl Kv {
    fn num(&mut self, key: &str) -> Result<Option<f64>> {
        match self.0.remove(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::param(format!("{key}: not a number: {v:?}"))),
        }
    }

    fn need(&mut self, key: &str) -> Result<f64> {
        self.num(key)?.ok_or_else(|| Error::param(format!("missing key {key:?}")))
    }

    /// A uniform default under `key` with per-index overrides `key.<i>`.
    fn vector(&mut self, key: &str, len: usize) -> Result<Vec<f64>> {
        let base = self.num(key)?;
        let mut out = Vec::with_capacity(len);
        for i in 0..len {
            let v = self.num(&format!("{key}.{i}"))?.or(base);
            out.push(v.ok_or_else(|| Error::param(format!("missing {key} or {key}.{i}")))?);
        }
        Ok(out)
    }

    fn finish(self) -> Result<()> {
        match self.0.keys().next() {
            None => Ok(()),
            Some(k) => Err(Error::param(format!("unrecognized key {k:?}"))),
        }
    }
}

/// Model spec for `g`. Keys: `model` (`two_spin`, `hardcore`, `matchings`,
/// `ising`); `gamma1`, `gamma2`, `lambda`, `interval` for 2-spin; `lambda`
/// for matchings; `gamma`, `lambda`, `delta` with per-index overrides
/// `gamma.<e>` and `lambda.<v>` for Ising.
pub fn parse_spec(text: &str, g: &Graph) -> Result<SpinModelSpec> {
    let mut kv = Kv(parse_key_values(text)?);
    let kind = kv.0.remove("model").ok_or_else(|| Error::param("missing key \"model\""))?;
    let spec = match kind.as_str() {
        "two_spin" | "hardcore" => {
            let (g1, g2) = if kind == "hardcore" {
                (0.0, 1.0)
            } else {
                (kv.need("gamma1")?, kv.need("gamma2")?)
            };
            let spec = TwoSpinSpec::new(g1, g2, kv.need("lambda")?)?;
            let interval = match kv.0.remove("interval") {
                None => Interval::First,
                Some(s) => s.parse()?,
            };
            SpinModelSpec::TwoSpin { spec, interval }
        }
        "matchings" => {
            let lambda = kv.need("lambda")?;
            if !(lambda > 0.0 && lambda.is_finite()) {
                return Err(Error::param(format!("λ must be positive, got {lambda}")));
            }
            SpinModelSpec::Matchings { lambda }
        }
        "ising" => {
            let delta = kv.need("delta")?;
            let gamma = kv.vector("gamma", g.m())?;
            let lambda = kv.vector("lambda", g.n())?;
            SpinModelSpec::Ising {
                spec: IsingSpec::new(g, gamma, lambda, delta)?,
            }
        }
        other => return Err(Error::param(format!("unknown model kind {other:?}"))),
    };
    kv.finish()?;
    Ok(spec)
}
