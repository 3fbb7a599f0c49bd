//! The black-box sampling interface consumed by every estimator.
//!
//! Draws are addressed by a `stream` index: the same `(seed, β, count,
//! stream)` always replays the same values, and distinct streams are
//! independent. Callers allocate streams; nothing here is order-dependent,
//! so draws on distinct streams may run concurrently.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::beta::Beta;
use crate::error::Result;
use crate::model::GrossGibbsModel;

pub trait GibbsOracle: Sync {
    /// `count` i.i.d. Hamiltonian values from `μ_β`. At `β = -∞` every value is 0.
    fn draw(&self, beta: Beta, count: usize, stream: u64) -> Result<Vec<f64>>;

    /// The same draw summarized as `(value, multiplicity)` pairs sorted by value.
    ///
    /// Oracles with a cheaper exact route (a multinomial over a known
    /// support) override this; the realization need not coincide with
    /// [`GibbsOracle::draw`] on the same stream.
    fn draw_histogram(&self, beta: Beta, count: u64, stream: u64) -> Result<Vec<(f64, u64)>> {
        let values = self.draw(beta, count as usize, stream)?;
        Ok(histogram(values))
    }

    /// Total number of samples drawn so far.
    fn draws(&self) -> u64;
}

impl<O: GibbsOracle + ?Sized> GibbsOracle for &O {
    fn draw(&self, beta: Beta, count: usize, stream: u64) -> Result<Vec<f64>> {
        (**self).draw(beta, count, stream)
    }

    fn draw_histogram(&self, beta: Beta, count: u64, stream: u64) -> Result<Vec<(f64, u64)>> {
        (**self).draw_histogram(beta, count, stream)
    }

    fn draws(&self) -> u64 {
        (**self).draws()
    }
}

/// Groups values into sorted `(value, multiplicity)` pairs.
pub fn histogram(mut values: Vec<f64>) -> Vec<(f64, u64)> {
    values.sort_by(f64::total_cmp);
    let mut out: Vec<(f64, u64)> = Vec::new();
    for v in values {
        match out.last_mut() {
            Some((x, n)) if *x == v => *n += 1,
            _ => out.push((v, 1)),
        }
    }
    out
}

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child stream index from a parent and two coordinates.
#[inline]
pub fn substream(base: u64, a: u64, b: u64) -> u64 {
    mix64(mix64(base ^ mix64(a)).wrapping_add(b))
}

/// The generator for one `(seed, stream)` pair.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Exact sampling from an explicit [`GrossGibbsModel`].
#[derive(Debug)]
pub struct ExactOracle {
    model: GrossGibbsModel,
    seed: u64,
    counter: AtomicU64,
}

impl ExactOracle {
    pub fn new(model: GrossGibbsModel, seed: u64) -> Self {
        ExactOracle {
            model,
            seed,
            counter: AtomicU64::new(0),
        }
    }

    pub fn model(&self) -> &GrossGibbsModel {
        &self.model
    }
}

/// Wraps a model in a replayable exact oracle.
pub fn make_exact_oracle(model: GrossGibbsModel, seed: u64) -> ExactOracle {
    ExactOracle::new(model, seed)
}

impl GibbsOracle for ExactOracle {
    fn draw(&self, beta: Beta, count: usize, stream: u64) -> Result<Vec<f64>> {
        let sampler = self.model.sampler(beta)?;
        let mut rng = stream_rng(self.seed, stream);
        let out = (0..count).map(|_| sampler.sample(&mut rng)).collect();
        self.counter.fetch_add(count as u64, Ordering::Relaxed);
        Ok(out)
    }

    fn draw_histogram(&self, beta: Beta, count: u64, stream: u64) -> Result<Vec<(f64, u64)>> {
        let sampler = self.model.sampler(beta)?;
        let mut rng = stream_rng(self.seed, stream);
        let out = sampler.sample_counts(count, &mut rng);
        self.counter.fetch_add(count, Ordering::Relaxed);
        Ok(out)
    }

    fn draws(&self) -> u64 {
        self.counter.load(Ordering::Relaxed)
    }
}

/// One oracle call as seen by [`RecordingOracle`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Query {
    pub beta: Beta,
    pub count: u64,
    pub stream: u64,
}

/// Pass-through oracle that logs every query in arrival order.
pub struct RecordingOracle<O> {
    inner: O,
    log: Mutex<Vec<Query>>,
}

impl<O: GibbsOracle> RecordingOracle<O> {
    pub fn new(inner: O) -> Self {
        RecordingOracle {
            inner,
            log: Mutex::new(Vec::new()),
        }
    }

    pub fn queries(&self) -> Vec<Query> {
        self.log.lock().expect("query log poisoned").clone()
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }

    fn record(&self, beta: Beta, count: u64, stream: u64) {
        self.log
            .lock()
            .expect("query log poisoned")
            .push(Query { beta, count, stream });
    }
}

impl<O: GibbsOracle> GibbsOracle for RecordingOracle<O> {
    fn draw(&self, beta: Beta, count: usize, stream: u64) -> Result<Vec<f64>> {
        self.record(beta, count as u64, stream);
        self.inner.draw(beta, count, stream)
    }

    fn draw_histogram(&self, beta: Beta, count: u64, stream: u64) -> Result<Vec<(f64, u64)>> {
        self.record(beta, count, stream);
        self.inner.draw_histogram(beta, count, stream)
    }

    fn draws(&self) -> u64 {
        self.inner.draws()
    }
}
