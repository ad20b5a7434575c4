use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

/// Counter of full passes over a latent state (Gibbs sweeps and the
/// sweep-equivalent exact initialisation passes of an SMC sampler).
///
/// Sweeps dominate the cost of every sampler here, so run reports use
/// this count as the cost unit and audits check it against the analytic
/// per-iteration formula. Cloning shares the underlying counter.
#[derive(Debug, Clone, Default)]
pub struct SweepMeter(Arc<AtomicU64>);

impl SweepMeter {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&self, sweeps: u64) {
        self.0.fetch_add(sweeps, Ordering::Relaxed);
    }

    pub fn total(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.0.store(0, Ordering::Relaxed);
    }
}
