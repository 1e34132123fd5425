//! Seeded random numbers for synthetic data.
//!
//! The stream is ChaCha8 seeded through `seed_from_u64`; uniforms take the
//! top 53 bits of each `u64` and Gaussians use the Box–Muller cosine branch,
//! two uniforms per draw. Nothing here depends on a distribution crate, so
//! generated files stay byte-identical across dependency upgrades.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{precondition, Result};

pub const DEFAULT_SEED: u64 = 42;

/// Environment variable that replaces [`DEFAULT_SEED`].
pub const SEED_ENV: &str = "DEPINNER_SEED";

/// `DEPINNER_SEED` when set, otherwise [`DEFAULT_SEED`].
pub fn default_seed() -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| precondition(format!("{SEED_ENV}={s:?} is not an unsigned integer"))),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_SEED),
        Err(e) => Err(precondition(format!("{SEED_ENV}: {e}"))),
    }
}

#[derive(Debug, Clone)]
pub struct SeededRng {
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream `stream` of `seed`. Used to give every junction of
    /// a campaign its own sequence regardless of generation order.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { inner }
    }

    /// Uniform on [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on (0, 1).
    pub fn uniform_open(&mut self) -> f64 {
        loop {
            let u = self.uniform();
            if u > 0.0 {
                return u;
            }
        }
    }

    /// Standard normal deviate.
    pub fn gaussian(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}
