//! Seeded, portable random streams.
//!
//! Every stochastic routine in the crate draws from [`NormalStream`]:
//! ChaCha20 (RFC 7539 block function, as implemented by `rand_chacha`)
//! seeded from a `u64`, uniforms formed as `(next_u64 >> 11) · 2⁻⁵³`, and
//! standard normals by the Box–Muller transform with the sine branch cached.
//! The recipe is simple enough to reproduce bit-for-bit elsewhere.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Standard-normal and uniform draws from a seeded ChaCha20 stream.
#[derive(Debug, Clone)]
pub struct NormalStream {
    rng: ChaCha20Rng,
    cached: Option<f64>,
}

impl NormalStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha20Rng::seed_from_u64(seed),
            cached: None,
        }
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.cached.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        self.cached = Some(radius * angle.sin());
        radius * angle.cos()
    }

    /// Uniform index in `0..n` (Lemire-free modulo; the bias is below 2⁻⁴⁰ for
    /// the sample sizes used here).
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0);
        (self.rng.next_u64() % n as u64) as usize
    }

    pub fn normals(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.normal()).collect()
    }
}

/// Derive an independent child seed (SplitMix64 finalizer over `seed ⊕ stream`).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0x632B_E59B_D9B4_E019);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
