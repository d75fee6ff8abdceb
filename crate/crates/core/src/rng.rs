//! Seeded randomness shared by every randomized solver.
//!
//! The generator is ChaCha8 seeded through `SeedableRng::seed_from_u64`, so a
//! given seed yields the same stream on every platform. Independent streams
//! for parallel work are derived by hashing the parent seed with a stream
//! path (see [`RngState::derive`]), which keeps results independent of the
//! order in which tasks are scheduled.

use rand::{Error as RandError, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct RngState {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// A child stream identified by `path`; does not advance `self`.
    pub fn derive(seed: u64, path: &[u64]) -> Self {
        Self::new(mix_seed(seed, path))
    }

    /// Child of this state's seed.
    pub fn child(&self, path: &[u64]) -> Self {
        Self::derive(self.seed, path)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform draw in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        // 53 random mantissa bits
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform index in `0..n`. `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        use rand::Rng;
        self.inner.gen_range(0..n)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        if p >= 1.0 {
            // still consume a draw so streams stay aligned across p values
            let _ = self.unit();
            return true;
        }
        self.unit() < p
    }

    /// Uniformly random `k`-subset of `items`, returned in ascending order.
    pub fn subset(&mut self, items: &[usize], k: usize) -> Vec<usize> {
        use rand::seq::SliceRandom;
        let mut pool = items.to_vec();
        let k = k.min(pool.len());
        let (chosen, _) = pool.partial_shuffle(&mut self.inner, k);
        let mut out = chosen.to_vec();
        out.sort_unstable();
        out
    }

    pub fn shuffle(&mut self, items: &mut [usize]) {
        use rand::seq::SliceRandom;
        items.shuffle(&mut self.inner);
    }
}

impl RngCore for RngState {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), RandError> {
        self.inner.try_fill_bytes(dest)
    }
}

/// splitmix64 finalizer folded over the path.
fn mix_seed(seed: u64, path: &[u64]) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    path.iter()
        .fold(splitmix(seed), |acc, &p| splitmix(acc ^ splitmix(p.wrapping_add(0x632B_E59B_D9B4_E019))))
}
