//! Portable seeded random stream.
//!
//! The generator is SplitMix64 (Steele, Lea and Flood; the generator behind
//! Java's `SplittableRandom`) used in counter form: the `k`-th 64-bit output
//! of the stream seeded with `seed` is `splitmix64(seed + k * GAMMA)` in
//! wrapping arithmetic, with [`splitmix64`] as defined below. Outputs depend
//! only on integer operations, so every platform produces identical streams.
//!
//! A uniform real takes the top 53 bits of one output. Because the state is
//! a plain counter, skipping `n` uniforms is a single addition.

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngStream {
    seed: u64,
    counter: u64,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, counter: 0 }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_u64(&mut self) -> u64 {
        let out = splitmix64(self.seed.wrapping_add(self.counter.wrapping_mul(GAMMA)));
        self.counter = self.counter.wrapping_add(1);
        out
    }

    /// Uniform real in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        let u = self.peek_uniform(0);
        self.counter = self.counter.wrapping_add(1);
        u
    }

    /// Uniform real in `[lo, hi)`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// The uniform `ahead` draws from now, without advancing.
    pub fn peek_uniform(&self, ahead: u64) -> f64 {
        let k = self.counter.wrapping_add(ahead);
        (splitmix64(self.seed.wrapping_add(k.wrapping_mul(GAMMA))) >> 11) as f64
            * (1.0 / (1u64 << 53) as f64)
    }

    /// Advances the stream as if `n` uniforms had been drawn.
    pub fn skip_uniforms(&mut self, n: usize) {
        self.counter = self.counter.wrapping_add(n as u64);
    }

    /// Number of uniforms drawn (or skipped) since the stream was created.
    pub fn position(&self) -> u64 {
        self.counter
    }
}

/// SplitMix64 step: advance by `GAMMA`, then apply the finaliser.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
