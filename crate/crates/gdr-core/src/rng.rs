//! Minimal deterministic PRNG used for synthetic data.
//!
//! Splitmix64 plus a Box–Muller normal. Hand-rolled (rather than `rand`) so
//! reference runs reproduce bit-for-bit across language ports: one normal
//! draw always consumes exactly two u64 draws and uses only the cosine
//! branch.

const TWO_NEG53: f64 = 1.0 / (1u64 << 53) as f64;

/// Splitmix64 stream with a Box–Muller normal on top.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * TWO_NEG53
    }

    /// Uniform in `(0, 1]`; safe as a log argument.
    fn next_unit_pos(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * TWO_NEG53
    }

    /// Standard normal via Box–Muller (cosine branch only).
    pub fn next_normal(&mut self) -> f64 {
        let u1 = self.next_unit_pos();
        let u2 = self.next_unit();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}
