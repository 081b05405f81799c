//! Counter-based deterministic random streams.
//!
//! A single 64-bit seed plus a stream counter give an independent SplitMix64
//! generator per trial, so randomized suites stay reproducible no matter how
//! work is scheduled across threads.

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Independent stream for trial `counter` under a master `seed`.
    pub fn stream(seed: u64, counter: u64) -> Self {
        // decorrelate the counter before mixing it into the seed
        let mut s = SplitMix64::new(counter.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ seed);
        s.next_u64();
        s
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Uniform in [lo, hi).
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}
