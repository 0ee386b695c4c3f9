/// Deterministic 64-bit generator with a fixed, portable output stream
/// (the widely used splitmix construction: an additive Weyl sequence pushed
/// through a two-round avalanche). Every randomized component in this
/// workspace draws from it so that runs reproduce bit-for-bit across
/// platforms and toolchains.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in `[0, n)` by multiply-shift range reduction.
    /// The bias for any realistic `n` is below 2^-32 and the mapping is
    /// platform-independent, which matters more here than exactness.
    pub fn range(&mut self, n: u64) -> u64 {
        assert!(n > 0, "range over empty interval");
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }

    /// Standard normal draw via the Box-Muller transform. Consumes two
    /// uniforms per call; the first is shifted into `(0, 1]` so the log is
    /// always finite.
    pub fn gaussian(&mut self) -> f64 {
        let u1 = ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.range(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

/// Derives an independent stream seed from a base seed and a stream index,
/// so one user-facing seed can feed several generators without correlation.
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    SplitMix64::new(seed ^ stream.wrapping_mul(GOLDEN_GAMMA)).next_u64()
}
