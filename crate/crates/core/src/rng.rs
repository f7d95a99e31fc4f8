//! Deterministic random number generation.
//!
//! All seeded behaviour in this crate (splits, fold assignment, epoch
//! shuffling) flows through [`SplitMix64`], Vigna's splitmix64 generator.
//! The algorithm is fixed so that identical seeds yield identical splits on
//! every platform and in every port of this pipeline.
//!
//! Component seeds are derived from one master seed with [`derive_seed`],
//! which hashes a textual label into the stream. Adding a new seeded
//! component therefore does not reshuffle existing ones.

/// splitmix64: `state` advances by the golden-ratio constant, and the output
/// is a finalizer over the new state.
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

    /// Uniform draw in `0..n` by rejection sampling, so the result is
    /// unbiased for every `n`.
    pub fn next_below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "next_below requires n > 0");
        let threshold = n.wrapping_neg() % n;
        loop {
            let r = self.next_u64();
            if r >= threshold {
                return r % n;
            }
        }
    }

    /// Fisher-Yates shuffle in place.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

/// Derives a component seed from a master seed and a textual label.
///
/// The label bytes are folded in FNV-1a style and the result is passed
/// through the splitmix64 finalizer, so distinct labels give independent
/// streams while the mapping stays stable across releases.
pub fn derive_seed(master: u64, label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    let mut mix = SplitMix64::new(master ^ h);
    mix.next_u64()
}
