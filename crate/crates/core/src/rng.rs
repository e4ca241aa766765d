//! Counter-style determinism built on the SplitMix64 finalizer.
//!
//! Every random decision made by the samplers is a pure function of a handful
//! of integers: master seed, trial index, object index (variable, pair, arc),
//! and a domain tag that keeps unrelated decision streams from colliding.
//! Nothing is stateful, so
//!
//! * trials are embarrassingly parallel and replayable in any order, and
//! * two experiments that share (seed, trial) see the *same* uniform for each
//!   potential clause, which is what makes the monotone coupling across kernel
//!   scalings exact rather than merely statistical.

/// SplitMix64 output function (Steele, Lea & Flood's mixer). A bijection on
/// u64 with good avalanche behaviour; not cryptographic, which is fine here.
#[inline]
pub fn mix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Absorb a sequence of words into a single key. Each word is mixed in full,
/// so permuting or editing any word scrambles the result.
#[inline]
pub fn derive(key: u64, words: &[u64]) -> u64 {
    let mut h = mix64(key);
    for &w in words {
        h = mix64(h ^ w);
    }
    h
}

/// Map a hash to a uniform in [0, 1) using the top 53 bits.
#[inline]
pub fn unit(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

// Domain tags. Arbitrary distinct constants; changing any of them changes
// every sampled object, so they are part of the determinism contract.
pub const DOM_TRIAL: u64 = 0x5452_4941_4c00_0001; // per-trial key
pub const DOM_TYPE: u64 = 0x5459_5045_0000_0002; // variable type draws
pub const DOM_SIGN: u64 = 0x5349_474e_0000_0003; // variable sign draws
pub const DOM_CLAUSE: u64 = 0x434c_4155_5345_0004; // clause presence draws
pub const DOM_ARC: u64 = 0x4152_4300_0000_0005; // digraph arc presence draws
pub const DOM_MASK: u64 = 0x4d41_534b_0000_0006; // flip-mask coin draws

/// Key for one trial of one experiment. All per-object draws hang off this.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialKey(pub u64);

impl TrialKey {
    pub fn new(master_seed: u64, trial: u64) -> Self {
        TrialKey(derive(master_seed, &[DOM_TRIAL, trial]))
    }

    /// Uniform in [0,1) for one object in one domain.
    #[inline]
    pub fn uniform(&self, domain: u64, object: u64) -> f64 {
        unit(derive(self.0, &[domain, object]))
    }

    /// Uniform in [0,1) for an object addressed by two indices.
    #[inline]
    pub fn uniform2(&self, domain: u64, a: u64, b: u64) -> f64 {
        unit(derive(self.0, &[domain, a, b]))
    }
}
