//! Deterministic seed derivation for independent random streams.

/// Mixes a tag into a base seed with the SplitMix64 finalizer. Every
/// (purpose, index) gets its own derived stream, so parallel scheduling can
/// never change what a unit of work draws. The tag is offset by one to keep
/// `derive(s, 0)` distinct from `s` itself.
pub fn derive(base: u64, tag: u64) -> u64 {
    let mut z = base ^ tag.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
