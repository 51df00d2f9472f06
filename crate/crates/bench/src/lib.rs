//! Fixed instances shared by the benches.

use avwc_core::code::sample_codebook;
use avwc_core::{AvwcSpec, Channel, CodeParams, Distribution, WiretapCode};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Two-state binary AVWC with a good legitimate link and noisy eavesdroppers.
pub fn binary_avwc() -> AvwcSpec {
    AvwcSpec::new(
        vec![Channel::bsc(0.05), Channel::bsc(0.1)],
        vec![Channel::bsc(0.3), Channel::bsc(0.4)],
    )
    .unwrap()
}

pub fn eaves() -> Vec<Channel> {
    vec![Channel::bsc(0.35), Channel::bsc(0.45)]
}

pub fn lab_code(n: usize, seed: u64) -> WiretapCode {
    let p = CodeParams::new(n, 0.1, 0.15, 0.1, 2, 4, Distribution::uniform(2)).unwrap();
    let cb = sample_codebook(&p, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
    WiretapCode::new(cb, vec![Channel::bsc(0.05)]).unwrap()
}
