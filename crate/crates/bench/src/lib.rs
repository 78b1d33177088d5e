//! Shared fixtures for the benchmark targets.

use masurelab_core::rootdata::presets;
use masurelab_core::{CoweightVector, RootGeneratingSystem};

pub fn sl2() -> RootGeneratingSystem {
    presets::sl2_simply_connected()
}

pub fn a2() -> RootGeneratingSystem {
    presets::a2_simply_connected()
}

pub fn a1xa1() -> RootGeneratingSystem {
    presets::a1xa1_simply_connected()
}

pub fn sl2_affine() -> RootGeneratingSystem {
    presets::sl2_affine_canonical()
}

pub fn coroot_multiple(sys: &RootGeneratingSystem, n: i64) -> CoweightVector {
    let coeffs: Vec<i64> = (0..sys.index_count()).map(|_| n).collect();
    sys.coweight_from_coroot_ints(&coeffs)
}
