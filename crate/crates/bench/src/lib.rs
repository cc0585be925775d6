//! Shared fixtures for the benchmark targets.

use nsma_core::cone::{sample_cone, ConeParams, DecomposedR};

/// A mid-cone member at the given dimension, deterministic.
pub fn fixture_member(n: usize) -> DecomposedR {
    let params = ConeParams::new(0.5, 0.5).expect("valid params");
    sample_cone(n, &params, 0xBE7C).expect("sampling succeeds")
}

pub fn fixture_params() -> ConeParams {
    ConeParams::new(0.5, 0.5).expect("valid params")
}
