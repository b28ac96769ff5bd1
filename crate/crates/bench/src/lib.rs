//! Benchmarks for `ruledgeo`; see `benches/kernels.rs`.

use ruledgeo::surfaces::bundled;
use ruledgeo::RuledSurfaceSpec;

/// Builds a bundled surface for benchmarking.
pub fn surface(name: &str) -> RuledSurfaceSpec {
    bundled(name).and_then(|b| b.spec().ok()).unwrap_or_else(|| panic!("no bundled surface `{name}`"))
}
