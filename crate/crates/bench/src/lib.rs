//! Shared fixtures for the benchmarks.

use std::sync::Arc;

use tracenorm::{build_extension, build_field, embed, Field, FieldSpec, Tower};

pub fn field(q: u64) -> Arc<Field> {
    Arc::new(build_field(FieldSpec::from_order(q).expect("prime power"), 0).expect("field fits"))
}

/// `GF(q^m) / GF(q)` with seed 0.
pub fn tower(q: u64, m: u32) -> Tower {
    let sub = field(q);
    let big = Arc::new(build_extension(&sub, m, 0).expect("extension fits"));
    embed(sub, big).expect("subfield embeds")
}
