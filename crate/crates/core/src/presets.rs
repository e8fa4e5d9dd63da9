//! Named backends available from the command line.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::GroupBackend;

pub const PRESETS: &[&str] = &["free2", "z", "z3xz3", "z3xfree2", "paper-example-3", "s3"];

pub fn preset(name: &str) -> Result<Arc<GroupBackend>> {
    match name {
        "free2" => GroupBackend::free(2),
        "z" => GroupBackend::free(1),
        "z3xz3" => GroupBackend::free_product(GroupBackend::cyclic(3, "a")?, GroupBackend::cyclic(3, "b")?),
        "z3xfree2" => GroupBackend::direct_product(GroupBackend::cyclic(3, "a")?, GroupBackend::free(2)?),
        "paper-example-3" => paper_example_3(),
        "s3" => GroupBackend::symmetric3(),
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

/// ⟨x, y, a | a³, a y a⁻¹ y⁻¹, x a x⁻¹ a⁻²⟩ as ℤ/3 ⋊ F(x, y): x inverts a, y
/// centralizes it.
pub fn paper_example_3() -> Result<Arc<GroupBackend>> {
    GroupBackend::semidirect(
        GroupBackend::cyclic(3, "a")?,
        GroupBackend::free(2)?,
        vec![vec![0, 2, 1], vec![0, 1, 2]],
    )
}
