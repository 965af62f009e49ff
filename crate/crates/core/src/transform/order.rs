use itertools::Itertools;
use num_bigint::BigUint;
use thiserror::Error;

use super::apply::{apply_sequence, ApplyMode, AtomicTransformation};
use crate::scene::SceneGraph;

/// Longest sequence [`is_order_sensitive`] will enumerate by default (24 permutations).
pub const DEFAULT_PERMUTATION_BUDGET: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("sequence of length {len} exceeds the permutation budget of {budget}")]
pub struct SequenceTooLong {
    pub len: usize,
    pub budget: usize,
}

/// True iff some permutation of `steps` has a failing step under strict application.
pub fn is_order_sensitive(scene: &SceneGraph, steps: &[AtomicTransformation]) -> Result<bool, SequenceTooLong> {
    is_order_sensitive_with_budget(scene, steps, DEFAULT_PERMUTATION_BUDGET)
}

pub fn is_order_sensitive_with_budget(
    scene: &SceneGraph,
    steps: &[AtomicTransformation],
    budget: usize,
) -> Result<bool, SequenceTooLong> {
    if steps.len() > budget {
        return Err(SequenceTooLong { len: steps.len(), budget });
    }
    let sensitive = steps
        .iter()
        .copied()
        .permutations(steps.len())
        .any(|perm| !apply_sequence(scene, &perm, ApplyMode::Strict).all_applied());
    Ok(sensitive)
}

/// Number of candidate answers of length `1..=max_len`:
/// `sum_{i=1}^{max_len} (value_count * object_count)^i`, computed exactly.
pub fn answer_space_size(object_count: u64, value_count: u64, max_len: u32) -> BigUint {
    let per_step = BigUint::from(object_count) * BigUint::from(value_count);
    (1..=max_len).map(|i| per_step.pow(i)).sum()
}
