use crate::domains::{block_pair_domain, interleaved_pair_domain, permuted, standard_domain};
use crate::error::Result;

use super::{shuffle, ShufflePlan};

/// `∏ f_k ≃ ∏ f_{φ(k)}` on the standard domain, for a finitely supported
/// permutation `φ` given by its prefix.
pub fn permutation_plan(n: usize, perm: &[usize]) -> Result<ShufflePlan> {
    let std = standard_domain(n)?;
    let target = permuted(&std, perm)?;
    if perm.iter().enumerate().all(|(i, &p)| p == i + 1) {
        return Ok(ShufflePlan::constant(&std, vec![]));
    }
    shuffle(&std, &target, &[])
}

/// `∏ (f_k · g_k) ≃ (∏ f_k) · (∏ g_k)`: the interleaved pair domain shuffled
/// onto the block pair domain.
pub fn double_product_plan(n: usize) -> Result<ShufflePlan> {
    shuffle(&interleaved_pair_domain(n)?, &block_pair_domain(n)?, &[])
}
