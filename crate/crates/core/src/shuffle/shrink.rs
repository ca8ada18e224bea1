use crate::domains::{NDomain, SubdomainWitness};
use crate::error::{Error, Result};
use crate::schedule::{CubeSchedule, CHAIN_CHECK_BOUND};

/// Each cube slides corner by corner from `R_k` onto its sub-cube `S_k`;
/// indices with `R_k = S_k` stay constant.
pub fn shrink_schedule(parent: &NDomain, witness: &SubdomainWitness) -> Result<CubeSchedule> {
    let lemma = "n-domain shrinking";
    if parent.indices() != witness.parent().indices() {
        return Err(Error::IndexMismatch("witness belongs to another domain".into()).in_lemma(lemma));
    }
    let bound = if parent.is_finite() { 0 } else { CHAIN_CHECK_BOUND };
    for (k, c) in parent.entries(bound) {
        if witness.parent().cube(k) != c {
            return Err(Error::InvalidWitness(k).in_lemma(lemma));
        }
    }
    witness.check(bound).map_err(|e| e.in_lemma(lemma))?;
    CubeSchedule::linear(parent, witness.child(), vec![], "shrink")
}
