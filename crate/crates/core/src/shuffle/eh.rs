use crate::domains::NDomain;
use crate::error::{Error, Result};
use crate::geometry::{Cube, Interval};
use crate::rational::{int, rat, zero};
use crate::schedule::CubeSchedule;

use super::{ShufflePlan, StepKind};

/// Target of the shuffle: position `k` goes to the slab
/// `[(φ^{-1}(k) - 1)/m, φ^{-1}(k)/m] × I^{n-1}`.
pub fn slab_domain(like: &NDomain, phi: &[usize]) -> Result<NDomain> {
    let m = phi.len();
    let inv = inverse(phi)?;
    let n = like.dim();
    let idx = like.indices().upto(0);
    if idx.len() != m {
        return Err(Error::ArityMismatch(format!("permutation of {m} for {} cubes", idx.len())));
    }
    NDomain::finite_indexed(
        n,
        idx.into_iter()
            .enumerate()
            .map(|(pos, k)| {
                let slot = inv[pos] as i64;
                (k, Cube::slab(n, Interval::new_unchecked(rat(slot - 1, m as i64), rat(slot, m as i64))))
            })
            .collect(),
    )
}

fn inverse(phi: &[usize]) -> Result<Vec<usize>> {
    let m = phi.len();
    let mut inv = vec![0; m];
    for (i, &p) in phi.iter().enumerate() {
        if p == 0 || p > m || inv[p - 1] != 0 {
            return Err(Error::InvalidPermutation(format!("{phi:?}")));
        }
        inv[p - 1] = i + 1;
    }
    Ok(inv)
}

/// Pairwise disjoint `[c_k, d_k] ⊆ J_k`, where `J_k` is the last-axis
/// projection of cube `k`.
///
/// With `ℓ = min |J_k|` and `w = ℓ / (2m(m+1))`, cube `k` takes the leftmost
/// gap of length at least `2w` left in `J_k` by the earlier choices and uses
/// its middle stretch `[g + w/2, g + 3w/2]`. At most `k - 1` intervals of
/// length `w` cut `J_k` into at most `k` gaps, so one of them is long enough.
pub fn choose_intervals(projections: &[Interval]) -> Vec<Interval> {
    let m = projections.len() as i64;
    let ell = projections.iter().map(Interval::len).min().unwrap_or_else(zero);
    let w = &ell / int(2 * m * (m + 1));
    let mut chosen: Vec<Interval> = Vec::with_capacity(projections.len());
    for j in projections {
        let mut taken: Vec<&Interval> = chosen.iter().filter(|c| c.interiors_overlap(j) || j.contains_interval(c)).collect();
        taken.sort_by(|a, b| a.lo().cmp(b.lo()));
        let mut cursor = j.lo().clone();
        let mut pick = None;
        for t in taken.iter().map(|t| Some(*t)).chain([None]) {
            let gap_end = t.map_or_else(|| j.hi().clone(), |t| t.lo().clone().max(cursor.clone()));
            if &gap_end - &cursor >= &w * int(2) {
                pick = Some(cursor.clone());
                break;
            }
            if let Some(t) = t {
                if t.hi() > &cursor {
                    cursor = t.hi().clone();
                }
            }
        }
        let g = pick.expect("a gap of length 2w always exists");
        let half_w = &w / int(2);
        chosen.push(Interval::new_unchecked(&g + &half_w, &g + &half_w + &w));
    }
    chosen
}

/// The Eckmann–Hilton rearrangement of a finite domain into slabs, through
/// four shrink/grow stages: pinch the last axis to `[c_k, d_k]`, widen to a
/// full slab in the other axes, squeeze the first axis into slot
/// `φ^{-1}(k)`, and grow the last axis back to `I`.
pub fn eh_shuffle(domain: &NDomain, phi: &[usize]) -> Result<ShufflePlan> {
    let n = domain.dim();
    let proj: Vec<Interval> = domain.cubes().iter().map(|c| c.axis(n - 1).clone()).collect();
    eh_shuffle_with_intervals(domain, phi, &choose_intervals(&proj))
}

/// [`eh_shuffle`] with given last-axis intervals.
pub fn eh_shuffle_with_intervals(domain: &NDomain, phi: &[usize], intervals: &[Interval]) -> Result<ShufflePlan> {
    let lemma = "finite shuffle";
    if !domain.is_finite() {
        return Err(Error::Unsupported("eh_shuffle needs a finite domain".into()).in_lemma(lemma));
    }
    let n = domain.dim();
    let last = n - 1;
    let target = slab_domain(domain, phi).map_err(|e| e.in_lemma(lemma))?;
    let cubes = domain.cubes();
    if intervals.len() != cubes.len() {
        return Err(Error::ArityMismatch("one interval per cube".into()).in_lemma(lemma));
    }
    for (i, (c, iv)) in cubes.iter().zip(intervals).enumerate() {
        if !c.axis(last).contains_interval(iv) {
            return Err(Error::InvalidArgument(format!("interval {i} leaves its projection")).in_lemma(lemma));
        }
        for (j, other) in intervals.iter().enumerate().skip(i + 1) {
            if iv.interiors_overlap(other) {
                return Err(Error::Overlap(i + 1, j + 1).in_lemma(lemma));
            }
        }
    }
    let idx = domain.indices().upto(0);
    let build = |f: &dyn Fn(usize, &Cube) -> Cube| -> Result<NDomain> {
        NDomain::finite_indexed(n, idx.iter().enumerate().map(|(p, &k)| (k, f(p, &cubes[p]))).collect())
    };
    let a = build(&|p, c| c.with_axis(last, intervals[p].clone()))?;
    let b = build(&|p, _| {
        let mut axes = vec![Interval::unit(); n];
        axes[last] = intervals[p].clone();
        Cube::new(axes).expect("n >= 2")
    })?;
    let c = build(&|p, _| target.cube(idx[p]).with_axis(last, intervals[p].clone()))?;
    let stages = [
        CubeSchedule::linear(domain, &a, vec![], "eh-pinch")?,
        CubeSchedule::linear(&a, &b, vec![], "eh-widen")?,
        CubeSchedule::linear(&b, &c, vec![], "eh-slot")?,
        CubeSchedule::linear(&c, &target, vec![], "eh-grow")?,
    ];
    let schedule = CubeSchedule::compose(&stages).map_err(|e| e.in_lemma(lemma))?;
    Ok(ShufflePlan::new(
        schedule,
        vec![StepKind::EhShuffle {
            phi: phi.to_vec(),
            intervals: intervals.to_vec(),
        }
        .into()],
    ))
}

pub(crate) fn identity(m: usize) -> Vec<usize> {
    (1..=m).collect()
}
