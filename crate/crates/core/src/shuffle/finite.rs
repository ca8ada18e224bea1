use crate::domains::{NDomain, SubdomainWitness};
use crate::error::{Error, Result};
use crate::geometry::{Cube, Grid, Interval};
use crate::schedule::CubeSchedule;

use super::eh::{eh_shuffle, identity};
use super::shrink::shrink_schedule;
use super::two_cycle::two_cycle_swap;
use super::{check_connected, check_request, ShufflePlan, StepKind};

fn first_cell(grid: &Grid, c: &Cube) -> Cube {
    let idx = grid.cells_in(c);
    grid.cell(&idx[0])
}

/// Lower (`upper = false`) or upper half of `c` along axis 1.
fn axis1_half(c: &Cube, upper: bool) -> Cube {
    let a = c.axis(0);
    let mid = a.midpoint();
    let piece = if upper {
        Interval::new_unchecked(mid, a.hi().clone())
    } else {
        Interval::new_unchecked(a.lo().clone(), mid)
    };
    c.with_axis(0, piece)
}

/// Homotopy between two concatenations over the same finite domain indices,
/// keeping the cubes indexed by `fixed` in place.
///
/// Without fixed cubes both sides are rearranged into the same slabs. With
/// fixed cubes, every cube first shrinks into half of a grid cell, the moved
/// ones travel one at a time through the complement of the fixed cubes, and
/// everything grows back.
pub fn finite_shuffle(r: &NDomain, s: &NDomain, fixed: &[usize]) -> Result<ShufflePlan> {
    let lemma = "restricted finite shuffle";
    check_request(r, s, fixed).map_err(|e| e.in_lemma(lemma))?;
    if !r.is_finite() {
        return Err(Error::Unsupported("finite_shuffle needs finite domains".into()).in_lemma(lemma));
    }
    if r.same_as(s) == Some(true) {
        return Ok(ShufflePlan::constant(r, fixed.to_vec()));
    }
    let m = r.len().unwrap_or(0);
    if fixed.is_empty() {
        let a = eh_shuffle(r, &identity(m))?;
        let b = eh_shuffle(s, &identity(m))?;
        return ShufflePlan::compose(&[a, b.reverse()]).map_err(|e| e.in_lemma(lemma));
    }
    check_connected(r, fixed).map_err(|e| e.in_lemma(lemma))?;

    let n = r.dim();
    let idx = r.indices().upto(0);
    let moving: Vec<usize> = idx
        .iter()
        .copied()
        .filter(|k| !fixed.contains(k) && r.cube(*k) != s.cube(*k))
        .collect();
    let all: Vec<Cube> = r.cubes().into_iter().chain(s.cubes()).collect();
    let grid = Grid::from_cubes(n, &all);
    let parked = |d: &NDomain, upper: bool| -> Result<NDomain> {
        NDomain::finite_indexed(
            n,
            idx.iter()
                .map(|&k| {
                    let c = d.cube(k);
                    let c = if fixed.contains(&k) {
                        c
                    } else {
                        axis1_half(&first_cell(&grid, &c), upper && moving.contains(&k))
                    };
                    (k, c)
                })
                .collect(),
        )
    };
    let r2 = parked(r, false)?;
    let s2 = parked(s, true)?;

    let pre = shrink_schedule(r, &SubdomainWitness::new(r.clone(), r2.clone())?)?
        .with_fixed(fixed.to_vec())
        .with_label("pre-shrink");
    let post = shrink_schedule(s, &SubdomainWitness::new(s.clone(), s2.clone())?)?
        .with_fixed(fixed.to_vec())
        .with_label("post-shrink")
        .reverse();
    let mut plans = vec![ShufflePlan::new(pre, vec![StepKind::Shrink { label: "pre-shrink".into() }.into()])];
    let mut current = r2;
    for &k in &moving {
        let target = s2.cube(k);
        let next = NDomain::finite_indexed(
            n,
            idx.iter()
                .map(|&j| (j, if j == k { target.clone() } else { current.cube(j) }))
                .collect(),
        )
        .map_err(|e| e.in_lemma(lemma))?;
        plans.push(two_cycle_swap(&current, &next, k, fixed)?);
        current = next;
    }
    let mut last = ShufflePlan::new(post, vec![StepKind::Shrink { label: "post-shrink".into() }.into()]);
    last.provenance[0].reversed = true;
    plans.push(last);
    let schedules: Vec<CubeSchedule> = plans.iter().map(|p| p.schedule().clone()).collect();
    let schedule = CubeSchedule::compose(&schedules).map_err(|e| e.in_lemma(lemma))?;
    Ok(ShufflePlan::merge_provenance(schedule, &plans))
}
