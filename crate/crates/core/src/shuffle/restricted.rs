use std::sync::Arc;

use crate::domains::{shrink_with, IndexSet, NDomain, SubdomainWitness};
use crate::error::{Error, Result};
use crate::geometry::{decomposition_with_marked_cubes, normalize_point, transfer_cube, Cube, Interval};
use crate::loops::lattice;
use crate::rational::{half, int, rat, Rational};
use crate::schedule::{BlockEmbedding, CubePath, CubeSchedule};

use super::finite::finite_shuffle;
use super::gluing::infinite_to_standard;
use super::shrink::shrink_schedule;
use super::{check_connected, check_request, ShufflePlan, StepKind};

/// Indices scanned for an overlapping target cube when the target domain has
/// no locator.
const SCAN_BOUND: usize = 1024;

/// `k ↦` position of `k` in `ℕ ∖ F` (1-based).
fn squeeze(fixed: &[usize], k: usize) -> usize {
    k - fixed.iter().filter(|&&f| f < k).count()
}

/// Inverse of [`squeeze`].
fn unsqueeze(fixed: &[usize], j: usize) -> usize {
    let mut k = j;
    for &f in fixed {
        if f <= k {
            k += 1;
        }
    }
    k
}

fn find_partner(r: &NDomain, s: &NDomain, k0: usize, fixed: &[usize]) -> Option<usize> {
    let c = r.cube(k0);
    let hit = |k: usize| !fixed.contains(&k) && s.cube(k).interiors_overlap(&c);
    if s.has_locator() {
        let mut probes = vec![c.center()];
        for res in [4, 8, 16] {
            for p in lattice(c.dim(), res) {
                let q: Vec<Rational> = c
                    .axes()
                    .iter()
                    .zip(&p)
                    .map(|(a, u)| a.lo() + u * a.len())
                    .collect();
                if c.interior_contains_point(&q) {
                    probes.push(q);
                }
            }
        }
        for p in probes {
            if let Some(k) = s.locate(&p).into_iter().flatten().find(|&k| hit(k)) {
                return Some(k);
            }
        }
    }
    (1..=SCAN_BOUND).find(|&k| hit(k))
}

/// Shuffle of two ℕ-indexed domains keeping the cubes in `fixed` in place.
///
/// An auxiliary cube `A` is cut from the first movable source cube and the
/// target cube overlapping it. The grid generated by `A` and the fixed cubes
/// splits the rest of `I^n` into cells; every movable cube shrinks into one
/// cell, a restricted finite shuffle carries the cells into slabs of `A`, and
/// inside `A` an unrestricted infinite shuffle finishes the job.
pub fn infinite_restricted(r: &NDomain, s: &NDomain, fixed: &[usize]) -> Result<ShufflePlan> {
    let lemma = "restricted infinite shuffle";
    let wrap = |e: Error| e.in_lemma(lemma);
    check_request(r, s, fixed).map_err(wrap)?;
    if r.indices() != &IndexSet::naturals() {
        return Err(wrap(Error::IndexMismatch("domains must be indexed by ℕ".into())));
    }
    let mut fixed = fixed.to_vec();
    fixed.sort_unstable();
    fixed.dedup();
    check_connected(r, &fixed).map_err(wrap)?;
    let n = r.dim();

    let k0 = (1..).find(|k| !fixed.contains(k)).expect("F is finite");
    let k1 = find_partner(r, s, k0, &fixed)
        .ok_or_else(|| wrap(Error::Unsupported(format!("no target cube meets source cube {k0}"))))?;
    let aux = r
        .cube(k0)
        .intersection(&s.cube(k1))
        .expect("interiors overlap")
        .scaled_about_center(&rat(1, 3));

    let mut marked: Vec<Cube> = fixed.iter().map(|&f| r.cube(f)).collect();
    marked.push(aux.clone());
    let dec = decomposition_with_marked_cubes(n, &marked).map_err(wrap)?;
    let aux_pos = *dec.marked_positions().last().expect("A is marked");
    let fixed_pos: Vec<usize> = dec.marked_positions()[..fixed.len()].to_vec();
    // finite index (1-based) of every element except A
    let slot_of = |pos: usize| if pos < aux_pos { pos + 1 } else { pos };
    let elements: Vec<Cube> = dec
        .elements()
        .iter()
        .enumerate()
        .filter(|(p, _)| *p != aux_pos)
        .map(|(_, c)| c.clone())
        .collect();
    let free: Vec<usize> = (0..dec.len()).filter(|p| !dec.marked_positions().contains(p)).collect();
    let p = free.len() as i64;
    let step = aux.axis(0).len() / int(p);
    let slabs: Vec<Cube> = (0..p)
        .map(|j| {
            let lo = aux.lo(0) + &step * int(j);
            aux.with_axis(0, Interval::new_unchecked(lo.clone(), lo + &step))
        })
        .collect();
    let mut targets = elements.clone();
    for (j, &pos) in free.iter().enumerate() {
        targets[slot_of(pos) - 1] = slabs[j].clone();
    }
    let cell_src = NDomain::finite(n, elements).map_err(wrap)?;
    let cell_dst = NDomain::finite(n, targets).map_err(wrap)?;
    let fixed_slots: Vec<usize> = fixed_pos.iter().map(|&p| slot_of(p)).collect();
    let cells = finite_shuffle(&cell_src, &cell_dst, &fixed_slots)?;

    // (finite slot, sub-cube) for each movable cube of a domain
    let free_cells: Arc<Vec<(usize, Cube)>> = Arc::new(free.iter().map(|&p| (slot_of(p), dec.elements()[p].clone())).collect());
    let park = {
        let free_cells = free_cells.clone();
        move |c: &Cube| -> (usize, Cube) {
            let (slot, cell) = free_cells
                .iter()
                .find(|(_, cell)| cell.interiors_overlap(c))
                .expect("a movable cube meets a free cell");
            (*slot, c.intersection(cell).expect("overlap").scaled_about_center(&half()))
        }
    };
    let park = Arc::new(park);

    let side = |d: &NDomain| -> Result<(CubeSchedule, CubeSchedule, NDomain)> {
        let fx = Arc::new(fixed.clone());
        let (pk, f2) = (park.clone(), fx.clone());
        let parked = shrink_with(d, move |k, c| if f2.contains(&k) { c } else { pk(&c).1 });
        let shrink = shrink_schedule(d, &SubdomainWitness::new(d.clone(), parked.clone())?)?
            .with_fixed(fixed.clone())
            .with_label("park");
        let (pk, f2, dd, sched) = (park.clone(), fx.clone(), d.clone(), cells.schedule().clone());
        let carried = NDomain::from_rule(
            n,
            IndexSet::naturals(),
            Arc::new(move |k| {
                let c = dd.cube(k);
                if f2.contains(&k) {
                    return c;
                }
                let (slot, sub) = pk(&c);
                let cell = sched.path(slot).expect("cell index");
                transfer_cube(cell.start(), cell.end(), &sub)
            }),
        );
        let (pk, f2, dd, sched) = (park.clone(), fx.clone(), d.clone(), cells.schedule().clone());
        let carry = CubeSchedule::lazy(
            parked,
            carried.clone(),
            fixed.clone(),
            Arc::new(move |k| {
                let c = dd.cube(k);
                if f2.contains(&k) {
                    return CubePath::constant(c);
                }
                let (slot, sub) = pk(&c);
                let cell = sched.path(slot).expect("cell index");
                let start = cell.start().clone();
                cell.map_cubes(|x| transfer_cube(&start, x, &sub))
            }),
            "carry",
        );
        Ok((shrink, carry, carried))
    };
    let (shrink_r, carry_r, y_r) = side(r).map_err(wrap)?;
    let (shrink_s, carry_s, y_s) = side(s).map_err(wrap)?;

    let inner_domain = |y: &NDomain| -> NDomain {
        let (y, a, fx) = (y.clone(), aux.clone(), fixed.clone());
        let mut d = NDomain::from_rule(
            n,
            IndexSet::naturals(),
            Arc::new(move |j| {
                let c = y.cube(unsqueeze(&fx, j));
                let lo: Vec<Rational> = (0..c.dim()).map(|i| c.lo(i).clone()).collect();
                let hi: Vec<Rational> = (0..c.dim()).map(|i| c.hi(i).clone()).collect();
                let (lo, hi) = (normalize_point(&a, &lo), normalize_point(&a, &hi));
                Cube::from_bounds(lo.into_iter().zip(hi).collect()).expect("nested cube")
            }),
        );
        d = d.with_certificate(crate::domains::Certificate::Construction("normalized in A".into()));
        d
    };
    let inner_r = infinite_to_standard(&inner_domain(&y_r))?;
    let inner_s = infinite_to_standard(&inner_domain(&y_s))?;
    let inner = ShufflePlan::compose(&[inner_r, inner_s.reverse()]).map_err(wrap)?;
    let embedded = inner.schedule().embed(&BlockEmbedding::new(aux.clone(), Interval::unit()));
    let (fx, rr) = (fixed.clone(), r.clone());
    let inner_sched = CubeSchedule::lazy(
        y_r.clone(),
        y_s.clone(),
        fixed.clone(),
        Arc::new(move |k| {
            if fx.contains(&k) {
                CubePath::constant(rr.cube(k))
            } else {
                embedded.path(squeeze(&fx, k)).expect("inner index").as_ref().clone()
            }
        }),
        "inner-shuffle",
    )
    .with_stages(inner.schedule().stages().to_vec());

    let steps = [
        shrink_r,
        carry_r,
        inner_sched,
        carry_s.reverse(),
        shrink_s.reverse(),
    ];
    let schedule = CubeSchedule::compose(&steps).map_err(wrap)?.with_fixed(fixed.clone());
    let mut head = ShufflePlan::new(
        steps[0].clone(),
        vec![
            StepKind::Auxiliary { k0, k1, cube: aux.clone() }.into(),
            StepKind::Shrink { label: "park".into() }.into(),
            StepKind::Decomposition {
                elements: dec.len(),
                slabs,
            }
            .into(),
        ],
    );
    head.provenance.extend(cells.provenance().iter().cloned());
    let mut tail = ShufflePlan::new(steps[4].clone(), vec![]);
    tail.provenance.extend(cells.reverse().provenance().iter().cloned());
    tail.provenance.push(super::Step {
        kind: StepKind::Shrink { label: "park".into() },
        reversed: true,
    });
    let plans = [head, inner, tail];
    Ok(ShufflePlan::merge_provenance(schedule, &plans))
}
