use crate::domains::NDomain;
use crate::error::{Error, Result};
use crate::geometry::{polygonal_corridor_with, Cube, Grid, Interval};
use crate::rational::{int, rat, Rational};
use crate::schedule::{CubePath, CubeSchedule};

use super::{check_connected, ShufflePlan, StepKind};

/// Cube of side `side` centred at the centre of `cell`.
fn box_at(cell: &Cube, side: &Rational) -> Cube {
    let r = side / int(2);
    Cube::from_axes_unchecked(
        cell.center()
            .into_iter()
            .map(|c| Interval::new_unchecked(&c - &r, &c + &r))
            .collect(),
    )
}

/// Moves cube `k0` from `R_{k0}` to `S_{k0}` while every other index keeps
/// its cube; `R` and `S` differ only at `k0`.
///
/// `k0` first shrinks to a small box in a corridor cell, slides along a
/// chain of facet-adjacent cells avoiding the fixed cubes, and grows into
/// `S_{k0}`. Non-fixed cubes in the way retreat into a grid cell clear of
/// the slide for its duration.
pub fn two_cycle_swap(r: &NDomain, s: &NDomain, k0: usize, fixed: &[usize]) -> Result<ShufflePlan> {
    let lemma = "two-cycle swap";
    let wrap = |e: Error| e.in_lemma(lemma);
    if !r.is_finite() || r.indices() != s.indices() {
        return Err(wrap(Error::IndexMismatch("two finite domains over the same indices".into())));
    }
    let idx = r.indices().upto(0);
    if !r.indices().contains(k0) {
        return Err(wrap(Error::UnknownIndex(k0)));
    }
    if fixed.contains(&k0) {
        return Err(wrap(Error::FixedMoved(k0)));
    }
    if let Some(&f) = fixed.iter().find(|&&f| !r.indices().contains(f)) {
        return Err(wrap(Error::UnknownIndex(f)));
    }
    for &k in &idx {
        if k != k0 && r.cube(k) != s.cube(k) {
            return Err(wrap(Error::InvalidArgument(format!("index {k} differs away from {k0}"))));
        }
    }
    let (start, goal) = (r.cube(k0), s.cube(k0));
    if start == goal {
        return Ok(ShufflePlan::constant(r, fixed.to_vec()));
    }
    check_connected(r, fixed).map_err(wrap)?;

    let obstacles: Vec<Cube> = fixed.iter().map(|&k| r.cube(k)).collect();
    let bystanders: Vec<usize> = idx.iter().copied().filter(|k| *k != k0 && !fixed.contains(k)).collect();
    let extra: Vec<Cube> = bystanders.iter().map(|&k| r.cube(k)).collect();
    let corridor = polygonal_corridor_with(&start, &goal, &obstacles, &extra).map_err(wrap)?;
    let sigma = &corridor.clearance / int(2);
    let boxes: Vec<Cube> = corridor.cells.iter().map(|c| box_at(c, &sigma)).collect();
    let hulls: Vec<Cube> = if boxes.len() == 1 {
        boxes.clone()
    } else {
        boxes.windows(2).map(|w| w[0].hull(&w[1])).collect()
    };

    let third = rat(1, 3);
    let two_thirds = rat(2, 3);
    let legs = boxes.len() - 1;
    let mut frames = vec![(int(0), start.clone())];
    if legs == 0 {
        frames.push((third.clone(), boxes[0].clone()));
        frames.push((two_thirds.clone(), boxes[0].clone()));
    } else {
        for (j, b) in boxes.iter().enumerate() {
            frames.push((&third + rat(j as i64, 3 * legs as i64), b.clone()));
        }
    }
    frames.push((int(1), goal));
    let mover = CubePath::new(frames).map_err(wrap)?;

    let mut moved = Vec::new();
    let mut paths = Vec::with_capacity(idx.len());
    for &k in &idx {
        let c = r.cube(k);
        let path = if k == k0 {
            mover.clone()
        } else if fixed.contains(&k) || !hulls.iter().any(|h| h.interiors_overlap(&c)) {
            CubePath::constant(c)
        } else {
            let grid = Grid::from_cubes(c.dim(), hulls.iter().chain([&c]));
            let refuge = grid
                .cells_in(&c)
                .into_iter()
                .map(|i| grid.cell(&i))
                .find(|cell| hulls.iter().all(|h| !h.interiors_overlap(cell)))
                .ok_or_else(|| wrap(Error::NoPath))?;
            moved.push(k);
            CubePath::new(vec![
                (int(0), c.clone()),
                (third.clone(), refuge.clone()),
                (two_thirds.clone(), refuge),
                (int(1), c),
            ])
            .map_err(wrap)?
        };
        paths.push(path);
    }
    let schedule = CubeSchedule::from_paths(r.clone(), s.clone(), fixed.to_vec(), paths, "two-cycle").map_err(wrap)?;
    Ok(ShufflePlan::new(
        schedule,
        vec![StepKind::TwoCycle {
            k0,
            corridor: corridor.cells,
            clearance: corridor.clearance,
            bystanders: moved,
        }
        .into()],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dom(cubes: Vec<Cube>) -> NDomain {
        NDomain::finite(2, cubes).unwrap()
    }

    #[test]
    fn slides_around_a_wall() {
        // fixed wall in the middle with a gap at the top
        let wall = Cube::of(&[(2, 5, 3, 5), (0, 1, 4, 5)]);
        let a = Cube::of(&[(0, 1, 1, 5), (0, 1, 1, 5)]);
        let b = Cube::of(&[(4, 5, 1, 1), (0, 1, 1, 5)]);
        let r = dom(vec![wall.clone(), a]);
        let s = dom(vec![wall, b]);
        let p = two_cycle_swap(&r, &s, 2, &[1]).unwrap();
        let rep = p.verify(0);
        assert!(rep.pass, "{:?}", rep.failures);
    }

    #[test]
    fn bystander_retreats() {
        // a free cube sits right between start and goal
        let a = Cube::of(&[(0, 1, 1, 5), (2, 5, 3, 5)]);
        let mid = Cube::of(&[(2, 5, 3, 5), (0, 1, 1, 1)]);
        let b = Cube::of(&[(4, 5, 1, 1), (2, 5, 3, 5)]);
        let r = dom(vec![a, mid.clone()]);
        let s = dom(vec![b, mid]);
        let p = two_cycle_swap(&r, &s, 1, &[]).unwrap();
        assert!(p.verify(0).pass);
        match &p.provenance()[0].kind {
            StepKind::TwoCycle { bystanders, .. } => assert_eq!(bystanders, &vec![2]),
            k => panic!("{k:?}"),
        }
    }

    #[test]
    fn blocked_by_fixed_cubes() {
        let wall = Cube::of(&[(2, 5, 3, 5), (0, 1, 1, 1)]);
        let a = Cube::of(&[(0, 1, 1, 5), (0, 1, 1, 5)]);
        let b = Cube::of(&[(4, 5, 1, 1), (0, 1, 1, 5)]);
        let r = dom(vec![wall.clone(), a]);
        let s = dom(vec![wall, b]);
        let e = two_cycle_swap(&r, &s, 2, &[1]).unwrap_err();
        assert!(e.to_string().contains("disconnected"));
        assert!(two_cycle_swap(&r, &s, 1, &[1]).is_err());
    }

    #[test]
    fn unchanged_is_constant() {
        let r = dom(vec![Cube::unit(2)]);
        let p = two_cycle_swap(&r, &r, 1, &[]).unwrap();
        assert!(p.schedule().path(1).unwrap().is_constant());
    }
}
