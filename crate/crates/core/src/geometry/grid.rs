//! Grid arrangements generated by cube faces, and the path queries built on
//! them. A cube whose faces are grid breakpoints is exactly a union of grid
//! cells, so "cell inside cube" reduces to "cell center inside cube".

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::geometry::{Cube, Interval};
use crate::rational::{one, zero, Rational};

/// The product grid cut out by per-axis sorted breakpoints (always including
/// 0 and 1).
#[derive(Debug, Clone)]
pub struct Grid {
    breaks: Vec<Vec<Rational>>,
}

impl Grid {
    /// Grid generated by every face of every cube.
    pub fn from_cubes<'a>(n: usize, cubes: impl IntoIterator<Item = &'a Cube>) -> Self {
        let mut sets: Vec<BTreeSet<Rational>> = (0..n)
            .map(|_| [zero(), one()].into_iter().collect())
            .collect();
        for c in cubes {
            for (axis, a) in c.axes().iter().enumerate() {
                sets[axis].insert(a.lo().clone());
                sets[axis].insert(a.hi().clone());
            }
        }
        Self {
            breaks: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.breaks.len()
    }

    pub fn breakpoints(&self, axis: usize) -> &[Rational] {
        &self.breaks[axis]
    }

    /// Cells along each axis.
    pub fn shape(&self) -> Vec<usize> {
        self.breaks.iter().map(|b| b.len() - 1).collect()
    }

    pub fn cell_count(&self) -> usize {
        self.shape().iter().product()
    }

    pub fn cell(&self, idx: &[usize]) -> Cube {
        Cube::from_axes_unchecked(
            idx.iter()
                .enumerate()
                .map(|(axis, &i)| {
                    Interval::new_unchecked(self.breaks[axis][i].clone(), self.breaks[axis][i + 1].clone())
                })
                .collect(),
        )
    }

    /// Linear address, axis 1 most significant.
    pub fn flat(&self, idx: &[usize]) -> usize {
        let shape = self.shape();
        idx.iter().zip(&shape).fold(0, |acc, (&i, &s)| acc * s + i)
    }

    pub fn unflat(&self, mut flat: usize) -> Vec<usize> {
        let shape = self.shape();
        let mut idx = vec![0; shape.len()];
        for (slot, &s) in idx.iter_mut().zip(&shape).rev() {
            *slot = flat % s;
            flat /= s;
        }
        idx
    }

    /// All multi-indices in lexicographic order.
    pub fn indices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.cell_count()).map(move |f| self.unflat(f))
    }

    /// Facet neighbours of a cell.
    pub fn neighbours(&self, idx: &[usize]) -> Vec<Vec<usize>> {
        let shape = self.shape();
        let mut out = Vec::with_capacity(2 * idx.len());
        for axis in 0..idx.len() {
            if idx[axis] > 0 {
                let mut j = idx.to_vec();
                j[axis] -= 1;
                out.push(j);
            }
            if idx[axis] + 1 < shape[axis] {
                let mut j = idx.to_vec();
                j[axis] += 1;
                out.push(j);
            }
        }
        out
    }

    /// Multi-indices of the cells making up `c`. `c`'s faces must be
    /// breakpoints of this grid.
    pub fn cells_in(&self, c: &Cube) -> Vec<Vec<usize>> {
        let ranges: Vec<(usize, usize)> = c
            .axes()
            .iter()
            .enumerate()
            .map(|(axis, a)| {
                let b = &self.breaks[axis];
                let lo = b.partition_point(|x| x < a.lo());
                let hi = b.partition_point(|x| x < a.hi());
                (lo, hi)
            })
            .collect();
        let mut out = vec![vec![]];
        for (lo, hi) in ranges {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<usize>| {
                    (lo..hi).map(move |i| {
                        let mut p = prefix.clone();
                        p.push(i);
                        p
                    })
                })
                .collect();
        }
        out
    }

    fn free_mask(&self, obstacles: &[Cube]) -> Vec<bool> {
        self.indices()
            .map(|idx| {
                let center = self.cell(&idx).center();
                !obstacles.iter().any(|o| o.contains_point(&center))
            })
            .collect()
    }
}

/// A cubical decomposition in which each marked cube is a single element and
/// every other element is a cell of the grid generated by the marked faces.
#[derive(Debug, Clone)]
pub struct GridDecomposition {
    grid: Grid,
    marked: Vec<Cube>,
    elements: Vec<Cube>,
    marked_positions: Vec<usize>,
}

impl GridDecomposition {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn marked(&self) -> &[Cube] {
        &self.marked
    }

    /// Elements in grid order; a marked cube appears where its first cell
    /// would have been.
    pub fn elements(&self) -> &[Cube] {
        &self.elements
    }

    /// Position (0-based) of each marked cube within [`Self::elements`].
    pub fn marked_positions(&self) -> &[usize] {
        &self.marked_positions
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

pub fn decomposition_with_marked_cubes(n: usize, marked: &[Cube]) -> Result<GridDecomposition> {
    for (i, a) in marked.iter().enumerate() {
        if a.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: a.dim(),
            });
        }
        for (j, b) in marked.iter().enumerate().skip(i + 1) {
            if a.interiors_overlap(b) {
                return Err(Error::Overlap(i + 1, j + 1));
            }
        }
    }
    let grid = Grid::from_cubes(n, marked);
    let mut elements = Vec::new();
    let mut marked_positions = vec![usize::MAX; marked.len()];
    for idx in grid.indices() {
        let cell = grid.cell(&idx);
        let center = cell.center();
        match marked.iter().position(|m| m.contains_point(&center)) {
            Some(m) => {
                if marked_positions[m] == usize::MAX {
                    marked_positions[m] = elements.len();
                    elements.push(marked[m].clone());
                }
            }
            None => elements.push(cell),
        }
    }
    Ok(GridDecomposition {
        grid,
        marked: marked.to_vec(),
        elements,
        marked_positions,
    })
}

/// Whether `I^n` minus the (closed) obstacles is path connected, decided on
/// the face-induced grid by facet adjacency of free cells.
pub fn complement_connected(n: usize, obstacles: &[Cube]) -> bool {
    let grid = Grid::from_cubes(n, obstacles);
    let free = grid.free_mask(obstacles);
    let Some(start) = free.iter().position(|&f| f) else {
        return true;
    };
    let mut seen = vec![false; free.len()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(f) = queue.pop_front() {
        for nb in grid.neighbours(&grid.unflat(f)) {
            let g = grid.flat(&nb);
            if free[g] && !seen[g] {
                seen[g] = true;
                queue.push_back(g);
            }
        }
    }
    free.iter().zip(&seen).all(|(&f, &s)| !f || s)
}

/// A chain of facet-adjacent free grid cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corridor {
    pub cells: Vec<Cube>,
    /// Smallest side length over all corridor cells.
    pub clearance: Rational,
}

/// Shortest facet-adjacent chain of free cells from a cell of `start` to a
/// cell of `goal`, on the grid generated by all the given faces.
pub fn polygonal_corridor(start: &Cube, goal: &Cube, obstacles: &[Cube]) -> Result<Corridor> {
    polygonal_corridor_with(start, goal, obstacles, &[])
}

/// As [`polygonal_corridor`], with `extra` cubes contributing breakpoints
/// (so that they are unions of cells) without blocking anything.
pub fn polygonal_corridor_with(
    start: &Cube,
    goal: &Cube,
    obstacles: &[Cube],
    extra: &[Cube],
) -> Result<Corridor> {
    let n = start.dim();
    if start == goal {
        return Ok(Corridor {
            cells: vec![],
            clearance: start.min_side(),
        });
    }
    let grid = Grid::from_cubes(
        n,
        obstacles
            .iter()
            .chain(extra)
            .chain([start, goal]),
    );
    let free = grid.free_mask(obstacles);
    let sources: Vec<usize> = grid
        .cells_in(start)
        .iter()
        .map(|i| grid.flat(i))
        .filter(|&f| free[f])
        .collect();
    let targets: BTreeSet<usize> = grid
        .cells_in(goal)
        .iter()
        .map(|i| grid.flat(i))
        .filter(|&f| free[f])
        .collect();
    let mut parent = vec![usize::MAX; free.len()];
    let mut queue = VecDeque::new();
    for &s in &sources {
        parent[s] = s;
        queue.push_back(s);
    }
    let mut hit = None;
    while let Some(f) = queue.pop_front() {
        if targets.contains(&f) {
            hit = Some(f);
            break;
        }
        for nb in grid.neighbours(&grid.unflat(f)) {
            let g = grid.flat(&nb);
            if free[g] && parent[g] == usize::MAX {
                parent[g] = f;
                queue.push_back(g);
            }
        }
    }
    let mut f = hit.ok_or(Error::NoPath)?;
    let mut chain = vec![f];
    while parent[f] != f {
        f = parent[f];
        chain.push(f);
    }
    chain.reverse();
    let cells: Vec<Cube> = chain.iter().map(|&f| grid.cell(&grid.unflat(f))).collect();
    let clearance = cells.iter().map(Cube::min_side).min().expect("nonempty chain");
    Ok(Corridor { cells, clearance })
}
