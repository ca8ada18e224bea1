use crate::error::{Error, Result};
use crate::geometry::{Cube, Interval};
use crate::rational::{one, zero};

/// The 3^n-cell decomposition `𝒞(R)` of `I^n` cut out by the hyperplanes
/// through the faces of `R`.
///
/// Cells are numbered from 1 in lexicographic order: axis 1 is the most
/// significant digit, and on each axis the three pieces `[0,a]`, `[a,b]`,
/// `[b,1]` are digits 0, 1, 2. The generator sits at `(3^n + 1) / 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subdivision {
    generator: Cube,
    cells: Vec<Cube>,
}

pub fn subdivide(r: &Cube) -> Result<Subdivision> {
    if !r.is_strictly_interior() {
        return Err(Error::TouchesBoundary(format!("{r:?}")));
    }
    let n = r.dim();
    let pieces: Vec<[Interval; 3]> = r
        .axes()
        .iter()
        .map(|a| {
            [
                Interval::new_unchecked(zero(), a.lo().clone()),
                a.clone(),
                Interval::new_unchecked(a.hi().clone(), one()),
            ]
        })
        .collect();
    let total = 3usize.pow(n as u32);
    let cells = (0..total)
        .map(|code| {
            let digits = digits_of(code, n);
            Cube::from_axes_unchecked(
                digits
                    .iter()
                    .enumerate()
                    .map(|(axis, &d)| pieces[axis][d].clone())
                    .collect(),
            )
        })
        .collect();
    Ok(Subdivision {
        generator: r.clone(),
        cells,
    })
}

/// Base-3 digits of `code`, most significant (axis 1) first.
fn digits_of(mut code: usize, n: usize) -> Vec<usize> {
    let mut digits = vec![0; n];
    for d in digits.iter_mut().rev() {
        *d = code % 3;
        code /= 3;
    }
    digits
}

impl Subdivision {
    pub fn generator(&self) -> &Cube {
        &self.generator
    }

    pub fn dim(&self) -> usize {
        self.generator.dim()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// 1-based index of the central cell.
    pub fn center_index(&self) -> usize {
        center_index(self.dim())
    }

    /// Cells in lexicographic order.
    pub fn cells(&self) -> &[Cube] {
        &self.cells
    }

    /// 1-based access.
    pub fn cell(&self, j: usize) -> &Cube {
        &self.cells[j - 1]
    }

    /// 1-based index of a cell containing `c`, if one exists.
    pub fn containing_cell(&self, c: &Cube) -> Option<usize> {
        // Per axis the cube sits in one piece iff it avoids both cut points.
        let mut code = 0;
        for (axis, a) in c.axes().iter().enumerate() {
            let g = self.generator.axis(axis);
            let digit = if a.hi() <= g.lo() {
                0
            } else if a.lo() >= g.lo() && a.hi() <= g.hi() {
                1
            } else if a.lo() >= g.hi() {
                2
            } else {
                return None;
            };
            code = code * 3 + digit;
        }
        Some(code + 1)
    }

    /// 1-based indices of cells whose interior meets `int(c)`, in order.
    pub fn overlapping_cells(&self, c: &Cube) -> Vec<usize> {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, cell)| cell.interiors_overlap(c))
            .map(|(i, _)| i + 1)
            .collect()
    }
}

/// `(3^n + 1) / 2`.
pub fn center_index(n: usize) -> usize {
    (3usize.pow(n as u32) + 1) / 2
}
