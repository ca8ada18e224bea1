//! Exact axis-aligned cubes in the unit cube `I^n`.
//!
//! A [`Cube`] is a product of closed rational intervals with nonempty
//! interior. Everything here is exact: containment and disjointness are
//! decided by rational comparisons with no tolerance.

mod grid;
mod subdivision;

pub use grid::{
    complement_connected, decomposition_with_marked_cubes, polygonal_corridor,
    polygonal_corridor_with, Corridor, Grid, GridDecomposition,
};
pub use subdivision::{center_index, subdivide, Subdivision};

use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, one, rat, zero, Rational};

/// A closed interval `[lo, hi]` with `0 <= lo < hi <= 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo >= hi {
            return Err(Error::DegenerateInterval {
                lo: rational::format(&lo),
                hi: rational::format(&hi),
            });
        }
        if lo < zero() || hi > one() {
            return Err(Error::OutsideUnitInterval {
                lo: rational::format(&lo),
                hi: rational::format(&hi),
            });
        }
        Ok(Self { lo, hi })
    }

    /// Builds `[a/b, c/d]`, panicking on invalid input. Intended for fixtures.
    pub fn of(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self::new(rat(a, b), rat(c, d)).expect("valid interval")
    }

    pub fn unit() -> Self {
        Self {
            lo: zero(),
            hi: one(),
        }
    }

    pub(crate) fn new_unchecked(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo < hi);
        Self { lo, hi }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn len(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / rational::int(2)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interior(&self, x: &Rational) -> bool {
        &self.lo < x && x < &self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Open intervals overlap.
    pub fn interiors_overlap(&self, other: &Interval) -> bool {
        self.lo < other.hi && other.lo < self.hi
    }

    pub fn intersection(&self, other: &Interval) -> Option<Interval> {
        let lo = rational::max(&self.lo, &other.lo);
        let hi = rational::min(&self.hi, &other.hi);
        (lo < hi).then(|| Interval::new_unchecked(lo, hi))
    }

    /// Affine image of `x` under the increasing map sending `self` onto `target`.
    pub fn map_to(&self, target: &Interval, x: &Rational) -> Rational {
        &target.lo + (x - &self.lo) * target.len() / self.len()
    }

    /// Middle sub-interval scaled by `factor` about the midpoint.
    pub fn scaled_about_center(&self, factor: &Rational) -> Interval {
        let mid = self.midpoint();
        let half = self.len() * factor / rational::int(2);
        Interval::new_unchecked(&mid - &half, &mid + &half)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(2))?;
        seq.serialize_element(&rational::format(&self.lo))?;
        seq.serialize_element(&rational::format(&self.hi))?;
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [lo, hi] = <[String; 2]>::deserialize(d)?;
        let lo = rational::parse(&lo).map_err(de::Error::custom)?;
        let hi = rational::parse(&hi).map_err(de::Error::custom)?;
        Interval::new(lo, hi).map_err(de::Error::custom)
    }
}

/// An axis-aligned n-cube `∏ [lo_i, hi_i] ⊆ I^n` with nonempty interior.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cube {
    axes: Vec<Interval>,
}

impl Cube {
    pub fn new(axes: Vec<Interval>) -> Result<Self> {
        if axes.len() < 2 {
            return Err(Error::DimensionTooSmall(axes.len()));
        }
        Ok(Self { axes })
    }

    /// Builds a cube from `(lo, hi)` pairs, validating every axis.
    pub fn from_bounds(bounds: Vec<(Rational, Rational)>) -> Result<Self> {
        let axes = bounds
            .into_iter()
            .map(|(lo, hi)| Interval::new(lo, hi))
            .collect::<Result<Vec<_>>>()?;
        Self::new(axes)
    }

    /// Fixture helper: each axis given as `(a, b, c, d)` meaning `[a/b, c/d]`.
    pub fn of(axes: &[(i64, i64, i64, i64)]) -> Self {
        Self::new(axes.iter().map(|&(a, b, c, d)| Interval::of(a, b, c, d)).collect())
            .expect("valid cube")
    }

    pub fn unit(n: usize) -> Self {
        Self {
            axes: vec![Interval::unit(); n],
        }
    }

    /// `first × I^{n-1}`.
    pub fn slab(n: usize, first: Interval) -> Self {
        let mut axes = vec![Interval::unit(); n];
        axes[0] = first;
        Self { axes }
    }

    pub(crate) fn from_axes_unchecked(axes: Vec<Interval>) -> Self {
        Self { axes }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Interval] {
        &self.axes
    }

    pub fn axis(&self, i: usize) -> &Interval {
        &self.axes[i]
    }

    pub fn lo(&self, i: usize) -> &Rational {
        &self.axes[i].lo
    }

    pub fn hi(&self, i: usize) -> &Rational {
        &self.axes[i].hi
    }

    pub fn with_axis(&self, i: usize, interval: Interval) -> Cube {
        let mut axes = self.axes.clone();
        axes[i] = interval;
        Cube { axes }
    }

    pub fn center(&self) -> Vec<Rational> {
        self.axes.iter().map(Interval::midpoint).collect()
    }

    pub fn min_side(&self) -> Rational {
        self.axes
            .iter()
            .map(Interval::len)
            .min()
            .expect("cube has axes")
    }

    pub fn volume(&self) -> Rational {
        self.axes.iter().map(Interval::len).product()
    }

    pub fn contains_point(&self, p: &[Rational]) -> bool {
        self.axes.iter().zip(p).all(|(a, x)| a.contains(x))
    }

    pub fn interior_contains_point(&self, p: &[Rational]) -> bool {
        self.axes.iter().zip(p).all(|(a, x)| a.contains_interior(x))
    }

    pub fn contains_cube(&self, other: &Cube) -> bool {
        self.axes
            .iter()
            .zip(&other.axes)
            .all(|(a, b)| a.contains_interval(b))
    }

    /// `other ⊆ int(self)`.
    pub fn interior_contains_cube(&self, other: &Cube) -> bool {
        self.axes
            .iter()
            .zip(&other.axes)
            .all(|(a, b)| a.lo < b.lo && b.hi < a.hi)
    }

    /// `self ⊆ (0,1)^n`.
    pub fn is_strictly_interior(&self) -> bool {
        self.axes.iter().all(|a| a.lo > zero() && a.hi < one())
    }

    pub fn touches_unit_boundary(&self) -> bool {
        !self.is_strictly_interior()
    }

    pub fn interiors_overlap(&self, other: &Cube) -> bool {
        self.axes
            .iter()
            .zip(&other.axes)
            .all(|(a, b)| a.interiors_overlap(b))
    }

    /// Intersection with nonempty interior, if any.
    pub fn intersection(&self, other: &Cube) -> Option<Cube> {
        self.axes
            .iter()
            .zip(&other.axes)
            .map(|(a, b)| a.intersection(b))
            .collect::<Option<Vec<_>>>()
            .map(|axes| Cube { axes })
    }

    /// The concentric cube whose sides are `factor` times as long.
    pub fn scaled_about_center(&self, factor: &Rational) -> Cube {
        Cube {
            axes: self
                .axes
                .iter()
                .map(|a| a.scaled_about_center(factor))
                .collect(),
        }
    }

    /// Smallest cube containing both.
    pub fn hull(&self, other: &Cube) -> Cube {
        Cube {
            axes: self
                .axes
                .iter()
                .zip(&other.axes)
                .map(|(a, b)| {
                    Interval::new_unchecked(rational::min(&a.lo, &b.lo), rational::max(&a.hi, &b.hi))
                })
                .collect(),
        }
    }

    /// Per-corner interpolation `(1 - lambda) * self + lambda * other`.
    pub fn lerp(&self, other: &Cube, lambda: &Rational) -> Cube {
        Cube {
            axes: self
                .axes
                .iter()
                .zip(&other.axes)
                .map(|(a, b)| {
                    Interval::new_unchecked(
                        rational::lerp(&a.lo, &b.lo, lambda),
                        rational::lerp(&a.hi, &b.hi, lambda),
                    )
                })
                .collect(),
        }
    }

    /// Axis on which `self` and `other` are separated, if any.
    pub fn separating_axis(&self, other: &Cube) -> Option<(usize, Side)> {
        self.axes
            .iter()
            .zip(&other.axes)
            .enumerate()
            .find_map(|(i, (a, b))| {
                if a.hi <= b.lo {
                    Some((i, Side::Below))
                } else if b.hi <= a.lo {
                    Some((i, Side::Above))
                } else {
                    None
                }
            })
    }

    fn check_dim(&self, other: &Cube) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

/// Which side of the other cube `self` lies on along a separating axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Below,
    Above,
}

impl fmt::Debug for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.axes.iter().enumerate() {
            if i > 0 {
                write!(f, "×")?;
            }
            write!(f, "{a:?}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Serialize for Cube {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.axes.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cube {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let axes = Vec::<Interval>::deserialize(d)?;
        Cube::new(axes).map_err(de::Error::custom)
    }
}

/// `true` iff the open cubes are disjoint, i.e. some axis separates them.
pub fn interiors_disjoint(a: &Cube, b: &Cube) -> Result<bool> {
    a.check_dim(b)?;
    Ok(!a.interiors_overlap(b))
}

/// The canonical increasing affine homeomorphism between two cubes, one
/// `x ↦ scale * x + offset` per axis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineCubeMap {
    scale: Vec<Rational>,
    offset: Vec<Rational>,
}

impl AffineCubeMap {
    pub fn identity(n: usize) -> Self {
        Self {
            scale: vec![one(); n],
            offset: vec![zero(); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.scale.len()
    }

    pub fn scale(&self) -> &[Rational] {
        &self.scale
    }

    pub fn offset(&self) -> &[Rational] {
        &self.offset
    }

    pub fn apply(&self, p: &[Rational]) -> Vec<Rational> {
        p.iter()
            .zip(self.scale.iter().zip(&self.offset))
            .map(|(x, (s, o))| x * s + o)
            .collect()
    }

    pub fn apply_f64(&self, p: &[f64]) -> Vec<f64> {
        p.iter()
            .zip(self.scale.iter().zip(&self.offset))
            .map(|(x, (s, o))| x * rational::to_f64(s) + rational::to_f64(o))
            .collect()
    }

    pub fn invert(&self, p: &[Rational]) -> Vec<Rational> {
        p.iter()
            .zip(self.scale.iter().zip(&self.offset))
            .map(|(y, (s, o))| (y - o) / s)
            .collect()
    }

    pub fn inverse(&self) -> Self {
        let scale: Vec<Rational> = self.scale.iter().map(|s| one() / s).collect();
        let offset = self
            .offset
            .iter()
            .zip(&scale)
            .map(|(o, s)| -(o * s))
            .collect();
        Self { scale, offset }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AffineCubeMap) -> Self {
        let scale = self
            .scale
            .iter()
            .zip(&inner.scale)
            .map(|(a, b)| a * b)
            .collect();
        let offset = self
            .offset
            .iter()
            .zip(self.scale.iter().zip(&inner.offset))
            .map(|(o, (s, io))| s * io + o)
            .collect();
        Self { scale, offset }
    }

    /// Image of a cube. The caller guarantees the image lies in `I^n`.
    pub fn apply_cube(&self, c: &Cube) -> Cube {
        Cube {
            axes: c
                .axes
                .iter()
                .zip(self.scale.iter().zip(&self.offset))
                .map(|(a, (s, o))| Interval::new_unchecked(&a.lo * s + o, &a.hi * s + o))
                .collect(),
        }
    }
}

/// `L_{source, target}`: corners go to corners, increasing in every axis.
pub fn canonical_affine(source: &Cube, target: &Cube) -> Result<AffineCubeMap> {
    source.check_dim(target)?;
    let mut scale = Vec::with_capacity(source.dim());
    let mut offset = Vec::with_capacity(source.dim());
    for (s, t) in source.axes.iter().zip(&target.axes) {
        let k = t.len() / s.len();
        offset.push(&t.lo - &s.lo * &k);
        scale.push(k);
    }
    Ok(AffineCubeMap { scale, offset })
}

/// `L_{I^n, block}(c)`: the image of `c` when `I^n` is squeezed onto `block`.
pub fn embed_cube(block: &Cube, c: &Cube) -> Cube {
    Cube {
        axes: block
            .axes
            .iter()
            .zip(&c.axes)
            .map(|(b, a)| {
                let len = b.len();
                Interval::new_unchecked(&b.lo + &a.lo * &len, &b.lo + &a.hi * &len)
            })
            .collect(),
    }
}

/// `L_{from, to}(c)` evaluated corner by corner.
pub fn transfer_cube(from: &Cube, to: &Cube, c: &Cube) -> Cube {
    Cube {
        axes: from
            .axes
            .iter()
            .zip(to.axes.iter().zip(&c.axes))
            .map(|(f, (t, a))| Interval::new_unchecked(f.map_to(t, &a.lo), f.map_to(t, &a.hi)))
            .collect(),
    }
}

/// `L_{c, I^n}(p)`: the coordinates of `p` relative to `c`.
pub fn normalize_point(c: &Cube, p: &[Rational]) -> Vec<Rational> {
    c.axes
        .iter()
        .zip(p)
        .map(|(a, x)| (x - &a.lo) / a.len())
        .collect()
}
