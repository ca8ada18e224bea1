//! Rigid cube schedules: per-index piecewise-affine paths of cubes over
//! `[0, 1]`, with exact verification and homotopy evaluation.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domains::{IndexSet, NDomain};
use crate::error::{Error, Result};
use crate::geometry::{embed_cube, Cube, Interval};
use crate::loops::{locate_and_eval, Evaluation, KSequence};
use crate::rational::{self, one, rat, serde_rational, to_f64, zero, Rational};

/// Indices compared when checking that two lazy stages chain.
pub const CHAIN_CHECK_BOUND: usize = 64;

/// Separation margin above which a float check is trusted. Coordinates live
/// in `[0, 1]`, so rounding error is many orders of magnitude smaller.
const FLOAT_MARGIN: f64 = 1e-9;

/// Keyframed cube path; between keyframes every corner moves affinely.
#[derive(Clone)]
pub struct CubePath {
    keyframes: Vec<(Rational, Cube)>,
    floats: OnceLock<Arc<Vec<(f64, Vec<[f64; 2]>)>>>,
}

impl PartialEq for CubePath {
    fn eq(&self, other: &Self) -> bool {
        self.keyframes == other.keyframes
    }
}

impl Eq for CubePath {}

impl fmt::Debug for CubePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.keyframes.iter().map(|(t, c)| (t.to_string(), c)))
            .finish()
    }
}

impl CubePath {
    pub fn new(keyframes: Vec<(Rational, Cube)>) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidArgument(format!("cube path: {m}")));
        if keyframes.len() < 2 {
            return bad("needs at least two keyframes");
        }
        if keyframes[0].0 != zero() || keyframes.last().unwrap().0 != one() {
            return bad("times must start at 0 and end at 1");
        }
        if keyframes.windows(2).any(|w| w[0].0 >= w[1].0) {
            return bad("times must increase strictly");
        }
        let n = keyframes[0].1.dim();
        if keyframes.iter().any(|(_, c)| c.dim() != n) {
            return bad("mixed dimensions");
        }
        Ok(Self::from_keyframes(keyframes))
    }

    fn from_keyframes(keyframes: Vec<(Rational, Cube)>) -> Self {
        Self {
            keyframes,
            floats: OnceLock::new(),
        }
    }

    pub fn constant(c: Cube) -> Self {
        Self::from_keyframes(vec![(zero(), c.clone()), (one(), c)])
    }

    /// Single affine segment from `a` to `b`.
    pub fn linear(a: Cube, b: Cube) -> Self {
        Self::from_keyframes(vec![(zero(), a), (one(), b)])
    }

    pub fn keyframes(&self) -> &[(Rational, Cube)] {
        &self.keyframes
    }

    pub fn len(&self) -> usize {
        self.keyframes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keyframes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.keyframes[0].1.dim()
    }

    pub fn start(&self) -> &Cube {
        &self.keyframes[0].1
    }

    pub fn end(&self) -> &Cube {
        &self.keyframes.last().unwrap().1
    }

    pub fn is_constant(&self) -> bool {
        self.keyframes.iter().all(|(_, c)| c == self.start())
    }

    /// Index of the segment `[t_i, t_{i+1}]` containing `t`.
    fn segment(&self, t: &Rational) -> usize {
        let p = self.keyframes.partition_point(|(s, _)| s <= t);
        p.clamp(1, self.keyframes.len() - 1) - 1
    }

    pub fn at(&self, t: &Rational) -> Cube {
        let i = self.segment(t);
        let (t0, c0) = &self.keyframes[i];
        let (t1, c1) = &self.keyframes[i + 1];
        if t == t0 {
            return c0.clone();
        }
        if t == t1 {
            return c1.clone();
        }
        c0.lerp(c1, &((t - t0) / (t1 - t0)))
    }

    pub fn reversed(&self) -> Self {
        Self::from_keyframes(
            self.keyframes
                .iter()
                .rev()
                .map(|(t, c)| (one() - t, c.clone()))
                .collect(),
        )
    }

    /// Drops interior keyframes lying on the segment between their neighbours.
    pub fn simplified(self) -> Self {
        let k = &self.keyframes;
        if k.len() <= 2 {
            return self;
        }
        let mut out: Vec<(Rational, Cube)> = vec![k[0].clone()];
        for i in 1..k.len() - 1 {
            let (ta, a) = out.last().unwrap();
            let (tb, b) = &k[i + 1];
            let (t, c) = &k[i];
            let redundant = if a == b {
                c == a
            } else {
                &a.lerp(b, &((t - ta) / (tb - ta))) == c
            };
            if !redundant {
                out.push(k[i].clone());
            }
        }
        out.push(k.last().unwrap().clone());
        Self::from_keyframes(out)
    }

    /// Maps every keyframe cube through `f`.
    pub fn map_cubes(&self, f: impl Fn(&Cube) -> Cube) -> Self {
        Self::from_keyframes(self.keyframes.iter().map(|(t, c)| (t.clone(), f(c))).collect())
    }

    /// Runs this path during `[a, b]` and holds its endpoints outside it.
    pub fn in_window(&self, a: &Rational, b: &Rational) -> Self {
        let len = b - a;
        let mut out = Vec::with_capacity(self.keyframes.len() + 2);
        if a > &zero() {
            out.push((zero(), self.start().clone()));
        }
        out.extend(self.keyframes.iter().map(|(t, c)| (a + t * &len, c.clone())));
        if b < &one() {
            out.push((one(), self.end().clone()));
        }
        Self::from_keyframes(out)
    }

    /// Concatenates paths run over consecutive windows `[w_i, w_{i+1}]`.
    /// Each path must start where the previous one ended.
    pub fn chain(parts: &[&CubePath], breaks: &[Rational]) -> Result<Self> {
        debug_assert_eq!(breaks.len(), parts.len() + 1);
        let mut out: Vec<(Rational, Cube)> = Vec::new();
        for (i, p) in parts.iter().enumerate() {
            let (a, b) = (&breaks[i], &breaks[i + 1]);
            let len = b - a;
            let mut frames = p.keyframes.iter();
            if let Some((_, last)) = out.last() {
                let (_, first) = frames.next().unwrap();
                if first != last {
                    return Err(Error::ChainMismatch(i, i + 1));
                }
            }
            out.extend(frames.map(|(t, c)| (a + t * &len, c.clone())));
        }
        Ok(Self::from_keyframes(out))
    }

    fn floats(&self) -> Arc<Vec<(f64, Vec<[f64; 2]>)>> {
        self.floats
            .get_or_init(|| {
                Arc::new(
                    self.keyframes
                        .iter()
                        .map(|(t, c)| {
                            (
                                to_f64(t),
                                c.axes().iter().map(|a| [to_f64(a.lo()), to_f64(a.hi())]).collect(),
                            )
                        })
                        .collect(),
                )
            })
            .clone()
    }
}

fn lerp_f64(a: &[[f64; 2]], b: &[[f64; 2]], l: f64) -> Vec<[f64; 2]> {
    a.iter()
        .zip(b)
        .map(|(x, y)| [x[0] + (y[0] - x[0]) * l, x[1] + (y[1] - x[1]) * l])
        .collect()
}

/// Which construction produced a time segment of a schedule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageAnnotation {
    pub label: String,
    #[serde(with = "serde_rational")]
    pub start: Rational,
    #[serde(with = "serde_rational")]
    pub end: Rational,
}

impl StageAnnotation {
    pub fn whole(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            start: zero(),
            end: one(),
        }
    }

    fn rescaled(&self, a: &Rational, b: &Rational) -> Self {
        let len = b - a;
        Self {
            label: self.label.clone(),
            start: a + &self.start * &len,
            end: a + &self.end * &len,
        }
    }
}

pub type PathRule = Arc<dyn Fn(usize) -> CubePath + Send + Sync>;

#[derive(Clone)]
enum Paths {
    Table(Arc<Vec<Arc<CubePath>>>),
    Rule {
        rule: PathRule,
        cache: Arc<Mutex<HashMap<usize, Arc<CubePath>>>>,
    },
}

/// A homotopy between two concatenations, given as one cube path per index.
#[derive(Clone)]
pub struct CubeSchedule {
    dim: usize,
    indices: IndexSet,
    paths: Paths,
    source: NDomain,
    target: NDomain,
    fixed: Vec<usize>,
    stages: Vec<StageAnnotation>,
}

impl fmt::Debug for CubeSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CubeSchedule")
            .field("dim", &self.dim)
            .field("indices", &self.indices)
            .field("fixed", &self.fixed)
            .field("stages", &self.stages)
            .finish()
    }
}

impl CubeSchedule {
    /// Table-backed schedule over the source's (finite) index set.
    pub fn from_paths(
        source: NDomain,
        target: NDomain,
        fixed: Vec<usize>,
        paths: Vec<CubePath>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if source.indices() != target.indices() {
            return Err(Error::IndexMismatch("source and target index sets differ".into()));
        }
        let len = source.len().ok_or_else(|| Error::Unsupported("table schedule over an infinite index set".into()))?;
        if paths.len() != len {
            return Err(Error::ArityMismatch(format!("{} paths for {len} indices", paths.len())));
        }
        Ok(Self {
            dim: source.dim(),
            indices: source.indices().clone(),
            paths: Paths::Table(Arc::new(paths.into_iter().map(Arc::new).collect())),
            source,
            target,
            fixed: sorted(fixed),
            stages: vec![StageAnnotation::whole(label)],
        })
    }

    /// Lazily evaluated schedule; paths are memoized.
    pub fn lazy(source: NDomain, target: NDomain, fixed: Vec<usize>, rule: PathRule, label: impl Into<String>) -> Self {
        Self {
            dim: source.dim(),
            indices: source.indices().clone(),
            paths: Paths::Rule {
                rule,
                cache: Arc::default(),
            },
            source,
            target,
            fixed: sorted(fixed),
            stages: vec![StageAnnotation::whole(label)],
        }
    }

    /// Every cube stays put.
    pub fn constant(domain: &NDomain, fixed: Vec<usize>) -> Self {
        if domain.is_finite() {
            let paths = domain.cubes().into_iter().map(CubePath::constant).collect();
            Self::from_paths(domain.clone(), domain.clone(), fixed, paths, "constant").expect("same index set")
        } else {
            let d = domain.clone();
            Self::lazy(
                domain.clone(),
                domain.clone(),
                fixed,
                Arc::new(move |k| CubePath::constant(d.cube(k))),
                "constant",
            )
        }
    }

    /// Straight-line interpolation `R_k → S_k` per index.
    pub fn linear(source: &NDomain, target: &NDomain, fixed: Vec<usize>, label: impl Into<String>) -> Result<Self> {
        if source.indices() != target.indices() {
            return Err(Error::IndexMismatch("source and target index sets differ".into()));
        }
        if source.is_finite() {
            let paths = source
                .cubes()
                .into_iter()
                .zip(target.cubes())
                .map(|(a, b)| line(a, b))
                .collect();
            Self::from_paths(source.clone(), target.clone(), fixed, paths, label)
        } else {
            let (s, t) = (source.clone(), target.clone());
            Ok(Self::lazy(
                source.clone(),
                target.clone(),
                fixed,
                Arc::new(move |k| line(s.cube(k), t.cube(k))),
                label,
            ))
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn indices(&self) -> &IndexSet {
        &self.indices
    }

    pub fn source(&self) -> &NDomain {
        &self.source
    }

    pub fn target(&self) -> &NDomain {
        &self.target
    }

    pub fn fixed(&self) -> &[usize] {
        &self.fixed
    }

    pub fn stages(&self) -> &[StageAnnotation] {
        &self.stages
    }

    pub fn is_finite(&self) -> bool {
        self.indices.is_finite()
    }

    pub fn with_stages(mut self, stages: Vec<StageAnnotation>) -> Self {
        self.stages = stages;
        self
    }

    /// Declares indices that must stay constant; checked by [`Self::verify`].
    pub fn with_fixed(mut self, fixed: Vec<usize>) -> Self {
        self.fixed = sorted(fixed);
        self
    }

    pub fn with_label(self, label: impl Into<String>) -> Self {
        self.with_stages(vec![StageAnnotation::whole(label)])
    }

    pub fn path(&self, k: usize) -> Result<Arc<CubePath>> {
        if !self.indices.contains(k) {
            return Err(Error::UnknownIndex(k));
        }
        Ok(match &self.paths {
            Paths::Table(t) => {
                let IndexSet::Finite(idx) = &self.indices else { unreachable!() };
                t[idx.binary_search(&k).unwrap()].clone()
            }
            Paths::Rule { rule, cache } => {
                if let Some(p) = cache.lock().unwrap().get(&k) {
                    return Ok(p.clone());
                }
                let p = Arc::new(rule(k));
                cache.lock().unwrap().entry(k).or_insert(p).clone()
            }
        })
    }

    fn path_unchecked(&self, k: usize) -> Arc<CubePath> {
        self.path(k).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn cube_at(&self, k: usize, t: &Rational) -> Result<Cube> {
        Ok(self.path(k)?.at(t))
    }

    /// `(index, cube)` at time `t` for all indices (finite) or those `<= bound`.
    pub fn state_at(&self, t: &Rational, bound: usize) -> Vec<(usize, Cube)> {
        self.indices
            .upto(bound)
            .into_iter()
            .map(|k| (k, self.path_unchecked(k).at(t)))
            .collect()
    }

    /// Paths for the checked indices, computed in parallel.
    pub fn paths_upto(&self, bound: usize) -> Vec<(usize, Arc<CubePath>)> {
        self.indices
            .upto(bound)
            .into_par_iter()
            .map(|k| (k, self.path_unchecked(k)))
            .collect()
    }

    /// Finite copy of the first `bound` indices (the whole schedule if finite).
    pub fn materialize(&self, bound: usize) -> CubeSchedule {
        let paths = self.paths_upto(bound);
        let source = self.source.truncate(bound);
        let target = self.target.truncate(bound);
        CubeSchedule {
            dim: self.dim,
            indices: source.indices().clone(),
            paths: Paths::Table(Arc::new(paths.into_iter().map(|(_, p)| p).collect())),
            source,
            target,
            fixed: self.fixed.iter().copied().filter(|&k| k <= bound || self.is_finite()).collect(),
            stages: self.stages.clone(),
        }
    }

    /// The same motion run backwards.
    pub fn reverse(&self) -> CubeSchedule {
        let paths = match &self.paths {
            Paths::Table(t) => Paths::Table(Arc::new(t.iter().map(|p| Arc::new(p.reversed())).collect())),
            Paths::Rule { .. } => {
                let this = self.clone();
                Paths::Rule {
                    rule: Arc::new(move |k| this.path_unchecked(k).reversed()),
                    cache: Arc::default(),
                }
            }
        };
        let stages = self
            .stages
            .iter()
            .rev()
            .map(|s| StageAnnotation {
                label: s.label.clone(),
                start: one() - &s.end,
                end: one() - &s.start,
            })
            .collect();
        CubeSchedule {
            dim: self.dim,
            indices: self.indices.clone(),
            paths,
            source: self.target.clone(),
            target: self.source.clone(),
            fixed: self.fixed.clone(),
            stages,
        }
    }

    /// Rescales space into `block.block` and time into `block.time`; the
    /// paths hold their endpoints outside the time window.
    pub fn embed(&self, block: &BlockEmbedding) -> CubeSchedule {
        let (a, b) = (block.time.lo().clone(), block.time.hi().clone());
        let cube = block.block.clone();
        let map = move |p: &CubePath| p.map_cubes(|c| embed_cube(&cube, c)).in_window(&a, &b);
        let paths = match &self.paths {
            Paths::Table(t) => Paths::Table(Arc::new(t.iter().map(|p| Arc::new(map(p))).collect())),
            Paths::Rule { .. } => {
                let this = self.clone();
                Paths::Rule {
                    rule: Arc::new(move |k| map(&this.path_unchecked(k))),
                    cache: Arc::default(),
                }
            }
        };
        let cube = block.block.clone();
        let cube2 = block.block.clone();
        CubeSchedule {
            dim: self.dim,
            indices: self.indices.clone(),
            paths,
            source: embed_domain(&self.source, &cube),
            target: embed_domain(&self.target, &cube2),
            fixed: self.fixed.clone(),
            stages: self
                .stages
                .iter()
                .map(|s| s.rescaled(block.time.lo(), block.time.hi()))
                .collect(),
        }
    }

    /// Runs `stages` one after another on a uniform partition of `[0, 1]`.
    pub fn compose(stages: &[CubeSchedule]) -> Result<CubeSchedule> {
        let m = stages.len() as i64;
        let breaks: Vec<Rational> = (0..=m).map(|i| rat(i, m)).collect();
        Self::compose_at(stages, &breaks)
    }

    /// Runs `stages[i]` during `[breaks[i], breaks[i+1]]`.
    pub fn compose_at(stages: &[CubeSchedule], breaks: &[Rational]) -> Result<CubeSchedule> {
        let first = stages
            .first()
            .ok_or_else(|| Error::InvalidArgument("nothing to compose".into()))?;
        if stages.len() == 1 && breaks == [zero(), one()] {
            return Ok(first.clone());
        }
        if breaks.len() != stages.len() + 1 || breaks[0] != zero() || breaks.last() != Some(&one()) {
            return Err(Error::InvalidArgument("composition breaks must partition [0, 1]".into()));
        }
        for (i, w) in stages.windows(2).enumerate() {
            if w[0].indices != w[1].indices || w[0].dim != w[1].dim {
                return Err(Error::ChainMismatch(i, i + 1));
            }
            let chained = match w[0].target.same_as(&w[1].source) {
                Some(eq) => eq,
                None => (w[0].indices.first().unwrap_or(1)..=CHAIN_CHECK_BOUND)
                    .all(|k| w[0].target.cube(k) == w[1].source.cube(k)),
            };
            if !chained {
                return Err(Error::ChainMismatch(i, i + 1));
            }
        }
        let fixed: Vec<usize> = first
            .fixed
            .iter()
            .copied()
            .filter(|k| stages.iter().all(|s| s.fixed.contains(k)))
            .collect();
        let parts: Vec<CubeSchedule> = stages.to_vec();
        let br = breaks.to_vec();
        let join = move |k: usize| -> Result<CubePath> {
            let ps: Vec<Arc<CubePath>> = parts.iter().map(|s| s.path_unchecked(k)).collect();
            let refs: Vec<&CubePath> = ps.iter().map(|p| p.as_ref()).collect();
            Ok(CubePath::chain(&refs, &br)?.simplified())
        };
        let paths = if first.is_finite() {
            let idx = first.indices.upto(0);
            let built = idx.into_iter().map(&join).collect::<Result<Vec<_>>>()?;
            Paths::Table(Arc::new(built.into_iter().map(Arc::new).collect()))
        } else {
            Paths::Rule {
                rule: Arc::new(move |k| join(k).unwrap_or_else(|e| panic!("{e}"))),
                cache: Arc::default(),
            }
        };
        let stages_out = stages
            .iter()
            .enumerate()
            .flat_map(|(i, s)| {
                let (a, b) = (breaks[i].clone(), breaks[i + 1].clone());
                s.stages.iter().map(move |st| st.rescaled(&a, &b))
            })
            .collect();
        Ok(CubeSchedule {
            dim: first.dim,
            indices: first.indices.clone(),
            paths,
            source: first.source.clone(),
            target: stages.last().unwrap().target.clone(),
            fixed,
            stages: stages_out,
        })
    }

    /// Schedule over `new_indices` whose path `j` is this schedule's path
    /// `old(j)`, with the given source and target.
    pub fn reindexed(
        &self,
        source: NDomain,
        target: NDomain,
        fixed: Vec<usize>,
        old: impl Fn(usize) -> usize + Send + Sync + 'static,
    ) -> CubeSchedule {
        let this = self.clone();
        let mut s = CubeSchedule::lazy(source, target, fixed, Arc::new(move |j| this.path_unchecked(old(j)).as_ref().clone()), "");
        s.stages = self.stages.clone();
        s
    }

    /// Exact check of endpoints, F-constancy, and all-time disjointness for
    /// every index (finite) or every index `<= bound`.
    pub fn verify(&self, bound: usize) -> VerificationReport {
        let paths = self.paths_upto(bound);
        let mut failures = Vec::new();
        for (k, p) in &paths {
            if p.start() != &self.source.cube(*k) {
                failures.push(Failure::Endpoint { index: *k, end: "source".into() });
            }
            if p.end() != &self.target.cube(*k) {
                failures.push(Failure::Endpoint { index: *k, end: "target".into() });
            }
            if self.fixed.contains(k) && !p.is_constant() {
                failures.push(Failure::FixedMoved { index: *k });
            }
            if p.keyframes.iter().any(|(_, c)| c.dim() != self.dim || !Cube::unit(self.dim).contains_cube(c)) {
                failures.push(Failure::InvalidCube { index: *k });
            }
        }
        let n = paths.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let mut overlaps: Vec<Failure> = pairs
            .par_iter()
            .filter_map(|&(i, j)| {
                let (ka, pa) = &paths[i];
                let (kb, pb) = &paths[j];
                pair_overlap(pa, pb).map(|t| Failure::Overlap {
                    a: *ka,
                    b: *kb,
                    time: rational::format(&t),
                })
            })
            .collect();
        overlaps.sort_by_key(|f| match f {
            Failure::Overlap { a, b, .. } => (*a, *b),
            _ => (0, 0),
        });
        failures.extend(overlaps);
        VerificationReport {
            pass: failures.is_empty(),
            exhaustive: self.is_finite(),
            checked_indices: n,
            checked_pairs: pairs.len(),
            keyframes: paths.iter().map(|(_, p)| p.len()).sum(),
            failures,
        }
    }
}

fn line(a: Cube, b: Cube) -> CubePath {
    if a == b {
        CubePath::constant(a)
    } else {
        CubePath::linear(a, b)
    }
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v.dedup();
    v
}

/// `L_{I^n, block}` applied to every cube of `domain`, keeping a locator.
pub fn embed_domain(domain: &NDomain, block: &Cube) -> NDomain {
    let b = block.clone();
    let mapped = domain.map_cubes(move |_, c| embed_cube(&b, &c));
    let mut out = mapped.with_certificate(crate::domains::Certificate::Construction("affine image".into()));
    if domain.has_locator() && !domain.is_finite() {
        let (d, b) = (domain.clone(), block.clone());
        out = out.with_locator(Arc::new(move |p| {
            if b.contains_point(p) {
                d.locate(&crate::geometry::normalize_point(&b, p)).unwrap_or_default()
            } else {
                vec![]
            }
        }));
    }
    out
}

/// A space–time block: space rescaled into `block`, time into `time`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockEmbedding {
    pub block: Cube,
    pub time: Interval,
}

impl BlockEmbedding {
    pub fn new(block: Cube, time: Interval) -> Self {
        Self { block, time }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(Cube::unit(n), Interval::unit())
    }
}

/// One problem found by [`CubeSchedule::verify`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Failure {
    Endpoint { index: usize, end: String },
    FixedMoved { index: usize },
    InvalidCube { index: usize },
    /// Interiors of `a` and `b` meet at `time`.
    Overlap { a: usize, b: usize, time: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub pass: bool,
    pub exhaustive: bool,
    pub checked_indices: usize,
    pub checked_pairs: usize,
    pub keyframes: usize,
    pub failures: Vec<Failure>,
}

/// A time at which the interiors of the two moving cubes meet, if any.
///
/// On every common affine segment one axis separating the cubes at both
/// segment ends certifies the whole segment. A cheap float pass settles
/// segments with a clear margin; the rest are split exactly at the times
/// where a separating axis starts or stops working.
fn pair_overlap(p: &CubePath, q: &CubePath) -> Option<Rational> {
    let fp = p.floats();
    let fq = q.floats();
    let n = p.dim();
    // merged breakpoints as (exact time, float time)
    let mut times: Vec<&Rational> = Vec::with_capacity(p.len() + q.len());
    let (mut i, mut j) = (0, 0);
    while i < p.len() || j < q.len() {
        let next = match (p.keyframes.get(i), q.keyframes.get(j)) {
            (Some((a, _)), Some((b, _))) if a == b => {
                i += 1;
                j += 1;
                a
            }
            (Some((a, _)), Some((b, _))) if a < b => {
                i += 1;
                a
            }
            (_, Some((b, _))) => {
                j += 1;
                b
            }
            (Some((a, _)), None) => {
                i += 1;
                a
            }
            (None, None) => unreachable!(),
        };
        times.push(next);
    }
    let float_at = |fs: &[(f64, Vec<[f64; 2]>)], seg: usize, t: f64| -> Vec<[f64; 2]> {
        let (t0, c0) = &fs[seg];
        let (t1, c1) = &fs[seg + 1];
        lerp_f64(c0, c1, (t - t0) / (t1 - t0))
    };
    let (mut sp, mut sq) = (0usize, 0usize);
    for w in times.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        while &p.keyframes[sp + 1].0 <= t0 {
            sp += 1;
        }
        while &q.keyframes[sq + 1].0 <= t0 {
            sq += 1;
        }
        let (f0, f1) = (to_f64(t0), to_f64(t1));
        let (a0, a1) = (float_at(&fp, sp, f0), float_at(&fp, sp, f1));
        let (b0, b1) = (float_at(&fq, sq, f0), float_at(&fq, sq, f1));
        let clear = (0..n).any(|ax| {
            (b0[ax][0] - a0[ax][1] > FLOAT_MARGIN && b1[ax][0] - a1[ax][1] > FLOAT_MARGIN)
                || (a0[ax][0] - b0[ax][1] > FLOAT_MARGIN && a1[ax][0] - b1[ax][1] > FLOAT_MARGIN)
        });
        if clear {
            continue;
        }
        let (ca0, ca1) = (p.at(t0), p.at(t1));
        let (cb0, cb1) = (q.at(t0), q.at(t1));
        if let Some(l) = segment_overlap(&ca0, &ca1, &cb0, &cb1) {
            return Some(t0 + l * (t1 - t0));
        }
    }
    None
}

/// On one affine segment, `λ ∈ [0, 1]` where the interiors meet, if any.
fn segment_overlap(a0: &Cube, a1: &Cube, b0: &Cube, b1: &Cube) -> Option<Rational> {
    let mut covers: Vec<(Rational, Rational)> = Vec::new();
    for ax in 0..a0.dim() {
        for (g0, g1) in [
            (b0.lo(ax) - a0.hi(ax), b1.lo(ax) - a1.hi(ax)),
            (a0.lo(ax) - b0.hi(ax), a1.lo(ax) - b1.hi(ax)),
        ] {
            let z = zero();
            match (g0 >= z, g1 >= z) {
                (true, true) => covers.push((zero(), one())),
                (true, false) => covers.push((zero(), &g0 / (&g0 - &g1))),
                (false, true) => covers.push((&g0 / (&g0 - &g1), one())),
                (false, false) => {}
            }
        }
    }
    covers.sort();
    let mut covered: Option<Rational> = None;
    for (lo, hi) in covers {
        match &covered {
            None if lo > zero() => return Some(zero()),
            Some(r) if &lo > r => return Some((r + &lo) / rat(2, 1)),
            _ => {}
        }
        if covered.as_ref().is_none_or(|r| &hi > r) {
            covered = Some(hi);
        }
    }
    match covered {
        None => Some(zero()),
        Some(r) if r < one() => Some((r + one()) / rat(2, 1)),
        Some(_) => None,
    }
}

/// `H(s, t)`: the loop of the lowest index whose cube contains `s` at time
/// `t`, rescaled onto that cube; the basepoint elsewhere.
///
/// Exact at `t ∈ {0, 1}` through the domain locators; otherwise indices up
/// to `truncation` are scanned and the tail bound is reported.
pub fn eval_homotopy(schedule: &CubeSchedule, sequence: &KSequence, s: &[Rational], t: &Rational, truncation: usize) -> Evaluation {
    let at_end = if t == &zero() {
        Some(&schedule.source)
    } else if t == &one() {
        Some(&schedule.target)
    } else {
        None
    };
    match at_end {
        Some(d) if d.has_locator() => locate_and_eval(sequence, s, truncation, |p| d.locate(p), |k| d.cube(k)),
        _ if schedule.is_finite() => locate_and_eval(
            sequence,
            s,
            truncation,
            |p| {
                Some(
                    schedule
                        .indices
                        .upto(0)
                        .into_iter()
                        .filter(|&k| schedule.path_unchecked(k).at(t).contains_point(p))
                        .collect(),
                )
            },
            |k| schedule.path_unchecked(k).at(t),
        ),
        _ => locate_and_eval(sequence, s, truncation, |_| None, |k| schedule.path_unchecked(k).at(t)),
    }
}

/// [`eval_homotopy`] at many points for one time, computing the cube state once.
pub fn eval_homotopy_many(
    schedule: &CubeSchedule,
    sequence: &KSequence,
    points: &[Vec<Rational>],
    t: &Rational,
    truncation: usize,
) -> Vec<Evaluation> {
    let state = schedule.state_at(t, truncation);
    let lookup: HashMap<usize, Cube> = state.iter().cloned().collect();
    let exact = schedule.is_finite();
    points
        .par_iter()
        .map(|s| {
            locate_and_eval(
                sequence,
                s,
                truncation,
                |p| {
                    exact.then(|| state.iter().filter(|(_, c)| c.contains_point(p)).map(|(k, _)| *k).collect())
                },
                |k| lookup.get(&k).cloned().unwrap_or_else(|| schedule.path_unchecked(k).at(t)),
            )
        })
        .collect()
}
