use std::fmt;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::domains::{standard_domain, standard_interval, IndexSet, NDomain};
use crate::error::{Error, Result};
use crate::geometry::{embed_cube, subdivide, transfer_cube, Cube, Interval, Subdivision};
use crate::loops::{null_certificate, KSequence};
use crate::rational::{self, half, int, one, rat, zero, Rational};
use crate::schedule::{CubePath, CubeSchedule};

use super::eh::eh_shuffle;
use super::{ShufflePlan, StepKind};

/// Keyframes per stage, counting both ends.
const FRAMES: usize = 7;

/// What stage `m` of a gluing did.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NTwistRecord {
    pub stage: usize,
    /// The subdivision generator, in the coordinates of the stage block.
    pub center: Cube,
    pub phi: Vec<usize>,
    pub intervals: Vec<Interval>,
}

struct Header {
    center: Cube,
    cells: Subdivision,
    /// `frames[e][j - 1]`: cell `j` at the `e`-th Eckmann–Hilton breakpoint.
    frames: Vec<Vec<Cube>>,
    record: NTwistRecord,
}

/// Glues countably many n-twists into one homotopy from an ℕ-indexed domain
/// to the standard domain.
///
/// Stage `m` runs during `[(m-1)/m, m/(m+1)]` inside the block
/// `[(m-1)/m, 1] × I^{n-1}`: the subdivision of `I^n` generated by cube `m`
/// is Eckmann–Hilton shuffled so that cube `m` lands in the first slab, and
/// that slab is then stretched onto `R_m`. All later cubes ride along inside
/// the cells that contain them and end up in the next block.
pub struct GluingEngine {
    source: NDomain,
    shrink_first: bool,
    headers: Mutex<Vec<Arc<Header>>>,
}

impl fmt::Debug for GluingEngine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GluingEngine")
            .field("dim", &self.source.dim())
            .field("stages_built", &self.headers.lock().map(|h| h.len()).unwrap_or(0))
            .finish()
    }
}

fn block(n: usize, m: usize) -> Cube {
    Cube::slab(n, Interval::new_unchecked(rat(m as i64 - 1, m as i64), one()))
}

fn stage_window(m: usize) -> Interval {
    standard_interval(m)
}

/// Extra bits of denominator tolerated beyond the scale of a cube's sides.
const SLACK_BITS: u64 = 12;

/// Smallest `p` with `2^-p` below a quarter of `len`.
fn precision(len: &Rational) -> u32 {
    let quarter = len / int(4);
    let mut p = 0;
    while rational::dyadic(p) >= quarter {
        p += 1;
    }
    p
}

fn light(c: &Cube) -> bool {
    c.axes().iter().all(|a| {
        let limit = u64::from(precision(&a.len())) + SLACK_BITS;
        a.lo().denom().bits() <= limit && a.hi().denom().bits() <= limit
    })
}

/// A dyadic cube inside the interior of `c`, each face moved inwards by at
/// most a quarter of the side.
fn dyadic_inside(c: &Cube) -> Cube {
    let axes = c
        .axes()
        .iter()
        .map(|a| {
            let p = precision(&a.len());
            let scale = Rational::from_integer(num_bigint::BigInt::from(1) << p as usize);
            let step = rational::dyadic(p);
            let lo = (a.lo() * &scale).floor() / &scale + &step;
            let hi = (a.hi() * &scale).ceil() / &scale - &step;
            Interval::new_unchecked(lo, hi)
        })
        .collect();
    Cube::from_axes_unchecked(axes)
}

/// `c` itself while its coordinates stay cheap, else a dyadic cube inside it.
fn settle(c: Cube) -> Cube {
    if light(&c) {
        c
    } else {
        dyadic_inside(&c)
    }
}

fn map_axis1(c: &Cube, f: impl Fn(&Rational) -> Rational) -> Cube {
    let a = c.axis(0);
    c.with_axis(0, Interval::new_unchecked(f(a.lo()), f(a.hi())))
}

impl GluingEngine {
    fn new(source: &NDomain, shrink_first: bool) -> Result<Self> {
        if source.indices() != &IndexSet::naturals() {
            return Err(Error::IndexMismatch("gluing needs a domain indexed by ℕ".into()));
        }
        let engine = Self {
            source: source.clone(),
            shrink_first,
            headers: Mutex::new(Vec::new()),
        };
        engine.try_headers(1)?;
        Ok(engine)
    }

    pub fn dim(&self) -> usize {
        self.source.dim()
    }

    pub fn source(&self) -> &NDomain {
        &self.source
    }

    fn try_headers(&self, m: usize) -> Result<Vec<Arc<Header>>> {
        let mut g = self.headers.lock().expect("header cache poisoned");
        while g.len() < m {
            let h = self.build_header(&g, g.len() + 1)?;
            g.push(Arc::new(h));
        }
        Ok(g[..m].to_vec())
    }

    fn headers(&self, m: usize) -> Vec<Arc<Header>> {
        self.try_headers(m).unwrap_or_else(|e| panic!("{e}"))
    }

    fn build_header(&self, built: &[Arc<Header>], m: usize) -> Result<Header> {
        let n = self.dim();
        let x = self.track(built, m, m - 1).pop().map_or_else(|| self.source.cube(m), |f| f.next);
        let x = if m == 1 && self.shrink_first {
            x.scaled_about_center(&half())
        } else {
            x
        };
        let center = if x.is_strictly_interior() { settle(x) } else { dyadic_inside(&x) };
        let cells = subdivide(&center).map_err(|e| e.in_lemma("n-twist"))?;
        let big_n = cells.len();
        let c = cells.center_index();
        let phi: Vec<usize> = (1..=big_n)
            .map(|j| match j {
                1 => c,
                j if j <= c => j - 1,
                j => j,
            })
            .collect();
        let domain = NDomain::finite(n, cells.cells().to_vec())?;
        let plan = eh_shuffle(&domain, &phi).map_err(|e| e.in_lemma("n-twist"))?;
        let frames = (0..=4)
            .map(|e| {
                let t = rat(e, 4);
                (1..=big_n)
                    .map(|j| plan.schedule().cube_at(j, &t))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let intervals = match &plan.provenance()[0].kind {
            StepKind::EhShuffle { intervals, .. } => intervals.clone(),
            _ => vec![],
        };
        Ok(Header {
            center: center.clone(),
            cells,
            frames,
            record: NTwistRecord {
                stage: m,
                center,
                phi,
                intervals,
            },
        })
    }

    /// Normalized frames of index `k` through stages `1..=upto` (`upto <= k`).
    fn track(&self, headers: &[Arc<Header>], k: usize, upto: usize) -> Vec<StageFrames> {
        let n = self.dim();
        let mut x = self.source.cube(k);
        let mut out = Vec::with_capacity(upto);
        for (i, h) in headers.iter().take(upto).enumerate() {
            let m = i + 1;
            let big_n = int(h.cells.len() as i64);
            let inv_n = one() / &big_n;
            let w = rat(1, m as i64 + 1);
            let mut frames = Vec::with_capacity(FRAMES);
            frames.push(x.clone());
            let next;
            if k == m {
                let c = h.cells.center_index();
                frames.push(h.center.clone());
                for e in 1..=4 {
                    frames.push(h.frames[e][c - 1].clone());
                }
                frames.push(Cube::slab(n, Interval::new_unchecked(zero(), w.clone())));
                next = frames[6].clone();
            } else {
                let cells = h.cells.cells();
                let (j, d) = match cells.iter().position(|c| c.interior_contains_cube(&x)) {
                    Some(j) => (j, settle(x.clone())),
                    None => {
                        let j = *h
                            .cells
                            .overlapping_cells(&x)
                            .first()
                            .expect("a cube meets some cell");
                        let j = j - 1;
                        let cut = x.intersection(&cells[j]).expect("overlap has interior");
                        (j, settle(cut.scaled_about_center(&half())))
                    }
                };
                frames.push(d.clone());
                for e in 1..=4 {
                    frames.push(transfer_cube(&cells[j], &h.frames[e][j], &d));
                }
                let last = frames[5].clone();
                let scale = (one() - &w) / (one() - &inv_n);
                frames.push(map_axis1(&last, |v| &w + (v - &inv_n) * &scale));
                next = map_axis1(&last, |v| (v - &inv_n) * &big_n / (&big_n - one()));
            }
            out.push(StageFrames { frames, next: next.clone() });
            x = next;
        }
        out
    }

    /// `X_k` in the coordinates of block `m`, for `m <= k`.
    pub fn normalized_position(&self, k: usize, m: usize) -> Cube {
        assert!(m >= 1 && m <= k, "stage {m} does not see index {k}");
        let headers = self.headers(m - 1);
        self.track(&headers, k, m - 1).pop().map_or_else(|| self.source.cube(k), |f| f.next)
    }

    /// Path of index `k` from its source cube to `R_k`.
    pub fn path(&self, k: usize) -> CubePath {
        let n = self.dim();
        let headers = self.headers(k);
        let stages = self.track(&headers, k, k);
        let mut keyframes: Vec<(Rational, Cube)> = Vec::with_capacity(6 * k + 2);
        for (i, st) in stages.iter().enumerate() {
            let m = i + 1;
            let win = stage_window(m);
            let blk = block(n, m);
            let step = win.len() / int(6);
            for (f, c) in st.frames.iter().enumerate() {
                if f == 0 && m > 1 {
                    continue;
                }
                keyframes.push((win.lo() + &step * int(f as i64), embed_cube(&blk, c)));
            }
        }
        keyframes.push((one(), Cube::slab(n, standard_interval(k))));
        CubePath::new(keyframes).unwrap_or_else(|e| panic!("{e}"))
    }

    /// Records of stages `1..=bound`.
    pub fn records(&self, bound: usize) -> Vec<NTwistRecord> {
        self.headers(bound).iter().map(|h| h.record.clone()).collect()
    }

    /// Checks that index `k` stays in the stage block while stage `m <= k`
    /// runs and is constant once its own stage is over, for `k <= bound`.
    pub fn audit(&self, bound: usize) -> Vec<String> {
        let n = self.dim();
        let mut failures = Vec::new();
        for k in 1..=bound {
            let path = self.path(k);
            for (t, c) in path.keyframes() {
                let m = (1..=k).find(|&m| stage_window(m).contains(t));
                match m {
                    Some(m) => {
                        // a boundary keyframe belongs to both adjacent stages
                        let inside = block(n, m).contains_cube(c)
                            || (m > 1 && stage_window(m - 1).contains(t) && block(n, m - 1).contains_cube(c));
                        if !inside {
                            failures.push(format!("index {k} leaves block {m} at t = {}", rational::format(t)));
                        }
                    }
                    None => {
                        if c != &Cube::slab(n, standard_interval(k)) {
                            failures.push(format!("index {k} moves after its stage at t = {}", rational::format(t)));
                        }
                    }
                }
            }
        }
        failures
    }
}

struct StageFrames {
    frames: Vec<Cube>,
    next: Cube,
}

/// Homotopy from an ℕ-indexed domain to the standard domain (the first cube
/// is halved about its centre before anything else happens).
pub fn infinite_to_standard(r: &NDomain) -> Result<ShufflePlan> {
    let lemma = "infinite gluing";
    let engine = Arc::new(GluingEngine::new(r, true).map_err(|e| e.in_lemma(lemma))?);
    let e = engine.clone();
    let schedule = CubeSchedule::lazy(
        r.clone(),
        standard_domain(r.dim())?,
        vec![],
        Arc::new(move |k| e.path(k)),
        "infinite-gluing",
    );
    Ok(ShufflePlan::with_gluing(schedule, engine))
}

/// One n-twist: cube 1 (strictly interior) becomes `R_1` and every other cube
/// moves into `[1/2, 1] × I^{n-1}`.
///
/// Returns the schedule and the remaining cubes `2, 3, …` in the coordinates
/// of `[1/2, 1] × I^{n-1}`.
pub fn ntwist(r: &NDomain) -> Result<(CubeSchedule, NDomain)> {
    let lemma = "n-twist";
    let first = r.get(1).map_err(|e| e.in_lemma(lemma))?;
    if !first.is_strictly_interior() {
        return Err(Error::TouchesBoundary(format!("{first:?}")).in_lemma(lemma));
    }
    let engine = Arc::new(GluingEngine::new(r, false).map_err(|e| e.in_lemma(lemma))?);
    let n = r.dim();
    let e = engine.clone();
    let residual = NDomain::from_rule(n, IndexSet::From(2), Arc::new(move |k| e.normalized_position(k, 2)));
    let res = residual.clone();
    let target = NDomain::from_rule(
        n,
        IndexSet::naturals(),
        Arc::new(move |k| {
            if k == 1 {
                Cube::slab(n, standard_interval(1))
            } else {
                embed_cube(&block(n, 2), &res.cube(k))
            }
        }),
    );
    let e = engine.clone();
    let schedule = CubeSchedule::lazy(
        r.clone(),
        target,
        vec![],
        Arc::new(move |k| {
            let headers = e.headers(1);
            let st = e.track(&headers, k, 1).pop().expect("one stage");
            let frames = st
                .frames
                .into_iter()
                .enumerate()
                .map(|(i, c)| (rat(i as i64, 6), c))
                .collect();
            CubePath::new(frames).unwrap_or_else(|err| panic!("{err}"))
        }),
        "n-twist",
    );
    Ok((schedule, residual))
}

/// Whether a block belongs to the running stage or to a finished cube.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    Active,
    Finished,
}

/// A rectangle of `(x_1, s)` space, `s = 1 - t` running from the standard
/// end of the gluing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingBlock {
    pub stage: usize,
    pub kind: BlockKind,
    pub x: Interval,
    pub time: Interval,
}

impl GluingBlock {
    pub fn area(&self) -> Rational {
        self.x.len() * self.time.len()
    }

    /// The block in `I^n × I`: `x × I^{n-1} × time`.
    pub fn cube(&self, n: usize) -> Cube {
        let mut axes = vec![Interval::unit(); n + 1];
        axes[0] = self.x.clone();
        axes[n] = self.time.clone();
        Cube::from_axes_unchecked(axes)
    }
}

/// The part of `I^n × I` not covered by the blocks of stages `<= bound`:
/// `[bound/(bound+1), 1] × I^{n-1} × [0, 1/(bound+1)]`, which shrinks to
/// `C = {1} × I^{n-1} × {0}`.
pub fn gluing_remainder(n: usize, bound: usize) -> Cube {
    let b = bound as i64;
    let mut axes = vec![Interval::unit(); n + 1];
    axes[0] = Interval::new_unchecked(rat(b, b + 1), one());
    axes[n] = Interval::new_unchecked(zero(), rat(1, b + 1));
    Cube::from_axes_unchecked(axes)
}

/// `A_m = [(m-1)/m, 1] × [1/(m+1), 1/m]` and
/// `B_m = [(m-1)/m, m/(m+1)] × [0, 1/(m+1)]` for `m <= bound`. Together they
/// tile `[0, 1] × [0, 1]` minus the corner `[bound/(bound+1), 1] × [0, 1/(bound+1)]`.
pub fn gluing_blocks(bound: usize) -> Vec<GluingBlock> {
    (1..=bound as i64)
        .flat_map(|m| {
            [
                GluingBlock {
                    stage: m as usize,
                    kind: BlockKind::Active,
                    x: Interval::new_unchecked(rat(m - 1, m), one()),
                    time: Interval::new_unchecked(rat(1, m + 1), rat(1, m)),
                },
                GluingBlock {
                    stage: m as usize,
                    kind: BlockKind::Finished,
                    x: standard_interval(m as usize),
                    time: Interval::new_unchecked(zero(), rat(1, m + 1)),
                },
            ]
        })
        .collect()
}

/// Outcome of [`continuity_certificate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContinuityReport {
    pub pass: bool,
    #[serde(with = "rational::serde_rational")]
    pub epsilon: Rational,
    /// Every loop from this index on is within `epsilon` of the basepoint.
    pub threshold: usize,
    /// From this time on, only those loops are still moving.
    #[serde(with = "rational::serde_rational")]
    pub time_threshold: Rational,
    #[serde(with = "rational::serde_rational")]
    pub tail_bound: Rational,
    pub audit_bound: usize,
    pub engines: usize,
    pub failures: Vec<String>,
}

/// Continuity of a glued homotopy at its standard end: the null sequence
/// bounds what the infinitely many late stages can do, and the first
/// `audit_bound` paths are checked to stay within their stage blocks.
pub fn continuity_certificate(
    plan: &ShufflePlan,
    sequence: &KSequence,
    epsilon: &Rational,
    audit_bound: usize,
) -> Result<ContinuityReport> {
    let threshold = null_certificate(sequence, epsilon)?;
    let tail = sequence
        .tail_bound(threshold)
        .unwrap_or_else(|| if sequence.indices().is_finite() { zero() } else { epsilon.clone() });
    let mut failures = Vec::new();
    if &tail >= epsilon {
        failures.push(format!("tail bound at {threshold} is not below epsilon"));
    }
    for (i, engine) in plan.gluings().iter().enumerate() {
        failures.extend(engine.audit(audit_bound).into_iter().map(|f| format!("gluing {i}: {f}")));
    }
    Ok(ContinuityReport {
        pass: failures.is_empty(),
        epsilon: epsilon.clone(),
        threshold,
        time_threshold: one() - rat(1, threshold as i64),
        tail_bound: tail,
        audit_bound,
        engines: plan.gluings().len(),
        failures,
    })
}
