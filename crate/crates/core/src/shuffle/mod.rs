//! Plan constructors: shrinking, the finite Eckmann–Hilton shuffle, two-cycle
//! swaps, the restricted finite case, the n-twist and infinite gluing, and
//! the general shuffle that dispatches between them.

mod corollaries;
mod eh;
mod finite;
mod gluing;
mod restricted;
mod shrink;
mod two_cycle;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use corollaries::{double_product_plan, permutation_plan};
pub use eh::{choose_intervals, eh_shuffle, eh_shuffle_with_intervals, slab_domain};
pub use finite::finite_shuffle;
pub use gluing::{
    continuity_certificate, gluing_blocks, gluing_remainder, infinite_to_standard, ntwist, BlockKind, ContinuityReport,
    GluingBlock, GluingEngine, NTwistRecord,
};
pub use shrink::shrink_schedule;
pub use two_cycle::two_cycle_swap;

use crate::domains::NDomain;
use crate::error::{Error, Result};
use crate::geometry::{complement_connected, Cube, Interval};
use crate::rational::{serde_rational, Rational};
use crate::schedule::{CubeSchedule, VerificationReport};

/// One recorded construction step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "lemma", rename_all = "kebab-case")]
pub enum StepKind {
    Constant,
    Shrink {
        label: String,
    },
    EhShuffle {
        phi: Vec<usize>,
        /// Last-axis intervals `[c_k, d_k]`.
        intervals: Vec<Interval>,
    },
    TwoCycle {
        k0: usize,
        corridor: Vec<Cube>,
        #[serde(with = "serde_rational")]
        clearance: Rational,
        /// Non-fixed cubes shrunk out of the corridor.
        bystanders: Vec<usize>,
    },
    Auxiliary {
        k0: usize,
        k1: usize,
        cube: Cube,
    },
    Decomposition {
        elements: usize,
        /// Slabs of the auxiliary cube receiving the free cells.
        slabs: Vec<Cube>,
    },
    InfiniteGluing {
        /// Position of the engine in [`ShufflePlan::gluings`].
        engine: usize,
        /// Stages recorded so far; see [`ShufflePlan::provenance_to`].
        stages: Vec<NTwistRecord>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    #[serde(flatten)]
    pub kind: StepKind,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub reversed: bool,
}

impl From<StepKind> for Step {
    fn from(kind: StepKind) -> Self {
        Step { kind, reversed: false }
    }
}

type Rebuild = Arc<dyn Fn() -> Result<ShufflePlan> + Send + Sync>;

/// A schedule together with the choices that produced it.
#[derive(Clone)]
pub struct ShufflePlan {
    schedule: CubeSchedule,
    provenance: Vec<Step>,
    gluings: Vec<Arc<GluingEngine>>,
    rebuild: Option<Rebuild>,
}

impl fmt::Debug for ShufflePlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ShufflePlan")
            .field("schedule", &self.schedule)
            .field("provenance", &self.provenance)
            .finish()
    }
}

impl ShufflePlan {
    pub fn new(schedule: CubeSchedule, provenance: Vec<Step>) -> Self {
        Self {
            schedule,
            provenance,
            gluings: vec![],
            rebuild: None,
        }
    }

    pub(crate) fn with_gluing(schedule: CubeSchedule, engine: Arc<GluingEngine>) -> Self {
        Self {
            schedule,
            provenance: vec![StepKind::InfiniteGluing { engine: 0, stages: vec![] }.into()],
            gluings: vec![engine],
            rebuild: None,
        }
    }

    pub fn constant(domain: &NDomain, fixed: Vec<usize>) -> Self {
        Self::new(CubeSchedule::constant(domain, fixed), vec![StepKind::Constant.into()])
    }

    pub(crate) fn with_rebuild(mut self, f: impl Fn() -> Result<ShufflePlan> + Send + Sync + 'static) -> Self {
        self.rebuild = Some(Arc::new(f));
        self
    }

    pub fn schedule(&self) -> &CubeSchedule {
        &self.schedule
    }

    pub fn into_schedule(self) -> CubeSchedule {
        self.schedule
    }

    pub fn provenance(&self) -> &[Step] {
        &self.provenance
    }

    pub fn gluings(&self) -> &[Arc<GluingEngine>] {
        &self.gluings
    }

    pub fn verify(&self, bound: usize) -> VerificationReport {
        self.schedule.verify(bound)
    }

    /// Provenance with every infinite gluing expanded to its first `bound` stages.
    pub fn provenance_to(&self, bound: usize) -> Vec<Step> {
        self.provenance
            .iter()
            .map(|s| match &s.kind {
                StepKind::InfiniteGluing { engine, .. } => Step {
                    kind: StepKind::InfiniteGluing {
                        engine: *engine,
                        stages: self.gluings[*engine].records(bound),
                    },
                    reversed: s.reversed,
                },
                _ => s.clone(),
            })
            .collect()
    }

    /// Steps of a given lemma, in order.
    pub fn count(&self, pred: impl Fn(&StepKind) -> bool) -> usize {
        self.provenance.iter().filter(|s| pred(&s.kind)).count()
    }

    /// Time-reversed plan.
    pub fn reverse(&self) -> ShufflePlan {
        ShufflePlan {
            schedule: self.schedule.reverse(),
            provenance: self
                .provenance
                .iter()
                .rev()
                .map(|s| Step {
                    kind: s.kind.clone(),
                    reversed: !s.reversed,
                })
                .collect(),
            gluings: self.gluings.clone(),
            rebuild: None,
        }
    }

    /// Plans run one after another on a uniform time partition.
    pub fn compose(plans: &[ShufflePlan]) -> Result<ShufflePlan> {
        let schedules: Vec<CubeSchedule> = plans.iter().map(|p| p.schedule.clone()).collect();
        let schedule = CubeSchedule::compose(&schedules)?;
        Ok(Self::merge_provenance(schedule, plans))
    }

    pub(crate) fn merge_provenance(schedule: CubeSchedule, plans: &[ShufflePlan]) -> ShufflePlan {
        let mut provenance = Vec::new();
        let mut gluings = Vec::new();
        for p in plans {
            let offset = gluings.len();
            gluings.extend(p.gluings.iter().cloned());
            provenance.extend(p.provenance.iter().map(|s| match &s.kind {
                StepKind::InfiniteGluing { engine, stages } => Step {
                    kind: StepKind::InfiniteGluing {
                        engine: engine + offset,
                        stages: stages.clone(),
                    },
                    reversed: s.reversed,
                },
                _ => s.clone(),
            }));
        }
        ShufflePlan {
            schedule,
            provenance,
            gluings,
            rebuild: None,
        }
    }

    /// Rebuilds the plan from its recorded request and checks that the
    /// provenance and every keyframe of the first `bound` indices agree.
    pub fn replay(&self, bound: usize) -> Result<bool> {
        let rebuild = self
            .rebuild
            .as_ref()
            .ok_or_else(|| Error::Unsupported("plan has no recorded request".into()))?;
        let again = rebuild()?;
        if again.provenance_to(bound) != self.provenance_to(bound) {
            return Ok(false);
        }
        let a = self.schedule.paths_upto(bound);
        let b = again.schedule.paths_upto(bound);
        Ok(a.len() == b.len() && a.iter().zip(&b).all(|((i, p), (j, q))| i == j && p == q))
    }
}

/// Shared argument checks: matching index sets, `F` inside them, and `F`
/// cubes equal in source and target.
pub(crate) fn check_request(r: &NDomain, s: &NDomain, fixed: &[usize]) -> Result<()> {
    if r.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: r.dim(),
            found: s.dim(),
        });
    }
    if r.indices() != s.indices() {
        return Err(Error::IndexMismatch("source and target index sets differ".into()));
    }
    for &k in fixed {
        if !r.indices().contains(k) {
            return Err(Error::UnknownIndex(k));
        }
        if r.cube(k) != s.cube(k) {
            return Err(Error::FixedMoved(k));
        }
    }
    Ok(())
}

pub(crate) fn check_connected(r: &NDomain, fixed: &[usize]) -> Result<()> {
    let obstacles: Vec<Cube> = fixed.iter().map(|&k| r.cube(k)).collect();
    if complement_connected(r.dim(), &obstacles) {
        Ok(())
    } else {
        Err(Error::ComplementDisconnected)
    }
}

/// A homotopy `∏_R f_k ≃ ∏_S f_k` relative to the cubes indexed by `fixed`.
///
/// Finite domains go through [`finite_shuffle`]. Infinite domains are each
/// glued onto the standard domain; with fixed cubes, everything movable is
/// first packed into an auxiliary cube.
pub fn shuffle(r: &NDomain, s: &NDomain, fixed: &[usize]) -> Result<ShufflePlan> {
    check_request(r, s, fixed)?;
    let mut fixed = fixed.to_vec();
    fixed.sort_unstable();
    fixed.dedup();
    let (r2, s2, f2) = (r.clone(), s.clone(), fixed.clone());
    let rebuild = move || shuffle(&r2, &s2, &f2);
    if r.same_as(s) == Some(true) {
        return Ok(ShufflePlan::constant(r, fixed).with_rebuild(rebuild));
    }
    let plan = if r.is_finite() {
        finite_shuffle(r, s, &fixed)?
    } else if fixed.is_empty() {
        let std = crate::domains::standard_domain(r.dim())?;
        match (r.same_as(&std) == Some(true), s.same_as(&std) == Some(true)) {
            (false, true) => infinite_to_standard(r)?,
            (true, false) => infinite_to_standard(s)?.reverse(),
            _ => {
                let a = infinite_to_standard(r)?;
                let b = infinite_to_standard(s)?;
                ShufflePlan::compose(&[a, b.reverse()]).map_err(|e| e.in_lemma("infinite shuffle"))?
            }
        }
    } else {
        restricted::infinite_restricted(r, s, &fixed)?
    };
    Ok(plan.with_rebuild(rebuild))
}
