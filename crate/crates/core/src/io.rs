//! JSON fixture formats: domains, scenarios, plans and reports.

use std::path::Path;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::domains::{adversarial_dense_domain, DomainRule, IndexSet, NDomain};
use crate::error::{Error, Result};
use crate::geometry::Cube;
use crate::loops::{KSequence, LoopFamily, SequenceSpec};
use crate::rational::{one, serde_rational, Rational};
use crate::schedule::{CubePath, CubeSchedule, StageAnnotation};
use crate::shuffle::{shuffle, ShufflePlan, Step};

/// Version of every JSON document written by this crate.
pub const SCHEMA_VERSION: u32 = 1;

/// A domain without its dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "index_set", rename_all = "snake_case")]
pub enum DomainSpec {
    /// Explicit cubes `1..=m`.
    Finite { cubes: Vec<Cube> },
    /// The dyadic quadtree domain (`n = 2`).
    Adversarial { depth: u32 },
    /// A built-in infinite family over ℕ.
    Nat {
        #[serde(flatten)]
        rule: DomainRule,
    },
}

impl DomainSpec {
    pub fn build(&self, n: usize) -> Result<NDomain> {
        match self {
            DomainSpec::Finite { cubes } => {
                if let Some(c) = cubes.iter().find(|c| c.dim() != n) {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: c.dim(),
                    });
                }
                NDomain::finite(n, cubes.clone())
            }
            DomainSpec::Adversarial { depth } => {
                if n != 2 {
                    return Err(Error::DimensionMismatch { expected: 2, found: n });
                }
                adversarial_dense_domain(*depth)
            }
            DomainSpec::Nat { rule } => rule.build(n),
        }
    }

    /// Description of a domain: its cubes when finite, its rule otherwise.
    pub fn describe(domain: &NDomain) -> Result<Self> {
        if domain.is_finite() {
            if domain.indices().upto(0).into_iter().ne(1..=domain.len().unwrap_or(0)) {
                return Err(Error::Unsupported("finite domains in files are indexed 1..=m".into()));
            }
            return Ok(DomainSpec::Finite { cubes: domain.cubes() });
        }
        match domain.rule() {
            Some(rule) => Ok(DomainSpec::Nat { rule: rule.clone() }),
            None => Err(Error::Unsupported("infinite domain without a serializable rule".into())),
        }
    }
}

/// A domain file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainFile {
    pub n: usize,
    #[serde(flatten)]
    pub domain: DomainSpec,
}

impl DomainFile {
    pub fn build(&self) -> Result<NDomain> {
        self.domain.build(self.n)
    }
}

fn default_sequence() -> SequenceSpec {
    SequenceSpec::new(LoopFamily::BumpHarmonic, one(), 1)
}

/// A shuffle request: source, target, fixed indices, and the loops carried.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub n: usize,
    pub source: DomainSpec,
    pub target: DomainSpec,
    #[serde(default)]
    pub fixed: Vec<usize>,
    #[serde(default = "default_sequence")]
    pub sequence: SequenceSpec,
}

impl Scenario {
    pub fn source(&self) -> Result<NDomain> {
        self.source.build(self.n)
    }

    pub fn target(&self) -> Result<NDomain> {
        self.target.build(self.n)
    }

    pub fn plan(&self) -> Result<ShufflePlan> {
        shuffle(&self.source()?, &self.target()?, &self.fixed)
    }

    pub fn sequence(&self, indices: &IndexSet) -> Result<KSequence> {
        self.sequence.build(self.n, indices)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Keyframe {
    #[serde(with = "serde_rational")]
    pub t: Rational,
    pub cube: Cube,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathEntry {
    pub index: usize,
    pub keyframes: Vec<Keyframe>,
}

impl PathEntry {
    fn path(&self) -> Result<CubePath> {
        CubePath::new(self.keyframes.iter().map(|k| (k.t.clone(), k.cube.clone())).collect())
    }
}

/// A plan file: keyframes of every index (finite) or of the first
/// `materialized_bound` indices, plus provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanFile {
    pub schema_version: u32,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub materialized_bound: Option<usize>,
    pub source: DomainSpec,
    pub target: DomainSpec,
    pub fixed: Vec<usize>,
    pub stages: Vec<StageAnnotation>,
    pub paths: Vec<PathEntry>,
    pub provenance: Vec<Step>,
}

impl PlanFile {
    /// Serializable form of `plan`; infinite plans keep indices `<= bound`.
    pub fn from_plan(plan: &ShufflePlan, bound: usize) -> Result<Self> {
        let s = plan.schedule();
        let finite = s.is_finite();
        let paths = s
            .paths_upto(bound)
            .into_iter()
            .map(|(index, p)| PathEntry {
                index,
                keyframes: p
                    .keyframes()
                    .iter()
                    .map(|(t, cube)| Keyframe {
                        t: t.clone(),
                        cube: cube.clone(),
                    })
                    .collect(),
            })
            .collect();
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            n: s.dim(),
            materialized_bound: (!finite).then_some(bound),
            source: DomainSpec::describe(s.source())?,
            target: DomainSpec::describe(s.target())?,
            fixed: s.fixed().to_vec(),
            stages: s.stages().to_vec(),
            paths,
            provenance: plan.provenance_to(if finite { 0 } else { bound }),
        })
    }

    /// The stored schedule. For an infinite plan, indices beyond the
    /// materialized bound are rebuilt from the recorded request on demand.
    pub fn schedule(&self) -> Result<CubeSchedule> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!("unsupported schema version {}", self.schema_version)));
        }
        let source = self.source.build(self.n)?;
        let target = self.target.build(self.n)?;
        let paths = self.paths.iter().map(PathEntry::path).collect::<Result<Vec<_>>>()?;
        let schedule = match self.materialized_bound {
            None => {
                let idx = source.indices().upto(0);
                if self.paths.iter().map(|p| p.index).ne(idx.iter().copied()) {
                    return Err(Error::Parse("plan paths do not match the source indices".into()));
                }
                CubeSchedule::from_paths(source, target, self.fixed.clone(), paths, "")?
            }
            Some(bound) => {
                if self.paths.iter().map(|p| p.index).ne(1..=bound) {
                    return Err(Error::Parse("plan paths must cover 1..=materialized_bound".into()));
                }
                let table = Arc::new(paths);
                let rebuilt: Arc<OnceLock<ShufflePlan>> = Arc::default();
                let (s2, t2, f2) = (source.clone(), target.clone(), self.fixed.clone());
                CubeSchedule::lazy(
                    source,
                    target,
                    self.fixed.clone(),
                    Arc::new(move |k| {
                        if k <= table.len() {
                            return table[k - 1].clone();
                        }
                        let plan = rebuilt.get_or_init(|| shuffle(&s2, &t2, &f2).unwrap_or_else(|e| panic!("{e}")));
                        plan.schedule().path(k).unwrap_or_else(|e| panic!("{e}")).as_ref().clone()
                    }),
                    "",
                )
            }
        };
        Ok(schedule.with_stages(self.stages.clone()))
    }
}

/// Any JSON document with a schema version attached.
#[derive(Debug, Clone, Serialize)]
pub struct Report<T: Serialize> {
    pub schema_version: u32,
    pub command: String,
    #[serde(flatten)]
    pub body: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(command: &str, body: T) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            body,
        }
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{standard_domain, standard_interval};
    use crate::geometry::Interval;

    #[test]
    fn domain_file_forms() {
        let f: DomainFile = serde_json::from_str(r#"{"n": 2, "index_set": "nat", "rule": "standard"}"#).unwrap();
        assert_eq!(f.build().unwrap().cube(3), Cube::slab(2, standard_interval(3)));
        let f: DomainFile =
            serde_json::from_str(r#"{"n": 2, "index_set": "finite", "cubes": [[["0","1/2"],["0","1"]]]}"#).unwrap();
        assert_eq!(f.build().unwrap().len(), Some(1));
        let back: DomainFile = serde_json::from_str(&to_json(&f)).unwrap();
        assert_eq!(back, f);
        let f: DomainFile = serde_json::from_str(r#"{"n": 2, "index_set": "adversarial", "depth": 3}"#).unwrap();
        assert_eq!(f.build().unwrap().len(), Some(22));
        let nested = r#"{"n": 2, "index_set": "nat", "rule": "permuted", "params": {"base": {"rule": "standard"}, "perm": [2, 1]}}"#;
        let f: DomainFile = serde_json::from_str(nested).unwrap();
        assert_eq!(f.build().unwrap().cube(1), Cube::slab(2, standard_interval(2)));
        assert_eq!(serde_json::from_str::<DomainFile>(&to_json(&f)).unwrap(), f);
    }

    #[test]
    fn plan_round_trip() {
        let q = |a, b| Cube::slab(2, Interval::of(a, 3, b, 3));
        let sc = Scenario {
            n: 2,
            source: DomainSpec::Finite { cubes: vec![q(0, 1), q(1, 2), q(2, 3)] },
            target: DomainSpec::Finite { cubes: vec![q(2, 3), q(0, 1), q(1, 2)] },
            fixed: vec![],
            sequence: default_sequence(),
        };
        let plan = sc.plan().unwrap();
        let file = PlanFile::from_plan(&plan, 64).unwrap();
        let text = to_json(&file);
        let back: PlanFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, file);
        let s = back.schedule().unwrap();
        assert_eq!(s.verify(0), plan.verify(0));
    }

    #[test]
    fn infinite_plan_round_trip() {
        let std = standard_domain(2).unwrap();
        let target = crate::domains::permuted(&std, &[2, 1]).unwrap();
        let plan = shuffle(&std, &target, &[]).unwrap();
        let file = PlanFile::from_plan(&plan, 6).unwrap();
        assert_eq!(file.materialized_bound, Some(6));
        let back: PlanFile = serde_json::from_str(&to_json(&file)).unwrap();
        let s = back.schedule().unwrap();
        assert_eq!(s.verify(6), plan.verify(6));
        assert_eq!(s.path(8).unwrap(), plan.schedule().path(8).unwrap());
    }
}
