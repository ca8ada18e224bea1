//! n-loops into `ℝ^d` based at the origin, K-sequences, and concatenation.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domains::{IndexSet, NDomain};
use crate::error::{Error, Result};
use crate::geometry::{normalize_point, Cube};
use crate::rational::{dyadic, half, one, rat, serde_rational, to_f64, zero, Rational};

/// Default tolerance when comparing float-valued loops.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Exact(Vec<Rational>),
    Float(Vec<f64>),
}

impl Value {
    pub fn basepoint(d: usize) -> Self {
        Value::Exact(vec![zero(); d])
    }

    pub fn dim(&self) -> usize {
        match self {
            Value::Exact(v) => v.len(),
            Value::Float(v) => v.len(),
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            Value::Exact(v) => v.iter().map(to_f64).collect(),
            Value::Float(v) => v.clone(),
        }
    }

    pub fn is_basepoint(&self) -> bool {
        match self {
            Value::Exact(v) => v.iter().all(|x| x == &zero()),
            Value::Float(v) => v.iter().all(|x| *x == 0.0),
        }
    }

    /// Exact equality when both sides are exact, otherwise within `tol`.
    pub fn matches(&self, other: &Value, tol: f64) -> bool {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => a == b,
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= tol)
            }
        }
    }

    /// Euclidean norm as a float.
    pub fn norm(&self) -> f64 {
        self.to_f64().iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

impl Serialize for Value {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Exact(v) => s.collect_seq(v.iter().map(crate::rational::format)),
            Value::Float(v) => s.collect_seq(v.iter()),
        }
    }
}

pub type Evaluator = Arc<dyn Fn(&[Rational]) -> Value + Send + Sync>;

/// A map `I^n → ℝ^d` sending `∂I^n` to the origin.
#[derive(Clone)]
pub struct NLoop {
    dim: usize,
    target_dim: usize,
    eval: Evaluator,
    image_bound: Rational,
    exact: bool,
    boundary_compliant: bool,
}

impl fmt::Debug for NLoop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NLoop")
            .field("dim", &self.dim)
            .field("target_dim", &self.target_dim)
            .field("image_bound", &self.image_bound)
            .field("exact", &self.exact)
            .finish()
    }
}

impl NLoop {
    /// Wraps an evaluator. `image_bound` must dominate `|f(s)|` on `I^n`.
    pub fn new(dim: usize, target_dim: usize, image_bound: Rational, exact: bool, eval: Evaluator) -> Self {
        Self {
            dim,
            target_dim,
            eval,
            image_bound,
            exact,
            boundary_compliant: true,
        }
    }

    /// The constant loop at the basepoint.
    pub fn constant(dim: usize, target_dim: usize) -> Self {
        Self::new(dim, target_dim, zero(), true, Arc::new(move |_| Value::basepoint(target_dim)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn image_bound(&self) -> &Rational {
        &self.image_bound
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn boundary_compliant(&self) -> bool {
        self.boundary_compliant
    }

    pub fn eval(&self, s: &[Rational]) -> Value {
        (self.eval)(s)
    }

    /// Points of `∂I^n` on the lattice `{0, 1/r, …, 1}^n`.
    pub fn boundary_samples(n: usize, r: i64) -> Vec<Vec<Rational>> {
        lattice(n, r)
            .into_iter()
            .filter(|p| p.iter().any(|x| x == &zero() || x == &one()))
            .collect()
    }

    /// Checks the basepoint condition on boundary lattice points.
    pub fn check_boundary(&self, r: i64) -> bool {
        Self::boundary_samples(self.dim, r)
            .iter()
            .all(|p| self.eval(p).is_basepoint())
    }
}

/// All points of `{0, 1/r, …, 1}^n`, first axis most significant.
pub fn lattice(n: usize, r: i64) -> Vec<Vec<Rational>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=r).map(move |i| {
                    let mut q = p.clone();
                    q.push(rat(i, r));
                    q
                })
            })
            .collect();
    }
    out
}

pub fn tent(u: &Rational) -> Rational {
    if u <= &half() {
        u * rat(2, 1)
    } else {
        (one() - u) * rat(2, 1)
    }
}

fn unit_vector(d: usize, coordinate: usize, x: Rational) -> Vec<Rational> {
    let mut v = vec![zero(); d];
    v[coordinate - 1] = x;
    v
}

fn check_loop_args(amplitude: &Rational, coordinate: usize, d: usize) -> Result<()> {
    if amplitude <= &zero() {
        return Err(Error::NonpositiveAmplitude);
    }
    if coordinate == 0 || coordinate > d {
        return Err(Error::InvalidArgument(format!("coordinate {coordinate} outside 1..={d}")));
    }
    Ok(())
}

/// `s ↦ amplitude · ∏ tent(s_i)` in the given target coordinate.
pub fn bump_loop(n: usize, d: usize, amplitude: Rational, coordinate: usize) -> Result<NLoop> {
    check_loop_args(&amplitude, coordinate, d)?;
    let a = amplitude.clone();
    Ok(NLoop::new(
        n,
        d,
        amplitude,
        true,
        Arc::new(move |s| {
            let v = s.iter().fold(a.clone(), |acc, x| acc * tent(x));
            Value::Exact(unit_vector(d, coordinate, v))
        }),
    ))
}

/// `s ↦ amplitude · s_1 · ∏ tent(s_i)`; unlike the bump it is not symmetric.
pub fn skew_loop(n: usize, d: usize, amplitude: Rational, coordinate: usize) -> Result<NLoop> {
    check_loop_args(&amplitude, coordinate, d)?;
    let a = amplitude.clone();
    Ok(NLoop::new(
        n,
        d,
        amplitude,
        true,
        Arc::new(move |s| {
            let v = s.iter().fold(&a * &s[0], |acc, x| acc * tent(x));
            Value::Exact(unit_vector(d, coordinate, v))
        }),
    ))
}

/// `s ↦ amplitude · ∏ sin(π s_i)`, evaluated in floating point.
pub fn sine_loop(n: usize, d: usize, amplitude: Rational, coordinate: usize) -> Result<NLoop> {
    check_loop_args(&amplitude, coordinate, d)?;
    let a = to_f64(&amplitude);
    Ok(NLoop::new(
        n,
        d,
        amplitude,
        false,
        Arc::new(move |s| {
            let v = s.iter().fold(a, |acc, x| {
                // exact zeros on the boundary
                if x == &zero() || x == &one() {
                    0.0
                } else {
                    acc * (std::f64::consts::PI * to_f64(x)).sin()
                }
            });
            let mut out = vec![0.0; d];
            out[coordinate - 1] = v;
            Value::Float(out)
        }),
    ))
}

pub type LoopRule = Arc<dyn Fn(usize) -> NLoop + Send + Sync>;
pub type BoundRule = Arc<dyn Fn(usize) -> Rational + Send + Sync>;

#[derive(Clone)]
enum Loops {
    Table(Arc<Vec<NLoop>>),
    Rule(LoopRule),
}

/// Loops indexed by a finite set or by `{s, s+1, …}`.
///
/// An infinite sequence is null when it carries a nonincreasing dominating
/// bound sequence tending to 0.
#[derive(Clone)]
pub struct KSequence {
    dim: usize,
    target_dim: usize,
    indices: IndexSet,
    loops: Loops,
    dominating: Option<BoundRule>,
}

impl fmt::Debug for KSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KSequence")
            .field("dim", &self.dim)
            .field("target_dim", &self.target_dim)
            .field("indices", &self.indices)
            .field("null", &self.dominating.is_some())
            .finish()
    }
}

impl KSequence {
    /// Loops `f_1, …, f_m`.
    pub fn finite(loops: Vec<NLoop>) -> Result<Self> {
        let m = loops.len();
        Self::finite_indexed((1..=m).zip(loops).collect())
    }

    pub fn finite_indexed(entries: Vec<(usize, NLoop)>) -> Result<Self> {
        let (dim, target_dim) = entries
            .first()
            .map(|(_, l)| (l.dim, l.target_dim))
            .ok_or_else(|| Error::InvalidArgument("empty sequence".into()))?;
        for w in entries.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::InvalidArgument("indices must be strictly increasing".into()));
            }
        }
        for (_, l) in &entries {
            if l.dim != dim || l.target_dim != target_dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: l.dim,
                });
            }
        }
        let (idx, loops): (Vec<usize>, Vec<NLoop>) = entries.into_iter().unzip();
        let table = Arc::new(loops);
        let t = table.clone();
        let ix = idx.clone();
        Ok(Self {
            dim,
            target_dim,
            indices: IndexSet::Finite(idx),
            loops: Loops::Table(table),
            dominating: Some(Arc::new(move |k| {
                // max bound over indices >= k
                let p = ix.partition_point(|&i| i < k);
                t[p..].iter().map(|l| l.image_bound.clone()).max().unwrap_or_else(zero)
            })),
        })
    }

    /// A null sequence over ℕ. `dominating` must be nonincreasing, tend to 0,
    /// and bound each loop's image.
    pub fn null(dim: usize, target_dim: usize, loops: LoopRule, dominating: BoundRule) -> Self {
        Self {
            dim,
            target_dim,
            indices: IndexSet::naturals(),
            loops: Loops::Rule(loops),
            dominating: Some(dominating),
        }
    }

    /// A sequence over ℕ with no null certificate.
    pub fn uncertified(dim: usize, target_dim: usize, loops: LoopRule) -> Self {
        Self {
            dim,
            target_dim,
            indices: IndexSet::naturals(),
            loops: Loops::Rule(loops),
            dominating: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn indices(&self) -> &IndexSet {
        &self.indices
    }

    pub fn is_null(&self) -> bool {
        self.dominating.is_some()
    }

    pub fn get(&self, k: usize) -> Result<NLoop> {
        match (&self.loops, &self.indices) {
            (Loops::Table(t), IndexSet::Finite(idx)) => idx
                .binary_search(&k)
                .map(|p| t[p].clone())
                .map_err(|_| Error::UnknownIndex(k)),
            (Loops::Rule(r), ix) if ix.contains(k) => Ok(r(k)),
            _ => Err(Error::UnknownIndex(k)),
        }
    }

    pub fn loop_at(&self, k: usize) -> NLoop {
        self.get(k).unwrap_or_else(|e| panic!("{e}"))
    }

    /// Image bound of `f_k`.
    pub fn bound(&self, k: usize) -> Rational {
        self.loop_at(k).image_bound
    }

    /// A bound on `|f_j|` for every `j >= k`, when certified.
    pub fn tail_bound(&self, k: usize) -> Option<Rational> {
        self.dominating.as_ref().map(|d| d(k))
    }

    /// Supremum of all image bounds, when certified.
    pub fn sup_bound(&self) -> Option<Rational> {
        self.indices.first().and_then(|k| self.tail_bound(k))
    }

    /// `k ↦ f_{offset + k}` on `1..=len` (or ℕ when `len` is `None`).
    pub fn shifted(&self, offset: usize, len: Option<usize>) -> Result<KSequence> {
        match len {
            Some(m) => KSequence::finite(
                (1..=m)
                    .map(|k| self.get(offset + k))
                    .collect::<Result<Vec<_>>>()?,
            ),
            None => {
                if self.indices.is_finite() {
                    return Err(Error::IndexMismatch("cannot take an infinite tail of a finite sequence".into()));
                }
                let this = self.clone();
                let loops: LoopRule = Arc::new(move |k| this.loop_at(offset + k));
                let d = self.dominating.clone().map(|d| -> BoundRule { Arc::new(move |k| d(offset + k)) });
                Ok(KSequence {
                    dim: self.dim,
                    target_dim: self.target_dim,
                    indices: IndexSet::naturals(),
                    loops: Loops::Rule(loops),
                    dominating: d,
                })
            }
        }
    }

    /// `f_1, g_1, f_2, g_2, …` for two null sequences over ℕ.
    pub fn interleave(f: &KSequence, g: &KSequence) -> Result<KSequence> {
        if f.indices != IndexSet::naturals() || g.indices != IndexSet::naturals() {
            return Err(Error::IndexMismatch("interleaving needs sequences over ℕ".into()));
        }
        let (df, dg) = match (&f.dominating, &g.dominating) {
            (Some(a), Some(b)) => (a.clone(), b.clone()),
            _ => return Err(Error::NotNull("interleaving needs certified sequences".into())),
        };
        let (f2, g2) = (f.clone(), g.clone());
        Ok(KSequence::null(
            f.dim,
            f.target_dim,
            Arc::new(move |i| {
                if i % 2 == 1 {
                    f2.loop_at(i.div_ceil(2))
                } else {
                    g2.loop_at(i / 2)
                }
            }),
            Arc::new(move |i| {
                // first f index and first g index at position >= i
                let (a, b) = if i % 2 == 1 { (i.div_ceil(2), i.div_ceil(2)) } else { (i / 2 + 1, i / 2) };
                df(a).max(dg(b))
            }),
        ))
    }

    /// `k ↦ f_{φ(k)}` for `φ` given as a prefix permutation.
    pub fn permuted(&self, perm: &[usize]) -> Result<KSequence> {
        let phi = Arc::new(perm.to_vec());
        let apply = move |k: usize| if k <= phi.len() { phi[k - 1] } else { k };
        match &self.indices {
            IndexSet::Finite(_) => KSequence::finite_indexed(
                self.indices
                    .upto(0)
                    .into_iter()
                    .map(|k| Ok((k, self.get(apply(k))?)))
                    .collect::<Result<Vec<_>>>()?,
            ),
            IndexSet::From(_) => {
                let this = self.clone();
                let m = perm.len();
                let dom = self.dominating.clone();
                // beyond the prefix the tail is unchanged; inside it take the global sup
                let sup = self.sup_bound();
                Ok(KSequence {
                    dim: self.dim,
                    target_dim: self.target_dim,
                    indices: self.indices.clone(),
                    loops: Loops::Rule(Arc::new(move |k| this.loop_at(apply(k)))),
                    dominating: dom.map(|d| -> BoundRule {
                        let sup = sup.clone().unwrap_or_else(zero);
                        Arc::new(move |k| if k <= m { sup.clone() } else { d(k) })
                    }),
                })
            }
        }
    }
}

/// Smallest `M` with `bound(k) < ε` for every `k >= M`.
pub fn null_certificate(sequence: &KSequence, epsilon: &Rational) -> Result<usize> {
    if epsilon <= &zero() {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    if let IndexSet::Finite(idx) = &sequence.indices {
        return Ok(idx.last().map_or(1, |k| k + 1));
    }
    let dom = sequence
        .dominating
        .as_ref()
        .ok_or_else(|| Error::NotNull("no dominating sequence".into()))?;
    let start = sequence.indices.first().unwrap_or(1);
    if &dom(start) < epsilon {
        return Ok(start);
    }
    // dom(lo) >= ε > dom(hi)
    let mut lo = start;
    let mut step = 1usize;
    let mut hi = loop {
        let probe = lo.checked_add(step).ok_or_else(|| Error::NotNull("bounds do not reach epsilon".into()))?;
        if &dom(probe) < epsilon {
            break probe;
        }
        lo = probe;
        step = step.checked_mul(2).ok_or_else(|| Error::NotNull("bounds do not reach epsilon".into()))?;
    };
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if &dom(mid) < epsilon {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Built-in loop families for fixture files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoopFamily {
    /// `f_k = bump(a/k)`.
    BumpHarmonic,
    /// `f_k = bump(a·2^{-k})`.
    BumpGeometric,
    /// `f_k = bump(a)`; not null over ℕ.
    BumpConstant,
    /// `f_k = skew(a/k)`.
    SkewHarmonic,
    /// `f_k = sine(a/k)`, float-valued.
    SineHarmonic,
}

/// A reference to a built-in family. Loop `k` writes into target coordinate
/// `((k - 1) mod d) + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceSpec {
    pub family: LoopFamily,
    #[serde(with = "serde_rational", default = "one")]
    pub amplitude: Rational,
    #[serde(default = "default_target_dim")]
    pub target_dim: usize,
}

fn default_target_dim() -> usize {
    1
}

impl SequenceSpec {
    pub fn new(family: LoopFamily, amplitude: Rational, target_dim: usize) -> Self {
        Self {
            family,
            amplitude,
            target_dim,
        }
    }

    fn amplitude_at(&self, k: usize) -> Rational {
        match self.family {
            LoopFamily::BumpGeometric => &self.amplitude * dyadic(k as u32),
            LoopFamily::BumpConstant => self.amplitude.clone(),
            _ => &self.amplitude / Rational::from_integer(k.into()),
        }
    }

    pub fn loop_at(&self, n: usize, k: usize) -> NLoop {
        let d = self.target_dim;
        let a = self.amplitude_at(k);
        let c = (k - 1) % d + 1;
        match self.family {
            LoopFamily::SkewHarmonic => skew_loop(n, d, a, c),
            LoopFamily::SineHarmonic => sine_loop(n, d, a, c),
            _ => bump_loop(n, d, a, c),
        }
        .expect("family parameters are valid")
    }

    /// The family over `indices`.
    pub fn build(&self, n: usize, indices: &IndexSet) -> Result<KSequence> {
        check_loop_args(&self.amplitude, 1, self.target_dim)?;
        match indices {
            IndexSet::Finite(idx) => KSequence::finite_indexed(idx.iter().map(|&k| (k, self.loop_at(n, k))).collect()),
            IndexSet::From(s) => {
                let spec = self.clone();
                let s = *s;
                let loops: LoopRule = Arc::new(move |k| spec.loop_at(n, k));
                let mut seq = if self.family == LoopFamily::BumpConstant {
                    KSequence::uncertified(n, self.target_dim, loops)
                } else {
                    let spec = self.clone();
                    KSequence::null(n, self.target_dim, loops, Arc::new(move |k| spec.amplitude_at(k.max(1))))
                };
                seq.indices = IndexSet::From(s);
                Ok(seq)
            }
        }
    }
}

/// `f ∘ L_{cube, I^n}` at `s ∈ cube`.
pub fn value_in(f: &NLoop, cube: &Cube, s: &[Rational]) -> Value {
    f.eval(&normalize_point(cube, s))
}

/// A value together with the index that produced it and an error bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub value: Value,
    /// Lowest index whose cube contains the point.
    pub index: Option<usize>,
    /// Zero for exact evaluations; otherwise a bound on the omitted tail.
    #[serde(with = "serde_rational")]
    pub error_bound: Rational,
}

/// The 𝓡-concatenation `∏_𝓡 f_k`.
#[derive(Clone, Debug)]
pub struct ConcatenatedLoop {
    domain: NDomain,
    sequence: KSequence,
    truncation: usize,
}

/// Truncation used for infinite domains without a locator.
pub const DEFAULT_TRUNCATION: usize = 64;

pub fn concatenate(domain: &NDomain, sequence: &KSequence) -> Result<ConcatenatedLoop> {
    if domain.dim() != sequence.dim() {
        return Err(Error::DimensionMismatch {
            expected: domain.dim(),
            found: sequence.dim(),
        });
    }
    if domain.indices() != sequence.indices() {
        return Err(Error::IndexMismatch(format!(
            "domain {:?} vs sequence {:?}",
            domain.indices(),
            sequence.indices()
        )));
    }
    if !domain.is_finite() && !sequence.is_null() {
        return Err(Error::NotNull("infinite concatenation needs a null sequence".into()));
    }
    Ok(ConcatenatedLoop {
        domain: domain.clone(),
        sequence: sequence.clone(),
        truncation: DEFAULT_TRUNCATION,
    })
}

impl ConcatenatedLoop {
    pub fn with_truncation(mut self, m: usize) -> Self {
        self.truncation = m;
        self
    }

    pub fn domain(&self) -> &NDomain {
        &self.domain
    }

    pub fn sequence(&self) -> &KSequence {
        &self.sequence
    }

    pub fn eval(&self, s: &[Rational]) -> Evaluation {
        locate_and_eval(&self.sequence, s, self.truncation, |p| self.domain.locate(p), |k| self.domain.cube(k))
    }

    pub fn value(&self, s: &[Rational]) -> Value {
        self.eval(s).value
    }

    /// The concatenation as a loop in its own right.
    pub fn into_loop(self) -> NLoop {
        let exact = self.domain.has_locator();
        let bound = self.sequence.sup_bound().unwrap_or_else(zero);
        let (n, d) = (self.sequence.dim(), self.sequence.target_dim());
        NLoop::new(n, d, bound, exact, Arc::new(move |s| self.value(s)))
    }
}

/// Shared lookup: the lowest index whose cube contains `s`, through a
/// locator when available, else by scanning indices up to `truncation`.
pub(crate) fn locate_and_eval(
    seq: &KSequence,
    s: &[Rational],
    truncation: usize,
    locate: impl Fn(&[Rational]) -> Option<Vec<usize>>,
    cube: impl Fn(usize) -> Cube,
) -> Evaluation {
    let d = seq.target_dim();
    let (hit, error_bound) = match locate(s) {
        Some(hits) => (hits.first().copied(), zero()),
        None => {
            let hit = seq
                .indices()
                .upto(truncation)
                .into_iter()
                .find(|&k| cube(k).contains_point(s));
            let err = if hit.is_some() {
                zero()
            } else {
                seq.tail_bound(truncation + 1).unwrap_or_else(zero)
            };
            (hit, err)
        }
    };
    match hit {
        Some(k) => Evaluation {
            value: value_in(&seq.loop_at(k), &cube(k), s),
            index: Some(k),
            error_bound,
        },
        None => Evaluation {
            value: Value::basepoint(d),
            index: None,
            error_bound,
        },
    }
}
