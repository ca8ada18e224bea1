//! n-domains: indexed families of cubes with pairwise-disjoint interiors.
//!
//! A finite domain is a table. An infinite domain is indexed by `{s, s+1, …}`
//! and backed by a pure rule `index -> cube`; it may also carry a point
//! locator so that concatenations over it evaluate exactly.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{embed_cube, normalize_point, subdivide, Cube, Interval, Subdivision};
use crate::rational::{half, one, rat, zero, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum IndexSet {
    /// Explicit, strictly increasing indices.
    Finite(Vec<usize>),
    /// `{start, start + 1, …}`.
    From(usize),
}

impl IndexSet {
    pub fn naturals() -> Self {
        IndexSet::From(1)
    }

    pub fn range(m: usize) -> Self {
        IndexSet::Finite((1..=m).collect())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, IndexSet::Finite(_))
    }

    pub fn contains(&self, k: usize) -> bool {
        match self {
            IndexSet::Finite(v) => v.binary_search(&k).is_ok(),
            IndexSet::From(s) => k >= *s,
        }
    }

    pub fn len(&self) -> Option<usize> {
        match self {
            IndexSet::Finite(v) => Some(v.len()),
            IndexSet::From(_) => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, IndexSet::Finite(v) if v.is_empty())
    }

    pub fn first(&self) -> Option<usize> {
        match self {
            IndexSet::Finite(v) => v.first().copied(),
            IndexSet::From(s) => Some(*s),
        }
    }

    /// Every index of a finite set, or the indices `<= bound` of an infinite one.
    pub fn upto(&self, bound: usize) -> Vec<usize> {
        match self {
            IndexSet::Finite(v) => v.clone(),
            IndexSet::From(s) => (*s..=bound).collect(),
        }
    }

    /// The `i`-th index (0-based).
    pub fn nth(&self, i: usize) -> Option<usize> {
        match self {
            IndexSet::Finite(v) => v.get(i).copied(),
            IndexSet::From(s) => Some(s + i),
        }
    }
}

pub type CubeRule = Arc<dyn Fn(usize) -> Cube + Send + Sync>;
/// Candidate indices whose cube may contain a point. Callers re-check
/// containment; a locator must never omit a containing index.
pub type Locator = Arc<dyn Fn(&[Rational]) -> Vec<usize> + Send + Sync>;

/// How disjointness of an infinite domain is known.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    SlabTiling,
    /// Follows from the construction (sub-domain, affine image, …).
    Construction(String),
    CheckedToBound(usize),
}

/// Serializable description of a rule-backed infinite domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", content = "params", rename_all = "snake_case")]
pub enum DomainRule {
    /// `[(k-1)/k, k/(k+1)] × I^{n-1}`.
    Standard,
    /// Each standard slab split at its midpoint: `A_{1,1}, A_{1,2}, A_{2,1}, …`.
    Interleaved,
    /// Standard slabs squeezed into the left and right halves, alternating.
    BlockPair,
    /// `k ↦ base(φ(k))` for `φ` given as a prefix, identity beyond it.
    Permuted { base: Box<DomainRule>, perm: Vec<usize> },
    /// Finitely many explicit cubes, then `tail` squeezed into `block`.
    HeadTail {
        head: Vec<Cube>,
        block: Cube,
        tail: Box<DomainRule>,
    },
}

impl DomainRule {
    pub fn build(&self, n: usize) -> Result<NDomain> {
        if n < 2 {
            return Err(Error::DimensionTooSmall(n));
        }
        Ok(match self {
            DomainRule::Standard => standard_domain(n)?,
            DomainRule::Interleaved => interleaved_pair_domain(n)?,
            DomainRule::BlockPair => block_pair_domain(n)?,
            DomainRule::Permuted { base, perm } => permuted(&base.build(n)?, perm)?,
            DomainRule::HeadTail { head, block, tail } => head_tail(head.clone(), block.clone(), &tail.build(n)?)?,
        })
    }
}

#[derive(Clone)]
enum Store {
    Table(Arc<Vec<Cube>>),
    Rule(CubeRule),
}

/// An ordered family of n-cubes, finite or indexed by a tail of ℕ.
#[derive(Clone)]
pub struct NDomain {
    dim: usize,
    indices: IndexSet,
    store: Store,
    locator: Option<Locator>,
    certificate: Option<Certificate>,
    rule: Option<DomainRule>,
}

impl fmt::Debug for NDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("NDomain");
        d.field("dim", &self.dim).field("indices", &self.indices);
        if let Store::Table(t) = &self.store {
            d.field("cubes", t);
        }
        d.field("rule", &self.rule).finish()
    }
}

impl NDomain {
    /// Finite domain over `1..=m`.
    pub fn finite(n: usize, cubes: Vec<Cube>) -> Result<Self> {
        let m = cubes.len();
        Self::finite_indexed(n, (1..=m).zip(cubes).collect())
    }

    /// Finite domain over explicit, strictly increasing indices.
    pub fn finite_indexed(n: usize, entries: Vec<(usize, Cube)>) -> Result<Self> {
        if n < 2 {
            return Err(Error::DimensionTooSmall(n));
        }
        for w in entries.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::InvalidArgument("indices must be strictly increasing".into()));
            }
        }
        for (_, c) in &entries {
            if c.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: c.dim(),
                });
            }
        }
        let (idx, cubes): (Vec<usize>, Vec<Cube>) = entries.into_iter().unzip();
        Ok(Self {
            dim: n,
            indices: IndexSet::Finite(idx),
            store: Store::Table(Arc::new(cubes)),
            locator: None,
            certificate: None,
            rule: None,
        })
    }

    /// Rule-backed domain. The rule must be pure and total on `indices`.
    pub fn from_rule(n: usize, indices: IndexSet, rule: CubeRule) -> Self {
        Self {
            dim: n,
            indices,
            store: Store::Rule(rule),
            locator: None,
            certificate: None,
            rule: None,
        }
    }

    pub fn with_locator(mut self, locator: Locator) -> Self {
        self.locator = Some(locator);
        self
    }

    pub fn with_certificate(mut self, c: Certificate) -> Self {
        self.certificate = Some(c);
        self
    }

    pub fn with_rule(mut self, rule: DomainRule) -> Self {
        self.rule = Some(rule);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn indices(&self) -> &IndexSet {
        &self.indices
    }

    pub fn is_finite(&self) -> bool {
        self.indices.is_finite()
    }

    pub fn len(&self) -> Option<usize> {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        self.certificate.as_ref()
    }

    pub fn rule(&self) -> Option<&DomainRule> {
        self.rule.as_ref()
    }

    pub fn has_locator(&self) -> bool {
        self.locator.is_some() || self.is_finite()
    }

    pub fn get(&self, k: usize) -> Result<Cube> {
        match (&self.store, &self.indices) {
            (Store::Table(t), IndexSet::Finite(idx)) => idx
                .binary_search(&k)
                .map(|p| t[p].clone())
                .map_err(|_| Error::UnknownIndex(k)),
            (Store::Rule(r), ix) => {
                if ix.contains(k) {
                    Ok(r(k))
                } else {
                    Err(Error::UnknownIndex(k))
                }
            }
            (Store::Table(_), IndexSet::From(_)) => unreachable!("tables are finite"),
        }
    }

    /// Cube at index `k`; panics on an unknown index.
    pub fn cube(&self, k: usize) -> Cube {
        self.get(k).unwrap_or_else(|e| panic!("{e}"))
    }

    /// `(index, cube)` pairs: all of them when finite, those `<= bound` otherwise.
    pub fn entries(&self, bound: usize) -> Vec<(usize, Cube)> {
        self.indices
            .upto(bound)
            .into_iter()
            .map(|k| (k, self.cube(k)))
            .collect()
    }

    /// Cubes of a finite domain in index order.
    pub fn cubes(&self) -> Vec<Cube> {
        match &self.store {
            Store::Table(t) => t.as_ref().clone(),
            Store::Rule(_) => self.entries(0).into_iter().map(|(_, c)| c).collect(),
        }
    }

    /// Indices whose cube contains `p` (closed cubes), lowest first. `None`
    /// when the domain is infinite and has no locator.
    pub fn locate(&self, p: &[Rational]) -> Option<Vec<usize>> {
        let mut hits: Vec<usize> = if let Some(loc) = &self.locator {
            loc(p)
                .into_iter()
                .filter(|&k| self.indices.contains(k) && self.cube(k).contains_point(p))
                .collect()
        } else if let IndexSet::Finite(idx) = &self.indices {
            idx.iter()
                .copied()
                .filter(|&k| self.cube(k).contains_point(p))
                .collect()
        } else {
            return None;
        };
        hits.sort_unstable();
        hits.dedup();
        Some(hits)
    }

    /// First `bound` indices as a finite table (all of a finite domain).
    pub fn truncate(&self, bound: usize) -> NDomain {
        let entries = self.entries(bound);
        let mut d = NDomain::finite_indexed(self.dim, entries).expect("entries are valid");
        d.certificate = self.certificate.clone();
        d
    }

    /// Applies `f` to every cube lazily. The locator is dropped.
    pub fn map_cubes(&self, f: impl Fn(usize, Cube) -> Cube + Send + Sync + 'static) -> NDomain {
        let this = self.clone();
        match &self.store {
            Store::Table(t) => {
                let IndexSet::Finite(idx) = &self.indices else { unreachable!() };
                let cubes = idx.iter().zip(t.iter()).map(|(&k, c)| f(k, c.clone())).collect();
                NDomain {
                    dim: self.dim,
                    indices: self.indices.clone(),
                    store: Store::Table(Arc::new(cubes)),
                    locator: None,
                    certificate: None,
                    rule: None,
                }
            }
            Store::Rule(_) => NDomain::from_rule(self.dim, self.indices.clone(), Arc::new(move |k| f(k, this.cube(k)))),
        }
    }

    /// Structural equality: exact for finite domains, by rule description
    /// for infinite ones, `None` when undecidable.
    pub fn same_as(&self, other: &NDomain) -> Option<bool> {
        if self.dim != other.dim || self.indices != other.indices {
            return Some(false);
        }
        if self.is_finite() {
            return Some(self.cubes() == other.cubes());
        }
        match (&self.rule, &other.rule) {
            (Some(a), Some(b)) if a == b => Some(true),
            _ => None,
        }
    }
}

/// Result of [`validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub exhaustive: bool,
    pub checked_indices: usize,
    pub checked_pairs: usize,
    /// First pair with overlapping interiors.
    pub violation: Option<(usize, usize)>,
    pub certificate: Option<Certificate>,
}

/// Checks pairwise interior-disjointness: every pair of a finite domain, or
/// every pair with both indices `<= bound` of an infinite one.
pub fn validate(domain: &NDomain, bound: usize) -> ValidationReport {
    let entries = domain.entries(bound);
    let mut pairs = 0;
    let mut violation = None;
    'outer: for (i, (ka, a)) in entries.iter().enumerate() {
        for (kb, b) in &entries[i + 1..] {
            pairs += 1;
            if a.interiors_overlap(b) {
                violation = Some((*ka, *kb));
                break 'outer;
            }
        }
    }
    ValidationReport {
        valid: violation.is_none(),
        exhaustive: domain.is_finite(),
        checked_indices: entries.len(),
        checked_pairs: pairs,
        violation,
        certificate: domain.certificate.clone(),
    }
}

/// `[(k-1)/k, k/(k+1)]`.
pub fn standard_interval(k: usize) -> Interval {
    let k = k as i64;
    Interval::new_unchecked(rat(k - 1, k), rat(k, k + 1))
}

/// Indices `k` with `x ∈ [(k-1)/k, k/(k+1)]`.
pub fn standard_locate(x: &Rational) -> Vec<usize> {
    if x >= &one() || x < &Rational::from_integer(0.into()) {
        return vec![];
    }
    // x ∈ slab k  ⇔  x/(1-x) <= k <= 1/(1-x)
    let gap = one() - x;
    let lo = (x / &gap).ceil();
    let hi = (one() / &gap).floor();
    let lo = lo.to_integer().max(1.into());
    let hi = hi.to_integer();
    let mut out = vec![];
    let mut k = lo;
    while k <= hi {
        out.push(usize::try_from(&k).unwrap_or(usize::MAX));
        k += 1;
    }
    out
}

/// The standard n-domain `R_k = [(k-1)/k, k/(k+1)] × I^{n-1}` over ℕ.
pub fn standard_domain(n: usize) -> Result<NDomain> {
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    Ok(
        NDomain::from_rule(n, IndexSet::naturals(), Arc::new(move |k| Cube::slab(n, standard_interval(k))))
            .with_locator(Arc::new(|p: &[Rational]| standard_locate(&p[0])))
            .with_certificate(Certificate::SlabTiling)
            .with_rule(DomainRule::Standard),
    )
}

fn interleaved_cube(n: usize, i: usize) -> Cube {
    let k = (i + 1) / 2;
    let s = standard_interval(k);
    let mid = s.midpoint();
    let piece = if i % 2 == 1 {
        Interval::new_unchecked(s.lo().clone(), mid)
    } else {
        Interval::new_unchecked(mid, s.hi().clone())
    };
    Cube::slab(n, piece)
}

/// `A_{k,1} = [(k-1)/k, a_k] × I^{n-1}`, `A_{k,2} = [a_k, k/(k+1)] × I^{n-1}`
/// with `a_k` the slab midpoint, listed `A_{1,1}, A_{1,2}, A_{2,1}, …`.
pub fn interleaved_pair_domain(n: usize) -> Result<NDomain> {
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    Ok(
        NDomain::from_rule(n, IndexSet::naturals(), Arc::new(move |i| interleaved_cube(n, i)))
            .with_locator(Arc::new(|p: &[Rational]| {
                standard_locate(&p[0])
                    .into_iter()
                    .flat_map(|k| [2 * k - 1, 2 * k])
                    .collect()
            }))
            .with_certificate(Certificate::SlabTiling)
            .with_rule(DomainRule::Interleaved),
    )
}

fn halves(n: usize) -> (Cube, Cube) {
    (
        Cube::slab(n, Interval::new_unchecked(Rational::from_integer(0.into()), half())),
        Cube::slab(n, Interval::new_unchecked(half(), one())),
    )
}

/// `B_1, C_1, B_2, C_2, …` where `B_k`, `C_k` are the standard cubes squeezed
/// into `[0,1/2] × I^{n-1}` and `[1/2,1] × I^{n-1}`.
pub fn block_pair_domain(n: usize) -> Result<NDomain> {
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    let (left, right) = halves(n);
    let (l2, r2) = (left.clone(), right.clone());
    Ok(NDomain::from_rule(
        n,
        IndexSet::naturals(),
        Arc::new(move |i| {
            let k = (i + 1) / 2;
            let block = if i % 2 == 1 { &left } else { &right };
            embed_cube(block, &Cube::slab(n, standard_interval(k)))
        }),
    )
    .with_locator(Arc::new(move |p: &[Rational]| {
        let mut out = vec![];
        if l2.contains_point(p) {
            let q = normalize_point(&l2, p);
            out.extend(standard_locate(&q[0]).into_iter().map(|k| 2 * k - 1));
        }
        if r2.contains_point(p) {
            let q = normalize_point(&r2, p);
            out.extend(standard_locate(&q[0]).into_iter().map(|k| 2 * k));
        }
        out
    }))
    .with_certificate(Certificate::SlabTiling)
    .with_rule(DomainRule::BlockPair))
}

fn check_prefix_permutation(perm: &[usize]) -> Result<()> {
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p == 0 || p > perm.len() || seen[p - 1] {
            return Err(Error::InvalidPermutation(format!("{perm:?} is not a permutation of 1..={}", perm.len())));
        }
        seen[p - 1] = true;
    }
    Ok(())
}

/// `k ↦ base(φ(k))`, `φ` finitely supported and given by its prefix.
pub fn permuted(base: &NDomain, perm: &[usize]) -> Result<NDomain> {
    check_prefix_permutation(perm)?;
    if base.indices() != &IndexSet::naturals() {
        return Err(Error::IndexMismatch("permutations act on domains over ℕ".into()));
    }
    let phi: Arc<Vec<usize>> = Arc::new(perm.to_vec());
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p - 1] = i + 1;
    }
    let apply = {
        let phi = phi.clone();
        move |k: usize| if k <= phi.len() { phi[k - 1] } else { k }
    };
    let b = base.clone();
    let mut d = NDomain::from_rule(base.dim(), IndexSet::naturals(), Arc::new(move |k| b.cube(apply(k))));
    if let Some(loc) = base.locator.clone() {
        d = d.with_locator(Arc::new(move |p: &[Rational]| {
            loc(p)
                .into_iter()
                .map(|k| if k <= inv.len() { inv[k - 1] } else { k })
                .collect()
        }));
    }
    d.certificate = Some(Certificate::Construction("reindexing".into()));
    if let Some(rule) = &base.rule {
        d.rule = Some(DomainRule::Permuted {
            base: Box::new(rule.clone()),
            perm: perm.to_vec(),
        });
    }
    Ok(d)
}

/// Explicit head cubes `1..=h`, then `tail(k - h)` squeezed into `block`.
pub fn head_tail(head: Vec<Cube>, block: Cube, tail: &NDomain) -> Result<NDomain> {
    let n = block.dim();
    if tail.indices() != &IndexSet::naturals() {
        return Err(Error::IndexMismatch("tail must be indexed by ℕ".into()));
    }
    for (i, c) in head.iter().enumerate() {
        if c.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: c.dim(),
            });
        }
        if c.interiors_overlap(&block) {
            return Err(Error::Overlap(i + 1, head.len() + 1));
        }
    }
    let h = head.len();
    let head = Arc::new(head);
    let (hd, blk, t) = (head.clone(), block.clone(), tail.clone());
    let mut d = NDomain::from_rule(
        n,
        IndexSet::naturals(),
        Arc::new(move |k| {
            if k <= h {
                hd[k - 1].clone()
            } else {
                embed_cube(&blk, &t.cube(k - h))
            }
        }),
    );
    if let Some(loc) = tail.locator.clone() {
        let (hd, blk) = (head.clone(), block.clone());
        d = d.with_locator(Arc::new(move |p: &[Rational]| {
            let mut out: Vec<usize> = (1..=h).filter(|&k| hd[k - 1].contains_point(p)).collect();
            if blk.contains_point(p) {
                out.extend(loc(&normalize_point(&blk, p)).into_iter().map(|k| k + h));
            }
            out
        }));
    }
    d.certificate = Some(Certificate::Construction("head disjoint from tail block".into()));
    if let Some(rule) = &tail.rule {
        d.rule = Some(DomainRule::HeadTail {
            head: head.as_ref().clone(),
            block,
            tail: Box::new(rule.clone()),
        });
    }
    Ok(d)
}

/// `child(k) ⊆ parent(k)` for every index, checked on demand.
#[derive(Debug, Clone)]
pub struct SubdomainWitness {
    parent: NDomain,
    child: NDomain,
}

impl SubdomainWitness {
    pub fn new(parent: NDomain, child: NDomain) -> Result<Self> {
        if parent.dim() != child.dim() {
            return Err(Error::DimensionMismatch {
                expected: parent.dim(),
                found: child.dim(),
            });
        }
        if parent.indices() != child.indices() {
            return Err(Error::IndexMismatch("witness parent and child differ".into()));
        }
        Ok(Self { parent, child })
    }

    pub fn parent(&self) -> &NDomain {
        &self.parent
    }

    pub fn child(&self) -> &NDomain {
        &self.child
    }

    /// Per-index containment flags for the checked indices.
    pub fn containment(&self, bound: usize) -> Vec<(usize, bool)> {
        self.parent
            .indices()
            .upto(bound)
            .into_iter()
            .map(|k| (k, self.parent.cube(k).contains_cube(&self.child.cube(k))))
            .collect()
    }

    pub fn check(&self, bound: usize) -> Result<()> {
        match self.containment(bound).into_iter().find(|(_, ok)| !ok) {
            Some((k, _)) => Err(Error::InvalidWitness(k)),
            None => Ok(()),
        }
    }
}

/// Locator for a sub-domain: the parent's candidates are a superset.
fn inherit_locator(parent: &NDomain, child: NDomain) -> NDomain {
    match &parent.locator {
        Some(loc) => child.with_locator(loc.clone()),
        None => child,
    }
}

/// Rebuilds `parent` with each cube replaced by `f(k, cube)`, keeping a
/// locator when `f` only ever shrinks.
pub(crate) fn shrink_with(parent: &NDomain, f: impl Fn(usize, Cube) -> Cube + Send + Sync + 'static) -> NDomain {
    let child = parent
        .map_cubes(f)
        .with_certificate(Certificate::Construction("sub-domain".into()));
    inherit_locator(parent, child)
}

/// A sub-domain proper at `k0`: every other cube lies in one cell of
/// `𝒞(R_{k0})`. Cubes already inside a cell are kept; the others are cut
/// down to their intersection with the first cell (in lexicographic order)
/// that meets their interior.
pub fn proper_refine(domain: &NDomain, k0: usize) -> Result<SubdomainWitness> {
    let center = domain.get(k0)?;
    let sub = Arc::new(subdivide(&center)?);
    let child = shrink_with(domain, move |k, c| {
        if k == k0 {
            c
        } else {
            refine_into_cell(&sub, &c).1
        }
    });
    SubdomainWitness::new(domain.clone(), child)
}

/// `(cell index, sub-cube)` for the refinement of `c` in `sub`.
pub(crate) fn refine_into_cell(sub: &Subdivision, c: &Cube) -> (usize, Cube) {
    if let Some(j) = sub.containing_cell(c) {
        return (j, c.clone());
    }
    let j = *sub
        .overlapping_cells(c)
        .first()
        .expect("a cube meets some cell of a decomposition");
    (j, c.intersection(sub.cell(j)).expect("overlap has interior"))
}

/// Whether every checked `k != k0` lies in a single cell of `𝒞(R_{k0})`.
pub fn is_proper_at(domain: &NDomain, k0: usize, bound: usize) -> Result<bool> {
    let sub = subdivide(&domain.get(k0)?)?;
    Ok(domain
        .entries(bound)
        .into_iter()
        .filter(|(k, _)| *k != k0)
        .all(|(_, c)| sub.containing_cell(&c).is_some()))
}

/// Each cube replaced by its concentric half-size copy.
pub fn shrink_to_interior(domain: &NDomain) -> SubdomainWitness {
    shrink_to_interior_by(domain, &half())
}

/// Each cube replaced by its concentric copy scaled by `factor ∈ (0, 1)`.
pub fn shrink_to_interior_by(domain: &NDomain, factor: &Rational) -> SubdomainWitness {
    let f = factor.clone();
    let child = shrink_with(domain, move |_, c| c.scaled_about_center(&f));
    SubdomainWitness::new(domain.clone(), child).expect("same index set")
}

/// A finite 2-domain that is dense at dyadic scale `2^{-depth}` on both axes.
///
/// Built from the dyadic quadtree: the two off-diagonal quadrants of every
/// diagonal square become cubes, the diagonal quadrants are refined further,
/// and at the finest level the diagonal squares themselves are kept. Large
/// off-diagonal cubes project onto intervals that contain the projections of
/// many small diagonal cubes, so no axis has disjoint projections.
pub fn adversarial_dense_domain(depth: u32) -> Result<NDomain> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    let mut cubes = Vec::new();
    fn rec(lo: (i64, i64), size_exp: u32, depth: u32, out: &mut Vec<Cube>) {
        // square [x, x + 2^-e] × [y, y + 2^-e] with integer coordinates in units of 2^-depth
        let unit = 1i64 << depth;
        let side = 1i64 << (depth - size_exp);
        let sq = |x: i64, y: i64, s: i64| {
            Cube::new(vec![
                Interval::new_unchecked(rat(x, unit), rat(x + s, unit)),
                Interval::new_unchecked(rat(y, unit), rat(y + s, unit)),
            ])
            .expect("two axes")
        };
        if size_exp == depth {
            out.push(sq(lo.0, lo.1, side));
            return;
        }
        let h = side / 2;
        out.push(sq(lo.0, lo.1 + h, h));
        out.push(sq(lo.0 + h, lo.1, h));
        rec(lo, size_exp + 1, depth, out);
        rec((lo.0 + h, lo.1 + h), size_exp + 1, depth, out);
    }
    rec((0, 0), 0, depth, &mut cubes);
    let mut d = NDomain::finite(2, cubes)?;
    d.certificate = Some(Certificate::Construction("dyadic quadtree".into()));
    Ok(d)
}

/// [`adversarial_dense_domain`] squeezed into `[0, 1/2] × I`, followed by
/// the standard domain squeezed into `[1/2, 1] × I`.
pub fn adversarial_infinite_domain(depth: u32) -> Result<NDomain> {
    let left = Cube::slab(2, Interval::new_unchecked(zero(), half()));
    let right = Cube::slab(2, Interval::new_unchecked(half(), one()));
    let head = adversarial_dense_domain(depth)?
        .cubes()
        .iter()
        .map(|c| embed_cube(&left, c))
        .collect();
    head_tail(head, right, &standard_domain(2)?)
}

/// Whether the `axis` projections of a finite domain have pairwise-disjoint
/// interiors.
pub fn projections_pairwise_disjoint(domain: &NDomain, axis: usize) -> bool {
    let cubes = domain.cubes();
    cubes.iter().enumerate().all(|(i, a)| {
        cubes[i + 1..]
            .iter()
            .all(|b| !a.axis(axis).interiors_overlap(b.axis(axis)))
    })
}

/// Whether for every dyadic `q = j / 2^depth` and `ε = 2^{-depth}` each axis
/// has a cube with projection inside `[q - ε, q + ε]`.
pub fn dyadic_density(domain: &NDomain, depth: u32) -> bool {
    let unit = 1i64 << depth;
    let eps = rat(1, unit);
    let cubes = domain.cubes();
    (0..domain.dim()).all(|axis| {
        (0..=unit).all(|j| {
            let q = rat(j, unit);
            let lo = &q - &eps;
            let hi = &q + &eps;
            cubes
                .iter()
                .any(|c| c.lo(axis) >= &lo && c.hi(axis) <= &hi)
        })
    })
}

/// `Σ_{k<=m} 1/(k(k+1)) = m/(m+1)`, the first-axis extent of `R_1 ∪ … ∪ R_m`.
pub fn standard_prefix_length(m: usize) -> Rational {
    let m = m as i64;
    rat(m, m + 1)
}
