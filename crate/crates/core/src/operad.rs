//! The little n-cubes operad `C_n(m)` and its infinitary extension `C_n(ω)`.

use crate::domains::{head_tail, permuted, validate, IndexSet, NDomain};
use crate::error::{Error, Result};
use crate::geometry::{embed_cube, Cube};
use crate::loops::{concatenate, KSequence, NLoop};

/// Number of inputs of an operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arity {
    Finite(usize),
    Omega,
}

/// How many indices of an ω-element are checked on construction.
pub const OMEGA_CHECK_BOUND: usize = 64;

/// An element of `C_n(m)` (cubes `1..=m`) or of `C_n(ω)` (cubes indexed by ℕ).
#[derive(Debug, Clone)]
pub struct OperadElement {
    domain: NDomain,
}

impl OperadElement {
    /// Checks interior-disjointness (all pairs when finite, the first
    /// [`OMEGA_CHECK_BOUND`] indices otherwise) and renumbers a finite
    /// domain to `1..=m`.
    pub fn new(domain: NDomain) -> Result<Self> {
        let report = validate(&domain, OMEGA_CHECK_BOUND);
        if let Some((a, b)) = report.violation {
            return Err(Error::Overlap(a, b));
        }
        let domain = match domain.indices() {
            IndexSet::Finite(idx) if idx.iter().copied().ne(1..=idx.len()) => NDomain::finite(domain.dim(), domain.cubes())?,
            IndexSet::From(s) if *s != 1 => {
                return Err(Error::IndexMismatch("ω-elements are indexed from 1".into()));
            }
            _ => domain,
        };
        Ok(Self { domain })
    }

    /// The operad unit `{I^n}`.
    pub fn unit(n: usize) -> Self {
        Self {
            domain: NDomain::finite(n, vec![Cube::unit(n)]).expect("one cube"),
        }
    }

    pub fn domain(&self) -> &NDomain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn arity(&self) -> Arity {
        match self.domain.len() {
            Some(m) => Arity::Finite(m),
            None => Arity::Omega,
        }
    }
}

/// `γ(outer; inners)`: inner cube `j` of input `i` becomes
/// `L_{I^n, outer_i}(inner_j)`, listed outer-major.
///
/// At most one inner may have arity ω and it has to come last, so that the
/// result is again indexed by ℕ.
pub fn compose(outer: &OperadElement, inners: &[OperadElement]) -> Result<OperadElement> {
    let n = outer.dim();
    let Arity::Finite(m) = outer.arity() else {
        return Err(Error::ArityMismatch("the outer element must have finite arity".into()));
    };
    if inners.len() != m {
        return Err(Error::ArityMismatch(format!("{m} inputs, {} inners", inners.len())));
    }
    if let Some(e) = inners.iter().find(|e| e.dim() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: e.dim(),
        });
    }
    let omegas = inners.iter().filter(|e| e.arity() == Arity::Omega).count();
    if omegas > 1 {
        return Err(Error::ArityMismatch("at most one inner may have arity ω".into()));
    }
    if omegas == 1 && inners.last().map(OperadElement::arity) != Some(Arity::Omega) {
        return Err(Error::ArityMismatch("the ω inner must be the last input".into()));
    }
    let outer_cubes = outer.domain.cubes();
    let finite_part = if omegas == 1 { m - 1 } else { m };
    let mut head = Vec::new();
    for (block, inner) in outer_cubes.iter().zip(&inners[..finite_part]) {
        head.extend(inner.domain.cubes().iter().map(|c| embed_cube(block, c)));
    }
    let domain = if omegas == 1 {
        head_tail(head, outer_cubes[m - 1].clone(), &inners[m - 1].domain)?
    } else {
        NDomain::finite(n, head)?
    };
    Ok(OperadElement { domain })
}

/// `(R·φ)(k) = R_{φ(k)}`, `φ` a permutation of `1..=m` (or a finitely
/// supported permutation of ℕ given by its prefix).
pub fn symmetric_action(element: &OperadElement, phi: &[usize]) -> Result<OperadElement> {
    let Arity::Finite(m) = element.arity() else {
        return Ok(OperadElement {
            domain: permuted(&element.domain, phi)?,
        });
    };
    let mut seen = vec![false; m];
    if phi.len() != m || phi.iter().any(|&p| p == 0 || p > m || std::mem::replace(&mut seen[p - 1], true)) {
        return Err(Error::InvalidPermutation(format!("{phi:?} for arity {m}")));
    }
    let cubes = element.domain.cubes();
    Ok(OperadElement {
        domain: NDomain::finite(element.dim(), phi.iter().map(|&p| cubes[p - 1].clone()).collect())?,
    })
}

/// `(R, {f_k}) ↦ ∏_R f_k`.
pub fn act_on_loops(element: &OperadElement, sequence: &KSequence) -> Result<NLoop> {
    Ok(concatenate(&element.domain, sequence)?.into_loop())
}

/// The outer action applied to the inner actions on consecutive blocks of
/// `sequence`: the right-hand side of `∏_{γ(A; B)} f = ∏_A (∏_{B_i} f|_i)`.
pub fn act_nested(outer: &OperadElement, inners: &[OperadElement], sequence: &KSequence) -> Result<NLoop> {
    if inners.len() != outer.domain.len().unwrap_or(usize::MAX) {
        return Err(Error::ArityMismatch("one inner per outer cube".into()));
    }
    let mut offset = 0;
    let mut loops = Vec::with_capacity(inners.len());
    for inner in inners {
        let len = inner.domain.len();
        let part = sequence.shifted(offset, len)?;
        loops.push(act_on_loops(inner, &part)?);
        offset += len.unwrap_or(0);
    }
    act_on_loops(outer, &KSequence::finite(loops)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::standard_domain;
    use crate::geometry::Interval;
    use crate::loops::{lattice, LoopFamily, SequenceSpec};
    use crate::rational::rat;

    fn halves(n: usize) -> OperadElement {
        OperadElement::new(
            NDomain::finite(n, vec![Cube::slab(n, Interval::of(0, 1, 1, 2)), Cube::slab(n, Interval::of(1, 2, 1, 1))]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn unit_laws() {
        let h = halves(2);
        let left = compose(&OperadElement::unit(2), std::slice::from_ref(&h)).unwrap();
        assert_eq!(left.domain().cubes(), h.domain().cubes());
        let right = compose(&h, &[OperadElement::unit(2), OperadElement::unit(2)]).unwrap();
        assert_eq!(right.domain().cubes(), h.domain().cubes());
    }

    #[test]
    fn omega_inner() {
        let std = OperadElement::new(standard_domain(2).unwrap()).unwrap();
        let c = compose(&halves(2), &[OperadElement::unit(2), std.clone()]).unwrap();
        assert_eq!(c.arity(), Arity::Omega);
        assert_eq!(c.domain().cube(1), Cube::slab(2, Interval::of(0, 1, 1, 2)));
        assert_eq!(c.domain().cube(2), Cube::slab(2, Interval::of(1, 2, 3, 4)));
        assert!(compose(&halves(2), &[std.clone(), OperadElement::unit(2)]).is_err());
        assert!(compose(&halves(2), &[std.clone(), std]).is_err());
    }

    #[test]
    fn nested_action_matches() {
        let std = OperadElement::new(standard_domain(2).unwrap()).unwrap();
        let inners = [halves(2), std];
        let c = compose(&halves(2), &inners).unwrap();
        let seq = SequenceSpec::new(LoopFamily::BumpHarmonic, rat(1, 1), 1)
            .build(2, &IndexSet::naturals())
            .unwrap();
        let lhs = act_on_loops(&c, &seq).unwrap();
        let rhs = act_nested(&halves(2), &inners, &seq).unwrap();
        for p in lattice(2, 12) {
            assert_eq!(lhs.eval(&p), rhs.eval(&p), "{p:?}");
        }
    }

    #[test]
    fn action_composes() {
        let q = OperadElement::new(
            NDomain::finite(
                2,
                vec![
                    Cube::slab(2, Interval::of(0, 1, 1, 3)),
                    Cube::slab(2, Interval::of(1, 3, 2, 3)),
                    Cube::slab(2, Interval::of(2, 3, 1, 1)),
                ],
            )
            .unwrap(),
        )
        .unwrap();
        let (phi, psi) = ([2, 3, 1], [3, 1, 2]);
        // (R·φ)·ψ = R·(φ∘ψ)
        let twice = symmetric_action(&symmetric_action(&q, &phi).unwrap(), &psi).unwrap();
        let comp: Vec<usize> = psi.iter().map(|&k| phi[k - 1]).collect();
        let once = symmetric_action(&q, &comp).unwrap();
        assert_eq!(twice.domain().cubes(), once.domain().cubes());
        assert!(symmetric_action(&q, &[1, 1, 2]).is_err());
    }
}
