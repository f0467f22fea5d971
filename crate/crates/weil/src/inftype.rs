//! Simplicial infinitesimal types and the polynomial maps between them.
//!
//! A type `D^n{p}` is presented by `n` square-zero coordinates together with
//! a set of vanishing monomials `d_{i1}...d_{ik}`. Over the rationals the
//! only honest point of such a type is the origin, so the kernel represents
//! a type intensionally by its function algebra and a map of types by the
//! dual homomorphism substituting its coordinate polynomials.

use crate::poly::{Coeff, Poly};
use crate::weil::{reduce, WeilAlgebra, WeilElement, WeilHom, WeilPresentation};
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InfTypeError {
    #[error("vanishing list index {0} out of range 1..={1}")]
    IndexOutOfRange(usize, usize),
    #[error("coordinate {0} has a nonzero constant term")]
    ConstantTerm(usize),
    #[error("coordinate {0} has arity {1}, source has arity {2}")]
    CoordArity(usize, usize, usize),
    #[error("expected {expected} coordinates, got {got}")]
    CoordCount { expected: usize, got: usize },
    #[error("coordinate {0} does not square to zero in the source")]
    SquareNotZero(usize),
    #[error("target vanishing monomial {0:?} is violated")]
    RelationViolated(Vec<usize>),
    #[error("maps do not compose: source/target mismatch")]
    EndpointMismatch,
}

/// A simplicial infinitesimal type `D^n{p}`, carried by its function algebra.
#[derive(Debug, Clone)]
pub struct InfType {
    arity: usize,
    vanishing: BTreeSet<Vec<usize>>,
    algebra: Arc<WeilAlgebra>,
}

impl PartialEq for InfType {
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity && self.vanishing == other.vanishing
    }
}

impl Eq for InfType {}

impl InfType {
    /// Builds `D^n{p}`. Lists use 1-based indices as in the display syntax;
    /// a list with a repeated index imposes nothing beyond square-zero and is
    /// normalized away.
    pub fn new(arity: usize, vanishing: &[Vec<usize>]) -> Result<Self, InfTypeError> {
        let mut normalized: BTreeSet<Vec<usize>> = BTreeSet::new();
        for list in vanishing {
            for &i in list {
                if i == 0 || i > arity {
                    return Err(InfTypeError::IndexOutOfRange(i, arity));
                }
            }
            let mut sorted = list.clone();
            sorted.sort_unstable();
            let distinct = sorted.windows(2).all(|w| w[0] != w[1]);
            if distinct && !sorted.is_empty() {
                normalized.insert(sorted);
            }
        }
        let zero_based: Vec<Vec<usize>> = normalized
            .iter()
            .map(|l| l.iter().map(|&i| i - 1).collect())
            .collect();
        let algebra = WeilAlgebra::build(WeilPresentation::square_zero(arity, &zero_based))
            .expect("square-zero presentations always build");
        Ok(InfType { arity, vanishing: normalized, algebra })
    }

    /// The point `D^0`.
    pub fn point() -> Self {
        InfType::new(0, &[]).unwrap()
    }

    /// The base infinitesimal line `D`.
    pub fn d() -> Self {
        InfType::new(1, &[]).unwrap()
    }

    /// The full cube `D^n` (no vanishing monomials).
    pub fn cube(n: usize) -> Self {
        InfType::new(n, &[]).unwrap()
    }

    /// `D(n)`: all pairwise products vanish, leaving the union of the axes.
    pub fn axes(n: usize) -> Self {
        let mut lists = Vec::new();
        for i in 1..=n {
            for j in (i + 1)..=n {
                lists.push(vec![i, j]);
            }
        }
        InfType::new(n, &lists).unwrap()
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn vanishing(&self) -> &BTreeSet<Vec<usize>> {
        &self.vanishing
    }

    pub fn algebra(&self) -> &Arc<WeilAlgebra> {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }
}

impl fmt::Display for InfType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D^{}{{", self.arity)?;
        let mut first = true;
        for list in &self.vanishing {
            if !first {
                write!(f, ",")?;
            }
            first = false;
            write!(f, "(")?;
            for (k, i) in list.iter().enumerate() {
                if k > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{i}")?;
            }
            write!(f, ")")?;
        }
        write!(f, "}}")
    }
}

/// A basepoint-preserving polynomial map between infinitesimal types,
/// stored by target coordinates. Coordinates are normalized to their
/// canonical representatives in the source algebra, so structural equality
/// decides equality of maps.
#[derive(Debug, Clone, PartialEq)]
pub struct InfMap {
    source: InfType,
    target: InfType,
    coords: Vec<Poly>,
}

impl InfMap {
    /// Validates and normalizes a map given by target coordinates (arity of
    /// each coordinate = source arity).
    pub fn new(source: InfType, target: InfType, coords: Vec<Poly>) -> Result<Self, InfTypeError> {
        if coords.len() != target.arity() {
            return Err(InfTypeError::CoordCount {
                expected: target.arity(),
                got: coords.len(),
            });
        }
        let alg = source.algebra();
        let mut reduced: Vec<WeilElement> = Vec::with_capacity(coords.len());
        for (j, c) in coords.iter().enumerate() {
            if c.arity() != source.arity() {
                return Err(InfTypeError::CoordArity(j, c.arity(), source.arity()));
            }
            if !c.constant_term().is_zero() {
                return Err(InfTypeError::ConstantTerm(j));
            }
            let r = reduce(alg, c);
            if !r.mul(&r).is_zero() {
                return Err(InfTypeError::SquareNotZero(j));
            }
            reduced.push(r);
        }
        for list in target.vanishing() {
            let mut prod = WeilElement::one(alg);
            for &i in list {
                prod = prod.mul(&reduced[i - 1]);
            }
            if !prod.is_zero() {
                return Err(InfTypeError::RelationViolated(list.clone()));
            }
        }
        let coords = reduced.iter().map(WeilElement::representative).collect();
        Ok(InfMap { source, target, coords })
    }

    pub fn identity(t: &InfType) -> Self {
        let coords = (0..t.arity()).map(|i| Poly::var(i, t.arity())).collect();
        InfMap::new(t.clone(), t.clone(), coords).expect("identity is always valid")
    }

    /// The identity-coordinate injection of a subtype (same arity, more
    /// vanishing monomials) into a supertype.
    pub fn canonical_injection(sub: &InfType, sup: &InfType) -> Result<Self, InfTypeError> {
        if sub.arity() != sup.arity() {
            return Err(InfTypeError::EndpointMismatch);
        }
        let coords = (0..sub.arity())
            .map(|i| Poly::var(i, sub.arity()))
            .collect();
        InfMap::new(sub.clone(), sup.clone(), coords)
    }

    /// The constant-zero map into any target.
    pub fn zero(source: &InfType, target: &InfType) -> Self {
        let coords = vec![Poly::zero(source.arity()); target.arity()];
        InfMap::new(source.clone(), target.clone(), coords).expect("zero map is always valid")
    }

    pub fn source(&self) -> &InfType {
        &self.source
    }

    pub fn target(&self) -> &InfType {
        &self.target
    }

    pub fn coords(&self) -> &[Poly] {
        &self.coords
    }

    /// `self` after `first`: coordinatewise substitution, revalidated.
    pub fn compose(&self, first: &InfMap) -> Result<InfMap, InfTypeError> {
        if first.target != self.source {
            return Err(InfTypeError::EndpointMismatch);
        }
        let coords: Vec<Poly> = self
            .coords
            .iter()
            .map(|c| {
                if first.source.arity() == 0 && self.source.arity() == 0 {
                    Poly::zero(0)
                } else {
                    c.substitute(&padded_coords(first))
                }
            })
            .collect();
        InfMap::new(first.source.clone(), self.target.clone(), coords)
    }

    /// The dual homomorphism of function algebras, from the target's algebra
    /// to the source's, substituting the coordinate polynomials.
    pub fn dualize(&self) -> WeilHom {
        let src_alg = self.source.algebra();
        let images: Vec<WeilElement> = self.coords.iter().map(|c| reduce(src_alg, c)).collect();
        WeilHom::new(
            Arc::clone(self.target.algebra()),
            Arc::clone(src_alg),
            images,
        )
        .expect("map validity guarantees the dual homomorphism")
    }
}

// Substitution requires every image to share the source arity, including
// when the target has arity zero.
fn padded_coords(f: &InfMap) -> Vec<Poly> {
    f.coords.clone()
}

impl fmt::Display for InfMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = crate::poly::d_names(self.source.arity());
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", c.display_with(&names))?;
        }
        write!(f, ")")
    }
}

/// Independent count of the linear dimension of `D^n{p}`'s algebra:
/// square-free monomials divisible by no vanishing monomial, enumerated
/// directly. Used as an oracle against the row-reduction route.
pub fn admissible_monomial_count(t: &InfType) -> usize {
    let n = t.arity();
    let lists: Vec<&Vec<usize>> = t.vanishing().iter().collect();
    let mut count = 0usize;
    for mask in 0..(1u32 << n) {
        let subset: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| i + 1).collect();
        let divisible = lists
            .iter()
            .any(|l| l.iter().all(|i| subset.contains(i)));
        if !divisible {
            count += 1;
        }
    }
    count
}
