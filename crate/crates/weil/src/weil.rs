//! Finitely presented Weil algebras over the rationals.
//!
//! A presentation fixes an arity `n`, nilpotency orders `m1..mn` and a set of
//! extra relations with zero constant term; the algebra is the quotient
//! `Q[X1..Xn] / (X1^m1, ..., Xn^mn, f1, ..., fk)`. Because every variable is
//! nilpotent the quotient is spanned by the finite box of monomials below the
//! nilpotency orders, so a linear basis and a full reduction table can be
//! computed once by exact row reduction; no Groebner machinery is needed.

use crate::linalg::QMatrix;
use crate::poly::{rone, rzero, Coeff, Monomial, Poly, Rat};
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeilError {
    #[error("nilpotency order of generator {0} must be at least 1")]
    OrderZero(usize),
    #[error("relation {0} has arity {1}, presentation has arity {2}")]
    RelationArity(usize, usize, usize),
    #[error("relation {0} has a nonzero constant term")]
    RelationConstantTerm(usize),
    #[error("the unit reduces to zero: the quotient is not a Weil algebra")]
    DegenerateQuotient,
    #[error("image of generator {0} violates its nilpotency relation")]
    NilpotencyNotPreserved(usize),
    #[error("extra relation {0} is not sent to zero")]
    RelationNotPreserved(usize),
    #[error("image of generator {0} has a nonzero constant coefficient")]
    NonzeroConstantTerm(usize),
    #[error("element does not belong to the expected algebra")]
    AlgebraMismatch,
}

/// Presentation data for a Weil algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct WeilPresentation {
    arity: usize,
    orders: Vec<u32>,
    relations: Vec<Poly>,
}

impl WeilPresentation {
    pub fn new(orders: Vec<u32>, relations: Vec<Poly>) -> Result<Self, WeilError> {
        let arity = orders.len();
        for (i, &m) in orders.iter().enumerate() {
            if m == 0 {
                return Err(WeilError::OrderZero(i));
            }
        }
        for (i, r) in relations.iter().enumerate() {
            if r.arity() != arity {
                return Err(WeilError::RelationArity(i, r.arity(), arity));
            }
            if !r.constant_term().is_zero() {
                return Err(WeilError::RelationConstantTerm(i));
            }
        }
        Ok(WeilPresentation { arity, orders, relations })
    }

    /// All nilpotency orders 2 and monomial relations: the presentation of a
    /// simplicial infinitesimal type.
    pub fn square_zero(arity: usize, vanishing: &[Vec<usize>]) -> Self {
        let relations = vanishing
            .iter()
            .map(|list| {
                let mut m = Monomial::one(arity);
                for &i in list {
                    m = m.mul(&Monomial::var(i, arity));
                }
                Poly::monomial(m, rone())
            })
            .collect();
        WeilPresentation::new(vec![2; arity], relations).expect("monomial relations are valid")
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn relations(&self) -> &[Poly] {
        &self.relations
    }
}

/// A Weil algebra with its computed linear basis and reduction table.
///
/// The basis is the set of box monomials that survive row reduction of the
/// relation span (columns in graded-lex order, pivots on the first nonzero
/// column), and the table maps every box monomial to its coordinates over
/// the basis. Everything is computed eagerly, so the algebra is immutable
/// and safe to share.
#[derive(Debug)]
pub struct WeilAlgebra {
    presentation: WeilPresentation,
    basis: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    table: HashMap<Monomial, Vec<Rat>>,
}

impl PartialEq for WeilAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.presentation == other.presentation
    }
}

impl WeilAlgebra {
    /// Builds the quotient: enumerates the monomial box, spans the ideal by
    /// the reductions of (box monomial) x (relation), row-reduces exactly and
    /// reads the basis and reduction table off the echelon form.
    pub fn build(presentation: WeilPresentation) -> Result<Arc<Self>, WeilError> {
        let arity = presentation.arity;
        let box_monomials = enumerate_box(&presentation.orders);
        let col_of: HashMap<Monomial, usize> = box_monomials
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();
        let ncols = box_monomials.len();

        // Span of the ideal inside the box: one generator per (monomial,
        // relation) pair; a single pass is closure because every product of
        // box monomials projects back into the box.
        let mut seen: std::collections::HashSet<Vec<(usize, Rat)>> = Default::default();
        let mut rows: Vec<Vec<Rat>> = Vec::new();
        for rel in &presentation.relations {
            for m in &box_monomials {
                let prod = Poly::monomial(m.clone(), rone()).mul(rel);
                let mut sparse: Vec<(usize, Rat)> = Vec::new();
                for (mono, c) in prod.terms() {
                    if let Some(&j) = col_of.get(mono) {
                        sparse.push((j, c.clone()));
                    }
                    // Monomials outside the box are divisible by some
                    // X_i^{m_i} and vanish.
                }
                if sparse.is_empty() || !seen.insert(sparse.clone()) {
                    continue;
                }
                let mut dense = vec![rzero(); ncols];
                for (j, c) in sparse {
                    dense[j] = c;
                }
                rows.push(dense);
            }
        }

        let (pivots, reduced) = if rows.is_empty() {
            (Vec::new(), QMatrix::zero(0, ncols))
        } else {
            let mut mat = QMatrix::from_rows(rows);
            let pivots = mat.rref();
            (pivots, mat)
        };

        let mut is_pivot = vec![false; ncols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        if is_pivot[0] {
            return Err(WeilError::DegenerateQuotient);
        }

        let basis: Vec<Monomial> = box_monomials
            .iter()
            .enumerate()
            .filter(|(j, _)| !is_pivot[*j])
            .map(|(_, m)| m.clone())
            .collect();
        let index: HashMap<Monomial, usize> = basis
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();

        let mut table: HashMap<Monomial, Vec<Rat>> = HashMap::new();
        for (j, m) in box_monomials.iter().enumerate() {
            let coords = if let Some(&bi) = index.get(m) {
                let mut v = vec![rzero(); basis.len()];
                v[bi] = rone();
                v
            } else {
                // Pivot monomial: its echelon row reads
                //   m + sum(row[free] * basis monomial) = 0.
                let row = pivots.iter().position(|&c| c == j).expect("pivot row");
                let mut v = vec![rzero(); basis.len()];
                for (bi, bm) in basis.iter().enumerate() {
                    let col = col_of[bm];
                    let c = &reduced[(row, col)];
                    if !c.is_zero() {
                        v[bi] = -c.clone();
                    }
                }
                v
            };
            table.insert(m.clone(), coords);
        }

        debug_assert_eq!(basis[0], Monomial::one(arity));
        Ok(Arc::new(WeilAlgebra { presentation, basis, index, table }))
    }

    pub fn presentation(&self) -> &WeilPresentation {
        &self.presentation
    }

    pub fn arity(&self) -> usize {
        self.presentation.arity
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn basis_index(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Coordinates of a box monomial's residue class; `None` if the monomial
    /// is outside the box (in which case it reduces to zero).
    pub fn monomial_coords(&self, m: &Monomial) -> Option<&Vec<Rat>> {
        self.table.get(m)
    }

    fn in_box(&self, m: &Monomial) -> bool {
        m.exps()
            .iter()
            .zip(&self.presentation.orders)
            .all(|(&e, &o)| e < o)
    }
}

/// Residue class of a polynomial: coordinates over the algebra's basis,
/// generic in the coefficient ring.
#[derive(Debug, Clone)]
pub struct WeilElem<S: Coeff> {
    algebra: Arc<WeilAlgebra>,
    coords: Vec<S>,
}

/// The concrete element type: rational coordinates.
pub type WeilElement = WeilElem<Rat>;

impl<S: Coeff> PartialEq for WeilElem<S> {
    fn eq(&self, other: &Self) -> bool {
        same_algebra(&self.algebra, &other.algebra) && self.coords == other.coords
    }
}

pub fn same_algebra(a: &Arc<WeilAlgebra>, b: &Arc<WeilAlgebra>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl<S: Coeff> WeilElem<S> {
    pub fn from_coords(algebra: Arc<WeilAlgebra>, coords: Vec<S>) -> Self {
        assert_eq!(coords.len(), algebra.dim(), "coordinate length mismatch");
        WeilElem { algebra, coords }
    }

    /// Reduces a polynomial in the generators, with coefficients supplied as
    /// a map from monomials. `proto` provides the zero of the coefficient
    /// ring.
    pub fn reduce_terms<'a>(
        algebra: &Arc<WeilAlgebra>,
        terms: impl Iterator<Item = (&'a Monomial, S)>,
        proto: &S,
    ) -> Self {
        let mut coords = vec![proto.zero_like(); algebra.dim()];
        for (m, c) in terms {
            if let Some(row) = algebra.monomial_coords(m) {
                for (i, r) in row.iter().enumerate() {
                    if !r.is_zero() {
                        coords[i] = coords[i].add(&c.scale(r));
                    }
                }
            } else if algebra.in_box(m) {
                unreachable!("box monomial missing from the reduction table");
            }
            // Out-of-box monomials reduce to zero.
        }
        WeilElem { algebra: Arc::clone(algebra), coords }
    }

    pub fn zero_in(algebra: &Arc<WeilAlgebra>, proto: &S) -> Self {
        WeilElem {
            algebra: Arc::clone(algebra),
            coords: vec![proto.zero_like(); algebra.dim()],
        }
    }

    pub fn one_in(algebra: &Arc<WeilAlgebra>, unit: S) -> Self {
        let mut out = WeilElem::zero_in(algebra, &unit);
        out.coords[0] = unit;
        out
    }

    pub fn algebra(&self) -> &Arc<WeilAlgebra> {
        &self.algebra
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn coord(&self, m: &Monomial) -> Option<&S> {
        self.algebra.basis_index(m).map(|i| &self.coords[i])
    }

    /// Coefficient on the unit basis monomial (the "value at zero").
    pub fn unit_coeff(&self) -> &S {
        &self.coords[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(S::is_zero)
    }

    pub fn zero_like(&self) -> Self {
        WeilElem {
            algebra: Arc::clone(&self.algebra),
            coords: self.coords.iter().map(S::zero_like).collect(),
        }
    }

    fn assert_same(&self, other: &Self) {
        assert!(
            same_algebra(&self.algebra, &other.algebra),
            "elements of different Weil algebras"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same(other);
        WeilElem {
            algebra: Arc::clone(&self.algebra),
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.assert_same(other);
        WeilElem {
            algebra: Arc::clone(&self.algebra),
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        WeilElem {
            algebra: Arc::clone(&self.algebra),
            coords: self.coords.iter().map(S::neg).collect(),
        }
    }

    pub fn scale(&self, r: &Rat) -> Self {
        WeilElem {
            algebra: Arc::clone(&self.algebra),
            coords: self.coords.iter().map(|c| c.scale(r)).collect(),
        }
    }

    pub fn scale_coeff(&self, s: &S) -> Self {
        WeilElem {
            algebra: Arc::clone(&self.algebra),
            coords: self.coords.iter().map(|c| c.mul(s)).collect(),
        }
    }

    /// Algebra multiplication: multiply representatives basiswise and reduce
    /// through the table.
    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same(other);
        let alg = &self.algebra;
        let mut coords = vec![self.coords[0].zero_like(); alg.dim()];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coords.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let prod = alg.basis[i].mul(&alg.basis[j]);
                if let Some(row) = alg.monomial_coords(&prod) {
                    let ab = a.mul(b);
                    for (t, r) in row.iter().enumerate() {
                        if !r.is_zero() {
                            coords[t] = coords[t].add(&ab.scale(r));
                        }
                    }
                }
            }
        }
        WeilElem { algebra: Arc::clone(alg), coords }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = WeilElem::one_in(&self.algebra, self.coords[0].one_like());
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }
}

impl WeilElement {
    pub fn zero(algebra: &Arc<WeilAlgebra>) -> Self {
        WeilElem::zero_in(algebra, &rzero())
    }

    pub fn one(algebra: &Arc<WeilAlgebra>) -> Self {
        WeilElem::one_in(algebra, rone())
    }

    pub fn constant(algebra: &Arc<WeilAlgebra>, c: Rat) -> Self {
        WeilElem::one_in(algebra, c)
    }

    /// The residue class of generator `X_i`.
    pub fn generator(algebra: &Arc<WeilAlgebra>, i: usize) -> Self {
        reduce(algebra, &Poly::var(i, algebra.arity()))
    }

    /// The canonical polynomial representative (basis expansion).
    pub fn representative(&self) -> Poly {
        let mut p = Poly::zero(self.algebra.arity());
        for (i, c) in self.coords.iter().enumerate() {
            p = p.add(&Poly::monomial(self.algebra.basis[i].clone(), c.clone()));
        }
        p
    }
}

/// Normal form of a polynomial in the quotient.
pub fn reduce(algebra: &Arc<WeilAlgebra>, p: &Poly) -> WeilElement {
    assert_eq!(p.arity(), algebra.arity(), "polynomial arity mismatch");
    WeilElem::reduce_terms(algebra, p.terms().map(|(m, c)| (m, c.clone())), &rzero())
}

/// Evaluates a polynomial at elements of a Weil algebra (all in `algebra`);
/// the coefficient ring of the arguments may be symbolic.
pub fn eval_poly<S: Coeff>(
    algebra: &Arc<WeilAlgebra>,
    p: &Poly,
    args: &[WeilElem<S>],
    proto: &S,
) -> WeilElem<S> {
    assert_eq!(p.arity(), args.len(), "argument count mismatch");
    for a in args {
        assert!(
            same_algebra(a.algebra(), algebra),
            "arguments from a different algebra"
        );
    }
    let mut out = WeilElem::zero_in(algebra, proto);
    for (m, c) in p.terms() {
        let mut term = WeilElem::one_in(algebra, proto.one_like());
        for (i, &e) in m.exps().iter().enumerate() {
            for _ in 0..e {
                term = term.mul(&args[i]);
            }
        }
        out = out.add(&term.scale(c));
    }
    out
}

/// A validated homomorphism of Weil algebras, stored by generator images.
///
/// Validation checks that each generator image satisfies its nilpotency
/// relation, that every extra relation maps to zero, and that images have no
/// constant part (the homomorphism is local).
#[derive(Debug, Clone, PartialEq)]
pub struct WeilHom {
    source: Arc<WeilAlgebra>,
    target: Arc<WeilAlgebra>,
    images: Vec<WeilElement>,
}

impl WeilHom {
    pub fn new(
        source: Arc<WeilAlgebra>,
        target: Arc<WeilAlgebra>,
        images: Vec<WeilElement>,
    ) -> Result<Self, WeilError> {
        assert_eq!(images.len(), source.arity(), "one image per source generator");
        for (i, im) in images.iter().enumerate() {
            if !same_algebra(im.algebra(), &target) {
                return Err(WeilError::AlgebraMismatch);
            }
            if !im.unit_coeff().is_zero() {
                return Err(WeilError::NonzeroConstantTerm(i));
            }
        }
        for (i, im) in images.iter().enumerate() {
            if !im.pow(source.presentation().orders[i]).is_zero() {
                return Err(WeilError::NilpotencyNotPreserved(i));
            }
        }
        for (i, rel) in source.presentation().relations.iter().enumerate() {
            let v = eval_poly(&target, rel, &images, &rzero());
            if !v.is_zero() {
                return Err(WeilError::RelationNotPreserved(i));
            }
        }
        Ok(WeilHom { source, target, images })
    }

    pub fn identity(algebra: &Arc<WeilAlgebra>) -> Self {
        let images = (0..algebra.arity())
            .map(|i| WeilElement::generator(algebra, i))
            .collect();
        WeilHom {
            source: Arc::clone(algebra),
            target: Arc::clone(algebra),
            images,
        }
    }

    pub fn source(&self) -> &Arc<WeilAlgebra> {
        &self.source
    }

    pub fn target(&self) -> &Arc<WeilAlgebra> {
        &self.target
    }

    pub fn images(&self) -> &[WeilElement] {
        &self.images
    }

    /// Applies the homomorphism: substitute generator images into the basis
    /// expansion and reduce in the target.
    pub fn apply<S: Coeff>(&self, u: &WeilElem<S>) -> WeilElem<S> {
        assert!(
            same_algebra(u.algebra(), &self.source),
            "element not in the source algebra"
        );
        let proto = u.coords()[0].zero_like();
        let mut out = WeilElem::zero_in(&self.target, &proto);
        for (i, c) in u.coords().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let b = &self.source.basis[i];
            let mut img = WeilElement::one(&self.target);
            for (v, &e) in b.exps().iter().enumerate() {
                for _ in 0..e {
                    img = img.mul(&self.images[v]);
                }
            }
            // c * img, coefficientwise over the target basis.
            let term = WeilElem {
                algebra: Arc::clone(&self.target),
                coords: img.coords().iter().map(|r| c.scale(r)).collect(),
            };
            out = out.add(&term);
        }
        out
    }

    /// `self` after `first` (usual composition order).
    pub fn compose(&self, first: &WeilHom) -> WeilHom {
        assert!(
            same_algebra(&first.target, &self.source),
            "homomorphisms do not compose"
        );
        let images = first.images.iter().map(|im| self.apply(im)).collect();
        WeilHom {
            source: Arc::clone(&first.source),
            target: Arc::clone(&self.target),
            images,
        }
    }

    /// The matrix of the induced linear map on coordinates.
    pub fn matrix(&self) -> QMatrix {
        let mut m = QMatrix::zero(self.target.dim(), self.source.dim());
        for j in 0..self.source.dim() {
            let mut coords = vec![rzero(); self.source.dim()];
            coords[j] = rone();
            let e = WeilElement::from_coords(Arc::clone(&self.source), coords);
            let img = self.apply(&e);
            for (i, c) in img.coords().iter().enumerate() {
                m[(i, j)] = c.clone();
            }
        }
        m
    }
}

/// Coproduct of Weil algebras: concatenated presentations with renumbered
/// variables. For monomial relation sets the dimension multiplies.
pub fn tensor(a: &WeilAlgebra, b: &WeilAlgebra) -> Result<Arc<WeilAlgebra>, WeilError> {
    let na = a.arity();
    let nb = b.arity();
    let arity = na + nb;
    let mut orders = a.presentation().orders.clone();
    orders.extend_from_slice(&b.presentation().orders);
    let mut relations: Vec<Poly> = a
        .presentation()
        .relations
        .iter()
        .map(|r| r.pad_to(arity))
        .collect();
    for r in &b.presentation().relations {
        // Shift b's variables past a's.
        let images: Vec<Poly> = (0..nb).map(|i| Poly::var(na + i, arity)).collect();
        relations.push(r.substitute(&images));
    }
    WeilAlgebra::build(WeilPresentation::new(orders, relations)?)
}

impl fmt::Display for WeilAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q[")?;
        for i in 0..self.arity() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "X{}", i + 1)?;
        }
        write!(f, "]/(dim {})", self.dim())
    }
}

fn enumerate_box(orders: &[u32]) -> Vec<Monomial> {
    let mut out = vec![Monomial::one(orders.len())];
    for (i, &o) in orders.iter().enumerate() {
        let mut next = Vec::with_capacity(out.len() * o as usize);
        for m in &out {
            for e in 0..o {
                let mut exps = m.exps().to_vec();
                exps[i] = e;
                next.push(Monomial::new(exps));
            }
        }
        out = next;
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, rint};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn dual_numbers() -> Arc<WeilAlgebra> {
        WeilAlgebra::build(WeilPresentation::new(vec![2], vec![]).unwrap()).unwrap()
    }

    fn d2_algebra() -> Arc<WeilAlgebra> {
        // Q[X,Y]/(X^2, Y^2, XY)
        WeilAlgebra::build(WeilPresentation::square_zero(2, &[vec![0, 1]])).unwrap()
    }

    #[test]
    fn dual_numbers_basis() {
        let a = dual_numbers();
        assert_eq!(a.dim(), 2);
        assert_eq!(a.basis(), &[Monomial::one(1), Monomial::var(0, 1)]);
    }

    #[test]
    fn d2_algebra_dim_three() {
        let a = d2_algebra();
        assert_eq!(a.dim(), 3);
        assert_eq!(
            a.basis(),
            &[
                Monomial::one(2),
                Monomial::var(1, 2),
                Monomial::var(0, 2)
            ]
        );
    }

    #[test]
    fn linear_relation_collapses_generators() {
        // Q[X,Y]/(X^2, Y^2, X - Y): dim 2, basis {1, X}, Y reduced to X.
        let rel = Poly::var(0, 2).sub(&Poly::var(1, 2));
        let a = WeilAlgebra::build(
            WeilPresentation::new(vec![2, 2], vec![rel]).unwrap(),
        )
        .unwrap();
        assert_eq!(a.dim(), 2);
        assert_eq!(a.basis(), &[Monomial::one(2), Monomial::var(0, 2)]);
        let y = reduce(&a, &Poly::var(1, 2));
        let x = reduce(&a, &Poly::var(0, 2));
        assert_eq!(y, x);
        // The cross term XY = X^2 = 0 by closure.
        let xy = reduce(&a, &Poly::var(0, 2).mul(&Poly::var(1, 2)));
        assert!(xy.is_zero());
    }

    #[test]
    fn reduce_binomial_square() {
        let a = dual_numbers();
        let p = Poly::one(1).add(&Poly::var(0, 1)).pow(2);
        let e = reduce(&a, &p);
        assert_eq!(e.coords(), &[rint(1), rint(2)]);
    }

    #[test]
    fn reduce_cross_term_vanishes() {
        let a = d2_algebra();
        let e = reduce(&a, &Poly::var(0, 2).mul(&Poly::var(1, 2)));
        assert!(e.is_zero());
    }

    #[test]
    fn reduce_zero() {
        let a = d2_algebra();
        assert!(reduce(&a, &Poly::zero(2)).is_zero());
    }

    #[test]
    fn dual_number_product_law() {
        // (x0 + a d)(y0 + b d) = x0 y0 + (x0 b + y0 a) d, checked with
        // symbolic coefficients in Q[x0,a,y0,b].
        let alg = dual_numbers();
        let v = |i: usize| Poly::var(i, 4);
        let u = WeilElem::from_coords(Arc::clone(&alg), vec![v(0), v(1)]);
        let w = WeilElem::from_coords(Arc::clone(&alg), vec![v(2), v(3)]);
        let prod = u.mul(&w);
        assert_eq!(prod.coords()[0], v(0).mul(&v(2)));
        assert_eq!(prod.coords()[1], v(0).mul(&v(3)).add(&v(2).mul(&v(1))));
    }

    #[test]
    fn nilpotent_squares_to_zero() {
        let a = dual_numbers();
        let d = WeilElement::generator(&a, 0);
        assert!(d.mul(&d).is_zero());
    }

    #[test]
    fn unit_law() {
        let a = d2_algebra();
        let u = reduce(
            &a,
            &Poly::var(0, 2).scale(&rat(2, 3)).add(&Poly::one(2)),
        );
        assert_eq!(u.mul(&WeilElement::one(&a)), u);
    }

    #[test]
    fn hom_projection_valid() {
        // Dual of (d, 0): D(2)-algebra -> dual numbers, X -> d, Y -> 0.
        let src = d2_algebra();
        let dst = dual_numbers();
        let h = WeilHom::new(
            Arc::clone(&src),
            Arc::clone(&dst),
            vec![WeilElement::generator(&dst, 0), WeilElement::zero(&dst)],
        )
        .unwrap();
        // a + bX + cY maps to a + b d; basis order of the source is [1, Y, X].
        let u = WeilElement::from_coords(Arc::clone(&src), vec![rint(5), rint(11), rint(7)]);
        assert_eq!(h.apply(&u).coords(), &[rint(5), rint(7)]);
    }

    #[test]
    fn hom_multiplication_image_valid() {
        // Dual of (d1,d2) -> d1 d2: dual numbers -> dual # dual, X -> X1 X2.
        let src = dual_numbers();
        let dd = tensor(&dual_numbers(), &dual_numbers()).unwrap();
        assert_eq!(dd.dim(), 4);
        let x1x2 = reduce(&dd, &Poly::var(0, 2).mul(&Poly::var(1, 2)));
        let h = WeilHom::new(Arc::clone(&src), Arc::clone(&dd), vec![x1x2]).unwrap();
        assert_eq!(h.images().len(), 1);
    }

    #[test]
    fn hom_rejects_constant_term() {
        let a = dual_numbers();
        let img = reduce(&a, &Poly::one(1).add(&Poly::var(0, 1)));
        let err = WeilHom::new(Arc::clone(&a), Arc::clone(&a), vec![img]).unwrap_err();
        assert_eq!(err, WeilError::NonzeroConstantTerm(0));
    }

    #[test]
    fn hom_rejects_broken_relation() {
        // D(2)-algebra -> dual # dual with X -> X1, Y -> X2: XY -> X1X2 != 0.
        let src = d2_algebra();
        let dd = tensor(&dual_numbers(), &dual_numbers()).unwrap();
        let err = WeilHom::new(
            Arc::clone(&src),
            Arc::clone(&dd),
            vec![
                WeilElement::generator(&dd, 0),
                WeilElement::generator(&dd, 1),
            ],
        )
        .unwrap_err();
        assert_eq!(err, WeilError::RelationNotPreserved(0));
    }

    #[test]
    fn hom_identity_and_unit() {
        let a = d2_algebra();
        let id = WeilHom::identity(&a);
        let u = WeilElement::from_coords(Arc::clone(&a), vec![rat(1, 2), rint(3), rint(-4)]);
        assert_eq!(id.apply(&u), u);
        assert_eq!(id.apply(&WeilElement::one(&a)), WeilElement::one(&a));
    }

    #[test]
    fn tensor_with_point_is_identity() {
        let a = d2_algebra();
        let point = WeilAlgebra::build(WeilPresentation::new(vec![], vec![]).unwrap()).unwrap();
        let t = tensor(&a, &point).unwrap();
        assert_eq!(t.dim(), a.dim());
        assert_eq!(t.basis(), a.basis());
    }

    #[test]
    fn tensor_dims_multiply() {
        let t = tensor(&d2_algebra(), &dual_numbers()).unwrap();
        assert_eq!(t.dim(), 6);
    }

    #[test]
    fn presentation_rejects_constant_relation() {
        let rel = Poly::one(1).add(&Poly::var(0, 1));
        assert_eq!(
            WeilPresentation::new(vec![2], vec![rel]).unwrap_err(),
            WeilError::RelationConstantTerm(0)
        );
    }

    #[test]
    fn higher_order_jet_algebra() {
        // Q[X]/(X^4): dim 4, X^3 nonzero, X^4 = 0.
        let a = WeilAlgebra::build(WeilPresentation::new(vec![4], vec![]).unwrap()).unwrap();
        assert_eq!(a.dim(), 4);
        let x = WeilElement::generator(&a, 0);
        assert!(!x.pow(3).is_zero());
        assert!(x.pow(4).is_zero());
    }

    fn rand_rat(rng: &mut StdRng) -> Rat {
        rat(rng.gen_range(-9..=9), rng.gen_range(1..=9))
    }

    fn rand_poly(rng: &mut StdRng, arity: usize, max_deg: u32) -> Poly {
        let mut p = Poly::zero(arity);
        for _ in 0..rng.gen_range(0..6) {
            let exps: Vec<u32> = (0..arity).map(|_| rng.gen_range(0..=max_deg)).collect();
            p = p.add(&Poly::monomial(Monomial::new(exps), rand_rat(rng)));
        }
        p
    }

    #[test]
    fn reduce_is_idempotent() {
        let rel = Poly::var(0, 2).sub(&Poly::var(1, 2));
        let fixtures = vec![
            dual_numbers(),
            d2_algebra(),
            WeilAlgebra::build(WeilPresentation::square_zero(3, &[])).unwrap(),
            WeilAlgebra::build(WeilPresentation::new(vec![2, 2], vec![rel]).unwrap()).unwrap(),
            WeilAlgebra::build(WeilPresentation::new(vec![3], vec![]).unwrap()).unwrap(),
        ];
        let mut rng = StdRng::seed_from_u64(7);
        for alg in fixtures {
            for _ in 0..200 {
                let p = rand_poly(&mut rng, alg.arity(), 3);
                let once = reduce(&alg, &p);
                let twice = reduce(&alg, &once.representative());
                assert_eq!(once, twice);
            }
        }
    }

    #[test]
    fn elem_mul_ring_laws_fuzz() {
        let alg = d2_algebra();
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..100 {
            let e = |rng: &mut StdRng| {
                WeilElement::from_coords(
                    Arc::clone(&alg),
                    (0..alg.dim()).map(|_| rand_rat(rng)).collect(),
                )
            };
            let (a, b, c) = (e(&mut rng), e(&mut rng), e(&mut rng));
            assert_eq!(a.mul(&b), b.mul(&a));
            assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            assert_eq!(a.mul(&WeilElement::one(&alg)), a);
        }
    }

    #[test]
    fn hom_apply_preserves_products() {
        let src = d2_algebra();
        let dst = dual_numbers();
        let h = WeilHom::new(
            Arc::clone(&src),
            Arc::clone(&dst),
            vec![WeilElement::generator(&dst, 0), WeilElement::zero(&dst)],
        )
        .unwrap();
        let mut rng = StdRng::seed_from_u64(13);
        for _ in 0..100 {
            let e = |rng: &mut StdRng| {
                WeilElement::from_coords(
                    Arc::clone(&src),
                    (0..src.dim()).map(|_| rand_rat(rng)).collect(),
                )
            };
            let (u, v) = (e(&mut rng), e(&mut rng));
            assert_eq!(h.apply(&u.mul(&v)), h.apply(&u).mul(&h.apply(&v)));
        }
        assert_eq!(h.apply(&WeilElement::one(&src)), WeilElement::one(&dst));
    }
}
