//! Vector fields as infinitesimal transformations and their Lie bracket.
//!
//! A field `v` on `Q^k` is carried around as the transformation
//! `X_d(x) = x + d v(x)`. Transformation cubes keep their state dependence
//! symbolic: each component is an element of the domain algebra with
//! coefficients in `Q[x1..xk]`, so a bracket is computed once as a field
//! rather than pointwise, reusing the rational solve operators of the
//! strong-difference machinery on polynomial right-hand sides.

use crate::inftype::{InfMap, InfType};
use crate::microlinear::{strong_diff, MicroError, Tangent};
use crate::poly::{rzero, Monomial, Poly, Rat};
use crate::quasicolim::{Cube, Microcube};
use crate::weil::{WeilElem, WeilHom};
use std::collections::BTreeMap;
use std::sync::Arc;

/// A polynomial vector field on `Q^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    k: usize,
    components: Vec<Poly>,
}

impl VectorField {
    pub fn new(components: Vec<Poly>) -> Self {
        let k = components.len();
        for c in &components {
            assert_eq!(c.arity(), k, "field components are polynomials in x1..xk");
        }
        VectorField { k, components }
    }

    pub fn zero(k: usize) -> Self {
        VectorField::new(vec![Poly::zero(k); k])
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        assert_eq!(self.k, other.k, "field dimensions differ");
        VectorField::new(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.add(b))
                .collect(),
        )
    }

    pub fn scale(&self, alpha: &Rat) -> VectorField {
        VectorField::new(self.components.iter().map(|c| c.scale(alpha)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Poly::is_zero)
    }

    /// The infinitesimal transformation `x + d v(x)` as a one-slot cube.
    pub fn transform(&self) -> TransformCube {
        let d = InfType::d();
        let alg = d.algebra();
        let comps = (0..self.k)
            .map(|i| {
                WeilElem::from_coords(
                    Arc::clone(alg),
                    vec![Poly::var(i, self.k), self.components[i].clone()],
                )
            })
            .collect();
        TransformCube::new(d, self.k, comps)
    }
}

/// A map `D^n -> (Q^k -> Q^k)` that is the identity at zero, stored as `k`
/// algebra elements with polynomial state coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformCube {
    k: usize,
    cube: Cube<Poly>,
}

impl TransformCube {
    pub fn new(domain: InfType, k: usize, comps: Vec<WeilElem<Poly>>) -> Self {
        assert_eq!(comps.len(), k);
        for (i, c) in comps.iter().enumerate() {
            assert_eq!(
                c.unit_coeff(),
                &Poly::var(i, k),
                "setting the infinitesimals to zero must give the identity"
            );
        }
        TransformCube { k, cube: Cube::new(domain, comps) }
    }

    /// The identity transformation, a cube over the point.
    pub fn identity(k: usize) -> Self {
        let pt = InfType::point();
        let comps = (0..k)
            .map(|i| WeilElem::one_in(pt.algebra(), Poly::var(i, k)))
            .collect();
        TransformCube::new(pt, k, comps)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.cube.domain().arity()
    }

    pub fn cube(&self) -> &Cube<Poly> {
        &self.cube
    }

    /// Interprets a raw cube as a transformation cube (checking the
    /// identity-at-zero invariant).
    pub fn from_cube(k: usize, cube: Cube<Poly>) -> Self {
        TransformCube::new(cube.domain().clone(), k, cube.components().to_vec())
    }

    /// Precomposes the infinitesimal slots with a coordinate permutation:
    /// slot j of the result is slot `perm[j]` of `self`... more precisely
    /// the result is `self((d_{perm(1)}, ..., d_{perm(n)}))`.
    pub fn permute_slots(&self, perm: &[usize]) -> TransformCube {
        let n = self.n();
        assert_eq!(perm.len(), n);
        let coords: Vec<Poly> = perm.iter().map(|&p| Poly::var(p, n)).collect();
        let sigma = InfMap::new(InfType::cube(n), InfType::cube(n), coords)
            .expect("permutations are valid maps");
        TransformCube { k: self.k, cube: self.cube.restrict(&sigma) }
    }

    /// Evaluates the state dependence at a point, yielding a concrete
    /// microcube based at that point.
    pub fn eval_at(&self, point: &[Rat]) -> Microcube {
        assert_eq!(point.len(), self.k, "point dimension mismatch");
        let comps = self
            .cube
            .components()
            .iter()
            .map(|c| {
                let coords: Vec<Rat> = c.coords().iter().map(|p| p.eval(point)).collect();
                WeilElem::from_coords(Arc::clone(c.algebra()), coords)
            })
            .collect();
        Microcube::new(self.cube.domain().clone(), comps)
    }
}

/// `theta1 * theta2`: run `theta2` in the first `n2` slots, then `theta1`
/// in the last `n1`, composing the state maps. Slots are renumbered so the
/// result is a cube over `D^(n1+n2)`.
pub fn star(theta1: &TransformCube, theta2: &TransformCube) -> TransformCube {
    assert_eq!(theta1.k, theta2.k, "state dimensions differ");
    let k = theta1.k;
    let n1 = theta1.n();
    let n2 = theta2.n();
    let n = n1 + n2;
    let big = InfType::cube(n);
    let big_alg = big.algebra();
    // Slot embeddings: theta2 into slots 1..n2, theta1 into slots n2+1..n.
    let embed = |cube: &Cube<Poly>, offset: usize, small_n: usize| -> Vec<WeilElem<Poly>> {
        let images = (0..small_n)
            .map(|i| crate::weil::WeilElement::generator(big_alg, offset + i))
            .collect();
        let hom = WeilHom::new(
            Arc::clone(cube.domain().algebra()),
            Arc::clone(big_alg),
            images,
        )
        .expect("slot embedding is a homomorphism");
        cube.components().iter().map(|c| hom.apply(c)).collect()
    };
    let inner = embed(theta2.cube(), 0, n2);
    let outer = embed(theta1.cube(), n2, n1);
    // Substitute the inner state output into the outer state variables.
    let comps: Vec<WeilElem<Poly>> = outer
        .iter()
        .map(|c| {
            let mut acc = WeilElem::zero_in(big_alg, &Poly::zero(k));
            for (mono, w) in state_decompose(c, k) {
                let mut term = WeilElem::one_in(big_alg, Poly::one(k));
                for (j, &e) in mono.exps().iter().enumerate() {
                    for _ in 0..e {
                        term = term.mul(&inner[j]);
                    }
                }
                // Multiply by the rational algebra coefficient w.
                let w_lift = WeilElem::from_coords(
                    Arc::clone(big_alg),
                    w.iter().map(|r| Poly::constant(k, r.clone())).collect(),
                );
                acc = acc.add(&term.mul(&w_lift));
            }
            acc
        })
        .collect();
    TransformCube::new(big, k, comps)
}

/// Transpose of the coefficient representation: for each state monomial,
/// its rational coordinate vector over the algebra basis.
fn state_decompose(e: &WeilElem<Poly>, k: usize) -> BTreeMap<Monomial, Vec<Rat>> {
    let dim = e.algebra().dim();
    let mut out: BTreeMap<Monomial, Vec<Rat>> = BTreeMap::new();
    for (b, p) in e.coords().iter().enumerate() {
        for (m, c) in p.terms() {
            let entry = out.entry(m.clone()).or_insert_with(|| vec![rzero(); dim]);
            entry[b] = c.clone();
        }
    }
    let _ = k;
    out
}

/// The flow-additivity law: `X_{d1} . X_{d2}` and `X_{d1+d2}` agree on the
/// axes `D(2)` (where `d1 d2 = 0`). Returns the comparison result; it holds
/// for every polynomial field.
pub fn flow_check_additive(field: &VectorField) -> bool {
    let (lhs, rhs) = flow_additive_sides(field);
    let incl = InfMap::canonical_injection(&InfType::axes(2), &InfType::cube(2))
        .expect("axes include into the square");
    lhs.cube().restrict(&incl) == rhs.cube().restrict(&incl)
}

/// Both sides of the additivity law over the full square, for callers that
/// want to inspect the `d1 d2` discrepancy itself.
pub fn flow_additive_sides(field: &VectorField) -> (TransformCube, TransformCube) {
    let x = field.transform();
    // star(X, X)(d1, d2) = X_{d2} . X_{d1}; swap slots for X_{d1} . X_{d2}.
    let lhs = star(&x, &x).permute_slots(&[1, 0]);
    let k = field.k();
    let square = InfType::cube(2);
    let alg = square.algebra();
    let rhs_comps = (0..k)
        .map(|i| {
            let coords = alg
                .basis()
                .iter()
                .map(|b| match (b.exps()[0], b.exps()[1]) {
                    (0, 0) => Poly::var(i, k),
                    (1, 0) | (0, 1) => field.components()[i].clone(),
                    _ => Poly::zero(k),
                })
                .collect();
            WeilElem::from_coords(Arc::clone(alg), coords)
        })
        .collect();
    let rhs = TransformCube::new(square, k, rhs_comps);
    (lhs, rhs)
}

/// The flow-sum law: over a single square-zero `d`, `X_d . Y_d`, `Y_d . X_d`
/// and `(X+Y)_d` all agree (the cross term carries `d^2`).
pub fn flow_check_sum(x: &VectorField, y: &VectorField) -> bool {
    assert_eq!(x.k(), y.k(), "field dimensions differ");
    let diag = InfMap::new(
        InfType::d(),
        InfType::cube(2),
        vec![Poly::var(0, 1), Poly::var(0, 1)],
    )
    .expect("diagonal is valid into the square");
    let sum = x.add(y).transform();
    // star(X, Y)(d1, d2) = X_{d2} . Y_{d1}; on the diagonal both orders
    // become compositions at the same d.
    let xy = star(&x.transform(), &y.transform()).cube().restrict(&diag);
    let yx = star(&y.transform(), &x.transform()).cube().restrict(&diag);
    xy == *sum.cube() && yx == *sum.cube()
}

/// The Lie bracket via the strong difference of the two second-order flows:
/// `(Y * X)` minus `(X * Y)` with its slots swapped. The result is a field
/// `u` with `[X, Y]_d(x) = x + d u(x)`.
pub fn bracket(x: &VectorField, y: &VectorField) -> VectorField {
    assert_eq!(x.k(), y.k(), "field dimensions differ");
    let k = x.k();
    let yx = star(&y.transform(), &x.transform());
    let xy_swapped = star(&x.transform(), &y.transform()).permute_slots(&[1, 0]);
    let t: Tangent<Poly> = strong_diff(yx.cube(), xy_swapped.cube())
        .expect("the two flows agree away from the cross term");
    for (i, b) in t.base().iter().enumerate() {
        assert_eq!(b, &Poly::var(i, k), "bracket tangent must be based at the identity");
    }
    VectorField::new(t.velocity())
}

/// Independent oracle for the bracket, derived by expanding the two
/// composites by hand to the `d1 d2` coefficient:
///   (Y*X)(d1,d2)(x)        = x + d1 v + d2 w + d1 d2 (Dw) v
///   (X*Y)(d2,d1)(x)        = x + d1 v + d2 w + d1 d2 (Dv) w
/// so the difference of cross terms is `(Dw) v - (Dv) w`.
pub fn classical_bracket(x: &VectorField, y: &VectorField) -> VectorField {
    assert_eq!(x.k(), y.k(), "field dimensions differ");
    let k = x.k();
    let v = x.components();
    let w = y.components();
    let comps = (0..k)
        .map(|i| {
            let mut acc = Poly::zero(k);
            for j in 0..k {
                acc = acc.add(&w[i].partial(j).mul(&v[j]));
                acc = acc.sub(&v[i].partial(j).mul(&w[j]));
            }
            acc
        })
        .collect();
    VectorField::new(comps)
}

/// The six third-order cubes built from three fields by iterated `*`, with
/// the slot permutations that feed the general Jacobi identity. Ordered
/// (123, 132, 213, 231, 312, 321).
pub fn jacobi_cubes(
    x1: &VectorField,
    x2: &VectorField,
    x3: &VectorField,
) -> [TransformCube; 6] {
    let t1 = x1.transform();
    let t2 = x2.transform();
    let t3 = x3.transform();
    let theta123 = star(&t3, &star(&t2, &t1));
    let theta132 = star(&t2, &star(&t3, &t1)).permute_slots(&[0, 2, 1]);
    let theta213 = star(&t3, &star(&t1, &t2)).permute_slots(&[1, 0, 2]);
    let theta231 = star(&t1, &star(&t3, &t2)).permute_slots(&[1, 2, 0]);
    let theta312 = star(&t2, &star(&t1, &t3)).permute_slots(&[2, 0, 1]);
    let theta321 = star(&t1, &star(&t2, &t3)).permute_slots(&[2, 1, 0]);
    [theta123, theta132, theta213, theta231, theta312, theta321]
}

/// Convenience: the symbolic general Jacobi run on three fields, returning
/// the three bracket-like tangents and their sum.
pub fn jacobi_sum(
    x1: &VectorField,
    x2: &VectorField,
    x3: &VectorField,
) -> Result<crate::microlinear::JacobiOutcome<Poly>, MicroError> {
    let [a, b, c, d, e, f] = jacobi_cubes(x1, x2, x3);
    crate::microlinear::general_jacobi(a.cube(), b.cube(), c.cube(), d.cube(), e.cube(), f.cube())
}
