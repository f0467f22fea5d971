//! Tangent-space arithmetic, strong differences and the general Jacobi
//! identity over `Q^k`.
//!
//! Every operation here is a unique-extension problem against one of the
//! fixture cocones followed by a restriction; no witness is ever stored,
//! since uniqueness makes recomputation a pure function. All operations are
//! generic in the coefficient ring, so the same code paths serve concrete
//! microcubes and cubes whose coordinates are polynomials in state space.

use crate::inftype::{InfMap, InfType};
use crate::poly::{Coeff, Monomial, Poly, Rat};
use crate::quasicolim::{fixture, ApexCocone, CompatibleFamily, Cube, ExtendError, FixtureId};
use crate::weil::WeilElem;
use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};
use thiserror::Error;

pub use crate::quasicolim::Microcube;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MicroError {
    #[error("base points differ")]
    BasePointMismatch,
    #[error("cubes disagree on {0}")]
    FaceMismatch(String),
    #[error("expected a cube over {0}")]
    DomainMismatch(String),
    #[error(transparent)]
    Extend(#[from] ExtendError),
}

/// A tangent vector: a cube over `D`, i.e. base point plus velocity.
#[derive(Debug, Clone, PartialEq)]
pub struct Tangent<S: Coeff> {
    cube: Cube<S>,
}

impl<S: Coeff> Tangent<S> {
    pub fn new(cube: Cube<S>) -> Self {
        assert_eq!(cube.domain(), &InfType::d(), "a tangent is a cube over D");
        Tangent { cube }
    }

    pub fn from_base_velocity(base: Vec<S>, velocity: Vec<S>) -> Self {
        assert_eq!(base.len(), velocity.len());
        let d = InfType::d();
        let comps = base
            .into_iter()
            .zip(velocity)
            .map(|(b, v)| WeilElem::from_coords(Arc::clone(d.algebra()), vec![b, v]))
            .collect();
        Tangent { cube: Cube::new(d, comps) }
    }

    pub fn cube(&self) -> &Cube<S> {
        &self.cube
    }

    pub fn k(&self) -> usize {
        self.cube.k()
    }

    pub fn base(&self) -> Vec<S> {
        self.cube.base()
    }

    pub fn velocity(&self) -> Vec<S> {
        self.cube
            .components()
            .iter()
            .map(|c| c.coords()[1].clone())
            .collect()
    }

    pub fn is_zero_velocity(&self) -> bool {
        self.velocity().iter().all(S::is_zero)
    }

    pub fn zero_at(base: Vec<S>) -> Self {
        let velocity = base.iter().map(S::zero_like).collect();
        Tangent::from_base_velocity(base, velocity)
    }
}

fn l41() -> &'static ApexCocone {
    static C: OnceLock<ApexCocone> = OnceLock::new();
    C.get_or_init(|| fixture(FixtureId::L41))
}

fn l61() -> &'static ApexCocone {
    static C: OnceLock<ApexCocone> = OnceLock::new();
    C.get_or_init(|| fixture(FixtureId::L61))
}

fn l51() -> &'static ApexCocone {
    static C: OnceLock<ApexCocone> = OnceLock::new();
    C.get_or_init(|| fixture(FixtureId::L51))
}

/// Canonical injection of the face `D^n{lists}` into the full cube `D^n`.
pub fn face_injection(n: usize, lists: &[Vec<usize>]) -> InfMap {
    let face = InfType::new(n, lists).expect("face indices in range");
    InfMap::canonical_injection(&face, &InfType::cube(n)).expect("faces inject")
}

/// Whether two cubes over `D^n` agree after restriction to a face.
pub fn agree_on_face<S: Coeff>(a: &Cube<S>, b: &Cube<S>, lists: &[Vec<usize>]) -> bool {
    let f = face_injection(a.domain().arity(), lists);
    a.restrict(&f) == b.restrict(&f)
}

fn face_name(n: usize, lists: &[Vec<usize>]) -> String {
    let mut s = format!("D^{n}{{");
    for (i, l) in lists.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push('(');
        for (j, v) in l.iter().enumerate() {
            if j > 0 {
                s.push(',');
            }
            s.push_str(&v.to_string());
        }
        s.push(')');
    }
    s.push('}');
    s
}

fn require_domain<S: Coeff>(c: &Cube<S>, t: &InfType) -> Result<(), MicroError> {
    if c.domain() != t {
        return Err(MicroError::DomainMismatch(t.to_string()));
    }
    Ok(())
}

/// Sum of two tangents at a common base point: extend over the two-axes
/// gluing and restrict along the diagonal.
pub fn tangent_add<S: Coeff>(t1: &Tangent<S>, t2: &Tangent<S>) -> Result<Tangent<S>, MicroError> {
    if t1.base() != t2.base() {
        return Err(MicroError::BasePointMismatch);
    }
    let c = l41();
    let mut fam = BTreeMap::new();
    fam.insert("pt".to_string(), Cube::constant(InfType::point(), t1.base()));
    fam.insert("t1".to_string(), t1.cube.clone());
    fam.insert("t2".to_string(), t2.cube.clone());
    let family = CompatibleFamily::new(c, fam)?;
    let glued = c.extend(&family)?;
    let diag = InfMap::new(
        InfType::d(),
        InfType::axes(2),
        vec![Poly::var(0, 1), Poly::var(0, 1)],
    )
    .expect("diagonal into the axes is valid");
    Ok(Tangent::new(glued.restrict(&diag)))
}

/// Scalar action: reparametrize the tangent by `d -> alpha d`.
pub fn tangent_scale<S: Coeff>(alpha: &Rat, t: &Tangent<S>) -> Tangent<S> {
    let scaling = InfMap::new(
        InfType::d(),
        InfType::d(),
        vec![Poly::var(0, 1).scale(alpha)],
    )
    .expect("scaling is valid");
    Tangent::new(t.cube.restrict(&scaling))
}

/// Factors a microsquare that is constant on both axes through the
/// multiplication map `(d1, d2) -> d1 d2`: the unique tangent `t` with
/// `t(d1 d2) = psi`.
pub fn factor_through_product<S: Coeff>(psi: &Cube<S>) -> Result<Tangent<S>, MicroError> {
    require_domain(psi, &InfType::cube(2))?;
    let c = l61();
    let origin = InfMap::new(
        InfType::d(),
        InfType::cube(2),
        vec![Poly::zero(1), Poly::zero(1)],
    )
    .expect("origin map is valid");
    let mut fam = BTreeMap::new();
    fam.insert("square".to_string(), psi.clone());
    fam.insert("axis".to_string(), psi.restrict(&origin));
    let family = CompatibleFamily::new(c, fam)?;
    let t = c.extend(&family)?;
    Ok(Tangent::new(t))
}

/// Strong difference of two microsquares agreeing away from the `d1 d2`
/// coefficient: extend over the strong-difference square and evaluate the
/// third direction.
pub fn strong_diff<S: Coeff>(theta1: &Cube<S>, theta2: &Cube<S>) -> Result<Tangent<S>, MicroError> {
    require_domain(theta1, &InfType::cube(2))?;
    require_domain(theta2, &InfType::cube(2))?;
    let shared = [vec![1, 2]];
    if !agree_on_face(theta1, theta2, &shared) {
        return Err(MicroError::FaceMismatch(face_name(2, &shared)));
    }
    let c = l51();
    let p_incl = face_injection(2, &shared);
    let mut fam = BTreeMap::new();
    fam.insert("top".to_string(), theta1.clone());
    fam.insert("bot".to_string(), theta2.clone());
    fam.insert("p".to_string(), theta1.restrict(&p_incl));
    let family = CompatibleFamily::new(c, fam)?;
    let m = c.extend(&family)?;
    let third = InfMap::new(
        InfType::d(),
        c.apex().clone(),
        vec![Poly::zero(1), Poly::zero(1), Poly::var(0, 1)],
    )
    .expect("third axis is valid in the apex");
    Ok(Tangent::new(m.restrict(&third)))
}

/// Splits the last variable of a cube over `D^n`: a cube over `D^(n-1)`
/// with components interleaved as (degree 0, degree 1) in the split
/// variable, per original component.
fn split_last<S: Coeff>(cube: &Cube<S>) -> Cube<S> {
    let n = cube.domain().arity();
    assert!(n >= 1 && cube.domain() == &InfType::cube(n), "only full cubes split");
    let small = InfType::cube(n - 1);
    let small_alg = small.algebra();
    let big_alg = cube.domain().algebra();
    let mut comps = Vec::with_capacity(cube.k() * 2);
    for c in cube.components() {
        for delta in [0u32, 1] {
            let coords: Vec<S> = small_alg
                .basis()
                .iter()
                .map(|b| {
                    let mut exps = b.exps().to_vec();
                    exps.push(delta);
                    let idx = big_alg
                        .basis_index(&Monomial::new(exps))
                        .expect("cube basis is all square-free monomials");
                    c.coords()[idx].clone()
                })
                .collect();
            comps.push(WeilElem::from_coords(Arc::clone(small_alg), coords));
        }
    }
    Cube::new(small, comps)
}

/// Inverse of [`split_last`].
fn unsplit_last<S: Coeff>(cube: &Cube<S>) -> Cube<S> {
    let m = cube.domain().arity();
    assert!(cube.domain() == &InfType::cube(m), "only full cubes unsplit");
    assert!(cube.k().is_multiple_of(2), "components come in (deg 0, deg 1) pairs");
    let big = InfType::cube(m + 1);
    let big_alg = big.algebra();
    let small_alg = cube.domain().algebra();
    let k = cube.k() / 2;
    let mut comps = Vec::with_capacity(k);
    for c in 0..k {
        let coords: Vec<S> = big_alg
            .basis()
            .iter()
            .map(|b| {
                let (head, delta) = b.exps().split_at(m);
                let idx = small_alg
                    .basis_index(&Monomial::new(head.to_vec()))
                    .expect("prefix is a small-cube monomial");
                cube.components()[2 * c + delta[0] as usize].coords()[idx].clone()
            })
            .collect();
        comps.push(WeilElem::from_coords(Arc::clone(big_alg), coords));
    }
    Cube::new(big, comps)
}

/// Fiberwise tangent sum in the first slot (the second coordinate is the
/// fiber parameter). Requires agreement on the `(0, d)` axis.
pub fn plus1<S: Coeff>(theta1: &Cube<S>, theta2: &Cube<S>) -> Result<Cube<S>, MicroError> {
    require_domain(theta1, &InfType::cube(2))?;
    require_domain(theta2, &InfType::cube(2))?;
    let axis = [vec![1]];
    if !agree_on_face(theta1, theta2, &axis) {
        return Err(MicroError::FaceMismatch(format!("{} (the (0,d) axis)", face_name(2, &axis))));
    }
    let f1 = Tangent::new(split_last(theta1));
    let f2 = Tangent::new(split_last(theta2));
    let sum = tangent_add(&f1, &f2)?;
    Ok(unsplit_last(sum.cube()))
}

/// Fiberwise scalar action in the first slot: `theta(alpha d1, d2)`.
pub fn scale1<S: Coeff>(alpha: &Rat, theta: &Cube<S>) -> Cube<S> {
    assert_eq!(theta.domain(), &InfType::cube(2), "a microsquare is expected");
    let f = Tangent::new(split_last(theta));
    let scaled = tangent_scale(alpha, &f);
    unsplit_last(scaled.cube())
}

/// Relative strong difference against the i-th slot (i in 1..=3). The two
/// cubes must agree on the stated face: `D^3{(2,3)}` for i = 1,
/// `D^3{(1,3)}` for i = 2, `D^3{(1,2)}` for i = 3.
pub fn rel_strong_diff<S: Coeff>(
    i: usize,
    theta1: &Cube<S>,
    theta2: &Cube<S>,
) -> Result<Cube<S>, MicroError> {
    require_domain(theta1, &InfType::cube(3))?;
    require_domain(theta2, &InfType::cube(3))?;
    let face: Vec<usize> = match i {
        1 => vec![2, 3],
        2 => vec![1, 3],
        3 => vec![1, 2],
        _ => panic!("slot index must be 1, 2 or 3"),
    };
    let lists = [face.clone()];
    if !agree_on_face(theta1, theta2, &lists) {
        return Err(MicroError::FaceMismatch(face_name(3, &lists)));
    }
    // Rotate the distinguished slot into third position.
    let (a, b) = match i {
        3 => (theta1.clone(), theta2.clone()),
        2 => {
            // psi(a, b, c) = theta(b, c, a)
            let rot = InfMap::new(
                InfType::cube(3),
                InfType::cube(3),
                vec![Poly::var(1, 3), Poly::var(2, 3), Poly::var(0, 3)],
            )
            .expect("rotation is valid");
            (theta1.restrict(&rot), theta2.restrict(&rot))
        }
        1 => {
            // psi(a, b, c) = theta(c, a, b)
            let rot = InfMap::new(
                InfType::cube(3),
                InfType::cube(3),
                vec![Poly::var(2, 3), Poly::var(0, 3), Poly::var(1, 3)],
            )
            .expect("rotation is valid");
            (theta1.restrict(&rot), theta2.restrict(&rot))
        }
        _ => unreachable!(),
    };
    rel3(&a, &b)
}

/// The slot-3 core: curry away `d3`, take the strong difference of the
/// curried squares in the function module, and reassemble with the
/// difference direction in the second slot.
fn rel3<S: Coeff>(theta1: &Cube<S>, theta2: &Cube<S>) -> Result<Cube<S>, MicroError> {
    let c1 = split_last(theta1);
    let c2 = split_last(theta2);
    let sigma = strong_diff(&c1, &c2)?;
    // sigma's component 2c+delta is alpha + beta e; the result square is
    //   phi_c(d1, d2) = alpha_{c,0} + alpha_{c,1} d1
    //                 + beta_{c,0} d2 + beta_{c,1} d1 d2.
    let square = InfType::cube(2);
    let alg = square.algebra();
    let k = sigma.k() / 2;
    let mut comps = Vec::with_capacity(k);
    for c in 0..k {
        let lo = sigma.cube().components()[2 * c].coords();
        let hi = sigma.cube().components()[2 * c + 1].coords();
        let coords: Vec<S> = alg
            .basis()
            .iter()
            .map(|b| match (b.exps()[0], b.exps()[1]) {
                (0, 0) => lo[0].clone(),
                (1, 0) => hi[0].clone(),
                (0, 1) => lo[1].clone(),
                (1, 1) => hi[1].clone(),
                _ => unreachable!("square-free exponents"),
            })
            .collect();
        comps.push(WeilElem::from_coords(Arc::clone(alg), coords));
    }
    Ok(Cube::new(square, comps))
}

/// The three iterated strong differences of the general Jacobi identity and
/// their (vanishing) tangent sum.
#[derive(Debug, Clone)]
pub struct JacobiOutcome<S: Coeff> {
    pub terms: [Tangent<S>; 3],
    pub sum: Tangent<S>,
}

/// Runs the general Jacobi computation on a sextuple of cubes over `D^3`.
/// The six face-agreement hypotheses are checked by the relative strong
/// differences; the six derived agreements are checked here and any failure
/// names the violated hypothesis.
pub fn general_jacobi<S: Coeff>(
    theta123: &Cube<S>,
    theta132: &Cube<S>,
    theta213: &Cube<S>,
    theta231: &Cube<S>,
    theta312: &Cube<S>,
    theta321: &Cube<S>,
) -> Result<JacobiOutcome<S>, MicroError> {
    // Derived pairwise agreements licensing the outer differences.
    let derived = [
        (theta123, theta231, vec![vec![1, 2], vec![1, 3]], "theta123 = theta231 on D^3{(1,2),(1,3)}"),
        (theta132, theta321, vec![vec![1, 2], vec![1, 3]], "theta132 = theta321 on D^3{(1,2),(1,3)}"),
        (theta231, theta312, vec![vec![1, 2], vec![2, 3]], "theta231 = theta312 on D^3{(1,2),(2,3)}"),
        (theta213, theta132, vec![vec![1, 2], vec![2, 3]], "theta213 = theta132 on D^3{(1,2),(2,3)}"),
        (theta312, theta123, vec![vec![1, 3], vec![2, 3]], "theta312 = theta123 on D^3{(1,3),(2,3)}"),
        (theta321, theta213, vec![vec![1, 3], vec![2, 3]], "theta321 = theta213 on D^3{(1,3),(2,3)}"),
    ];
    for (a, b, lists, name) in &derived {
        if !agree_on_face(a, b, lists) {
            return Err(MicroError::FaceMismatch((*name).to_string()));
        }
    }
    let a = rel_strong_diff(1, theta123, theta132)?;
    let b = rel_strong_diff(1, theta231, theta321)?;
    let c = rel_strong_diff(2, theta231, theta213)?;
    let d = rel_strong_diff(2, theta312, theta132)?;
    let e = rel_strong_diff(3, theta312, theta321)?;
    let f = rel_strong_diff(3, theta123, theta213)?;
    let t1 = strong_diff(&a, &b)?;
    let t2 = strong_diff(&c, &d)?;
    let t3 = strong_diff(&e, &f)?;
    let sum = tangent_add(&tangent_add(&t1, &t2)?, &t3)?;
    Ok(JacobiOutcome { terms: [t1, t2, t3], sum })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, rint, rzero};
    use crate::quasicolim::negative_control_l41;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn rand_rat(rng: &mut StdRng) -> Rat {
        rat(rng.gen_range(-9..=9), rng.gen_range(1..=9))
    }

    fn tangent(base: &[i64], vel: &[i64]) -> Tangent<Rat> {
        Tangent::from_base_velocity(
            base.iter().map(|&v| rint(v)).collect(),
            vel.iter().map(|&v| rint(v)).collect(),
        )
    }

    /// x + a d1 + b d2 + e d1d2 per component, from rows (x, a, b, e).
    fn square(rows: &[(Rat, Rat, Rat, Rat)]) -> Microcube {
        let t = InfType::cube(2);
        let comps = rows
            .iter()
            .map(|(x, a, b, e)| {
                // Basis of the square algebra: [1, d2, d1, d1d2].
                WeilElem::from_coords(
                    Arc::clone(t.algebra()),
                    vec![x.clone(), b.clone(), a.clone(), e.clone()],
                )
            })
            .collect();
        Microcube::new(t, comps)
    }

    fn rand_square(rng: &mut StdRng, k: usize) -> Microcube {
        let rows: Vec<(Rat, Rat, Rat, Rat)> = (0..k)
            .map(|_| {
                (
                    rand_rat(rng),
                    rand_rat(rng),
                    rand_rat(rng),
                    rand_rat(rng),
                )
            })
            .collect();
        square(&rows)
    }

    /// A copy of `theta` with fresh d1d2 coefficients (shares all faces).
    fn resample_cross(rng: &mut StdRng, theta: &Microcube) -> Microcube {
        let t = theta.domain().clone();
        let alg = t.algebra();
        let cross = alg
            .basis_index(&Monomial::new(vec![1, 1]))
            .expect("square cross term");
        let comps = theta
            .components()
            .iter()
            .map(|c| {
                let mut coords = c.coords().to_vec();
                coords[cross] = rand_rat(rng);
                WeilElem::from_coords(Arc::clone(alg), coords)
            })
            .collect();
        Microcube::new(t, comps)
    }

    #[test]
    fn tangent_add_velocities() {
        let t1 = tangent(&[4], &[2]);
        let t2 = tangent(&[4], &[5]);
        let sum = tangent_add(&t1, &t2).unwrap();
        assert_eq!(sum.base(), vec![rint(4)]);
        assert_eq!(sum.velocity(), vec![rint(7)]);
    }

    #[test]
    fn tangent_add_zero_identity() {
        let t = tangent(&[1, -2], &[3, 5]);
        let z = Tangent::zero_at(t.base());
        assert_eq!(tangent_add(&t, &z).unwrap(), t);
    }

    #[test]
    fn tangent_add_unit_vectors() {
        let t1 = tangent(&[0, 0], &[1, 0]);
        let t2 = tangent(&[0, 0], &[0, 1]);
        assert_eq!(tangent_add(&t1, &t2).unwrap().velocity(), vec![rint(1), rint(1)]);
    }

    #[test]
    fn tangent_add_base_mismatch() {
        let t1 = tangent(&[0], &[1]);
        let t2 = tangent(&[1], &[1]);
        assert_eq!(tangent_add(&t1, &t2).unwrap_err(), MicroError::BasePointMismatch);
    }

    #[test]
    fn tangent_scale_laws() {
        let t = tangent(&[7], &[3]);
        assert_eq!(tangent_scale(&rint(1), &t), t);
        let z = tangent_scale(&rint(0), &t);
        assert_eq!(z.base(), t.base());
        assert!(z.is_zero_velocity());
        assert_eq!(tangent_scale(&rint(-2), &t).velocity(), vec![rint(-6)]);
    }

    #[test]
    fn factor_cross_coefficient() {
        // psi = x + c d1 d2 factors to velocity c.
        let psi = square(&[(rint(9), rint(0), rint(0), rat(5, 3))]);
        let t = factor_through_product(&psi).unwrap();
        assert_eq!(t.base(), vec![rint(9)]);
        assert_eq!(t.velocity(), vec![rat(5, 3)]);
    }

    #[test]
    fn factor_constant_is_zero_tangent() {
        let psi = square(&[(rint(2), rint(0), rint(0), rint(0))]);
        let t = factor_through_product(&psi).unwrap();
        assert!(t.is_zero_velocity());
    }

    #[test]
    fn factor_rejects_nonconstant_axes() {
        let psi = square(&[(rint(2), rint(1), rint(0), rint(0))]);
        assert!(matches!(
            factor_through_product(&psi).unwrap_err(),
            MicroError::Extend(ExtendError::NotCompatible(_))
        ));
    }

    #[test]
    fn strong_diff_isolates_cross_discrepancy() {
        let theta1 = square(&[(rint(3), rint(1), rint(2), rat(7, 2))]);
        let theta2 = square(&[(rint(3), rint(1), rint(2), rint(1))]);
        let t = strong_diff(&theta1, &theta2).unwrap();
        assert_eq!(t.base(), vec![rint(3)]);
        assert_eq!(t.velocity(), vec![rat(5, 2)]);
    }

    #[test]
    fn strong_diff_reflexive_zero() {
        let theta = square(&[(rint(1), rint(2), rint(3), rint(4))]);
        let t = strong_diff(&theta, &theta).unwrap();
        assert!(t.is_zero_velocity());
    }

    #[test]
    fn strong_diff_requires_shared_face() {
        let theta1 = square(&[(rint(0), rint(1), rint(0), rint(0))]);
        let theta2 = square(&[(rint(0), rint(2), rint(0), rint(0))]);
        assert!(matches!(
            strong_diff(&theta1, &theta2).unwrap_err(),
            MicroError::FaceMismatch(_)
        ));
    }

    fn transpose_square(theta: &Microcube) -> Microcube {
        let swap = InfMap::new(
            InfType::cube(2),
            InfType::cube(2),
            vec![Poly::var(1, 2), Poly::var(0, 2)],
        )
        .unwrap();
        theta.restrict(&swap)
    }

    #[test]
    fn strong_diff_transposition_invariance() {
        // Transposing both arguments leaves the strong difference unchanged.
        let mut rng = StdRng::seed_from_u64(301);
        for _ in 0..50 {
            let theta1 = rand_square(&mut rng, 2);
            let theta2 = resample_cross(&mut rng, &theta1);
            let lhs = strong_diff(&transpose_square(&theta1), &transpose_square(&theta2)).unwrap();
            let rhs = strong_diff(&theta1, &theta2).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn plus1_adds_first_slot() {
        let a = square(&[(rint(1), rint(2), rint(5), rint(3))]);
        let b = square(&[(rint(1), rint(7), rint(5), rint(11))]);
        let sum = plus1(&a, &b).unwrap();
        assert_eq!(sum, square(&[(rint(1), rint(9), rint(5), rint(14))]));
    }

    #[test]
    fn plus1_requires_shared_axis() {
        let a = square(&[(rint(1), rint(0), rint(5), rint(0))]);
        let b = square(&[(rint(1), rint(0), rint(6), rint(0))]);
        assert!(matches!(plus1(&a, &b).unwrap_err(), MicroError::FaceMismatch(_)));
    }

    #[test]
    fn scale1_first_slot() {
        let theta = square(&[(rint(4), rint(3), rint(5), rint(7))]);
        assert_eq!(scale1(&rint(1), &theta), theta);
        let scaled = scale1(&rint(2), &theta);
        assert_eq!(scaled, square(&[(rint(4), rint(6), rint(5), rint(14))]));
    }

    /// Cube over D^3 with the 8 coefficients (1, d1, d2, d3, d12, d13, d23, d123).
    fn cube3(rows: &[[i64; 8]]) -> Microcube {
        let t = InfType::cube(3);
        let alg = t.algebra();
        let comps = rows
            .iter()
            .map(|r| {
                let p = Poly::constant(3, rint(r[0]))
                    .add(&Poly::var(0, 3).scale(&rint(r[1])))
                    .add(&Poly::var(1, 3).scale(&rint(r[2])))
                    .add(&Poly::var(2, 3).scale(&rint(r[3])))
                    .add(&Poly::var(0, 3).mul(&Poly::var(1, 3)).scale(&rint(r[4])))
                    .add(&Poly::var(0, 3).mul(&Poly::var(2, 3)).scale(&rint(r[5])))
                    .add(&Poly::var(1, 3).mul(&Poly::var(2, 3)).scale(&rint(r[6])))
                    .add(
                        &Poly::var(0, 3)
                            .mul(&Poly::var(1, 3))
                            .mul(&Poly::var(2, 3))
                            .scale(&rint(r[7])),
                    );
                crate::weil::reduce(alg, &p)
            })
            .collect();
        Microcube::new(t, comps)
    }

    #[test]
    fn rel3_descends_triple_coefficient() {
        // theta1 = x + c d1 d2 d3, theta2 = x: difference is x + c d1 d2.
        let theta1 = cube3(&[[6, 0, 0, 0, 0, 0, 0, 5]]);
        let theta2 = cube3(&[[6, 0, 0, 0, 0, 0, 0, 0]]);
        let got = rel_strong_diff(3, &theta1, &theta2).unwrap();
        assert_eq!(got, square(&[(rint(6), rint(0), rint(0), rint(5))]));
    }

    #[test]
    fn rel_strong_diff_reflexive_constant() {
        let theta = cube3(&[[2, 1, 1, 1, 1, 1, 1, 1]]);
        for i in 1..=3 {
            let got = rel_strong_diff(i, &theta, &theta).unwrap();
            // Reflexive differences have no cross term; base square survives.
            let cross = got.components()[0]
                .coord(&Monomial::new(vec![1, 1]))
                .cloned()
                .unwrap();
            assert_eq!(cross, rzero());
        }
    }

    #[test]
    fn rel_strong_diff_face_checks() {
        // A d2 d3 discrepancy dies on the (2,3) face and survives elsewhere.
        let theta1 = cube3(&[[0, 0, 0, 0, 0, 0, 3, 0]]);
        let theta2 = cube3(&[[0, 0, 0, 0, 0, 0, 0, 0]]);
        assert!(rel_strong_diff(1, &theta1, &theta2).is_ok());
        assert!(rel_strong_diff(2, &theta1, &theta2).is_err());
        assert!(rel_strong_diff(3, &theta1, &theta2).is_err());
    }

    #[test]
    fn primordial_jacobi_chain() {
        // (t1 - t2) + (t2 - t3) = t1 - t3 and (t1 - t2) + (t2 - t1) = 0.
        let mut rng = StdRng::seed_from_u64(307);
        for _ in 0..50 {
            let theta1 = rand_square(&mut rng, 2);
            let theta2 = resample_cross(&mut rng, &theta1);
            let theta3 = resample_cross(&mut rng, &theta1);
            let d12 = strong_diff(&theta1, &theta2).unwrap();
            let d23 = strong_diff(&theta2, &theta3).unwrap();
            let d13 = strong_diff(&theta1, &theta3).unwrap();
            assert_eq!(tangent_add(&d12, &d23).unwrap(), d13);
            let d21 = strong_diff(&theta2, &theta1).unwrap();
            assert!(tangent_add(&d12, &d21).unwrap().is_zero_velocity());
        }
    }

    #[test]
    fn jacobi_on_equal_sextuple_is_zero() {
        let theta = cube3(&[[1, 2, 3, 4, 5, 6, 7, 8], [0, 1, 0, 1, 0, 1, 0, 1]]);
        let out = general_jacobi(&theta, &theta, &theta, &theta, &theta, &theta).unwrap();
        for t in &out.terms {
            assert!(t.is_zero_velocity());
        }
        assert!(out.sum.is_zero_velocity());
    }

    #[test]
    fn jacobi_zero_sum_for_limit_sextuples() {
        // Any compatible sextuple comes from a cube over the 8-variable
        // apex; the three iterated differences must sum to zero.
        let mut rng = StdRng::seed_from_u64(311);
        let c = fixture(FixtureId::L55);
        for _ in 0..5 {
            let k_cube = {
                let dim = c.apex().dim();
                let comps = (0..2)
                    .map(|_| {
                        WeilElem::from_coords(
                            Arc::clone(c.apex().algebra()),
                            (0..dim).map(|_| rand_rat(&mut rng)).collect(),
                        )
                    })
                    .collect();
                Microcube::new(c.apex().clone(), comps)
            };
            let th = |name: &str| k_cube.restrict(&c.legs()[name]);
            let out = general_jacobi(
                &th("h123"),
                &th("h132"),
                &th("h213"),
                &th("h231"),
                &th("h312"),
                &th("h321"),
            )
            .unwrap();
            assert!(out.sum.is_zero_velocity());

            // Cross-check the first iterated difference against the closed
            // form read off the glued cube: directions (d1,0,0,-d2,0,0,0,0).
            let z = Poly::zero(2);
            let first_map = InfMap::new(
                InfType::cube(2),
                c.apex().clone(),
                vec![
                    Poly::var(0, 2),
                    z.clone(),
                    z.clone(),
                    Poly::var(1, 2).neg(),
                    z.clone(),
                    z.clone(),
                    z.clone(),
                    z.clone(),
                ],
            )
            .unwrap();
            let expect_a = k_cube.restrict(&first_map);
            let got_a = rel_strong_diff(1, &th("h123"), &th("h132")).unwrap();
            assert_eq!(got_a, expect_a);

            // And the first outer difference: direction d8.
            let zd = Poly::zero(1);
            let outer_map = InfMap::new(
                InfType::d(),
                c.apex().clone(),
                vec![
                    zd.clone(),
                    zd.clone(),
                    zd.clone(),
                    zd.clone(),
                    zd.clone(),
                    zd.clone(),
                    zd.clone(),
                    Poly::var(0, 1),
                ],
            )
            .unwrap();
            let expect_t1 = Tangent::new(k_cube.restrict(&outer_map));
            let b = rel_strong_diff(1, &th("h231"), &th("h321")).unwrap();
            assert_eq!(strong_diff(&got_a, &b).unwrap(), expect_t1);
        }
    }

    #[test]
    fn module_laws_random() {
        let mut rng = StdRng::seed_from_u64(313);
        for _ in 0..50 {
            let base: Vec<Rat> = (0..3).map(|_| rand_rat(&mut rng)).collect();
            let v = |rng: &mut StdRng| {
                Tangent::from_base_velocity(
                    base.clone(),
                    (0..3).map(|_| rand_rat(rng)).collect(),
                )
            };
            let (t1, t2, t3) = (v(&mut rng), v(&mut rng), v(&mut rng));
            let alpha = rand_rat(&mut rng);
            let beta = rand_rat(&mut rng);
            let add = |a: &Tangent<Rat>, b: &Tangent<Rat>| tangent_add(a, b).unwrap();
            assert_eq!(add(&add(&t1, &t2), &t3), add(&t1, &add(&t2, &t3)));
            assert_eq!(add(&t1, &t2), add(&t2, &t1));
            assert_eq!(tangent_scale(&rint(1), &t1), t1);
            assert_eq!(
                tangent_scale(&(&alpha + &beta), &t1),
                add(&tangent_scale(&alpha, &t1), &tangent_scale(&beta, &t1))
            );
            assert_eq!(
                tangent_scale(&alpha, &add(&t1, &t2)),
                add(&tangent_scale(&alpha, &t1), &tangent_scale(&alpha, &t2))
            );
            assert_eq!(
                tangent_scale(&(&alpha * &beta), &t1),
                tangent_scale(&alpha, &tangent_scale(&beta, &t1))
            );
        }
    }

    #[test]
    fn euclidean_factorization_random() {
        let mut rng = StdRng::seed_from_u64(317);
        for _ in 0..50 {
            let rows: Vec<(Rat, Rat, Rat, Rat)> = (0..3)
                .map(|_| (rand_rat(&mut rng), rzero(), rzero(), rand_rat(&mut rng)))
                .collect();
            let psi = square(&rows);
            let t = factor_through_product(&psi).unwrap();
            for (i, row) in rows.iter().enumerate() {
                assert_eq!(t.velocity()[i], row.3);
            }
            // t composed with the multiplication map recovers psi.
            let mult = InfMap::new(
                InfType::cube(2),
                InfType::d(),
                vec![Poly::var(0, 2).mul(&Poly::var(1, 2))],
            )
            .unwrap();
            assert_eq!(t.cube().restrict(&mult), psi);
        }
    }

    #[test]
    fn additivity_of_strong_diff_over_plus1() {
        let mut rng = StdRng::seed_from_u64(331);
        for _ in 0..50 {
            // theta11/theta21 share all non-cross data; theta12/theta22 too;
            // the pairs share the (0,d) axis.
            let theta11 = rand_square(&mut rng, 2);
            let theta21 = resample_cross(&mut rng, &theta11);
            let theta12 = {
                // Same (0,d) axis as theta11: keep 1 and d2 coefficients.
                let t = InfType::cube(2);
                let alg = t.algebra();
                let comps = theta11
                    .components()
                    .iter()
                    .map(|c| {
                        let mut coords = c.coords().to_vec();
                        let d1 = alg.basis_index(&Monomial::new(vec![1, 0])).unwrap();
                        let cross = alg.basis_index(&Monomial::new(vec![1, 1])).unwrap();
                        coords[d1] = rand_rat(&mut rng);
                        coords[cross] = rand_rat(&mut rng);
                        WeilElem::from_coords(Arc::clone(alg), coords)
                    })
                    .collect();
                Microcube::new(t, comps)
            };
            let theta22 = resample_cross(&mut rng, &theta12);
            let lhs = strong_diff(
                &plus1(&theta11, &theta12).unwrap(),
                &plus1(&theta21, &theta22).unwrap(),
            )
            .unwrap();
            let rhs = tangent_add(
                &strong_diff(&theta11, &theta21).unwrap(),
                &strong_diff(&theta12, &theta22).unwrap(),
            )
            .unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn scalar_law_of_strong_diff() {
        let mut rng = StdRng::seed_from_u64(337);
        for _ in 0..50 {
            let theta1 = rand_square(&mut rng, 2);
            let theta2 = resample_cross(&mut rng, &theta1);
            let alpha = rand_rat(&mut rng);
            let lhs = strong_diff(&scale1(&alpha, &theta1), &scale1(&alpha, &theta2)).unwrap();
            let rhs = tangent_scale(&alpha, &strong_diff(&theta1, &theta2).unwrap());
            assert_eq!(lhs, rhs);
        }
    }

    /// The three-tangent gluing realizes iterated addition: restricting the
    /// triple extension along the full diagonal gives (t1 + t2) + t3.
    #[test]
    fn triple_gluing_realizes_iterated_sum() {
        let mut rng = StdRng::seed_from_u64(347);
        let c = fixture(FixtureId::L42);
        for _ in 0..10 {
            let base: Vec<Rat> = (0..2).map(|_| rand_rat(&mut rng)).collect();
            let mk = |rng: &mut StdRng| {
                Tangent::from_base_velocity(
                    base.clone(),
                    (0..2).map(|_| rand_rat(rng)).collect(),
                )
            };
            let (t1, t2, t3) = (mk(&mut rng), mk(&mut rng), mk(&mut rng));
            let mut fam = BTreeMap::new();
            fam.insert("pt".to_string(), Cube::constant(InfType::point(), base.clone()));
            fam.insert("t1".to_string(), t1.cube().clone());
            fam.insert("t2".to_string(), t2.cube().clone());
            fam.insert("t3".to_string(), t3.cube().clone());
            let family = CompatibleFamily::new(&c, fam).unwrap();
            let glued = c.extend(&family).unwrap();
            let diag = InfMap::new(
                InfType::d(),
                c.apex().clone(),
                vec![Poly::var(0, 1), Poly::var(0, 1), Poly::var(0, 1)],
            )
            .unwrap();
            let via_gluing = Tangent::new(glued.restrict(&diag));
            let iterated =
                tangent_add(&tangent_add(&t1, &t2).unwrap(), &t3).unwrap();
            assert_eq!(via_gluing, iterated);
        }
    }

    /// The four-square gluing realizes the additivity law: the difference
    /// of fiber sums is the (d4 = d5 = d)-direction of the glued cube.
    #[test]
    fn four_square_gluing_realizes_additivity() {
        let mut rng = StdRng::seed_from_u64(349);
        let c = fixture(FixtureId::L52);
        for _ in 0..10 {
            let theta11 = rand_square(&mut rng, 2);
            let theta21 = resample_cross(&mut rng, &theta11);
            let theta12 = {
                let t = InfType::cube(2);
                let alg = t.algebra();
                let d1 = alg.basis_index(&Monomial::new(vec![1, 0])).unwrap();
                let cross = alg.basis_index(&Monomial::new(vec![1, 1])).unwrap();
                let comps = theta11
                    .components()
                    .iter()
                    .map(|cc| {
                        let mut coords = cc.coords().to_vec();
                        coords[d1] = rand_rat(&mut rng);
                        coords[cross] = rand_rat(&mut rng);
                        WeilElem::from_coords(Arc::clone(alg), coords)
                    })
                    .collect();
                Microcube::new(t, comps)
            };
            let theta22 = resample_cross(&mut rng, &theta12);

            let shared = face_injection(2, &[vec![1, 2]]);
            let axis = InfMap::new(
                InfType::d(),
                InfType::cube(2),
                vec![Poly::zero(1), Poly::var(0, 1)],
            )
            .unwrap();
            let mut fam = BTreeMap::new();
            fam.insert("l11".to_string(), theta11.clone());
            fam.insert("l21".to_string(), theta21.clone());
            fam.insert("l12".to_string(), theta12.clone());
            fam.insert("l22".to_string(), theta22.clone());
            fam.insert("p1".to_string(), theta11.restrict(&shared));
            fam.insert("p2".to_string(), theta12.restrict(&shared));
            fam.insert("q1".to_string(), theta11.restrict(&axis));
            fam.insert("q2".to_string(), theta21.restrict(&axis));
            let family = CompatibleFamily::new(&c, fam).unwrap();
            let glued = c.extend(&family).unwrap();

            let z = Poly::zero(1);
            let d45 = InfMap::new(
                InfType::d(),
                c.apex().clone(),
                vec![z.clone(), z.clone(), z.clone(), Poly::var(0, 1), Poly::var(0, 1)],
            )
            .unwrap();
            let expect = Tangent::new(glued.restrict(&d45));
            let lhs = strong_diff(
                &plus1(&theta11, &theta12).unwrap(),
                &plus1(&theta21, &theta22).unwrap(),
            )
            .unwrap();
            assert_eq!(lhs, expect);
            let rhs = tangent_add(
                &strong_diff(&theta11, &theta21).unwrap(),
                &strong_diff(&theta12, &theta22).unwrap(),
            )
            .unwrap();
            assert_eq!(rhs, expect);
        }
    }

    /// The three-square gluing realizes the primordial chain: differences
    /// against the shared corner read off single directions of the glued
    /// cube.
    #[test]
    fn three_square_gluing_realizes_chain() {
        let mut rng = StdRng::seed_from_u64(353);
        let c = fixture(FixtureId::L53);
        for _ in 0..10 {
            let theta1 = rand_square(&mut rng, 2);
            let theta2 = resample_cross(&mut rng, &theta1);
            let theta3 = resample_cross(&mut rng, &theta1);
            let shared = face_injection(2, &[vec![1, 2]]);
            let mut fam = BTreeMap::new();
            fam.insert("top".to_string(), theta1.clone());
            fam.insert("mid".to_string(), theta2.clone());
            fam.insert("low".to_string(), theta3.clone());
            fam.insert("p".to_string(), theta1.restrict(&shared));
            let family = CompatibleFamily::new(&c, fam).unwrap();
            let glued = c.extend(&family).unwrap();

            let z = Poly::zero(1);
            let dir = |coords: Vec<Poly>| {
                Tangent::new(
                    glued.restrict(
                        &InfMap::new(InfType::d(), c.apex().clone(), coords).unwrap(),
                    ),
                )
            };
            // theta1 - theta2 sits in the d4 direction, theta2 - theta3 in
            // d3, theta1 - theta3 along d3 = d4 = d.
            let d = Poly::var(0, 1);
            assert_eq!(
                strong_diff(&theta1, &theta2).unwrap(),
                dir(vec![z.clone(), z.clone(), z.clone(), d.clone()])
            );
            assert_eq!(
                strong_diff(&theta2, &theta3).unwrap(),
                dir(vec![z.clone(), z.clone(), d.clone(), z.clone()])
            );
            assert_eq!(
                strong_diff(&theta1, &theta3).unwrap(),
                dir(vec![z.clone(), z.clone(), d.clone(), d.clone()])
            );
        }
    }

    #[test]
    fn extend_not_unique_reported_through_micro_ops() {
        // Sanity: the negative-control cocone refuses extension.
        let c = negative_control_l41();
        let x = vec![rint(0)];
        let fam: BTreeMap<String, Microcube> = c
            .diagram()
            .objects()
            .iter()
            .map(|(n, t)| (n.clone(), Microcube::constant(t.clone(), x.clone())))
            .collect();
        let family = CompatibleFamily::new(&c, fam).unwrap();
        assert!(matches!(c.extend(&family), Err(ExtendError::NotUnique { .. })));
    }
}
