//! Finite diagrams of infinitesimal types, the quasi-colimit verdict, and
//! the unique-extension solver.
//!
//! A cocone is a quasi-colimit exactly when the dual diagram of function
//! algebras is a limit. Concretely: the compatible families form the null
//! space of a rational matrix, the apex algebra maps into that space through
//! the dualized legs, and the verdict compares three dimensions. The same
//! stacked leg matrix, factored once per cocone, solves every unique
//! extension problem afterwards; right-hand sides may have entries in any
//! rational module, which is what makes strong differences with polynomial
//! state coefficients cheap.

use crate::inftype::{InfMap, InfType};
use crate::linalg::{QMatrix, SolveError, SolveOperator};
use crate::poly::{rzero, Coeff, Poly, Rat};
use crate::weil::{same_algebra, WeilElem};
use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagramError {
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("arrow `{arrow}` does not match its endpoints")]
    ArrowTypeMismatch { arrow: String },
    #[error("leg for `{object}` does not go from that object to the apex")]
    LegTypeMismatch { object: String },
    #[error("object `{object}` has no leg")]
    MissingLeg { object: String },
    #[error("cocone does not commute along arrow `{arrow}`")]
    CommutativityViolation { arrow: String },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExtendError {
    #[error("malformed family: {0}")]
    Family(String),
    #[error("family is not compatible: {0}")]
    NotCompatible(String),
    #[error("extension is not unique: legs are not jointly epi (kernel dimension {gap})")]
    NotUnique { gap: usize },
}

/// A named arrow of a diagram.
#[derive(Debug, Clone)]
pub struct Arrow {
    pub name: String,
    pub src: String,
    pub dst: String,
    pub map: InfMap,
}

/// A finite diagram of infinitesimal types.
#[derive(Debug, Clone, Default)]
pub struct Diagram {
    objects: BTreeMap<String, InfType>,
    arrows: Vec<Arrow>,
}

impl Diagram {
    pub fn new() -> Self {
        Diagram::default()
    }

    pub fn add_object(&mut self, name: &str, t: InfType) -> Result<(), DiagramError> {
        if self.objects.contains_key(name) {
            return Err(DiagramError::DuplicateName(name.to_string()));
        }
        self.objects.insert(name.to_string(), t);
        Ok(())
    }

    pub fn add_arrow(&mut self, name: &str, src: &str, dst: &str, map: InfMap) -> Result<(), DiagramError> {
        if self.arrows.iter().any(|a| a.name == name) {
            return Err(DiagramError::DuplicateName(name.to_string()));
        }
        let s = self
            .objects
            .get(src)
            .ok_or_else(|| DiagramError::UnknownObject(src.to_string()))?;
        let d = self
            .objects
            .get(dst)
            .ok_or_else(|| DiagramError::UnknownObject(dst.to_string()))?;
        if map.source() != s || map.target() != d {
            return Err(DiagramError::ArrowTypeMismatch { arrow: name.to_string() });
        }
        self.arrows.push(Arrow {
            name: name.to_string(),
            src: src.to_string(),
            dst: dst.to_string(),
            map,
        });
        Ok(())
    }

    pub fn objects(&self) -> &BTreeMap<String, InfType> {
        &self.objects
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }
}

/// Quasi-colimit verdict. The cocone is a quasi-colimit iff the apex,
/// limit and image dimensions agree.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub is_quasi_colimit: bool,
    pub apex_dim: usize,
    pub limit_dim: usize,
    pub image_dim: usize,
    pub failure: Option<Failure>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    /// The canonical map has a kernel of the given dimension.
    NotInjective { gap: usize },
    /// The image misses the limit by the given dimension.
    NotSurjective { gap: usize },
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "apex {} / limit {} / image {}: {}",
            self.apex_dim,
            self.limit_dim,
            self.image_dim,
            match &self.failure {
                None => "quasi-colimit".to_string(),
                Some(Failure::NotInjective { gap }) => format!("not-injective (gap {gap})"),
                Some(Failure::NotSurjective { gap }) => format!("not-surjective (gap {gap})"),
            }
        )
    }
}

/// A map `D^n{p} -> Q^k` (or, with polynomial coefficients, a family of such
/// maps over state space), stored as `k` elements of the domain's algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct Cube<S: Coeff> {
    domain: InfType,
    components: Vec<WeilElem<S>>,
}

/// The concrete microcube: rational coordinates.
pub type Microcube = Cube<Rat>;

impl<S: Coeff> Cube<S> {
    pub fn new(domain: InfType, components: Vec<WeilElem<S>>) -> Self {
        for c in &components {
            assert!(
                same_algebra(c.algebra(), domain.algebra()),
                "component not in the domain algebra"
            );
        }
        Cube { domain, components }
    }

    /// The constant cube at a point.
    pub fn constant(domain: InfType, values: Vec<S>) -> Self {
        let components = values
            .into_iter()
            .map(|v| WeilElem::one_in(domain.algebra(), v))
            .collect();
        Cube { domain, components }
    }

    pub fn domain(&self) -> &InfType {
        &self.domain
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[WeilElem<S>] {
        &self.components
    }

    /// The value at the origin: unit coefficients of each component.
    pub fn base(&self) -> Vec<S> {
        self.components.iter().map(|c| c.unit_coeff().clone()).collect()
    }

    /// Precomposition with a map into the domain: `self . f`, computed by the
    /// dual homomorphism.
    pub fn restrict(&self, f: &InfMap) -> Cube<S> {
        assert_eq!(
            f.target(),
            &self.domain,
            "restriction map does not land in the cube's domain"
        );
        let h = f.dualize();
        Cube {
            domain: f.source().clone(),
            components: self.components.iter().map(|c| h.apply(c)).collect(),
        }
    }
}

impl Microcube {
    /// Builds a microcube from component polynomials in the d-variables.
    pub fn from_polys(domain: InfType, polys: &[Poly]) -> Self {
        let alg = domain.algebra();
        let components = polys.iter().map(|p| crate::weil::reduce(alg, p)).collect();
        Cube { domain, components }
    }
}

/// A diagram with a candidate apex and one leg per object.
#[derive(Debug)]
pub struct ApexCocone {
    diagram: Diagram,
    apex: InfType,
    legs: BTreeMap<String, InfMap>,
    solver: OnceLock<Result<SolveOperator, SolveError>>,
}

impl ApexCocone {
    pub fn new(
        diagram: Diagram,
        apex: InfType,
        legs: BTreeMap<String, InfMap>,
    ) -> Result<Self, DiagramError> {
        for (name, t) in diagram.objects() {
            let leg = legs
                .get(name)
                .ok_or_else(|| DiagramError::MissingLeg { object: name.clone() })?;
            if leg.source() != t || leg.target() != &apex {
                return Err(DiagramError::LegTypeMismatch { object: name.clone() });
            }
        }
        for name in legs.keys() {
            if !diagram.objects().contains_key(name) {
                return Err(DiagramError::UnknownObject(name.clone()));
            }
        }
        Ok(ApexCocone { diagram, apex, legs, solver: OnceLock::new() })
    }

    pub fn diagram(&self) -> &Diagram {
        &self.diagram
    }

    pub fn apex(&self) -> &InfType {
        &self.apex
    }

    pub fn legs(&self) -> &BTreeMap<String, InfMap> {
        &self.legs
    }

    pub fn leg(&self, object: &str) -> Option<&InfMap> {
        self.legs.get(object)
    }

    /// Checks that every diagram arrow commutes with the legs.
    pub fn check_commutativity(&self) -> Result<(), DiagramError> {
        for a in self.diagram.arrows() {
            let via = self.legs[&a.dst]
                .compose(&a.map)
                .expect("arrow endpoints were validated");
            if via != self.legs[&a.src] {
                return Err(DiagramError::CommutativityViolation { arrow: a.name.clone() });
            }
        }
        Ok(())
    }

    /// Object names in stacking order with coordinate offsets.
    fn stacking(&self) -> (Vec<&String>, Vec<usize>, usize) {
        let names: Vec<&String> = self.diagram.objects().keys().collect();
        let mut offsets = Vec::with_capacity(names.len());
        let mut total = 0;
        for n in &names {
            offsets.push(total);
            total += self.diagram.objects()[*n].dim();
        }
        (names, offsets, total)
    }

    /// The compatibility matrix whose null space is the limit of the dual
    /// diagram: one block row per arrow `a: o -> o'`, expressing
    /// `w_o = dual(a)(w_o')`.
    pub fn compatibility_matrix(&self) -> QMatrix {
        let (names, offsets, total) = self.stacking();
        let index: BTreeMap<&String, usize> =
            names.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let mut rows: Vec<Vec<Rat>> = Vec::new();
        for a in self.diagram.arrows() {
            let m = a.map.dualize().matrix();
            let src_dim = self.diagram.objects()[&a.src].dim();
            let src_off = offsets[index[&a.src]];
            let dst_off = offsets[index[&a.dst]];
            for r in 0..src_dim {
                let mut row = vec![rzero(); total];
                row[src_off + r] = crate::poly::rone();
                for c in 0..m.cols {
                    row[dst_off + c] = &row[dst_off + c] - &m[(r, c)];
                }
                rows.push(row);
            }
        }
        if rows.is_empty() {
            QMatrix::zero(0, total)
        } else {
            QMatrix::from_rows(rows)
        }
    }

    /// The stacked matrix of all dualized legs: `W(apex) -> prod W(o)`.
    pub fn legs_matrix(&self) -> QMatrix {
        let (names, _, total) = self.stacking();
        let apex_dim = self.apex.dim();
        let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(total);
        for n in names {
            let m = self.legs[n].dualize().matrix();
            for r in 0..m.rows {
                let mut row = Vec::with_capacity(apex_dim);
                for c in 0..apex_dim {
                    row.push(m[(r, c)].clone());
                }
                rows.push(row);
            }
        }
        QMatrix::from_rows(rows)
    }

    fn solver(&self) -> &Result<SolveOperator, SolveError> {
        self.solver
            .get_or_init(|| SolveOperator::new(&self.legs_matrix()))
    }

    /// Decides the quasi-colimit property by exact linear algebra.
    pub fn check_quasi_colimit(&self) -> Result<Verdict, DiagramError> {
        self.check_commutativity()?;
        let apex_dim = self.apex.dim();
        let compat = self.compatibility_matrix();
        let limit_dim = compat.cols - compat.rank();
        let image_dim = self.legs_matrix().rank();
        let failure = if image_dim < apex_dim {
            Some(Failure::NotInjective { gap: apex_dim - image_dim })
        } else if image_dim < limit_dim {
            Some(Failure::NotSurjective { gap: limit_dim - image_dim })
        } else {
            None
        };
        Ok(Verdict {
            is_quasi_colimit: failure.is_none(),
            apex_dim,
            limit_dim,
            image_dim,
            failure,
        })
    }

    /// Restricts an apex cube along every leg, yielding a compatible family.
    pub fn restrict_along_legs<S: Coeff>(&self, cube: &Cube<S>) -> BTreeMap<String, Cube<S>> {
        assert_eq!(cube.domain(), &self.apex, "cube is not over the apex");
        self.legs
            .iter()
            .map(|(name, leg)| (name.clone(), cube.restrict(leg)))
            .collect()
    }

    /// Solves the unique-extension problem for a compatible family: the
    /// apex cube restricting to every family member along its leg.
    pub fn extend<S: Coeff>(&self, family: &CompatibleFamily<S>) -> Result<Cube<S>, ExtendError> {
        let (names, _, total) = self.stacking();
        let op = match self.solver() {
            Ok(op) => op,
            Err(SolveError::Underdetermined { gap }) => {
                return Err(ExtendError::NotUnique { gap: *gap })
            }
            Err(SolveError::Inconsistent { .. }) => unreachable!("factoring cannot be inconsistent"),
        };
        let k = family.k;
        let apex_alg = self.apex.algebra();
        let mut components = Vec::with_capacity(k);
        for comp in 0..k {
            let mut rhs: Vec<S> = Vec::with_capacity(total);
            for n in &names {
                let cube = &family.assignment[*n];
                rhs.extend(cube.components()[comp].coords().iter().cloned());
            }
            match op.apply(&rhs) {
                Ok(coords) => components.push(WeilElem::from_coords(Arc::clone(apex_alg), coords)),
                Err(SolveError::Inconsistent { .. }) => {
                    return Err(ExtendError::NotCompatible(format!(
                        "component {comp} violates a hidden relation of the diagram"
                    )))
                }
                Err(SolveError::Underdetermined { gap }) => {
                    return Err(ExtendError::NotUnique { gap })
                }
            }
        }
        Ok(Cube::new(self.apex.clone(), components))
    }
}

/// A family of cubes over the diagram objects, checked compatible along every
/// arrow before any solving happens (so failures carry the arrow's name).
#[derive(Debug)]
pub struct CompatibleFamily<'a, S: Coeff> {
    pub cocone: &'a ApexCocone,
    assignment: BTreeMap<String, Cube<S>>,
    k: usize,
}

impl<'a, S: Coeff> CompatibleFamily<'a, S> {
    pub fn new(
        cocone: &'a ApexCocone,
        assignment: BTreeMap<String, Cube<S>>,
    ) -> Result<Self, ExtendError> {
        let mut k: Option<usize> = None;
        for (name, t) in cocone.diagram().objects() {
            let cube = assignment
                .get(name)
                .ok_or_else(|| ExtendError::Family(format!("no member for object `{name}`")))?;
            if cube.domain() != t {
                return Err(ExtendError::Family(format!(
                    "member for `{name}` has domain {}, expected {}",
                    cube.domain(),
                    t
                )));
            }
            match k {
                None => k = Some(cube.k()),
                Some(k0) if k0 != cube.k() => {
                    return Err(ExtendError::Family(
                        "members have mixed codomain dimensions".to_string(),
                    ))
                }
                _ => {}
            }
        }
        let k = k.unwrap_or(0);
        // Eager compatibility: restriction along each arrow must reproduce
        // the member on the arrow's source.
        for a in cocone.diagram().arrows() {
            let restricted = assignment[&a.dst].restrict(&a.map);
            if restricted != assignment[&a.src] {
                return Err(ExtendError::NotCompatible(format!("along arrow `{}`", a.name)));
            }
        }
        Ok(CompatibleFamily { cocone, assignment, k })
    }

    pub fn member(&self, object: &str) -> Option<&Cube<S>> {
        self.assignment.get(object)
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

/// Fixture catalog: the quasi-colimit diagrams the verification suite
/// machine-checks, by their catalog id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixtureId {
    /// Two tangent directions glued into the axes `D(2)`.
    L41,
    /// Three tangent directions glued into `D(3)`.
    L42,
    /// The multiplication map `D x D -> D` coequalizing the axes.
    L61,
    /// The strong-difference square over `D^3{(1,3),(2,3)}`.
    L51,
    /// The four-square diagram over the 5-variable nest.
    L52,
    /// Three squares sharing a corner over the 4-variable nest.
    L53,
    /// The block-vanishing square, parametrized.
    L54 { n: usize, m1: usize, m2: usize },
    /// The six-cube diagram over `D^8` behind the Jacobi identity.
    L55,
}

impl FixtureId {
    pub fn parse(s: &str) -> Option<FixtureId> {
        match s {
            "l4.1" => Some(FixtureId::L41),
            "l4.2" => Some(FixtureId::L42),
            "l6.1" => Some(FixtureId::L61),
            "l5.1" | "l5.l" => Some(FixtureId::L51),
            "l5.2" => Some(FixtureId::L52),
            "l5.3" => Some(FixtureId::L53),
            "l5.5" => Some(FixtureId::L55),
            _ => {
                let rest = s.strip_prefix("l5.4(")?.strip_suffix(')')?;
                let parts: Vec<&str> = rest.split(',').collect();
                if parts.len() != 3 {
                    return None;
                }
                let n = parts[0].trim().parse().ok()?;
                let m1 = parts[1].trim().parse().ok()?;
                let m2 = parts[2].trim().parse().ok()?;
                if m1 == 0 || m2 == 0 {
                    return None;
                }
                Some(FixtureId::L54 { n, m1, m2 })
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            FixtureId::L41 => "l4.1".into(),
            FixtureId::L42 => "l4.2".into(),
            FixtureId::L61 => "l6.1".into(),
            FixtureId::L51 => "l5.1".into(),
            FixtureId::L52 => "l5.2".into(),
            FixtureId::L53 => "l5.3".into(),
            FixtureId::L54 { n, m1, m2 } => format!("l5.4({n},{m1},{m2})"),
            FixtureId::L55 => "l5.5".into(),
        }
    }
}

fn dvar(i: usize, arity: usize) -> Poly {
    Poly::var(i, arity)
}

fn pzero(arity: usize) -> Poly {
    Poly::zero(arity)
}

fn map(src: &InfType, dst: &InfType, coords: Vec<Poly>) -> InfMap {
    InfMap::new(src.clone(), dst.clone(), coords).expect("fixture map is valid")
}

/// Builds the cocone for a fixture id.
pub fn fixture(id: FixtureId) -> ApexCocone {
    match id {
        FixtureId::L41 => {
            let pt = InfType::point();
            let d = InfType::d();
            let apex = InfType::axes(2);
            let mut diag = Diagram::new();
            diag.add_object("pt", pt.clone()).unwrap();
            diag.add_object("t1", d.clone()).unwrap();
            diag.add_object("t2", d.clone()).unwrap();
            diag.add_arrow("pt_t1", "pt", "t1", map(&pt, &d, vec![pzero(0)])).unwrap();
            diag.add_arrow("pt_t2", "pt", "t2", map(&pt, &d, vec![pzero(0)])).unwrap();
            let mut legs = BTreeMap::new();
            legs.insert("pt".into(), map(&pt, &apex, vec![pzero(0), pzero(0)]));
            legs.insert("t1".into(), map(&d, &apex, vec![dvar(0, 1), pzero(1)]));
            legs.insert("t2".into(), map(&d, &apex, vec![pzero(1), dvar(0, 1)]));
            ApexCocone::new(diag, apex, legs).unwrap()
        }
        FixtureId::L42 => {
            let pt = InfType::point();
            let d = InfType::d();
            let apex = InfType::axes(3);
            let mut diag = Diagram::new();
            diag.add_object("pt", pt.clone()).unwrap();
            for t in ["t1", "t2", "t3"] {
                diag.add_object(t, d.clone()).unwrap();
            }
            for t in ["t1", "t2", "t3"] {
                diag.add_arrow(&format!("pt_{t}"), "pt", t, map(&pt, &d, vec![pzero(0)]))
                    .unwrap();
            }
            let mut legs = BTreeMap::new();
            legs.insert("pt".into(), map(&pt, &apex, vec![pzero(0); 3]));
            for (i, t) in ["t1", "t2", "t3"].iter().enumerate() {
                let mut coords = vec![pzero(1); 3];
                coords[i] = dvar(0, 1);
                legs.insert(t.to_string(), map(&d, &apex, coords));
            }
            ApexCocone::new(diag, apex, legs).unwrap()
        }
        FixtureId::L61 => {
            let d = InfType::d();
            let square = InfType::cube(2);
            let apex = InfType::d();
            let mut diag = Diagram::new();
            diag.add_object("axis", d.clone()).unwrap();
            diag.add_object("square", square.clone()).unwrap();
            diag.add_arrow("ax_d0", "axis", "square", map(&d, &square, vec![dvar(0, 1), pzero(1)]))
                .unwrap();
            diag.add_arrow("ax_0d", "axis", "square", map(&d, &square, vec![pzero(1), dvar(0, 1)]))
                .unwrap();
            diag.add_arrow("ax_00", "axis", "square", map(&d, &square, vec![pzero(1), pzero(1)]))
                .unwrap();
            let mut legs = BTreeMap::new();
            legs.insert(
                "square".into(),
                map(&square, &apex, vec![dvar(0, 2).mul(&dvar(1, 2))]),
            );
            legs.insert("axis".into(), map(&d, &apex, vec![pzero(1)]));
            ApexCocone::new(diag, apex, legs).unwrap()
        }
        FixtureId::L51 => {
            let p = InfType::axes(2);
            let square = InfType::cube(2);
            let apex = InfType::new(3, &[vec![1, 3], vec![2, 3]]).unwrap();
            let mut diag = Diagram::new();
            diag.add_object("p", p.clone()).unwrap();
            diag.add_object("top", square.clone()).unwrap();
            diag.add_object("bot", square.clone()).unwrap();
            let incl = || map(&p, &square, vec![dvar(0, 2), dvar(1, 2)]);
            diag.add_arrow("p_top", "p", "top", incl()).unwrap();
            diag.add_arrow("p_bot", "p", "bot", incl()).unwrap();
            let d1d2 = dvar(0, 2).mul(&dvar(1, 2));
            let mut legs = BTreeMap::new();
            legs.insert(
                "top".into(),
                map(&square, &apex, vec![dvar(0, 2), dvar(1, 2), d1d2.clone()]),
            );
            legs.insert(
                "bot".into(),
                map(&square, &apex, vec![dvar(0, 2), dvar(1, 2), pzero(2)]),
            );
            legs.insert(
                "p".into(),
                map(&p, &apex, vec![dvar(0, 2), dvar(1, 2), pzero(2)]),
            );
            ApexCocone::new(diag, apex, legs).unwrap()
        }
        FixtureId::L52 => {
            let square = InfType::cube(2);
            let p = InfType::axes(2);
            let d = InfType::d();
            // All pairs among {1,2,4,5} vanish, and 4, 5 also annihilate 3.
            let apex = InfType::new(
                5,
                &[
                    vec![1, 2],
                    vec![1, 4],
                    vec![1, 5],
                    vec![2, 4],
                    vec![2, 5],
                    vec![4, 5],
                    vec![3, 4],
                    vec![3, 5],
                ],
            )
            .unwrap();
            let mut diag = Diagram::new();
            for o in ["l11", "l12", "l21", "l22"] {
                diag.add_object(o, square.clone()).unwrap();
            }
            diag.add_object("p1", p.clone()).unwrap();
            diag.add_object("p2", p.clone()).unwrap();
            diag.add_object("q1", d.clone()).unwrap();
            diag.add_object("q2", d.clone()).unwrap();
            let p_incl = || map(&p, &square, vec![dvar(0, 2), dvar(1, 2)]);
            diag.add_arrow("p1_l11", "p1", "l11", p_incl()).unwrap();
            diag.add_arrow("p1_l21", "p1", "l21", p_incl()).unwrap();
            diag.add_arrow("p2_l12", "p2", "l12", p_incl()).unwrap();
            diag.add_arrow("p2_l22", "p2", "l22", p_incl()).unwrap();
            let q_incl = || map(&d, &square, vec![pzero(1), dvar(0, 1)]);
            diag.add_arrow("q1_l11", "q1", "l11", q_incl()).unwrap();
            diag.add_arrow("q1_l12", "q1", "l12", q_incl()).unwrap();
            diag.add_arrow("q2_l21", "q2", "l21", q_incl()).unwrap();
            diag.add_arrow("q2_l22", "q2", "l22", q_incl()).unwrap();
            let d1 = dvar(0, 2);
            let d2 = dvar(1, 2);
            let d1d2 = d1.mul(&d2);
            let z = pzero(2);
            let mut legs = BTreeMap::new();
            legs.insert(
                "l11".into(),
                map(&square, &apex, vec![d1.clone(), z.clone(), d2.clone(), d1d2.clone(), z.clone()]),
            );
            legs.insert(
                "l21".into(),
                map(&square, &apex, vec![d1.clone(), z.clone(), d2.clone(), z.clone(), z.clone()]),
            );
            legs.insert(
                "l12".into(),
                map(&square, &apex, vec![z.clone(), d1.clone(), d2.clone(), z.clone(), d1d2.clone()]),
            );
            legs.insert(
                "l22".into(),
                map(&square, &apex, vec![z.clone(), d1.clone(), d2.clone(), z.clone(), z.clone()]),
            );
            legs.insert(
                "p1".into(),
                map(&p, &apex, vec![d1.clone(), z.clone(), d2.clone(), z.clone(), z.clone()]),
            );
            legs.insert(
                "p2".into(),
                map(&p, &apex, vec![z.clone(), d1.clone(), d2.clone(), z.clone(), z.clone()]),
            );
            let zd = pzero(1);
            legs.insert(
                "q1".into(),
                map(&d, &apex, vec![zd.clone(), zd.clone(), dvar(0, 1), zd.clone(), zd.clone()]),
            );
            legs.insert(
                "q2".into(),
                map(&d, &apex, vec![zd.clone(), zd.clone(), dvar(0, 1), zd.clone(), zd.clone()]),
            );
            ApexCocone::new(diag, apex, legs).unwrap()
        }
        FixtureId::L53 => {
            let p = InfType::axes(2);
            let square = InfType::cube(2);
            let apex = InfType::new(
                4,
                &[vec![1, 3], vec![2, 3], vec![1, 4], vec![2, 4], vec![3, 4]],
            )
            .unwrap();
            let mut diag = Diagram::new();
            diag.add_object("p", p.clone()).unwrap();
            for o in ["low", "mid", "top"] {
                diag.add_object(o, square.clone()).unwrap();
                diag.add_arrow(
                    &format!("p_{o}"),
                    "p",
                    o,
                    map(&p, &square, vec![dvar(0, 2), dvar(1, 2)]),
                )
                .unwrap();
            }
            let d1 = dvar(0, 2);
            let d2 = dvar(1, 2);
            let d1d2 = d1.mul(&d2);
            let z = pzero(2);
            let mut legs = BTreeMap::new();
            legs.insert(
                "low".into(),
                map(&square, &apex, vec![d1.clone(), d2.clone(), z.clone(), z.clone()]),
            );
            legs.insert(
                "mid".into(),
                map(&square, &apex, vec![d1.clone(), d2.clone(), d1d2.clone(), z.clone()]),
            );
            legs.insert(
                "top".into(),
                map(&square, &apex, vec![d1.clone(), d2.clone(), d1d2.clone(), d1d2.clone()]),
            );
            legs.insert(
                "p".into(),
                map(&p, &apex, vec![d1.clone(), d2.clone(), z.clone(), z.clone()]),
            );
            ApexCocone::new(diag, apex, legs).unwrap()
        }
        FixtureId::L54 { n, m1, m2 } => {
            assert!(m1 >= 1 && m2 >= 1, "block sizes must be at least 1");
            let nn = n + m1 + m2;
            let left = InfType::new(nn, &(n + 1..=n + m1).map(|i| vec![i]).collect::<Vec<_>>())
                .unwrap();
            let right = InfType::new(
                nn,
                &(n + m1 + 1..=nn).map(|i| vec![i]).collect::<Vec<_>>(),
            )
            .unwrap();
            let base = InfType::cube(n);
            let mut pairs = Vec::new();
            for i in 1..=m1 {
                for j in 1..=m2 {
                    pairs.push(vec![n + i, n + m1 + j]);
                }
            }
            let apex = InfType::new(nn, &pairs).unwrap();
            let mut diag = Diagram::new();
            diag.add_object("left", left.clone()).unwrap();
            diag.add_object("right", right.clone()).unwrap();
            diag.add_object("base", base.clone()).unwrap();
            let base_coords: Vec<Poly> = (0..nn)
                .map(|i| if i < n { dvar(i, n) } else { pzero(n) })
                .collect();
            diag.add_arrow("base_left", "base", "left", map(&base, &left, base_coords.clone()))
                .unwrap();
            diag.add_arrow("base_right", "base", "right", map(&base, &right, base_coords.clone()))
                .unwrap();
            let idc: Vec<Poly> = (0..nn).map(|i| dvar(i, nn)).collect();
            let mut legs = BTreeMap::new();
            legs.insert("left".into(), map(&left, &apex, idc.clone()));
            legs.insert("right".into(), map(&right, &apex, idc.clone()));
            legs.insert("base".into(), map(&base, &apex, base_coords));
            ApexCocone::new(diag, apex, legs).unwrap()
        }
        FixtureId::L55 => {
            let h = InfType::cube(3);
            let k1 = InfType::new(3, &[vec![2, 3]]).unwrap();
            let k2 = InfType::new(3, &[vec![1, 3]]).unwrap();
            let k3 = InfType::new(3, &[vec![1, 2]]).unwrap();
            let apex = InfType::new(8, &l55_vanishing()).unwrap();
            let mut diag = Diagram::new();
            for o in ["h123", "h132", "h213", "h231", "h312", "h321"] {
                diag.add_object(o, h.clone()).unwrap();
            }
            // K objects named by the face they share and the cubes they join.
            let k_objs: [(&str, &InfType, &str, &str); 6] = [
                ("k1_123_132", &k1, "h123", "h132"),
                ("k1_231_321", &k1, "h231", "h321"),
                ("k2_231_213", &k2, "h231", "h213"),
                ("k2_312_132", &k2, "h312", "h132"),
                ("k3_312_321", &k3, "h312", "h321"),
                ("k3_123_213", &k3, "h123", "h213"),
            ];
            for (name, t, a, b) in k_objs {
                diag.add_object(name, (*t).clone()).unwrap();
                let incl = |dst: &InfType| {
                    map(t, dst, vec![dvar(0, 3), dvar(1, 3), dvar(2, 3)])
                };
                diag.add_arrow(&format!("{name}_{a}"), name, a, incl(&h)).unwrap();
                diag.add_arrow(&format!("{name}_{b}"), name, b, incl(&h)).unwrap();
            }
            let d1 = dvar(0, 3);
            let d2 = dvar(1, 3);
            let d3 = dvar(2, 3);
            let d12 = d1.mul(&d2);
            let d13 = d1.mul(&d3);
            let d23 = d2.mul(&d3);
            let d123 = d12.mul(&d3);
            let z = pzero(3);
            let f = |coords: Vec<Poly>| map(&h, &apex, coords);
            let mut legs = BTreeMap::new();
            legs.insert(
                "h123".into(),
                f(vec![d1.clone(), d2.clone(), d3.clone(), z.clone(), z.clone(), z.clone(), z.clone(), z.clone()]),
            );
            legs.insert(
                "h132".into(),
                f(vec![d1.clone(), d2.clone(), d3.clone(), d23.clone(), z.clone(), z.clone(), z.clone(), z.clone()]),
            );
            legs.insert(
                "h213".into(),
                f(vec![d1.clone(), d2.clone(), d3.clone(), z.clone(), z.clone(), d12.clone(), z.clone(), z.clone()]),
            );
            legs.insert(
                "h231".into(),
                f(vec![d1.clone(), d2.clone(), d3.clone(), z.clone(), d13.clone(), d12.clone(), z.clone(), z.clone()]),
            );
            legs.insert(
                "h312".into(),
                f(vec![d1.clone(), d2.clone(), d3.clone(), d23.clone(), d13.clone(), z.clone(), d123.clone(), z.clone()]),
            );
            legs.insert(
                "h321".into(),
                f(vec![d1.clone(), d2.clone(), d3.clone(), d23.clone(), d13.clone(), d12.clone(), z.clone(), d123.clone()]),
            );
            // K legs are the common composites through their two cubes.
            for (name, t, a, _) in k_objs {
                let through = legs[a].compose(&InfMap::canonical_injection(t, &h).unwrap()).unwrap();
                legs.insert(name.to_string(), through);
            }
            ApexCocone::new(diag, apex, legs).unwrap()
        }
    }
}

/// The negative control: the same shape as the two-tangent gluing but with
/// the full square as apex, where the cross coefficient is invisible on the
/// axes.
pub fn negative_control_l41() -> ApexCocone {
    let pt = InfType::point();
    let d = InfType::d();
    let apex = InfType::cube(2);
    let mut diag = Diagram::new();
    diag.add_object("pt", pt.clone()).unwrap();
    diag.add_object("t1", d.clone()).unwrap();
    diag.add_object("t2", d.clone()).unwrap();
    diag.add_arrow("pt_t1", "pt", "t1", map(&pt, &d, vec![pzero(0)])).unwrap();
    diag.add_arrow("pt_t2", "pt", "t2", map(&pt, &d, vec![pzero(0)])).unwrap();
    let mut legs = BTreeMap::new();
    legs.insert("pt".into(), map(&pt, &apex, vec![pzero(0), pzero(0)]));
    legs.insert("t1".into(), map(&d, &apex, vec![dvar(0, 1), pzero(1)]));
    legs.insert("t2".into(), map(&d, &apex, vec![pzero(1), dvar(0, 1)]));
    ApexCocone::new(diag, apex, legs).unwrap()
}

/// The 22 vanishing pairs of the 8-variable apex: 7 and 8 annihilate
/// everything, 4/5/6 annihilate each other and the two axes they do not
/// correspond to.
fn l55_vanishing() -> Vec<Vec<usize>> {
    vec![
        vec![2, 4],
        vec![3, 4],
        vec![1, 5],
        vec![3, 5],
        vec![1, 6],
        vec![2, 6],
        vec![4, 5],
        vec![4, 6],
        vec![5, 6],
        vec![1, 7],
        vec![2, 7],
        vec![3, 7],
        vec![4, 7],
        vec![5, 7],
        vec![6, 7],
        vec![7, 8],
        vec![1, 8],
        vec![2, 8],
        vec![3, 8],
        vec![4, 8],
        vec![5, 8],
        vec![6, 8],
    ]
}

/// Every fixture id the lemma suite checks, including the parametrized
/// family within the stated size bound.
pub fn lemma_suite() -> Vec<FixtureId> {
    let mut ids = vec![
        FixtureId::L41,
        FixtureId::L42,
        FixtureId::L61,
        FixtureId::L51,
        FixtureId::L52,
        FixtureId::L53,
    ];
    for n in 0..=3 {
        for m1 in 1..=4 {
            for m2 in 1..=4 {
                if n + m1 + m2 <= 5 {
                    ids.push(FixtureId::L54 { n, m1, m2 });
                }
            }
        }
    }
    ids.push(FixtureId::L55);
    ids
}
