//! Exact scalars and sparse multivariate polynomials over the rationals.
//!
//! Everything downstream (quotient algebras, diagram solving, the calculus)
//! reduces to arithmetic in `Poly`, so coefficients are arbitrary-precision
//! `BigRational`s and every operation is exact. Terms are kept in a canonical
//! graded-lexicographic order, which makes structural equality coincide with
//! semantic equality.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// Exact rational scalar, always in lowest terms with positive denominator.
pub type Rat = BigRational;

/// Shorthand for an integer rational.
pub fn rint(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Shorthand for `n/d`. Panics on a zero denominator.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rzero() -> Rat {
    Rat::zero()
}

pub fn rone() -> Rat {
    Rat::one()
}

/// Coefficient rings the kernel can solve over: `Rat` for concrete points,
/// `Poly` for symbolic state coordinates. The diagram solver only needs the
/// module operations plus an exact zero test; ring multiplication is used by
/// algebra elements and expression evaluation.
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    /// Zero of the same shape (same arity for polynomials).
    fn zero_like(&self) -> Self;
    /// One of the same shape.
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    /// Multiplication by a rational scalar.
    fn scale(&self, r: &Rat) -> Self;
}

impl Coeff for Rat {
    fn zero_like(&self) -> Self {
        Rat::zero()
    }
    fn one_like(&self) -> Self {
        Rat::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, r: &Rat) -> Self {
        self * r
    }
}

/// A power product `X1^e1 ... Xn^en`, one exponent slot per variable of the
/// ambient arity. Ordered graded-lexicographically: total degree first, then
/// lexicographic comparison of the exponent vector (so `X1 > X2 > ...` within
/// a degree).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial { exps }
    }

    /// The unit monomial of the given arity.
    pub fn one(arity: usize) -> Self {
        Monomial { exps: vec![0; arity] }
    }

    /// The single variable `X_i` (0-based).
    pub fn var(i: usize, arity: usize) -> Self {
        assert!(i < arity, "variable index {i} out of range for arity {arity}");
        let mut exps = vec![0; arity];
        exps[i] = 1;
        Monomial { exps }
    }

    pub fn arity(&self) -> usize {
        self.exps.len()
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn total_degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        assert_eq!(self.arity(), other.arity(), "monomial arity mismatch");
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Whether `self` divides `other` (componentwise exponents).
    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.len() == other.exps.len()
            && self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// Reindex into a wider arity, keeping exponents at their positions.
    pub fn pad_to(&self, arity: usize) -> Monomial {
        assert!(arity >= self.arity());
        let mut exps = self.exps.clone();
        exps.resize(arity, 0);
        Monomial { exps }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Invariant: no zero coefficient is ever stored, and the term map is keyed
/// by the canonical monomial order, so `PartialEq` decides semantic equality.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly {
    arity: usize,
    terms: BTreeMap<Monomial, Rat>,
}

impl Poly {
    pub fn zero(arity: usize) -> Self {
        Poly { arity, terms: BTreeMap::new() }
    }

    pub fn constant(arity: usize, c: Rat) -> Self {
        let mut p = Poly::zero(arity);
        if !Zero::is_zero(&c) {
            p.terms.insert(Monomial::one(arity), c);
        }
        p
    }

    pub fn one(arity: usize) -> Self {
        Poly::constant(arity, Rat::one())
    }

    /// The variable `X_i` (0-based).
    pub fn var(i: usize, arity: usize) -> Self {
        Poly::monomial(Monomial::var(i, arity), Rat::one())
    }

    pub fn monomial(m: Monomial, c: Rat) -> Self {
        let arity = m.arity();
        let mut p = Poly::zero(arity);
        if !Zero::is_zero(&c) {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn constant_term(&self) -> Rat {
        self.coeff(&Monomial::one(self.arity))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::total_degree).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, c: Rat) {
        if Zero::is_zero(&c) {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if Zero::is_zero(&sum) {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.arity, other.arity, "polynomial arity mismatch");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly {
            arity: self.arity,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.arity, other.arity, "polynomial arity mismatch");
        let mut out = Poly::zero(self.arity);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, r: &Rat) -> Poly {
        if Zero::is_zero(r) {
            return Poly::zero(self.arity);
        }
        Poly {
            arity: self.arity,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * r)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::one(self.arity);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Substitutes `images[i]` for variable `i` and expands fully. All images
    /// must share one arity, which becomes the arity of the result.
    pub fn substitute(&self, images: &[Poly]) -> Poly {
        assert_eq!(images.len(), self.arity, "substitution arity mismatch");
        let out_arity = images.first().map_or(0, Poly::arity);
        for im in images {
            assert_eq!(im.arity(), out_arity, "substitution images of mixed arity");
        }
        let mut out = Poly::zero(out_arity);
        for (m, c) in &self.terms {
            let mut term = Poly::constant(out_arity, c.clone());
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    term = term.mul(&images[i].pow(e));
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Evaluates at a rational point.
    pub fn eval(&self, point: &[Rat]) -> Rat {
        assert_eq!(point.len(), self.arity, "evaluation arity mismatch");
        let mut out = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exps().iter().enumerate() {
                for _ in 0..e {
                    t *= &point[i];
                }
            }
            out += t;
        }
        out
    }

    /// Partial derivative with respect to variable `i`.
    pub fn partial(&self, i: usize) -> Poly {
        assert!(i < self.arity, "variable index out of range");
        let mut out = Poly::zero(self.arity);
        for (m, c) in &self.terms {
            let e = m.exps()[i];
            if e > 0 {
                let mut exps = m.exps().to_vec();
                exps[i] = e - 1;
                out.add_term(Monomial::new(exps), c * rint(e as i64));
            }
        }
        out
    }

    /// Reindex into a wider arity (new trailing variables unused).
    pub fn pad_to(&self, arity: usize) -> Poly {
        assert!(arity >= self.arity);
        Poly {
            arity,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.pad_to(arity), c.clone()))
                .collect(),
        }
    }

    /// Renders with the given variable names, highest term first.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }
}

impl Coeff for Poly {
    fn zero_like(&self) -> Self {
        Poly::zero(self.arity)
    }
    fn one_like(&self) -> Self {
        Poly::one(self.arity)
    }
    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        Poly::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        Poly::sub(self, other)
    }
    fn neg(&self) -> Self {
        Poly::neg(self)
    }
    fn mul(&self, other: &Self) -> Self {
        Poly::mul(self, other)
    }
    fn scale(&self, r: &Rat) -> Self {
        Poly::scale(self, r)
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Poly,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        // Highest term first reads naturally; the parser accepts either order.
        for (m, c) in self.poly.terms.iter().rev() {
            let neg = c.is_negative();
            let mag = c.abs();
            // A leading negative sign belongs to the literal, so a unit
            // coefficient must still be spelled out to stay reparseable.
            let mut force_coeff = false;
            if first {
                if neg {
                    write!(f, "-")?;
                    force_coeff = true;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !One::is_one(&mag) || m.is_one() || force_coeff {
                factors.push(format_rat(&mag));
            }
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 1 {
                    factors.push(self.names[i].clone());
                } else if e > 1 {
                    factors.push(format!("{}^{}", self.names[i], e));
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// `5/6` style rendering; integers drop the denominator.
pub fn format_rat(r: &Rat) -> String {
    if One::is_one(r.denom()) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Variable names `x` / `x1..xk` for state coordinates.
pub fn state_names(arity: usize) -> Vec<String> {
    if arity == 1 {
        vec!["x".to_string()]
    } else {
        (1..=arity).map(|i| format!("x{i}")).collect()
    }
}

/// Variable names `d1..dn` for infinitesimal coordinates.
pub fn d_names(arity: usize) -> Vec<String> {
    (1..=arity).map(|i| format!("d{i}")).collect()
}
