//! The verification driver: every identity the kernel mechanizes, packaged
//! as named checks with exact pass/fail results. The CLI `verify` command
//! prints these; the acceptance test suite asserts them.

use crate::calculus::{check_taylor, derivative_routes, elementary_symmetric, sym, Expr};
use crate::microlinear::{
    general_jacobi, plus1, scale1, strong_diff, tangent_add, tangent_scale, Microcube, Tangent,
};
use crate::poly::{rat, rint, Monomial, Poly, Rat};
use crate::quasicolim::{fixture, lemma_suite, negative_control_l41, Failure};
use crate::vectorfield::{
    bracket, classical_bracket, flow_check_additive, flow_check_sum, jacobi_cubes, VectorField,
};
use crate::weil::WeilElem;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::sync::Arc;

/// One named check with its outcome.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        CheckResult { name: name.into(), passed, detail: detail.into() }
    }
}

pub fn rand_rat(rng: &mut StdRng) -> Rat {
    rat(rng.gen_range(-9..=9), rng.gen_range(1..=9))
}

pub fn rand_poly(rng: &mut StdRng, arity: usize, max_deg: u32) -> Poly {
    let mut p = Poly::zero(arity);
    for _ in 0..rng.gen_range(1..5) {
        let mut exps = vec![0u32; arity];
        let mut left = max_deg;
        for e in exps.iter_mut() {
            *e = rng.gen_range(0..=left);
            left -= *e;
        }
        p = p.add(&Poly::monomial(Monomial::new(exps), rand_rat(rng)));
    }
    p
}

/// A random unary polynomial expression of total degree at most `max_deg`.
pub fn rand_unary_expr(rng: &mut StdRng, max_deg: u32) -> Expr {
    poly_to_expr(&rand_poly(rng, 1, max_deg))
}

fn poly_to_expr(p: &Poly) -> Expr {
    let mut acc: Option<Expr> = None;
    for (m, c) in p.terms() {
        let mut t = Expr::Const(c.clone());
        for (i, &e) in m.exps().iter().enumerate() {
            if e > 0 {
                t = Expr::Mul(Box::new(t), Box::new(Expr::Pow(Box::new(Expr::Var(i)), e)));
            }
        }
        acc = Some(match acc {
            None => t,
            Some(a) => Expr::Add(Box::new(a), Box::new(t)),
        });
    }
    acc.unwrap_or(Expr::Const(rint(0)))
}

pub fn rand_field(rng: &mut StdRng, k: usize, deg: u32) -> VectorField {
    VectorField::new((0..k).map(|_| rand_poly(rng, k, deg)).collect())
}

pub fn rand_tangent(rng: &mut StdRng, base: &[Rat]) -> Tangent<Rat> {
    Tangent::from_base_velocity(
        base.to_vec(),
        base.iter().map(|_| rand_rat(rng)).collect(),
    )
}

/// A random microsquare over `D^2` with `k` components.
pub fn rand_square(rng: &mut StdRng, k: usize) -> Microcube {
    let t = crate::inftype::InfType::cube(2);
    let comps = (0..k)
        .map(|_| {
            WeilElem::from_coords(
                Arc::clone(t.algebra()),
                (0..4).map(|_| rand_rat(rng)).collect(),
            )
        })
        .collect();
    Microcube::new(t, comps)
}

/// Copy of a microsquare with fresh cross coefficients (same faces).
pub fn resample_cross(rng: &mut StdRng, theta: &Microcube) -> Microcube {
    let t = theta.domain().clone();
    let alg = t.algebra();
    let cross = alg.basis_index(&Monomial::new(vec![1, 1])).expect("cross term");
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

/// Criterion 1: every fixture in the lemma suite is a quasi-colimit.
pub fn suite_lemmas() -> Vec<CheckResult> {
    lemma_suite()
        .into_iter()
        .map(|id| {
            let c = fixture(id);
            match c.check_quasi_colimit() {
                Ok(v) => CheckResult::new(
                    format!("quasi-colimit {}", id.name()),
                    v.is_quasi_colimit,
                    v.to_string(),
                ),
                Err(e) => CheckResult::new(format!("quasi-colimit {}", id.name()), false, e.to_string()),
            }
        })
        .collect()
}

/// Criterion 2: the square-apex variant fails injectively with gap one.
pub fn suite_negative() -> Vec<CheckResult> {
    let v = negative_control_l41()
        .check_quasi_colimit()
        .expect("control cocone commutes");
    let ok = !v.is_quasi_colimit
        && v.apex_dim == 4
        && v.limit_dim == 3
        && v.failure == Some(Failure::NotInjective { gap: 1 });
    vec![CheckResult::new("negative control (square apex)", ok, v.to_string())]
}

/// Criterion 3: product rule, chain rule, derivative route agreement and
/// the Taylor expansion with its factorial corollary, on random
/// polynomials.
pub fn suite_calculus(seed: u64, cases: usize) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let mut rng = StdRng::seed_from_u64(seed);

    let mut product_ok = 0;
    for _ in 0..cases {
        let f = rand_unary_expr(&mut rng, 5);
        let g = rand_unary_expr(&mut rng, 5);
        let x0 = rand_rat(&mut rng);
        let fg = Expr::Mul(Box::new(f.clone()), Box::new(g.clone()));
        let (lhs, _) = derivative_routes(&fg, &x0, 1);
        let rhs = derivative_routes(&f, &x0, 1).0 * g.eval(std::slice::from_ref(&x0))
            + f.eval(std::slice::from_ref(&x0)) * derivative_routes(&g, &x0, 1).0;
        if lhs == rhs {
            product_ok += 1;
        }
    }
    out.push(CheckResult::new(
        "product rule",
        product_ok == cases,
        format!("{product_ok}/{cases} exact"),
    ));

    let mut chain_ok = 0;
    for _ in 0..cases {
        let f = rand_unary_expr(&mut rng, 5);
        let g = rand_unary_expr(&mut rng, 5);
        let x0 = rand_rat(&mut rng);
        let gf = Expr::Compose(Box::new(g.clone()), Box::new(f.clone()));
        let (lhs, _) = derivative_routes(&gf, &x0, 1);
        let rhs =
            derivative_routes(&g, &f.eval(std::slice::from_ref(&x0)), 1).0 * derivative_routes(&f, &x0, 1).0;
        if lhs == rhs {
            chain_ok += 1;
        }
    }
    out.push(CheckResult::new(
        "chain rule",
        chain_ok == cases,
        format!("{chain_ok}/{cases} exact"),
    ));

    let mut routes_ok = 0;
    for _ in 0..cases {
        let f = rand_unary_expr(&mut rng, 5);
        let x0 = rand_rat(&mut rng);
        let mut all = true;
        for n in 0..=6 {
            let (a, b) = derivative_routes(&f, &x0, n);
            all &= a == b;
        }
        if all {
            routes_ok += 1;
        }
    }
    out.push(CheckResult::new(
        "derivative routes agree (n <= 6)",
        routes_ok == cases,
        format!("{routes_ok}/{cases} exact"),
    ));

    let mut taylor_ok = 0;
    for _ in 0..cases {
        let f = rand_unary_expr(&mut rng, 5);
        let x0 = rand_rat(&mut rng);
        let n = rng.gen_range(0..=4);
        if check_taylor(&f, &x0, n) {
            taylor_ok += 1;
        }
    }
    out.push(CheckResult::new(
        "Taylor expansion + factorial corollary (n <= 4)",
        taylor_ok == cases,
        format!("{taylor_ok}/{cases} exact"),
    ));
    out
}

/// Criterion 4: the symmetric recursion equals subset enumeration.
pub fn suite_sym() -> Vec<CheckResult> {
    let mut ok = true;
    let mut checked = 0;
    for n in 0..=6 {
        for m in 0..=n + 2 {
            ok &= sym(n, m) == elementary_symmetric(n, m);
            checked += 1;
        }
    }
    vec![CheckResult::new(
        "sym recursion vs subset enumeration (n <= 6)",
        ok,
        format!("{checked} pairs"),
    )]
}

/// Criterion 5: the six tangent-module laws and the Euclidean
/// factorization, in dimension three.
pub fn suite_tangent(seed: u64, cases: usize) -> Vec<CheckResult> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut laws_ok = 0;
    for _ in 0..cases {
        let base: Vec<Rat> = (0..3).map(|_| rand_rat(&mut rng)).collect();
        let t1 = rand_tangent(&mut rng, &base);
        let t2 = rand_tangent(&mut rng, &base);
        let t3 = rand_tangent(&mut rng, &base);
        let alpha = rand_rat(&mut rng);
        let beta = rand_rat(&mut rng);
        let add = |a: &Tangent<Rat>, b: &Tangent<Rat>| tangent_add(a, b).unwrap();
        let mut ok = add(&add(&t1, &t2), &t3) == add(&t1, &add(&t2, &t3));
        ok &= add(&t1, &t2) == add(&t2, &t1);
        ok &= tangent_scale(&rint(1), &t1) == t1;
        ok &= tangent_scale(&(&alpha + &beta), &t1)
            == add(&tangent_scale(&alpha, &t1), &tangent_scale(&beta, &t1));
        ok &= tangent_scale(&alpha, &add(&t1, &t2))
            == add(&tangent_scale(&alpha, &t1), &tangent_scale(&alpha, &t2));
        ok &= tangent_scale(&(&alpha * &beta), &t1)
            == tangent_scale(&alpha, &tangent_scale(&beta, &t1));
        if ok {
            laws_ok += 1;
        }
    }
    let mut euclid_ok = 0;
    for _ in 0..cases {
        // Admissible microsquare: constant axes, arbitrary cross term.
        let t = crate::inftype::InfType::cube(2);
        let alg = t.algebra();
        let cross = alg.basis_index(&Monomial::new(vec![1, 1])).unwrap();
        let mut expected = Vec::new();
        let comps: Vec<WeilElem<Rat>> = (0..3)
            .map(|_| {
                let mut coords = vec![rand_rat(&mut rng), rint(0), rint(0), rint(0)];
                coords[cross] = rand_rat(&mut rng);
                expected.push(coords[cross].clone());
                WeilElem::from_coords(Arc::clone(alg), coords)
            })
            .collect();
        let psi = Microcube::new(t, comps);
        match crate::microlinear::factor_through_product(&psi) {
            Ok(tan) if tan.velocity() == expected => euclid_ok += 1,
            _ => {}
        }
    }
    vec![
        CheckResult::new(
            "tangent module laws (Q^3)",
            laws_ok == cases,
            format!("{laws_ok}/{cases} exact"),
        ),
        CheckResult::new(
            "Euclidean factorization (Q^3)",
            euclid_ok == cases,
            format!("{euclid_ok}/{cases} exact"),
        ),
    ]
}

/// Criterion 6: transposition invariance, additivity, the scalar law and
/// the primordial Jacobi chain for strong differences.
pub fn suite_strong_diff(seed: u64, cases: usize) -> Vec<CheckResult> {
    let mut rng = StdRng::seed_from_u64(seed);
    let transpose = |theta: &Microcube| {
        let swap = crate::inftype::InfMap::new(
            crate::inftype::InfType::cube(2),
            crate::inftype::InfType::cube(2),
            vec![Poly::var(1, 2), Poly::var(0, 2)],
        )
        .unwrap();
        theta.restrict(&swap)
    };

    let mut transp_ok = 0;
    for _ in 0..cases {
        let a = rand_square(&mut rng, 2);
        let b = resample_cross(&mut rng, &a);
        if strong_diff(&transpose(&a), &transpose(&b)).unwrap() == strong_diff(&a, &b).unwrap() {
            transp_ok += 1;
        }
    }

    let mut add_ok = 0;
    for _ in 0..cases {
        let theta11 = rand_square(&mut rng, 2);
        let theta21 = resample_cross(&mut rng, &theta11);
        let theta12 = {
            // Same (0,d) axis as theta11, fresh d1 and d1d2 coefficients.
            let t = theta11.domain().clone();
            let alg = t.algebra();
            let d1 = alg.basis_index(&Monomial::new(vec![1, 0])).unwrap();
            let cross = alg.basis_index(&Monomial::new(vec![1, 1])).unwrap();
            let comps = theta11
                .components()
                .iter()
                .map(|c| {
                    let mut coords = c.coords().to_vec();
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
        if lhs == rhs {
            add_ok += 1;
        }
    }

    let mut scalar_ok = 0;
    for _ in 0..cases {
        let a = rand_square(&mut rng, 2);
        let b = resample_cross(&mut rng, &a);
        let alpha = rand_rat(&mut rng);
        let lhs = strong_diff(&scale1(&alpha, &a), &scale1(&alpha, &b)).unwrap();
        let rhs = tangent_scale(&alpha, &strong_diff(&a, &b).unwrap());
        if lhs == rhs {
            scalar_ok += 1;
        }
    }

    let mut chain_ok = 0;
    for _ in 0..cases {
        let t1 = rand_square(&mut rng, 2);
        let t2 = resample_cross(&mut rng, &t1);
        let t3 = resample_cross(&mut rng, &t1);
        let d12 = strong_diff(&t1, &t2).unwrap();
        let d23 = strong_diff(&t2, &t3).unwrap();
        let d13 = strong_diff(&t1, &t3).unwrap();
        let d21 = strong_diff(&t2, &t1).unwrap();
        let mut ok = tangent_add(&d12, &d23).unwrap() == d13;
        ok &= tangent_add(&d12, &d21).unwrap().is_zero_velocity();
        if ok {
            chain_ok += 1;
        }
    }

    vec![
        CheckResult::new(
            "strong difference transposition invariance",
            transp_ok == cases,
            format!("{transp_ok}/{cases} exact"),
        ),
        CheckResult::new(
            "strong difference additivity over fiber sums",
            add_ok == cases,
            format!("{add_ok}/{cases} exact"),
        ),
        CheckResult::new(
            "strong difference scalar law",
            scalar_ok == cases,
            format!("{scalar_ok}/{cases} exact"),
        ),
        CheckResult::new(
            "primordial Jacobi chain",
            chain_ok == cases,
            format!("{chain_ok}/{cases} exact"),
        ),
    ]
}

/// Criterion 7: the general Jacobi sum vanishes on sextuples built from
/// random fields by iterated flow concatenation.
pub fn suite_jacobi(seed: u64, cases: usize) -> Vec<CheckResult> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut ok = 0;
    for _ in 0..cases {
        let k = rng.gen_range(1..=2);
        let x1 = rand_field(&mut rng, k, 2);
        let x2 = rand_field(&mut rng, k, 2);
        let x3 = rand_field(&mut rng, k, 2);
        let cubes = jacobi_cubes(&x1, &x2, &x3);
        let point: Vec<Rat> = (0..k)
            .map(|_| rat(rng.gen_range(-4..=4), rng.gen_range(1..=3)))
            .collect();
        let at: Vec<Microcube> = cubes.iter().map(|c| c.eval_at(&point)).collect();
        match general_jacobi(&at[0], &at[1], &at[2], &at[3], &at[4], &at[5]) {
            Ok(out) if out.sum.is_zero_velocity() => ok += 1,
            _ => {}
        }
    }
    vec![CheckResult::new(
        "general Jacobi zero sum (flow sextuples)",
        ok == cases,
        format!("{ok}/{cases} exact"),
    )]
}

/// Criterion 8: the bracket against its hand-expanded oracle, the four
/// bracket laws, and the two flow laws.
pub fn suite_bracket(seed: u64, cases: usize) -> Vec<CheckResult> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::new();

    let mut oracle_ok = 0;
    for _ in 0..cases {
        let k = rng.gen_range(1..=3);
        let v = rand_field(&mut rng, k, 3);
        let w = rand_field(&mut rng, k, 3);
        if bracket(&v, &w) == classical_bracket(&v, &w) {
            oracle_ok += 1;
        }
    }
    out.push(CheckResult::new(
        "bracket = Jacobian oracle (k <= 3, deg <= 3)",
        oracle_ok == cases,
        format!("{oracle_ok}/{cases} exact"),
    ));

    let law_cases = cases / 2;
    let mut laws_ok = 0;
    for _ in 0..law_cases {
        let k = rng.gen_range(1..=2);
        let x1 = rand_field(&mut rng, k, 2);
        let x2 = rand_field(&mut rng, k, 2);
        let x3 = rand_field(&mut rng, k, 2);
        let alpha = rand_rat(&mut rng);
        let mut ok =
            bracket(&x1.add(&x2), &x3) == bracket(&x1, &x3).add(&bracket(&x2, &x3));
        ok &= bracket(&x1.scale(&alpha), &x2) == bracket(&x1, &x2).scale(&alpha);
        ok &= bracket(&x1, &x2).add(&bracket(&x2, &x1)).is_zero();
        ok &= bracket(&x1, &bracket(&x2, &x3))
            .add(&bracket(&x2, &bracket(&x3, &x1)))
            .add(&bracket(&x3, &bracket(&x1, &x2)))
            .is_zero();
        if ok {
            laws_ok += 1;
        }
    }
    out.push(CheckResult::new(
        "bracket bilinear, antisymmetric, Jacobi",
        laws_ok == law_cases,
        format!("{laws_ok}/{law_cases} exact"),
    ));

    let mut flow_ok = 0;
    for _ in 0..law_cases {
        let k = rng.gen_range(1..=2);
        let v = rand_field(&mut rng, k, 2);
        let w = rand_field(&mut rng, k, 2);
        if flow_check_additive(&v) && flow_check_sum(&v, &w) {
            flow_ok += 1;
        }
    }
    out.push(CheckResult::new(
        "flow laws (additivity on the axes, sum law)",
        flow_ok == law_cases,
        format!("{flow_ok}/{law_cases} exact"),
    ));
    out
}

/// All suites, named for the CLI.
pub fn suites_by_name(name: &str) -> Option<Vec<(String, Vec<CheckResult>)>> {
    let single = |n: &str, checks: Vec<CheckResult>| Some(vec![(n.to_string(), checks)]);
    match name {
        "lemmas" => single("lemmas", suite_lemmas()),
        "negative" => single("negative", suite_negative()),
        "calculus" => single("calculus", suite_calculus(2024, 100)),
        "sym" => single("sym", suite_sym()),
        "tangent" => single("tangent", suite_tangent(2025, 50)),
        "strong-diff" => single("strong-diff", suite_strong_diff(2026, 50)),
        "jacobi" => single("jacobi", suite_jacobi(2027, 25)),
        "bracket" => single("bracket", suite_bracket(2028, 50)),
        "all" => Some(vec![
            ("lemmas".to_string(), suite_lemmas()),
            ("negative".to_string(), suite_negative()),
            ("calculus".to_string(), suite_calculus(2024, 100)),
            ("sym".to_string(), suite_sym()),
            ("tangent".to_string(), suite_tangent(2025, 50)),
            ("strong-diff".to_string(), suite_strong_diff(2026, 50)),
            ("jacobi".to_string(), suite_jacobi(2027, 25)),
            ("bracket".to_string(), suite_bracket(2028, 50)),
        ]),
        _ => None,
    }
}
