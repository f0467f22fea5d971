//! Command-line front end: exact derivatives, Taylor checks, diagram
//! verdicts, strong differences, Lie brackets and the verification suites.
//!
//! Exit codes: 0 when everything verified or computed, 1 when a verification
//! returned false, 2 on parse or validation errors. All output is exact
//! rational text.

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use weil::calculus::{check_taylor, derivative_at, jet};
use weil::inftype::InfType;
use weil::microlinear::strong_diff;
use weil::parse::{
    expr_to_poly, parse_diagram, parse_expr_with, parse_rational, parse_state_expr,
    parse_unary_expr, print_expr, split_components,
};
use weil::poly::{format_rat, state_names, Monomial, Poly};
use weil::quasicolim::Cube;
use weil::vectorfield::{bracket, VectorField};
use weil::verify::suites_by_name;
use weil::weil::WeilElem;

#[derive(Parser)]
#[command(
    name = "weil",
    about = "Exact kernel for nilpotent-infinitesimal calculus over the rationals",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute an exact n-th derivative of a unary expression at a point.
    Derive {
        /// Expression in `x`, e.g. "x^3 + 1/2*x".
        #[arg(long)]
        expr: String,
        /// Base point, a rational literal such as `2` or `-3/4`.
        #[arg(long)]
        at: String,
        /// Derivative order.
        #[arg(long, default_value_t = 1)]
        order: usize,
    },
    /// Print the jet of an expression at a point; optionally verify the
    /// infinitesimal Taylor expansion at that order.
    Taylor {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        at: String,
        /// Expansion order.
        #[arg(long)]
        n: usize,
        /// Also verify the expansion identity exactly.
        #[arg(long)]
        check: bool,
    },
    /// Parse a diagram file and decide the quasi-colimit property.
    CheckDiagram {
        /// Path to a `.qcd` diagram file.
        path: PathBuf,
    },
    /// Lie bracket of two polynomial vector fields on Q^k.
    Bracket {
        /// State dimension k.
        #[arg(long)]
        dim: usize,
        /// First field, k components: "[x2; 0]" or "x2; 0".
        #[arg(long)]
        x: String,
        /// Second field, k components.
        #[arg(long)]
        y: String,
    },
    /// Strong difference of two microsquares given as component
    /// polynomials in x/x1..xk and d1, d2.
    StrongDiff {
        #[arg(long)]
        theta1: String,
        #[arg(long)]
        theta2: String,
    },
    /// Run a verification suite and print one verdict per check.
    Verify {
        /// lemmas | negative | calculus | sym | tangent | strong-diff |
        /// jacobi | bracket | all
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command) -> Result<ExitCode, String> {
    match cmd {
        Command::Derive { expr, at, order } => {
            let e = parse_unary_expr(&expr).map_err(|e| e.to_string())?;
            let x0 = parse_rational(&at).map_err(|e| e.to_string())?;
            let v = derivative_at(&e, &x0, order);
            println!("{}", format_rat(&v));
            Ok(ExitCode::SUCCESS)
        }
        Command::Taylor { expr, at, n, check } => {
            let e = parse_unary_expr(&expr).map_err(|e| e.to_string())?;
            let x0 = parse_rational(&at).map_err(|e| e.to_string())?;
            let j = jet(&e, &x0, n);
            let mut poly_in_d = Poly::zero(1);
            for (i, c) in j.coeffs.iter().enumerate() {
                poly_in_d = poly_in_d.add(&Poly::monomial(Monomial::new(vec![i as u32]), c.clone()));
            }
            let names = vec!["d".to_string()];
            println!(
                "({})(({}) + d) = {}",
                print_expr(&e, &state_names(1)),
                format_rat(&x0),
                poly_in_d.display_with(&names)
            );
            if check {
                let holds = check_taylor(&e, &x0, n);
                println!("taylor identity at order {n}: {}", if holds { "ok" } else { "FAILED" });
                if !holds {
                    return Ok(ExitCode::from(1));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckDiagram { path } => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| format!("{}: {e}", path.display()))?;
            let cocone = parse_diagram(&text).map_err(|e| e.to_string())?;
            let verdict = cocone.check_quasi_colimit().map_err(|e| e.to_string())?;
            println!(
                "{}: {verdict}",
                path.file_name().and_then(|s| s.to_str()).unwrap_or("diagram")
            );
            if verdict.is_quasi_colimit {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(1))
            }
        }
        Command::Bracket { dim, x, y } => {
            let parse_field = |text: &str| -> Result<VectorField, String> {
                let comps = split_components(text);
                if comps.len() != dim {
                    return Err(format!(
                        "field has {} components, expected {dim}",
                        comps.len()
                    ));
                }
                let mut polys = Vec::new();
                for c in &comps {
                    let e = parse_state_expr(c, dim).map_err(|e| e.to_string())?;
                    polys.push(expr_to_poly(&e, dim));
                }
                Ok(VectorField::new(polys))
            };
            let xf = parse_field(&x)?;
            let yf = parse_field(&y)?;
            let u = bracket(&xf, &yf);
            let names = state_names(dim);
            let rendered: Vec<String> = u
                .components()
                .iter()
                .map(|p| p.display_with(&names).to_string())
                .collect();
            println!("[{}]", rendered.join("; "));
            Ok(ExitCode::SUCCESS)
        }
        Command::StrongDiff { theta1, theta2 } => {
            let (a, k) = parse_microsquare(&theta1)?;
            let (b, k2) = parse_microsquare(&theta2)?;
            if k != k2 {
                return Err(format!("theta1 has {k} components, theta2 has {k2}"));
            }
            let t = strong_diff(&a, &b).map_err(|e| e.to_string())?;
            // Render each component as a polynomial in the state names and d.
            let state_arity = t.cube().components()[0].coords()[0].arity();
            let mut names = state_names(state_arity);
            names.push("d".to_string());
            let rendered: Vec<String> = t
                .cube()
                .components()
                .iter()
                .map(|c| {
                    let base = c.coords()[0].pad_to(state_arity + 1);
                    let vel = c.coords()[1]
                        .pad_to(state_arity + 1)
                        .mul(&Poly::var(state_arity, state_arity + 1));
                    base.add(&vel).display_with(&names).to_string()
                })
                .collect();
            println!("[{}]", rendered.join("; "));
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite } => {
            let suites = suites_by_name(&suite)
                .ok_or_else(|| format!("unknown suite `{suite}`"))?;
            let mut all_ok = true;
            for (name, checks) in suites {
                println!("suite {name}:");
                for c in checks {
                    println!(
                        "  {:<55} {:<4} {}",
                        c.name,
                        if c.passed { "ok" } else { "FAIL" },
                        c.detail
                    );
                    all_ok &= c.passed;
                }
            }
            Ok(if all_ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

/// Parses a microsquare literal `[comp; comp; ...]` with components in the
/// state variables and d1, d2. State arity is inferred from the variables
/// used; coordinates may stay symbolic in the state.
fn parse_microsquare(text: &str) -> Result<(Cube<Poly>, usize), String> {
    let comps = split_components(text);
    // Infer the state arity from the identifiers used in all components.
    let mut k = 1usize;
    for c in &comps {
        for token in c.split(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_')) {
            if let Some(rest) = token.strip_prefix('x') {
                if let Ok(i) = rest.parse::<usize>() {
                    k = k.max(i);
                }
            }
        }
    }
    k = k.max(comps.len());
    let square = InfType::cube(2);
    let alg = square.algebra();
    let proto = Poly::zero(k);
    // Arguments: state variables as symbolic constants, d1 and d2 as the
    // algebra generators.
    let mut args: Vec<WeilElem<Poly>> = (0..k)
        .map(|i| WeilElem::one_in(alg, Poly::var(i, k)))
        .collect();
    for j in 0..2 {
        let mut coords = vec![Poly::zero(k); alg.dim()];
        let idx = alg
            .basis_index(&Monomial::var(j, 2))
            .expect("generator in basis");
        coords[idx] = Poly::one(k);
        args.push(WeilElem::from_coords(Arc::clone(alg), coords));
    }
    let resolve = move |name: &str| -> Option<usize> {
        if name == "x" {
            return Some(0);
        }
        if let Some(rest) = name.strip_prefix('x') {
            if let Ok(i) = rest.parse::<usize>() {
                if (1..=k).contains(&i) {
                    return Some(i - 1);
                }
            }
        }
        if let Some(rest) = name.strip_prefix('d') {
            if let Ok(j) = rest.parse::<usize>() {
                if (1..=2).contains(&j) {
                    return Some(k + j - 1);
                }
            }
        }
        None
    };
    let mut components = Vec::new();
    for c in &comps {
        let e = parse_expr_with(c, &resolve).map_err(|e| e.to_string())?;
        components.push(e.eval_in_algebra(alg, &args, &proto));
    }
    let cube = Cube::new(square, components);
    Ok((cube, comps.len()))
}
