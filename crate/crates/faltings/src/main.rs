use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rug::Float;

use faltings::certify::{certify, GridSpec, LemmaId};
use faltings::construct::{build_eisenstein, auto_p, EisensteinSpec};
use faltings::gap::maximize_gap;
use faltings::heights::{faltings_stable, hmin_closed, scan_corpus};
use faltings::modular::{v_eval, UHPoint};
use faltings::numctx::PrecisionContext;
use faltings::poly::{parse_poly, IntPolynomial};
use faltings::report::{
    dec, CertifyJson, ConstructJson, GapJson, HeightJson, ScanErrorJson, ScanJson,
};
use faltings::Error;

#[derive(Parser)]
#[command(name = "faltings", version, disable_help_subcommand = true)]
#[command(about = "Stable Faltings heights, the height-gap constant, lemma certification, and Eisenstein curve families")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print Deligne's minimum h_min via the Gamma closed form and the
    /// modular kernel cross-check.
    Hmin {
        #[arg(long, default_value_t = 40)]
        digits: u32,
    },
    /// Stable Faltings height of the curves with j-invariant a root of the
    /// given polynomial.
    Height {
        /// polynomial expression in x, e.g. "x^2 - x - 1"
        #[arg(long, conflicts_with = "coeffs")]
        poly: Option<String>,
        /// comma-separated coefficients, low to high, e.g. "-1,-1,1"
        #[arg(long, allow_hyphen_values = true)]
        coeffs: Option<String>,
        #[arg(long, default_value_t = 40)]
        digits: u32,
        #[arg(long)]
        json: bool,
    },
    /// Maximize the gap function (1-P) C(delta'(P)).
    Gap {
        #[arg(long, default_value_t = 60)]
        digits: u32,
        #[arg(long, default_value_t = 0.5)]
        pmin: f64,
        #[arg(long, default_value_t = 0.9999)]
        pmax: f64,
        #[arg(long, default_value_t = 1e-6)]
        tolp: f64,
        #[arg(long)]
        json: bool,
    },
    /// Certify an inequality lemma by grid sampling.
    Certify {
        /// one of fp_i, fp_ii, fp_iii, l53, l54, bilu, e2id, vmono, l64, r61
        #[arg(long)]
        lemma: String,
        /// grid resolution, e.g. 100x100
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, default_value_t = 5.0)]
        ymax: f64,
        /// exclusion radius around rho (lemma l64)
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        #[arg(long, default_value_t = 40)]
        digits: u32,
        #[arg(long)]
        json: bool,
    },
    /// Build and verify the degree-n Eisenstein polynomial family member.
    Construct {
        #[arg(long)]
        n: u32,
        /// prime, defaults to 17 for odd n and 19 for even n
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Heights for every polynomial in a corpus file, sorted ascending.
    Scan {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 40)]
        digits: u32,
        #[arg(long)]
        json: bool,
    },
}

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::Parse { .. }
        | Error::UnknownLemma(_)
        | Error::InvalidGrid(_)
        | Error::InvalidContext(_)
        | Error::UnsupportedArgument { .. }
        | Error::NonIntegerCoefficient(_)
        | Error::ZeroPolynomial
        | Error::ConstantPolynomial => 1,
        Error::NoConvergence(_)
        | Error::InsufficientPrecision(_)
        | Error::PrecisionExhausted(_)
        | Error::NotUnimodal
        | Error::DomainTooLow(_) => 2,
        Error::NotSquarefree
        | Error::Reducible(_)
        | Error::BadCongruence { .. }
        | Error::NotPrime(_)
        | Error::OutOfRange(_)
        | Error::NegativeInput(_) => 3,
    }
}

fn run(cmd: Cmd) -> Result<u8, Error> {
    match cmd {
        Cmd::Hmin { digits } => {
            let ctx = PrecisionContext::new(digits)?;
            let closed = hmin_closed(&ctx);
            let modular = v_eval(&UHPoint::rho(&ctx), &ctx)? + ctx.pi().ln() / 2u32;
            let diff = (closed.clone() - &modular).abs();
            println!("h_min (Gamma closed form)   = {}", dec(&closed, digits));
            println!("V(rho) + (1/2) log pi       = {}", dec(&modular, digits));
            println!("|difference|                = {}", dec(&diff, 3));
            Ok(0)
        }
        Cmd::Height { poly, coeffs, digits, json } => {
            let (input, p) = match (poly, coeffs) {
                (Some(t), None) => {
                    let p = parse_poly(&t)?;
                    (t, p)
                }
                (None, Some(t)) => (t.clone(), parse_coeff_list(&t)?),
                _ => {
                    eprintln!("error: exactly one of --poly or --coeffs is required");
                    return Ok(1);
                }
            };
            let ctx = PrecisionContext::new(digits)?;
            let rep = faltings_stable(&p, &ctx)?;
            let hmin = hmin_closed(&ctx);
            if json {
                let j = HeightJson::new(&input, &rep, &hmin, &ctx);
                println!("{}", serde_json::to_string_pretty(&j).unwrap());
            } else {
                print_height_text(&rep, &hmin, digits);
            }
            Ok(0)
        }
        Cmd::Gap { digits, pmin, pmax, tolp, json } => {
            let ctx = PrecisionContext::new(digits)?;
            let g = maximize_gap(&ctx, &ctx.real(pmin), &ctx.real(pmax), &ctx.real(tolp))?;
            if json {
                println!("{}", serde_json::to_string_pretty(&GapJson::new(&g)).unwrap());
            } else {
                println!("p_star      = {}", dec(&g.p_star, digits));
                println!("eps         = {}", dec(&g.eps, digits));
                println!("delta       = {}", dec(&g.delta, digits));
                println!("delta_prime = {}", dec(&g.delta_prime, digits));
                println!("C(delta')   = {}", dec(&g.c_value, digits));
                println!("gap         = {}", dec(&g.gap, digits));
                println!("final_gap   = {}", dec(&g.final_gap, digits));
            }
            Ok(0)
        }
        Cmd::Certify { lemma, grid, ymax, delta, digits, json } => {
            let id: LemmaId = lemma.parse()?;
            let (nx, ny) = match grid.as_deref() {
                None => (100, 100),
                Some(g) => parse_grid(g)?,
            };
            let spec = GridSpec::new(nx, ny, ymax, delta)?;
            let ctx = PrecisionContext::new(digits)?;
            let r = certify(id, &spec, &ctx)?;
            if json {
                let j = CertifyJson::new(&r, &ctx);
                println!("{}", serde_json::to_string_pretty(&j).unwrap());
            } else {
                println!(
                    "lemma {}: {} ({} points, min margin {})",
                    r.lemma_id,
                    if r.passed { "PASS" } else { "FAIL" },
                    r.points_checked,
                    dec(&r.min_margin, 6),
                );
                for v in &r.violations {
                    println!(
                        "  violation at ({}, {}): lhs {} > rhs {}",
                        dec(&v.x, 6),
                        dec(&v.y, 6),
                        dec(&v.lhs, 10),
                        dec(&v.rhs, 10),
                    );
                }
            }
            Ok(if r.passed { 0 } else { 4 })
        }
        Cmd::Construct { n, p, json } => {
            let p = p.unwrap_or_else(|| auto_p(n));
            let ctx = PrecisionContext::new(40)?;
            let spec = EisensteinSpec::new(n, p)?;
            let r = build_eisenstein(&spec, &ctx)?;
            if json {
                let j = ConstructJson::new(&r, &ctx);
                println!("{}", serde_json::to_string_pretty(&j).unwrap());
            } else {
                println!("n = {n}, p = {p}");
                println!("b = [{}]", join(&r.b));
                println!("f = [{}]  (coefficients of X^n, ..., X, 1)", join_rev(&r.f_coeffs));
                println!("h0     = {}", dec(&r.h0, 40));
                println!("height = {}", dec(&r.height, 40));
            }
            Ok(0)
        }
        Cmd::Scan { corpus, digits, json } => {
            let text = std::fs::read_to_string(&corpus).map_err(|e| Error::Parse {
                pos: 0,
                msg: format!("cannot read {}: {e}", corpus.display()),
            })?;
            let mut polys: Vec<IntPolynomial> = vec![];
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                polys.push(parse_poly(line).map_err(|e| Error::Parse {
                    pos: i + 1,
                    msg: format!("line {}: {e}", i + 1),
                })?);
            }
            let ctx = PrecisionContext::new(digits)?;
            let outcome = scan_corpus(&polys, &ctx);
            let hmin = hmin_closed(&ctx);
            if json {
                let j = ScanJson {
                    schema: faltings::report::SCHEMA,
                    corpus: corpus.display().to_string(),
                    digits,
                    reports: outcome
                        .reports
                        .iter()
                        .map(|r| HeightJson::new(&r.poly.to_string(), r, &hmin, &ctx))
                        .collect(),
                    errors: outcome
                        .errors
                        .iter()
                        .map(|(input, e)| ScanErrorJson {
                            input: input.clone(),
                            error: e.to_string(),
                        })
                        .collect(),
                };
                println!("{}", serde_json::to_string_pretty(&j).unwrap());
            } else {
                for r in &outcome.reports {
                    println!(
                        "{:<24}  h_stab = {}  gap = {}",
                        r.poly.to_string(),
                        dec(&r.faltings_stable, 12),
                        dec(&r.hmin_gap, 6),
                    );
                }
                for (input, e) in &outcome.errors {
                    println!("{input:<24}  skipped: {e}");
                }
            }
            Ok(0)
        }
    }
}

fn print_height_text(rep: &faltings::heights::HeightReport, hmin: &Float, digits: u32) {
    println!("polynomial      = {}", rep.poly);
    println!("degree          = {}", rep.degree);
    println!("weil height     = {}", dec(&rep.weil_total, digits));
    println!("  finite part   = {}", dec(&rep.weil_finite, digits));
    println!("  arch part     = {}", dec(&rep.weil_arch, digits));
    println!("faltings_stable = {}", dec(&rep.faltings_stable, digits));
    println!("h_min           = {}", dec(hmin, digits));
    println!("gap to h_min    = {}", dec(&rep.hmin_gap, digits));
    for r in &rep.per_root {
        println!(
            "  root {} + {}i  ->  tau {} + {}i,  V = {}",
            dec(r.root.real(), 8),
            dec(r.root.imag(), 8),
            dec(r.tau.point().x(), 8),
            dec(r.tau.point().y(), 8),
            dec(&r.v, 12),
        );
    }
}

fn parse_coeff_list(t: &str) -> Result<IntPolynomial, Error> {
    let coeffs: Result<Vec<rug::Integer>, Error> = t
        .split(',')
        .map(|c| {
            c.trim()
                .parse()
                .map_err(|_| Error::Parse { pos: 0, msg: format!("bad coefficient `{}`", c.trim()) })
        })
        .collect();
    IntPolynomial::new(coeffs?)
}

fn parse_grid(g: &str) -> Result<(usize, usize), Error> {
    let bad = || Error::InvalidGrid(format!("expected NxM, got `{g}`"));
    let (a, b) = g.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?))
}

fn join(v: &[rug::Integer]) -> String {
    v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")
}

fn join_rev(v: &[rug::Integer]) -> String {
    v.iter().rev().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap's own help/version requests are still exit 0
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}
