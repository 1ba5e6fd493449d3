//! End-to-end acceptance checks, one per criterion, each printing a
//! PASS/FAIL line (run with --nocapture to see them on success).

mod common;

use std::panic::{catch_unwind, resume_unwind, UnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use faltings::certify::{certify, derived_constants_check, e2_zero_on_half_line, GridSpec, LemmaId};
use faltings::construct::{auto_p, build_eisenstein, family_heights, height_formula, verify_eisenstein, EisensteinSpec};
use faltings::heights::{hmin_closed, scan_corpus, silverman_sandwich_check, weil_height};
use faltings::modular::{e2_eval, inverse_j, j_eval, log_abs_delta_unreduced, reduce_fd, v_eval, UHPoint};
use faltings::numctx::{PrecisionContext, SeriesTerms};
use faltings::poly::parse_poly;
use faltings::report::GapJson;
use rug::{Float, Integer};

fn check(n: u32, name: &str, budget: Duration, f: impl FnOnce() + UnwindSafe) {
    let t0 = Instant::now();
    let r = catch_unwind(f);
    let dt = t0.elapsed();
    let timely = dt <= budget;
    println!(
        "criterion {n} ({name}): {} [{:.2}s]",
        if r.is_ok() && timely { "PASS" } else { "FAIL" },
        dt.as_secs_f64()
    );
    if let Err(e) = r {
        resume_unwind(e);
    }
    assert!(timely, "criterion {n} exceeded {budget:?}: {dt:?}");
}

fn cli(args: &[&str]) -> (i32, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_faltings")).args(args).output().unwrap();
    (o.status.code().unwrap(), String::from_utf8(o.stdout).unwrap())
}

fn corpus_path() -> &'static str {
    concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus/cyclotomic_salem.txt")
}

fn corpus_polys() -> Vec<faltings::poly::IntPolynomial> {
    std::fs::read_to_string(corpus_path())
        .unwrap()
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| parse_poly(l).unwrap())
        .collect()
}

#[test]
fn criterion_1_hmin() {
    check(1, "hmin closed form", Duration::from_secs(1), || {
        let (code, out) = cli(&["hmin", "--digits", "50"]);
        assert_eq!(code, 0);
        assert!(out.contains("-7.4875248"), "{out}");
        let diff: f64 = out
            .lines()
            .find(|l| l.starts_with("|difference|"))
            .unwrap()
            .split('=')
            .nth(1)
            .unwrap()
            .trim()
            .parse()
            .unwrap();
        assert!(diff < 1e-40);
    });
}

#[test]
fn criterion_2_height_j1() {
    check(2, "height at j = 1", Duration::from_secs(1), || {
        let (code, out) = cli(&["height", "--poly", "x - 1"]);
        assert_eq!(code, 0);
        let h: f64 = out
            .lines()
            .find(|l| l.starts_with("faltings_stable"))
            .unwrap()
            .split('=')
            .nth(1)
            .unwrap()
            .trim()
            .parse()
            .unwrap();
        assert!((h + 0.74862817).abs() < 1e-8);
    });
}

#[test]
fn criterion_3_gap_constant() {
    check(3, "gap constant", Duration::from_secs(60), || {
        let (code, out) = cli(&["gap", "--digits", "60", "--json"]);
        assert_eq!(code, 0);
        let j: GapJson = serde_json::from_str(&out).unwrap();
        let p_star: f64 = j.p_star.parse().unwrap();
        let gap: f64 = j.gap.parse().unwrap();
        assert!((p_star - 0.964).abs() < 5e-4);
        assert!((gap - 4.601e-18).abs() < 1e-21);
        assert_eq!(j.final_gap, j.gap);
    });
}

#[test]
fn criterion_4_certify_all() {
    check(4, "certify all lemmas", Duration::from_secs(300), || {
        let ctx = PrecisionContext::new(30).unwrap();
        let grid = GridSpec::default();
        for id in LemmaId::ALL {
            let r = certify(id, &grid, &ctx).unwrap();
            assert!(r.passed && r.violations.is_empty(), "{}", r.lemma_id);
        }
        for delta in [0.3f64, 0.1, 0.01] {
            let spec = GridSpec::new(100, 100, 5.0, delta).unwrap();
            let r = certify(LemmaId::L64, &spec, &ctx).unwrap();
            assert!(r.passed, "l64 at delta = {delta}");
        }
        assert!(derived_constants_check(&ctx).passed);
    });
}

#[test]
fn criterion_5_e2_diagnostics() {
    check(5, "E2 diagnostics", Duration::from_secs(60), || {
        let ctx = PrecisionContext::new(30).unwrap();
        let prec = ctx.prec();
        let e2_rho = e2_eval(&UHPoint::rho(&ctx), &ctx).unwrap();
        assert!(e2_rho.abs().into_real_imag().0 < 1e-25f64);
        let y0 = e2_zero_on_half_line(&ctx).unwrap();
        assert!((y0 - ctx.sqrt3() / 2u32).abs() < 1e-6);
        // finite-difference identity at 20 points
        let mut rng = Rng::new(101);
        let h = ctx.pow10(-(ctx.digits() as i32) / 3);
        let bound = h.clone().square() * 10u32;
        let pi6 = oracle_pi(prec) / 6u32;
        let mut n = 0;
        while n < 20 {
            let x = rng.uniform(-0.45, 0.45);
            let y = rng.uniform(0.9, 3.0);
            if x * x + y * y < 1.05 {
                continue;
            }
            n += 1;
            let v = |xx: Float, yy: Float| v_eval(&UHPoint::new(xx, yy).unwrap(), &ctx).unwrap();
            let xf = Float::with_val(prec, x);
            let yf = Float::with_val(prec, y);
            let dvx = (v(xf.clone() + &h, yf.clone()) - v(xf.clone() - &h, yf.clone()))
                / (h.clone() * 2u32);
            let dvy = (v(xf.clone(), yf.clone() + &h) - v(xf.clone(), yf.clone() - &h))
                / (h.clone() * 2u32);
            let (re, im) = e2_eval(&UHPoint::new(xf, yf).unwrap(), &ctx).unwrap().into_real_imag();
            assert!((dvx - pi6.clone() * im).abs() < bound);
            assert!((dvy - pi6.clone() * re).abs() < bound);
        }
    });
}

#[test]
fn criterion_6_eisenstein_family() {
    check(6, "Eisenstein families", Duration::from_secs(10), || {
        let ctx = PrecisionContext::new(30).unwrap();
        let fam = family_heights(50, &ctx).unwrap();
        assert_eq!(fam.len(), 50);
        let spec = EisensteinSpec::new(1, 17).unwrap();
        let r = build_eisenstein(&spec, &ctx).unwrap();
        assert_eq!(r.f_coeffs, vec![Integer::from(17), Integer::from(1)]);
        assert!(verify_eisenstein(&r));
        let (h0, _) = height_formula(100, 17, &ctx);
        assert!((h0 - 0.00944404f64).abs() < 1e-8);
        // some n <= 100 with auto primes comes within 0.01 of h_min
        let hit = (51..=100u32).map(|n| height_formula(n, auto_p(n), &ctx).0).any(|h0| h0 < 0.01f64)
            || fam.iter().any(|(_, _, h0, _)| h0.clone() < 0.01f64);
        assert!(hit);
    });
}

#[test]
fn criterion_7_corpus_scan() {
    check(7, "corpus scan", Duration::from_secs(120), || {
        let ctx = PrecisionContext::new(30).unwrap();
        let out = scan_corpus(&corpus_polys(), &ctx);
        assert!(out.errors.is_empty());
        assert!(out.reports.len() >= 20);
        let hmin = hmin_closed(&ctx);
        for r in &out.reports {
            assert!(silverman_sandwich_check(r, &ctx), "{}", r.poly);
            if r.poly.to_string() == "x" {
                assert!(r.hmin_gap.clone().abs() < ctx.pow10(-20));
            } else {
                assert!(r.faltings_stable > hmin, "{}", r.poly);
            }
        }
        assert_eq!(out.reports[0].poly.to_string(), "x");
        assert_eq!(out.reports[1].poly.to_string(), "x - 1");
    });
}

#[test]
fn criterion_8_consistency() {
    check(8, "internal consistency", Duration::from_secs(120), || {
        let ctx = PrecisionContext::new(30).unwrap();
        // j round trip on 100 samples
        let mut rng = Rng::new(42);
        let bound = ctx.pow10(-(ctx.digits() as i32 - 6));
        let mut n = 0;
        while n < 100 {
            let x = rng.uniform(-0.5, 0.5);
            let y = rng.uniform(0.87, 10.0);
            if x * x + y * y < 1.02 {
                continue;
            }
            n += 1;
            let tau = reduce_fd(&UHPoint::from_f64(&ctx, x, y).unwrap(), &ctx).unwrap();
            let j = j_eval(tau.point(), &ctx).unwrap();
            let back = inverse_j(&j, &ctx).unwrap();
            assert!((back.point().x().clone() - tau.point().x()).abs() < bound);
            assert!((back.point().y().clone() - tau.point().y()).abs() < bound);
        }
        // Weil inversion invariance on 20 corpus entries
        let mut checked = 0;
        for p in corpus_polys() {
            if checked >= 20 || p.to_string() == "x" {
                continue;
            }
            let (h, _, _) = weil_height(&p, &ctx).unwrap();
            let (h_inv, _, _) = weil_height(&p.reversed().unwrap(), &ctx).unwrap();
            assert!((h - h_inv).abs() < ctx.pow10(-24), "{p}");
            checked += 1;
        }
        assert_eq!(checked, 20);
        // Delta modularity: unit translation and inversion
        let tau = UHPoint::from_f64(&ctx, 0.21, 1.3).unwrap();
        let l = log_abs_delta_unreduced(&tau, &ctx).unwrap();
        let shifted = UHPoint::new(tau.x().clone() + 1u32, tau.y().clone()).unwrap();
        assert!((log_abs_delta_unreduced(&shifted, &ctx).unwrap() - &l).abs() < ctx.pow10(-24));
        let norm = tau.x().clone().square() + tau.y().clone().square();
        let inv = UHPoint::new(-tau.x().clone() / &norm, tau.y().clone() / &norm).unwrap();
        let want = l + norm.ln() * 6u32; // 12 log|tau| = 6 log|tau|^2
        assert!((log_abs_delta_unreduced(&inv, &ctx).unwrap() - want).abs() < ctx.pow10(-24));
        // truncation doubling stability
        let terms = ctx.series_terms();
        let c1 = PrecisionContext::new(30).unwrap().with_series_terms(SeriesTerms::Fixed(terms));
        let c2 = PrecisionContext::new(30).unwrap().with_series_terms(SeriesTerms::Fixed(2 * terms));
        let t = UHPoint::from_f64(&c1, 0.13, 1.02).unwrap();
        let d = (log_abs_delta_unreduced(&t, &c1).unwrap() - log_abs_delta_unreduced(&t, &c2).unwrap()).abs();
        assert!(d < c1.pow10(-30));
    });
}
