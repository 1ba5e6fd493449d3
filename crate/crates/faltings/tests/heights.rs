mod common;

use common::*;
use faltings::heights::{
    faltings_stable, hmin_closed, prop54_lower_bound, roots_hp, scan_corpus,
    silverman_sandwich_check, weil_height,
};
use faltings::numctx::PrecisionContext;
use faltings::poly::{parse_poly, IntPolynomial};
use faltings::Error;
use rug::Float;

fn ctx30() -> PrecisionContext {
    PrecisionContext::new(30).unwrap()
}

#[test]
fn roots_examples() {
    let ctx = ctx30();
    let prec = ctx.prec();
    // [TRIVIAL] X^2 + 1 -> {i, -i}
    let r = roots_hp(&IntPolynomial::from_i64(&[1, 0, 1]).unwrap(), &ctx).unwrap();
    assert_eq!(r.len(), 2);
    let im0 = r[0].imag().clone().abs();
    assert!((im0 - 1u32).abs() < ctx.pow10(-25));
    assert!(r[0].real().clone().abs() < ctx.pow10(-25));
    // exact conjugate pairing
    assert_eq!(r[0].real(), r[1].real());
    assert_eq!(r[0].imag().clone(), -r[1].imag().clone());

    // [TRIVIAL] X - 17 -> {17}
    let r = roots_hp(&IntPolynomial::from_i64(&[-17, 1]).unwrap(), &ctx).unwrap();
    assert!((r[0].real().clone() - 17u32).abs() < ctx.pow10(-25));
    assert!(r[0].imag().is_zero());

    // [DERIVED] golden ratio pair against the quadratic formula
    let r = roots_hp(&IntPolynomial::from_i64(&[-1, -1, 1]).unwrap(), &ctx).unwrap();
    let (q1, q2) = oracle_quadratic(1, -1, -1, prec);
    let mut got: Vec<Float> = r.iter().map(|z| z.real().clone()).collect();
    got.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut want = [q2.into_real_imag().0, q1.into_real_imag().0];
    want.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for (g, w) in got.iter().zip(&want) {
        assert!((g.clone() - w).abs() < ctx.pow10(-25));
    }
}

#[test]
fn roots_reject_non_squarefree() {
    let ctx = ctx30();
    let sq = IntPolynomial::from_i64(&[1, 2, 1]).unwrap(); // (x+1)^2
    assert!(matches!(roots_hp(&sq, &ctx), Err(Error::NotSquarefree)));
}

#[test]
fn weil_examples() {
    let ctx = ctx30();
    let prec = ctx.prec();
    // [PAPER] h(1/2) = log 2
    let (t, f, a) = weil_height(&IntPolynomial::from_i64(&[-1, 2]).unwrap(), &ctx).unwrap();
    let ln2 = oracle_ln2(prec);
    assert!((t - &ln2).abs() < ctx.pow10(-25));
    assert!((f - ln2).abs() < ctx.pow10(-25));
    assert!(a.is_zero());

    // [TRIVIAL] h(1) = 0
    let (t, f, a) = weil_height(&IntPolynomial::from_i64(&[-1, 1]).unwrap(), &ctx).unwrap();
    assert!(t.is_zero() && f.is_zero() && a.is_zero());

    // [DERIVED] golden ratio: h = (1/2) log phi, phi from the quadratic formula
    let (t, _, _) = weil_height(&IntPolynomial::from_i64(&[-1, -1, 1]).unwrap(), &ctx).unwrap();
    let (phi, _) = oracle_quadratic(1, -1, -1, prec);
    let want = oracle_ln(&phi.into_real_imag().0) / 2u32;
    assert!((t.clone() - want).abs() < ctx.pow10(-24));
    assert!((t - 0.2406059f64).abs() < 1e-7);
}

#[test]
fn weil_rejects_reducible() {
    let ctx = ctx30();
    let red = IntPolynomial::from_i64(&[-1, 0, 1]).unwrap(); // (x-1)(x+1)
    assert!(matches!(weil_height(&red, &ctx), Err(Error::Reducible(_))));
}

#[test]
fn faltings_stable_examples() {
    let ctx = ctx30();
    // [PAPER] j = 0 attains h_min
    let rep = faltings_stable(&parse_poly("x").unwrap(), &ctx).unwrap();
    assert!((rep.faltings_stable.clone() + 0.74875248550333783f64).abs() < 1e-16);
    assert!(rep.hmin_gap.clone().abs() < ctx.pow10(-20));
    assert!(rep.is_integral_j);

    // [PAPER] h_1 at j = 1
    let rep = faltings_stable(&parse_poly("x - 1").unwrap(), &ctx).unwrap();
    assert!((rep.faltings_stable.clone() + 0.74862817f64).abs() < 1e-8);

    // [DERIVED] j = 1728: V(i) + (1/2) log pi with V(i) from the Gamma(1/4)
    // closed form of log|Delta(i)|
    let rep = faltings_stable(&parse_poly("x - 1728").unwrap(), &ctx).unwrap();
    let prec = ctx.prec();
    let pi = oracle_pi(prec);
    let lg4 = oracle_lgamma(&Float::with_val(prec, 0.25f64));
    let log_delta_i = oracle_ln(&(pi.clone() * 2u32)) * 12u32
        + (lg4 - oracle_ln(&Float::with_val(prec, 2u32)) - oracle_ln(&pi) * 0.75f64) * 24u32;
    let want = -log_delta_i / 12u32 + oracle_ln(&oracle_pi(prec)) / 2u32;
    assert!((rep.faltings_stable.clone() - want).abs() < ctx.pow10(-24));
    assert!((rep.faltings_stable + 0.738168f64).abs() < 1e-6);
}

#[test]
fn report_invariants() {
    let ctx = ctx30();
    for text in ["x - 1728", "2*x - 1", "x^2 - x - 1", "3*x^2 + x + 5"] {
        let rep = faltings_stable(&parse_poly(text).unwrap(), &ctx).unwrap();
        // weil_total = finite + arch
        let d = (rep.weil_finite.clone() + &rep.weil_arch - &rep.weil_total).abs();
        assert!(d < ctx.pow10(-25), "{text}");
        assert!(!rep.weil_finite.is_sign_negative() && !rep.weil_arch.is_sign_negative());
        // is_integral_j <-> finite part 0
        assert_eq!(rep.is_integral_j, rep.weil_finite.is_zero(), "{text}");
        // h_stab above h_min and above the Prop 5.4 lower bound
        assert!(rep.hmin_gap > 0u32, "{text}");
        assert!(rep.faltings_stable > rep.lower_bound_p54, "{text}");
    }
}

#[test]
fn prop54_examples() {
    let ctx = ctx30();
    // [TRIVIAL]
    let b = prop54_lower_bound(&ctx.real(0u32), &ctx.real(0u32), &ctx).unwrap();
    assert!((b + 2.071f64).abs() < 1e-12);
    // [DERIVED] at the Remark 6.1 threshold the bound clears -0.748
    let b = prop54_lower_bound(&(ctx.real(3784u32) / 100u32), &ctx.real(0u32), &ctx).unwrap();
    assert!((b.clone() + 0.74739f64).abs() < 1e-5);
    assert!(b > -0.748f64);
    // [DERIVED] h_j = log 1728
    let l1728 = oracle_ln(&ctx.real(1728u32));
    let b = prop54_lower_bound(&l1728, &ctx.real(0u32), &ctx).unwrap();
    assert!((b + 2.5171358f64).abs() < 1e-6);
    // negative input rejected
    assert!(matches!(
        prop54_lower_bound(&ctx.real(-1i32), &ctx.real(0u32), &ctx),
        Err(Error::NegativeInput(_))
    ));
}

#[test]
fn sandwich_examples() {
    let ctx = ctx30();
    for text in ["x", "x - 1", "x - 1728"] {
        let rep = faltings_stable(&parse_poly(text).unwrap(), &ctx).unwrap();
        assert!(silverman_sandwich_check(&rep, &ctx), "{text}");
    }
}

#[test]
fn scan_order_examples() {
    let ctx = ctx30();
    let polys = vec![
        parse_poly("x - 1728").unwrap(),
        parse_poly("x").unwrap(),
        parse_poly("x - 1").unwrap(),
    ];
    let out = scan_corpus(&polys, &ctx);
    assert!(out.errors.is_empty());
    let names: Vec<String> = out.reports.iter().map(|r| r.poly.to_string()).collect();
    assert_eq!(names, ["x", "x - 1", "x - 1728"]);
    let h: Vec<f64> = out.reports.iter().map(|r| r.faltings_stable.to_f64()).collect();
    assert!((h[0] + 0.74875248).abs() < 1e-7);
    assert!((h[1] + 0.74862817).abs() < 1e-7);
    assert!((h[2] + 0.738168).abs() < 1e-5);
}

#[test]
fn scan_aggregates_errors() {
    let ctx = ctx30();
    let polys = vec![parse_poly("x - 1").unwrap(), parse_poly("x^2 - 1").unwrap()];
    let out = scan_corpus(&polys, &ctx);
    assert_eq!(out.reports.len(), 1);
    assert_eq!(out.errors.len(), 1);
}

#[test]
fn weil_inversion_invariance() {
    // h(alpha) = h(1/alpha) via the reversed polynomial, on 20 corpus entries
    let ctx = ctx30();
    let corpus = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../corpus/cyclotomic_salem.txt"
    ))
    .unwrap();
    let mut checked = 0;
    for line in corpus.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line == "x" {
            continue; // alpha = 0 has no inverse
        }
        if checked >= 20 {
            break;
        }
        let p = parse_poly(line).unwrap();
        let (h, _, _) = weil_height(&p, &ctx).unwrap();
        let (h_inv, _, _) = weil_height(&p.reversed().unwrap(), &ctx).unwrap();
        assert!((h - h_inv).abs() < ctx.pow10(-24), "{line}");
        checked += 1;
    }
    assert_eq!(checked, 20);
}

#[test]
fn digits_independence() {
    // faltings_stable at 15 vs 40 digits agrees to 12 decimals
    let c15 = PrecisionContext::new(15).unwrap();
    let c40 = PrecisionContext::new(40).unwrap();
    for text in ["x - 1", "x^2 - x - 1", "x - 1728"] {
        let p = parse_poly(text).unwrap();
        let a = faltings_stable(&p, &c15).unwrap().faltings_stable.to_f64();
        let b = faltings_stable(&p, &c40).unwrap().faltings_stable.to_f64();
        assert!((a - b).abs() < 1e-12, "{text}");
    }
}

#[test]
fn hmin_closed_value() {
    // [PAPER] h_min decimal expansion and the Stirling Gamma oracle
    let ctx = PrecisionContext::new(50).unwrap();
    let prec = ctx.prec();
    let h = hmin_closed(&ctx);
    assert!((h.clone() + 0.74875248550333783f64).abs() < 1e-15);
    let lg13 = oracle_lgamma(&(Float::with_val(prec, 1u32) / 3u32));
    let lg23 = oracle_lgamma(&(Float::with_val(prec, 2u32) / 3u32));
    let want = -((lg13 - lg23) * 3u32 - oracle_ln(&Float::with_val(prec, 3u32)) / 2u32) / 2u32;
    assert!((h - want).abs() < ctx.pow10(-45));
}

#[test]
fn lemma62_threshold() {
    // a polynomial with all roots inside e^{-37.84} has Weil height >= 37.84
    // and the Prop 5.4 route then clears h_min + 0.0007
    let ctx = ctx30();
    // alpha = 1/N with log N > 37.84: minimal polynomial N x - 1
    let n_big = Float::with_val(ctx.prec(), 38f64).exp();
    let n_int = n_big.to_integer().unwrap();
    let p = IntPolynomial::new(vec![rug::Integer::from(-1), n_int]).unwrap();
    let (h, _, _) = weil_height(&p, &ctx).unwrap();
    assert!(h >= 37.84f64);
    let bound = prop54_lower_bound(&h, &ctx.real(0u32), &ctx).unwrap();
    let hmin = hmin_closed(&ctx);
    assert!(bound > hmin + 0.0007f64);
}
