//! The gap-function pipeline eps(P) -> delta -> delta' -> C(delta') and its
//! maximization over P, producing the explicit gap constant 4.601e-18.
//!
//! C(delta') is an 8-digit cancellation (O(delta') terms combining to
//! O(delta'^2)); the final two fractions are merged over a common denominator
//! and every exponential difference goes through expm1/ln1p. The precondition
//! on `c_of_delta_prime` formalizes the required precision margin.

use rayon::prelude::*;
use rug::ops::CompleteRound;
use rug::Float;

use crate::error::{Error, Result};
use crate::numctx::PrecisionContext;

/// Output of the gap maximization.
#[derive(Debug, Clone)]
pub struct GapResult {
    pub p_star: Float,
    pub eps: Float,
    pub delta: Float,
    pub delta_prime: Float,
    pub c_value: Float,
    pub gap: Float,
    pub final_gap: Float,
    pub digits_used: u32,
}

fn rat(ctx: &PrecisionContext, num: u32, den: u32) -> Float {
    ctx.real(num) / den
}

/// eps(P) = e^{-37.84/P} on 0 < P < 1.
pub fn eps_of_p(p: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if !(p.is_sign_positive() && !p.is_zero() && *p < 1u32) {
        return Err(Error::OutOfRange(format!("P = {p} outside (0, 1)")));
    }
    let a = rat(ctx, 3784, 100);
    Ok((-a / p).exp())
}

/// delta = 0.027 * eps^{1/3} under the Lemma 6.3 hypothesis eps <= 5.08e-5.
pub fn delta_of_eps(eps: &Float, ctx: &PrecisionContext) -> Result<Float> {
    let hi = ctx.real(508u32) / ctx.pow10(7);
    if eps.is_sign_negative() && !eps.is_zero() {
        return Err(Error::OutOfRange(format!("eps = {eps} negative")));
    }
    if *eps > hi {
        return Err(Error::OutOfRange(format!("eps = {eps} above 5.08e-5")));
    }
    Ok(rat(ctx, 27, 1000) * eps.clone().root(3))
}

/// delta' = delta/2 * sqrt(1 - delta^2/4) - sqrt(3)/4 * delta^2 on [0, 1/2).
pub fn delta_prime(delta: &Float, ctx: &PrecisionContext) -> Result<Float> {
    let half = rat(ctx, 1, 2);
    if (delta.is_sign_negative() && !delta.is_zero()) || *delta >= half {
        return Err(Error::OutOfRange(format!("delta = {delta} outside [0, 1/2)")));
    }
    let prec = ctx.prec();
    let d2 = delta.clone().square();
    let circ = (Float::with_val(prec, 1) - d2.clone() / 4u32).sqrt();
    Ok(delta.clone() / 2u32 * circ - ctx.sqrt3() / 4u32 * d2)
}

/// Minimum working digits for C at this delta': the leading terms are
/// O(delta') but the value is O(delta'^2), so ~2 log10(1/delta') digits
/// cancel.
fn c_digits_needed(dp: &Float) -> u32 {
    let lg = -dp.to_f64().log10();
    (2.0 * lg).ceil() as u32 + 15
}

/// The six-term C(delta') of Lemma 6.4, with the last two fractions combined
/// over a common denominator (the dominant cancellation site).
pub fn c_of_delta_prime(dp: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if dp.is_sign_negative() && !dp.is_zero() {
        return Err(Error::OutOfRange(format!("delta' = {dp} negative")));
    }
    if !dp.is_zero() && ctx.digits() < c_digits_needed(dp) {
        return Err(Error::InsufficientPrecision(format!(
            "C(delta') at delta' = {:.3e} needs >= {} digits, context has {}",
            dp.to_f64(),
            c_digits_needed(dp),
            ctx.digits()
        )));
    }
    let prec = ctx.prec();
    let pi = ctx.pi();
    let q = ctx.q_rho();
    let q2 = q.clone().square();
    let q3 = (&q * &q2).complete(prec);

    let t1 = (&pi / 6u32).complete(prec) * dp;
    let t2 = -(rat(ctx, 2, 1) / ctx.sqrt3() * dp).ln_1p() / 2u32;
    // 2q(1 - e^{-2 pi delta'})/(1+q)
    let e2 = ((&pi * dp).complete(prec) * -2i32).exp_m1();
    let t3 = (&q * 2u32).complete(prec) * -e2 / (Float::with_val(prec, 1) + &q);
    // 2q^3(1 - e^{-6 pi delta'})/(1+q^3)
    let e6 = ((&pi * dp).complete(prec) * -6i32).exp_m1();
    let t4 = (&q3 * 2u32).complete(prec) * -e6 / (Float::with_val(prec, 1) + &q3);
    // 2/((1-q^2)(1-q^2 t^2)) - 2/(1-q^2)^2
    //   = 2 q^2 expm1(-4 pi delta') / ((1-q^2)^2 (1-q^2 t^2))
    let em4 = ((&pi * dp).complete(prec) * -4i32).exp_m1();
    let t2sq = (&em4 + 1u32).complete(prec); // e^{-4 pi delta'}
    let mut one_m_q2 = Float::with_val(prec, 1);
    one_m_q2 -= &q2;
    let denom = one_m_q2.clone().square() * (Float::with_val(prec, 1) - &q2 * t2sq);
    let t56 = (&q2 * 2u32).complete(prec) * em4 / denom;

    Ok(t1 + t2 + t3 + t4 + t56)
}

/// The gap function P -> (1-P) C(delta'(P)).
pub fn gap_fn(p: &Float, ctx: &PrecisionContext) -> Result<Float> {
    let eps = eps_of_p(p, ctx)?;
    let delta = delta_of_eps(&eps, ctx)?;
    let dp = delta_prime(&delta, ctx)?;
    let c = c_of_delta_prime(&dp, ctx)?;
    let prec = ctx.prec();
    Ok((Float::with_val(prec, 1) - p) * c)
}

const COARSE_POINTS: usize = 2048;

/// Coarse scan plus golden-section refinement of the gap function.
pub fn maximize_gap(
    ctx: &PrecisionContext,
    p_lo: &Float,
    p_hi: &Float,
    tol_p: &Float,
) -> Result<GapResult> {
    if !(p_lo.is_sign_positive() && !p_lo.is_zero() && *p_hi < 1u32 && p_lo <= p_hi) {
        return Err(Error::OutOfRange(format!(
            "need 0 < p_lo <= p_hi < 1, got [{p_lo}, {p_hi}]"
        )));
    }
    let prec = ctx.prec();
    let width = (p_hi - p_lo).complete(prec);

    let p_star = if width <= *tol_p {
        // degenerate interval
        (p_lo + p_hi).complete(prec) / 2u32
    } else {
        let grid: Vec<Float> = (0..COARSE_POINTS)
            .map(|i| {
                p_lo.clone() + &width * Float::with_val(prec, i as u32) / (COARSE_POINTS as u32 - 1)
            })
            .collect();
        let vals: Vec<Float> = grid
            .par_iter()
            .map(|p| gap_fn(p, ctx))
            .collect::<Result<Vec<_>>>()?;

        // empirical unimodality: local maxima above 0.9x the best must form a
        // single contiguous block
        let best_idx = (0..vals.len())
            .max_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap())
            .unwrap();
        let threshold = vals[best_idx].clone() * rat(ctx, 9, 10);
        let mut blocks = 0usize;
        let mut in_block = false;
        for i in 0..vals.len() {
            let is_peak = (i == 0 || vals[i] >= vals[i - 1])
                && (i + 1 == vals.len() || vals[i] >= vals[i + 1])
                && vals[i] >= threshold
                && vals[i].is_sign_positive();
            if is_peak && !in_block {
                blocks += 1;
            }
            in_block = is_peak;
        }
        if blocks > 1 {
            return Err(Error::NotUnimodal);
        }

        // golden-section refinement on the bracketing neighbors
        let mut a = grid[best_idx.saturating_sub(1)].clone();
        let mut b = grid[(best_idx + 1).min(grid.len() - 1)].clone();
        let phi = (ctx.real(5u32).sqrt() - 1u32) / 2u32; // 0.618...
        let mut x1 = b.clone() - (&b - &a).complete(prec) * &phi;
        let mut x2 = a.clone() + (&b - &a).complete(prec) * &phi;
        let mut f1 = gap_fn(&x1, ctx)?;
        let mut f2 = gap_fn(&x2, ctx)?;
        while (&b - &a).complete(prec) > *tol_p {
            if f1 < f2 {
                a = x1;
                x1 = x2.clone();
                f1 = f2.clone();
                x2 = a.clone() + (&b - &a).complete(prec) * &phi;
                f2 = gap_fn(&x2, ctx)?;
            } else {
                b = x2;
                x2 = x1.clone();
                f2 = f1.clone();
                x1 = b.clone() - (&b - &a).complete(prec) * &phi;
                f1 = gap_fn(&x1, ctx)?;
            }
        }
        (a + b) / 2u32
    };

    let eps = eps_of_p(&p_star, ctx)?;
    let delta = delta_of_eps(&eps, ctx)?;
    let dp = delta_prime(&delta, ctx)?;
    let c_value = c_of_delta_prime(&dp, ctx)?;
    let gap = (Float::with_val(prec, 1) - &p_star) * &c_value;
    let cap = rat(ctx, 7, 10000);
    let final_gap = if gap < cap { gap.clone() } else { cap };
    Ok(GapResult {
        p_star,
        eps,
        delta,
        delta_prime: dp,
        c_value,
        gap,
        final_gap,
        digits_used: ctx.digits(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx60() -> PrecisionContext {
        PrecisionContext::new(60).unwrap()
    }

    #[test]
    fn eps_boundaries() {
        let ctx = ctx60();
        assert!(matches!(
            eps_of_p(&ctx.real(1u32), &ctx),
            Err(Error::OutOfRange(_))
        ));
        assert!(matches!(
            eps_of_p(&ctx.zero(), &ctx),
            Err(Error::OutOfRange(_))
        ));
        // eps < 5.08e-5 for all P in (0,1): check near the supremum
        let e = eps_of_p(&(ctx.real(999999u32) / 1000000u32), &ctx).unwrap();
        assert!(e < ctx.real(508u32) / ctx.pow10(7));
    }

    #[test]
    fn eps_at_0964() {
        let ctx = ctx60();
        let e = eps_of_p(&(ctx.real(964u32) / 1000u32), &ctx).unwrap();
        // oracle: 40-digit evaluation of exp(-37.84/0.964)
        let want = ctx.real(8.9658206366462805912e-18f64);
        assert!(((e - &want) / want).abs() < ctx.real(1e-10));
    }

    #[test]
    fn delta_examples() {
        let ctx = ctx60();
        assert!(delta_of_eps(&ctx.zero(), &ctx).unwrap().is_zero());
        assert!(matches!(
            delta_of_eps(&ctx.real(1e-4f64), &ctx),
            Err(Error::OutOfRange(_))
        ));
        // boundary eps: delta stays within the Bilu radius 0.001
        let d = delta_of_eps(&(ctx.real(508u32) / ctx.pow10(7)), &ctx).unwrap();
        assert!(d <= ctx.real(1u32) / 1000u32);
        assert!(d > ctx.real(9u32) / 10000u32);
    }

    #[test]
    fn delta_prime_examples() {
        let ctx = ctx60();
        assert!(delta_prime(&ctx.zero(), &ctx).unwrap().is_zero());
        assert!(matches!(
            delta_prime(&(ctx.real(1u32) / 2u32), &ctx),
            Err(Error::OutOfRange(_))
        ));
        // delta = 0.1 -> 0.0456073...
        let dp = delta_prime(&(ctx.real(1u32) / 10u32), &ctx).unwrap();
        assert!((dp - ctx.real(0.045607333869673254f64)).abs() < ctx.real(1e-15));
    }

    #[test]
    fn c_zero_and_guard() {
        let ctx = ctx60();
        assert!(c_of_delta_prime(&ctx.zero(), &ctx).unwrap().is_zero());
        let small = ctx.real(1e-8f64);
        let lowctx = PrecisionContext::new(20).unwrap();
        assert!(matches!(
            c_of_delta_prime(&lowctx.real(1e-8f64), &lowctx),
            Err(Error::InsufficientPrecision(_))
        ));
        assert!(c_of_delta_prime(&small, &ctx).is_ok());
    }

    #[test]
    fn gap_near_half_is_tiny() {
        // eps(0.5) ~ 1.4e-33 makes delta' ~ 1.5e-13; C there is dominated by
        // its (negative) linear defect, so |gap| is below 1e-23. The spec's
        // claim of positivity at P = 0.5 does not hold for the paper's C.
        let ctx = PrecisionContext::new(80).unwrap();
        let g = gap_fn(&(ctx.real(1u32) / 2u32), &ctx).unwrap();
        assert!(g.clone().abs() < ctx.real(1e-23));
        assert!(g.is_sign_negative());
    }
}
