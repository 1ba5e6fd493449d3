//! The modular discriminant, the j-function, the non-holomorphic weight-2
//! Eisenstein series and V(tau) = -(1/12) log(|Delta(tau)| Im(tau)^6) on the
//! upper half-plane, together with SL2(Z) reduction to the closed fundamental
//! domain and numerical inversion of j.
//!
//! All Delta work happens in log scale; |Delta| itself is never materialized
//! for the height path.

use std::sync::OnceLock;

use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::numctx::PrecisionContext;

/// A point tau = x + iy in the complex upper half-plane.
#[derive(Debug, Clone)]
pub struct UHPoint {
    x: Float,
    y: Float,
}

impl UHPoint {
    pub fn new(x: Float, y: Float) -> Result<Self> {
        if !(y > 0u32) {
            return Err(Error::OutOfRange(format!("Im tau must be positive, got {y}")));
        }
        Ok(Self { x, y })
    }

    pub fn from_f64(ctx: &PrecisionContext, x: f64, y: f64) -> Result<Self> {
        Self::new(ctx.real(x), ctx.real(y))
    }

    pub fn x(&self) -> &Float {
        &self.x
    }

    pub fn y(&self) -> &Float {
        &self.y
    }

    pub fn to_complex(&self, ctx: &PrecisionContext) -> Complex {
        ctx.complex((self.x.clone(), self.y.clone()))
    }

    /// rho = (-1 + sqrt(3) i) / 2, the corner of the fundamental domain.
    pub fn rho(ctx: &PrecisionContext) -> Self {
        Self {
            x: ctx.real(-0.5),
            y: ctx.sqrt3() / 2u32,
        }
    }
}

/// A point reduced to the closed fundamental domain, with the SL2(Z) element
/// that was applied as a witness.
#[derive(Debug, Clone)]
pub struct FDPoint {
    point: UHPoint,
    reduced_by: [[i64; 2]; 2],
}

impl FDPoint {
    pub fn point(&self) -> &UHPoint {
        &self.point
    }

    pub fn reduced_by(&self) -> [[i64; 2]; 2] {
        self.reduced_by
    }
}

fn mat_mul(a: [[i64; 2]; 2], b: [[i64; 2]; 2]) -> Result<[[i64; 2]; 2]> {
    let mut r = [[0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let p = a[i][0]
                .checked_mul(b[0][j])
                .and_then(|u| a[i][1].checked_mul(b[1][j]).and_then(|v| u.checked_add(v)));
            r[i][j] = p.ok_or_else(|| {
                Error::PrecisionExhausted("SL2(Z) word too long for the given precision".into())
            })?;
        }
    }
    Ok(r)
}

/// Reduce tau to the canonical representative in the closed fundamental
/// domain: x in [-1/2, 1/2), and x <= 0 whenever |tau| = 1 (within fd_tol).
pub fn reduce_fd(tau: &UHPoint, ctx: &PrecisionContext) -> Result<FDPoint> {
    let prec = ctx.prec();
    let mut x = Float::with_val(prec, tau.x());
    let mut y = Float::with_val(prec, tau.y());
    let fd_tol = ctx.fd_tol();
    let y_floor = ctx.pow10(-(ctx.digits() as i32 + ctx.guard_digits() as i32));
    let mut m = [[1i64, 0], [0, 1]];

    let mut done = false;
    for _ in 0..10_000 {
        // translate x into [-1/2, 1/2]
        let n = x
            .clone()
            .round()
            .to_integer()
            .and_then(|i| i.to_i64())
            .ok_or_else(|| Error::PrecisionExhausted("translation amount overflows".into()))?;
        if n != 0 {
            x -= n;
            m = mat_mul([[1, -n], [0, 1]], m)?;
        }
        let norm = x.clone().square() + y.clone().square();
        if norm >= ctx.real(1u32) - fd_tol.clone() {
            done = true;
            break;
        }
        // invert: tau -> -1/tau
        x = -x / norm.clone();
        y /= norm;
        m = mat_mul([[0, -1], [1, 0]], m)?;
        if y < y_floor {
            return Err(Error::PrecisionExhausted(
                "Im tau underflows during reduction; input too close to the real line".into(),
            ));
        }
    }
    if !done {
        return Err(Error::PrecisionExhausted("reduction did not terminate".into()));
    }

    // canonical strip representative
    let half = ctx.real(0.5);
    if x >= half {
        x -= 1u32;
        m = mat_mul([[1, -1], [0, 1]], m)?;
    } else if x < -half.clone() {
        x += 1u32;
        m = mat_mul([[1, 1], [0, 1]], m)?;
    }
    // arc tie-break: on |tau| = 1 prefer x <= 0
    let norm = x.clone().square() + y.clone().square();
    let dev = ctx.real(norm.clone() - 1u32).abs();
    if dev <= fd_tol && x > 0u32 {
        x = -x / norm.clone();
        y /= norm;
        m = mat_mul([[0, -1], [1, 0]], m)?;
    }

    debug_assert_eq!(m[0][0] * m[1][1] - m[0][1] * m[1][0], 1);
    Ok(FDPoint {
        point: UHPoint { x, y },
        reduced_by: m,
    })
}

/// q = e^{2 pi i tau}.
fn q_of(tau: &UHPoint, ctx: &PrecisionContext) -> Complex {
    let two_pi = ctx.two_pi();
    let arg = ctx.complex((-(two_pi.clone() * tau.y()), two_pi * tau.x()));
    arg.exp()
}

fn ensure_series_domain(tau: &UHPoint) -> Result<()> {
    if tau.y().clone() < 0.5 {
        return Err(Error::DomainTooLow(format!("Im tau = {}", tau.y())));
    }
    Ok(())
}

/// log|Delta(tau)| for tau with Im tau >= 1/2, evaluated without reduction.
///
/// log|Delta| = 12 log 2pi - 2 pi Im tau + 24 sum_{n<=N} log|1 - q^n|.
pub fn log_abs_delta_unreduced(tau: &UHPoint, ctx: &PrecisionContext) -> Result<Float> {
    ensure_series_domain(tau)?;
    let q = q_of(tau, ctx);
    let n_terms = ctx.series_terms();
    // sum_n ln|1 - q^n| = ln|prod_n (1 - q^n)|; every factor is near 1, so the
    // product stays well scaled and one ln suffices.
    let mut prod = ctx.complex(1u32);
    let mut qn = ctx.complex(1u32);
    for _ in 0..n_terms {
        qn *= &q;
        prod *= ctx.complex(1u32) - qn.clone();
    }
    let sum = prod.abs().into_real_imag().0.ln();
    Ok(ctx.two_pi().ln() * 12u32 - ctx.two_pi() * tau.y() + sum * 24u32)
}

/// log|Delta| at a reduced point, where the series tail bound of the
/// precision context applies.
pub fn log_abs_delta(tau: &FDPoint, ctx: &PrecisionContext) -> Float {
    // the fundamental domain has Im tau >= sqrt(3)/2 > 1/2
    log_abs_delta_unreduced(tau.point(), ctx).expect("fundamental domain point")
}

struct SeriesEval {
    e4: Complex,
    e6: Complex,
    /// Delta without the (2 pi)^12 prefactor: q prod (1-q^n)^24.
    delta_star: Complex,
}

fn eisenstein_series(tau: &UHPoint, ctx: &PrecisionContext, with_e6: bool) -> SeriesEval {
    let q = q_of(tau, ctx);
    let n_terms = ctx.series_terms();
    let mut e4 = ctx.complex(0u32);
    let mut e6 = ctx.complex(0u32);
    let mut prod = ctx.complex(1u32);
    let mut qn = ctx.complex(1u32);
    for n in 1..=n_terms {
        qn *= &q;
        let one_minus = ctx.complex(1u32) - qn.clone();
        let ratio = qn.clone() / one_minus.clone();
        let n2 = (n as u64).pow(2);
        e4 += ratio.clone() * ((n as u64).pow(3));
        if with_e6 {
            e6 += ratio * (n2 * n2 * n as u64);
        }
        prod *= one_minus;
    }
    // prod^24 by squaring; mpc_pow on complex operands is far slower.
    let p2 = prod.square();
    let p4 = p2.clone().square();
    let p8 = p4.clone().square();
    let p24 = p8.clone().square() * p8;
    SeriesEval {
        e4: ctx.complex(1u32) + e4 * 240u32,
        e6: ctx.complex(1u32) - e6 * 504u32,
        delta_star: q * p24,
    }
}

fn j_at_reduced(tau: &UHPoint, ctx: &PrecisionContext) -> Complex {
    let s = eisenstein_series(tau, ctx, false);
    let e4sq = s.e4.clone().square();
    e4sq * s.e4 / s.delta_star
}

/// j and dj/dtau at a point with Im tau >= 1/2 (no reduction applied).
fn j_and_derivative(tau: &UHPoint, ctx: &PrecisionContext) -> (Complex, Complex) {
    let s = eisenstein_series(tau, ctx, true);
    let e4sq = s.e4.clone().square();
    let j = e4sq.clone() * &s.e4 / s.delta_star.clone();
    // dj/dtau = -2 pi i E6 E4^2 / Delta*
    let minus_two_pi_i = ctx.complex((ctx.zero(), -ctx.two_pi()));
    let dj = minus_two_pi_i * s.e6 * e4sq / s.delta_star;
    (j, dj)
}

/// j(tau), computed after internal reduction to the fundamental domain.
pub fn j_eval(tau: &UHPoint, ctx: &PrecisionContext) -> Result<Complex> {
    let fd = reduce_fd(tau, ctx)?;
    Ok(j_at_reduced(fd.point(), ctx))
}

/// Non-holomorphic weight-2 Eisenstein series
/// E2(x, y) = 1 - 24 sum n q^n / (1 - q^n) - 3 / (pi y).
///
/// E2 is not SL2(Z)-invariant, so no internal reduction happens; the caller
/// must supply Im tau >= 1/2.
pub fn e2_eval(tau: &UHPoint, ctx: &PrecisionContext) -> Result<Complex> {
    ensure_series_domain(tau)?;
    let q = q_of(tau, ctx);
    let n_terms = ctx.series_terms();
    let mut sum = ctx.complex(0u32);
    let mut qn = ctx.complex(1u32);
    for n in 1..=n_terms {
        qn *= &q;
        sum += qn.clone() * (n as u64) / (ctx.complex(1u32) - qn.clone());
    }
    let correction = ctx.real(3u32) / (ctx.pi() * tau.y());
    Ok(ctx.complex(1u32) - sum * 24u32 - ctx.complex(correction))
}

/// V at the reduced representative of tau; equals V(tau) by invariance.
pub fn v_eval(tau: &UHPoint, ctx: &PrecisionContext) -> Result<Float> {
    Ok(v_eval_fd(&reduce_fd(tau, ctx)?, ctx))
}

pub fn v_eval_fd(tau: &FDPoint, ctx: &PrecisionContext) -> Float {
    let log_delta = log_abs_delta(tau, ctx);
    -(log_delta + tau.point().y().clone().ln() * 6u32) / 12u32
}

/// V evaluated directly from the series at (x, y) without reduction, for
/// finite-difference work where the argument must not move.
pub fn v_unreduced(tau: &UHPoint, ctx: &PrecisionContext) -> Result<Float> {
    let log_delta = log_abs_delta_unreduced(tau, ctx)?;
    Ok(-(log_delta + tau.y().clone().ln() * 6u32) / 12u32)
}

// Seed table for inverse_j over the mid-range of |j|: (x, y, Re j, Im j).
fn seed_table() -> &'static Vec<(f64, f64, f64, f64)> {
    static TABLE: OnceLock<Vec<(f64, f64, f64, f64)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let ctx = PrecisionContext::new(20).expect("fixed context");
        let mut table = Vec::with_capacity(64);
        for i in 0..8 {
            let x = -0.5 + (i as f64 + 0.5) / 8.0;
            for k in 0..8 {
                let y = 0.9 + 0.35 * k as f64;
                let pt = UHPoint::from_f64(&ctx, x, y).expect("upper half-plane");
                let j = j_at_reduced(&pt, &ctx);
                table.push((x, y, j.real().to_f64(), j.imag().to_f64()));
            }
        }
        table
    })
}

// Leading Taylor coefficients of j at its two ramification points, used only
// for seeding: j(tau) ~ C3 (tau - rho)^3 and j(tau) - 1728 ~ C2 (tau - i)^2.
const CHART_C3_IM: f64 = -45745.0806;
const CHART_C2_RE: f64 = -24827.565;

fn seed_for(j: &Complex, ctx: &PrecisionContext) -> Complex {
    let jr = j.real().to_f64();
    let ji = j.imag().to_f64();
    let absj = j.clone().abs().into_real_imag().0;

    if absj.clone() <= 50u32 {
        // cube chart at rho: s^3 = j / C3, three candidate seeds
        let r = (jr * jr + ji * ji).sqrt();
        let mag = (r / CHART_C3_IM.abs()).cbrt();
        let base_arg = (ji.atan2(jr) - (-std::f64::consts::FRAC_PI_2)) / 3.0;
        let mut best = (f64::NEG_INFINITY, 0.0f64, 0.0f64);
        for k in 0..3 {
            let a = base_arg + 2.0 * std::f64::consts::PI * k as f64 / 3.0;
            let (sx, sy) = (mag * a.cos(), mag * a.sin());
            if sy > best.0 {
                best = (sy, sx, sy);
            }
        }
        let y = 3f64.sqrt() / 2.0 + best.2;
        return ctx.complex((ctx.real(-0.5 + best.1), ctx.real(y)));
    }

    let d1728r = jr - 1728.0;
    if absj < 1e9 && (d1728r * d1728r + ji * ji).sqrt() <= 600.0 {
        // square chart at i: s^2 = (j - 1728) / C2
        let r = (d1728r * d1728r + ji * ji).sqrt();
        let mag = (r / CHART_C2_RE.abs()).sqrt();
        let base_arg = (ji.atan2(d1728r) - std::f64::consts::PI) / 2.0;
        let (s1, s2) = (base_arg, base_arg + std::f64::consts::PI);
        let a = if s1.sin() >= s2.sin() { s1 } else { s2 };
        return ctx.complex((ctx.real(mag * a.cos()), ctx.real(1.0 + mag * a.sin())));
    }

    if absj > 3500u32 {
        // q ~ 1/j from j = 1/q + 744 + ...
        let q0 = ctx.complex(1u32) / j.clone();
        let ln_q = q0.ln();
        // tau = log q / (2 pi i) = -i log q / (2 pi)
        let minus_i = ctx.complex((0, -1));
        return minus_i * ln_q / ctx.two_pi();
    }

    let mut best = (f64::INFINITY, 0.0f64, 0.0f64);
    for &(x, y, tr, ti) in seed_table() {
        let d = (jr - tr).powi(2) + (ji - ti).powi(2);
        if d < best.0 {
            best = (d, x, y);
        }
    }
    ctx.complex((ctx.real(best.1), ctx.real(best.2)))
}

fn inverse_j_upper(j: &Complex, ctx: &PrecisionContext, escalated: bool) -> Result<FDPoint> {
    if j.clone().abs().into_real_imag().0.is_zero() {
        return reduce_fd(&UHPoint::rho(ctx), ctx);
    }

    let scale = {
        let a = j.clone().abs().into_real_imag().0;
        if a > 1u32 {
            a
        } else {
            ctx.real(1u32)
        }
    };
    let target_resid = scale.clone() * ctx.newton_tol();

    let mut t = seed_for(j, ctx);
    let mut converged = false;
    for _ in 0..80 {
        if t.imag().clone() < 0.5 {
            if t.imag().clone() < 0.05 {
                break; // wandered off; escalate
            }
            let pt = UHPoint::new(t.real().clone(), t.imag().clone())?;
            t = reduce_fd(&pt, ctx)?.point().to_complex(ctx);
        }
        let pt = UHPoint::new(t.real().clone(), t.imag().clone())?;
        let (jv, jd) = j_and_derivative(&pt, ctx);
        let diff = jv - j.clone();
        if diff.clone().abs().into_real_imag().0 < target_resid {
            converged = true;
            break;
        }
        t -= diff / jd;
    }

    if !converged {
        if escalated {
            return Err(Error::NoConvergence(
                "j inversion failed after precision escalation".into(),
            ));
        }
        let ctx2 = PrecisionContext::new(ctx.digits() * 2)?;
        let j2 = Complex::with_val(ctx2.prec(), j);
        let fd2 = inverse_j_upper(&j2, &ctx2, true)?;
        let pt = UHPoint::new(
            ctx.real(fd2.point().x()),
            ctx.real(fd2.point().y()),
        )?;
        return reduce_fd(&pt, ctx);
    }

    let fd = reduce_fd(&UHPoint::new(t.real().clone(), t.imag().clone())?, ctx)?;
    let resid = (j_at_reduced(fd.point(), ctx) - j.clone()).abs().into_real_imag().0;
    if resid >= target_resid {
        return Err(Error::NoConvergence(format!(
            "residual {resid} after Newton convergence"
        )));
    }
    Ok(fd)
}

/// Find tau in the fundamental domain with j(tau) = j, up to the relative
/// residual max(1, |j|) 10^-(digits-3). For j with negative imaginary part
/// the mirror solution -conj(tau) of the conjugate problem is returned.
pub fn inverse_j(j: &Complex, ctx: &PrecisionContext) -> Result<FDPoint> {
    if j.imag().clone() < 0u32 {
        let fd = inverse_j_upper(&j.clone().conj(), ctx, false)?;
        let mirrored = UHPoint::new(-fd.point().x().clone(), fd.point().y().clone())?;
        return reduce_fd(&mirrored, ctx);
    }
    inverse_j_upper(j, ctx, false)
}
