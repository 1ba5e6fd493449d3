//! Sampling-based certification of the paper's inequality lemmas. Every
//! check evaluates both sides on a grid at full precision and records the
//! worst margin; these are high-confidence numerical checks, not proofs, and
//! `CertResult` carries the sample count to keep that distinction visible.

use std::str::FromStr;

use rayon::prelude::*;
use rug::ops::CompleteRound;
use rug::Float;

use crate::error::{Error, Result};
use crate::gap::{c_of_delta_prime, delta_prime};
use crate::modular::{e2_eval, j_eval, log_abs_delta_unreduced, v_unreduced, UHPoint};
use crate::numctx::PrecisionContext;

/// The certifiable lemma statements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LemmaId {
    /// |j(tau)| <= j(i Im tau) (Faisant-Philibert (i))
    FpI,
    /// j(iy) <= e^{2 pi y} + 1193 (Faisant-Philibert (ii))
    FpII,
    /// Im tau <= 3/2 log max{e, |j(tau)|} (Faisant-Philibert (iii))
    FpIII,
    /// log+ |j| <= 2 pi Im tau + 7.09 (Lemma 5.3 shape)
    L53,
    /// log |Delta| < -2 pi Im tau + 22.16 (Silverman bound)
    L54,
    /// |j(tau)| <= 47000 |tau - rho|^3 near both corners (Bilu et al.)
    Bilu,
    /// dV = -(pi i/6) E_2 identity + reality of E_2 on half-integer lines
    E2Id,
    /// V(tau) >= V(-1/2 + iy) row-wise; V increasing on the half-line
    VMono,
    /// V(tau) >= V(rho) + C(delta') off B_delta (Lemma 6.4)
    L64,
    /// x/12 - 1/2 log(1+x) increasing on [5,100], > 1.323 past 37.84
    R61,
}

impl LemmaId {
    pub const ALL: [LemmaId; 10] = [
        LemmaId::FpI,
        LemmaId::FpII,
        LemmaId::FpIII,
        LemmaId::L53,
        LemmaId::L54,
        LemmaId::Bilu,
        LemmaId::E2Id,
        LemmaId::VMono,
        LemmaId::L64,
        LemmaId::R61,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            LemmaId::FpI => "fp_i",
            LemmaId::FpII => "fp_ii",
            LemmaId::FpIII => "fp_iii",
            LemmaId::L53 => "l53",
            LemmaId::L54 => "l54",
            LemmaId::Bilu => "bilu",
            LemmaId::E2Id => "e2id",
            LemmaId::VMono => "vmono",
            LemmaId::L64 => "l64",
            LemmaId::R61 => "r61",
        }
    }
}

impl FromStr for LemmaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LemmaId::ALL
            .iter()
            .find(|l| l.as_str() == s)
            .copied()
            .ok_or_else(|| Error::UnknownLemma(s.into()))
    }
}

/// Sampling grid. FD lemmas use nx uniform abscissae on [-1/2, 1/2] with ny
/// ordinates from the domain boundary up to y_max; 1-D lemmas use nx * ny
/// points on their interval.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub y_max: f64,
    pub exclusion_delta: f64,
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, y_max: f64, exclusion_delta: f64) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidGrid(format!("nx, ny must be >= 2, got {nx}x{ny}")));
        }
        if !(y_max > 1.0) {
            return Err(Error::InvalidGrid(format!("y_max must be > 1, got {y_max}")));
        }
        if exclusion_delta < 0.0 {
            return Err(Error::InvalidGrid("exclusion_delta must be >= 0".into()));
        }
        Ok(Self { nx, ny, y_max, exclusion_delta })
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { nx: 100, ny: 100, y_max: 5.0, exclusion_delta: 0.0 }
    }
}

/// One failed sample: the point and both sides of the inequality.
#[derive(Debug, Clone)]
pub struct Violation {
    pub x: Float,
    pub y: Float,
    pub lhs: Float,
    pub rhs: Float,
}

/// Outcome of a certification run.
#[derive(Debug, Clone)]
pub struct CertResult {
    pub lemma_id: String,
    pub points_checked: usize,
    pub violations: Vec<Violation>,
    pub min_margin: Float,
    pub passed: bool,
}

fn collect(lemma: &str, samples: Vec<(Float, Float, Float, Float)>, ctx: &PrecisionContext) -> CertResult {
    let mut min_margin: Option<Float> = None;
    let mut violations = vec![];
    let points_checked = samples.len();
    for (x, y, lhs, rhs) in samples {
        let margin = (&rhs - &lhs).complete(ctx.prec());
        if min_margin.as_ref().map_or(true, |m| margin < *m) {
            min_margin = Some(margin.clone());
        }
        if margin.is_sign_negative() && !margin.is_zero() {
            violations.push(Violation { x, y, lhs, rhs });
        }
    }
    let passed = violations.is_empty();
    CertResult {
        lemma_id: lemma.into(),
        points_checked,
        violations,
        min_margin: min_margin.unwrap_or_else(|| ctx.zero()),
        passed,
    }
}

/// Uniform grid over the closed fundamental domain: x on [-1/2, 1/2], y from
/// max(sqrt(1-x^2), sqrt(3)/2) to y_max. Every point lies in the domain by
/// construction.
fn fd_grid(grid: &GridSpec, ctx: &PrecisionContext) -> Vec<(Float, Float)> {
    let prec = ctx.prec();
    let mut pts = Vec::with_capacity(grid.nx * grid.ny);
    let y_max = ctx.real(grid.y_max);
    let floor = ctx.sqrt3() / 2u32;
    for i in 0..grid.nx {
        let x = ctx.real(i as u32) / (grid.nx as u32 - 1) - ctx.real(1u32) / 2u32;
        let arc = (Float::with_val(prec, 1) - x.clone().square()).sqrt();
        let y_lo = if arc > floor { arc } else { floor.clone() };
        let span = (&y_max - &y_lo).complete(prec);
        for j in 0..grid.ny {
            let y = y_lo.clone() + &span * ctx.real(j as u32) / (grid.ny as u32 - 1);
            pts.push((x.clone(), y));
        }
    }
    pts
}

fn interval_grid(lo: f64, hi: f64, n: usize, ctx: &PrecisionContext) -> Vec<Float> {
    let lo = ctx.real(lo);
    let span = ctx.real(hi) - &lo;
    (0..n)
        .map(|i| lo.clone() + &span * ctx.real(i as u32) / (n as u32 - 1))
        .collect()
}

/// Runs the sampling certifier for one lemma.
pub fn certify(lemma: LemmaId, grid: &GridSpec, ctx: &PrecisionContext) -> Result<CertResult> {
    let samples: Vec<(Float, Float, Float, Float)> = match lemma {
        LemmaId::FpI => fd_grid(grid, ctx)
            .into_par_iter()
            .map(|(x, y)| {
                let tau = UHPoint::new(x.clone(), y.clone()).unwrap();
                let lhs = j_eval(&tau, ctx)?.abs().real().clone();
                let axis = UHPoint::new(ctx.zero(), y.clone()).unwrap();
                let rhs = j_eval(&axis, ctx)?.real().clone();
                Ok((x, y, lhs, rhs))
            })
            .collect::<Result<_>>()?,
        LemmaId::FpII => interval_grid(1.0, grid.y_max, grid.nx * grid.ny, ctx)
            .into_par_iter()
            .map(|y| {
                let axis = UHPoint::new(ctx.zero(), y.clone()).unwrap();
                let lhs = j_eval(&axis, ctx)?.real().clone();
                let rhs = (ctx.two_pi() * &y).exp() + 1193u32;
                Ok((ctx.zero(), y, lhs, rhs))
            })
            .collect::<Result<_>>()?,
        LemmaId::FpIII => fd_grid(grid, ctx)
            .into_par_iter()
            .map(|(x, y)| {
                let tau = UHPoint::new(x.clone(), y.clone()).unwrap();
                let jm = j_eval(&tau, ctx)?.abs().real().clone();
                let e = ctx.real(1u32).exp();
                let big = if jm > e { jm } else { e };
                let rhs = ctx.real(3u32) / 2u32 * big.ln();
                Ok((x, y.clone(), y, rhs))
            })
            .collect::<Result<_>>()?,
        LemmaId::L53 => fd_grid(grid, ctx)
            .into_par_iter()
            .map(|(x, y)| {
                let tau = UHPoint::new(x.clone(), y.clone()).unwrap();
                let jm = j_eval(&tau, ctx)?.abs().real().clone();
                let lhs = if jm > 1u32 { jm.ln() } else { ctx.zero() };
                let rhs = ctx.two_pi() * &y + ctx.real(709u32) / 100u32;
                Ok((x, y, lhs, rhs))
            })
            .collect::<Result<_>>()?,
        LemmaId::L54 => fd_grid(grid, ctx)
            .into_par_iter()
            .map(|(x, y)| {
                let tau = UHPoint::new(x.clone(), y.clone()).unwrap();
                let lhs = log_abs_delta_unreduced(&tau, ctx)?;
                let rhs = ctx.real(2216u32) / 100u32 - ctx.two_pi() * &y;
                Ok((x, y, lhs, rhs))
            })
            .collect::<Result<_>>()?,
        LemmaId::Bilu => {
            // polar grids around rho and -rho^2, clipped to the closed domain
            let prec = ctx.prec();
            let rho = UHPoint::rho(ctx);
            let corners = [
                (rho.x().clone(), rho.y().clone()),
                (-rho.x().clone(), rho.y().clone()),
            ];
            let mut pts = vec![];
            let radius_max = 0.001f64;
            for (cx, cy) in corners {
                for ir in 1..=grid.ny {
                    let r = ctx.real(radius_max) * ctx.real(ir as u32) / (grid.ny as u32);
                    for ia in 0..grid.nx {
                        let theta = ctx.two_pi() * ctx.real(ia as u32) / (grid.nx as u32);
                        let (s, c) = theta.sin_cos(Float::new(prec));
                        let x = cx.clone() + &r * c;
                        let y = cy.clone() + &r * s;
                        // clip to the closed fundamental domain
                        let half = ctx.real(1u32) / 2u32;
                        let norm = x.clone().square() + y.clone().square();
                        if x.clone().abs() <= half && norm >= 1u32 {
                            pts.push((x, y));
                        }
                    }
                }
            }
            pts.into_par_iter()
                .map(|(x, y)| {
                    let tau = UHPoint::new(x.clone(), y.clone()).unwrap();
                    let lhs = j_eval(&tau, ctx)?.abs().real().clone();
                    // distance to the nearer corner
                    let d1 = ((x.clone() + ctx.real(1u32) / 2u32).square()
                        + (y.clone() - ctx.sqrt3() / 2u32).square())
                    .sqrt();
                    let d2 = ((x.clone() - ctx.real(1u32) / 2u32).square()
                        + (y.clone() - ctx.sqrt3() / 2u32).square())
                    .sqrt();
                    let d = if d1 < d2 { d1 } else { d2 };
                    let rhs = ctx.real(47000u32) * d.clone() * d.clone() * d;
                    Ok((x, y, lhs, rhs))
                })
                .collect::<Result<_>>()?
        }
        LemmaId::E2Id => {
            let prec = ctx.prec();
            let h = ctx.pow10(-(ctx.digits() as i32 / 3));
            let bound = ctx.real(10u32) * h.clone().square();
            let pi6 = ctx.pi() / 6u32;
            let mut samples: Vec<(Float, Float, Float, Float)> = fd_grid(grid, ctx)
                .into_par_iter()
                .map(|(x, y)| {
                    // dV against -(pi i / 6) E_2 by central differences
                    let vxp = v_unreduced(&UHPoint::new((&x + &h).complete(prec), y.clone()).unwrap(), ctx)?;
                    let vxm = v_unreduced(&UHPoint::new((&x - &h).complete(prec), y.clone()).unwrap(), ctx)?;
                    let vyp = v_unreduced(&UHPoint::new(x.clone(), (&y + &h).complete(prec)).unwrap(), ctx)?;
                    let vym = v_unreduced(&UHPoint::new(x.clone(), (&y - &h).complete(prec)).unwrap(), ctx)?;
                    let dx = (vxp - vxm) / (h.clone() * 2u32);
                    let dy = (vyp - vym) / (h.clone() * 2u32);
                    let e2 = e2_eval(&UHPoint::new(x.clone(), y.clone()).unwrap(), ctx)?;
                    let rx = (dx - (&pi6 * e2.imag()).complete(prec)).abs();
                    let ry = (dy - (&pi6 * e2.real()).complete(prec)).abs();
                    let lhs = if rx > ry { rx } else { ry };
                    Ok((x, y, lhs, bound.clone()))
                })
                .collect::<Result<_>>()?;
            // reality of E_2 on the lines x in {-1/2, 0, 1/2}
            let im_bound = ctx.pow10(-(ctx.digits() as i32 - 5));
            for xi in [-0.5f64, 0.0, 0.5] {
                let y_lo = if xi == 0.0 { 1.0 } else { 0.8660254037844387 };
                let line: Vec<(Float, Float, Float, Float)> = interval_grid(y_lo, grid.y_max, grid.ny, ctx)
                    .into_par_iter()
                    .map(|y| {
                        let x = ctx.real(xi);
                        let e2 = e2_eval(&UHPoint::new(x.clone(), y.clone()).unwrap(), ctx)?;
                        Ok((x, y, e2.imag().clone().abs(), im_bound.clone()))
                    })
                    .collect::<Result<_>>()?;
                samples.extend(line);
            }
            samples
        }
        LemmaId::VMono => {
            // row-wise: V(x, y) >= V(-1/2, y)
            // the x = -1/2 column is trivially equal to itself, and x = 1/2 is
            // the same point after translation; skip both so min_margin stays
            // strictly positive
            let mut samples: Vec<(Float, Float, Float, Float)> = fd_grid(grid, ctx)
                .into_par_iter()
                .filter(|(x, _)| x.clone().abs() != 0.5f64)
                .map(|(x, y)| {
                    let v = v_unreduced(&UHPoint::new(x.clone(), y.clone()).unwrap(), ctx)?;
                    let edge = v_unreduced(
                        &UHPoint::new(-ctx.real(1u32) / 2u32, y.clone()).unwrap(),
                        ctx,
                    )?;
                    Ok((x, y, edge, v))
                })
                .collect::<Result<_>>()?;
            // strict monotonicity on the half-line x = -1/2
            let ys = interval_grid(0.8660254037844387 + 1e-4, grid.y_max, grid.nx * grid.ny, ctx);
            let vs: Vec<Float> = ys
                .par_iter()
                .map(|y| {
                    v_unreduced(&UHPoint::new(-ctx.real(1u32) / 2u32, y.clone()).unwrap(), ctx)
                })
                .collect::<Result<_>>()?;
            for w in 0..vs.len() - 1 {
                samples.push((
                    -ctx.real(1u32) / 2u32,
                    ys[w].clone(),
                    vs[w].clone(),
                    vs[w + 1].clone(),
                ));
            }
            samples
        }
        LemmaId::L64 => {
            let prec = ctx.prec();
            let delta = ctx.real(grid.exclusion_delta);
            let dp = delta_prime(&delta, ctx)?;
            let c = c_of_delta_prime(&dp, ctx)?;
            let rho = UHPoint::rho(ctx);
            let v_rho = v_unreduced(&rho, ctx)?;
            let rhs0 = (&v_rho + &c).complete(prec);
            fd_grid(grid, ctx)
                .into_par_iter()
                .filter(|(x, y)| {
                    // drop B_delta around both corners
                    let d1 = ((x.clone() + ctx.real(1u32) / 2u32).square()
                        + (y.clone() - ctx.sqrt3() / 2u32).square())
                    .sqrt();
                    let d2 = ((x.clone() - ctx.real(1u32) / 2u32).square()
                        + (y.clone() - ctx.sqrt3() / 2u32).square())
                    .sqrt();
                    d1 > delta && d2 > delta
                })
                .map(|(x, y)| {
                    let v = v_unreduced(&UHPoint::new(x.clone(), y.clone()).unwrap(), ctx)?;
                    Ok((x, y, rhs0.clone(), v))
                })
                .collect::<Result<_>>()?
        }
        LemmaId::R61 => {
            let prec = ctx.prec();
            let g = |x: &Float| -> Float {
                x.clone() / 12u32 - (Float::with_val(prec, 1) + x).ln() / 2u32
            };
            let mut xs = interval_grid(5.0, 100.0, grid.nx * grid.ny, ctx);
            xs.push(ctx.real(3784u32) / 100u32); // exactly 37.84
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let vals: Vec<Float> = xs.par_iter().map(g).collect();
            let mut samples = vec![];
            // monotonicity
            for w in 0..vals.len() - 1 {
                samples.push((xs[w].clone(), ctx.zero(), vals[w].clone(), vals[w + 1].clone()));
            }
            // threshold past 37.84
            let thresh = ctx.real(1323u32) / 1000u32;
            let t0 = ctx.real(3784u32) / 100u32;
            for (x, v) in xs.iter().zip(&vals) {
                if *x >= t0 {
                    samples.push((x.clone(), ctx.zero(), thresh.clone(), v.clone()));
                }
            }
            samples
        }
    };
    Ok(collect(lemma.as_str(), samples, ctx))
}

/// Bisects the sign change of E_2 on the half-line x = -1/2; the unique zero
/// is rho, i.e. y = sqrt(3)/2.
pub fn e2_zero_on_half_line(ctx: &PrecisionContext) -> Result<Float> {
    let x = -ctx.real(1u32) / 2u32;
    let e2_re = |y: &Float| -> Result<Float> {
        Ok(e2_eval(&UHPoint::new(x.clone(), y.clone()).unwrap(), ctx)?
            .real()
            .clone())
    };
    let mut lo = ctx.real(8u32) / 10u32;
    let mut hi = ctx.real(1u32);
    let flo = e2_re(&lo)?;
    if !flo.is_sign_negative() {
        return Err(Error::NoConvergence("no sign change bracketed".into()));
    }
    let tol = ctx.pow10(-(ctx.digits() as i32 - 3));
    while (hi.clone() - &lo).abs() > tol {
        let mid = (lo.clone() + &hi) / 2u32;
        if e2_re(&mid)?.is_sign_negative() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / 2u32)
}

/// Verifies the pure-constant inequalities the proofs assert, with margins.
pub fn derived_constants_check(ctx: &PrecisionContext) -> CertResult {
    let prec = ctx.prec();
    let mut samples = vec![];
    // log 1193 < 7.09
    let lhs = ctx.real(1193u32).ln();
    samples.push((ctx.real(1u32), ctx.zero(), lhs, ctx.real(709u32) / 100u32));
    // e^{4 pi / sqrt 3} + 1193 < 2609
    let lhs = (ctx.real(4u32) * ctx.pi() / ctx.sqrt3()).exp() + 1193u32;
    samples.push((ctx.real(2u32), ctx.zero(), lhs, ctx.real(2609u32)));
    // 24 (1/(1 - e^{-sqrt 3 pi}) - 1) + 12 log 2 pi < 22.16
    let geom = (Float::with_val(prec, 1) / (Float::with_val(prec, 1) - ctx.q_rho()))
        - 1u32;
    let lhs = ctx.real(24u32) * geom + ctx.real(12u32) * ctx.two_pi().ln();
    samples.push((ctx.real(3u32), ctx.zero(), lhs, ctx.real(2216u32) / 100u32));
    // 29.25 + 6*0.41 - 6 log pi < 24.85
    let lhs = ctx.real(2925u32) / 100u32 + ctx.real(246u32) / 100u32
        - ctx.real(6u32) * ctx.pi().ln();
    samples.push((ctx.real(4u32), ctx.zero(), lhs, ctx.real(2485u32) / 100u32));
    collect("derived_constants", samples, ctx)
}
