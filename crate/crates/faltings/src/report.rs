//! JSON report shapes for the CLI. Field order is fixed by struct declaration
//! order and every numeric value is carried as a decimal string, so reports
//! survive serialization without losing digits and re-emitting a parsed
//! report is byte-identical.

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::certify::CertResult;
use crate::construct::EisensteinResult;
use crate::gap::GapResult;
use crate::heights::HeightReport;
use crate::numctx::PrecisionContext;

pub const SCHEMA: u32 = 1;

/// Decimal string with `digits` significant digits, scientific notation.
pub fn dec(x: &Float, digits: u32) -> String {
    format!("{:.*e}", digits.saturating_sub(1) as usize, x)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct WeilJson {
    pub total: String,
    pub finite: String,
    pub arch: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RootJson {
    pub re: String,
    pub im: String,
    pub tau_re: String,
    pub tau_im: String,
    pub v: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct HeightJson {
    pub schema: u32,
    pub input: String,
    pub degree: usize,
    pub digits: u32,
    pub weil: WeilJson,
    pub faltings_stable: String,
    pub hmin: String,
    pub gap_to_hmin: String,
    pub roots: Vec<RootJson>,
}

impl HeightJson {
    pub fn new(input: &str, rep: &HeightReport, hmin: &Float, ctx: &PrecisionContext) -> Self {
        let d = ctx.digits();
        Self {
            schema: SCHEMA,
            input: input.to_owned(),
            degree: rep.degree,
            digits: d,
            weil: WeilJson {
                total: dec(&rep.weil_total, d),
                finite: dec(&rep.weil_finite, d),
                arch: dec(&rep.weil_arch, d),
            },
            faltings_stable: dec(&rep.faltings_stable, d),
            hmin: dec(hmin, d),
            gap_to_hmin: dec(&rep.hmin_gap, d),
            roots: rep
                .per_root
                .iter()
                .map(|r| RootJson {
                    re: dec(r.root.real(), d),
                    im: dec(r.root.imag(), d),
                    tau_re: dec(r.tau.point().x(), d),
                    tau_im: dec(r.tau.point().y(), d),
                    v: dec(&r.v, d),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GapJson {
    pub schema: u32,
    pub p_star: String,
    pub eps: String,
    pub delta: String,
    pub delta_prime: String,
    pub c_value: String,
    pub gap: String,
    pub final_gap: String,
    pub digits: u32,
}

impl GapJson {
    pub fn new(g: &GapResult) -> Self {
        let d = g.digits_used;
        Self {
            schema: SCHEMA,
            p_star: dec(&g.p_star, d),
            eps: dec(&g.eps, d),
            delta: dec(&g.delta, d),
            delta_prime: dec(&g.delta_prime, d),
            c_value: dec(&g.c_value, d),
            gap: dec(&g.gap, d),
            final_gap: dec(&g.final_gap, d),
            digits: d,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ViolationJson {
    pub x: String,
    pub y: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CertifyJson {
    pub schema: u32,
    pub lemma: String,
    pub points: usize,
    pub min_margin: String,
    pub violations: Vec<ViolationJson>,
}

impl CertifyJson {
    pub fn new(r: &CertResult, ctx: &PrecisionContext) -> Self {
        let d = ctx.digits();
        Self {
            schema: SCHEMA,
            lemma: r.lemma_id.clone(),
            points: r.points_checked,
            min_margin: dec(&r.min_margin, d),
            violations: r
                .violations
                .iter()
                .map(|v| ViolationJson {
                    x: dec(&v.x, d),
                    y: dec(&v.y, d),
                    lhs: dec(&v.lhs, d),
                    rhs: dec(&v.rhs, d),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ConstructJson {
    pub schema: u32,
    pub n: u32,
    pub p: u64,
    pub b: Vec<String>,
    pub f: Vec<String>,
    pub h0: String,
    pub height: String,
}

impl ConstructJson {
    pub fn new(r: &EisensteinResult, ctx: &PrecisionContext) -> Self {
        let d = ctx.digits();
        Self {
            schema: SCHEMA,
            n: r.spec.n,
            p: r.spec.p,
            b: r.b.iter().map(|c| c.to_string()).collect(),
            f: r.f_coeffs.iter().map(|c| c.to_string()).collect(),
            h0: dec(&r.h0, d),
            height: dec(&r.height, d),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ScanErrorJson {
    pub input: String,
    pub error: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ScanJson {
    pub schema: u32,
    pub corpus: String,
    pub digits: u32,
    pub reports: Vec<HeightJson>,
    pub errors: Vec<ScanErrorJson>,
}
