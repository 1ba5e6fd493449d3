//! Independent oracles for the integration tests: everything here is computed
//! by a different route than the library uses (Machin pi, Stirling lgamma,
//! Taylor exp, per-term q-products at doubled truncation), so agreement is
//! evidence rather than tautology.

#![allow(dead_code)]

use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};

pub fn prec_of(digits: u32) -> u32 {
    ((digits as f64 + 10.0) * std::f64::consts::LOG2_10).ceil() as u32 + 8
}

/// Machin's formula: pi = 16 atan(1/5) - 4 atan(1/239).
pub fn oracle_pi(prec: u32) -> Float {
    fn atan_inv(x: u32, prec: u32) -> Float {
        let mut sum = Float::with_val(prec, 0);
        let mut term = Float::with_val(prec, 1u32) / x;
        let x2 = Float::with_val(prec, x).square();
        let mut k = 0u32;
        loop {
            let contrib = term.clone() / (2 * k + 1);
            if contrib.clone().abs() < Float::with_val(prec, 2f64).pow(-(prec as i32) - 8) {
                break;
            }
            if k % 2 == 0 {
                sum += contrib;
            } else {
                sum -= contrib;
            }
            term /= &x2;
            k += 1;
        }
        sum
    }
    atan_inv(5, prec) * 16u32 - atan_inv(239, prec) * 4u32
}

/// ln 2 = 2 atanh(1/3), by series.
pub fn oracle_ln2(prec: u32) -> Float {
    let mut sum = Float::with_val(prec, 0);
    let third2 = Float::with_val(prec, 9u32).recip();
    let mut term = Float::with_val(prec, 3u32).recip();
    let mut k = 0u32;
    loop {
        let contrib = term.clone() / (2 * k + 1);
        if contrib < Float::with_val(prec, 2f64).pow(-(prec as i32) - 8) {
            break;
        }
        sum += contrib;
        term *= &third2;
        k += 1;
    }
    sum * 2u32
}

/// Natural log by scaling into [2/3, 4/3] and the atanh series.
pub fn oracle_ln(x: &Float) -> Float {
    let prec = x.prec();
    assert!(x.is_sign_positive() && !x.is_zero());
    let mut m = x.clone();
    let mut e = 0i64;
    while m > 4f64 / 3f64 {
        m /= 2u32;
        e += 1;
    }
    while m < 2f64 / 3f64 {
        m *= 2u32;
        e -= 1;
    }
    let t = (m.clone() - 1u32) / (m + 1u32);
    let t2 = t.clone().square();
    let mut sum = Float::with_val(prec, 0);
    let mut term = t;
    let mut k = 0u32;
    loop {
        let contrib = term.clone() / (2 * k + 1);
        if contrib.clone().abs() < Float::with_val(prec, 2f64).pow(-(prec as i32) - 8) {
            break;
        }
        sum += contrib;
        term *= &t2;
        k += 1;
    }
    sum * 2u32 + oracle_ln2(prec) * e
}

/// Taylor exp with argument halving.
pub fn oracle_exp(x: &Float) -> Float {
    let prec = x.prec();
    let mut halvings = 0u32;
    let mut r = x.clone();
    while r.clone().abs() > 0.25f64 {
        r /= 2u32;
        halvings += 1;
    }
    let mut sum = Float::with_val(prec, 1u32);
    let mut term = Float::with_val(prec, 1u32);
    let mut n = 1u32;
    loop {
        term *= &r;
        term /= n;
        if term.clone().abs() < Float::with_val(prec, 2f64).pow(-(prec as i32) - 8) {
            break;
        }
        sum += &term;
        n += 1;
    }
    for _ in 0..halvings {
        sum.square_mut();
    }
    sum
}

/// Bernoulli numbers B_0..B_m by the defining recurrence.
fn bernoulli(m: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(m + 1);
    for n in 0..=m {
        if n == 0 {
            b.push(Rational::from(1));
            continue;
        }
        // sum_{j=0}^{n} C(n+1, j) B_j = 0
        let mut s = Rational::new();
        for (j, bj) in b.iter().enumerate() {
            s += bj * Rational::from(Integer::from(n as u32 + 1).binomial(j as u32));
        }
        b.push(-s / Rational::from(Integer::from(n as u32 + 1)));
    }
    b
}

/// lgamma via the Stirling series after shifting the argument up by 60.
pub fn oracle_lgamma(z: &Float) -> Float {
    let prec = z.prec();
    const SHIFT: u32 = 60;
    let zs = z.clone() + SHIFT;
    let pi = oracle_pi(prec);
    let ln_zs = oracle_ln(&zs);
    let mut s = (zs.clone() - 0.5f64) * &ln_zs - &zs + oracle_ln(&(pi * 2u32)) / 2u32;
    let bern = bernoulli(64);
    let z2 = zs.clone().square();
    let mut zpow = zs.clone();
    for k in 1..=32u32 {
        let b2k = Float::with_val(prec, &bern[(2 * k) as usize]);
        s += b2k / (2 * k * (2 * k - 1)) / &zpow;
        zpow *= &z2;
    }
    // undo the shift: lgamma(z) = lgamma(z + N) - sum log(z + j)
    for j in 0..SHIFT {
        s -= oracle_ln(&(z.clone() + j));
    }
    s
}

pub fn oracle_gamma(z: &Float) -> Float {
    oracle_exp(&oracle_lgamma(z))
}

/// log|Delta| by the direct per-term sum at the given truncation; independent
/// of the library's single-product route.
pub fn oracle_log_abs_delta(x: &Float, y: &Float, terms: usize) -> Float {
    let prec = x.prec();
    let pi = oracle_pi(prec);
    let two_pi = pi * 2u32;
    let q = Complex::with_val(
        prec,
        (-(two_pi.clone() * y), two_pi.clone() * x),
    )
    .exp();
    let mut sum = Float::with_val(prec, 0);
    let mut qn = Complex::with_val(prec, 1u32);
    for _ in 0..terms {
        qn *= &q;
        let a = (Complex::with_val(prec, 1u32) - qn.clone()).abs().into_real_imag().0;
        sum += oracle_ln(&a);
    }
    oracle_ln(&two_pi) * 12u32 - two_pi * y + sum * 24u32
}

/// j by E4^3/Delta* at the given truncation.
pub fn oracle_j(x: &Float, y: &Float, terms: usize) -> Complex {
    let prec = x.prec();
    let two_pi = oracle_pi(prec) * 2u32;
    let q = Complex::with_val(prec, (-(two_pi.clone() * y), two_pi * x)).exp();
    let mut e4 = Complex::with_val(prec, 0u32);
    let mut prod = Complex::with_val(prec, 1u32);
    let mut qn = Complex::with_val(prec, 1u32);
    for n in 1..=terms as u64 {
        qn *= &q;
        let one_minus = Complex::with_val(prec, 1u32) - qn.clone();
        e4 += qn.clone() * (n * n * n) / one_minus.clone();
        for _ in 0..24 {
            prod *= &one_minus;
        }
    }
    let e4 = Complex::with_val(prec, 1u32) + e4 * 240u32;
    e4.clone().square() * e4 / (q * prod)
}

/// E2(x, y) by the direct series at the given truncation.
pub fn oracle_e2(x: &Float, y: &Float, terms: usize) -> Complex {
    let prec = x.prec();
    let pi = oracle_pi(prec);
    let two_pi = pi.clone() * 2u32;
    let q = Complex::with_val(prec, (-(two_pi.clone() * y), two_pi * x)).exp();
    let mut sum = Complex::with_val(prec, 0u32);
    let mut qn = Complex::with_val(prec, 1u32);
    for n in 1..=terms as u64 {
        qn *= &q;
        sum += qn.clone() * n / (Complex::with_val(prec, 1u32) - qn.clone());
    }
    Complex::with_val(prec, 1u32) - sum * 24u32 - Float::with_val(prec, 3u32) / (pi * y)
}

/// Roots of a x^2 + b x + c by the quadratic formula (real or conjugate pair).
pub fn oracle_quadratic(a: i64, b: i64, c: i64, prec: u32) -> (Complex, Complex) {
    let a = Float::with_val(prec, a);
    let b = Float::with_val(prec, b);
    let c = Float::with_val(prec, c);
    let disc = b.clone().square() - a.clone() * c * 4u32;
    if disc.is_sign_positive() {
        let s = disc.sqrt();
        let r1 = (-b.clone() + &s) / (a.clone() * 2u32);
        let r2 = (-b - s) / (a * 2u32);
        (
            Complex::with_val(prec, (r1, Float::new(prec))),
            Complex::with_val(prec, (r2, Float::new(prec))),
        )
    } else {
        let s = (-disc).sqrt();
        let re = -b / (a.clone() * 2u32);
        let im = s / (a * 2u32);
        (
            Complex::with_val(prec, (re.clone(), im.clone())),
            Complex::with_val(prec, (re, -im)),
        )
    }
}

/// splitmix64; deterministic sample streams for the property tests.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + u * (hi - lo)
    }
}

/// Parse one of the library's decimal report strings at the given precision.
pub fn parse_dec(s: &str, prec: u32) -> Float {
    Float::with_val(prec, Float::parse(s).expect("decimal report string"))
}
