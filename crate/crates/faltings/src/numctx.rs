//! Precision context, fundamental constants and the few Gamma values the
//! height formulas need. All arithmetic elsewhere in the crate goes through a
//! [`PrecisionContext`], so results are deterministic for a fixed context and
//! safe to evaluate concurrently.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float};

use crate::error::{Error, Result};

const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// q-series truncation order: either explicit or derived from the precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesTerms {
    /// ceil((digits + guard) * ln 10 / (pi sqrt 3)) + 5, which pushes the
    /// geometric tail of every q-series on the closed fundamental domain
    /// below 10^-(digits + guard) since |q| <= e^{-pi sqrt 3} there.
    Auto,
    Fixed(usize),
}

/// Working precision plus the tolerances derived from it.
///
/// Immutable after construction; every numeric operation in the crate takes
/// the context explicitly instead of relying on global state.
#[derive(Debug, Clone)]
pub struct PrecisionContext {
    digits: u32,
    guard_digits: u32,
    series_terms: SeriesTerms,
}

impl PrecisionContext {
    /// Context with `digits` decimal digits of working precision and the
    /// default 10 guard digits.
    pub fn new(digits: u32) -> Result<Self> {
        Self::with_guard(digits, 10)
    }

    pub fn with_guard(digits: u32, guard_digits: u32) -> Result<Self> {
        if digits < 15 {
            return Err(Error::InvalidContext(format!(
                "digits must be >= 15, got {digits}"
            )));
        }
        if guard_digits < 2 {
            return Err(Error::InvalidContext(format!(
                "guard_digits must be >= 2, got {guard_digits}"
            )));
        }
        Ok(Self {
            digits,
            guard_digits,
            series_terms: SeriesTerms::Auto,
        })
    }

    pub fn with_series_terms(mut self, terms: SeriesTerms) -> Self {
        self.series_terms = terms;
        self
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn guard_digits(&self) -> u32 {
        self.guard_digits
    }

    /// Binary working precision. Guard digits are carried here; rounding to
    /// the nominal `digits` happens only at output boundaries.
    pub fn prec(&self) -> u32 {
        ((self.digits + self.guard_digits) as f64 * LOG2_10).ceil() as u32 + 8
    }

    /// Resolved q-series truncation order.
    pub fn series_terms(&self) -> usize {
        match self.series_terms {
            SeriesTerms::Fixed(n) => n,
            SeriesTerms::Auto => {
                let d = (self.digits + self.guard_digits) as f64;
                (d * std::f64::consts::LN_10 / (std::f64::consts::PI * 3f64.sqrt())).ceil()
                    as usize
                    + 5
            }
        }
    }

    /// Tolerance for fundamental-domain membership tests: 10^-(digits-5).
    pub fn fd_tol(&self) -> Float {
        self.pow10(-(self.digits as i32 - 5))
    }

    /// Convergence tolerance for the j-inversion Newton iteration:
    /// 10^-(digits-3).
    pub fn newton_tol(&self) -> Float {
        self.pow10(-(self.digits as i32 - 3))
    }

    pub fn pow10(&self, e: i32) -> Float {
        Float::with_val(self.prec(), 10u32).pow(e)
    }

    pub fn real<T>(&self, v: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.prec(), v)
    }

    pub fn zero(&self) -> Float {
        Float::new(self.prec())
    }

    pub fn complex<T>(&self, v: T) -> Complex
    where
        Complex: rug::Assign<T>,
    {
        Complex::with_val(self.prec(), v)
    }

    /// pi, correct to the working precision.
    pub fn pi(&self) -> Float {
        Float::with_val(self.prec(), Constant::Pi)
    }

    pub fn two_pi(&self) -> Float {
        self.pi() * 2u32
    }

    pub fn sqrt3(&self) -> Float {
        self.real(3u32).sqrt()
    }

    /// e^{-pi sqrt 3}, the modulus of q at the corner of the fundamental
    /// domain and the decay rate of every q-series there.
    pub fn q_rho(&self) -> Float {
        (-(self.pi() * self.sqrt3())).exp()
    }

    /// Gamma(num/den) for the rational arguments the height formulas use
    /// (denominators 2, 3 and 4 only). MPFR evaluates Gamma correctly rounded
    /// at the working precision, which keeps the error below 10^-digits.
    pub fn gamma_rat(&self, num: u32, den: u32) -> Result<Float> {
        if !(num > 0 && num < den && matches!(den, 2 | 3 | 4)) {
            return Err(Error::UnsupportedArgument { num, den });
        }
        let arg = self.real(num) / self.real(den);
        Ok(arg.gamma())
    }
}
