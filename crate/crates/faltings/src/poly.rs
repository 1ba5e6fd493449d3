//! Primitive integer polynomials: the carrier of an algebraic j-invariant.
//!
//! Everything here is exact integer (or rational) arithmetic. Floating point
//! enters only through [`IntPolynomial::eval_complex`], which evaluates at a
//! point supplied by the caller.

use std::collections::HashMap;
use std::fmt;

use rug::{Complex, Float, Integer, Rational};

use crate::error::{Error, Result};

/// Dense integer polynomial, index k = coefficient of X^k. Always primitive
/// (content 1), sign-normalized (leading coefficient > 0), degree >= 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPolynomial {
    coeffs: Vec<Integer>,
}

impl IntPolynomial {
    /// Normalizing constructor: strips trailing zeros, divides out the
    /// content, flips the sign so the leading coefficient is positive.
    pub fn new(mut coeffs: Vec<Integer>) -> Result<Self> {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::ZeroPolynomial);
        }
        if coeffs.len() == 1 {
            return Err(Error::ConstantPolynomial);
        }
        let mut content = Integer::new();
        for c in &coeffs {
            content.gcd_mut(c);
        }
        if *coeffs.last().unwrap() < 0 {
            content = -content;
        }
        for c in &mut coeffs {
            *c /= &content;
        }
        Ok(Self { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Integer::from(c)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Integer] {
        &self.coeffs
    }

    pub fn leading(&self) -> &Integer {
        self.coeffs.last().unwrap()
    }

    pub fn constant_term(&self) -> &Integer {
        &self.coeffs[0]
    }

    /// Largest |coefficient|; scale for root residual checks.
    pub fn sup_norm(&self) -> Integer {
        self.coeffs
            .iter()
            .map(|c| Integer::from(c.abs_ref()))
            .max()
            .unwrap()
    }

    /// Horner evaluation at the precision of `z`.
    pub fn eval_complex(&self, z: &Complex) -> Complex {
        let prec = z.prec();
        let mut acc = Complex::new(prec);
        for c in self.coeffs.iter().rev() {
            acc *= z;
            acc += Complex::with_val(prec, c);
        }
        acc
    }

    /// Coefficients of the derivative (may be constant, hence not an
    /// `IntPolynomial`).
    pub fn derivative_coeffs(&self) -> Vec<Integer> {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| Integer::from(c * k as u64))
            .collect()
    }

    /// Horner evaluation of the derivative at the precision of `z`.
    pub fn eval_derivative(&self, z: &Complex) -> Complex {
        let prec = z.prec();
        let mut acc = Complex::new(prec);
        for (k, c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc *= z;
            acc += Complex::with_val(prec, Integer::from(c * k as u64));
        }
        acc
    }

    /// X^n p(1/X), renormalized. Rejects polynomials with root 0 (which the
    /// reversal would drop).
    pub fn reversed(&self) -> Result<Self> {
        if self.coeffs[0].is_zero() {
            return Err(Error::OutOfRange(
                "cannot reverse a polynomial with constant term 0".into(),
            ));
        }
        let mut v = self.coeffs.clone();
        v.reverse();
        Self::new(v)
    }

    /// deg gcd(f, f') = 0 over Q, via the exact rational Euclidean algorithm.
    pub fn is_squarefree(&self) -> bool {
        let f: Vec<Rational> = self.coeffs.iter().map(Rational::from).collect();
        let fp: Vec<Rational> = self
            .derivative_coeffs()
            .iter()
            .map(Rational::from)
            .collect();
        rational_gcd_degree(f, fp) == 0
    }

    /// Exact quotient self / g when g divides self over Z, else None. Since g
    /// is primitive, divisibility over Q and over Z coincide (Gauss).
    pub fn divide_exact(&self, g: &IntPolynomial) -> Option<Vec<Integer>> {
        divide_exact_raw(&self.coeffs, &g.coeffs)
    }

    /// k-th cyclotomic polynomial by exact division of X^k - 1 by the lower
    /// Phi_d.
    pub fn cyclotomic(k: u32) -> Self {
        let mut cache: HashMap<u32, Vec<Integer>> = HashMap::new();
        for d in 1..=k {
            if k % d != 0 {
                continue;
            }
            // X^d - 1
            let mut num = vec![Integer::new(); d as usize + 1];
            num[0] = Integer::from(-1);
            num[d as usize] = Integer::from(1);
            for e in 1..d {
                if d % e == 0 {
                    num = divide_exact_raw(&num, &cache[&e]).expect("cyclotomic division");
                }
            }
            cache.insert(d, num);
        }
        Self::new(cache.remove(&k).unwrap()).unwrap()
    }

    /// Multiset of irreducible-factor degrees of self mod p, or None if p
    /// divides the leading coefficient or the reduction is not squarefree
    /// (prime unusable for degree-pattern arguments).
    pub fn factor_degrees_mod_p(&self, p: u64) -> Option<Vec<usize>> {
        let f = self.reduce_mod_p(p)?;
        if f.len() < 2 {
            return None;
        }
        let fp = modp::derivative(&f, p);
        if modp::gcd(&f, &fp, p).len() != 1 {
            return None; // not squarefree mod p
        }
        Some(modp::distinct_degree_factor_degrees(&f, p))
    }

    fn reduce_mod_p(&self, p: u64) -> Option<Vec<u64>> {
        if self.leading().is_divisible_u(p as u32) {
            return None;
        }
        let pint = Integer::from(p);
        Some(
            self.coeffs
                .iter()
                .map(|c| {
                    let mut r = Integer::from(c % &pint);
                    if r < 0 {
                        r += &pint;
                    }
                    r.to_u64().unwrap()
                })
                .collect(),
        )
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = Integer::from(c.abs_ref());
            if first {
                if *c < 0 {
                    write!(f, "-")?;
                }
                first = false;
            } else if *c < 0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if mag != 1u32 {
                        write!(f, "{mag}*")?;
                    }
                    if k == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{k}")?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Float sup-norm log helper used by the root finder.
pub fn log_sup_norm(poly: &IntPolynomial, prec: u32) -> Float {
    let n = poly.sup_norm();
    Float::with_val(prec, &n).ln()
}

fn divide_exact_raw(num: &[Integer], den: &[Integer]) -> Option<Vec<Integer>> {
    let dn = den.len() - 1;
    if num.len() < den.len() || den.last().unwrap().is_zero() {
        return None;
    }
    let mut rem: Vec<Integer> = num.to_vec();
    let mut quot = vec![Integer::new(); num.len() - dn];
    let lead = den.last().unwrap();
    for i in (0..quot.len()).rev() {
        let top = rem[i + dn].clone();
        if top.is_zero() {
            continue;
        }
        if !top.is_divisible(lead) {
            return None;
        }
        let q = top / lead;
        for (j, d) in den.iter().enumerate() {
            rem[i + j] -= Integer::from(d * &q);
        }
        quot[i] = q;
    }
    if rem.iter().all(Integer::is_zero) {
        Some(quot)
    } else {
        None
    }
}

/// Degree of gcd over Q by the Euclidean algorithm with exact rationals.
fn rational_gcd_degree(mut a: Vec<Rational>, mut b: Vec<Rational>) -> usize {
    let trim = |v: &mut Vec<Rational>| {
        while v.last().is_some_and(|c| c.cmp0() == std::cmp::Ordering::Equal) {
            v.pop();
        }
    };
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        // a mod b
        let db = b.len() - 1;
        while a.len() >= b.len() {
            let q = Rational::from(a.last().unwrap() / b.last().unwrap());
            let off = a.len() - b.len();
            for (j, c) in b.iter().enumerate() {
                let t = Rational::from(c * &q);
                a[off + j] -= t;
            }
            a.pop(); // leading term cancels exactly
            trim(&mut a);
            if a.len() <= db {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
        trim(&mut b);
    }
    if a.is_empty() { 0 } else { a.len() - 1 }
}

/// Arithmetic in F_p[x], p an odd (or 2) word-sized prime. Dense vectors of
/// canonical representatives, no trailing zeros, [] = 0.
mod modp {
    pub fn trim(v: &mut Vec<u64>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    pub fn derivative(f: &[u64], p: u64) -> Vec<u64> {
        let mut d: Vec<u64> = f
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| (c as u128 * (k as u64 % p) as u128 % p as u128) as u64)
            .collect();
        trim(&mut d);
        d
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = ((out[i + j] as u128 + x as u128 * y as u128) % p as u128) as u64;
            }
        }
        trim(&mut out);
        out
    }

    fn inv(a: u64, p: u64) -> u64 {
        // Fermat
        let mut r = 1u128;
        let mut base = a as u128 % p as u128;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * base % p as u128;
            }
            base = base * base % p as u128;
            e >>= 1;
        }
        r as u64
    }

    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let linv = inv(*m.last().unwrap(), p);
        while r.len() > dm {
            let q = (r.last().unwrap() % p) as u128 * linv as u128 % p as u128;
            let off = r.len() - m.len();
            for (j, &c) in m.iter().enumerate() {
                let t = c as u128 * q % p as u128;
                r[off + j] = ((r[off + j] as u128 + p as u128 - t) % p as u128) as u64;
            }
            trim(&mut r);
            if r.len() <= off {
                // leading block vanished past the expected cancellation
                continue;
            }
        }
        r
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = if a.len() >= b.len() {
                rem(&a, &b, p)
            } else {
                a.clone()
            };
            a = std::mem::take(&mut b);
            b = r;
        }
        if let Some(&l) = a.last() {
            // monic normalization
            let li = inv(l, p);
            for c in &mut a {
                *c = (*c as u128 * li as u128 % p as u128) as u64;
            }
        }
        a
    }

    fn pow_mod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
        let mut r = vec![1u64];
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                r = rem(&mul(&r, &b, p), m, p);
            }
            b = rem(&mul(&b, &b, p), m, p);
            e >>= 1;
        }
        r
    }

    /// Distinct-degree factorization, squarefree input: every stage-d factor
    /// found is a product of irreducibles of degree exactly d, so the degree
    /// multiset is (deg/d copies of d) per stage.
    pub fn distinct_degree_factor_degrees(f: &[u64], p: u64) -> Vec<usize> {
        let mut f = f.to_vec();
        // monic
        let li = inv(*f.last().unwrap(), p);
        for c in &mut f {
            *c = (*c as u128 * li as u128 % p as u128) as u64;
        }
        let mut degrees = vec![];
        let mut h = vec![0u64, 1]; // x
        let mut d = 0usize;
        while f.len() - 1 > 0 {
            d += 1;
            if (f.len() - 1) < 2 * d {
                // remainder is irreducible of its own degree
                degrees.push(f.len() - 1);
                break;
            }
            h = pow_mod(&h, p, &f, p); // x^{p^d} mod f
            let mut hx = h.clone();
            // h - x
            if hx.len() < 2 {
                hx.resize(2, 0);
            }
            hx[1] = (hx[1] + p - 1) % p;
            trim(&mut hx);
            let g = gcd(&f, &hx, p);
            if g.len() > 1 {
                let gd = g.len() - 1;
                for _ in 0..gd / d {
                    degrees.push(d);
                }
                f = exact_div(&f, &g, p);
                h = rem(&h, &f, p);
            }
        }
        degrees.sort_unstable();
        degrees
    }

    fn exact_div(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        // a, b monic, b | a
        let mut r = a.to_vec();
        let mut q = vec![0u64; a.len() - b.len() + 1];
        for i in (0..q.len()).rev() {
            let c = r[i + b.len() - 1] % p;
            q[i] = c;
            if c == 0 {
                continue;
            }
            for (j, &bc) in b.iter().enumerate() {
                let t = bc as u128 * c as u128 % p as u128;
                r[i + j] = ((r[i + j] as u128 + p as u128 - t) % p as u128) as u64;
            }
        }
        trim(&mut q);
        q
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

/// Parses either a comma-separated coefficient list "c0,c1,...,cn" (low to
/// high) or an expression over x with integer coefficients and + - * ^ and
/// parentheses. Output is normalized (primitive, positive leading).
pub fn parse_poly(text: &str) -> Result<IntPolynomial> {
    if text.contains(['x', 'X']) {
        parse_expression(text)
    } else {
        parse_coeff_list(text)
    }
}

fn parse_coeff_list(text: &str) -> Result<IntPolynomial> {
    let mut coeffs = vec![];
    let mut pos = 0usize;
    for tok in text.split(',') {
        let t = tok.trim();
        if t.contains(['.', '/']) {
            return Err(Error::NonIntegerCoefficient(t.into()));
        }
        let c: Integer = t.parse().map_err(|_| Error::Parse {
            pos,
            msg: format!("expected integer coefficient, got `{t}`"),
        })?;
        coeffs.push(c);
        pos += tok.len() + 1;
    }
    IntPolynomial::new(coeffs)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(Integer),
    X,
    Plus,
    Minus,
    Star,
    Caret,
    LPar,
    RPar,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = vec![];
    let mut i = 0usize;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' => i += 1,
            'x' | 'X' => {
                out.push((i, Tok::X));
                i += 1;
            }
            '+' => {
                out.push((i, Tok::Plus));
                i += 1;
            }
            '-' => {
                out.push((i, Tok::Minus));
                i += 1;
            }
            '*' => {
                out.push((i, Tok::Star));
                i += 1;
            }
            '^' => {
                out.push((i, Tok::Caret));
                i += 1;
            }
            '(' => {
                out.push((i, Tok::LPar));
                i += 1;
            }
            ')' => {
                out.push((i, Tok::RPar));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'.' || bytes[i] == b'/') {
                    let mut end = i + 1;
                    while end < bytes.len() && bytes[end].is_ascii_digit() {
                        end += 1;
                    }
                    return Err(Error::NonIntegerCoefficient(text[start..end].into()));
                }
                let v: Integer = text[start..i].parse().unwrap();
                out.push((start, Tok::Int(v)));
            }
            _ => {
                return Err(Error::Parse {
                    pos: i,
                    msg: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    Ok(out)
}

/// Dense coefficient vector with plain integer arithmetic; [] is zero.
type Raw = Vec<Integer>;

fn raw_add(a: Raw, b: &Raw) -> Raw {
    let mut a = a;
    if a.len() < b.len() {
        a.resize(b.len(), Integer::new());
    }
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

fn raw_neg(mut a: Raw) -> Raw {
    for x in &mut a {
        *x = Integer::from(-&*x);
    }
    a
}

fn raw_mul(a: &Raw, b: &Raw) -> Raw {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Integer::new(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += Integer::from(x * y);
        }
    }
    out
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(_, t)| t.clone());
        self.idx += 1;
        t
    }

    fn expr(&mut self, min_prec: u8) -> Result<Raw> {
        let mut lhs = self.atom()?;
        loop {
            let (prec, right_assoc) = match self.peek() {
                Some(Tok::Plus) | Some(Tok::Minus) => (1u8, false),
                Some(Tok::Star) => (2, false),
                Some(Tok::Caret) => (3, true),
                _ => break,
            };
            if prec < min_prec {
                break;
            }
            let op = self.bump().unwrap();
            let op_pos = self.pos();
            let next_min = if right_assoc { prec } else { prec + 1 };
            let rhs = self.expr(next_min)?;
            lhs = match op {
                Tok::Plus => raw_add(lhs, &rhs),
                Tok::Minus => raw_add(lhs, &raw_neg(rhs)),
                Tok::Star => raw_mul(&lhs, &rhs),
                Tok::Caret => {
                    if rhs.len() > 1 {
                        return Err(Error::Parse {
                            pos: op_pos,
                            msg: "exponent must be a constant".into(),
                        });
                    }
                    let e = rhs.first().cloned().unwrap_or_default();
                    let e = e.to_u32().ok_or(Error::Parse {
                        pos: op_pos,
                        msg: "exponent must be a small non-negative integer".into(),
                    })?;
                    raw_pow(&lhs, e)
                }
                _ => unreachable!(),
            };
        }
        Ok(lhs)
    }

    fn atom(&mut self) -> Result<Raw> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Int(v)) => Ok(vec![v]),
            Some(Tok::X) => Ok(vec![Integer::new(), Integer::from(1)]),
            Some(Tok::Minus) => Ok(raw_neg(self.expr(3)?)),
            Some(Tok::Plus) => self.expr(3),
            Some(Tok::LPar) => {
                let inner = self.expr(1)?;
                match self.bump() {
                    Some(Tok::RPar) => Ok(inner),
                    _ => Err(Error::Parse {
                        pos,
                        msg: "unclosed parenthesis".into(),
                    }),
                }
            }
            other => Err(Error::Parse {
                pos,
                msg: format!("expected term, got {other:?}"),
            }),
        }
    }
}

fn raw_pow(a: &Raw, e: u32) -> Raw {
    let mut r = vec![Integer::from(1)];
    for _ in 0..e {
        r = raw_mul(&r, a);
    }
    r
}

fn parse_expression(text: &str) -> Result<IntPolynomial> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        idx: 0,
        end: text.len(),
    };
    let raw = p.expr(1)?;
    if p.idx < p.toks.len() {
        return Err(Error::Parse {
            pos: p.pos(),
            msg: "trailing input".into(),
        });
    }
    IntPolynomial::new(raw)
}
