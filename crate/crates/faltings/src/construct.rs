//! Eisenstein-polynomial families (paper section 5): monic f with
//!
//!   f(X) = (X-1)^n + sum_{k=1..n} 9^k b_k (X-1)^{n-k},   f(0) = p,
//!
//! Eisenstein at p, with (alpha - 1)/9 integral. The resulting curves with
//! j = 0 have unstable height h_min + log p/(3n), which approaches the
//! minimum as n grows. Everything except the final logs is exact integer
//! arithmetic.

use rug::ops::Pow;
use rug::{Complete, Float, Integer};

use crate::error::{Error, Result};
use crate::heights::hmin_closed;
use crate::numctx::PrecisionContext;

/// Degree and prime for one family member; p = (-1)^n + 9m.
#[derive(Debug, Clone)]
pub struct EisensteinSpec {
    pub n: u32,
    pub p: u64,
    pub m: Integer,
}

impl EisensteinSpec {
    pub fn new(n: u32, p: u64) -> Result<Self> {
        if n < 1 {
            return Err(Error::OutOfRange("n must be >= 1".into()));
        }
        let pi = Integer::from(p);
        if p < 5 || pi.is_probably_prime(40) == rug::integer::IsPrime::No {
            return Err(Error::NotPrime(p));
        }
        let sign = if n % 2 == 0 { 1i32 } else { -1 };
        let diff = (&pi - sign).complete();
        if !diff.is_divisible_u(9) {
            return Err(Error::BadCongruence { p, n });
        }
        Ok(Self { n, p, m: diff / 9u32 })
    }
}

/// The paper's bounded prime choice: 17 for odd n, 19 for even n.
pub fn auto_p(n: u32) -> u64 {
    if n % 2 == 1 {
        17
    } else {
        19
    }
}

/// A constructed family member: the b-vector, the expanded monic polynomial
/// (ascending coefficients), and the resulting heights.
#[derive(Debug, Clone)]
pub struct EisensteinResult {
    pub spec: EisensteinSpec,
    pub b: Vec<Integer>,
    pub f_coeffs: Vec<Integer>,
    pub h0: Float,
    pub height: Float,
}

fn binom(n: u32, k: u32) -> Integer {
    Integer::from(n).binomial(k)
}

/// a_k (coefficient of X^{n-k}) from the (X-1)-basis representation:
/// a_k = C(n,k)(-1)^k + sum_{j=1..k} 9^j b_j C(n-j, k-j) (-1)^{k-j}.
fn a_from_b(n: u32, b: &[Integer], k: u32) -> Integer {
    let mut a = binom(n, k);
    if k % 2 == 1 {
        a = -a;
    }
    let mut pow9 = Integer::from(1);
    for j in 1..=k.min(b.len() as u32) {
        pow9 *= 9u32;
        let mut term = (&pow9 * &b[j as usize - 1]).complete() * binom(n - j, k - j);
        if (k - j) % 2 == 1 {
            term = -term;
        }
        a += term;
    }
    a
}

/// psi(b) = sum (-1)^{n-k} 9^{k-1} b_k, the linear form that pins f(0).
fn psi(n: u32, b: &[Integer]) -> Integer {
    let mut s = Integer::new();
    let mut pow9 = Integer::from(1);
    for (k, bk) in b.iter().enumerate() {
        let k = k as u32 + 1;
        let mut term = (&pow9 * bk).complete();
        if (n - k) % 2 == 1 {
            term = -term;
        }
        s += term;
        pow9 *= 9u32;
    }
    s
}

fn mod_p(x: &Integer, p: u64) -> u64 {
    let pi = Integer::from(p);
    let mut r = (x % &pi).complete();
    if r < 0 {
        r += &pi;
    }
    r.to_u64().unwrap()
}

fn inv_mod(a: u64, p: u64) -> u64 {
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

/// Solves the square system over F_p (a_k = 0 for k = 1..n-1, psi(b) = m),
/// lifts to [0, p), then restores psi(b) = m exactly by a multiple-of-p
/// correction to b_1.
pub fn build_eisenstein(spec: &EisensteinSpec, ctx: &PrecisionContext) -> Result<EisensteinResult> {
    let n = spec.n as usize;
    let p = spec.p;

    // augmented matrix rows over F_p
    let mut mat = vec![vec![0u64; n + 1]; n];
    for k in 1..n {
        // a_k = 0: coefficient of b_j is 9^j C(n-j, k-j) (-1)^{k-j}
        for j in 1..=k {
            let mut c = Integer::from(9).pow(j as u32) * binom(spec.n - j as u32, (k - j) as u32);
            if (k - j) % 2 == 1 {
                c = -c;
            }
            mat[k - 1][j - 1] = mod_p(&c, p);
        }
        // rhs: -C(n,k)(-1)^k
        let mut c = binom(spec.n, k as u32);
        if k % 2 == 0 {
            c = -c;
        }
        mat[k - 1][n] = mod_p(&c, p);
    }
    // psi(b) = m
    for k in 1..=n {
        let mut c = Integer::from(9).pow(k as u32 - 1);
        if (spec.n - k as u32) % 2 == 1 {
            c = -c;
        }
        mat[n - 1][k - 1] = mod_p(&c, p);
    }
    mat[n - 1][n] = mod_p(&spec.m, p);

    // Gaussian elimination; the paper shows the system is uniquely solvable
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| mat[r][col] != 0)
            .ok_or(Error::BadCongruence { p, n: spec.n })?;
        mat.swap(col, pivot);
        let inv = inv_mod(mat[col][col], p);
        for x in &mut mat[col] {
            *x = (*x as u128 * inv as u128 % p as u128) as u64;
        }
        for r in 0..n {
            if r != col && mat[r][col] != 0 {
                let factor = mat[r][col];
                for cidx in 0..=n {
                    let t = mat[col][cidx] as u128 * factor as u128 % p as u128;
                    mat[r][cidx] = ((mat[r][cidx] as u128 + p as u128 - t) % p as u128) as u64;
                }
            }
        }
    }
    let mut b: Vec<Integer> = (0..n).map(|r| Integer::from(mat[r][n])).collect();

    // internal assertion: congruences hold before the final correction
    for k in 1..n {
        debug_assert_eq!(mod_p(&a_from_b(spec.n, &b, k as u32), p), 0);
    }

    // restore psi(b) = m exactly: adjustment to b_1 is a multiple of p, so
    // every congruence mod p is preserved
    let defect = spec.m.clone() - psi(spec.n, &b);
    debug_assert!(defect.is_divisible(&Integer::from(p)));
    let mut t = defect / p;
    if spec.n % 2 == 0 {
        t = -t;
    }
    b[0] += t * p;
    assert_eq!(psi(spec.n, &b), spec.m);

    let f_coeffs = expand(spec.n, &b);
    let prec = ctx.prec();
    let h0 = Float::with_val(prec, p).ln() / (3 * spec.n);
    let height = hmin_closed(ctx) + &h0;
    Ok(EisensteinResult {
        spec: spec.clone(),
        b,
        f_coeffs,
        h0,
        height,
    })
}

/// Exact expansion of (X-1)^n + sum 9^k b_k (X-1)^{n-k} into ascending
/// monomial coefficients.
fn expand(n: u32, b: &[Integer]) -> Vec<Integer> {
    let n = n as usize;
    (0..=n)
        .map(|i| {
            // coefficient of X^i is a_{n-i}
            let k = (n - i) as u32;
            if k == 0 {
                Integer::from(1)
            } else {
                a_from_b(n as u32, b, k)
            }
        })
        .collect()
}

/// Exact verification of every construction invariant.
pub fn verify_eisenstein(result: &EisensteinResult) -> bool {
    let spec = &result.spec;
    let n = spec.n as usize;
    let p = Integer::from(spec.p);
    let f = &result.f_coeffs;
    if f.len() != n + 1 || result.b.len() != n {
        return false;
    }
    // expansion of the (X-1)-form matches
    if *f != expand(spec.n, &result.b) {
        return false;
    }
    // monic, f(0) = p
    if *f.last().unwrap() != 1u32 || f[0] != p {
        return false;
    }
    // Eisenstein at p: p | a_k for all non-leading coefficients, p^2 not | a_n
    if !f[..n].iter().all(|c| c.is_divisible(&p)) {
        return false;
    }
    if f[0].is_divisible(&(&p * &p).complete()) {
        return false;
    }
    // integrality of (alpha-1)/9: f(9Y+1) = 9^n g(Y), g monic integer
    let g = compose_9y_plus_1(f);
    let nine_n = Integer::from(9).pow(spec.n);
    if !g.iter().all(|c| c.is_divisible(&nine_n)) || *g.last().unwrap() != nine_n {
        return false;
    }
    // psi(b) = m
    psi(spec.n, &result.b) == spec.m
}

fn compose_9y_plus_1(f: &[Integer]) -> Vec<Integer> {
    // Horner in the polynomial ring: g = f(9Y + 1)
    let mut g: Vec<Integer> = vec![];
    for c in f.iter().rev() {
        // g = g * (9Y + 1) + c
        let mut next = vec![Integer::new(); g.len() + 1];
        for (i, gc) in g.iter().enumerate() {
            next[i + 1] += (gc * 9u32).complete();
            next[i] += gc;
        }
        if next.is_empty() {
            next.push(Integer::new());
        }
        next[0] += c;
        g = next;
    }
    while g.len() > 1 && g.last().unwrap().is_zero() {
        g.pop();
    }
    g
}

/// h0 = log p/(3n) and height = h_min + h0 without building the polynomial
/// (the formula also applies to (n, p) pairs outside the congruence class,
/// e.g. the n = 100, p = 17 reference point).
pub fn height_formula(n: u32, p: u64, ctx: &PrecisionContext) -> (Float, Float) {
    let h0 = Float::with_val(ctx.prec(), p).ln() / (3 * n);
    let height = hmin_closed(ctx) + &h0;
    (h0, height)
}

/// Builds and verifies the family for n = 1..n_max with the auto primes.
pub fn family_heights(
    n_max: u32,
    ctx: &PrecisionContext,
) -> Result<Vec<(u32, u64, Float, Float)>> {
    (1..=n_max)
        .map(|n| {
            let p = auto_p(n);
            let spec = EisensteinSpec::new(n, p)?;
            let r = build_eisenstein(&spec, ctx)?;
            if !verify_eisenstein(&r) {
                return Err(Error::NoConvergence(format!(
                    "constructed polynomial failed verification at n = {n}"
                )));
            }
            Ok((n, p, r.h0, r.height))
        })
        .collect()
}
