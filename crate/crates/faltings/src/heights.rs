//! Weil heights via the Mahler-measure decomposition and the stable Faltings
//! height assembled from the j-invariant's primitive minimal polynomial:
//!
//!   h_stab = (1/12) h_fin(j) + (1/n) sum_i V(tau_i) + 1/2 log pi
//!
//! where tau_i is a preimage of the i-th root under j.

use rayon::prelude::*;
use rug::ops::CompleteRound;
use rug::{Complex, Float, Integer};

use crate::error::{Error, Result};
use crate::modular::{inverse_j, reduce_fd, FDPoint, UHPoint};
use crate::numctx::PrecisionContext;
use crate::poly::IntPolynomial;

/// One root of the minimal polynomial with its upper-half-plane data.
#[derive(Debug, Clone)]
pub struct PerRoot {
    pub root: Complex,
    pub tau: FDPoint,
    pub v: Float,
}

/// Full decomposition of the Weil and stable Faltings heights.
#[derive(Debug, Clone)]
pub struct HeightReport {
    pub poly: IntPolynomial,
    pub degree: usize,
    pub weil_total: Float,
    pub weil_finite: Float,
    pub weil_arch: Float,
    pub faltings_stable: Float,
    pub hmin_gap: Float,
    pub per_root: Vec<PerRoot>,
    pub is_integral_j: bool,
    pub lower_bound_p54: Float,
}

/// Deligne's minimum via the Chowla-Selberg closed form:
/// -1/2 log((1/sqrt 3)(Gamma(1/3)/Gamma(2/3))^3).
pub fn hmin_closed(ctx: &PrecisionContext) -> Float {
    let ratio = ctx.gamma_rat(1, 3).unwrap() / ctx.gamma_rat(2, 3).unwrap();
    let inner = ratio.pow_u(3) / ctx.sqrt3();
    -inner.ln() / 2u32
}

trait FloatPowU {
    fn pow_u(self, e: u32) -> Float;
}

impl FloatPowU for Float {
    fn pow_u(self, e: u32) -> Float {
        use rug::ops::Pow;
        self.pow(e)
    }
}

/// All complex roots at full precision. Aberth-Ehrlich simultaneous iteration
/// from circle seeds, then per-root Newton polish; conjugate pairs are exact
/// by construction (the lower root is overwritten with the conjugate of its
/// partner).
pub fn roots_hp(poly: &IntPolynomial, ctx: &PrecisionContext) -> Result<Vec<Complex>> {
    if !poly.is_squarefree() {
        return Err(Error::NotSquarefree);
    }
    let n = poly.degree();
    let prec = ctx.prec();

    if n == 1 {
        let r = -Float::with_val(prec, poly.constant_term())
            / Float::with_val(prec, poly.leading());
        return Ok(vec![Complex::with_val(prec, (r, Float::new(prec)))]);
    }

    // Cauchy bound seeds on a circle, asymmetric phase to dodge symmetry traps
    let seed_prec = 128u32;
    let lead = Float::with_val(seed_prec, poly.leading());
    let mut radius = Float::with_val(seed_prec, 0);
    for c in &poly.coeffs()[..n] {
        let t = Float::with_val(seed_prec, c).abs() / &lead;
        if t > radius {
            radius = t;
        }
    }
    radius += 1u32;
    let pi = Float::with_val(seed_prec, rug::float::Constant::Pi);
    let mut z: Vec<Complex> = (0..n)
        .map(|k| {
            let theta =
                Float::with_val(seed_prec, 2 * k as u32) * &pi / n as u32
                    + Float::with_val(seed_prec, 0.4);
            let (s, c) = theta.sin_cos(Float::new(seed_prec));
            Complex::with_val(seed_prec, (c * &radius, s * &radius))
        })
        .collect();

    // Aberth at seed precision
    let tiny = Float::with_val(seed_prec, 1e-30);
    for _ in 0..200 {
        let mut moved = Float::with_val(seed_prec, 0);
        for i in 0..n {
            let f = poly.eval_complex(&z[i]);
            let fp = poly.eval_derivative(&z[i]);
            if fp.clone().abs().real().is_zero() {
                continue;
            }
            let newton = f / fp;
            let mut s = Complex::new(seed_prec);
            for j in 0..n {
                if j != i {
                    let d = (&z[i] - &z[j]).complete((seed_prec, seed_prec));
                    if d.clone().abs().real() > &tiny {
                        s += d.recip();
                    }
                }
            }
            let denom = Complex::with_val(seed_prec, 1)
                - (&newton * &s).complete((seed_prec, seed_prec));
            let step = if denom.clone().abs().real() > &tiny {
                newton / denom
            } else {
                newton
            };
            let m = step.clone().abs().real().clone();
            if m > moved {
                moved = m;
            }
            z[i] -= step;
        }
        if moved < Float::with_val(seed_prec, 1e-25) {
            break;
        }
    }

    // Newton polish at full precision
    let norm = Float::with_val(prec, poly.sup_norm());
    let target = ctx.pow10(-(ctx.digits() as i32 + ctx.guard_digits() as i32 - 4)) * &norm;
    let accept = ctx.pow10(-(ctx.digits() as i32 - 5)) * &norm;
    let mut roots: Vec<Complex> = z
        .into_iter()
        .map(|zi| {
            let mut w = Complex::with_val(prec, &zi);
            for _ in 0..prec.ilog2() + 20 {
                let f = poly.eval_complex(&w);
                if f.clone().abs().real() < &target {
                    break;
                }
                let fp = poly.eval_derivative(&w);
                if fp.clone().abs().real().is_zero() {
                    break;
                }
                w -= f / fp;
            }
            w
        })
        .collect();

    for r in &roots {
        if poly.eval_complex(r).abs().real() >= &accept {
            return Err(Error::NoConvergence(format!(
                "root residual exceeds tolerance for {poly}"
            )));
        }
    }

    // Deterministic order and exact conjugate pairing. Imaginary parts below
    // the pairing tolerance are snapped to the real axis (the coefficients
    // are real, so unpaired roots must be real).
    let pair_tol = ctx.pow10(-(ctx.digits() as i32 / 2));
    for r in &mut roots {
        if r.imag().clone().abs() < pair_tol {
            *r.mut_imag() = Float::new(prec);
        }
    }
    roots.sort_by(|a, b| {
        a.real()
            .partial_cmp(b.real())
            .unwrap()
            .then(a.imag().partial_cmp(b.imag()).unwrap())
    });
    let mut used = vec![false; n];
    for i in 0..n {
        if used[i] || roots[i].imag().is_zero() {
            continue;
        }
        if roots[i].imag().is_sign_negative() {
            // find the partner with positive imaginary part
            let mut best: Option<(usize, Float)> = None;
            for (j, cand) in roots.iter().enumerate() {
                if used[j] || j == i || !cand.imag().is_sign_positive() {
                    continue;
                }
                let d = (cand.clone().conj() - &roots[i]).abs().real().clone();
                if best.as_ref().map_or(true, |(_, bd)| d < *bd) {
                    best = Some((j, d));
                }
            }
            if let Some((j, _)) = best {
                roots[i] = roots[j].clone().conj();
                used[i] = true;
                used[j] = true;
            }
        }
    }
    roots.sort_by(|a, b| {
        a.real()
            .partial_cmp(b.real())
            .unwrap()
            .then(a.imag().partial_cmp(b.imag()).unwrap())
    });
    Ok(roots)
}

/// Primes used for the finite-field degree-pattern argument.
const PATTERN_PRIMES: [u64; 15] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];

const SUBSET_CAP: usize = 200_000;

/// Certifies irreducibility over Q, or returns `Reducible`.
///
/// Degree patterns mod several primes rule out most factor degrees; whatever
/// degrees survive (e.g. x^4+1 splits mod every prime) are settled by an
/// exact factor search: products of root subsets are rounded to integer
/// polynomials and tested by exact division.
pub fn certify_irreducible(poly: &IntPolynomial, ctx: &PrecisionContext) -> Result<()> {
    let n = poly.degree();
    if n == 1 {
        return Ok(());
    }
    if !poly.is_squarefree() {
        return Err(Error::NotSquarefree);
    }

    // candidate factor degrees 1..n-1 as subset sums of mod-p factor degrees
    let mut candidates: Vec<bool> = vec![true; n]; // index d, 1..=n-1 meaningful
    let mut usable = 0;
    for &p in &PATTERN_PRIMES {
        if let Some(degs) = poly.factor_degrees_mod_p(p) {
            usable += 1;
            if degs.len() == 1 {
                return Ok(()); // irreducible mod p
            }
            let sums = subset_sums(&degs, n);
            for d in 1..n {
                if !sums[d] {
                    candidates[d] = false;
                }
            }
            if (1..n).all(|d| !candidates[d]) {
                return Ok(());
            }
            if usable >= 8 {
                break;
            }
        }
    }
    if usable == 0 {
        return Err(Error::Reducible(format!(
            "no usable prime for degree patterns of {poly}"
        )));
    }

    // exact factor search over the surviving degrees (d and n-d are dual, so
    // only d <= n/2 need checking)
    let search: Vec<usize> = (1..=n / 2)
        .filter(|&d| candidates[d] || candidates[n - d])
        .collect();
    if search.is_empty() {
        return Ok(());
    }
    let total: usize = search.iter().map(|&d| binomial(n, d)).sum();
    if total > SUBSET_CAP {
        return Err(Error::Reducible(format!(
            "cannot certify irreducibility of {poly}: factor search too large"
        )));
    }
    let roots = roots_hp(poly, ctx)?;
    for &d in &search {
        if let Some(factor) = find_integer_factor(poly, &roots, d, ctx) {
            return Err(Error::Reducible(format!("{poly} = ({factor}) * (...)")));
        }
    }
    Ok(())
}

fn binomial(n: usize, k: usize) -> usize {
    let mut r = 1usize;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

fn subset_sums(degs: &[usize], n: usize) -> Vec<bool> {
    let mut s = vec![false; n + 1];
    s[0] = true;
    for &d in degs {
        for t in (0..=n.saturating_sub(d)).rev() {
            if s[t] {
                s[t + d] = true;
            }
        }
    }
    s
}

/// Tries every size-d root subset: lc * prod (X - alpha_i) must round to an
/// integer polynomial dividing `poly` exactly for a true factor.
fn find_integer_factor(
    poly: &IntPolynomial,
    roots: &[Complex],
    d: usize,
    ctx: &PrecisionContext,
) -> Option<IntPolynomial> {
    let n = roots.len();
    let prec = ctx.prec();
    let half = Float::with_val(prec, 0.1);
    let mut idx: Vec<usize> = (0..d).collect();
    loop {
        // lc * prod(X - alpha_i) by incremental convolution
        let mut c: Vec<Complex> = vec![Complex::with_val(prec, poly.leading())];
        for &i in &idx {
            let a = &roots[i];
            let mut next = vec![Complex::new(prec); c.len() + 1];
            for (k, ck) in c.iter().enumerate() {
                next[k + 1] += ck;
                next[k] -= (ck * a).complete((prec, prec));
            }
            c = next;
        }
        let mut ints = Vec::with_capacity(c.len());
        let mut ok = true;
        for ck in &c {
            if ck.imag().clone().abs() > half {
                ok = false;
                break;
            }
            let re = ck.real();
            let rounded = re.clone().round();
            if (re - &rounded).complete(prec).abs() > half {
                ok = false;
                break;
            }
            ints.push(rounded.to_integer().unwrap());
        }
        if ok && !ints.iter().all(Integer::is_zero) {
            if let Ok(cand) = IntPolynomial::new(ints) {
                if cand.degree() == d && poly.divide_exact(&cand).is_some() {
                    return Some(cand);
                }
            }
        }
        // next combination
        let mut i = d;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if idx[i] != i + n - d {
                idx[i] += 1;
                for j in i + 1..d {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Absolute logarithmic Weil height of the roots of `poly`, split into the
/// non-archimedean part (1/n) log a_n and the archimedean Mahler part
/// (1/n) sum log+ |alpha_i|.
pub fn weil_height(poly: &IntPolynomial, ctx: &PrecisionContext) -> Result<(Float, Float, Float)> {
    certify_irreducible(poly, ctx)?;
    let roots = roots_hp(poly, ctx)?;
    weil_from_roots(poly, &roots, ctx)
}

fn weil_from_roots(
    poly: &IntPolynomial,
    roots: &[Complex],
    ctx: &PrecisionContext,
) -> Result<(Float, Float, Float)> {
    let n = poly.degree() as u32;
    let prec = ctx.prec();
    let finite = Float::with_val(prec, poly.leading()).ln() / n;
    let mut arch = Float::new(prec);
    for r in roots {
        let m = r.clone().abs().real().clone();
        if m > 1u32 {
            arch += m.ln();
        }
    }
    arch /= n;
    let total = (&finite + &arch).complete(prec);
    Ok((total, finite, arch))
}

/// Silverman's explicit lower bound (Proposition 5.4 shape):
/// h_j/12 - 1/2 log(1 + h_j) + unstable_term - 2.071.
pub fn prop54_lower_bound(
    h_j: &Float,
    unstable_term: &Float,
    ctx: &PrecisionContext,
) -> Result<Float> {
    if h_j.is_sign_negative() && !h_j.is_zero() {
        return Err(Error::NegativeInput(format!("h_j = {h_j}")));
    }
    if unstable_term.is_sign_negative() && !unstable_term.is_zero() {
        return Err(Error::NegativeInput(format!(
            "unstable_term = {unstable_term}"
        )));
    }
    let prec = ctx.prec();
    let log_term = (Float::with_val(prec, 1) + h_j).ln() / 2u32;
    Ok(h_j.clone() / 12u32 - log_term + unstable_term - Float::with_val(prec, 2.071f64))
}

/// Stable Faltings height with the full per-root decomposition.
pub fn faltings_stable(poly: &IntPolynomial, ctx: &PrecisionContext) -> Result<HeightReport> {
    certify_irreducible(poly, ctx)?;
    let roots = roots_hp(poly, ctx)?;
    let n = poly.degree();
    let prec = ctx.prec();

    // V is conjugation-invariant, so compute it only for Im >= 0 and mirror
    // the tau for the conjugate root.
    let computed: Vec<Result<Option<(FDPoint, Float)>>> = roots
        .par_iter()
        .map(|r| {
            if r.imag().is_sign_negative() && !r.imag().is_zero() {
                return Ok(None);
            }
            let tau = inverse_j(r, ctx)?;
            let v = crate::modular::v_eval_fd(&tau, ctx);
            Ok(Some((tau, v)))
        })
        .collect();

    let mut per_root: Vec<Option<PerRoot>> = vec![None; n];
    for (i, c) in computed.into_iter().enumerate() {
        if let Some((tau, v)) = c? {
            per_root[i] = Some(PerRoot {
                root: roots[i].clone(),
                tau,
                v,
            });
        }
    }
    // conjugate roots: exact pairing from roots_hp, mirrored tau, same V
    for i in 0..n {
        if per_root[i].is_some() {
            continue;
        }
        let conj = roots[i].clone().conj();
        let partner = (0..n)
            .find(|&j| per_root[j].is_some() && roots[j] == conj)
            .expect("conjugate partner");
        let p = per_root[partner].as_ref().unwrap();
        let mirrored = UHPoint::new(
            -p.tau.point().x().clone(),
            p.tau.point().y().clone(),
        )
        .unwrap();
        let tau = reduce_fd(&mirrored, ctx)?;
        per_root[i] = Some(PerRoot {
            root: roots[i].clone(),
            tau,
            v: p.v.clone(),
        });
    }
    let per_root: Vec<PerRoot> = per_root.into_iter().map(Option::unwrap).collect();

    let (weil_total, weil_finite, weil_arch) = weil_from_roots(poly, &roots, ctx)?;
    let mut v_sum = Float::new(prec);
    for pr in &per_root {
        v_sum += &pr.v;
    }
    let half_log_pi = ctx.pi().ln() / 2u32;
    let faltings = weil_finite.clone() / 12u32 + v_sum / n as u32 + half_log_pi;
    let hmin = hmin_closed(ctx);
    let hmin_gap = (&faltings - &hmin).complete(prec);
    let lower_bound_p54 = prop54_lower_bound(&weil_total, &Float::new(prec), ctx)?;

    Ok(HeightReport {
        poly: poly.clone(),
        degree: n,
        weil_total,
        weil_finite,
        weil_arch,
        faltings_stable: faltings,
        hmin_gap,
        per_root,
        is_integral_j: *poly.leading() == 1u32,
        lower_bound_p54,
    })
}

/// Checks Silverman's sandwich 0.72 <= h(j)/12 - h_stab <= 1/2 log(1+h(j)) + 2.071.
pub fn silverman_sandwich_check(report: &HeightReport, ctx: &PrecisionContext) -> bool {
    let prec = ctx.prec();
    let mid = report.weil_total.clone() / 12u32 - &report.faltings_stable;
    let upper = (Float::with_val(prec, 1) + &report.weil_total).ln() / 2u32
        + Float::with_val(prec, 2.071f64);
    mid >= Float::with_val(prec, 0.72f64) && mid <= upper
}

/// Per-polynomial outcome of a corpus scan; failures do not stop the scan.
pub struct ScanOutcome {
    pub reports: Vec<HeightReport>,
    pub errors: Vec<(String, Error)>,
}

/// Heights for a whole corpus, sorted ascending by stable height (ties by
/// degree, then lexicographic coefficients).
pub fn scan_corpus(polys: &[IntPolynomial], ctx: &PrecisionContext) -> ScanOutcome {
    let results: Vec<(String, Result<HeightReport>)> = polys
        .par_iter()
        .map(|p| (p.to_string(), faltings_stable(p, ctx)))
        .collect();
    let mut reports = vec![];
    let mut errors = vec![];
    for (name, r) in results {
        match r {
            Ok(rep) => reports.push(rep),
            Err(e) => errors.push((name, e)),
        }
    }
    reports.sort_by(|a, b| {
        a.faltings_stable
            .partial_cmp(&b.faltings_stable)
            .unwrap()
            .then(a.degree.cmp(&b.degree))
            .then_with(|| a.poly.coeffs().cmp(b.poly.coeffs()))
    });
    ScanOutcome { reports, errors }
}
