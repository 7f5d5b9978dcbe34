//! Borel-Pade resummation: Borel transforms of WKB-type series, diagonal
//! Pade approximants, Laplace integrals along rays (double-exponential
//! quadrature), Borel-plane singularity scans, and the Gauss hypergeometric
//! function used by the closed-form Borel transforms of the Airy and Bessel
//! models.

use crate::bigfloat::{abs_f64, big_pi, big_re, big_zero, gamma_big, to_c64, PREC};
use crate::poly::{Field, Poly};
use crate::qq::Qi;
use crate::series::Series;
use crate::wkb::classical_c_sequence;
use num_complex::Complex64;
use num_rational::BigRational;
use rug::ops::CompleteRound;
use rug::{Complex, Float};

fn fbig(v: f64) -> Float {
    Float::with_val(PREC, v)
}

fn cbig(re: f64, im: f64) -> Complex {
    Complex::with_val(PREC, (re, im))
}

/// b^e with principal branches (log-exp).
pub fn cpow(b: &Complex, e: &Complex) -> Complex {
    (b.clone().ln() * e).exp()
}

pub fn cpow_f(b: &Complex, e: f64) -> Complex {
    (b.clone().ln() * fbig(e)).exp()
}

fn rat_to_float(r: &BigRational) -> Float {
    let n = Float::parse(r.numer().to_string())
        .map(|p| p.complete(PREC))
        .unwrap();
    let d = Float::parse(r.denom().to_string())
        .map(|p| p.complete(PREC))
        .unwrap();
    n / d
}

/// Gamma(m + 1/2) for m = 0..n-1.
pub fn gamma_half(n: usize) -> Vec<Float> {
    let mut out = Vec::with_capacity(n);
    let mut g = big_pi().sqrt();
    for m in 0..n {
        out.push(g.clone());
        g *= fbig(m as f64 + 0.5);
    }
    out
}

// ---------------------------------------------------------------------------
// Borel transforms
// ---------------------------------------------------------------------------

/// Taylor coefficients of the Borel transform of sum_{n>=1} a_n h^n:
/// B(z) = sum a_{n+1} z^n / n!. The constant a_0 is not transformed.
pub fn borel_transform(a: &[Complex]) -> Vec<Complex> {
    let mut fact = fbig(1.0);
    let mut out = Vec::new();
    for (n, an) in a.iter().skip(1).enumerate() {
        if n > 0 {
            fact *= n as f64;
        }
        out.push(an.clone() / fact.clone());
    }
    out
}

/// Taylor coefficients of the Borel transform of sum_m psi_m h^{m+1/2}:
/// B(z) = z^{-1/2} g(z) with g(z) = sum psi_m z^m / Gamma(m+1/2).
pub fn borel_transform_half(psi: &[Complex]) -> Vec<Complex> {
    let g = gamma_half(psi.len());
    psi.iter()
        .zip(&g)
        .map(|(p, gm)| p.clone() / gm)
        .collect()
}

// ---------------------------------------------------------------------------
// Pade approximants
// ---------------------------------------------------------------------------

fn solve_dense(mut a: Vec<Vec<Complex>>, mut b: Vec<Complex>) -> Vec<Complex> {
    let n = b.len();
    for col in 0..n {
        // partial pivoting
        let piv = (col..n)
            .max_by(|&i, &j| abs_f64(&a[i][col]).total_cmp(&abs_f64(&a[j][col])))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = 1f64 / a[col][col].clone();
        for row in col + 1..n {
            let factor = a[row][col].clone() * inv.clone();
            for k in col..n {
                let t = factor.clone() * &a[col][k];
                a[row][k] -= t;
            }
            let t = factor * &b[col];
            b[row] -= t;
        }
    }
    let mut x = vec![big_zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for k in row + 1..n {
            acc -= a[row][k].clone() * &x[k];
        }
        x[row] = acc / a[row][row].clone();
    }
    x
}

/// Diagonal-type [n/m] Pade approximant of a Taylor series; returns
/// (numerator, denominator) with denominator constant term 1.
pub fn pade(c: &[Complex], n: usize, m: usize) -> (Vec<Complex>, Vec<Complex>) {
    assert!(c.len() >= n + m + 1, "not enough Taylor coefficients");
    let at = |k: i64| -> Complex {
        if k < 0 {
            big_zero()
        } else {
            c[k as usize].clone()
        }
    };
    // sum_{j=0}^m b_j c_{n+k-j} = 0 for k = 1..m, b_0 = 1
    let mut mat = vec![vec![big_zero(); m]; m];
    let mut rhs = vec![big_zero(); m];
    for k in 1..=m {
        for j in 1..=m {
            mat[k - 1][j - 1] = at(n as i64 + k as i64 - j as i64);
        }
        rhs[k - 1] = -at(n as i64 + k as i64);
    }
    let mut den = vec![Complex::with_val(PREC, (1, 0))];
    den.extend(if m > 0 { solve_dense(mat, rhs) } else { vec![] });
    let mut num = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut acc = big_zero();
        for j in 0..=m.min(i) {
            acc += den[j].clone() * at(i as i64 - j as i64);
        }
        num.push(acc);
    }
    (num, den)
}

pub fn poly_eval_big(p: &[Complex], z: &Complex) -> Complex {
    let mut acc = big_zero();
    for c in p.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

pub fn pade_eval(num: &[Complex], den: &[Complex], z: &Complex) -> Complex {
    poly_eval_big(num, z) / poly_eval_big(den, z)
}

/// Poles of the [n/n] Pade approximant (roots of the denominator).
pub fn pade_poles(taylor: &[Complex], n: usize) -> Vec<Complex64> {
    let (_, den) = pade(taylor, n, n);
    let scale = den.iter().map(abs_f64).fold(0.0f64, f64::max);
    let coeffs: Vec<Complex64> = den.iter().map(|c| to_c64(c) / scale).collect();
    crate::stokes::poly_roots(&coeffs)
}

/// Borel-plane singularity candidates: Pade poles that persist (within
/// 0.5% relative distance) when the approximant order is raised by two.
/// Sorted by modulus; the leading entries approximate true singularities.
pub fn scan_borel_singularities(taylor: &[Complex], n: usize) -> Vec<Complex64> {
    let lo = pade_poles(taylor, n);
    let hi = pade_poles(taylor, n + 2);
    let mut stable: Vec<Complex64> = lo
        .into_iter()
        .filter(|p| {
            p.norm() > 1e-8
                && hi.iter().any(|q| (p - q).norm() < 2e-2 * p.norm())
        })
        .collect();
    stable.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    stable
}

// ---------------------------------------------------------------------------
// Laplace integrals (double-exponential quadrature on the half line)
// ---------------------------------------------------------------------------

/// integral_0^infty f(t) dt by exp-sinh quadrature; f must decay
/// exponentially (or gaussianly) at infinity.
pub fn int_halfline<F: Fn(&Float) -> Complex>(f: F) -> Complex {
    let h = 1.0 / 16.0;
    let half_pi = big_pi() / 2u32;
    let mut acc = big_zero();
    for j in -120i32..=120 {
        let u = fbig(j as f64 * h);
        let t = (u.clone().sinh() * half_pi.clone()).exp();
        // skip nodes whose weight or abscissa is out of representable use
        let lt = t.clone().ln().to_f64();
        if !(-700.0..=700.0).contains(&lt) {
            continue;
        }
        let w = t.clone() * (u.cosh() * half_pi.clone()) * fbig(h);
        acc += f(&t) * w;
    }
    acc
}

/// Laplace transform of g along the ray arg zeta = theta:
/// integral_0^{infty e^{i theta}} e^{-zeta/hbar} g(zeta) dzeta.
pub fn laplace_ray<G: Fn(&Complex) -> Complex>(g: G, hbar: &Complex, theta: f64) -> Complex {
    let phase = cbig(theta.cos(), theta.sin());
    let hinv = 1f64 / hbar.clone();
    int_halfline(|t| {
        let zeta = phase.clone() * t;
        let damp = (-(zeta.clone() * &hinv)).exp();
        damp * g(&zeta)
    }) * phase
}

/// Laplace transform with a half-power kernel along the ray:
/// integral e^{-zeta/hbar} zeta^{-1/2} g(zeta) dzeta. The endpoint
/// singularity t^{-1/2} is absorbed by the double-exponential nodes.
pub fn laplace_ray_half<G: Fn(&Complex) -> Complex>(
    g: G,
    hbar: &Complex,
    theta: f64,
) -> Complex {
    let phase = cbig(theta.cos(), theta.sin());
    let hinv = 1f64 / hbar.clone();
    let root = cbig((theta / 2.0).cos(), (theta / 2.0).sin());
    int_halfline(|t| {
        let zeta = phase.clone() * t;
        let damp = (-(zeta.clone() * &hinv)).exp();
        damp * g(&zeta) / t.clone().sqrt()
    }) * root
}

/// Pade-Borel sum of sum_{n>=0} a_n hbar^n along the ray arg zeta = theta.
/// Returns (value, error estimate from dropping one Pade order).
pub fn pade_borel_sum(a: &[Complex], hbar: &Complex, theta: f64) -> (Complex, f64) {
    let b = borel_transform(a);
    let run = |order: usize| -> Complex {
        let (num, den) = pade(&b, order, order);
        a[0].clone() + laplace_ray(|z| pade_eval(&num, &den, z), hbar, theta)
    };
    let n = (b.len() - 1) / 2;
    let hi = run(n);
    let lo = run(n - 1);
    let err = abs_f64(&(hi.clone() - lo));
    (hi, err)
}

/// Pade-Borel sum of sum_m psi_m hbar^{m+1/2} (half-integer powers).
pub fn pade_borel_sum_half(psi: &[Complex], hbar: &Complex, theta: f64) -> (Complex, f64) {
    let g = borel_transform_half(psi);
    let run = |order: usize| -> Complex {
        let (num, den) = pade(&g, order, order);
        laplace_ray_half(|z| pade_eval(&num, &den, z), hbar, theta)
    };
    let n = (g.len() - 1) / 2;
    let hi = run(n);
    let lo = run(n - 1);
    let err = abs_f64(&(hi.clone() - lo));
    (hi, err)
}

// ---------------------------------------------------------------------------
// Gauss hypergeometric function
// ---------------------------------------------------------------------------

fn f21_series(a: &Complex, b: &Complex, c: &Complex, w: &Complex) -> Complex {
    let mut term = Complex::with_val(PREC, (1, 0));
    let mut acc = term.clone();
    for n in 0..4000u32 {
        let nf = fbig(n as f64);
        term *= (a.clone() + &nf) * (b.clone() + &nf) * w
            / ((c.clone() + &nf) * (nf + 1f64));
        acc += &term;
        if abs_f64(&term) < 1e-70 * (1.0 + abs_f64(&acc)) {
            break;
        }
    }
    acc
}

/// 2F1(a, b, c; w) on the principal branch (cut along [1, infinity)),
/// using series / Pfaff / w -> 1-w / w -> 1/w transformations depending on
/// which argument has the smallest modulus.
pub fn hypergeometric_2f1(a: &Complex, b: &Complex, c: &Complex, w: &Complex) -> Complex {
    let one = Complex::with_val(PREC, (1, 0));
    let m_w = abs_f64(w);
    let m_pfaff = if abs_f64(&(w.clone() - &one)) > 1e-30 {
        abs_f64(&(w.clone() / (w.clone() - &one)))
    } else {
        f64::INFINITY
    };
    let m_omw = abs_f64(&(one.clone() - w));
    let m_inv = if m_w > 1e-30 { 1.0 / m_w } else { f64::INFINITY };

    let best = [m_w, m_pfaff, m_omw, m_inv]
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if (best - m_w).abs() < 1e-15 {
        return f21_series(a, b, c, w);
    }
    if (best - m_pfaff).abs() < 1e-15 {
        // (1-w)^{-a} 2F1(a, c-b; c; w/(w-1))
        let omw = one.clone() - w;
        let arg = w.clone() / (w.clone() - &one);
        return cpow(&omw, &(-a.clone())) * f21_series(a, &(c.clone() - b), c, &arg);
    }
    if (best - m_omw).abs() < 1e-15 {
        // connection at w = 1 (c-a-b not an integer)
        let omw = one.clone() - w;
        let cab = c.clone() - a - b;
        let t1 = gamma_big(c) * gamma_big(&cab)
            / (gamma_big(&(c.clone() - a)) * gamma_big(&(c.clone() - b)))
            * f21_series(a, b, &(one.clone() - &cab), &omw);
        let t2 = gamma_big(c) * gamma_big(&(-cab.clone()))
            / (gamma_big(a) * gamma_big(b))
            * cpow(&omw, &cab)
            * f21_series(
                &(c.clone() - a),
                &(c.clone() - b),
                &(one.clone() + &cab),
                &omw,
            );
        return t1 + t2;
    }
    // connection at w = infinity (b - a not an integer)
    let inv = one.clone() / w;
    let ba = b.clone() - a;
    let t1 = gamma_big(c) * gamma_big(&ba) / (gamma_big(b) * gamma_big(&(c.clone() - a)))
        * cpow(&(-w.clone()), &(-a.clone()))
        * f21_series(
            a,
            &(a.clone() - c + &one),
            &(one.clone() - &ba),
            &inv,
        );
    let t2 = gamma_big(c) * gamma_big(&(-ba.clone()))
        / (gamma_big(a) * gamma_big(&(c.clone() - b)))
        * cpow(&(-w.clone()), &(-b.clone()))
        * f21_series(
            b,
            &(b.clone() - c + &one),
            &(one.clone() + &ba),
            &inv,
        );
    t1 + t2
}

// ---------------------------------------------------------------------------
// Airy model oracles
// ---------------------------------------------------------------------------

/// Exact coefficients rho_m of the infinity-normalized Airy WKB solution:
/// psi_+ = e^{S/hbar} hbar^{1/2} x^{-1/4} sum_m rho_m (hbar x^{-3/2})^m,
/// so rho_0 = 1, rho_1 = 5/48, rho_2 = 385/4608, ...
pub fn airy_rho(n: usize) -> Vec<Qi> {
    let cs = classical_c_sequence::<Qi>(&Poly::x(), 2 * n as i64 + 1);
    let cval = |m: i64| -> Qi {
        let p = &cs[(m + 1) as usize];
        assert!(p.degree() <= 0);
        p.coeff(0)
    };
    let len = n + 1;
    // U(t) = 1 + sum_k c_{2k-1} t^{2k};  E(t) = sum_k c_{2k-1}/(3/2-3k) t^{2k-1}
    let mut u = vec![Qi::zero(); len];
    let mut e = vec![Qi::zero(); len];
    u[0] = Qi::one();
    for k in 1.. {
        if 2 * k >= len && 2 * k - 1 >= len {
            break;
        }
        let c = cval(2 * k as i64 - 1);
        if 2 * k < len {
            u[2 * k] = c.clone();
        }
        if 2 * k - 1 < len {
            e[2 * k - 1] = c.mul(&Qi::from_frac(2, 3 - 6 * k as i64));
        }
    }
    let us = Series::new(u);
    let es = Series::new(e);
    // rho = U^{-1/2} e^{E}
    let rho = us
        .log()
        .scale(&Qi::from_frac(-1, 2))
        .add(&es)
        .exp();
    rho.c
}

/// psi_{+/-, m}(x) = (+/-1)^m rho_m x^{-1/4 - 3m/2} for real x > 0.
pub fn airy_psi_coeffs(x: f64, plus: bool, n: usize) -> Vec<Complex> {
    let rho = airy_rho(n);
    let xf = fbig(x);
    let xq = xf.clone().sqrt().sqrt(); // x^{1/4}
    let x32 = xf.clone() * xf.sqrt(); // x^{3/2}
    let mut scale = 1f64 / xq;
    let mut out = Vec::with_capacity(n);
    for (m, r) in rho.iter().take(n).enumerate() {
        let mut v = Complex::with_val(PREC, (scale.clone(), fbig(0.0)));
        let (re, im) = r.to_f64_pair();
        // exact embedding of the rational coefficient
        let rq = Complex::with_val(
            PREC,
            (rat_to_float(&r.re), rat_to_float(&r.im)),
        );
        let _ = (re, im);
        v *= rq;
        if !plus && m % 2 == 1 {
            v = -v;
        }
        out.push(v);
        scale = scale / x32.clone();
    }
    out
}

/// S(x) = (2/3) x^{3/2} at working precision.
pub fn airy_action(x: f64) -> Float {
    let xf = fbig(x);
    xf.clone() * xf.sqrt() * 2u32 / 3u32
}

/// Closed form of the Airy Borel transform,
/// psi_{+,B} = C x^{-1} w^{-1/2} 2F1(1/6, 5/6, 1/2; w), w = (zeta + S)/(2S),
/// with S = (2/3) x^{3/2} and C = sqrt(3)/(2 sqrt(pi)); the minus solution
/// is the same expression in 1 - w.
pub fn airy_borel_closed(x: f64, zeta: &Complex, plus: bool) -> Complex {
    let s = airy_action(x);
    let w = (zeta.clone() + &s) / (s * 2u32);
    let cconst = fbig(3.0).sqrt() / (big_pi().sqrt() * 2u32) / fbig(x);
    let a = Complex::with_val(PREC, (1, 0)) / 6f64;
    let b = Complex::with_val(PREC, (5, 0)) / 6f64;
    let c = Complex::with_val(PREC, (1, 0)) / 2f64;
    if plus {
        cpow_f(&w, -0.5) * hypergeometric_2f1(&a, &b, &c, &w) * cconst
    } else {
        let omw = cbig(1.0, 0.0) - &w;
        cpow_f(&(w - fbig(1.0)), -0.5) * hypergeometric_2f1(&a, &b, &c, &omw) * cconst
    }
}

/// Borel sum of the Airy WKB solution at real x > 0 (Pade-Borel machinery;
/// for psi_+ the ray must avoid the Borel singularity at zeta = +S, so a
/// lateral ray theta != 0 is required).
pub fn airy_borel_sum(x: f64, hbar: f64, plus: bool, theta: f64, nterms: usize) -> Complex {
    let psi = airy_psi_coeffs(x, plus, nterms);
    let h = cbig(hbar, 0.0);
    let (v, _err) = pade_borel_sum_half(&psi, &h, theta);
    let mut s = airy_action(x) / fbig(hbar);
    if !plus {
        s = -s;
    }
    v * s.exp()
}

// ---------------------------------------------------------------------------
// Weber model oracles
// ---------------------------------------------------------------------------

/// Coefficients of W(hbar) = sum_k (2^{1-2k}-1) B_{2k} / (2k(2k-1) nu^{2k-1})
/// hbar^{2k-1} as a plain power series in hbar (even entries vanish).
pub fn weber_w_coeffs(nu: &BigRational, n: usize) -> Vec<BigRational> {
    let bern = crate::genus0::bernoulli_numbers(n + 2);
    let mut out = vec![BigRational::from_integer(0.into()); n];
    let mut nu_pow = nu.clone(); // nu^{2k-1}
    for k in 1.. {
        let m = 2 * k - 1;
        if m >= n {
            break;
        }
        let two_pow = BigRational::new(1.into(), num_bigint::BigInt::from(2).pow(2 * k as u32 - 1))
            - BigRational::from_integer(1.into());
        let denom = BigRational::from_integer((2 * k as i64 * (2 * k as i64 - 1)).into());
        out[m] = two_pow * &bern[2 * k] / denom / &nu_pow;
        nu_pow *= nu * nu;
    }
    out
}

/// Exact Taylor coefficients of e^{W(hbar)}.
pub fn weber_ew_coeffs(nu: &BigRational, n: usize) -> Vec<BigRational> {
    let w = weber_w_coeffs(nu, n);
    let mut g = vec![BigRational::from_integer(0.into()); n];
    g[0] = BigRational::from_integer(1.into());
    for m in 1..n {
        let mut acc = BigRational::from_integer(0.into());
        for j in 1..=m {
            acc += BigRational::from_integer((j as i64).into()) * &w[j] * &g[m - j];
        }
        g[m] = acc / BigRational::from_integer((m as i64).into());
    }
    g
}

/// Binet-type closed form: the Borel sum of e^W equals
/// Gamma(z + 1/2) e^z z^{-z} / sqrt(2 pi) with z = nu/hbar.
pub fn binet_value(z: &Complex) -> Complex {
    let half = cbig(0.5, 0.0);
    let g = gamma_big(&(z.clone() + half));
    let sqrt_2pi = (big_pi() * 2u32).sqrt();
    g * z.clone().exp() * cpow(z, &(-z.clone())) / sqrt_2pi
}

/// Closed form of the Borel transform of W:
/// B W(zeta) = 1/(2 zeta sinh(zeta/2nu)) - nu/zeta^2,
/// with simple poles at zeta = 2 pi i nu k, k nonzero integer.
pub fn weber_borel_w_closed(nu: Complex64, zeta: &Complex) -> Complex {
    let two_nu = cbig(2.0 * nu.re, 2.0 * nu.im);
    let u = zeta.clone() / &two_nu;
    if abs_f64(&u) < 0.05 {
        // The two terms of the closed form cancel catastrophically at small
        // zeta; use 1/sinh(u) - 1/u = -u/6 + 7u^3/360 - 31u^5/15120 + ...
        let u2 = u.clone().square();
        let series = (cbig(127.0 / 604800.0, 0.0) * &u2 - fbig(31.0 / 15120.0)) * &u2;
        let series = (series + fbig(7.0 / 360.0)) * &u2 - fbig(1.0 / 6.0);
        return series * u / (zeta.clone() * 2f64);
    }
    cbig(1.0, 0.0) / (zeta.clone() * u.sinh() * 2f64) - cbig(nu.re, nu.im) / (zeta.clone() * zeta)
}

/// The Voros symbol e^W is Borel summable in the direction theta = 0 unless
/// a Borel singularity 2 pi i nu k lies on the positive real axis, i.e.
/// unless nu is purely imaginary and nonzero.
pub fn weber_summable(nu: Complex64) -> bool {
    !(nu.re.abs() < 1e-14 && nu.im.abs() > 1e-14)
}

// ---------------------------------------------------------------------------
// Bessel model oracle
// ---------------------------------------------------------------------------

/// Closed form of the Borel transform for Q = 1/x + hbar^2 lambda/x^2,
/// normalized at the simple pole x = 0:
/// psi_{+,B} = C w^{-1/2} 2F1(alpha - 1/2, beta - 1/2, 1/2; w),
/// C = 1/(2 sqrt(pi)), w = zeta/(4 sqrt(x)) + 1/2, alpha + beta = 2,
/// alpha beta = -4 lambda.
pub fn bessel_borel_closed(lambda: f64, x: f64, zeta: &Complex, plus: bool) -> Complex {
    let disc = (1.0 + 4.0 * lambda).sqrt();
    let alpha = 1.0 + disc;
    let beta = 1.0 - disc;
    let a = cbig(alpha - 0.5, 0.0);
    let b = cbig(beta - 0.5, 0.0);
    let c = cbig(0.5, 0.0);
    let xf = fbig(x);
    let w = zeta.clone() / (xf.sqrt() * 4u32) + fbig(0.5);
    let cc = big_re(1.0) / (big_pi().sqrt() * 2u32);
    if plus {
        cpow_f(&w, -0.5) * hypergeometric_2f1(&a, &b, &c, &w) * cc
    } else {
        let omw = cbig(1.0, 0.0) - &w;
        cpow_f(&(w - fbig(1.0)), -0.5) * hypergeometric_2f1(&a, &b, &c, &omw) * cc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_reproduces_gamma_values() {
        // integral_0^infty e^{-t} dt = 1 and the half-power kernel gives
        // Gamma(1/2) = sqrt(pi)
        let one = laplace_ray(|_| Complex::with_val(PREC, (1, 0)), &cbig(1.0, 0.0), 0.0);
        assert!((abs_f64(&one) - 1.0).abs() < 1e-25);
        let g = laplace_ray_half(|_| Complex::with_val(PREC, (1, 0)), &cbig(1.0, 0.0), 0.0);
        let sqrt_pi = big_pi().sqrt().to_f64();
        assert!((abs_f64(&g) - sqrt_pi).abs() < 1e-25);
    }

    #[test]
    fn pade_reconstructs_rational_functions() {
        // f = (1 + 2z)/(1 - z - z^2): [1/2] Pade from 4 Taylor terms is exact
        let mut c = vec![cbig(1.0, 0.0); 8];
        // Taylor of f: c_n from recurrence c_n = c_{n-1} + c_{n-2}, seeded
        c[0] = cbig(1.0, 0.0);
        c[1] = cbig(3.0, 0.0);
        for n in 2..8 {
            c[n] = c[n - 1].clone() + &c[n - 2];
        }
        let (num, den) = pade(&c, 1, 2);
        let z = cbig(0.3, 0.1);
        let approx = pade_eval(&num, &den, &z);
        let exact = (cbig(1.0, 0.0) + z.clone() * 2f64)
            / (cbig(1.0, 0.0) - &z - z.clone() * &z);
        assert!(abs_f64(&(approx - exact)) < 1e-60);
    }

    #[test]
    fn hypergeometric_dual_paths_agree() {
        let a = Complex::with_val(PREC, (1, 0)) / 6f64;
        let b = Complex::with_val(PREC, (5, 0)) / 6f64;
        let c = Complex::with_val(PREC, (1, 0)) / 2f64;
        // closed form: 2F1(a, 1-a, 1/2; w) = cos((1-2a) asin sqrt(w)) / cos(asin sqrt(w))
        let check = |wre: f64, wim: f64| {
            let w = cbig(wre, wim);
            let f = hypergeometric_2f1(&a, &b, &c, &w);
            let sq = w.clone().sqrt().asin();
            let closed = (sq.clone() * (fbig(2.0) / 3u32)).cos() / sq.cos();
            assert!(
                abs_f64(&(f.clone() - &closed)) < 1e-25,
                "w = {wre}+{wim}i: {} vs {}",
                to_c64(&f),
                to_c64(&closed)
            );
        };
        check(0.3, 0.1); // direct series
        check(0.9, 0.0); // connection at w = 1
        check(-0.9, 0.0); // Pfaff region
        check(-5.0, 0.0); // inversion region
        check(3.0, 2.0); // inversion with complex argument
        // log case: 2F1(1, 1, 2; w) = -log(1-w)/w
        let w = cbig(0.4, 0.2);
        let f = hypergeometric_2f1(&cbig(1.0, 0.0), &cbig(1.0, 0.0), &cbig(2.0, 0.0), &w);
        let closed = -(cbig(1.0, 0.0) - &w).ln() / &w;
        assert!(abs_f64(&(f - closed)) < 1e-25);
    }

    #[test]
    fn airy_rho_low_orders() {
        let rho = airy_rho(4);
        assert_eq!(rho[0], Qi::one());
        assert_eq!(rho[1], Qi::from_frac(5, 48));
        assert_eq!(rho[2], Qi::from_frac(385, 4608));
    }

    #[test]
    fn airy_borel_transform_matches_closed_form() {
        // compare the Borel-transformed series around zeta = -S with the
        // hypergeometric closed form, at x = 1 and zeta + S = 0.2
        let x = 1.0;
        let psi = airy_psi_coeffs(x, true, 40);
        let g = borel_transform_half(&psi);
        let xi = cbig(0.2, 0.0);
        let series = poly_eval_big(&g, &xi) * cpow_f(&xi, -0.5);
        let zeta = xi - airy_action(x);
        let closed = airy_borel_closed(x, &zeta, true);
        assert!(
            abs_f64(&(series.clone() - &closed)) < 1e-25,
            "{} vs {}",
            to_c64(&series),
            to_c64(&closed)
        );
    }

    #[test]
    fn airy_borel_singularity_scan() {
        // the Borel transform of psi_+ is singular at distance 2S from the
        // expansion point; the Pade pole scan should locate it within 1%
        let psi = airy_psi_coeffs(1.0, true, 44);
        let g = borel_transform_half(&psi);
        let sing = scan_borel_singularities(&g, 18);
        assert!(!sing.is_empty());
        let target = 4.0 / 3.0;
        let nearest = sing[0];
        assert!(
            (nearest.norm() - target).abs() < 0.01 * target,
            "nearest pole {nearest} vs 2S = {target}"
        );
        assert!(nearest.im.abs() < 0.01);
    }

    #[test]
    fn airy_ode_residual_small() {
        // hbar^2 psi'' - x psi at x = 1 via a five-point stencil on the
        // Borel sums; psi_- is summable along theta = 0, psi_+ needs a
        // lateral ray (rotated well away from the cut for quadrature).
        let hbar = 0.1;
        let delta = 0.002;
        for (plus, theta) in [(false, 0.0), (true, 0.3)] {
            let f: Vec<Complex> = (-2..=2)
                .map(|k| airy_borel_sum(1.0 + k as f64 * delta, hbar, plus, theta, 44))
                .collect();
            let d2 = (-f[0].clone() + f[1].clone() * 16f64 - f[2].clone() * 30f64
                + f[3].clone() * 16f64
                - f[4].clone())
                / fbig(12.0 * delta * delta);
            let resid = d2 * fbig(hbar * hbar) - f[2].clone();
            assert!(
                abs_f64(&resid) < 1e-6,
                "plus={plus}: residual {}",
                abs_f64(&resid)
            );
        }
    }

    #[test]
    fn airy_coefficients_grow_at_gevrey_one_rate() {
        // |psi_m / Gamma(m+1/2)|^{1/m} approaches 1/(2S) = 3/4 at x = 1
        let psi = airy_psi_coeffs(1.0, true, 44);
        let g = borel_transform_half(&psi);
        let m = 40;
        let rate = abs_f64(&g[m]).powf(1.0 / m as f64);
        assert!(
            (rate - 0.75).abs() < 0.1,
            "growth rate {rate} vs 0.75"
        );
    }

    #[test]
    fn weber_borel_w_taylor_matches_closed_form() {
        let nu = BigRational::from_integer(1.into());
        let w = weber_w_coeffs(&nu, 30);
        let wc: Vec<Complex> = w
            .iter()
            .map(|r| Complex::with_val(PREC, (rat_to_float(r), fbig(0.0))))
            .collect();
        let b = borel_transform(&wc);
        let zeta = cbig(0.5, 0.3);
        let series = poly_eval_big(&b, &zeta);
        let closed = weber_borel_w_closed(Complex64::new(1.0, 0.0), &zeta);
        assert!(abs_f64(&(series - closed)) < 1e-25);
    }

    #[test]
    fn weber_borel_sum_matches_binet() {
        // S[e^W] at nu = 1, hbar = 1/10 against
        // Gamma(z+1/2) e^z z^{-z} / sqrt(2 pi) at z = 10
        let nu = BigRational::from_integer(1.into());
        let a = weber_ew_coeffs(&nu, 42);
        let ac: Vec<Complex> = a
            .iter()
            .map(|r| Complex::with_val(PREC, (rat_to_float(r), fbig(0.0))))
            .collect();
        let (val, err) = pade_borel_sum(&ac, &cbig(0.1, 0.0), 0.0);
        let target = binet_value(&cbig(10.0, 0.0));
        let diff = abs_f64(&(val - target));
        assert!(diff < 1e-8, "difference {diff}, internal estimate {err}");
    }

    #[test]
    fn weber_borel_singularities_near_2_pi_i() {
        let nu = BigRational::from_integer(1.into());
        let a = weber_ew_coeffs(&nu, 42);
        let ac: Vec<Complex> = a
            .iter()
            .map(|r| Complex::with_val(PREC, (rat_to_float(r), fbig(0.0))))
            .collect();
        let b = borel_transform(&ac);
        let sing = scan_borel_singularities(&b, 16);
        assert!(!sing.is_empty());
        let target = 2.0 * std::f64::consts::PI;
        let nearest = sing[0];
        assert!(
            (nearest.norm() - target).abs() < 0.01 * target,
            "nearest {nearest} vs 2 pi i"
        );
        assert!(nearest.re.abs() < 0.01 * target);
    }

    #[test]
    fn weber_summability_criterion() {
        assert!(weber_summable(Complex64::new(1.0, 0.0)));
        assert!(weber_summable(Complex64::new(0.3, 0.7)));
        assert!(!weber_summable(Complex64::new(0.0, 1.0)));
        assert!(!weber_summable(Complex64::new(0.0, -0.25)));
    }

    #[test]
    fn bessel_borel_closed_form_satisfies_borel_plane_equation() {
        // the Borel transform must satisfy d^2/dx^2 B = Q0 d^2/dzeta^2 B + Q2 B
        // for Q0 = 1/x, Q2 = lambda/x^2; checked by central differences
        let lambda = -0.17;
        let x0 = 1.3;
        let z0 = cbig(0.4, 0.3);
        let d = 1e-6;
        let fxx = (bessel_borel_closed(lambda, x0 + d, &z0, true)
            + bessel_borel_closed(lambda, x0 - d, &z0, true)
            - bessel_borel_closed(lambda, x0, &z0, true) * 2f64)
            / fbig(d * d);
        let dz = fbig(d);
        let fzz = (bessel_borel_closed(lambda, x0, &(z0.clone() + &dz), true)
            + bessel_borel_closed(lambda, x0, &(z0.clone() - &dz), true)
            - bessel_borel_closed(lambda, x0, &z0, true) * 2f64)
            / fbig(d * d);
        let f = bessel_borel_closed(lambda, x0, &z0, true);
        let resid = fxx - fzz / fbig(x0) - f * fbig(lambda / (x0 * x0));
        assert!(abs_f64(&resid) < 1e-6, "residual {}", abs_f64(&resid));
    }
}
