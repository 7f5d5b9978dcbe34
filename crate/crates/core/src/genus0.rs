//! Genus-zero spectral curves: exact rational parametrizations of the
//! classical examples (Airy, Weber, Bessel-type simple pole, Gauss
//! hypergeometric) and exact period integrals computed through them.

use crate::mpoly::MPoly;
use crate::param::Param;
use crate::poly::{Field, Poly, RatFunc};
use crate::qq::Qi;
use crate::ratint::{order_at_infinity, residue_at_infinity};
use crate::wkb::{wkb_recursion, WkbPotential, WkbSeries};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

type P = Poly<Param>;
type R = RatFunc<Param>;

// ---------------------------------------------------------------------------
// Potentials
// ---------------------------------------------------------------------------

/// Airy: Q = x.
pub fn airy_potential() -> WkbPotential<Param> {
    WkbPotential::classical(R::x())
}

/// Weber: Q = x^2/4 - nu, with nu a symbolic parameter.
pub fn weber_potential() -> WkbPotential<Param> {
    let nu = Param::var("nu");
    WkbPotential::classical(R::from_poly(P::new(vec![
        -&nu,
        Param::zero(),
        Param::from_frac(1, 4),
    ])))
}

/// Simple-pole normal form (Bessel type): Q = 1/x + h^2 lambda/x^2.
pub fn bessel_potential() -> WkbPotential<Param> {
    let lambda = Param::var("lambda");
    let q0 = R::new(P::one(), P::x());
    let q2 = R::new(P::constant(lambda), P::monomial(2, Param::one()));
    WkbPotential {
        q: vec![q0, R::zero(), q2],
    }
}

/// Gauss hypergeometric potential with symbolic theta parameters:
///   Q0 = th0^2/x^2 + th1^2/(x-1)^2 + (thinf^2 - th0^2 - th1^2)/(x(x-1)),
///   Q2 = -1/(4x^2) - 1/(4(x-1)^2) + 1/(4x(x-1)).
pub fn gauss_hg_potential() -> WkbPotential<Param> {
    let th0 = Param::var("th0");
    let th1 = Param::var("th1");
    let thinf = Param::var("thinf");
    let x = R::x();
    let xm1 = x.sub(&R::one());
    let x2 = x.mul(&x);
    let xm12 = xm1.mul(&xm1);
    let xxm1 = x.mul(&xm1);
    let q0 = RatFunc::constant(&th0 * &th0)
        .div(&x2)
        .add(&RatFunc::constant(&th1 * &th1).div(&xm12))
        .add(
            &RatFunc::constant(&(&(&thinf * &thinf) - &(&th0 * &th0)) - &(&th1 * &th1))
                .div(&xxm1),
        );
    let q2 = RatFunc::constant(Param::from_frac(-1, 4))
        .div(&x2)
        .add(&RatFunc::constant(Param::from_frac(-1, 4)).div(&xm12))
        .add(&RatFunc::constant(Param::from_frac(1, 4)).div(&xxm1));
    WkbPotential {
        q: vec![q0, R::zero(), q2],
    }
}

// ---------------------------------------------------------------------------
// Bernoulli numbers
// ---------------------------------------------------------------------------

/// Exact Bernoulli numbers B_0..B_n (B_1 = -1/2 convention).
pub fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        if m == 0 {
            b.push(BigRational::one());
            continue;
        }
        // sum_{j=0}^{m} C(m+1, j) B_j = 0
        let mut acc = BigRational::zero();
        let mut binom = BigInt::one(); // C(m+1, 0)
        for (j, bj) in b.iter().enumerate() {
            if j > 0 {
                binom = &binom * BigInt::from(m + 2 - j) / BigInt::from(j);
            }
            acc += BigRational::from_integer(binom.clone()) * bj;
        }
        let c = BigRational::from_integer(BigInt::from(m + 1));
        b.push(-acc / c);
    }
    b
}

pub fn bernoulli_qi(k: usize) -> Qi {
    Qi::from_rational(bernoulli_numbers(k)[k].clone())
}

// ---------------------------------------------------------------------------
// Weber curve: rational parametrization and exact periods
// ---------------------------------------------------------------------------

/// Substitute nu = s^2 into every coefficient of a polynomial in x.
fn poly_nu_to_s2(p: &P) -> P {
    let s2 = {
        let s = Param::var("s");
        &s * &s
    };
    P::new(p.coeffs.iter().map(|c| c.subst("nu", &s2)).collect())
}

/// Rewrite an even rational expression in s as an expression in nu = s^2.
/// Panics if the expression is genuinely odd in s.
pub fn param_even_s_to_nu(p: &Param) -> Param {
    let sidx = crate::mpoly::var_index("s").unwrap();
    let nuidx = crate::mpoly::var_index("nu").unwrap();
    let split = |m: &MPoly| -> (MPoly, MPoly) {
        // (even part, odd part / s)
        let mut even = MPoly::zero();
        let mut odd = MPoly::zero();
        for (e, c) in &m.terms {
            let mut e2 = *e;
            if e[sidx] % 2 == 0 {
                e2[sidx] = 0;
                e2[nuidx] += e[sidx] / 2;
                even = even.add_term(e2, c.clone());
            } else {
                e2[sidx] = 0;
                e2[nuidx] += (e[sidx] - 1) / 2;
                odd = odd.add_term(e2, c.clone());
            }
        }
        (even, odd)
    };
    let (ne, no) = split(&p.num);
    let (de, dm) = split(&p.den);
    // num/den = (ne + s no)/(de + s dm); multiply by (de - s dm):
    // numerator (ne de - nu no dm) + s (no de - ne dm), denominator de^2 - nu dm^2.
    let nu = MPoly::var_named("nu");
    let odd_part = &(&no * &de) - &(&ne * &dm);
    assert!(odd_part.is_zero(), "expression is odd in s, cannot rewrite in nu");
    let num = &(&ne * &de) - &(&nu * &(&no * &dm));
    let den = &(&de * &de) - &(&nu * &(&dm * &dm));
    Param::new(num, den)
}

/// Compose a polynomial with the rational map Xn/Xd without any reduction:
/// returns (p(Xn/Xd) * Xd^deg(p)) as a polynomial.
fn poly_comp_raw(p: &P, xn: &P, xd: &P) -> P {
    let d = p.degree().max(0) as usize;
    let mut out = P::zero();
    let mut xn_pow = P::one();
    let mut xd_pows: Vec<P> = Vec::with_capacity(d + 1);
    xd_pows.push(P::one());
    for _ in 0..d {
        let last = xd_pows.last().unwrap().mul(xd);
        xd_pows.push(last);
    }
    for (j, c) in p.coeffs.iter().enumerate() {
        out = out.add(&xn_pow.scale(c).mul(&xd_pows[d - j]));
        if j < d {
            xn_pow = xn_pow.mul(xn);
        }
    }
    out
}

/// Pull back P_m dx under the Weber parametrization x = s(z + 1/z) with
/// nu = s^2, on the branch sqrt(Q) = (s/2)(z - 1/z), using the classical
/// polynomial form P_m = c_m(x) Q^{-(3m+2)/2}. Returns an unreduced
/// rational 1-form coefficient in z with poles only at z = 0, +-1.
pub fn weber_pullback(cseq: &[P], m: i64) -> R {
    let s = Param::var("s");
    let cm = poly_nu_to_s2(&cseq[(m + 1) as usize]);
    let d = cm.degree().max(0) as usize;
    // x(z): Xn = s z^2 + s, Xd = z
    let xn = P::new(vec![s.clone(), Param::zero(), s.clone()]);
    let xd = P::x();
    // c_m(x(z)) = comp / z^d
    let comp = poly_comp_raw(&cm, &xn, &xd);
    // sqrt(Q) o x = s (z^2 - 1) / (2 z); x'(z) = s (z^2 - 1) / z^2
    let sz2m1 = P::new(vec![-&s, Param::zero(), s.clone()]); // s(z^2-1)
    let k = 3 * m + 2;
    // P_m dx = comp/z^d * [2z / (s(z^2-1))]^k * s(z^2-1)/z^2 dz
    let mut num = comp.mul(&sz2m1);
    let mut den = P::monomial(d + 2, Param::one());
    if k >= 0 {
        num = num.mul(&P::monomial(k as usize, Param::from_int(2).pow_i(k as i32)));
        den = den.mul(&sz2m1.pow(k as u32));
    } else {
        num = num.mul(&sz2m1.pow((-k) as u32));
        den = den.mul(&P::monomial((-k) as usize, Param::from_int(2).pow_i(-k as i32)));
    }
    R::raw(num, den)
}

/// Exact value of the regularized integral of P_m dx between the two
/// preimages of x = infinity on the Weber curve (z from 0 to infinity),
/// expressed in nu. Defined for m >= 1, where the integral converges.
pub fn weber_infty_integral(cseq: &[P], m: i64) -> Param {
    assert!(m >= 1);
    let f = weber_pullback(cseq, m);
    // Convergence at the endpoints: analytic at z = 0, decaying at infinity.
    assert!(
        crate::ratint::order_at(&f, &Param::zero()) >= 0,
        "Weber period integrand singular at z = 0"
    );
    assert!(
        order_at_infinity(&f) >= 2,
        "Weber period integrand does not decay at infinity"
    );
    // The integrand is a sum of pure principal parts at z = +-1 (there is no
    // polynomial part by the decay, and no other poles). Each term
    // c/(z-p)^k integrates to c (0-p)^{1-k}/(k-1) over (0, infinity); the
    // k = 1 terms are absent because the integral converges path-wise.
    let mut total = Param::zero();
    for p in [Param::one(), -&Param::one()] {
        let pord = crate::ratint::poly_order_at(&f.den, &p) as i64
            - crate::ratint::poly_order_at(&f.num, &p) as i64;
        if pord <= 0 {
            continue;
        }
        let (k0, coeffs) = crate::ratint::laurent_at(&f, &p, pord as usize);
        for (j, c) in coeffs.iter().enumerate() {
            let e = k0 + j as i64; // exponent of (z - p)
            if e >= 0 {
                break;
            }
            if e == -1 {
                assert!(c.is_zero(), "unexpected log term in Weber period at z = {p:?}");
                continue;
            }
            let k = -e; // k >= 2
            // contribution c * (-p)^{1-k} / (k-1)
            let base = -&p;
            let pw = base.pow_i((1 - k) as i32);
            total = total.add(&c.mul(&pw).div(&Param::from_int(k - 1)));
        }
    }
    param_even_s_to_nu(&total)
}

/// The closed-form expectation for the same integral:
///   (2^{1-2k}-1) B_{2k} / (2k(2k-1) nu^{2k-1})  for m = 2k-1, 0 for even m.
pub fn weber_infty_integral_expected(m: i64) -> Param {
    assert!(m >= 1);
    if m % 2 == 0 {
        return Param::zero();
    }
    let k = ((m + 1) / 2) as usize;
    let b2k = bernoulli_qi(2 * k);
    let two = BigRational::from_integer(BigInt::from(2));
    let pref = {
        // 2^{1-2k} - 1
        let mut p = BigRational::one();
        for _ in 0..(2 * k - 1) {
            p /= &two;
        }
        p - BigRational::one()
    };
    let den = Qi::from_int((2 * k * (2 * k - 1)) as i64);
    let coeff = &(&Qi::from_rational(pref) * &b2k) / &den;
    let nu = Param::var("nu");
    Param::from_qi(coeff).mul(&nu.pow_i(-(2 * k as i32 - 1)))
}

/// Residue at x = infinity of P_m dx for the Weber potential on the branch
/// sqrt(Q) ~ x/2: computed on the curve as the residue at z = infinity.
pub fn weber_residue_at_infinity(cseq: &[P], m: i64) -> Param {
    let f = weber_pullback(cseq, m);
    param_even_s_to_nu(&residue_at_infinity(&f))
}

impl MPoly {
    fn add_term(&self, e: crate::mpoly::Expo, c: Qi) -> MPoly {
        &*self + &MPoly::monomial(e, c)
    }
}

/// The polynomial WKB data c_m for the Weber potential with symbolic nu.
pub fn weber_c_sequence(m_max: i64) -> Vec<P> {
    let nu = Param::var("nu");
    let q0: P = Poly::new(vec![-&nu, Param::zero(), Param::from_frac(1, 4)]);
    crate::wkb::classical_c_sequence(&q0, m_max)
}

/// Convenience: run the full (generic) Weber recursion; used for
/// cross-checks against the fast polynomial path.
pub fn weber_series(m_max: i64) -> WkbSeries<Param> {
    wkb_recursion(&weber_potential(), m_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_values() {
        let b = bernoulli_numbers(12);
        let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        assert_eq!(b[1], q(-1, 2));
        assert_eq!(b[2], q(1, 6));
        assert_eq!(b[4], q(-1, 30));
        assert_eq!(b[6], q(1, 42));
        assert_eq!(b[12], q(-691, 2730));
        assert!(b[3].is_zero() && b[5].is_zero() && b[11].is_zero());
    }

    #[test]
    fn weber_first_period_term() {
        // m = 1 (k = 1): expected (2^{-1}-1) B_2 / (2 * 1 * nu) = -1/(24 nu).
        let c = weber_c_sequence(1);
        let got = weber_infty_integral(&c, 1);
        let expect = weber_infty_integral_expected(1);
        let nu = Param::var("nu");
        assert_eq!(expect, Param::from_frac(-1, 24).mul(&nu.inv()));
        // up to the overall sign convention of the branch
        assert!(got == expect || got == -&expect, "got {got:?}");
    }

    #[test]
    fn weber_periods_match_bernoulli_closed_form() {
        let c = weber_c_sequence(6);
        for m in 1..=6i64 {
            let got = weber_infty_integral(&c, m);
            let expect = weber_infty_integral_expected(m);
            assert_eq!(got, expect, "mismatch at m = {m}");
        }
    }

    #[test]
    fn weber_classical_residue_is_nu() {
        // sqrt(Q) dx ~ (x/2 - nu/x + ...) dx at infinity: residue -nu on the
        // principal branch, so the cycle integral around the turning points
        // is 2 pi i nu (up to orientation).
        let c = weber_c_sequence(0);
        let r = weber_residue_at_infinity(&c, -1);
        let nu = Param::var("nu");
        assert!(r == nu || r == -&nu, "got {r:?}");
    }

    #[test]
    fn gauss_hg_potential_shape() {
        let pot = gauss_hg_potential();
        // Q0 has double poles at 0 and 1 and a double pole at infinity
        // (order -2 as a rational function times dx^2 ~ theta_inf^2/x^2).
        assert_eq!(crate::ratint::order_at(&pot.q[0], &Param::zero()), -2);
        assert_eq!(crate::ratint::order_at(&pot.q[0], &Param::one()), -2);
        assert_eq!(crate::ratint::order_at_infinity(&pot.q[0]), 2);
    }
}
