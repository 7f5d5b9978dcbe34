//! Arbitrary-precision complex numerics, a thin convenience layer over
//! `rug::Complex` (MPC/MPFR). All resummation work runs at a fixed working
//! precision chosen generously above the target tolerances.

use crate::qq::Qi;
use num_complex::Complex64;
use rug::ops::CompleteRound;
use rug::{Complex, Float};

/// Default working precision in bits.
pub const PREC: u32 = 256;

pub fn big(re: f64, im: f64) -> Complex {
    Complex::with_val(PREC, (re, im))
}

pub fn big_re(re: f64) -> Complex {
    big(re, 0.0)
}

pub fn big_zero() -> Complex {
    Complex::with_val(PREC, (0, 0))
}

pub fn big_one() -> Complex {
    Complex::with_val(PREC, (1, 0))
}

pub fn big_i() -> Complex {
    Complex::with_val(PREC, (0, 1))
}

pub fn big_pi() -> Float {
    Float::with_val(PREC, rug::float::Constant::Pi)
}

/// Exact embedding of a Gaussian rational.
pub fn big_from_qi(q: &Qi) -> Complex {
    let rat_to_float = |r: &num_rational::BigRational| -> Float {
        let n = Float::parse(r.numer().to_string())
            .map(|p| p.complete(PREC))
            .unwrap();
        let d = Float::parse(r.denom().to_string())
            .map(|p| p.complete(PREC))
            .unwrap();
        n / d
    };
    Complex::with_val(PREC, (rat_to_float(&q.re), rat_to_float(&q.im)))
}

pub fn big_from_c64(z: Complex64) -> Complex {
    big(z.re, z.im)
}

pub fn to_c64(z: &Complex) -> Complex64 {
    Complex64::new(z.real().to_f64(), z.imag().to_f64())
}

pub fn abs_big(z: &Complex) -> Float {
    z.clone().abs().into_real_imag().0
}

pub fn abs_f64(z: &Complex) -> f64 {
    abs_big(z).to_f64()
}

/// Gamma(z) for complex argument by Spouge's approximation at high
/// precision (MPC does not ship a complex gamma). With a = 60 terms the
/// relative error is around 10^-48, well below the crate's tolerances.
pub fn gamma_big(z: &Complex) -> Complex {
    use rug::ops::Pow;
    const A: u32 = 60;
    if z.real().to_f64() < 0.5 {
        // reflection: Gamma(z) = pi / (sin(pi z) Gamma(1-z))
        let pi = Complex::with_val(PREC, (big_pi(), Float::with_val(PREC, 0)));
        let s = (pi.clone() * z).sin();
        let g = gamma_big(&(Complex::with_val(PREC, (1, 0)) - z));
        return pi / (s * g);
    }
    // Gamma(z) = (w+a)^{w+1/2} e^{-(w+a)} [c0 + sum_k ck/(w+k)], w = z-1.
    let w = z.clone() - 1f64;
    let af = Float::with_val(PREC, A);
    let sqrt_2pi = (Float::with_val(PREC, 2) * big_pi()).sqrt();
    let mut sum = Complex::with_val(PREC, (sqrt_2pi, Float::with_val(PREC, 0)));
    let mut fact = Float::with_val(PREC, 1); // (k-1)!
    for k in 1..A {
        if k > 1 {
            fact *= k - 1;
        }
        let amk = Float::with_val(PREC, A - k);
        // ck = (-1)^{k-1}/(k-1)! * (a-k)^{k-1/2} * e^{a-k}
        let mut ck = amk.clone().pow(Float::with_val(PREC, k as f64 - 0.5))
            * amk.exp()
            / fact.clone();
        if k % 2 == 0 {
            ck = -ck;
        }
        let den = w.clone() + Float::with_val(PREC, k);
        sum += Complex::with_val(PREC, (ck, Float::with_val(PREC, 0))) / den;
    }
    let base = w.clone() + af.clone();
    let exponent = w.clone() + 0.5f64;
    let pow = (base.ln() * exponent).exp();
    pow * (-(w + af)).exp() * sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qi_embedding_is_exact_for_dyadics() {
        let q = Qi::from_frac(3, 8);
        let z = big_from_qi(&q);
        assert_eq!(z.real().to_f64(), 0.375);
    }

    #[test]
    fn gamma_matches_factorials() {
        for n in 1..8u32 {
            let g = gamma_big(&Complex::with_val(PREC, (n, 0)));
            let mut fact = 1f64;
            for j in 1..n {
                fact *= j as f64;
            }
            assert!((g.real().to_f64() - fact).abs() < 1e-10 * fact.max(1.0));
        }
    }

    #[test]
    fn gamma_half_is_sqrt_pi() {
        let g = gamma_big(&Complex::with_val(PREC, (0.5, 0)));
        let sp = big_pi().sqrt().to_f64();
        assert!((g.real().to_f64() - sp).abs() < 1e-12);
    }

    #[test]
    fn gamma_reflection_complex_point() {
        // |Gamma(i)|^2 = pi / sinh(pi)
        let g = gamma_big(&big_i());
        let m2 = abs_f64(&g).powi(2);
        let expect = std::f64::consts::PI / std::f64::consts::PI.sinh();
        assert!((m2 - expect).abs() < 1e-12);
    }
}
