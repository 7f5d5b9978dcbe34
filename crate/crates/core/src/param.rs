//! The parameter field: fractions of multivariate polynomials over Q(i).
//! This is the ground field for all symbolic series work, so elements are
//! kept fully reduced and denominator-normalized at all times.

use crate::mpoly::{MPoly, NVARS};
use crate::qq::Qi;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// A reduced fraction num/den of multivariate polynomials. Invariants:
/// gcd(num, den) = 1, den has leading coefficient 1, zero is 0/1.
#[derive(Clone, PartialEq, Eq)]
pub struct Param {
    pub num: MPoly,
    pub den: MPoly,
}

impl Param {
    pub fn new(num: MPoly, den: MPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self { num, den: MPoly::one() };
        }
        let g = MPoly::gcd(&num, &den);
        let (mut num, mut den) = if g.is_constant() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        let lc = den.leading_coeff();
        if !lc.is_one() {
            let inv = lc.inv();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Self { num, den }
    }

    pub fn from_poly(p: MPoly) -> Self {
        Self { num: p, den: MPoly::one() }
    }

    pub fn from_qi(c: Qi) -> Self {
        Self::from_poly(MPoly::constant(c))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_qi(Qi::from_int(n))
    }

    pub fn from_frac(n: i64, d: i64) -> Self {
        Self::from_qi(Qi::from_frac(n, d))
    }

    pub fn i() -> Self {
        Self::from_qi(Qi::i())
    }

    pub fn var(name: &str) -> Self {
        Self::from_poly(MPoly::var_named(name))
    }

    pub fn zero() -> Self {
        Self::from_poly(MPoly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(MPoly::one())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == MPoly::one() && self.den == MPoly::one()
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn pow_i(&self, n: i32) -> Self {
        if n >= 0 {
            Self::new(self.num.pow(n as u32), self.den.pow(n as u32))
        } else {
            self.inv().pow_i(-n)
        }
    }

    /// Partial derivative with respect to a named variable (quotient rule).
    pub fn diff(&self, name: &str) -> Self {
        let idx = crate::mpoly::var_index(name).expect("unknown variable");
        let n = &(&self.num.diff(idx) * &self.den) - &(&self.num * &self.den.diff(idx));
        let d = &self.den * &self.den;
        Self::new(n, d)
    }

    pub fn subst(&self, name: &str, val: &Param) -> Self {
        let idx = crate::mpoly::var_index(name).expect("unknown variable");
        // Clear to a common denominator: substitute num/den of val into each
        // monomial by evaluating the coefficient lists with Horner.
        let sub_poly = |p: &MPoly| -> Param {
            let coeffs = p.coeffs_in(idx);
            let mut acc = Param::zero();
            for c in coeffs.iter().rev() {
                acc = &(&acc * val) + &Param::from_poly(c.clone());
            }
            if coeffs.is_empty() {
                Param::zero()
            } else {
                acc
            }
        };
        &sub_poly(&self.num) / &sub_poly(&self.den)
    }

    /// Exact evaluation at a full point of Q(i)^n.
    pub fn eval_qi(&self, vals: &[Qi; NVARS]) -> Qi {
        let d = self.den.eval_qi(vals);
        assert!(!d.is_zero(), "evaluation hits a pole");
        &self.num.eval_qi(vals) / &d
    }

    pub fn constant_value(&self) -> Option<Qi> {
        match (self.num.constant_value(), self.den.constant_value()) {
            (Some(n), Some(d)) => Some(&n / &d),
            _ => None,
        }
    }
}

impl Add for &Param {
    type Output = Param;
    fn add(self, rhs: &Param) -> Param {
        Param::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &Param {
    type Output = Param;
    fn sub(self, rhs: &Param) -> Param {
        Param::new(
            &(&self.num * &rhs.den) - &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Mul for &Param {
    type Output = Param;
    fn mul(self, rhs: &Param) -> Param {
        Param::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Div for &Param {
    type Output = Param;
    fn div(self, rhs: &Param) -> Param {
        assert!(!rhs.is_zero(), "division by zero");
        Param::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}

impl Neg for &Param {
    type Output = Param;
    fn neg(self) -> Param {
        Param {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl fmt::Debug for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == MPoly::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_is_automatic() {
        let nu = Param::var("nu");
        let a = &(&nu * &nu) - &Param::one();
        let b = &nu + &Param::one();
        let q = &a / &b;
        assert_eq!(q, &nu - &Param::one());
    }

    #[test]
    fn field_axioms_spot_check() {
        let t = Param::var("t");
        let x = &(&t + &Param::i()) / &(&t - &Param::from_int(2));
        assert!((&x * &x.inv()).is_one());
        let y = Param::var("nu");
        let lhs = &(&x + &y) * &(&x - &y);
        let rhs = &(&x * &x) - &(&y * &y);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn quotient_rule() {
        // d/dt (1/t) = -1/t^2
        let t = Param::var("t");
        let f = t.inv();
        assert_eq!(f.diff("t"), -&(&t * &t).inv());
    }
}
