//! Univariate polynomials and rational functions in the spectral variable,
//! generic over the coefficient field.

use crate::param::Param;
use crate::qq::Qi;
use std::fmt;

/// Minimal field interface. Implemented by the exact coefficient fields used
/// throughout the crate; all operations must be exact.
pub trait Field: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Self;
    fn from_int(n: i64) -> Self;
    fn div(&self, rhs: &Self) -> Self {
        self.mul(&rhs.inv())
    }
    fn from_frac(n: i64, d: i64) -> Self {
        Self::from_int(n).div(&Self::from_int(d))
    }
}

impl Field for Qi {
    fn zero() -> Self {
        Qi::zero()
    }
    fn one() -> Self {
        Qi::one()
    }
    fn is_zero(&self) -> bool {
        Qi::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Self {
        Qi::inv(self)
    }
    fn from_int(n: i64) -> Self {
        Qi::from_int(n)
    }
}

impl Field for Param {
    fn zero() -> Self {
        Param::zero()
    }
    fn one() -> Self {
        Param::one()
    }
    fn is_zero(&self) -> bool {
        Param::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Self {
        Param::inv(self)
    }
    fn from_int(n: i64) -> Self {
        Param::from_int(n)
    }
}

/// Dense univariate polynomial, coefficients lowest-degree first, no trailing
/// zeros (the zero polynomial is the empty list).
#[derive(Clone, PartialEq)]
pub struct Poly<K: Field> {
    pub coeffs: Vec<K>,
}

impl<K: Field> Poly<K> {
    pub fn new(mut coeffs: Vec<K>) -> Self {
        while matches!(coeffs.last(), Some(c) if c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(K::one())
    }

    pub fn constant(c: K) -> Self {
        Self::new(vec![c])
    }

    pub fn x() -> Self {
        Self::new(vec![K::zero(), K::one()])
    }

    pub fn monomial(deg: usize, c: K) -> Self {
        let mut v = vec![K::zero(); deg + 1];
        v[deg] = c;
        Self::new(v)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; -1 for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn coeff(&self, k: usize) -> K {
        self.coeffs.get(k).cloned().unwrap_or_else(K::zero)
    }

    pub fn leading(&self) -> K {
        self.coeffs.last().cloned().unwrap_or_else(K::zero)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k).add(&rhs.coeff(k)));
        }
        Self::new(out)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![K::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &K) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    pub fn diff(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(k, c)| c.mul(&K::from_int(k as i64 + 1)))
                .collect(),
        )
    }

    pub fn eval(&self, x: &K) -> K {
        let mut acc = K::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// Composition self(g(x)).
    pub fn compose(&self, g: &Self) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(g).add(&Self::constant(c.clone()));
        }
        acc
    }

    /// Euclidean division: (quotient, remainder).
    pub fn div_rem(&self, den: &Self) -> (Self, Self) {
        assert!(!den.is_zero(), "polynomial division by zero");
        let dd = den.coeffs.len();
        if self.coeffs.len() < dd {
            return (Self::zero(), self.clone());
        }
        let linv = den.leading().inv();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![K::zero(); rem.len() - dd + 1];
        for k in (dd - 1..rem.len()).rev() {
            let q = rem[k].mul(&linv);
            if q.is_zero() {
                continue;
            }
            quot[k - (dd - 1)] = q.clone();
            for j in 0..dd {
                rem[k - (dd - 1) + j] = rem[k - (dd - 1) + j].sub(&q.mul(&den.coeffs[j]));
            }
        }
        rem.truncate(dd - 1);
        (Self::new(quot), Self::new(rem))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(&self.leading().inv())
    }

    pub fn gcd(a: &Self, b: &Self) -> Self {
        let mut a = a.clone();
        let mut b = b.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }
}

impl<K: Field> fmt::Debug for Poly<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{:?}", c)?,
                1 => write!(f, "{:?}*x", c)?,
                _ => write!(f, "{:?}*x^{}", c, k)?,
            }
        }
        Ok(())
    }
}

/// Rational function num/den with gcd(num, den)=1 and monic denominator.
#[derive(Clone, PartialEq)]
pub struct RatFunc<K: Field> {
    pub num: Poly<K>,
    pub den: Poly<K>,
}

impl<K: Field> RatFunc<K> {
    pub fn new(num: Poly<K>, den: Poly<K>) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self { num, den: Poly::one() };
        }
        let g = Poly::gcd(&num, &den);
        let (num, den) = if g.degree() > 0 {
            (num.div_rem(&g).0, den.div_rem(&g).0)
        } else {
            (num, den)
        };
        let linv = den.leading().inv();
        Self {
            num: num.scale(&linv),
            den: den.scale(&linv),
        }
    }

    pub fn from_poly(p: Poly<K>) -> Self {
        Self { num: p, den: Poly::one() }
    }

    /// Build without gcd reduction. Local expansions (`ratint::laurent_at`
    /// and friends) handle unreduced fractions correctly; skipping the gcd
    /// matters for the large composite expressions built by pullbacks.
    pub fn raw(num: Poly<K>, den: Poly<K>) -> Self {
        assert!(!den.is_zero());
        Self { num, den }
    }

    pub fn constant(c: K) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn x() -> Self {
        Self::from_poly(Poly::x())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self::new(
            self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self::new(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }

    pub fn div(&self, rhs: &Self) -> Self {
        assert!(!rhs.is_zero(), "division by zero rational function");
        Self::new(self.num.mul(&rhs.den), self.den.mul(&rhs.num))
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero());
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn scale(&self, c: &K) -> Self {
        Self::new(self.num.scale(c), self.den.clone())
    }

    pub fn pow_i(&self, n: i32) -> Self {
        let mut out = Self::one();
        let base = if n >= 0 { self.clone() } else { self.inv() };
        for _ in 0..n.abs() {
            out = out.mul(&base);
        }
        out
    }

    pub fn diff(&self) -> Self {
        Self::new(
            self.num.diff().mul(&self.den).sub(&self.num.mul(&self.den.diff())),
            self.den.mul(&self.den),
        )
    }

    pub fn eval(&self, x: &K) -> K {
        let d = self.den.eval(x);
        assert!(!d.is_zero(), "evaluation at a pole");
        self.num.eval(x).div(&d)
    }

    /// Substitute a rational function for x.
    pub fn compose(&self, g: &Self) -> Self {
        let sub = |p: &Poly<K>| -> Self {
            let mut acc = Self::zero();
            for c in p.coeffs.iter().rev() {
                acc = acc.mul(g).add(&Self::constant(c.clone()));
            }
            acc
        };
        sub(&self.num).div(&sub(&self.den))
    }
}

impl<K: Field> fmt::Debug for RatFunc<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == Poly::one() {
            write!(f, "{:?}", self.num)
        } else {
            write!(f, "({:?})/({:?})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = Poly<Qi>;
    type R = RatFunc<Qi>;

    #[test]
    fn div_rem_round_trip() {
        // (x^3 - 1) / (x - 1) = x^2 + x + 1
        let num = P::monomial(3, Qi::one()).sub(&P::one());
        let den = P::x().sub(&P::one());
        let (q, r) = num.div_rem(&den);
        assert!(r.is_zero());
        assert_eq!(q, P::new(vec![Qi::one(), Qi::one(), Qi::one()]));
    }

    #[test]
    fn ratfunc_reduces() {
        let num = P::monomial(2, Qi::one()).sub(&P::one());
        let den = P::x().add(&P::one());
        let f = R::new(num, den);
        assert_eq!(f, R::from_poly(P::x().sub(&P::one())));
    }

    #[test]
    fn derivative_of_inverse_square() {
        // d/dx x^-2 = -2 x^-3
        let f = R::new(P::one(), P::monomial(2, Qi::one()));
        let expect = R::new(P::constant(Qi::from_int(-2)), P::monomial(3, Qi::one()));
        assert_eq!(f.diff(), expect);
    }
}
