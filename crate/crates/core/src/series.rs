//! Truncated formal power series over an exact field. Used for expansions
//! in the small parameter and in the Borel variable.

use crate::poly::Field;
use std::fmt;

/// Power series truncated at a fixed order: coefficient k is the coefficient
/// of the k-th power. All binary operations require equal truncation lengths.
#[derive(Clone, PartialEq)]
pub struct Series<K: Field> {
    pub c: Vec<K>,
}

impl<K: Field> Series<K> {
    pub fn new(c: Vec<K>) -> Self {
        Self { c }
    }

    pub fn zero(n: usize) -> Self {
        Self { c: vec![K::zero(); n] }
    }

    pub fn constant(v: K, n: usize) -> Self {
        let mut s = Self::zero(n);
        if n > 0 {
            s.c[0] = v;
        }
        s
    }

    pub fn one(n: usize) -> Self {
        Self::constant(K::one(), n)
    }

    /// The series variable itself.
    pub fn x(n: usize) -> Self {
        let mut s = Self::zero(n);
        if n > 1 {
            s.c[1] = K::one();
        }
        s
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|v| v.is_zero())
    }

    pub fn truncate(&self, n: usize) -> Self {
        let mut c = self.c.clone();
        c.truncate(n);
        c.resize(n, K::zero());
        Self { c }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.len(), rhs.len());
        Self {
            c: self.c.iter().zip(&rhs.c).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.len(), rhs.len());
        Self {
            c: self.c.iter().zip(&rhs.c).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            c: self.c.iter().map(|a| a.neg()).collect(),
        }
    }

    pub fn scale(&self, k: &K) -> Self {
        Self {
            c: self.c.iter().map(|a| a.mul(k)).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.len(), rhs.len());
        let n = self.len();
        let mut out = vec![K::zero(); n];
        for i in 0..n {
            if self.c[i].is_zero() {
                continue;
            }
            for j in 0..n - i {
                if rhs.c[j].is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&self.c[i].mul(&rhs.c[j]));
            }
        }
        Self { c: out }
    }

    /// Multiplicative inverse; requires a unit constant term.
    pub fn inv(&self) -> Self {
        let n = self.len();
        assert!(n > 0 && !self.c[0].is_zero(), "series not invertible");
        let a0inv = self.c[0].inv();
        let mut out = vec![K::zero(); n];
        out[0] = a0inv.clone();
        for k in 1..n {
            let mut acc = K::zero();
            for j in 1..=k {
                acc = acc.add(&self.c[j].mul(&out[k - j]));
            }
            out[k] = acc.neg().mul(&a0inv);
        }
        Self { c: out }
    }

    pub fn div(&self, rhs: &Self) -> Self {
        self.mul(&rhs.inv())
    }

    /// exp of a series with zero constant term, via f' = g' f.
    pub fn exp(&self) -> Self {
        let n = self.len();
        assert!(n == 0 || self.c[0].is_zero(), "exp needs zero constant term");
        let mut out = vec![K::zero(); n];
        if n == 0 {
            return Self { c: out };
        }
        out[0] = K::one();
        for k in 1..n {
            // k*f_k = sum_{j=1}^{k} j*g_j*f_{k-j}
            let mut acc = K::zero();
            for j in 1..=k {
                acc = acc.add(&K::from_int(j as i64).mul(&self.c[j]).mul(&out[k - j]));
            }
            out[k] = acc.mul(&K::from_int(k as i64).inv());
        }
        Self { c: out }
    }

    /// log of a series with constant term 1, via (log f)' = f'/f.
    pub fn log(&self) -> Self {
        let n = self.len();
        assert!(
            n > 0 && self.c[0].sub(&K::one()).is_zero(),
            "log needs constant term 1"
        );
        let finv = self.inv();
        // f' has coefficients (k+1) f_{k+1}; multiply and integrate back.
        let mut fp = vec![K::zero(); n];
        for k in 1..n {
            fp[k - 1] = self.c[k].mul(&K::from_int(k as i64));
        }
        let prod = Self { c: fp }.mul(&finv);
        let mut out = vec![K::zero(); n];
        for k in 1..n {
            out[k] = prod.c[k - 1].mul(&K::from_int(k as i64).inv());
        }
        Self { c: out }
    }

    /// Square root with constant term 1, via Newton-style recursion.
    pub fn sqrt(&self) -> Self {
        let n = self.len();
        assert!(
            n > 0 && self.c[0].sub(&K::one()).is_zero(),
            "sqrt needs constant term 1"
        );
        // s = exp(log(f)/2)
        self.log().scale(&K::from_frac(1, 2)).exp()
    }

    /// Composition self(g) with g having zero constant term.
    pub fn compose(&self, g: &Self) -> Self {
        let n = self.len();
        assert_eq!(n, g.len());
        assert!(n == 0 || g.c[0].is_zero(), "compose needs zero constant term");
        let mut acc = Self::zero(n);
        for c in self.c.iter().rev() {
            acc = acc.mul(g);
            if n > 0 {
                acc.c[0] = acc.c[0].add(c);
            }
        }
        acc
    }

    /// Derivative with respect to the series variable (length shrinks by one
    /// conceptually; we keep length and zero-fill the top).
    pub fn diff_var(&self) -> Self {
        let n = self.len();
        let mut out = vec![K::zero(); n];
        for k in 1..n {
            out[k - 1] = self.c[k].mul(&K::from_int(k as i64));
        }
        Self { c: out }
    }

    /// Apply a coefficient-wise map (e.g. a derivation of the ground field).
    pub fn map<F: Fn(&K) -> K>(&self, f: F) -> Self {
        Self {
            c: self.c.iter().map(f).collect(),
        }
    }
}

impl<K: Field> fmt::Debug for Series<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series{:?}", self.c)
    }
}
