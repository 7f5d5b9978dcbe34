//! Sparse multivariate polynomials over Q(i) in a fixed, globally ordered
//! variable set. Exponent vectors are small fixed arrays, which keeps
//! monomial keys hashable and comparison cheap.

use crate::qq::Qi;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// The global variable table. Every `MPoly` uses indices into this list, so
/// polynomials built anywhere in the crate compose without renaming.
pub const VARS: &[&str] = &[
    "nu", "s", "t", "u", "lambda", "th0", "th1", "thinf", "E", "m", "c", "w",
];

pub const NVARS: usize = VARS.len();

pub fn var_index(name: &str) -> Option<usize> {
    VARS.iter().position(|v| *v == name)
}

/// Exponent vector for one monomial. Exponents are signed to allow Laurent
/// usage by callers that guarantee their own invariants; `MPoly` itself only
/// ever stores non-negative entries.
pub type Expo = [i32; NVARS];

pub const EXPO_ZERO: Expo = [0; NVARS];

#[derive(Clone, PartialEq, Eq)]
pub struct MPoly {
    /// monomial -> coefficient, no zero coefficients stored.
    pub terms: BTreeMap<Expo, Qi>,
}

impl MPoly {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(Qi::one())
    }

    pub fn constant(c: Qi) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(EXPO_ZERO, c);
        }
        Self { terms }
    }

    pub fn var(idx: usize) -> Self {
        assert!(idx < NVARS);
        let mut e = EXPO_ZERO;
        e[idx] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(e, Qi::one());
        Self { terms }
    }

    pub fn var_named(name: &str) -> Self {
        Self::var(var_index(name).unwrap_or_else(|| panic!("unknown variable {name}")))
    }

    pub fn monomial(e: Expo, c: Qi) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.contains_key(&EXPO_ZERO))
    }

    pub fn constant_value(&self) -> Option<Qi> {
        if self.terms.is_empty() {
            Some(Qi::zero())
        } else if self.is_constant() {
            self.terms.get(&EXPO_ZERO).cloned()
        } else {
            None
        }
    }

    pub fn degree_in(&self, idx: usize) -> i32 {
        self.terms.keys().map(|e| e[idx]).max().unwrap_or(-1)
    }

    /// Indices of variables that actually occur.
    pub fn support_vars(&self) -> Vec<usize> {
        let mut used = [false; NVARS];
        for e in self.terms.keys() {
            for (i, &p) in e.iter().enumerate() {
                if p != 0 {
                    used[i] = true;
                }
            }
        }
        used.iter().enumerate().filter(|(_, &u)| u).map(|(i, _)| i).collect()
    }

    fn insert_add(&mut self, e: Expo, c: Qi) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(existing) => {
                let sum = &*existing + &c;
                if sum.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn scale(&self, c: &Qi) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    /// Coefficients of this polynomial viewed as a univariate polynomial in
    /// variable `idx`, lowest degree first. Result has length deg+1 (empty
    /// for the zero polynomial).
    pub fn coeffs_in(&self, idx: usize) -> Vec<MPoly> {
        let deg = self.degree_in(idx);
        if deg < 0 {
            return Vec::new();
        }
        let mut out = vec![MPoly::zero(); (deg + 1) as usize];
        for (e, c) in &self.terms {
            let k = e[idx] as usize;
            let mut e2 = *e;
            e2[idx] = 0;
            out[k].insert_add(e2, c.clone());
        }
        out
    }

    pub fn from_coeffs_in(idx: usize, coeffs: &[MPoly]) -> Self {
        let mut out = MPoly::zero();
        for (k, p) in coeffs.iter().enumerate() {
            for (e, c) in &p.terms {
                debug_assert_eq!(e[idx], 0);
                let mut e2 = *e;
                e2[idx] = k as i32;
                out.insert_add(e2, c.clone());
            }
        }
        out
    }

    /// Partial derivative with respect to variable `idx`.
    pub fn diff(&self, idx: usize) -> Self {
        let mut out = MPoly::zero();
        for (e, c) in &self.terms {
            if e[idx] == 0 {
                continue;
            }
            let mut e2 = *e;
            e2[idx] -= 1;
            out.insert_add(e2, c * &Qi::from_int(e[idx] as i64));
        }
        out
    }

    /// Substitute polynomial `val` for variable `idx`.
    pub fn subst(&self, idx: usize, val: &MPoly) -> Self {
        let coeffs = self.coeffs_in(idx);
        // Horner evaluation from the top coefficient.
        let mut acc = MPoly::zero();
        for c in coeffs.iter().rev() {
            acc = &(&acc * val) + c;
        }
        acc
    }

    pub fn eval_qi(&self, vals: &[Qi; NVARS]) -> Qi {
        let mut out = Qi::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (i, &p) in e.iter().enumerate() {
                assert!(p >= 0);
                for _ in 0..p {
                    term = &term * &vals[i];
                }
            }
            out = &out + &term;
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = MPoly::one();
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                out = &out * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        out
    }

    /// Leading coefficient in lexicographic-highest monomial order.
    pub fn leading_coeff(&self) -> Qi {
        self.terms
            .iter()
            .next_back()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Qi::zero)
    }
}

impl Add for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.insert_add(*e, c.clone());
        }
        out
    }
}

impl Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.insert_add(*e, -c);
        }
        out
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        let mut out = MPoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let mut e = *e1;
                for (a, b) in e.iter_mut().zip(e2.iter()) {
                    *a += *b;
                }
                out.insert_add(e, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", c)?;
            for (i, &p) in e.iter().enumerate() {
                if p == 1 {
                    write!(f, "*{}", VARS[i])?;
                } else if p != 0 {
                    write!(f, "*{}^{}", VARS[i], p)?;
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Exact division and GCD (primitive PRS, recursive over the variable tower).
// ---------------------------------------------------------------------------

impl MPoly {
    /// Exact division; returns `None` when `self` is not a multiple of `div`.
    pub fn div_exact(&self, div: &MPoly) -> Option<MPoly> {
        assert!(!div.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(MPoly::zero());
        }
        if let Some(c) = div.constant_value() {
            return Some(self.scale(&c.inv()));
        }
        // Divide as univariate polynomials in the highest occurring variable.
        let idx = *div.support_vars().last().unwrap();
        let num = self.coeffs_in(idx);
        let den = div.coeffs_in(idx);
        let dd = den.len() - 1;
        if num.len() < den.len() {
            return None;
        }
        let mut rem = num;
        let mut quot = vec![MPoly::zero(); rem.len() - dd];
        while rem.len() > dd {
            let k = rem.len() - 1;
            let top = rem.pop().unwrap();
            if top.is_zero() {
                if k < dd {
                    break;
                }
                continue;
            }
            if k < dd {
                return None;
            }
            let q = top.div_exact(&den[dd])?;
            for j in 0..dd {
                let t = &q * &den[j];
                rem[k - dd + j] = &rem[k - dd + j] - &t;
            }
            quot[k - dd] = q;
        }
        if rem.iter().any(|r| !r.is_zero()) {
            return None;
        }
        Some(MPoly::from_coeffs_in(idx, &quot))
    }

    /// Pseudo-remainder of univariate coefficient lists in variable idx.
    fn prem(a: &[MPoly], b: &[MPoly]) -> Vec<MPoly> {
        let db = b.len() - 1;
        let lb = b.last().unwrap().clone();
        let mut r: Vec<MPoly> = a.to_vec();
        while r.len() > db {
            let k = r.len() - 1;
            let lr = r.pop().unwrap();
            if lr.is_zero() {
                continue;
            }
            // r := lb*r - lr * x^(k-db) * b
            for item in r.iter_mut() {
                *item = &*item * &lb;
            }
            for j in 0..db {
                let t = &lr * &b[j];
                r[k - db + j] = &r[k - db + j] - &t;
            }
        }
        while matches!(r.last(), Some(p) if p.is_zero()) {
            r.pop();
        }
        r
    }

    /// Content of the coefficient list (gcd of coefficients).
    fn content_of(coeffs: &[MPoly]) -> MPoly {
        let mut g = MPoly::zero();
        for c in coeffs {
            if c.is_zero() {
                continue;
            }
            g = if g.is_zero() { c.clone() } else { MPoly::gcd(&g, c) };
            if g.is_constant() {
                break;
            }
        }
        if g.is_zero() {
            MPoly::zero()
        } else {
            g
        }
    }

    /// Monic-style normalization: divide by the leading coefficient so gcds
    /// are canonical up to that choice.
    fn normalize_lc(mut self) -> MPoly {
        let lc = self.leading_coeff();
        if !lc.is_zero() && !lc.is_one() {
            self = self.scale(&lc.inv());
        }
        self
    }

    /// GCD via primitive polynomial remainder sequences, recursing through
    /// the variable tower. Normalized to leading coefficient 1.
    pub fn gcd(a: &MPoly, b: &MPoly) -> MPoly {
        if a.is_zero() {
            return b.clone().normalize_lc();
        }
        if b.is_zero() {
            return a.clone().normalize_lc();
        }
        if a.is_constant() || b.is_constant() {
            return MPoly::one();
        }
        let mut vars = a.support_vars();
        for v in b.support_vars() {
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        let idx = *vars.iter().max().unwrap();
        let mut p = a.coeffs_in(idx);
        let mut q = b.coeffs_in(idx);
        if p.len() < q.len() {
            std::mem::swap(&mut p, &mut q);
        }
        if q.is_empty() {
            return MPoly::from_coeffs_in(idx, &p).normalize_lc();
        }
        let ca = Self::content_of(&p);
        let cb = Self::content_of(&q);
        let cont = MPoly::gcd(&ca, &cb);
        let strip = |v: &[MPoly], c: &MPoly| -> Vec<MPoly> {
            v.iter().map(|x| x.div_exact(c).expect("content divides")).collect()
        };
        let mut p = strip(&p, &ca);
        let mut q = strip(&q, &cb);
        loop {
            let r = Self::prem(&p, &q);
            if r.is_empty() {
                break;
            }
            if r.len() == 1 {
                // Nontrivial constant-in-idx remainder: gcd is the content part only.
                return (&cont * &MPoly::one()).normalize_lc();
            }
            let cr = Self::content_of(&r);
            p = q;
            q = strip(&r, &cr);
        }
        let prim = MPoly::from_coeffs_in(idx, &q);
        (&cont * &prim).normalize_lc()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> MPoly {
        MPoly::var_named("t")
    }
    fn y() -> MPoly {
        MPoly::var_named("nu")
    }

    #[test]
    fn arithmetic_basics() {
        let p = &(&x() + &y()) * &(&x() - &y());
        let q = &(&x() * &x()) - &(&y() * &y());
        assert_eq!(p, q);
    }

    #[test]
    fn division_exact_and_failure() {
        let p = &(&x() + &y()).pow(3) * &(&x() - &MPoly::one());
        let d = (&x() + &y()).pow(2);
        let q = p.div_exact(&d).unwrap();
        assert_eq!(&q * &d, p);
        assert!(p.div_exact(&(&x() + &MPoly::constant(Qi::from_int(5)))).is_none());
    }

    #[test]
    fn gcd_multivariate() {
        let g = &(&x() + &y()) * &MPoly::constant(Qi::from_int(3));
        let a = &g * &(&x() - &y());
        let b = &g * &(&x() + &MPoly::one());
        let got = MPoly::gcd(&a, &b);
        // Normalized to leading coefficient 1.
        assert_eq!(got, (&x() + &y()).normalize_lc());
    }

    #[test]
    fn derivative_and_subst() {
        // d/dt (t^3 nu) = 3 t^2 nu
        let p = &x().pow(3) * &y();
        let d = p.diff(var_index("t").unwrap());
        assert_eq!(d, (&x().pow(2) * &y()).scale(&Qi::from_int(3)));
        // substitute t = nu + 1 into t^2 - 1
        let q = &x().pow(2) - &MPoly::one();
        let s = q.subst(var_index("t").unwrap(), &(&y() + &MPoly::one()));
        assert_eq!(s, &y().pow(2) + &y().scale(&Qi::from_int(2)));
    }
}
