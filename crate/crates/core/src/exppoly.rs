//! Laurent polynomials in named exponential symbols (e.g. `XA`, `XB`, or
//! `eV` standing for an exponentiated period) with coefficients in the
//! parameter field. This is the exact ring in which Stokes multiplier
//! identities and wall-crossing substitutions are verified symbolically.

use crate::error::WkbError;
use crate::param::Param;
use std::collections::BTreeMap;
use std::fmt;

/// Monomial: symbol name -> integer exponent, no zero exponents stored.
pub type ExpMono = BTreeMap<String, i64>;

#[derive(Clone, PartialEq)]
pub struct ExpPoly {
    pub terms: BTreeMap<ExpMono, Param>,
}

fn mono_mul(a: &ExpMono, b: &ExpMono) -> ExpMono {
    let mut out = a.clone();
    for (k, v) in b {
        let e = out.entry(k.clone()).or_insert(0);
        *e += v;
        if *e == 0 {
            out.remove(k);
        }
    }
    out
}

fn mono_pow(a: &ExpMono, n: i64) -> ExpMono {
    a.iter()
        .filter(|(_, &v)| v * n != 0)
        .map(|(k, v)| (k.clone(), v * n))
        .collect()
}

impl ExpPoly {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(Param::one())
    }

    pub fn constant(c: Param) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(ExpMono::new(), c);
        }
        Self { terms }
    }

    /// A single symbol with exponent `e` (negative allowed).
    pub fn symbol_pow(name: &str, e: i64) -> Self {
        let mut m = ExpMono::new();
        if e != 0 {
            m.insert(name.to_string(), e);
        }
        let mut terms = BTreeMap::new();
        terms.insert(m, Param::one());
        Self { terms }
    }

    pub fn symbol(name: &str) -> Self {
        Self::symbol_pow(name, 1)
    }

    pub fn monomial(m: ExpMono, c: Param) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&ExpMono::new())
                .map(|c| c.is_one())
                .unwrap_or(false)
    }

    fn insert_add(&mut self, m: ExpMono, c: Param) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                let s = &*v + &c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert_add(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.insert_add(mono_mul(m1, m2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &Param) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// True when the element is a single term, hence a unit of the Laurent ring.
    pub fn as_unit(&self) -> Option<(ExpMono, Param)> {
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            Some((m.clone(), c.clone()))
        } else {
            None
        }
    }

    pub fn inv_unit(&self) -> Result<Self, WkbError> {
        match self.as_unit() {
            Some((m, c)) => Ok(Self::monomial(mono_pow(&m, -1), c.inv())),
            None => Err(WkbError::NonLaurentResult(format!(
                "not a unit of the Laurent ring: {self:?}"
            ))),
        }
    }

    /// Per-symbol minimum exponent over all terms.
    fn min_exponents(&self) -> ExpMono {
        let mut mins: ExpMono = ExpMono::new();
        for m in self.terms.keys() {
            for (k, &v) in m {
                let e = mins.entry(k.clone()).or_insert(0);
                if v < *e {
                    *e = v;
                }
            }
        }
        mins.retain(|_, v| *v != 0);
        mins
    }

    /// Exact division in the Laurent ring. Returns `None` when `div` does not
    /// divide `self`.
    pub fn div_exact(&self, div: &Self) -> Option<Self> {
        assert!(!div.is_zero(), "Laurent division by zero");
        if self.is_zero() {
            return Some(Self::zero());
        }
        if let Some((m, c)) = div.as_unit() {
            let shift = mono_pow(&m, -1);
            let cinv = c.inv();
            return Some(Self {
                terms: self
                    .terms
                    .iter()
                    .map(|(mm, cc)| (mono_mul(mm, &shift), cc * &cinv))
                    .collect(),
            });
        }
        // Normalize to genuine polynomials by clearing minimal exponents; the
        // quotient then has non-negative exponents too, so greedy reduction by
        // the leading monomial terminates and detects non-divisibility.
        let num = self.mul(&Self::monomial(mono_pow(&self.min_exponents(), -1), Param::one()));
        let den = div.mul(&Self::monomial(mono_pow(&div.min_exponents(), -1), Param::one()));
        let (dlm, dlc) = den.terms.iter().next_back().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut rem = num;
        let mut quot = Self::zero();
        while !rem.is_zero() {
            let (rlm, rlc) = rem
                .terms
                .iter()
                .next_back()
                .map(|(m, c)| (m.clone(), c.clone()))
                .unwrap();
            // leading monomial of remainder must be divisible (all exponent
            // differences non-negative) by the leading monomial of divisor
            let mut q = ExpMono::new();
            for (k, &v) in &dlm {
                let rv = *rlm.get(k).unwrap_or(&0);
                if rv < v {
                    return None;
                }
            }
            for (k, &v) in &rlm {
                let dv = *dlm.get(k).unwrap_or(&0);
                if v - dv != 0 {
                    q.insert(k.clone(), v - dv);
                }
            }
            let qc = &rlc / &dlc;
            let qterm = Self::monomial(q, qc);
            rem = rem.sub(&qterm.mul(&den));
            quot = quot.add(&qterm);
        }
        // Undo the two monomial normalizations.
        let back = mono_mul(&self.min_exponents(), &mono_pow(&div.min_exponents(), -1));
        Some(quot.mul(&Self::monomial(back, Param::one())))
    }

    /// Substitute `val_num/val_den` for symbol `name`. Fails with
    /// `NonLaurentResult` when the substituted expression is not an element
    /// of the Laurent ring.
    pub fn subst(&self, name: &str, val_num: &Self, val_den: &Self) -> Result<Self, WkbError> {
        assert!(!val_den.is_zero());
        // Collect occurring exponents of the symbol.
        let mut emin = 0i64;
        let mut emax = 0i64;
        for m in self.terms.keys() {
            let e = *m.get(name).unwrap_or(&0);
            emin = emin.min(e);
            emax = emax.max(e);
        }
        // Clear denominators: multiply through by val_den^(emax) * val_num^(-emin),
        // substitute, then divide back exactly.
        let mut num_acc = Self::zero();
        for (m, c) in &self.terms {
            let e = *m.get(name).unwrap_or(&0);
            let mut rest = m.clone();
            rest.remove(name);
            // term * num^(e-emin) * den^(emax-e)
            let t = Self::monomial(rest, c.clone())
                .mul(&val_num.pow((e - emin) as u32))
                .mul(&val_den.pow((emax - e) as u32));
            num_acc = num_acc.add(&t);
        }
        // We multiplied through by num^(-emin) * den^(emax); undo that factor.
        let mut out = num_acc;
        let nonlaurent = || {
            WkbError::NonLaurentResult(format!(
                "substituting {name} leaves a non-monomial denominator"
            ))
        };
        if emax > 0 {
            out = out.div_exact(&val_den.pow(emax as u32)).ok_or_else(nonlaurent)?;
        } else if emax < 0 {
            out = out.mul(&val_den.pow((-emax) as u32));
        }
        if emin < 0 {
            out = out.div_exact(&val_num.pow((-emin) as u32)).ok_or_else(nonlaurent)?;
        } else if emin > 0 {
            out = out.mul(&val_num.pow(emin as u32));
        }
        Ok(out)
    }

    /// Numeric evaluation: map every symbol and parameter to a complex double.
    pub fn eval_f64(
        &self,
        sym_vals: &dyn Fn(&str) -> num_complex::Complex64,
        par_vals: &[crate::qq::Qi; crate::mpoly::NVARS],
    ) -> num_complex::Complex64 {
        use num_complex::Complex64;
        let mut out = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let cv = c.eval_qi(par_vals);
            let (re, im) = cv.to_f64_pair();
            let mut term = Complex64::new(re, im);
            for (k, &e) in m {
                term *= sym_vals(k).powi(e as i32);
            }
            out += term;
        }
        out
    }
}

impl fmt::Debug for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", c)?;
            for (k, e) in m {
                if *e == 1 {
                    write!(f, "*{}", k)?;
                } else {
                    write!(f, "*{}^{}", k, e)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xa() -> ExpPoly {
        ExpPoly::symbol("XA")
    }
    fn xb() -> ExpPoly {
        ExpPoly::symbol("XB")
    }

    #[test]
    fn laurent_units_invert() {
        let u = ExpPoly::monomial(
            [("XA".to_string(), -2), ("XB".to_string(), 3)].into_iter().collect(),
            Param::from_frac(2, 5),
        );
        let inv = u.inv_unit().unwrap();
        assert!(u.mul(&inv).is_one());
    }

    #[test]
    fn exact_division() {
        // (1 - XB^2) / (1 - XB) = 1 + XB
        let num = ExpPoly::one().sub(&xb().mul(&xb()));
        let den = ExpPoly::one().sub(&xb());
        let q = num.div_exact(&den).unwrap();
        assert_eq!(q, ExpPoly::one().add(&xb()));
        assert!(ExpPoly::one().add(&xa()).div_exact(&den).is_none());
    }

    #[test]
    fn wall_crossing_substitution() {
        // X_A -> X_A (1 - X_B) applied to X_A^{-1}: denominator must clear.
        let f = ExpPoly::symbol_pow("XA", -1);
        let val = xa().mul(&ExpPoly::one().sub(&xb()));
        let err = f.subst("XA", &val, &ExpPoly::one());
        assert!(err.is_err());
        // While X_A -> X_A * X_B^{-1} stays Laurent:
        let val2 = xa().mul(&ExpPoly::symbol_pow("XB", -1));
        let ok = f.subst("XA", &val2, &ExpPoly::one()).unwrap();
        assert_eq!(ok, ExpPoly::symbol_pow("XA", -1).mul(&xb()));
    }

    #[test]
    fn fraction_substitution_that_clears() {
        // Substitute XB -> 1/XA into XA*XB: result XA * XA^{-1} = 1... times
        // fraction handling: val = 1/XA given as num=1, den=XA.
        let f = xa().mul(&xb());
        let got = f.subst("XB", &ExpPoly::one(), &xa()).unwrap();
        assert!(got.is_one());
    }
}
