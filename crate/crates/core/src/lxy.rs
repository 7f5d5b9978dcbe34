//! Exact Laurent polynomials in the exponential Voros periods X_A, X_B over
//! Gaussian rationals, with exact substitution X_A -> f(X_A, X_B). This is
//! the coefficient ring for the Painleve I Stokes-multiplier tables and the
//! DDP transformation between them.

use crate::error::{Result, WkbError};
use crate::qq::Qi;
use std::collections::BTreeMap;
use std::fmt;

/// Key is the exponent pair (a, b) for X_A^a X_B^b.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Lxy {
    terms: BTreeMap<(i64, i64), Qi>,
}

impl Lxy {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::term(0, 0, Qi::one())
    }

    pub fn term(a: i64, b: i64, c: Qi) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((a, b), c);
        }
        Self { terms }
    }

    pub fn xa(e: i64) -> Self {
        Self::term(e, 0, Qi::one())
    }

    pub fn xb(e: i64) -> Self {
        Self::term(0, e, Qi::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(i64, i64), &Qi)> {
        self.terms.iter()
    }

    fn insert(&mut self, k: (i64, i64), c: Qi) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&k) {
            Some(v) => {
                let s = &*v + &c;
                if s.is_zero() {
                    self.terms.remove(&k);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(k, c);
            }
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.insert(*k, c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &rhs.terms {
                out.insert((ka.0 + kb.0, ka.1 + kb.1), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, k: &Qi) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, c)| (*e, c * k)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Exact substitution X_A -> pa, X_B -> pb. Negative exponents are
    /// handled through a common-denominator fraction; the final exact
    /// division must clear the denominator or the result is not Laurent.
    pub fn substitute(&self, pa: &Lxy, pb: &Lxy) -> Result<Lxy> {
        let ma = self.terms.keys().map(|k| (-k.0).max(0)).max().unwrap_or(0) as u32;
        let mb = self.terms.keys().map(|k| (-k.1).max(0)).max().unwrap_or(0) as u32;
        // numerator of self(pa, pb) * pa^ma * pb^mb
        let mut num = Lxy::zero();
        for (k, c) in &self.terms {
            let ea = (k.0 + ma as i64) as u32;
            let eb = (k.1 + mb as i64) as u32;
            let t = pa.pow(ea).mul(&pb.pow(eb)).scale(c);
            num = num.add(&t);
        }
        let mut out = num;
        for _ in 0..ma {
            out = exact_div(&out, pa)?;
        }
        for _ in 0..mb {
            out = exact_div(&out, pb)?;
        }
        Ok(out)
    }
}

/// Exact division of Laurent polynomials, viewing both as polynomials in
/// X_A whose coefficients are univariate Laurent polynomials in X_B.
fn exact_div(f: &Lxy, g: &Lxy) -> Result<Lxy> {
    if g.is_zero() {
        return Err(WkbError::NonLaurentResult("division by zero".into()));
    }
    // collect by X_A degree
    let slices = |p: &Lxy| -> BTreeMap<i64, BTreeMap<i64, Qi>> {
        let mut m: BTreeMap<i64, BTreeMap<i64, Qi>> = BTreeMap::new();
        for (k, c) in p.iter() {
            m.entry(k.0).or_default().insert(k.1, c.clone());
        }
        m
    };
    let gs = slices(g);
    let (&ga, glead) = gs.iter().next_back().unwrap();
    // in an exact quotient the X_A degree never drops below deg_min(f) - deg_min(g)
    let min_a = |p: &Lxy| p.iter().map(|(k, _)| k.0).min();
    let qa_min = match (min_a(f), min_a(g)) {
        (Some(fa), Some(gb)) => fa - gb,
        _ => 0,
    };
    let mut rem = f.clone();
    let mut out = Lxy::zero();
    while !rem.is_zero() {
        let rs = slices(&rem);
        let (&ra, rlead) = rs.iter().next_back().unwrap();
        if ra - ga < qa_min {
            return Err(WkbError::NonLaurentResult(
                "quotient is an infinite Laurent series".into(),
            ));
        }
        let q1 = exact_div_uni(rlead, glead)?;
        let mut q = Lxy::zero();
        for (b, c) in &q1 {
            q = q.add(&Lxy::term(ra - ga, *b, c.clone()));
        }
        rem = rem.sub(&q.mul(g));
        out = out.add(&q);
        // the leading X_A slice must cancel, so the top degree drops
        if !rem.is_zero() && slices(&rem).keys().next_back().unwrap() >= &ra {
            return Err(WkbError::NonLaurentResult(
                "leading coefficient did not cancel".into(),
            ));
        }
    }
    Ok(out)
}

/// Exact division of univariate Laurent polynomials in X_B.
fn exact_div_uni(
    u: &BTreeMap<i64, Qi>,
    v: &BTreeMap<i64, Qi>,
) -> Result<BTreeMap<i64, Qi>> {
    let mut rem = u.clone();
    let mut out: BTreeMap<i64, Qi> = BTreeMap::new();
    let (&dv, lv) = v.iter().next_back().unwrap();
    let e_min = u.keys().next().copied().unwrap_or(0) - v.keys().next().unwrap();
    while !rem.is_empty() {
        let (&dr, lr) = rem.iter().next_back().unwrap();
        let c = lr * &lv.inv();
        let e = dr - dv;
        if e < e_min {
            return Err(WkbError::NonLaurentResult(
                "quotient is an infinite Laurent series".into(),
            ));
        }
        out.insert(e, c.clone());
        for (b, vb) in v {
            let k = e + b;
            let delta = &c * vb;
            let s = match rem.get(&k) {
                Some(x) => x - &delta,
                None => -&delta,
            };
            if s.is_zero() {
                rem.remove(&k);
            } else {
                rem.insert(k, s);
            }
        }
        if rem.keys().next_back().is_some_and(|&d| d >= dr) {
            return Err(WkbError::NonLaurentResult(
                "univariate division does not terminate".into(),
            ));
        }
    }
    Ok(out)
}

impl fmt::Debug for Lxy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((a, b), c)| format!("({:?})*XA^{a}*XB^{b}", c))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ddp_a() -> Lxy {
        // X_A (1 - X_B)
        Lxy::xa(1).mul(&Lxy::one().sub(&Lxy::xb(1)))
    }

    #[test]
    fn substitution_examples() {
        let pa = ddp_a();
        let pb = Lxy::xb(1);
        let r = Lxy::xa(1).substitute(&pa, &pb).unwrap();
        assert_eq!(r, Lxy::xa(1).sub(&Lxy::xa(1).mul(&Lxy::xb(1))));
        assert_eq!(Lxy::xb(1).substitute(&pa, &pb).unwrap(), Lxy::xb(1));
        assert_eq!(Lxy::one().substitute(&pa, &pb).unwrap(), Lxy::one());
    }

    #[test]
    fn negative_powers_clear_exactly() {
        // X_A^{-1}(1 - X_B) -> X_A^{-1}(1-X_B)^{-1}(1-X_B) = X_A^{-1}
        let p = Lxy::xa(-1).mul(&Lxy::one().sub(&Lxy::xb(1)));
        let r = p.substitute(&ddp_a(), &Lxy::xb(1)).unwrap();
        assert_eq!(r, Lxy::xa(-1));
    }

    #[test]
    fn non_laurent_substitution_is_rejected() {
        // X_A^{-1} -> 1/(1 + X_A) has no Laurent expansion
        let pa = Lxy::one().add(&Lxy::xa(1));
        assert!(matches!(
            Lxy::xa(-1).substitute(&pa, &Lxy::xb(1)),
            Err(WkbError::NonLaurentResult(_))
        ));
    }

    #[test]
    fn substitution_is_a_ring_homomorphism() {
        let pa = ddp_a();
        let pb = Lxy::xb(1);
        // negative X_A powers carry matching (1 - X_B) factors so every
        // substituted image stays Laurent
        let u = Lxy::one().sub(&Lxy::xb(1));
        let samples = [
            Lxy::xa(2).add(&Lxy::term(-1, 3, Qi::i()).mul(&u)),
            Lxy::one().add(&Lxy::term(1, -2, Qi::from_frac(3, 7))),
            Lxy::term(0, -1, Qi::from_int(5)).sub(&Lxy::xa(1)),
            Lxy::xa(-2).mul(&Lxy::xb(2)).mul(&u.pow(2)).add(&Lxy::one()),
        ];
        for p in &samples {
            for q in &samples {
                let lhs = p.mul(q).substitute(&pa, &pb).unwrap();
                let rhs = p
                    .substitute(&pa, &pb)
                    .unwrap()
                    .mul(&q.substitute(&pa, &pb).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn arithmetic_identities() {
        let p = Lxy::xa(1).add(&Lxy::term(2, -1, Qi::i()));
        let q = Lxy::xb(-2).sub(&Lxy::one());
        let r = Lxy::term(-1, 1, Qi::from_frac(1, 2));
        // distributivity and exact division round trip
        assert_eq!(p.mul(&q.add(&r)), p.mul(&q).add(&p.mul(&r)));
        let prod = p.mul(&q);
        assert_eq!(exact_div(&prod, &q).unwrap(), p);
    }
}
