//! Exact local expansion, residues, and Hermite reduction for rational
//! functions over an exact field. These are the primitives behind exact
//! period integrals and characteristic exponents.

use crate::poly::{Field, Poly, RatFunc};

/// Order of vanishing of a polynomial at x = p (multiplicity of the root);
/// 0 when p is not a root. Panics on the zero polynomial.
pub fn poly_order_at<K: Field>(f: &Poly<K>, p: &K) -> usize {
    assert!(!f.is_zero());
    let lin = Poly::new(vec![p.neg(), K::one()]);
    let mut g = f.clone();
    let mut m = 0;
    loop {
        let (q, r) = g.div_rem(&lin);
        if !r.is_zero() {
            return m;
        }
        m += 1;
        g = q;
    }
}

/// Order of f at x = p: positive for zeros, negative for poles.
pub fn order_at<K: Field>(f: &RatFunc<K>, p: &K) -> i64 {
    assert!(!f.is_zero());
    poly_order_at(&f.num, p) as i64 - poly_order_at(&f.den, p) as i64
}

/// Order of f at x = infinity in the local coordinate 1/x: positive when f
/// vanishes there, negative for a pole.
pub fn order_at_infinity<K: Field>(f: &RatFunc<K>) -> i64 {
    assert!(!f.is_zero());
    f.den.degree() - f.num.degree()
}

/// Shift a polynomial: returns f(x + p).
pub fn poly_shift<K: Field>(f: &Poly<K>, p: &K) -> Poly<K> {
    f.compose(&Poly::new(vec![p.clone(), K::one()]))
}

/// Laurent expansion of f around x = p: returns (k0, coeffs) such that
/// f = sum_j coeffs[j] * (x-p)^(k0+j), with `n` coefficients computed.
pub fn laurent_at<K: Field>(f: &RatFunc<K>, p: &K, n: usize) -> (i64, Vec<K>) {
    assert!(!f.is_zero());
    let mut num = poly_shift(&f.num, p);
    let mut den = poly_shift(&f.den, p);
    // strip powers of x from both
    let strip = |g: &mut Poly<K>| -> i64 {
        let mut k = 0;
        while g.coeff(0).is_zero() {
            g.coeffs.remove(0);
            k += 1;
        }
        k
    };
    let kn = strip(&mut num);
    let kd = strip(&mut den);
    // series division num/den to n terms
    let d0inv = den.coeff(0).inv();
    let mut out = Vec::with_capacity(n);
    let mut rem: Vec<K> = (0..n).map(|k| num.coeff(k)).collect();
    for k in 0..n {
        let c = rem[k].mul(&d0inv);
        out.push(c.clone());
        if !c.is_zero() {
            for j in k..n {
                rem[j] = rem[j].sub(&c.mul(&den.coeff(j - k)));
            }
        }
    }
    (kn - kd, out)
}

/// Residue of f dx at x = p (coefficient of (x-p)^(-1)).
pub fn residue_at<K: Field>(f: &RatFunc<K>, p: &K) -> K {
    if f.is_zero() {
        return K::zero();
    }
    let pole = poly_order_at(&f.den, p) as i64 - poly_order_at(&f.num, p) as i64;
    if pole <= 0 {
        return K::zero();
    }
    let (k0, coeffs) = laurent_at(f, p, pole as usize);
    let idx = -1 - k0;
    if idx < 0 || idx as usize >= coeffs.len() {
        K::zero()
    } else {
        coeffs[idx as usize].clone()
    }
}

/// Residue at infinity of f dx, i.e. minus the coefficient of 1/x in the
/// expansion at infinity (so that the sum of all residues vanishes).
pub fn residue_at_infinity<K: Field>(f: &RatFunc<K>) -> K {
    if f.is_zero() {
        return K::zero();
    }
    // substitute x = 1/w: f(1/w) d(1/w) = -f(1/w)/w^2 dw, residue at w=0.
    let g = invert_variable(f);
    let w2 = RatFunc::from_poly(Poly::monomial(2, K::one()));
    let h = g.div(&w2).neg();
    residue_at(&h, &K::zero())
}

/// f(1/w) as a rational function of w.
pub fn invert_variable<K: Field>(f: &RatFunc<K>) -> RatFunc<K> {
    let lift = |p: &Poly<K>| -> Poly<K> {
        // p(1/w) * w^deg = reversed coefficients
        let mut c = p.coeffs.clone();
        c.reverse();
        Poly::new(c)
    };
    let dn = f.num.degree().max(0);
    let dd = f.den.degree().max(0);
    let num = lift(&f.num);
    let den = lift(&f.den);
    // f(1/w) = num_rev(w) / den_rev(w) * w^(dd-dn)
    let shift = dd - dn;
    let monomial = if shift >= 0 {
        RatFunc::from_poly(Poly::monomial(shift as usize, K::one()))
    } else {
        RatFunc::new(Poly::one(), Poly::monomial((-shift) as usize, K::one()))
    };
    RatFunc::new(num, den).mul(&monomial)
}

/// Squarefree part of a polynomial: f / gcd(f, f').
pub fn squarefree_part<K: Field>(f: &Poly<K>) -> Poly<K> {
    if f.degree() <= 0 {
        return Poly::one();
    }
    let g = Poly::gcd(f, &f.diff());
    f.div_rem(&g).0.monic()
}

/// Hermite (Ostrogradsky) reduction: write f = g' + h where h has only
/// simple poles and no polynomial part beyond what f itself carries.
/// Returns (g, h). The polynomial part of f is integrated into g as well.
pub fn hermite_reduce<K: Field>(f: &RatFunc<K>) -> (RatFunc<K>, RatFunc<K>) {
    if f.is_zero() {
        return (RatFunc::zero(), RatFunc::zero());
    }
    // Split off the polynomial part and integrate it directly.
    let (quot, rem) = f.num.div_rem(&f.den);
    let mut gpoly = Poly::zero();
    if !quot.is_zero() {
        let coeffs: Vec<K> = std::iter::once(K::zero())
            .chain(
                quot.coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c.mul(&K::from_int(k as i64 + 1).inv())),
            )
            .collect();
        gpoly = Poly::new(coeffs);
    }
    let proper = RatFunc::new(rem, f.den.clone());
    if proper.is_zero() {
        return (RatFunc::from_poly(gpoly), RatFunc::zero());
    }
    let q1 = Poly::gcd(&proper.den, &proper.den.diff());
    if q1.degree() <= 0 {
        return (RatFunc::from_poly(gpoly), proper);
    }
    let (g, h) = ostrogradsky(&proper, RatFunc::from_poly(gpoly));
    (g, h)
}

/// Ostrogradsky's method: f = (p1/q1)' + p2/q2 with q1 = gcd(q, q') and
/// q2 = q/q1; the coefficients of p1, p2 are found by exact linear solve.
fn ostrogradsky<K: Field>(f: &RatFunc<K>, g0: RatFunc<K>) -> (RatFunc<K>, RatFunc<K>) {
    let q = f.den.clone();
    let q1 = Poly::gcd(&q, &q.diff());
    let q2 = q.div_rem(&q1).0;
    let n1 = q1.degree().max(0) as usize; // deg p1 <= n1-1
    let n2 = q2.degree().max(0) as usize; // deg p2 <= n2-1
    if n1 == 0 {
        return (g0, f.clone());
    }
    // (p1/q1)' = (p1' q1 - p1 q1')/q1^2 ; multiply equation f = (p1/q1)' + p2/q2
    // by q = q1*q2:  num = p1' q2 - p1 * (q1' q2 / q1) + p2 q1.
    // q1 | q1' q2 because q2 contains each squarefree factor once.
    let t = q1.diff().mul(&q2).div_rem(&q1).0;
    // Unknowns: p1 (n1 coeffs), p2 (n2 coeffs). Build the linear system by
    // matching coefficients of x^k in num = p1' q2 - p1 t + p2 q1.
    let ncols = n1 + n2;
    let nrows = (f.num.degree().max(0) as usize + 1)
        .max(n1 + n2 + q2.degree().max(0) as usize + 2);
    let mut mat = vec![vec![K::zero(); ncols + 1]; nrows];
    let put = |mat: &mut Vec<Vec<K>>, row: usize, col: usize, v: K| {
        if row < mat.len() {
            mat[row][col] = mat[row][col].add(&v);
        }
    };
    for j in 0..n1 {
        // basis x^j for p1: contributes (x^j)' q2 - x^j t
        let basis_d = if j == 0 {
            Poly::zero()
        } else {
            Poly::monomial(j - 1, K::from_int(j as i64))
        };
        let contrib = basis_d.mul(&q2).sub(&Poly::monomial(j, K::one()).mul(&t));
        for (k, c) in contrib.coeffs.iter().enumerate() {
            put(&mut mat, k, j, c.clone());
        }
    }
    for j in 0..n2 {
        let contrib = Poly::monomial(j, K::one()).mul(&q1);
        for (k, c) in contrib.coeffs.iter().enumerate() {
            put(&mut mat, k, n1 + j, c.clone());
        }
    }
    for (k, c) in f.num.coeffs.iter().enumerate() {
        put(&mut mat, k, ncols, c.clone());
    }
    let sol = solve_linear(mat, ncols).expect("Ostrogradsky system is consistent");
    let p1 = Poly::new(sol[..n1].to_vec());
    let p2 = Poly::new(sol[n1..].to_vec());
    let g = g0.add(&RatFunc::new(p1, q1));
    let h = RatFunc::new(p2, q2);
    (g, h)
}

/// Gaussian elimination for an (augmented) system with `ncols` unknowns.
/// Returns one solution when the system is consistent.
pub fn solve_linear<K: Field>(mut mat: Vec<Vec<K>>, ncols: usize) -> Option<Vec<K>> {
    let nrows = mat.len();
    let mut pivot_of_col = vec![usize::MAX; ncols];
    let mut row = 0;
    for col in 0..ncols {
        let mut piv = None;
        for r in row..nrows {
            if !mat[r][col].is_zero() {
                piv = Some(r);
                break;
            }
        }
        let Some(p) = piv else { continue };
        mat.swap(row, p);
        let inv = mat[row][col].inv();
        for c in col..=ncols {
            mat[row][c] = mat[row][c].mul(&inv);
        }
        for r in 0..nrows {
            if r != row && !mat[r][col].is_zero() {
                let factor = mat[r][col].clone();
                for c in col..=ncols {
                    let t = factor.mul(&mat[row][c]);
                    mat[r][c] = mat[r][c].sub(&t);
                }
            }
        }
        pivot_of_col[col] = row;
        row += 1;
        if row == nrows {
            break;
        }
    }
    // consistency: no row of (0 ... 0 | nonzero)
    for r in 0..nrows {
        if mat[r][..ncols].iter().all(|v| v.is_zero()) && !mat[r][ncols].is_zero() {
            return None;
        }
    }
    let mut sol = vec![K::zero(); ncols];
    for col in 0..ncols {
        if pivot_of_col[col] != usize::MAX {
            sol[col] = mat[pivot_of_col[col]][ncols].clone();
        }
    }
    Some(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qq::Qi;

    type P = Poly<Qi>;
    type R = RatFunc<Qi>;

    fn x() -> P {
        P::x()
    }

    #[test]
    fn orders_and_residues() {
        // f = (x+2)/(x^2 (x-1))
        let f = R::new(
            x().add(&P::constant(Qi::from_int(2))),
            P::monomial(2, Qi::one()).mul(&x().sub(&P::one())),
        );
        assert_eq!(order_at(&f, &Qi::zero()), -2);
        assert_eq!(order_at(&f, &Qi::from_int(1)), -1);
        assert_eq!(order_at_infinity(&f), 2);
        // partial fractions: f = -3/x - 2/x^2 + 3/(x-1)
        assert_eq!(residue_at(&f, &Qi::zero()), Qi::from_int(-3));
        assert_eq!(residue_at(&f, &Qi::from_int(1)), Qi::from_int(3));
        assert_eq!(residue_at_infinity(&f), Qi::zero());
    }

    #[test]
    fn residue_sum_vanishes() {
        // f = x^2/((x-1)(x+1)) has residues 1/2, 1/2 at the finite poles and
        // -1 at infinity (from f ~ 1 + 1/x^2..., coefficient of 1/x is 0 --
        // but the residue at infinity of x^2/(x^2-1) dx is 0; use a function
        // with a genuine 1/x tail instead).
        let f = R::new(
            P::monomial(2, Qi::one()).add(&x()),
            x().sub(&P::one()).mul(&x().add(&P::one())),
        );
        let r1 = residue_at(&f, &Qi::from_int(1));
        let r2 = residue_at(&f, &Qi::from_int(-1));
        let ri = residue_at_infinity(&f);
        assert!(r1.add(&r2).add(&ri).is_zero());
    }

    #[test]
    fn laurent_expansion() {
        // 1/(x(1-x)) = 1/x + 1 + x + ... at 0
        let f = R::new(P::one(), x().mul(&P::one().sub(&x())));
        let (k0, c) = laurent_at(&f, &Qi::zero(), 3);
        assert_eq!(k0, -1);
        assert!(c.iter().all(|v| v.is_one()));
    }

    #[test]
    fn hermite_reduction_splits_double_pole() {
        // f = 1/x^2 + 2/x : g = -1/x, h = 2/x
        let f = R::new(
            x().scale(&Qi::from_int(2)).add(&P::one()),
            P::monomial(2, Qi::one()),
        );
        let (g, h) = hermite_reduce(&f);
        assert_eq!(g.diff().add(&h), f);
        // h has only simple poles
        let sq = Poly::gcd(&h.den, &h.den.diff());
        assert!(sq.degree() <= 0);
        assert_eq!(residue_at(&h, &Qi::zero()), Qi::from_int(2));
    }

    #[test]
    fn hermite_on_higher_multiplicity() {
        // f = (3x^2+1)/((x-1)^3 (x+2))
        let den = x().sub(&P::one()).pow(3).mul(&x().add(&P::constant(Qi::from_int(2))));
        let f = R::new(P::monomial(2, Qi::from_int(3)).add(&P::one()), den);
        let (g, h) = hermite_reduce(&f);
        assert_eq!(g.diff().add(&h), f);
        let sq = Poly::gcd(&h.den, &h.den.diff());
        assert!(sq.degree() <= 0);
    }
}
