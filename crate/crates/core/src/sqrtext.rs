//! The quadratic extension K(x)[y]/(y^2 - Q(x)) used to carry the square
//! root of the leading potential through all WKB computations exactly.

use crate::poly::{Field, RatFunc};
use std::fmt;

/// Element `a + b*sqrt(Q)` of the extension field defined by a fixed `Q`.
/// All arithmetic reduces modulo the defining relation sqrt(Q)^2 = Q.
#[derive(Clone, PartialEq)]
pub struct SqrtExt<K: Field> {
    pub a: RatFunc<K>,
    pub b: RatFunc<K>,
}

/// Ambient data for `SqrtExt` arithmetic: the polynomial (or rational) `Q`
/// under the square root.
#[derive(Clone)]
pub struct SqrtTower<K: Field> {
    pub q: RatFunc<K>,
}

impl<K: Field> SqrtTower<K> {
    pub fn new(q: RatFunc<K>) -> Self {
        assert!(!q.is_zero(), "sqrt tower over zero potential");
        Self { q }
    }

    pub fn zero(&self) -> SqrtExt<K> {
        SqrtExt {
            a: RatFunc::zero(),
            b: RatFunc::zero(),
        }
    }

    pub fn one(&self) -> SqrtExt<K> {
        SqrtExt {
            a: RatFunc::one(),
            b: RatFunc::zero(),
        }
    }

    pub fn rational(&self, a: RatFunc<K>) -> SqrtExt<K> {
        SqrtExt { a, b: RatFunc::zero() }
    }

    /// The generator sqrt(Q) itself.
    pub fn sqrt_q(&self) -> SqrtExt<K> {
        SqrtExt {
            a: RatFunc::zero(),
            b: RatFunc::one(),
        }
    }

    pub fn add(&self, x: &SqrtExt<K>, y: &SqrtExt<K>) -> SqrtExt<K> {
        SqrtExt {
            a: x.a.add(&y.a),
            b: x.b.add(&y.b),
        }
    }

    pub fn sub(&self, x: &SqrtExt<K>, y: &SqrtExt<K>) -> SqrtExt<K> {
        SqrtExt {
            a: x.a.sub(&y.a),
            b: x.b.sub(&y.b),
        }
    }

    pub fn neg(&self, x: &SqrtExt<K>) -> SqrtExt<K> {
        SqrtExt {
            a: x.a.neg(),
            b: x.b.neg(),
        }
    }

    pub fn mul(&self, x: &SqrtExt<K>, y: &SqrtExt<K>) -> SqrtExt<K> {
        // (a1 + b1 y)(a2 + b2 y) = a1 a2 + b1 b2 Q + (a1 b2 + a2 b1) y
        SqrtExt {
            a: x.a.mul(&y.a).add(&x.b.mul(&y.b).mul(&self.q)),
            b: x.a.mul(&y.b).add(&x.b.mul(&y.a)),
        }
    }

    /// Galois conjugate: the branch flip sqrt(Q) -> -sqrt(Q).
    pub fn conj(&self, x: &SqrtExt<K>) -> SqrtExt<K> {
        SqrtExt {
            a: x.a.clone(),
            b: x.b.neg(),
        }
    }

    /// Field norm N(a + b y) = a^2 - Q b^2, an element of K(x).
    pub fn norm(&self, x: &SqrtExt<K>) -> RatFunc<K> {
        x.a.mul(&x.a).sub(&self.q.mul(&x.b.mul(&x.b)))
    }

    pub fn inv(&self, x: &SqrtExt<K>) -> SqrtExt<K> {
        let n = self.norm(x);
        assert!(!n.is_zero(), "inverse of zero or zero-norm element");
        let ninv = n.inv();
        SqrtExt {
            a: x.a.mul(&ninv),
            b: x.b.neg().mul(&ninv),
        }
    }

    pub fn div(&self, x: &SqrtExt<K>, y: &SqrtExt<K>) -> SqrtExt<K> {
        self.mul(x, &self.inv(y))
    }

    pub fn scale(&self, x: &SqrtExt<K>, c: &K) -> SqrtExt<K> {
        SqrtExt {
            a: x.a.scale(c),
            b: x.b.scale(c),
        }
    }

    /// d/dx, using (sqrt Q)' = Q' / (2 sqrt Q) = Q' sqrt(Q) / (2 Q).
    pub fn diff(&self, x: &SqrtExt<K>) -> SqrtExt<K> {
        let half = RatFunc::constant(K::from_frac(1, 2));
        let chain = self.q.diff().mul(&half).div(&self.q);
        SqrtExt {
            a: x.a.diff(),
            b: x.b.diff().add(&x.b.mul(&chain)),
        }
    }

    pub fn is_zero(&self, x: &SqrtExt<K>) -> bool {
        x.a.is_zero() && x.b.is_zero()
    }
}

impl<K: Field> SqrtExt<K> {
    /// Purely odd part coefficient (the K(x) multiple of sqrt Q).
    pub fn odd_part(&self) -> RatFunc<K> {
        self.b.clone()
    }

    pub fn even_part(&self) -> RatFunc<K> {
        self.a.clone()
    }
}

impl<K: Field> fmt::Debug for SqrtExt<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}) + ({:?})*sqrtQ", self.a, self.b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;
    use crate::qq::Qi;

    type P = Poly<Qi>;
    type R = RatFunc<Qi>;

    fn airy_tower() -> SqrtTower<Qi> {
        // Q = x
        SqrtTower::new(R::x())
    }

    #[test]
    fn defining_relation() {
        let t = airy_tower();
        let y = t.sqrt_q();
        let y2 = t.mul(&y, &y);
        assert_eq!(y2.a, R::x());
        assert!(y2.b.is_zero());
    }

    #[test]
    fn norm_identity_and_inverse() {
        let t = airy_tower();
        // z = 1/(x+1) + x * sqrt(Q)
        let z = SqrtExt {
            a: R::new(P::one(), P::x().add(&P::one())),
            b: R::x(),
        };
        let n = t.norm(&z);
        assert_eq!(n, t.mul(&z, &t.conj(&z)).a);
        let w = t.mul(&z, &t.inv(&z));
        assert_eq!(w.a, R::one());
        assert!(w.b.is_zero());
    }

    #[test]
    fn derivative_of_sqrt() {
        // d/dx sqrt(x) = 1/(2 sqrt x) = sqrt(x)/(2x)
        let t = airy_tower();
        let d = t.diff(&t.sqrt_q());
        assert!(d.a.is_zero());
        assert_eq!(d.b, R::new(P::one(), P::x().scale(&Qi::from_int(2))));
    }

    #[test]
    fn weber_sqrt_derivative() {
        // Q = x^2/4 - nu with nu treated as an exact rational parameter:
        // d/dx sqrt(Q) = (x/4)/sqrt(Q)
        use crate::param::Param;
        let nu = Param::var("nu");
        let q: RatFunc<Param> = RatFunc::from_poly(
            Poly::new(vec![-&nu, Param::zero(), Param::from_frac(1, 4)]),
        );
        let t = SqrtTower::new(q.clone());
        let d = t.diff(&t.sqrt_q());
        // expected coefficient of sqrt(Q): (x/4)/Q
        let expect = RatFunc::from_poly(Poly::new(vec![Param::zero(), Param::from_frac(1, 4)]))
            .div(&q);
        assert_eq!(d.b, expect);
        assert!(d.a.is_zero());
    }
}
