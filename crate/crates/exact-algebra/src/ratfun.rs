use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::poly::MultiPoly;
use crate::vars::{Var, VarSet};
use crate::Q;

/// Reduced quotient of two polynomials. The representation is canonical:
/// numerator and denominator share no factor, the denominator is
/// integer-primitive with positive leading coefficient, so structural
/// equality is semantic equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunction {
    num: MultiPoly,
    den: MultiPoly,
}

impl RationalFunction {
    pub fn new(num: MultiPoly, den: MultiPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut rf = RationalFunction { num, den };
        rf.reduce();
        rf
    }

    pub fn from_poly(num: MultiPoly) -> Self {
        let den = MultiPoly::one(num.vars());
        RationalFunction { num, den }
    }

    pub fn constant(vars: &VarSet, c: Q) -> Self {
        RationalFunction::from_poly(MultiPoly::constant(vars, c))
    }

    pub fn zero(vars: &VarSet) -> Self {
        RationalFunction::from_poly(MultiPoly::zero(vars))
    }

    pub fn one(vars: &VarSet) -> Self {
        RationalFunction::from_poly(MultiPoly::one(vars))
    }

    pub fn var(vars: &VarSet, v: Var) -> Self {
        RationalFunction::from_poly(MultiPoly::var(vars, v))
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = MultiPoly::one(self.num.vars());
            return;
        }
        let g = MultiPoly::gcd(&self.num, &self.den);
        if !g.is_constant() {
            self.num = self.num.divide_exact(&g).expect("gcd divides");
            self.den = self.den.divide_exact(&g).expect("gcd divides");
        }
        let c = self.den.content();
        if !c.is_one() {
            self.num = self.num.scale(&(Q::one() / &c));
            self.den = self.den.scale(&(Q::one() / &c));
        }
    }

    pub fn numer(&self) -> &MultiPoly {
        &self.num
    }

    pub fn denom(&self) -> &MultiPoly {
        &self.den
    }

    pub fn vars(&self) -> &VarSet {
        self.num.vars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_constant()
    }

    pub fn as_constant(&self) -> Option<Q> {
        match (self.num.as_constant(), self.den.as_constant()) {
            (Some(n), Some(d)) => Some(n / d),
            _ => None,
        }
    }

    /// True when no coordinate variable occurs (parameters only).
    pub fn is_coordinate_free(&self) -> bool {
        let check = |p: &MultiPoly| {
            p.vars()
                .vars()
                .iter()
                .enumerate()
                .all(|(i, v)| !matches!(v, Var::Coord(_)) || p.degree_in(i) == 0)
        };
        check(&self.num) && check(&self.den)
    }

    pub fn add(&self, other: &RationalFunction) -> RationalFunction {
        // lcm-based sum keeps intermediate degrees down.
        let g = MultiPoly::gcd(&self.den, &other.den);
        if g.is_constant() {
            return RationalFunction::new(
                self.num.mul(&other.den).add(&other.num.mul(&self.den)),
                self.den.mul(&other.den),
            );
        }
        let d1 = self.den.divide_exact(&g).expect("gcd divides");
        let d2 = other.den.divide_exact(&g).expect("gcd divides");
        RationalFunction::new(
            self.num.mul(&d2).add(&other.num.mul(&d1)),
            self.den.mul(&d2),
        )
    }

    pub fn neg(&self) -> RationalFunction {
        RationalFunction { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, other: &RationalFunction) -> RationalFunction {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RationalFunction) -> RationalFunction {
        RationalFunction::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn div(&self, other: &RationalFunction) -> RationalFunction {
        assert!(!other.is_zero(), "division by zero rational function");
        RationalFunction::new(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    pub fn scale(&self, c: &Q) -> RationalFunction {
        RationalFunction::new(self.num.scale(c), self.den.clone())
    }

    pub fn pow(&self, e: i64) -> RationalFunction {
        let p = self.num.pow(e.unsigned_abs() as u32);
        let q = self.den.pow(e.unsigned_abs() as u32);
        if e >= 0 {
            RationalFunction::new(p, q)
        } else {
            assert!(!self.is_zero(), "negative power of zero");
            RationalFunction::new(q, p)
        }
    }

    pub fn derivative(&self, v: Var) -> RationalFunction {
        let dn = self.num.derivative(v);
        let dd = self.den.derivative(v);
        if dd.is_zero() {
            return RationalFunction::new(dn, self.den.clone());
        }
        RationalFunction::new(
            dn.mul(&self.den).sub(&self.num.mul(&dd)),
            self.den.mul(&self.den),
        )
    }

    /// Exact evaluation; `None` when the denominator vanishes at the point.
    pub fn eval(&self, vals: &[Q]) -> Option<Q> {
        let d = self.den.eval(vals);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(vals) / d)
    }

    pub fn eval_partial(&self, assignment: &BTreeMap<Var, Q>) -> Option<RationalFunction> {
        let den = self.den.eval_partial(assignment);
        if den.is_zero() {
            return None;
        }
        Some(RationalFunction::new(self.num.eval_partial(assignment), den))
    }

    pub fn extend_to(&self, target: &VarSet) -> RationalFunction {
        RationalFunction { num: self.num.extend_to(target), den: self.den.extend_to(target) }
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_poly() {
            let c = self.den.as_constant().unwrap();
            if c.is_one() {
                return write!(f, "{}", self.num);
            }
            return write!(f, "({})/{}", self.num, c);
        }
        write!(f, "({})/({})", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    #[test]
    fn reduction_is_canonical() {
        let vs = VarSet::coords_and_params(2, &[]);
        let x1 = MultiPoly::var(&vs, Var::Coord(1));
        let x2 = MultiPoly::var(&vs, Var::Coord(2));
        // (x1^2 - x2^2) / (x1 + x2) reduces to x1 - x2.
        let a = RationalFunction::new(x1.pow(2).sub(&x2.pow(2)), x1.add(&x2));
        assert!(a.is_poly());
        assert_eq!(a.numer(), &x1.sub(&x2));
        // Denominator sign normalizes: 1/(-x1) == -1/x1 structurally.
        let b = RationalFunction::new(MultiPoly::one(&vs), x1.neg());
        let c = RationalFunction::new(MultiPoly::one(&vs).neg(), x1.clone());
        assert_eq!(b, c);
    }

    #[test]
    fn field_ops() {
        let vs = VarSet::coords_and_params(1, &[]);
        let x = RationalFunction::var(&vs, Var::Coord(1));
        let one = RationalFunction::one(&vs);
        let r = x.div(&x.add(&one)).add(&one.div(&x.add(&one)));
        assert_eq!(r, one);
        let s = x.pow(-2).mul(&x.pow(3));
        assert_eq!(s, x);
        assert_eq!(x.sub(&x), RationalFunction::zero(&vs));
    }

    #[test]
    fn coordinate_free_detection() {
        let vs = VarSet::coords_and_params(2, &['p']);
        let p = RationalFunction::var(&vs, Var::Param('p'));
        let x = RationalFunction::var(&vs, Var::Coord(1));
        assert!(p.is_coordinate_free());
        assert!(p.scale(&q(-2)).is_coordinate_free());
        assert!(!p.mul(&x).is_coordinate_free());
    }
}
