use exact_algebra::{MultiPoly, Q, RationalFunction, VarSet};
#[cfg(test)]
use exact_algebra::Var;
use num_traits::{One, Signed, Zero};

use crate::expr::{Expr, ExprKind};

impl Expr {
    /// Variable set spanned by the free symbols of this expression.
    pub fn var_set(&self) -> VarSet {
        VarSet::new(self.free_vars().into_iter().collect())
    }

    /// Exact rational-function form over `vars`, when the tree contains only
    /// constants, variables, sums, products, quotients, negation and integer
    /// powers. `None` routes the caller to the numeric path.
    pub fn as_rational(&self, vars: &VarSet) -> Option<RationalFunction> {
        match self.kind() {
            ExprKind::Const(c) => Some(RationalFunction::constant(vars, c.clone())),
            ExprKind::Var(v) => {
                vars.index_of(*v)?;
                Some(RationalFunction::var(vars, *v))
            }
            ExprKind::ImaginaryUnit => None,
            ExprKind::Add(ts) => {
                let mut acc = RationalFunction::zero(vars);
                for t in ts {
                    acc = acc.add(&t.as_rational(vars)?);
                }
                Some(acc)
            }
            ExprKind::Mul(ts) => {
                let mut acc = RationalFunction::one(vars);
                for t in ts {
                    acc = acc.mul(&t.as_rational(vars)?);
                }
                Some(acc)
            }
            ExprKind::Div(a, b) => {
                let den = b.as_rational(vars)?;
                if den.is_zero() {
                    return None;
                }
                Some(a.as_rational(vars)?.div(&den))
            }
            ExprKind::Neg(a) => Some(a.as_rational(vars)?.neg()),
            ExprKind::Pow(a, b) => {
                let n = b.as_integer()?;
                let base = a.as_rational(vars)?;
                if base.is_zero() && n < 0 {
                    return None;
                }
                Some(base.pow(n))
            }
            ExprKind::Ln(_) | ExprKind::Exp(_) | ExprKind::Atan(_) | ExprKind::Sqrt(_) => None,
        }
    }

    /// `as_rational` over the expression's own variable set.
    pub fn to_rational(&self) -> Option<RationalFunction> {
        self.as_rational(&self.var_set())
    }

    /// Embedding of an exact rational function back into an expression tree,
    /// in canonical form: `is_rational(from_rational(rf)) == rf`.
    pub fn from_rational(rf: &RationalFunction) -> Expr {
        let num = poly_to_expr(rf.numer());
        if rf.is_poly() {
            let c = rf.denom().as_constant().unwrap();
            if c.is_one() {
                return num.canonical();
            }
            return Expr::mul(vec![Expr::constant(Q::one() / c), num]).canonical();
        }
        Expr::div(num, poly_to_expr(rf.denom())).canonical()
    }
}

fn poly_to_expr(p: &MultiPoly) -> Expr {
    if p.is_zero() {
        return Expr::zero();
    }
    let mut terms = Vec::with_capacity(p.num_terms());
    for (m, c) in p.terms() {
        let mut factors = Vec::new();
        if !c.is_one() || m.is_unit() {
            factors.push(Expr::constant(c.clone()));
        }
        for (i, &e) in m.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let v = Expr::var(p.vars().var_at(i));
            factors.push(if e == 1 { v } else { Expr::powi(v, e as i64) });
        }
        terms.push(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Expr::mul(factors)
        });
    }
    if terms.len() == 1 {
        terms.pop().unwrap()
    } else {
        Expr::add(terms)
    }
}

/// True when the expression's rational form exists and is identically zero.
pub fn is_identically_zero_rational(e: &Expr) -> Option<bool> {
    e.to_rational().map(|rf| rf.is_zero())
}

/// Polynomial helper for the common coordinate-polynomial case.
pub fn as_polynomial(e: &Expr, vars: &VarSet) -> Option<MultiPoly> {
    let rf = e.as_rational(vars)?;
    if !rf.is_poly() {
        return None;
    }
    let c = rf.denom().as_constant().unwrap();
    Some(rf.numer().scale(&(Q::one() / c)))
}

pub fn q_sign(c: &Q) -> i8 {
    if c.is_zero() {
        0
    } else if c.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_canonical;

    #[test]
    fn rational_detection() {
        let e = parse_canonical("x4*x7 - x5*x6").unwrap();
        let rf = e.to_rational().unwrap();
        assert!(rf.is_poly());
        let e = parse_canonical("exp(0-x1)*x2").unwrap();
        assert!(e.to_rational().is_none());
        let e = parse_canonical("7").unwrap();
        assert_eq!(e.to_rational().unwrap().as_constant().unwrap(), exact_algebra::q(7));
        // Integer powers stay rational; fractional do not.
        assert!(parse_canonical("x1^3").unwrap().to_rational().is_some());
        assert!(parse_canonical("x1^(-2)").unwrap().to_rational().is_some());
        assert!(parse_canonical("x1^(3/2)").unwrap().to_rational().is_none());
        assert!(parse_canonical("x1^p").unwrap().to_rational().is_none());
    }

    #[test]
    fn from_rational_roundtrip() {
        let vars = VarSet::coords_and_params(6, &[]);
        let e = parse_canonical("x1*x4+x2*x5+x3*x6").unwrap();
        let rf = e.as_rational(&vars).unwrap();
        let back = Expr::from_rational(&rf);
        assert_eq!(back, e);
        assert_eq!(back.as_rational(&vars).unwrap(), rf);

        let q = parse_canonical("(x1^2+1)/x2").unwrap();
        let rfq = q.as_rational(&VarSet::coords_and_params(2, &[])).unwrap();
        assert_eq!(Expr::from_rational(&rfq), q);
    }

    #[test]
    fn var_node_roundtrip() {
        let vars = VarSet::coords_and_params(3, &[]);
        let rf = RationalFunction::var(&vars, Var::Coord(3));
        assert_eq!(Expr::from_rational(&rf), Expr::coord(3));
    }
}
