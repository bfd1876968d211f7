use exact_algebra::Var;
use num_traits::One;

use crate::expr::{Expr, ExprKind};

impl Expr {
    /// Exact symbolic partial derivative with respect to `v`. Rational
    /// subtrees stay rational; powers with non-constant exponents are
    /// handled through the `exp(b·ln a)` form, which reappears as a
    /// `Pow`-times-logarithmic-derivative product.
    pub fn differentiate(&self, v: Var) -> Expr {
        self.diff_raw(v).canonical()
    }

    fn diff_raw(&self, v: Var) -> Expr {
        match self.kind() {
            ExprKind::Const(_) | ExprKind::ImaginaryUnit => Expr::zero(),
            ExprKind::Var(w) => {
                if *w == v {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            ExprKind::Add(ts) => Expr::add(ts.iter().map(|t| t.diff_raw(v)).collect()),
            ExprKind::Mul(fs) => {
                let mut terms = Vec::with_capacity(fs.len());
                for (k, _fk) in fs.iter().enumerate() {
                    let mut factors: Vec<Expr> = Vec::with_capacity(fs.len());
                    for (j, fj) in fs.iter().enumerate() {
                        factors.push(if j == k { fj.diff_raw(v) } else { fj.clone() });
                    }
                    terms.push(Expr::mul(factors));
                }
                Expr::add(terms)
            }
            ExprKind::Div(a, b) => {
                // (a'b - ab') / b^2
                let num = Expr::sub(
                    Expr::mul(vec![a.diff_raw(v), b.clone()]),
                    Expr::mul(vec![a.clone(), b.diff_raw(v)]),
                );
                Expr::div(num, Expr::powi(b.clone(), 2))
            }
            ExprKind::Neg(a) => Expr::neg(a.diff_raw(v)),
            ExprKind::Ln(a) => Expr::div(a.diff_raw(v), a.clone()),
            ExprKind::Exp(a) => Expr::mul(vec![a.diff_raw(v), self.clone()]),
            ExprKind::Atan(a) => Expr::div(
                a.diff_raw(v),
                Expr::add(vec![Expr::one(), Expr::powi(a.clone(), 2)]),
            ),
            ExprKind::Sqrt(a) => Expr::div(
                a.diff_raw(v),
                Expr::mul(vec![Expr::int(2), self.clone()]),
            ),
            ExprKind::Pow(a, b) => {
                if let Some(c) = b.as_const() {
                    // Constant exponent: c * a^(c-1) * a'
                    let e1 = Expr::constant(c - num_rational::BigRational::one());
                    return Expr::mul(vec![
                        Expr::constant(c.clone()),
                        Expr::pow(a.clone(), e1),
                        a.diff_raw(v),
                    ]);
                }
                // a^b = exp(b ln a):  a^b * (b' ln a + b a'/a)
                let inner = Expr::add(vec![
                    Expr::mul(vec![b.diff_raw(v), Expr::ln(a.clone())]),
                    Expr::mul(vec![b.clone(), Expr::div(a.diff_raw(v), a.clone())]),
                ]);
                Expr::mul(vec![self.clone(), inner])
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_canonical;

    fn d(src: &str, v: Var) -> Expr {
        parse_canonical(src).unwrap().differentiate(v)
    }

    #[test]
    fn power_rule() {
        let e = d("x4^2+x5^2", Var::Coord(4));
        assert_eq!(e, parse_canonical("2*x4").unwrap());
    }

    #[test]
    fn chain_rule_through_ln() {
        let e = d("ln(x7^2+x8^2)", Var::Coord(8));
        // 2 x8 / (x7^2 + x8^2)
        let expect = parse_canonical("2*x8/(x7^2+x8^2)").unwrap();
        assert_eq!(e.to_string(), expect.to_string());
    }

    #[test]
    fn constants_and_parameters_are_flat() {
        assert!(d("p", Var::Coord(1)).is_zero_const());
        assert_eq!(d("p*x1", Var::Coord(1)), parse_canonical("p").unwrap());
        assert_eq!(d("p*x1", Var::Param('p')), parse_canonical("x1").unwrap());
    }

    #[test]
    fn parametric_power_uses_log_form() {
        let e = d("x1^p", Var::Coord(1));
        // x1^p * p / x1
        let s = e.to_string();
        assert!(s.contains("x1^p"), "derivative was {s}");
    }
}
