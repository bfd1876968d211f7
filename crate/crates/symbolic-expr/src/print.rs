use std::fmt;

use num_traits::{One, Signed};

use exact_algebra::Q;

use crate::expr::{leading_const_is_negative, Expr, ExprKind};

/// Printing produces text that re-parses to the same canonical form; the
/// round trip `parse ∘ print` is the identity on canonical expressions.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self)
    }
}

fn is_atom_like(e: &Expr) -> bool {
    match e.kind() {
        ExprKind::Const(c) => !c.is_negative(),
        ExprKind::Var(_) | ExprKind::ImaginaryUnit => true,
        ExprKind::Ln(_) | ExprKind::Exp(_) | ExprKind::Atan(_) | ExprKind::Sqrt(_) => true,
        _ => false,
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    match e.kind() {
        ExprKind::Const(c) => write_const(f, c),
        ExprKind::ImaginaryUnit => write!(f, "i"),
        ExprKind::Var(v) => write!(f, "{v}"),
        ExprKind::Add(ts) => {
            for (k, t) in ts.iter().enumerate() {
                if k == 0 {
                    write_expr(f, t)?;
                } else if leading_const_is_negative(t) || matches!(t.kind(), ExprKind::Neg(_)) {
                    write!(f, " - ")?;
                    let m = negate_for_print(t);
                    if matches!(m.kind(), ExprKind::Add(_)) {
                        paren(f, &m)?;
                    } else {
                        write_expr(f, &m)?;
                    }
                } else {
                    write!(f, " + ")?;
                    write_expr(f, t)?;
                }
            }
            Ok(())
        }
        ExprKind::Mul(fs) => write_product(f, fs),
        ExprKind::Div(a, b) => {
            if matches!(a.kind(), ExprKind::Add(_)) || leading_const_is_negative(a) {
                paren(f, a)?;
            } else {
                write_expr(f, a)?;
            }
            write!(f, "/")?;
            let den_simple = is_atom_like(b)
                || matches!(b.kind(), ExprKind::Pow(base, _) if is_atom_like(base));
            if den_simple {
                write_expr(f, b)
            } else {
                paren(f, b)
            }
        }
        ExprKind::Pow(a, b) => {
            if is_atom_like(a) {
                write_expr(f, a)?;
            } else {
                paren(f, a)?;
            }
            write!(f, "^")?;
            let simple = match b.kind() {
                ExprKind::Const(c) => c.is_integer() && !c.is_negative(),
                ExprKind::Var(_) | ExprKind::ImaginaryUnit => true,
                _ => false,
            };
            if simple {
                write_expr(f, b)
            } else {
                paren(f, b)
            }
        }
        ExprKind::Neg(a) => {
            write!(f, "-")?;
            if matches!(a.kind(), ExprKind::Add(_)) || leading_const_is_negative(a) {
                paren(f, a)
            } else {
                write_expr(f, a)
            }
        }
        ExprKind::Ln(a) => write_call(f, "ln", a),
        ExprKind::Exp(a) => write_call(f, "exp", a),
        ExprKind::Atan(a) => write_call(f, "atan", a),
        ExprKind::Sqrt(a) => write_call(f, "sqrt", a),
    }
}

fn write_const(f: &mut fmt::Formatter<'_>, c: &Q) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

fn paren(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    write!(f, "(")?;
    write_expr(f, e)?;
    write!(f, ")")
}

fn write_call(f: &mut fmt::Formatter<'_>, name: &str, arg: &Expr) -> fmt::Result {
    write!(f, "{name}(")?;
    write_expr(f, arg)?;
    write!(f, ")")
}

/// `-t` with the sign stripped, for printing after a binary minus.
fn negate_for_print(t: &Expr) -> Expr {
    match t.kind() {
        ExprKind::Neg(inner) => inner.clone(),
        ExprKind::Const(c) => Expr::constant(-c.clone()),
        ExprKind::Mul(fs) => {
            let mut fs = fs.to_vec();
            if let ExprKind::Const(c) = fs[0].kind() {
                let m = -c.clone();
                if m.is_one() && fs.len() > 1 {
                    fs.remove(0);
                } else {
                    fs[0] = Expr::constant(m);
                }
            }
            if fs.len() == 1 {
                fs.pop().unwrap()
            } else {
                Expr::mul(fs)
            }
        }
        _ => Expr::neg(t.clone()),
    }
}

fn write_product(f: &mut fmt::Formatter<'_>, fs: &[Expr]) -> fmt::Result {
    let mut items: Vec<Expr> = fs.to_vec();
    let neg_mag = match items.first().map(|e| e.kind()) {
        Some(ExprKind::Const(c)) if c.is_negative() => Some(-c.clone()),
        _ => None,
    };
    if let Some(mag) = neg_mag {
        write!(f, "-")?;
        if mag.is_one() && items.len() > 1 {
            items.remove(0);
        } else {
            items[0] = Expr::constant(mag);
        }
    }
    for (k, t) in items.iter().enumerate() {
        if k > 0 {
            write!(f, "*")?;
        }
        let needs = matches!(t.kind(), ExprKind::Add(_) | ExprKind::Div(_, _) | ExprKind::Neg(_))
            || (k > 0 && matches!(t.kind(), ExprKind::Const(_)))
            || leading_const_is_negative(t);
        if needs {
            paren(f, t)?;
        } else {
            write_expr(f, t)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use crate::parse::parse_canonical;

    fn roundtrip(src: &str) {
        let c = parse_canonical(src).unwrap();
        let printed = c.to_string();
        let again = parse_canonical(&printed)
            .unwrap_or_else(|e| panic!("reparse of printed {printed:?} failed: {e}"));
        assert_eq!(again, c, "print {src:?} -> {printed:?} changed canonical form");
    }

    #[test]
    fn print_parse_roundtrips() {
        for src in [
            "x4^2+x5^2+x6^2+x7^2",
            "ln(x7^2+x8^2) - 2*q*atan(x8/x7)",
            "1/2",
            "-3/4*x1",
            "(x1^2+1)/x2",
            "x1*x4+x2*x5+x3*x6",
            "(x4^2+x5^2+x6^2)^p/x7^2",
            "x3^(q-i)/(x7-i*x8)^p",
            "exp(-(x1/x2))*x3",
            "2*x6*x8-x7^2",
            "x1 - (x2 - x3)",
            "-x1-x2",
            "sqrt(x1^2)",
            "(x7^2+x8^2)*((x7+i*x8)/(x7-i*x8))^(r*i)",
            "x1^2^3",
            "2/3/x1",
            "-(1/2)*x4",
            "x6*x9-x7*x8",
            "x4^(p-2)*(x4*x7-x5*x6)^2",
            "1/p^2*ln(x6)^2",
            "x8^q/x7^p",
        ] {
            roundtrip(src);
        }
    }

    #[test]
    fn negative_one_coefficient_prints_as_sign() {
        let c = parse_canonical("0 - x1*x2").unwrap();
        assert_eq!(c.to_string(), "-x1*x2");
        roundtrip("0 - x1*x2");
    }
}
