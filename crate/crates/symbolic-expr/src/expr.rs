use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use exact_algebra::{Q, Var};

/// Immutable expression tree for generalized invariants: a rational core
/// (constants, variables, field operations, integer powers) extended with
/// `ln`, `exp`, `atan`, `sqrt`, the imaginary unit and arbitrary exponents.
///
/// Cloning is cheap (shared subtrees). All operations produce new trees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr(pub(crate) Arc<ExprKind>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Const(Q),
    ImaginaryUnit,
    Var(Var),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Div(Expr, Expr),
    Pow(Expr, Expr),
    Neg(Expr),
    Ln(Expr),
    Exp(Expr),
    Atan(Expr),
    Sqrt(Expr),
}

use ExprKind::*;

impl Expr {
    pub fn kind(&self) -> &ExprKind {
        &self.0
    }

    pub fn constant(c: Q) -> Expr {
        Expr(Arc::new(Const(c)))
    }

    pub fn int(n: i64) -> Expr {
        Expr::constant(Q::from_integer(n.into()))
    }

    pub fn imaginary() -> Expr {
        Expr(Arc::new(ImaginaryUnit))
    }

    pub fn var(v: Var) -> Expr {
        Expr(Arc::new(Var(v)))
    }

    pub fn coord(i: u32) -> Expr {
        Expr::var(Var::Coord(i))
    }

    pub fn param(c: char) -> Expr {
        Expr::var(Var::Param(c))
    }

    pub fn add(terms: Vec<Expr>) -> Expr {
        Expr(Arc::new(Add(terms)))
    }

    pub fn mul(factors: Vec<Expr>) -> Expr {
        Expr(Arc::new(Mul(factors)))
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr(Arc::new(Div(a, b)))
    }

    pub fn pow(a: Expr, b: Expr) -> Expr {
        Expr(Arc::new(Pow(a, b)))
    }

    pub fn powi(a: Expr, n: i64) -> Expr {
        Expr::pow(a, Expr::int(n))
    }

    pub fn neg(a: Expr) -> Expr {
        Expr(Arc::new(Neg(a)))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::add(vec![a, Expr::neg(b)])
    }

    pub fn ln(a: Expr) -> Expr {
        Expr(Arc::new(Ln(a)))
    }

    pub fn exp(a: Expr) -> Expr {
        Expr(Arc::new(Exp(a)))
    }

    pub fn atan(a: Expr) -> Expr {
        Expr(Arc::new(Atan(a)))
    }

    pub fn sqrt(a: Expr) -> Expr {
        Expr(Arc::new(Sqrt(a)))
    }

    pub fn zero() -> Expr {
        Expr::constant(Q::zero())
    }

    pub fn one() -> Expr {
        Expr::constant(Q::one())
    }

    pub fn is_zero_const(&self) -> bool {
        matches!(self.kind(), Const(c) if c.is_zero())
    }

    pub fn as_const(&self) -> Option<&Q> {
        match self.kind() {
            Const(c) => Some(c),
            _ => None,
        }
    }

    /// The exponent as an exact integer, when this is an integer constant.
    pub fn as_integer(&self) -> Option<i64> {
        match self.kind() {
            Const(c) if c.is_integer() => {
                use num_traits::ToPrimitive;
                c.numer().to_i64()
            }
            _ => None,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self.kind() {
            Const(_) | ImaginaryUnit => {}
            Var(v) => {
                out.insert(*v);
            }
            Add(ts) | Mul(ts) => ts.iter().for_each(|t| t.collect_vars(out)),
            Div(a, b) | Pow(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Neg(a) | Ln(a) | Exp(a) | Atan(a) | Sqrt(a) => a.collect_vars(out),
        }
    }

    pub fn contains_imaginary(&self) -> bool {
        match self.kind() {
            ImaginaryUnit => true,
            Const(_) | Var(_) => false,
            Add(ts) | Mul(ts) => ts.iter().any(|t| t.contains_imaginary()),
            Div(a, b) | Pow(a, b) => a.contains_imaginary() || b.contains_imaginary(),
            Neg(a) | Ln(a) | Exp(a) | Atan(a) | Sqrt(a) => a.contains_imaginary(),
        }
    }

    /// Replaces every occurrence of variable `v` by `rep`.
    pub fn substitute(&self, v: Var, rep: &Expr) -> Expr {
        match self.kind() {
            Var(w) if *w == v => rep.clone(),
            Const(_) | ImaginaryUnit | Var(_) => self.clone(),
            Add(ts) => Expr::add(ts.iter().map(|t| t.substitute(v, rep)).collect()),
            Mul(ts) => Expr::mul(ts.iter().map(|t| t.substitute(v, rep)).collect()),
            Div(a, b) => Expr::div(a.substitute(v, rep), b.substitute(v, rep)),
            Pow(a, b) => Expr::pow(a.substitute(v, rep), b.substitute(v, rep)),
            Neg(a) => Expr::neg(a.substitute(v, rep)),
            Ln(a) => Expr::ln(a.substitute(v, rep)),
            Exp(a) => Expr::exp(a.substitute(v, rep)),
            Atan(a) => Expr::atan(a.substitute(v, rep)),
            Sqrt(a) => Expr::sqrt(a.substitute(v, rep)),
        }
    }

    /// Light canonical form: flatten nested sums/products, fold constants,
    /// drop neutral elements, rewrite `Neg` into a `-1` factor and sort
    /// operands structurally. No deep simplification.
    pub fn canonical(&self) -> Expr {
        match self.kind() {
            Const(_) | ImaginaryUnit | Var(_) => self.clone(),
            Neg(a) => {
                let a = a.canonical();
                canon_mul(vec![Expr::int(-1), a])
            }
            Add(ts) => canon_add(ts.iter().map(|t| t.canonical()).collect()),
            Mul(ts) => canon_mul(ts.iter().map(|t| t.canonical()).collect()),
            Div(a, b) => {
                let a = a.canonical();
                let b = b.canonical();
                if let Const(c) = b.kind() {
                    if !c.is_zero() {
                        return canon_mul(vec![Expr::constant(Q::one() / c), a]);
                    }
                }
                Expr::div(a, b)
            }
            Pow(a, b) => {
                let a = a.canonical();
                let b = b.canonical();
                if let Const(e) = b.kind() {
                    if e.is_zero() {
                        return Expr::one();
                    }
                    if e.is_one() {
                        return a;
                    }
                    if let (Const(base), Some(n)) = (a.kind(), b.as_integer()) {
                        if n.unsigned_abs() <= 64 && !(base.is_zero() && n < 0) {
                            let mut acc = Q::one();
                            for _ in 0..n.unsigned_abs() {
                                acc *= base;
                            }
                            if n < 0 {
                                acc = Q::one() / acc;
                            }
                            return Expr::constant(acc);
                        }
                    }
                }
                Expr::pow(a, b)
            }
            Ln(a) => Expr::ln(a.canonical()),
            Exp(a) => Expr::exp(a.canonical()),
            Atan(a) => Expr::atan(a.canonical()),
            Sqrt(a) => Expr::sqrt(a.canonical()),
        }
    }

    /// Structural ordering used for canonical operand sorting.
    pub fn cmp_structural(&self, other: &Expr) -> Ordering {
        fn rank(k: &ExprKind) -> u8 {
            match k {
                Const(_) => 0,
                ImaginaryUnit => 1,
                Var(_) => 2,
                Pow(_, _) => 3,
                Mul(_) => 4,
                Div(_, _) => 5,
                Add(_) => 6,
                Ln(_) => 7,
                Exp(_) => 8,
                Atan(_) => 9,
                Sqrt(_) => 10,
                Neg(_) => 11,
            }
        }
        let (a, b) = (self.kind(), other.kind());
        rank(a).cmp(&rank(b)).then_with(|| match (a, b) {
            (Const(x), Const(y)) => x.cmp(y),
            (Var(x), Var(y)) => x.cmp(y),
            (Add(xs), Add(ys)) | (Mul(xs), Mul(ys)) => {
                for (x, y) in xs.iter().zip(ys.iter()) {
                    let c = x.cmp_structural(y);
                    if c != Ordering::Equal {
                        return c;
                    }
                }
                xs.len().cmp(&ys.len())
            }
            (Div(x1, x2), Div(y1, y2)) | (Pow(x1, x2), Pow(y1, y2)) => x1
                .cmp_structural(y1)
                .then_with(|| x2.cmp_structural(y2)),
            (Neg(x), Neg(y))
            | (Ln(x), Ln(y))
            | (Exp(x), Exp(y))
            | (Atan(x), Atan(y))
            | (Sqrt(x), Sqrt(y)) => x.cmp_structural(y),
            _ => Ordering::Equal,
        })
    }
}

fn canon_add(terms: Vec<Expr>) -> Expr {
    let mut flat = Vec::new();
    let mut c = Q::zero();
    for t in terms {
        match t.kind() {
            Add(inner) => {
                for x in inner {
                    match x.kind() {
                        Const(k) => c += k,
                        _ => flat.push(x.clone()),
                    }
                }
            }
            Const(k) => c += k,
            _ => flat.push(t),
        }
    }
    flat.sort_by(|a, b| a.cmp_structural(b));
    if !c.is_zero() {
        flat.insert(0, Expr::constant(c));
    }
    match flat.len() {
        0 => Expr::zero(),
        1 => flat.pop().unwrap(),
        _ => Expr::add(flat),
    }
}

fn canon_mul(factors: Vec<Expr>) -> Expr {
    let mut flat = Vec::new();
    let mut c = Q::one();
    for t in factors {
        match t.kind() {
            Mul(inner) => {
                for x in inner {
                    match x.kind() {
                        Const(k) => c *= k,
                        _ => flat.push(x.clone()),
                    }
                }
            }
            Const(k) => c *= k,
            _ => flat.push(t),
        }
    }
    if c.is_zero() {
        return Expr::zero();
    }
    flat.sort_by(|a, b| a.cmp_structural(b));
    if !c.is_one() || flat.is_empty() {
        flat.insert(0, Expr::constant(c));
    }
    match flat.len() {
        0 => Expr::one(),
        1 => flat.pop().unwrap(),
        _ => Expr::mul(flat),
    }
}

/// Convenience: `c.is_negative()` for the leading constant of a canonical product.
pub(crate) fn leading_const_is_negative(e: &Expr) -> bool {
    match e.kind() {
        Const(c) => c.is_negative(),
        Mul(fs) => fs.first().map_or(false, |f| matches!(f.kind(), Const(c) if c.is_negative())),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use exact_algebra::qr;

    #[test]
    fn canonical_folds_constants_and_flattens() {
        let e = Expr::add(vec![
            Expr::int(2),
            Expr::add(vec![Expr::coord(1), Expr::int(3)]),
            Expr::neg(Expr::int(5)),
        ]);
        let c = e.canonical();
        assert_eq!(c, Expr::coord(1));
        let m = Expr::mul(vec![Expr::int(2), Expr::mul(vec![Expr::coord(1), Expr::int(3)])]);
        assert_eq!(
            m.canonical(),
            Expr::mul(vec![Expr::int(6), Expr::coord(1)])
        );
    }

    #[test]
    fn canonical_kills_zero_product_and_unit_power() {
        let z = Expr::mul(vec![Expr::coord(2), Expr::zero()]);
        assert!(z.canonical().is_zero_const());
        assert_eq!(Expr::powi(Expr::coord(1), 1).canonical(), Expr::coord(1));
        assert_eq!(Expr::powi(Expr::coord(1), 0).canonical(), Expr::one());
        assert_eq!(Expr::powi(Expr::int(2), -2).canonical(), Expr::constant(qr(1, 4)));
    }

    #[test]
    fn div_by_constant_becomes_coefficient() {
        let e = Expr::div(Expr::coord(1), Expr::int(2)).canonical();
        assert_eq!(e, Expr::mul(vec![Expr::constant(qr(1, 2)), Expr::coord(1)]));
    }

    #[test]
    fn substitution() {
        let e = Expr::add(vec![Expr::param('p'), Expr::coord(1)]);
        let s = e.substitute(Var::Param('p'), &Expr::zero()).canonical();
        assert_eq!(s, Expr::coord(1));
    }
}
