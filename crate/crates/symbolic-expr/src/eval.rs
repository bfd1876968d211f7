use std::collections::BTreeMap;

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::BigInt;
use thiserror::Error;

use exact_algebra::{Q, Var};

use crate::expr::{Expr, ExprKind};

/// Evaluation failures on the numeric path.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("logarithm of zero")]
    LnZero,
    #[error("division by zero")]
    DivisionByZero,
    #[error("atan evaluated at a pole")]
    AtanPole,
    #[error("zero base with non-positive or non-real exponent")]
    ZeroBasePower,
    #[error("unassigned symbol {0}")]
    MissingSymbol(Var),
    #[error("non-finite intermediate value")]
    NotFinite,
    #[error("admissibility rejected: {0}")]
    Inadmissible(&'static str),
}

/// Complex number with arbitrary-precision real and imaginary parts.
#[derive(Debug, Clone)]
pub struct Complex {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl Complex {
    pub fn zero(p: usize) -> Self {
        Complex { re: BigFloat::from_i8(0, p), im: BigFloat::from_i8(0, p) }
    }

    pub fn from_f64(re: f64, im: f64, p: usize) -> Self {
        Complex { re: BigFloat::from_f64(re, p), im: BigFloat::from_f64(im, p) }
    }

    pub fn from_q(re: &Q, p: usize) -> Self {
        Complex { re: q_to_bigfloat(re, p), im: BigFloat::from_i8(0, p) }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
}

/// Assignment of every free symbol of the target expression to a complex
/// value, plus the working precision in bits (>= 64).
#[derive(Debug, Clone)]
pub struct EvalPoint {
    pub assignment: BTreeMap<Var, Complex>,
    pub precision_bits: usize,
}

impl EvalPoint {
    pub fn new(precision_bits: usize) -> Self {
        assert!(precision_bits >= 64, "precision must be at least 64 bits");
        EvalPoint { assignment: BTreeMap::new(), precision_bits }
    }

    pub fn set(&mut self, v: Var, value: Complex) -> &mut Self {
        self.assignment.insert(v, value);
        self
    }

    pub fn set_rational(&mut self, v: Var, value: &Q) -> &mut Self {
        let p = self.precision_bits + GUARD_BITS;
        self.assignment.insert(v, Complex::from_q(value, p));
        self
    }
}

const GUARD_BITS: usize = 32;
const RM: RoundingMode = RoundingMode::ToEven;

pub struct Evaluator {
    p: usize,
    out_p: usize,
    cc: Consts,
    /// When set, reject points too close to branch cuts or poles: every
    /// `ln`/`sqrt`/fractional-power argument must have real part above this
    /// margin and every denominator magnitude must exceed it.
    admissibility_margin: Option<BigFloat>,
}

impl Evaluator {
    pub fn new(precision_bits: usize) -> Self {
        Evaluator {
            p: precision_bits + GUARD_BITS,
            out_p: precision_bits,
            cc: Consts::new().expect("constants cache"),
            admissibility_margin: None,
        }
    }

    /// Evaluator that also enforces the sampling admissibility rules.
    pub fn with_margin(precision_bits: usize, margin: f64) -> Self {
        let mut e = Evaluator::new(precision_bits);
        e.admissibility_margin = Some(BigFloat::from_f64(margin, e.p));
        e
    }

    pub fn precision_bits(&self) -> usize {
        self.out_p
    }

    /// Principal-branch evaluation at the point; the result is rounded to
    /// the requested output precision.
    pub fn eval(&mut self, e: &Expr, pt: &EvalPoint) -> Result<Complex, DomainError> {
        let raw = self.eval_raw(e, &pt.assignment)?;
        Ok(Complex {
            re: round_to(&raw.re, self.out_p),
            im: round_to(&raw.im, self.out_p),
        })
    }

    fn eval_raw(
        &mut self,
        e: &Expr,
        env: &BTreeMap<Var, Complex>,
    ) -> Result<Complex, DomainError> {
        let v = match e.kind() {
            ExprKind::Const(c) => Complex::from_q(c, self.p),
            ExprKind::ImaginaryUnit => Complex {
                re: BigFloat::from_i8(0, self.p),
                im: BigFloat::from_i8(1, self.p),
            },
            ExprKind::Var(v) => env.get(v).cloned().ok_or(DomainError::MissingSymbol(*v))?,
            ExprKind::Add(ts) => {
                let mut acc = Complex::zero(self.p);
                for t in ts {
                    let x = self.eval_raw(t, env)?;
                    acc = self.add(&acc, &x);
                }
                acc
            }
            ExprKind::Mul(ts) => {
                let mut acc = Complex::from_q(&Q::from_integer(1.into()), self.p);
                for t in ts {
                    let x = self.eval_raw(t, env)?;
                    acc = self.mul(&acc, &x);
                }
                acc
            }
            ExprKind::Div(a, b) => {
                let x = self.eval_raw(a, env)?;
                let y = self.eval_raw(b, env)?;
                self.div(&x, &y)?
            }
            ExprKind::Neg(a) => {
                let x = self.eval_raw(a, env)?;
                Complex { re: x.re.neg(), im: x.im.neg() }
            }
            ExprKind::Ln(a) => {
                let x = self.eval_raw(a, env)?;
                self.ln(&x)?
            }
            ExprKind::Exp(a) => {
                let x = self.eval_raw(a, env)?;
                self.exp(&x)
            }
            ExprKind::Atan(a) => {
                let x = self.eval_raw(a, env)?;
                self.atan(&x)?
            }
            ExprKind::Sqrt(a) => {
                let x = self.eval_raw(a, env)?;
                self.sqrt(&x)?
            }
            ExprKind::Pow(a, b) => {
                let base = self.eval_raw(a, env)?;
                if let Some(n) = b.as_integer() {
                    self.powi(&base, n)?
                } else {
                    let expo = self.eval_raw(b, env)?;
                    self.pow(&base, &expo)?
                }
            }
        };
        if v.re.is_nan() || v.im.is_nan() || v.re.is_inf() || v.im.is_inf() {
            return Err(DomainError::NotFinite);
        }
        Ok(v)
    }

    fn add(&self, a: &Complex, b: &Complex) -> Complex {
        Complex { re: a.re.add(&b.re, self.p, RM), im: a.im.add(&b.im, self.p, RM) }
    }

    fn mul(&self, a: &Complex, b: &Complex) -> Complex {
        let re = a.re.mul(&b.re, self.p, RM).sub(&a.im.mul(&b.im, self.p, RM), self.p, RM);
        let im = a.re.mul(&b.im, self.p, RM).add(&a.im.mul(&b.re, self.p, RM), self.p, RM);
        Complex { re, im }
    }

    fn div(&self, a: &Complex, b: &Complex) -> Result<Complex, DomainError> {
        if b.is_zero() {
            return Err(DomainError::DivisionByZero);
        }
        let d = self.abs_sq(b);
        if let Some(margin) = &self.admissibility_margin {
            let m2 = margin.mul(margin, self.p, RM);
            if matches!(d.partial_cmp(&m2), Some(std::cmp::Ordering::Less) | None) {
                return Err(DomainError::Inadmissible("denominator magnitude below margin"));
            }
        }
        let nr = a.re.mul(&b.re, self.p, RM).add(&a.im.mul(&b.im, self.p, RM), self.p, RM);
        let ni = a.im.mul(&b.re, self.p, RM).sub(&a.re.mul(&b.im, self.p, RM), self.p, RM);
        Ok(Complex { re: nr.div(&d, self.p, RM), im: ni.div(&d, self.p, RM) })
    }

    pub fn abs_sq(&self, a: &Complex) -> BigFloat {
        a.re.mul(&a.re, self.p, RM).add(&a.im.mul(&a.im, self.p, RM), self.p, RM)
    }

    fn check_branch_margin(&mut self, a: &Complex, what: &'static str) -> Result<(), DomainError> {
        if let Some(margin) = &self.admissibility_margin {
            // Demand a positive real part with margin, keeping principal
            // branches far from their cuts.
            if matches!(a.re.partial_cmp(margin), Some(std::cmp::Ordering::Less) | None) {
                return Err(DomainError::Inadmissible(what));
            }
        }
        Ok(())
    }

    fn ln(&mut self, a: &Complex) -> Result<Complex, DomainError> {
        if a.is_zero() {
            return Err(DomainError::LnZero);
        }
        self.check_branch_margin(a, "ln argument near branch cut")?;
        let r2 = self.abs_sq(a);
        let half = BigFloat::from_f64(0.5, self.p);
        let lnr = r2.ln(self.p, RM, &mut self.cc).mul(&half, self.p, RM);
        let arg = self.atan2(&a.im, &a.re)?;
        Ok(Complex { re: lnr, im: arg })
    }

    fn atan2(&mut self, y: &BigFloat, x: &BigFloat) -> Result<BigFloat, DomainError> {
        let pi = self.cc.pi(self.p, RM);
        if x.is_zero() {
            if y.is_zero() {
                return Err(DomainError::DivisionByZero);
            }
            let half_pi = pi.div(&BigFloat::from_i8(2, self.p), self.p, RM);
            return Ok(if y.is_negative() { half_pi.neg() } else { half_pi });
        }
        let t = y.div(x, self.p, RM).atan(self.p, RM, &mut self.cc);
        if x.is_positive() {
            Ok(t)
        } else if y.is_negative() {
            Ok(t.sub(&pi, self.p, RM))
        } else {
            Ok(t.add(&pi, self.p, RM))
        }
    }

    fn exp(&mut self, a: &Complex) -> Complex {
        let er = a.re.exp(self.p, RM, &mut self.cc);
        if a.im.is_zero() {
            return Complex { re: er, im: BigFloat::from_i8(0, self.p) };
        }
        let c = a.im.cos(self.p, RM, &mut self.cc);
        let s = a.im.sin(self.p, RM, &mut self.cc);
        Complex { re: er.mul(&c, self.p, RM), im: er.mul(&s, self.p, RM) }
    }

    fn sqrt(&mut self, a: &Complex) -> Result<Complex, DomainError> {
        if a.is_zero() {
            return Ok(Complex::zero(self.p));
        }
        self.check_branch_margin(a, "sqrt argument near branch cut")?;
        if a.is_real() && !a.re.is_negative() {
            return Ok(Complex { re: a.re.sqrt(self.p, RM), im: BigFloat::from_i8(0, self.p) });
        }
        let l = self.ln(a)?;
        let half = BigFloat::from_f64(0.5, self.p);
        let hl = Complex { re: l.re.mul(&half, self.p, RM), im: l.im.mul(&half, self.p, RM) };
        Ok(self.exp(&hl))
    }

    fn atan(&mut self, a: &Complex) -> Result<Complex, DomainError> {
        if a.is_real() {
            return Ok(Complex {
                re: a.re.atan(self.p, RM, &mut self.cc),
                im: BigFloat::from_i8(0, self.p),
            });
        }
        // atan z = (i/2) (ln(1 - iz) - ln(1 + iz)); poles at z = ±i.
        let one = BigFloat::from_i8(1, self.p);
        let u = Complex { re: one.add(&a.im, self.p, RM), im: a.re.neg() };
        let v = Complex { re: one.sub(&a.im, self.p, RM), im: a.re.clone() };
        if u.is_zero() || v.is_zero() {
            return Err(DomainError::AtanPole);
        }
        let lu = self.ln(&u)?;
        let lv = self.ln(&v)?;
        let d = Complex { re: lu.re.sub(&lv.re, self.p, RM), im: lu.im.sub(&lv.im, self.p, RM) };
        let half = BigFloat::from_f64(0.5, self.p);
        // (i/2) * d = (-d.im/2, d.re/2)
        Ok(Complex {
            re: d.im.neg().mul(&half, self.p, RM),
            im: d.re.mul(&half, self.p, RM),
        })
    }

    fn powi(&mut self, a: &Complex, n: i64) -> Result<Complex, DomainError> {
        if a.is_zero() {
            if n > 0 {
                return Ok(Complex::zero(self.p));
            }
            return Err(DomainError::ZeroBasePower);
        }
        let mut acc = Complex::from_q(&Q::from_integer(1.into()), self.p);
        let mut base = a.clone();
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base);
            }
        }
        if n < 0 {
            let one = Complex::from_q(&Q::from_integer(1.into()), self.p);
            acc = self.div(&one, &acc)?;
        }
        Ok(acc)
    }

    /// Complex exponents use the principal branch: `a^b = exp(b ln a)`.
    fn pow(&mut self, a: &Complex, b: &Complex) -> Result<Complex, DomainError> {
        if a.is_zero() {
            if b.is_real() && b.re.is_positive() {
                return Ok(Complex::zero(self.p));
            }
            return Err(DomainError::ZeroBasePower);
        }
        let l = self.ln(a)?;
        let bl = self.mul(b, &l);
        Ok(self.exp(&bl))
    }
}

fn round_to(x: &BigFloat, p: usize) -> BigFloat {
    x.add(&BigFloat::from_i8(0, p), p, RM)
}

pub fn bigint_to_bigfloat(n: &BigInt, p: usize) -> BigFloat {
    let (sign, digits) = n.to_u64_digits();
    let mut acc = BigFloat::from_i8(0, p);
    let shift = BigFloat::from_u128(1u128 << 64, p);
    for d in digits.iter().rev() {
        acc = acc.mul(&shift, p, RM).add(&BigFloat::from_u64(*d, p), p, RM);
    }
    if sign == num_bigint::Sign::Minus {
        acc = acc.neg();
    }
    acc
}

pub fn q_to_bigfloat(c: &Q, p: usize) -> BigFloat {
    let n = bigint_to_bigfloat(c.numer(), p);
    if c.is_integer() {
        return n;
    }
    let d = bigint_to_bigfloat(c.denom(), p);
    n.div(&d, p, RM)
}

/// |z| <= tol, comparing squared magnitudes exactly at working precision.
pub fn magnitude_le(ev: &Evaluator, z: &Complex, tol: &BigFloat) -> bool {
    let m2 = ev.abs_sq(z);
    let t2 = tol.mul(tol, ev.p, RM);
    !matches!(m2.partial_cmp(&t2), Some(std::cmp::Ordering::Greater))
}

/// `10^e` as a BigFloat at the evaluator's working precision.
pub fn pow10(ev: &Evaluator, e: i64) -> BigFloat {
    let ten = BigFloat::from_i8(10, ev.p);
    let mut acc = BigFloat::from_i8(1, ev.p);
    for _ in 0..e.unsigned_abs() {
        acc = acc.mul(&ten, ev.p, RM);
    }
    if e < 0 {
        acc = BigFloat::from_i8(1, ev.p).div(&acc, ev.p, RM);
    }
    acc
}

pub fn bf_sign(x: &BigFloat) -> Option<Sign> {
    x.sign()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_canonical;

    fn eval_str(src: &str, bits: usize) -> Result<Complex, DomainError> {
        let e = parse_canonical(src).unwrap();
        let pt = EvalPoint::new(bits);
        Evaluator::new(bits).eval(&e, &pt)
    }

    #[test]
    fn i_squared_is_minus_one() {
        let v = eval_str("i*i", 128).unwrap();
        assert_eq!(v.re, BigFloat::from_i8(-1, 128));
        assert!(v.im.is_zero());
    }

    #[test]
    fn ln_zero_is_domain_error() {
        assert_eq!(eval_str("ln(0)", 128).unwrap_err(), DomainError::LnZero);
        // Literal 1/0 is rejected at parse time; a runtime zero denominator
        // surfaces as a DomainError.
        let e = parse_canonical("1/(x1-x1)").unwrap();
        let mut pt = EvalPoint::new(128);
        pt.set_rational(Var::Coord(1), &exact_algebra::q(2));
        assert_eq!(
            Evaluator::new(128).eval(&e, &pt).unwrap_err(),
            DomainError::DivisionByZero
        );
    }

    #[test]
    fn fractional_power_matches_sqrt_of_cube() {
        // (2)^(3/2) against sqrt(2^3), 128 bits.
        let a = eval_str("2^(3/2)", 128).unwrap();
        let b = eval_str("sqrt(2^3)", 128).unwrap();
        let ev = Evaluator::new(128);
        let diff = Complex { re: a.re.sub(&b.re, 160, RM), im: a.im.sub(&b.im, 160, RM) };
        assert!(magnitude_le(&ev, &diff, &pow10(&ev, -35)));
        let two_sqrt2 = 2.0f64.powf(1.5);
        let approx: f64 = format!("{}", a.re)
            .parse::<f64>()
            .unwrap_or_else(|_| {
                // astro-float prints scientific notation parseable by f64
                f64::NAN
            });
        assert!((approx - two_sqrt2).abs() < 1e-12);
    }

    #[test]
    fn complex_power_via_principal_branch() {
        // i^i = exp(-pi/2), a classic principal-branch value.
        let v = eval_str("i^i", 192).unwrap();
        assert!(v.im.is_zero() || v.im.exponent().unwrap_or(0) < -150);
        let expect = BigFloat::from_f64((-std::f64::consts::FRAC_PI_2).exp(), 64);
        let diff = v.re.sub(&expect, 64, RM);
        assert!(diff.exponent().unwrap_or(0) < -40);
    }

    #[test]
    fn atan_poles_error() {
        assert_eq!(eval_str("atan(i)", 128).unwrap_err(), DomainError::AtanPole);
    }

    #[test]
    fn rational_point_evaluation_is_exact() {
        let e = parse_canonical("x1^2+x2^2").unwrap();
        let mut pt = EvalPoint::new(128);
        pt.set_rational(Var::Coord(1), &exact_algebra::q(3));
        pt.set_rational(Var::Coord(2), &exact_algebra::q(4));
        let v = Evaluator::new(128).eval(&e, &pt).unwrap();
        assert_eq!(v.re, BigFloat::from_i8(25, 128));
    }

    #[test]
    fn admissibility_margin_rejects_small_denominators() {
        let e = parse_canonical("1/x1").unwrap();
        let mut pt = EvalPoint::new(128);
        pt.set_rational(Var::Coord(1), &exact_algebra::qr(1, 10_000));
        let r = Evaluator::with_margin(128, 1e-3).eval(&e, &pt);
        assert!(matches!(r, Err(DomainError::Inadmissible(_))));
        let r2 = Evaluator::new(128).eval(&e, &pt);
        assert!(r2.is_ok());
    }

    #[test]
    fn big_integer_conversion() {
        let n: BigInt = "123456789012345678901234567890".parse().unwrap();
        let f = bigint_to_bigfloat(&n, 192);
        let back = format!("{f}");
        assert!(back.starts_with("1.2345678901234567890123456789"));
    }
}
