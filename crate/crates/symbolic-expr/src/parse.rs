use num_bigint::BigInt;
use thiserror::Error;

use exact_algebra::Q;

use crate::expr::Expr;

/// Parse failure with the byte offset of the offending token and the token
/// classes that would have been accepted there.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {offset}: found {found}, expected {}", expected.join(" | "))]
pub struct ParseError {
    pub offset: usize,
    pub found: String,
    pub expected: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Coord(u32),
    Param(char),
    Imag,
    Func(&'static str),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(n) => format!("integer {n}"),
            Tok::Coord(i) => format!("x{i}"),
            Tok::Param(c) => format!("{c}"),
            Tok::Imag => "i".into(),
            Tok::Func(f) => format!("{f}"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn next(&mut self) -> Result<(usize, Tok), ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.pos >= self.src.len() {
            return Ok((start, Tok::Eof));
        }
        let c = self.src[self.pos];
        let simple = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = simple {
            self.pos += 1;
            return Ok((start, t));
        }
        if c.is_ascii_digit() {
            let mut end = self.pos;
            while end < self.src.len() && self.src[end].is_ascii_digit() {
                end += 1;
            }
            let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
            self.pos = end;
            return Ok((start, Tok::Int(text.parse().unwrap())));
        }
        if c.is_ascii_alphabetic() {
            let mut end = self.pos;
            while end < self.src.len() && self.src[end].is_ascii_alphanumeric() {
                end += 1;
            }
            let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
            self.pos = end;
            let tok = match text {
                "i" => Tok::Imag,
                "p" => Tok::Param('p'),
                "q" => Tok::Param('q'),
                "r" => Tok::Param('r'),
                "ln" => Tok::Func("ln"),
                "exp" => Tok::Func("exp"),
                "atan" => Tok::Func("atan"),
                "sqrt" => Tok::Func("sqrt"),
                _ => {
                    if let Some(idx) = text.strip_prefix('x') {
                        if let Ok(n) = idx.parse::<u32>() {
                            if n >= 1 {
                                self.skip_ws();
                                return Ok((start, Tok::Coord(n)));
                            }
                        }
                    }
                    return Err(ParseError {
                        offset: start,
                        found: format!("identifier '{text}'"),
                        expected: vec![
                            "x<digits>".into(),
                            "p|q|r".into(),
                            "i".into(),
                            "ln|exp|atan|sqrt".into(),
                        ],
                    });
                }
            };
            return Ok((start, tok));
        }
        Err(ParseError {
            offset: start,
            found: format!("character '{}'", c as char),
            expected: vec!["operator".into(), "number".into(), "identifier".into()],
        })
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    look: (usize, Tok),
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        let mut lexer = Lexer::new(src);
        let look = lexer.next()?;
        Ok(Parser { lexer, look })
    }

    fn bump(&mut self) -> Result<(usize, Tok), ParseError> {
        let cur = self.look.clone();
        self.look = self.lexer.next()?;
        Ok(cur)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.look.1 == tok {
            self.bump()?;
            Ok(())
        } else {
            Err(self.unexpected(&[what]))
        }
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        ParseError {
            offset: self.look.0,
            found: self.look.1.describe(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.look.1 {
                Tok::Plus => {
                    self.bump()?;
                    terms.push(self.term()?);
                }
                Tok::Minus => {
                    self.bump()?;
                    terms.push(Expr::neg(self.term()?));
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Expr::add(terms) })
    }

    // term := unary (('*'|'/') unary)*
    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.look.1 {
                Tok::Star => {
                    self.bump()?;
                    let rhs = self.unary()?;
                    acc = match acc.kind() {
                        crate::expr::ExprKind::Mul(fs) => {
                            let mut fs = fs.clone();
                            fs.push(rhs);
                            Expr::mul(fs)
                        }
                        _ => Expr::mul(vec![acc, rhs]),
                    };
                }
                Tok::Slash => {
                    self.bump()?;
                    let rhs = self.unary()?;
                    acc = Expr::div(acc, rhs);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    // unary := '-' unary | power   ('^' binds tighter than unary minus)
    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.look.1 == Tok::Minus {
            self.bump()?;
            return Ok(Expr::neg(self.unary()?));
        }
        self.power()
    }

    // power := atom ('^' unary)?   (right-associative via unary recursion)
    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.look.1 == Tok::Caret {
            self.bump()?;
            let e = self.unary()?;
            return Ok(Expr::pow(base, e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.look.1.clone() {
            Tok::Int(n) => {
                self.bump()?;
                Ok(Expr::constant(Q::from_integer(n)))
            }
            Tok::Coord(i) => {
                self.bump()?;
                Ok(Expr::coord(i))
            }
            Tok::Param(c) => {
                self.bump()?;
                Ok(Expr::param(c))
            }
            Tok::Imag => {
                self.bump()?;
                Ok(Expr::imaginary())
            }
            Tok::Func(f) => {
                self.bump()?;
                self.expect(Tok::LParen, "'('")?;
                let arg = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(match f {
                    "ln" => Expr::ln(arg),
                    "exp" => Expr::exp(arg),
                    "atan" => Expr::atan(arg),
                    "sqrt" => Expr::sqrt(arg),
                    _ => unreachable!(),
                })
            }
            Tok::LParen => {
                self.bump()?;
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            _ => Err(self.unexpected(&["number", "identifier", "function", "'('", "'-'"])),
        }
    }
}

/// Parses the expression grammar. Division of integer literals yields exact
/// rational constants after canonicalization, covering `<int>/<int>`
/// literals. Implicit multiplication is rejected by construction.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    if p.look.1 != Tok::Eof {
        return Err(p.unexpected(&["operator", "end of input"]));
    }
    Ok(e)
}

/// Parses and canonicalizes. A zero denominator in a constant division is
/// reported as a parse-level error since `Div` denominators must be
/// syntactically nonzero.
pub fn parse_canonical(text: &str) -> Result<Expr, ParseError> {
    let e = parse_expr(text)?;
    if has_syntactic_zero_denominator(&e) {
        return Err(ParseError {
            offset: 0,
            found: "zero denominator".into(),
            expected: vec!["nonzero denominator".into()],
        });
    }
    Ok(e.canonical())
}

fn has_syntactic_zero_denominator(e: &Expr) -> bool {
    use crate::expr::ExprKind::*;
    match e.kind() {
        Const(_) | ImaginaryUnit | Var(_) => false,
        Add(ts) | Mul(ts) => ts.iter().any(has_syntactic_zero_denominator),
        Div(a, b) => {
            b.canonical().is_zero_const()
                || has_syntactic_zero_denominator(a)
                || has_syntactic_zero_denominator(b)
        }
        Pow(a, b) => has_syntactic_zero_denominator(a) || has_syntactic_zero_denominator(b),
        Neg(a) | Ln(a) | Exp(a) | Atan(a) | Sqrt(a) => has_syntactic_zero_denominator(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::ExprKind;
    use exact_algebra::Var;
    use exact_algebra::qr;

    #[test]
    fn precedence_and_associativity() {
        // ^ right-assoc and tighter than unary minus
        let e = parse_canonical("-x1^2").unwrap();
        assert_eq!(e, Expr::mul(vec![Expr::int(-1), Expr::powi(Expr::coord(1), 2)]).canonical());
        let e = parse_expr("2^3^2").unwrap().canonical();
        assert_eq!(e, Expr::int(512));
        let e = parse_expr("2*x1+3*x2").unwrap();
        assert!(matches!(e.kind(), ExprKind::Add(ts) if ts.len() == 2));
    }

    #[test]
    fn rational_literals_fold() {
        assert_eq!(parse_canonical("1/2").unwrap(), Expr::constant(qr(1, 2)));
        assert_eq!(parse_canonical("-3/4").unwrap(), Expr::constant(qr(-3, 4)));
    }

    #[test]
    fn four_term_sum_of_squares() {
        let e = parse_expr("x4^2+x5^2+x6^2+x7^2").unwrap();
        match e.kind() {
            ExprKind::Add(ts) => assert_eq!(ts.len(), 4),
            _ => panic!("expected sum"),
        }
    }

    #[test]
    fn ln_atan_tree() {
        let e = parse_expr("ln(x7^2 + x8^2) - 2*q*atan(x8/x7)").unwrap();
        let vars = e.free_vars();
        assert!(vars.contains(&Var::Coord(7)));
        assert!(vars.contains(&Var::Param('q')));
    }

    #[test]
    fn empty_input_is_error_at_offset_zero() {
        let err = parse_expr("").unwrap_err();
        assert_eq!(err.offset, 0);
    }

    #[test]
    fn error_reports_offset_and_expectations() {
        let err = parse_expr("x1 + * x2").unwrap_err();
        assert_eq!(err.offset, 5);
        assert!(!err.expected.is_empty());
        let err = parse_expr("x1 x2").unwrap_err();
        assert_eq!(err.offset, 3); // implicit multiplication is not allowed
        assert!(parse_expr("foo(2)").is_err());
    }
}
