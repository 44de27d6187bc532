//! Recursive-descent parser for right-hand sides `f(u, v)`.
//!
//! Accepted language: `u`, `v` (alias `ux`), integer and decimal literals,
//! `+ - * / ^` with the usual precedence (`^` right-associative, exponents
//! must reduce to integer constants), `exp log sin cos`, and parentheses.
//! No implicit multiplication.  Decimal literals become exact rationals.

use num::{BigInt, BigRational};

use super::ParseError;
use crate::symkernel::{Expr, Fun, Symbol};

#[derive(Clone, Debug, PartialEq)]
enum TokKind {
    Num(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

#[derive(Clone, Debug)]
struct Tok {
    kind: TokKind,
    line: usize,
    col: usize,
}

impl Tok {
    fn describe(&self) -> String {
        match &self.kind {
            TokKind::Num(_) => "number".into(),
            TokKind::Ident(s) => format!("`{s}`"),
            TokKind::Plus => "`+`".into(),
            TokKind::Minus => "`-`".into(),
            TokKind::Star => "`*`".into(),
            TokKind::Slash => "`/`".into(),
            TokKind::Caret => "`^`".into(),
            TokKind::LParen => "`(`".into(),
            TokKind::RParen => "`)`".into(),
            TokKind::Eof => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<Tok>, ParseError> {
    let mut toks = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0usize;
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            ' ' | '\t' | '\r' => {
                i += 1;
                col += 1;
                continue;
            }
            '+' => toks.push(Tok { kind: TokKind::Plus, line: tl, col: tc }),
            '-' => toks.push(Tok { kind: TokKind::Minus, line: tl, col: tc }),
            '*' => toks.push(Tok { kind: TokKind::Star, line: tl, col: tc }),
            '/' => toks.push(Tok { kind: TokKind::Slash, line: tl, col: tc }),
            '^' => toks.push(Tok { kind: TokKind::Caret, line: tl, col: tc }),
            '(' => toks.push(Tok { kind: TokKind::LParen, line: tl, col: tc }),
            ')' => toks.push(Tok { kind: TokKind::RParen, line: tl, col: tc }),
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let mut frac_len = 0usize;
                if i < chars.len() && chars[i] == '.' {
                    let dot = i;
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                        frac_len += 1;
                    }
                    if frac_len == 0 {
                        return Err(ParseError::SyntaxError {
                            line: tl,
                            col: tc + (dot - start),
                            msg: "expected digits after decimal point".into(),
                        });
                    }
                }
                let digits: String = chars[start..i].iter().filter(|c| **c != '.').collect();
                let numer: BigInt = digits.parse().expect("digit string");
                let denom = BigInt::from(10u32).pow(frac_len as u32);
                toks.push(Tok {
                    kind: TokKind::Num(BigRational::new(numer, denom)),
                    line: tl,
                    col: tc,
                });
                col += i - start;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let name: String = chars[start..i].iter().collect();
                toks.push(Tok {
                    kind: TokKind::Ident(name),
                    line: tl,
                    col: tc,
                });
                col += i - start;
                continue;
            }
            other => {
                return Err(ParseError::SyntaxError {
                    line: tl,
                    col: tc,
                    msg: format!("unexpected character `{other}`"),
                });
            }
        }
        i += 1;
        col += 1;
    }
    toks.push(Tok {
        kind: TokKind::Eof,
        line,
        col,
    });
    Ok(toks)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, msg: impl Into<String>) -> ParseError {
        let t = self.peek();
        ParseError::SyntaxError {
            line: t.line,
            col: t.col,
            msg: msg.into(),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek().kind {
                TokKind::Plus => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = &acc + &rhs;
                }
                TokKind::Minus => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = &acc - &rhs;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek().kind {
                TokKind::Star => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = &acc * &rhs;
                }
                TokKind::Slash => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = &acc / &rhs;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek().kind == TokKind::Minus {
            self.bump();
            let inner = self.unary()?;
            return Ok(inner.negate());
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek().kind != TokKind::Caret {
            return Ok(base);
        }
        let caret = self.bump();
        let exponent = self.unary()?;
        match exponent.as_int() {
            Some(k) => Ok(Expr::pow(base, k)),
            None => {
                let msg = if exponent.as_rational().is_some() {
                    "exponent must reduce to an integer"
                } else {
                    "exponent must be a constant"
                };
                Err(ParseError::SyntaxError {
                    line: caret.line,
                    col: caret.col,
                    msg: msg.into(),
                })
            }
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().kind.clone() {
            TokKind::Num(r) => {
                self.bump();
                Ok(Expr::rat(r))
            }
            TokKind::LParen => {
                self.bump();
                let inner = self.expr()?;
                if self.peek().kind != TokKind::RParen {
                    return Err(self.error_here(format!(
                        "expected `)`, found {}",
                        self.peek().describe()
                    )));
                }
                self.bump();
                Ok(inner)
            }
            TokKind::Ident(name) => {
                let tok = self.bump();
                match name.as_str() {
                    "u" => Ok(Expr::sym(Symbol::U)),
                    "v" | "ux" => Ok(Expr::sym(Symbol::V)),
                    "exp" | "log" | "sin" | "cos" => {
                        let f = match name.as_str() {
                            "exp" => Fun::Exp,
                            "log" => Fun::Log,
                            "sin" => Fun::Sin,
                            _ => Fun::Cos,
                        };
                        if self.peek().kind != TokKind::LParen {
                            return Err(self.error_here(format!(
                                "expected `(` after `{name}`"
                            )));
                        }
                        self.bump();
                        let arg = self.expr()?;
                        if self.peek().kind != TokKind::RParen {
                            return Err(self.error_here(format!(
                                "expected `)`, found {}",
                                self.peek().describe()
                            )));
                        }
                        self.bump();
                        Ok(Expr::fun(f, arg))
                    }
                    _ => Err(ParseError::UnknownIdentifier {
                        line: tok.line,
                        col: tok.col,
                        name,
                    }),
                }
            }
            _ => Err(self.error_here(format!(
                "expected a value, found {}",
                self.peek().describe()
            ))),
        }
    }
}

/// Parse a right-hand side `f(u, v)`.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if p.peek().kind != TokKind::Eof {
        return Err(p.error_here(format!(
            "unexpected {} after expression",
            p.peek().describe()
        )));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprparse::plain;
    use crate::symkernel::canonical_equal;
    use proptest::prelude::*;

    fn u() -> Expr {
        Expr::sym(Symbol::U)
    }
    fn v() -> Expr {
        Expr::sym(Symbol::V)
    }

    #[test]
    fn simple_forms() {
        assert_eq!(parse("v^3").unwrap(), Expr::pow(v(), 3));
        assert_eq!(
            parse("exp(u) + 2*v").unwrap(),
            &Expr::fun(Fun::Exp, u()) + &(&Expr::int(2) * &v())
        );
        assert_eq!(parse("ux").unwrap(), v());
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse("0.5").unwrap(), Expr::frac(1, 2));
        assert_eq!(parse("2.25*v").unwrap(), &Expr::frac(9, 4) * &v());
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(parse("u + v*v").unwrap(), &u() + &Expr::pow(v(), 2));
        assert_eq!(parse("-v^2").unwrap(), Expr::pow(v(), 2).negate());
        assert_eq!(parse("1/2*v").unwrap(), &Expr::frac(1, 2) * &v());
        // Right-associative exponent chain: v^2^3 is v^(2^3).
        assert_eq!(parse("v^2^3").unwrap(), Expr::pow(v(), 8));
    }

    #[test]
    fn syntax_error_carries_position() {
        match parse("u +* v") {
            Err(ParseError::SyntaxError { line, col, .. }) => {
                assert_eq!((line, col), (1, 4));
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_identifiers_are_rejected() {
        for bad in ["t", "x", "f_v", "w", "u_t"] {
            match parse(bad) {
                Err(ParseError::UnknownIdentifier { name, .. }) => assert_eq!(name, bad),
                other => panic!("expected unknown identifier for {bad}, got {other:?}"),
            }
        }
    }

    #[test]
    fn non_integer_exponents_are_rejected() {
        match parse("v^(1/2)") {
            Err(ParseError::SyntaxError { msg, .. }) => {
                assert!(msg.contains("integer"), "got {msg}");
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
        // A rational exponent that reduces to an integer is fine.
        assert_eq!(parse("v^(4/2)").unwrap(), Expr::pow(v(), 2));
        match parse("v^u") {
            Err(ParseError::SyntaxError { msg, .. }) => {
                assert!(msg.contains("constant"), "got {msg}");
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn no_implicit_multiplication() {
        assert!(parse("2v").is_err());
        assert!(parse("u v").is_err());
    }

    #[test]
    fn error_messages_name_the_token() {
        match parse("exp") {
            Err(ParseError::SyntaxError { msg, .. }) => assert!(msg.contains("exp")),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse("(u + v").is_err());
        assert!(parse("u + ").is_err());
        assert!(parse("").is_err());
    }

    // Strategy for round-trip testing: arbitrary expressions over u, v with
    // log restricted to arguments positive on the sampling domain.
    fn pos_leaf() -> impl Strategy<Value = Expr> {
        prop_oneof![
            Just(u()),
            Just(v()),
            (1i64..=6, 1i64..=6).prop_map(|(n, d)| Expr::frac(n, d)),
        ]
    }

    fn pos_expr() -> impl Strategy<Value = Expr> {
        pos_leaf().prop_recursive(2, 8, 2, |inner| {
            prop_oneof![
                proptest::collection::vec(inner.clone(), 2..=2).prop_map(Expr::sum),
                proptest::collection::vec(inner, 2..=2).prop_map(Expr::prod),
            ]
        })
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            Just(u()),
            Just(v()),
            (-20i64..=20, 1i64..=6).prop_map(|(n, d)| Expr::frac(n, d)),
        ];
        leaf.prop_recursive(3, 24, 3, |inner| {
            prop_oneof![
                proptest::collection::vec(inner.clone(), 2..=3).prop_map(Expr::sum),
                proptest::collection::vec(inner.clone(), 2..=3).prop_map(Expr::prod),
                (inner.clone(), prop_oneof![Just(-2), Just(-1), Just(2), Just(3)]).prop_map(
                    |(e, k)| {
                        if e.is_zero() && k < 0 {
                            Expr::one()
                        } else {
                            Expr::pow(e, k)
                        }
                    }
                ),
                inner.clone().prop_map(|e| Expr::fun(Fun::Exp, e)),
                inner.clone().prop_map(|e| Expr::fun(Fun::Sin, e)),
                inner.prop_map(|e| Expr::fun(Fun::Cos, e)),
                pos_expr().prop_map(|e| Expr::fun(Fun::Log, e)),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn print_parse_round_trip(e in arb_expr()) {
            let text = plain(&e);
            let back = parse(&text).unwrap_or_else(|err| {
                panic!("failed to reparse `{text}`: {err}")
            });
            prop_assert!(
                canonical_equal(&back, &e),
                "round trip changed `{}` into `{}`",
                text,
                plain(&back)
            );
        }
    }
}
