//! Recursive-descent parser for the expression language.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' exponent)?
//! base   := number | ident | ident '(' args ')' | '(' expr ')' | '-' factor
//! exponent := ['-'] integer | '(' ['-'] integer ['/' integer] ')'
//! ```
//!
//! `D(f, x, k)` is the derivative marker: on an opaque function application
//! it raises the derivative order in `x` by `k` (default 1); on a bare
//! symbol `q` it denotes the jet variable `d^k q / dx^k`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use super::expr::{ElemFn, Expr, FuncApp, JetVar, Rational, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownFunction,
    MalformedDerivative,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{} at column {column}: {message}", kind_label(*.kind))]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// 1-based character column.
    pub column: usize,
    pub message: String,
}

fn kind_label(k: ParseErrorKind) -> &'static str {
    match k {
        ParseErrorKind::Syntax => "syntax error",
        ParseErrorKind::UnknownFunction => "unknown function",
        ParseErrorKind::MalformedDerivative => "malformed derivative",
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let mut frac = String::new();
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    frac.push(chars[i]);
                    i += 1;
                }
            }
            let whole: String = chars[start..i].iter().take_while(|c| c.is_ascii_digit()).collect();
            let whole: BigInt = if whole.is_empty() { BigInt::zero() } else { whole.parse().unwrap() };
            let mut q = Rational::from_integer(whole);
            if !frac.is_empty() {
                let scale = BigInt::from(10).pow(frac.len() as u32);
                q += Rational::new(frac.parse::<BigInt>().unwrap(), scale);
            }
            out.push(Token { tok: Tok::Num(q), col });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                col,
            });
        } else if "+-*/^(),".contains(c) {
            out.push(Token { tok: Tok::Sym(c), col });
            i += 1;
        } else {
            return Err(ParseError {
                kind: ParseErrorKind::Syntax,
                column: col,
                message: format!("unexpected character '{c}'"),
            });
        }
    }
    out.push(Token {
        tok: Tok::End,
        col: chars.len() + 1,
    });
    Ok(out)
}

/// Configurable parser. The default accepts any `name(sym, ...)` as an
/// opaque function; with declared functions only those names are accepted,
/// with the declared arity and argument symbols.
#[derive(Clone, Debug, Default)]
pub struct Parser {
    functions: Option<BTreeMap<String, Vec<Symbol>>>,
}

impl Parser {
    pub fn new() -> Self {
        Self::default()
    }

    /// Restrict opaque functions to the declared ones.
    pub fn with_functions(mut self, decls: &[(String, Vec<Symbol>)]) -> Self {
        self.functions = Some(decls.iter().cloned().collect());
        self
    }

    pub fn parse(&self, text: &str) -> Result<Expr, ParseError> {
        let toks = lex(text)?;
        let mut st = State { toks, pos: 0, cfg: self };
        let e = st.expr()?;
        match st.peek() {
            Tok::End => Ok(e),
            t => Err(st.err(format!("unexpected {}", describe(t)))),
        }
    }
}

/// Parse with the default (permissive) configuration.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    Parser::new().parse(text)
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(q) => format!("number {q}"),
        Tok::Ident(s) => format!("identifier '{s}'"),
        Tok::Sym(c) => format!("'{c}'"),
        Tok::End => "end of input".into(),
    }
}

struct State<'a> {
    toks: Vec<Token>,
    pos: usize,
    cfg: &'a Parser,
}

impl State<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn col(&self) -> usize {
        self.toks[self.pos].col
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, message: String) -> ParseError {
        ParseError {
            kind: ParseErrorKind::Syntax,
            column: self.col(),
            message,
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}', found {}", describe(self.peek()))))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat('+') {
                terms.push(self.term()?);
            } else if self.eat('-') {
                terms.push(-self.term()?);
            } else {
                break;
            }
        }
        Ok(Expr::sum(terms))
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.factor()?];
        loop {
            if self.eat('*') {
                factors.push(self.factor()?);
            } else if self.eat('/') {
                factors.push(Expr::powi(self.factor()?, -1));
            } else {
                break;
            }
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Expr::product(factors)
        })
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let b = self.base()?;
        if self.eat('^') {
            let e = self.exponent()?;
            return Ok(Expr::pow(b, e));
        }
        Ok(b)
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        match self.peek().clone() {
            Tok::Num(q) if q.is_integer() => {
                self.bump();
                Ok(q.to_integer())
            }
            t => Err(self.err(format!("expected an integer, found {}", describe(&t)))),
        }
    }

    fn signed_integer(&mut self) -> Result<BigInt, ParseError> {
        let neg = self.eat('-');
        let n = self.integer()?;
        Ok(if neg { -n } else { n })
    }

    fn exponent(&mut self) -> Result<Rational, ParseError> {
        if self.eat('(') {
            let n = self.signed_integer()?;
            let mut q = Rational::from_integer(n);
            if self.eat('/') {
                let col = self.col();
                let d = self.integer()?;
                if d.is_zero() {
                    return Err(ParseError {
                        kind: ParseErrorKind::Syntax,
                        column: col,
                        message: "zero denominator in exponent".into(),
                    });
                }
                q /= Rational::from_integer(d);
            }
            self.expect(')')?;
            return Ok(q);
        }
        Ok(Rational::from_integer(self.signed_integer()?))
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let col = self.col();
        match self.peek().clone() {
            Tok::Num(q) => {
                self.bump();
                Ok(Expr::Num(q))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Sym('-') => {
                self.bump();
                Ok(-self.factor()?)
            }
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() != Tok::Sym('(') {
                    return Ok(Expr::sym(&name));
                }
                self.bump();
                if name == "D" {
                    return self.derivative(col);
                }
                if let Some(f) = ElemFn::from_name(&name) {
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return Ok(Expr::apply(f, arg));
                }
                self.opaque(&name, col)
            }
            t => Err(self.err(format!("expected an expression, found {}", describe(&t)))),
        }
    }

    fn symbol_list(&mut self) -> Result<Vec<Symbol>, ParseError> {
        let mut args = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Ident(a) => {
                    self.bump();
                    args.push(Symbol::new(&a));
                }
                t => return Err(self.err(format!("expected an argument symbol, found {}", describe(&t)))),
            }
            if !self.eat(',') {
                break;
            }
        }
        self.expect(')')?;
        Ok(args)
    }

    fn opaque(&mut self, name: &str, col: usize) -> Result<Expr, ParseError> {
        let args = self.symbol_list()?;
        if let Some(decls) = &self.cfg.functions {
            match decls.get(name) {
                None => {
                    return Err(ParseError {
                        kind: ParseErrorKind::UnknownFunction,
                        column: col,
                        message: format!("'{name}' is not a known function"),
                    })
                }
                Some(params) if *params != args => {
                    return Err(ParseError {
                        kind: ParseErrorKind::UnknownFunction,
                        column: col,
                        message: format!(
                            "'{name}' is declared with arguments ({}), used with ({})",
                            join(params),
                            join(&args)
                        ),
                    })
                }
                _ => {}
            }
        }
        Ok(Expr::Func(FuncApp {
            name: Symbol::new(name),
            orders: vec![0; args.len()],
            args,
        }))
    }

    fn derivative(&mut self, col: usize) -> Result<Expr, ParseError> {
        let malformed = |message: String| ParseError {
            kind: ParseErrorKind::MalformedDerivative,
            column: col,
            message,
        };
        let target = self.expr()?;
        self.expect(',')?;
        let var = match self.peek().clone() {
            Tok::Ident(v) => {
                self.bump();
                Symbol::new(&v)
            }
            t => return Err(malformed(format!("expected a variable, found {}", describe(&t)))),
        };
        let mut order = BigInt::one();
        if self.eat(',') {
            order = self.integer()?;
        }
        self.expect(')')?;
        let k = order
            .to_u32()
            .filter(|k| *k >= 1)
            .ok_or_else(|| malformed(format!("derivative order must be a positive integer, got {order}")))?;
        match target {
            Expr::Func(f) => f
                .derivative(&var, k)
                .map(Expr::Func)
                .ok_or_else(|| malformed(format!("{} does not depend on {var}", f.name))),
            Expr::Sym(q) => {
                if q == var {
                    return Err(malformed(format!("{q} cannot be differentiated with respect to itself")));
                }
                let order = u8::try_from(k).ok().filter(|k| *k <= 2).ok_or_else(|| {
                    malformed(format!("jet order {k} exceeds the supported maximum of 2"))
                })?;
                Ok(Expr::Jet(JetVar::new(&q, &var, order)))
            }
            Expr::Jet(j) if j.param == var => {
                let order = (j.order as u32 + k)
                    .try_into()
                    .ok()
                    .filter(|k: &u8| *k <= 2)
                    .ok_or_else(|| malformed("jet order exceeds the supported maximum of 2".into()))?;
                Ok(Expr::Jet(JetVar::new(&j.coord, &j.param, order)))
            }
            other => Err(malformed(format!(
                "D() applies to an opaque function or a coordinate, not {other}"
            ))),
        }
    }
}

fn join(s: &[Symbol]) -> String {
    s.iter().map(|x| x.name()).collect::<Vec<_>>().join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::int;

    #[test]
    fn metric_component_shape() {
        let e = parse_expr("-(1 - M(t)/r + Q(t)/r^2)").unwrap();
        let m = Expr::func("M", &["t"]);
        let q = Expr::func("Q", &["t"]);
        let r = Expr::sym("r");
        let want = Expr::product(vec![
            Expr::int(-1),
            Expr::sum(vec![
                Expr::one(),
                -(m * Expr::powi(r.clone(), -1)),
                q * Expr::powi(r, -2),
            ]),
        ]);
        assert_eq!(e, want);
    }

    #[test]
    fn power_of_function() {
        assert_eq!(
            parse_expr("sin(theta)^2").unwrap(),
            Expr::Pow(Box::new(Expr::sin(Expr::sym("theta"))), int(2))
        );
    }

    #[test]
    fn incomplete_input_reports_column() {
        let e = parse_expr("2*").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Syntax);
        assert_eq!(e.column, 3);
        let e = parse_expr("(1 + x").unwrap_err();
        assert_eq!(e.column, 7);
        let e = parse_expr("x $ y").unwrap_err();
        assert_eq!(e.column, 3);
    }

    #[test]
    fn exponents() {
        assert_eq!(parse_expr("x^-1").unwrap(), Expr::powi(Expr::sym("x"), -1));
        assert_eq!(
            parse_expr("x^(1/2)").unwrap(),
            Expr::Pow(Box::new(Expr::sym("x")), Rational::new(1.into(), 2.into()))
        );
        assert_eq!(parse_expr("-x^2").unwrap(), -Expr::powi(Expr::sym("x"), 2));
    }

    #[test]
    fn derivative_markers() {
        let e = parse_expr("D(M(t), t, 2)").unwrap();
        assert_eq!(
            e,
            Expr::Func(FuncApp {
                name: "M".into(),
                args: vec!["t".into()],
                orders: vec![2]
            })
        );
        assert_eq!(parse_expr("D(theta, s)").unwrap(), Expr::jet("theta", "s", 1));
        assert_eq!(parse_expr("D(D(r, s), s)").unwrap(), Expr::jet("r", "s", 2));
        let err = parse_expr("D(M(t), r)").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::MalformedDerivative);
        let err = parse_expr("D(x + y, s)").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::MalformedDerivative);
        let err = parse_expr("D(M(t), t, 0)").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::MalformedDerivative);
    }

    #[test]
    fn strict_mode_rejects_unknown_functions() {
        let p = Parser::new().with_functions(&[("M".into(), vec!["t".into()])]);
        assert!(p.parse("M(t)/r").is_ok());
        let e = p.parse("1 + F(t)").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownFunction);
        assert_eq!(e.column, 5);
        assert_eq!(p.parse("M(r)").unwrap_err().kind, ParseErrorKind::UnknownFunction);
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_expr("0.25").unwrap(), Expr::Num(Rational::new(1.into(), 4.into())));
    }
}
