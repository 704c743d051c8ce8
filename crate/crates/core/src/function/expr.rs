//! Expression syntax for integrands.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := atom ('^' unary)?          right associative, integer exponent
//! atom    := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! Identifiers: `z`, `I` (or `dxdy`) for the unit 2-form, `pi`, the calls
//! `exp`, `sin`, `cos`, and any caller-bound constant such as `t`. The
//! symbol `x` is accepted (and read as `z`) only for real-line integrands;
//! `x` and `y` as independent coordinates only in plane mode.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::clifford::EvenElement;
use crate::series::EntireKind;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error(
        "non-integer exponent at position {pos}: fractional powers are multivalued, \
         they do not return to their starting value around a circle; use integer exponents"
    )]
    FractionalPower { pos: usize },
    #[error("exponent at position {pos} must be an integer literal, not an expression in z")]
    SymbolicExponent { pos: usize },
    #[error("unknown symbol `{name}` at position {pos}")]
    UnknownSymbol { name: String, pos: usize },
    #[error("symbol `{name}` at position {pos} is not allowed here: {why}")]
    SymbolNotAllowed {
        name: String,
        pos: usize,
        why: &'static str,
    },
    #[error("empty expression")]
    Empty,
}

/// Which coordinate symbols an expression may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Functions of `z` only.
    #[default]
    Contour,
    /// Real-line integrands: `x` is read as `z`.
    RealLine,
    /// Real functions of `(x, y)`, e.g. components of a 1-form.
    Plane,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// The unit 2-form `dxdy`.
    Unit,
    Z,
    X,
    Y,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(EntireKind, Box<Expr>),
}

impl Expr {
    /// Evaluates at the point `(x, y)`, with `z = x + y·dxdy`.
    pub fn eval_xy(&self, x: f64, y: f64) -> EvenElement {
        self.eval_with(EvenElement::new(x, y), x, y)
    }

    /// Evaluates a `z`-only expression at `z`.
    pub fn eval(&self, z: EvenElement) -> EvenElement {
        self.eval_with(z, z.u, z.v)
    }

    fn eval_with(&self, z: EvenElement, x: f64, y: f64) -> EvenElement {
        match self {
            Expr::Num(c) => EvenElement::real(*c),
            Expr::Unit => EvenElement::I,
            Expr::Z => z,
            Expr::X => EvenElement::real(x),
            Expr::Y => EvenElement::real(y),
            Expr::Neg(a) => -a.eval_with(z, x, y),
            Expr::Add(a, b) => a.eval_with(z, x, y) + b.eval_with(z, x, y),
            Expr::Sub(a, b) => a.eval_with(z, x, y) - b.eval_with(z, x, y),
            Expr::Mul(a, b) => a.eval_with(z, x, y) * b.eval_with(z, x, y),
            Expr::Div(a, b) => a.eval_with(z, x, y) / b.eval_with(z, x, y),
            Expr::Pow(a, n) => a
                .eval_with(z, x, y)
                .powi(*n)
                .unwrap_or(EvenElement::new(f64::INFINITY, f64::INFINITY)),
            Expr::Call(k, a) => k.eval(a.eval_with(z, x, y)),
        }
    }

    /// Folds to a constant if the expression mentions no coordinate.
    pub fn constant_value(&self) -> Option<EvenElement> {
        if self.mentions_coordinates() {
            None
        } else {
            Some(self.eval(EvenElement::ZERO))
        }
    }

    pub fn mentions_coordinates(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Unit => false,
            Expr::Z | Expr::X | Expr::Y => true,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.mentions_coordinates(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.mentions_coordinates() || b.mentions_coordinates()
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &Expr, min: u8| {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            Expr::Num(c) => write!(f, "{c}"),
            Expr::Unit => f.write_str("I"),
            Expr::Z => f.write_str("z"),
            Expr::X => f.write_str("x"),
            Expr::Y => f.write_str("y"),
            Expr::Neg(a) => {
                f.write_str("-")?;
                wrap(f, a, 3)
            }
            Expr::Add(a, b) => {
                wrap(f, a, 1)?;
                f.write_str(" + ")?;
                wrap(f, b, 2)
            }
            Expr::Sub(a, b) => {
                wrap(f, a, 1)?;
                f.write_str(" - ")?;
                wrap(f, b, 2)
            }
            Expr::Mul(a, b) => {
                wrap(f, a, 2)?;
                f.write_str("*")?;
                wrap(f, b, 3)
            }
            Expr::Div(a, b) => {
                wrap(f, a, 2)?;
                f.write_str("/")?;
                wrap(f, b, 3)
            }
            Expr::Pow(a, n) => {
                wrap(f, a, 5)?;
                if *n < 0 {
                    write!(f, "^({n})")
                } else {
                    write!(f, "^{n}")
                }
            }
            Expr::Call(k, a) => write!(f, "{k}({a})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '.') {
                i += 1;
            }
            // exponent part: 1e-3, 2.5E+4
            if i < chars.len() && matches!(chars[i].1, 'e' | 'E') {
                let mut j = i + 1;
                if j < chars.len() && matches!(chars[j].1, '+' | '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].1.is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].1.is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let end = chars.get(i).map_or(text.len(), |c| c.0);
            let lit = &text[pos..end];
            let value = lit.parse::<f64>().map_err(|_| ParseError::Syntax {
                pos,
                msg: format!("malformed number `{lit}`"),
            })?;
            out.push((Tok::Num(value), pos));
        } else if c.is_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            let end = chars.get(i).map_or(text.len(), |c| c.0);
            out.push((Tok::Ident(text[pos..end].to_string()), pos));
        } else {
            let tok = match c {
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                other => {
                    return Err(ParseError::Syntax {
                        pos,
                        msg: format!("unexpected character `{other}`"),
                    })
                }
            };
            out.push((tok, pos));
            i += 1;
        }
    }
    Ok(out)
}

/// Parser configuration: coordinate mode plus named real constants.
#[derive(Debug, Clone, Default)]
pub struct Parser {
    pub mode: Mode,
    pub bindings: HashMap<String, f64>,
}

impl Parser {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            bindings: HashMap::new(),
        }
    }

    pub fn bind(mut self, name: impl Into<String>, value: f64) -> Self {
        self.bindings.insert(name.into(), value);
        self
    }

    pub fn parse(&self, text: &str) -> Result<Expr, ParseError> {
        let toks = lex(text)?;
        if toks.is_empty() {
            return Err(ParseError::Empty);
        }
        let mut st = State {
            toks,
            i: 0,
            end: text.len(),
            cfg: self,
        };
        let e = st.expr()?;
        if let Some((t, pos)) = st.toks.get(st.i) {
            return Err(ParseError::Syntax {
                pos: *pos,
                msg: format!("unexpected {}", describe(t)),
            });
        }
        Ok(e)
    }
}

/// Parses a `z`-only expression with no bindings.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    Parser::new(Mode::Contour).parse(text)
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Op(c) => format!("`{c}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
    }
}

struct State<'a> {
    toks: Vec<(Tok, usize)>,
    i: usize,
    end: usize,
    cfg: &'a Parser,
}

impl State<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.0)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map_or(self.end, |t| t.1)
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == want => {
                self.i += 1;
                Ok(())
            }
            Some(t) => Err(ParseError::Syntax {
                pos: self.pos(),
                msg: format!("expected {}, found {}", describe(&want), describe(t)),
            }),
            None => Err(ParseError::Syntax {
                pos: self.end,
                msg: format!("expected {}, found end of input", describe(&want)),
            }),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek() {
            let c = *c;
            self.i += 1;
            let rhs = self.term()?;
            lhs = if c == '+' {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek() {
            let c = *c;
            self.i += 1;
            let rhs = self.unary()?;
            lhs = if c == '*' {
                Expr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.i += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(Tok::Op('+')) => {
                self.i += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.i += 1;
            let pos = self.pos();
            let exponent = self.unary()?;
            let value = exponent.constant_value().ok_or(ParseError::SymbolicExponent { pos })?;
            if value.v != 0.0 {
                return Err(ParseError::Syntax {
                    pos,
                    msg: "exponent must be real".into(),
                });
            }
            let n = value.u;
            if !n.is_finite() || n.fract() != 0.0 {
                return Err(ParseError::FractionalPower { pos });
            }
            if n.abs() > 4096.0 {
                return Err(ParseError::Syntax {
                    pos,
                    msg: format!("exponent {n} is too large"),
                });
            }
            return Ok(Expr::Pow(Box::new(base), n as i32));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        let Some((tok, _)) = self.toks.get(self.i).cloned() else {
            return Err(ParseError::Syntax {
                pos,
                msg: "unexpected end of input".into(),
            });
        };
        self.i += 1;
        match tok {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => self.ident(name, pos),
            other => Err(ParseError::Syntax {
                pos,
                msg: format!("unexpected {}", describe(&other)),
            }),
        }
    }

    fn ident(&mut self, name: String, pos: usize) -> Result<Expr, ParseError> {
        if let Ok(kind) = name.parse::<EntireKind>() {
            self.expect(Tok::LParen)?;
            let arg = self.expr()?;
            self.expect(Tok::RParen)?;
            return Ok(Expr::Call(kind, Box::new(arg)));
        }
        let mode = self.cfg.mode;
        match name.as_str() {
            "z" => Ok(Expr::Z),
            "I" | "dxdy" => Ok(Expr::Unit),
            "pi" => Ok(Expr::Num(std::f64::consts::PI)),
            "x" => match mode {
                Mode::RealLine => Ok(Expr::Z),
                Mode::Plane => Ok(Expr::X),
                Mode::Contour => Err(ParseError::SymbolNotAllowed {
                    name,
                    pos,
                    why: "contour integrands are functions of z alone; x is only read as z for real-line integrals",
                }),
            },
            "y" => match mode {
                Mode::Plane => Ok(Expr::Y),
                _ => Err(ParseError::SymbolNotAllowed {
                    name,
                    pos,
                    why: "integrands are functions of z alone, not of z and its conjugate",
                }),
            },
            _ => match self.cfg.bindings.get(&name) {
                Some(v) => Ok(Expr::Num(*v)),
                None => Err(ParseError::UnknownSymbol { name, pos }),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(e: Expr) -> Box<Expr> {
        Box::new(e)
    }

    #[test]
    fn parses_squared_quadratic() {
        let e = parse("1/(z^2+1)^2").unwrap();
        let want = Expr::Div(
            b(Expr::Num(1.0)),
            b(Expr::Pow(
                b(Expr::Add(b(Expr::Pow(b(Expr::Z), 2)), b(Expr::Num(1.0)))),
                2,
            )),
        );
        assert_eq!(e, want);
    }

    #[test]
    fn precedence_and_unary_minus() {
        let e = parse("-z^2").unwrap();
        assert_eq!(e, Expr::Neg(b(Expr::Pow(b(Expr::Z), 2))));
        let e = parse("2*z^-1").unwrap();
        assert_eq!(e, Expr::Mul(b(Expr::Num(2.0)), b(Expr::Pow(b(Expr::Z), -1))));
        let e = parse("1-2-3").unwrap();
        assert_eq!(e.eval(EvenElement::ZERO), EvenElement::real(-4.0));
        let e = parse("2^3^2").unwrap();
        assert_eq!(e.eval(EvenElement::ZERO), EvenElement::real(512.0));
    }

    #[test]
    fn bindings_and_calls() {
        let p = Parser::new(Mode::Contour).bind("t", 1.0);
        let e = p.parse("exp(I*t*z)/(z^2+1)").unwrap();
        let v = e.eval(EvenElement::new(0.3, 0.2));
        let want = (EvenElement::I * EvenElement::new(0.3, 0.2)).exp()
            / (EvenElement::new(0.3, 0.2) * EvenElement::new(0.3, 0.2) + EvenElement::ONE);
        assert!((v - want).abs() < 1e-15);
    }

    #[test]
    fn fractional_powers_are_rejected() {
        let err = parse("z^(1/2)").unwrap_err();
        assert!(matches!(err, ParseError::FractionalPower { pos: 2 }));
        assert!(err.to_string().contains("circle"));
        assert!(matches!(parse("z^0.5"), Err(ParseError::FractionalPower { .. })));
        assert!(matches!(parse("z^z"), Err(ParseError::SymbolicExponent { .. })));
        assert_eq!(parse("z^(4/2)").unwrap(), Expr::Pow(b(Expr::Z), 2));
    }

    #[test]
    fn symbol_modes() {
        assert!(matches!(parse("x"), Err(ParseError::SymbolNotAllowed { .. })));
        assert!(matches!(parse("y+z"), Err(ParseError::SymbolNotAllowed { .. })));
        assert_eq!(Parser::new(Mode::RealLine).parse("x").unwrap(), Expr::Z);
        assert_eq!(
            Parser::new(Mode::Plane).parse("x*y").unwrap().eval_xy(2.0, 3.0),
            EvenElement::real(6.0)
        );
        assert!(matches!(parse("q"), Err(ParseError::UnknownSymbol { .. })));
        assert_eq!(
            parse("Z"),
            Err(ParseError::UnknownSymbol {
                name: "Z".into(),
                pos: 0
            })
        );
    }

    #[test]
    fn syntax_errors_report_positions() {
        assert_eq!(
            parse("1 + "),
            Err(ParseError::Syntax {
                pos: 4,
                msg: "unexpected end of input".into()
            })
        );
        assert!(matches!(parse("(z"), Err(ParseError::Syntax { pos: 2, .. })));
        assert!(matches!(parse("z $ 2"), Err(ParseError::Syntax { pos: 2, .. })));
        assert!(matches!(parse("z z"), Err(ParseError::Syntax { pos: 2, .. })));
        assert_eq!(parse("   "), Err(ParseError::Empty));
    }

    #[test]
    fn numbers_and_pi() {
        assert_eq!(parse("1.5e-3").unwrap(), Expr::Num(1.5e-3));
        let e = parse("1/(z*(z-pi))").unwrap();
        assert!(!e.eval(EvenElement::real(std::f64::consts::PI)).is_finite());
    }

    #[test]
    fn display_reparses() {
        for s in ["1/(z^2+1)^2", "-(z-1)*exp(2*I*z)", "z^(-3)*sin(z)", "(1+I)/(z-2)-3"] {
            let e = parse(s).unwrap();
            assert_eq!(parse(&e.to_string()).unwrap(), e, "{s} -> {e}");
        }
    }
}
