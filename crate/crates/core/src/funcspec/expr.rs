//! Single-variable arithmetic expressions.
//!
//! Grammar (whitespace is ignored between tokens):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := factor (('*' | '/') factor)*
//! factor  := '-'? power
//! power   := primary ('^' factor)?
//! primary := number | 'x' | ident '(' expr ')' | '(' expr ')'
//! ident   := 'exp' | 'ln' | 'abs' | 'sqrt'
//! number  := digits ('.' digits?)? exponent? | '.' digits exponent?
//! exponent:= ('e' | 'E') ('+' | '-')? digits
//! ```
//!
//! `^` is right-associative and a leading minus applies to the whole power,
//! so `-x^2` is `-(x^2)` and `2^3^2` is `2^(3^2)`.

use std::fmt;

use crate::error::{Error, Result};

/// Nesting deeper than this is rejected instead of recursing further.
const MAX_NESTING: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Abs,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
        }
    }

    fn from_name(name: &[u8]) -> Option<Self> {
        match name {
            b"exp" => Some(Func::Exp),
            b"ln" => Some(Func::Ln),
            b"abs" => Some(Func::Abs),
            b"sqrt" => Some(Func::Sqrt),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        parse(src)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Var => x,
            Expr::Neg(e) => -e.eval(x)?,
            Expr::Binary(op, l, r) => {
                let l = l.eval(x)?;
                let r = r.eval(x)?;
                match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => {
                        if r == 0.0 {
                            return Err(Error::Eval(format!("division by zero at x = {x}")));
                        }
                        l / r
                    }
                    BinOp::Pow => l.powf(r),
                }
            }
            Expr::Call(f, e) => {
                let v = e.eval(x)?;
                match f {
                    Func::Exp => v.exp(),
                    Func::Ln => {
                        if v <= 0.0 {
                            return Err(Error::Eval(format!("ln of non-positive value {v} at x = {x}")));
                        }
                        v.ln()
                    }
                    Func::Abs => v.abs(),
                    Func::Sqrt => {
                        if v < 0.0 {
                            return Err(Error::Eval(format!("sqrt of negative value {v} at x = {x}")));
                        }
                        v.sqrt()
                    }
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Eval(format!("non-finite intermediate value at x = {x}")))
        }
    }
}

/// Prints every node as a primary, so the output reparses to the same tree
/// (up to negative constants, which come back as a negated literal).
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if c.is_sign_negative() => write!(f, "(-{})", -c),
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var => f.write_str("x"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Binary(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

/// Parses `src` into an expression tree. No partial results.
pub fn parse(src: &str) -> Result<Expr> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, depth: 0 };
    p.skip_ws();
    if p.at_end() {
        return Err(p.error("an expression"));
    }
    let e = p.expr()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.error("an operator or end of input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    depth: usize,
}

impl Parser<'_> {
    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &'static str) -> Error {
        Error::Syntax { position: self.pos, expected }
    }

    fn enter(&mut self) -> Result<()> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return Err(self.error("shallower nesting"));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr> {
        self.enter()?;
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat(b'+') {
                BinOp::Add
            } else if self.eat(b'-') {
                BinOp::Sub
            } else {
                break;
            };
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            let op = if self.eat(b'*') {
                BinOp::Mul
            } else if self.eat(b'/') {
                BinOp::Div
            } else {
                break;
            };
            let rhs = self.factor()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr> {
        self.enter()?;
        let e = if self.eat(b'-') {
            Expr::Neg(Box::new(self.power()?))
        } else {
            self.power()?
        };
        self.depth -= 1;
        Ok(e)
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.eat(b'^') {
            let exponent = self.factor()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
                    self.pos += 1;
                }
                let name = &self.src[start..self.pos];
                if name == b"x" {
                    return Ok(Expr::Var);
                }
                let Some(func) = Func::from_name(name) else {
                    self.pos = start;
                    return Err(self.error("'x' or a function name (exp, ln, abs, sqrt)"));
                };
                if !self.eat(b'(') {
                    return Err(self.error("'(' after function name"));
                }
                let arg = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("')'"));
                }
                Ok(Expr::Call(func, Box::new(arg)))
            }
            _ => Err(self.error("a number, 'x', a function call or '('")),
        }
    }

    fn digits(&mut self) -> usize {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.pos - start
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let int_digits = self.digits();
        let mut frac_digits = 0;
        if self.peek() == Some(b'.') {
            self.pos += 1;
            frac_digits = self.digits();
        }
        if int_digits + frac_digits == 0 {
            return Err(self.error("a digit"));
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.digits() == 0 {
                return Err(self.error("exponent digits"));
            }
        }
        // the slice is ASCII by construction
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii number");
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Expr::Const(v)),
            _ => {
                self.pos = start;
                Err(self.error("a finite number"))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(src: &str, x: f64) -> f64 {
        parse(src).unwrap().eval(x).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval("x^2", 3.0), 9.0);
        assert_eq!(eval("2^3^2", 0.0), 512.0);
        assert_eq!(eval("-x^2", 2.0), -4.0);
        assert_eq!(eval("1 - 2 - 3", 0.0), -4.0);
        assert_eq!(eval("8 / 4 / 2", 0.0), 1.0);
        assert_eq!(eval("1 + 2 * 3", 0.0), 7.0);
        assert_eq!(eval("2^-1", 0.0), 0.5);
        assert_eq!(eval("(1 + 2) * 3", 0.0), 9.0);
    }

    #[test]
    fn functions_and_numbers() {
        assert!((eval("ln(exp(x))", 0.37) - 0.37).abs() <= 1e-15);
        assert!((eval("x^(-0.5)", 0.89) - 1.0600).abs() < 1e-4);
        assert_eq!(eval("abs(0-x)", 0.2), 0.2);
        assert_eq!(eval("sqrt(x)", 0.25), 0.5);
        assert_eq!(eval("1.5e2 + .5 + 2.", 0.0), 152.5);
        assert_eq!(eval("1E-1", 0.0), 0.1);
    }

    #[test]
    fn syntax_errors_name_position() {
        let cases: [(&str, usize); 8] = [
            ("", 0),
            ("x +", 3),
            ("(x", 2),
            ("foo(x)", 0),
            ("x x", 2),
            ("sqrt x", 5),
            ("1e", 2),
            ("--x", 1),
        ];
        for (src, pos) in cases {
            match parse(src) {
                Err(Error::Syntax { position, .. }) => assert_eq!(position, pos, "{src:?}"),
                other => panic!("{src:?} gave {other:?}"),
            }
        }
        assert!(parse("1e999").is_err());
        assert!(parse("2x").is_err());
        assert!(parse("0x1F").is_err());
    }

    #[test]
    fn eval_errors() {
        assert!(matches!(parse("ln(x)").unwrap().eval(0.0), Err(Error::Eval(_))));
        assert!(matches!(parse("1/x").unwrap().eval(0.0), Err(Error::Eval(_))));
        assert!(matches!(parse("sqrt(x)").unwrap().eval(-1.0), Err(Error::Eval(_))));
        assert!(matches!(parse("exp(x)").unwrap().eval(1000.0), Err(Error::Eval(_))));
        assert!(matches!(parse("x^0.5").unwrap().eval(-1.0), Err(Error::Eval(_))));
    }

    #[test]
    fn deep_nesting_is_rejected_not_overflowed() {
        let src = "(".repeat(10_000) + "x" + &")".repeat(10_000);
        assert!(matches!(parse(&src), Err(Error::Syntax { .. })));
        let src = "-".repeat(10_000) + "x";
        assert!(parse(&src).is_err());
        let src = "2^".repeat(10_000) + "x";
        assert!(parse(&src).is_err());
    }

    #[test]
    fn display_reparses() {
        let e = parse("-x^2 + 3*exp(-x)/(1 - x)").unwrap();
        let again = parse(&e.to_string()).unwrap();
        assert_eq!(e, again);
        let c = Expr::Binary(BinOp::Mul, Box::new(Expr::Const(-2.5e-7)), Box::new(Expr::Var));
        assert_eq!(parse(&c.to_string()).unwrap().eval(3.0).unwrap(), c.eval(3.0).unwrap());
    }
}
