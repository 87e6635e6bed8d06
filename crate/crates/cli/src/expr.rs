//! Arithmetic expressions for ring elements, e.g. `x + pi`, `7*w - 3/2`,
//! `(u^2 - 7)^2`. Integers are exact; `/` is exact division.

use std::fmt;
use std::sync::Arc;

use hodge_inertia::arith::{KElem, RingConfig, STrunc, TildePoly, Witt};
use hodge_inertia::ring::Ring;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Int(i128),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "column {}: {}", self.column, self.message)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(i128),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let n = text.parse().map_err(|_| ParseError {
                column: col,
                message: format!("integer {text} is too large"),
            })?;
            out.push((col, Tok::Int(n)));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((col, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((col, Tok::Op(c)));
            i += 1;
        } else {
            return Err(ParseError {
                column: col,
                message: format!("unexpected character '{c}'"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn column(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(c, _)| *c)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            column: self.column(),
            message: message.into(),
        })
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.product()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.product()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.product()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else if matches!(self.peek(), Some(Tok::Ident(_)) | Some(Tok::Op('('))) {
                // juxtaposition: 3pi, 2(x + 1)
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.power()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            match self.peek().cloned() {
                Some(Tok::Int(n)) => {
                    self.pos += 1;
                    let k = i64::try_from(n).or_else(|_| self.err("exponent too large"))?;
                    return Ok(Expr::Pow(Box::new(base), if neg { -k } else { k }));
                }
                _ => return self.err("expected an integer exponent"),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Expr::Int(n))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Ok(Expr::Var(name))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let inner = self.sum()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                Ok(inner)
            }
            Some(Tok::Op(c)) => self.err(format!("unexpected '{c}'")),
            None => self.err("unexpected end of expression"),
        }
    }
}

pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: src.chars().count() + 1,
    };
    let e = p.sum()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// A ring an expression can be evaluated in.
pub trait Target: Ring {
    fn int(ctx: &Arc<RingConfig>, n: i128) -> Result<Self, String>;
    fn var(ctx: &Arc<RingConfig>, name: &str) -> Result<Self, String>;
    fn divide(&self, other: &Self) -> Result<Self, String>;
}

/// Names shared by every target: `x` is the Teichmüller lift of the
/// chosen generator of F_q, `w` the generator ω of W(F_q) over Z_p.
fn witt_var(ctx: &Arc<RingConfig>, name: &str) -> Option<Witt> {
    match name {
        "x" => Some(ctx.witt().teichmuller(&ctx.witt().fq_generator())),
        "w" | "ω" => Some(ctx.witt().omega()),
        "p" => Some(ctx.w_int(ctx.p())),
        _ => None,
    }
}

impl Target for Witt {
    fn int(ctx: &Arc<RingConfig>, n: i128) -> Result<Self, String> {
        Ok(ctx.witt().from_int(n))
    }
    fn var(ctx: &Arc<RingConfig>, name: &str) -> Result<Self, String> {
        witt_var(ctx, name).ok_or_else(|| format!("unknown name '{name}' (expected x, w, p)"))
    }
    fn divide(&self, other: &Self) -> Result<Self, String> {
        self.div(other).map_err(|e| e.to_string())
    }
}

impl Target for KElem {
    fn int(ctx: &Arc<RingConfig>, n: i128) -> Result<Self, String> {
        Ok(KElem::from_witt(ctx, ctx.witt().from_int(n)))
    }
    fn var(ctx: &Arc<RingConfig>, name: &str) -> Result<Self, String> {
        match name {
            "pi" | "π" => Ok(KElem::pi(ctx)),
            _ => witt_var(ctx, name)
                .map(|w| KElem::from_witt(ctx, w))
                .ok_or_else(|| format!("unknown name '{name}' (expected pi, x, w, p)")),
        }
    }
    fn divide(&self, other: &Self) -> Result<Self, String> {
        self.div(other).map_err(|e| e.to_string())
    }
}

impl Target for STrunc {
    fn int(ctx: &Arc<RingConfig>, n: i128) -> Result<Self, String> {
        Ok(STrunc::constant(ctx, ctx.witt().from_int(n)))
    }
    fn var(ctx: &Arc<RingConfig>, name: &str) -> Result<Self, String> {
        match name {
            "u" => Ok(STrunc::u(ctx)),
            "E" => Ok(STrunc::eisenstein(ctx)),
            _ => witt_var(ctx, name)
                .map(|w| STrunc::constant(ctx, w))
                .ok_or_else(|| format!("unknown name '{name}' (expected u, E, x, w, p)")),
        }
    }
    fn divide(&self, other: &Self) -> Result<Self, String> {
        let inv = other.unit_inverse().map_err(|e| e.to_string())?;
        Ok(self.mul(&inv))
    }
}

impl Target for TildePoly {
    fn int(ctx: &Arc<RingConfig>, n: i128) -> Result<Self, String> {
        let r = n.rem_euclid(ctx.p() as i128) as i64;
        Ok(TildePoly::from_int(ctx, r))
    }
    fn var(ctx: &Arc<RingConfig>, name: &str) -> Result<Self, String> {
        match name {
            "u" => Ok(TildePoly::u_pow(ctx, 1)),
            "x" => Ok(TildePoly::constant(ctx, ctx.witt().fq_generator())),
            "w" | "ω" => {
                let w = ctx.witt().omega().reduce().map_err(|e| e.to_string())?;
                Ok(TildePoly::constant(ctx, w))
            }
            _ => Err(format!("unknown name '{name}' (expected u, x, w)")),
        }
    }
    fn divide(&self, other: &Self) -> Result<Self, String> {
        Ok(self.mul(&other.inv().map_err(|e| e.to_string())?))
    }
}

pub fn eval<T: Target>(ctx: &Arc<RingConfig>, e: &Expr) -> Result<T, String> {
    Ok(match e {
        Expr::Int(n) => T::int(ctx, *n)?,
        Expr::Var(name) => T::var(ctx, name)?,
        Expr::Neg(a) => eval::<T>(ctx, a)?.neg(),
        Expr::Add(a, b) => eval::<T>(ctx, a)?.add(&eval(ctx, b)?),
        Expr::Sub(a, b) => eval::<T>(ctx, a)?.sub(&eval(ctx, b)?),
        Expr::Mul(a, b) => eval::<T>(ctx, a)?.mul(&eval(ctx, b)?),
        Expr::Div(a, b) => eval::<T>(ctx, a)?.divide(&eval(ctx, b)?)?,
        Expr::Pow(a, k) => {
            let base = eval::<T>(ctx, a)?;
            if *k >= 0 {
                base.pow(*k as u64)
            } else {
                base.one_like().divide(&base.pow(k.unsigned_abs()))?
            }
        }
    })
}

/// Parses and evaluates `src`, prefixing errors with `field`.
pub fn value<T: Target>(ctx: &Arc<RingConfig>, field: &str, src: &str) -> anyhow::Result<T> {
    let e = parse(src).map_err(|err| anyhow::anyhow!("{field}: {err} in \"{src}\""))?;
    eval(ctx, &e).map_err(|err| anyhow::anyhow!("{field}: {err} in \"{src}\""))
}

#[cfg(test)]
mod tests {
    use super::*;
    use hodge_inertia::arith::RingParams;

    fn ctx() -> Arc<RingConfig> {
        RingConfig::new(&RingParams::new(7, 2, 2, 2).with_prec(7)).unwrap()
    }

    #[test]
    fn precedence() {
        let e = parse("1 + 2*3^2 - -4").unwrap();
        let ctx = ctx();
        let v: Witt = eval(&ctx, &e).unwrap();
        assert!(v.eq_at_prec(&ctx.w_int(23)));
    }

    #[test]
    fn uniformizer_relations() {
        let ctx = ctx();
        let sq: KElem = value(&ctx, "L", "pi^2").unwrap();
        assert!(sq.eq_at_prec(&KElem::from_int(&ctx, 7)));
        let half: KElem = value(&ctx, "L", "7/(2pi)").unwrap();
        assert!(half.mul(&KElem::from_int(&ctx, 2)).eq_at_prec(&KElem::pi(&ctx)));
        let inv: KElem = value(&ctx, "L", "pi^-1 * pi").unwrap();
        assert!(inv.eq_at_prec(&KElem::from_int(&ctx, 1)));
    }

    #[test]
    fn truncated_ring() {
        let ctx = ctx();
        let e: STrunc = value(&ctx, "A", "u^2 - 7").unwrap();
        assert!(e.eq_at_prec(&STrunc::eisenstein(&ctx)));
        let t: TildePoly = value(&ctx, "A", "8 + u").unwrap();
        assert_eq!(t, TildePoly::from_int(&ctx, 1).add(&TildePoly::u_pow(&ctx, 1)));
    }

    #[test]
    fn diagnostics() {
        assert_eq!(parse("1 + ").unwrap_err().column, 5);
        assert_eq!(parse("1 $ 2").unwrap_err().column, 3);
        assert!(parse("(1 + 2").is_err());
        assert!(parse("x^y").is_err());
        let ctx = ctx();
        let err = value::<KElem>(&ctx, "family.L", "q + 1").unwrap_err().to_string();
        assert!(err.starts_with("family.L: unknown name 'q'"), "{err}");
    }
}
