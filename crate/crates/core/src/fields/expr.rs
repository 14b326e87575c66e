use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::constant::Const;
use super::poly::{Field, Poly};
use super::ratfunc::RatFunc;
use super::FieldError;

/// Arithmetic expression over named symbols and integers.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Int(BigInt),
    Sym(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

impl Expr {
    /// Evaluate in any field, resolving symbols through `lookup`.
    pub fn eval<T: Field>(&self, lookup: &dyn Fn(&str) -> Option<T>) -> Result<T, FieldError> {
        Ok(match self {
            Expr::Int(n) => T::from_rational(&BigRational::from_integer(n.clone())),
            Expr::Sym(s) => lookup(s).ok_or_else(|| FieldError::UnknownSymbol(s.clone()))?,
            Expr::Neg(a) => a.eval(lookup)?.negate(),
            Expr::Add(a, b) => a.eval(lookup)?.plus(&b.eval(lookup)?),
            Expr::Sub(a, b) => a.eval(lookup)?.minus(&b.eval(lookup)?),
            Expr::Mul(a, b) => a.eval(lookup)?.times(&b.eval(lookup)?),
            Expr::Div(a, b) => a.eval(lookup)?.divide(&b.eval(lookup)?)?,
            Expr::Pow(a, e) => {
                let base = a.eval(lookup)?;
                let p = base.pow(e.unsigned_abs() as u32);
                if *e < 0 {
                    p.inverse()?
                } else {
                    p
                }
            }
        })
    }

    /// All symbol names, in order of first appearance.
    pub fn symbols(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut Vec<String>) {
        match self {
            Expr::Int(_) => {}
            Expr::Sym(s) => {
                if !out.contains(s) {
                    out.push(s.clone());
                }
            }
            Expr::Neg(a) | Expr::Pow(a, _) => a.collect(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect(out);
                b.collect(out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>, String> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            out.push(Tok::Int(digits.parse().map_err(|_| format!("bad integer {digits}"))?));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if c == '*' && chars.get(i + 1) == Some(&'*') {
            out.push(Tok::Op('^'));
            i += 2;
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(format!("unexpected character `{c}`"));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, String> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, String> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, String> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, String> {
        let base = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            let e = match self.toks.get(self.pos) {
                Some(Tok::Int(n)) => i64::try_from(n).map_err(|_| "exponent too large".to_string())?,
                _ => return Err("expected an integer exponent".into()),
            };
            self.pos += 1;
            return Ok(Expr::Pow(Box::new(base), if neg { -e } else { e }));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, String> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Expr::Int(n))
            }
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(Expr::Sym(s))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err("missing `)`".into());
                }
                Ok(e)
            }
            Some(t) => Err(format!("unexpected token {t:?}")),
            None => Err("unexpected end of input".into()),
        }
    }
}

pub fn parse_expr(s: &str) -> Result<Expr, FieldError> {
    let err = |message: String| FieldError::Parse { input: s.to_string(), message };
    let toks = tokenize(s).map_err(err)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr().map_err(err)?;
    if p.pos != p.toks.len() {
        return Err(err(format!("trailing input at token {}", p.pos)));
    }
    Ok(e)
}

/// Coefficients that can be printed inside polynomial strings.
pub trait Coefficient: Field + fmt::Display {
    /// True if the printed form is a sum and needs parentheses as a factor.
    fn needs_parens(&self) -> bool;
}

impl Coefficient for BigRational {
    fn needs_parens(&self) -> bool {
        false
    }
}

impl Coefficient for Const {
    fn needs_parens(&self) -> bool {
        self.is_sum()
    }
}

/// Reparsable string for a polynomial in `var`.
pub fn format_poly<T: Coefficient>(p: &Poly<T>, var: &str) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let nz = p.coeffs().iter().filter(|c| !c.is_zero()).count();
    let mut terms = Vec::new();
    for (j, c) in p.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mono = match j {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{j}"),
        };
        let t = if mono.is_empty() {
            if c.needs_parens() && nz > 1 {
                format!("({c})")
            } else {
                c.to_string()
            }
        } else if c.is_one() {
            mono
        } else if c.negate().is_one() {
            format!("-{mono}")
        } else if c.needs_parens() {
            format!("({c})*{mono}")
        } else {
            format!("{c}*{mono}")
        };
        terms.push(t);
    }
    let mut out = String::new();
    for (k, t) in terms.iter().enumerate() {
        if k == 0 {
            out.push_str(t);
        } else if let Some(rest) = t.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(t);
        }
    }
    out
}

/// Reparsable string for a rational function in `var`.
pub fn format_ratfunc<T: Coefficient>(r: &RatFunc<T>, var: &str) -> String {
    let num = format_poly(r.num(), var);
    if r.den().is_one() {
        return num;
    }
    let den = format_poly(r.den(), var);
    let den = if r.den().is_monomial() { den } else { format!("({den})") };
    let single = r.num().coeffs().iter().filter(|c| !c.is_zero()).count() == 1;
    let bare = single && !(r.num().is_constant() && r.num().lc().needs_parens());
    if bare {
        format!("{num}/{den}")
    } else {
        format!("({num})/{den}")
    }
}

impl<T: Coefficient> fmt::Display for RatFunc<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_ratfunc(self, "x"))
    }
}

impl<T: Coefficient> fmt::Display for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_poly(self, "x"))
    }
}
