//! Small expression language for real constants.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' ['-'] integer)?
//! atom    := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Names: `gamma`, `delta`, `sqrt2`, `log2`. Functions: `log(x)`,
//! `sqrt(x)`, `phi(k)`, `f(k)` (the Binet coefficient at `φ(k)`),
//! `F(k, n)`, `B(l)`, `C(l)`. Integer arguments must be exact.
//!
//! ```
//! use kfib_balance::expr::parse;
//! let tau = parse("log(gamma)/log(phi(3))").unwrap();
//! assert_eq!(tau.at(128).unwrap().to_decimal(6), "2.892700");
//! ```

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numerics::{
    dominant_root, f_k_at_root, ln2, log, parse_decimal, AlgebraicConstants, ApproxReal,
    PrecisionContext,
};
use crate::reduction::Refinable;
use crate::sequences::{balancing, kfib, lucas_balancing};

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Num(BigInt, BigInt),
    Name(String),
    Call(String, Vec<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Neg(Box<Node>),
    Pow(Box<Node>, i64),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Sym(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.') {
                i += 1;
            }
            if i < cs.len() && (cs[i] == 'e' || cs[i] == 'E') {
                let save = i;
                i += 1;
                if i < cs.len() && (cs[i] == '-' || cs[i] == '+') {
                    i += 1;
                }
                if i < cs.len() && cs[i].is_ascii_digit() {
                    while i < cs.len() && cs[i].is_ascii_digit() {
                        i += 1;
                    }
                } else {
                    i = save;
                }
            }
            out.push(Tok::Num(cs[st..i].iter().collect()));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*/^(),".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?} in {s:?}")));
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

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(Error::Parse(format!(
                "expected {c:?} at token {}",
                self.pos
            )))
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat('-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let neg = self.eat('-');
        let e = match self.toks.get(self.pos) {
            Some(Tok::Num(s)) => s
                .parse::<i64>()
                .map_err(|_| Error::Parse(format!("exponent must be an integer, got {s}")))?,
            _ => return Err(Error::Parse("missing exponent".into())),
        };
        self.pos += 1;
        Ok(Node::Pow(Box::new(base), if neg { -e } else { e }))
    }

    fn atom(&mut self) -> Result<Node> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(s)) => {
                self.pos += 1;
                let (n, d) = parse_decimal(&s)?;
                Ok(Node::Num(n, d))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if self.eat('(') {
                    let mut args = vec![self.expr()?];
                    while self.eat(',') {
                        args.push(self.expr()?);
                    }
                    self.expect(')')?;
                    Ok(Node::Call(name, args))
                } else {
                    Ok(Node::Name(name))
                }
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

fn reduce_frac(n: BigInt, d: BigInt) -> Result<(BigInt, BigInt)> {
    if d.is_zero() {
        return Err(Error::domain("division by zero"));
    }
    let (n, d) = if d.is_negative() { (-n, -d) } else { (n, d) };
    let g = n.gcd(&d);
    Ok((&n / &g, &d / &g))
}

fn int_arg(node: &Node, what: &str) -> Result<BigInt> {
    match exact(node)? {
        Some((n, d)) if d.is_one() => Ok(n),
        _ => Err(Error::Parse(format!(
            "{what} needs an exact integer argument"
        ))),
    }
}

fn small_arg(node: &Node, what: &str) -> Result<u32> {
    int_arg(node, what)?
        .to_u32()
        .ok_or_else(|| Error::Parse(format!("{what} argument out of range")))
}

fn arity(name: &str, args: &[Node], n: usize) -> Result<()> {
    if args.len() == n {
        Ok(())
    } else {
        Err(Error::Parse(format!(
            "{name} takes {n} argument(s), got {}",
            args.len()
        )))
    }
}

/// Exact rational value, if the expression has one without evaluating
/// transcendental functions.
fn exact(node: &Node) -> Result<Option<(BigInt, BigInt)>> {
    Ok(match node {
        Node::Num(n, d) => Some((n.clone(), d.clone())),
        Node::Name(_) => None,
        Node::Call(name, args) => match name.as_str() {
            "F" => {
                arity("F", args, 2)?;
                let k = small_arg(&args[0], "F")?;
                let n = int_arg(&args[1], "F")?
                    .to_i64()
                    .ok_or_else(|| Error::Parse("F index out of range".into()))?;
                Some((kfib(k, n)?, BigInt::one()))
            }
            "B" | "C" => {
                arity(name, args, 1)?;
                let l = int_arg(&args[0], name)?
                    .to_u64()
                    .ok_or_else(|| Error::Parse(format!("{name} index must be non-negative")))?;
                let v = if name == "B" {
                    balancing(l)
                } else {
                    lucas_balancing(l)
                };
                Some((v, BigInt::one()))
            }
            _ => None,
        },
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
            match (exact(a)?, exact(b)?) {
                (Some((an, ad)), Some((bn, bd))) => Some(match node {
                    Node::Add(..) => reduce_frac(&an * &bd + &bn * &ad, ad * bd)?,
                    Node::Sub(..) => reduce_frac(&an * &bd - &bn * &ad, ad * bd)?,
                    Node::Mul(..) => reduce_frac(an * bn, ad * bd)?,
                    _ => reduce_frac(an * bd, ad * bn)?,
                }),
                _ => None,
            }
        }
        Node::Neg(a) => exact(a)?.map(|(n, d)| (-n, d)),
        Node::Pow(a, e) => match exact(a)? {
            Some((n, d)) => {
                let p = e.unsigned_abs() as usize;
                let (n, d) = (num_traits::pow(n, p), num_traits::pow(d, p));
                Some(if *e < 0 { reduce_frac(d, n)? } else { (n, d) })
            }
            None => None,
        },
    })
}

fn eval(node: &Node, bits: u32) -> Result<ApproxReal> {
    if let Some((n, d)) = exact(node)? {
        return Ok(ApproxReal::from_ratio(&n, &d, bits));
    }
    let ctx = PrecisionContext::default().at_least(bits);
    Ok(match node {
        Node::Num(..) => unreachable!("numbers are exact"),
        Node::Name(name) => match name.as_str() {
            "gamma" => AlgebraicConstants::new(bits)?.gamma,
            "delta" => AlgebraicConstants::new(bits)?.delta,
            "sqrt2" => AlgebraicConstants::new(bits)?.sqrt2,
            "log2" => ln2(bits),
            _ => return Err(Error::Parse(format!("unknown constant {name:?}"))),
        },
        Node::Call(name, args) => match name.as_str() {
            "log" => {
                arity("log", args, 1)?;
                log(&eval(&args[0], bits)?)?
            }
            "sqrt" => {
                arity("sqrt", args, 1)?;
                eval(&args[0], bits)?.sqrt()?
            }
            "phi" => {
                arity("phi", args, 1)?;
                dominant_root(small_arg(&args[0], "phi")?, &ctx)?.with_precision(bits)
            }
            "f" => {
                arity("f", args, 1)?;
                let k = small_arg(&args[0], "f")?;
                let phi = dominant_root(k, &ctx)?;
                f_k_at_root(k, &phi)?.with_precision(bits)
            }
            _ => return Err(Error::Parse(format!("unknown function {name:?}"))),
        },
        Node::Add(a, b) => &eval(a, bits)? + &eval(b, bits)?,
        Node::Sub(a, b) => &eval(a, bits)? - &eval(b, bits)?,
        Node::Mul(a, b) => &eval(a, bits)? * &eval(b, bits)?,
        Node::Div(a, b) => eval(a, bits)?.div(&eval(b, bits)?)?,
        Node::Neg(a) => -eval(a, bits)?,
        Node::Pow(a, e) => {
            let x = eval(a, bits)?.powi(e.unsigned_abs());
            if *e < 0 {
                x.recip()?
            } else {
                x
            }
        }
    })
}

/// Parse an expression into a value that can be evaluated at any precision.
///
/// Rational expressions come back exact. Evaluation adds 32 guard bits.
pub fn parse(s: &str) -> Result<Refinable> {
    let toks = tokenize(s)?;
    let mut p = Parser { toks, pos: 0 };
    let node = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input in {s:?}")));
    }
    if let Some((n, d)) = exact(&node)? {
        let mut r = Refinable::rational(n, d)?;
        r.set_label(s);
        return Ok(r);
    }
    // surface unknown names before the first evaluation
    eval(&node, 64).map(|_| ()).or_else(|e| match e {
        Error::Parse(_) => Err(e),
        _ => Ok(()),
    })?;
    let node = Arc::new(node);
    Ok(Refinable::new(s.trim(), move |bits| {
        Ok(eval(&node, bits + 32)?.with_precision(bits))
    }))
}

/// An exact integer such as `9.72e173`; fails if the value is not whole.
pub fn parse_integer(s: &str) -> Result<BigInt> {
    let r = parse(s)?;
    match r.exact() {
        Some((n, d)) if d.is_one() => Ok(n.clone()),
        _ => Err(Error::Parse(format!("{s:?} is not an exact integer"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_arithmetic_stays_exact() {
        let r = parse("(1 + 2/3) * 3 - 2^-1").unwrap();
        assert_eq!(r.exact(), Some(&(BigInt::from(9), BigInt::from(2))));
        assert_eq!(parse_integer("9.72e173").unwrap().to_string().len(), 174);
        assert!(parse_integer("1/2").is_err());
        assert_eq!(
            parse("F(5, 15) - B(6)").unwrap().exact().unwrap().0,
            BigInt::zero()
        );
        assert_eq!(parse("C(1)").unwrap().exact().unwrap().0, BigInt::from(3));
    }

    #[test]
    fn transcendental_values() {
        let x = parse("log(gamma)/log(2)").unwrap().at(128).unwrap();
        assert_eq!(x.to_decimal(8), "2.54310661");
        let mu = parse("2 + log(f(3)^-2/(4*sqrt(2)))/log(phi(3))").unwrap();
        let a = mu.at(256).unwrap();
        let b = mu.at(512).unwrap();
        assert!((&a - &b).contains_zero());
    }

    #[test]
    fn errors_are_parse_errors() {
        for bad in ["log(", "foo", "bar(2)", "2 $ 3", "phi(1/2)", "2^x", "1 2"] {
            assert!(matches!(parse(bad), Err(Error::Parse(_))), "{bad}");
        }
        assert!(matches!(parse("1/0"), Err(Error::Domain(_))));
    }
}
