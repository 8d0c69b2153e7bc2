//! Arithmetic payoff expressions such as `max(x0 - 1, 0)` or `exp(-x1^2)`.
//!
//! Variables are `x0, x1, ...` (and `x` for `x0`). Functions: `exp`, `ln`,
//! `log`, `sqrt`, `abs`, `sin`, `cos`, `tanh`, `min`, `max`.

use nom::branch::alt;
use nom::bytes::complete::{tag, take_while1};
use nom::character::complete::{char, multispace0};
use nom::combinator::{all_consuming, map, opt, verify};
use nom::multi::{many0, separated_list1};
use nom::number::complete::double;
use nom::sequence::{delimited, pair, preceded};
use nom::{IResult, Parser};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(usize),
    Neg(Box<Expr>),
    Bin(char, Box<Expr>, Box<Expr>),
    Call(String, Vec<Expr>),
}

fn ws<'a, O>(p: impl Parser<&'a str, Output = O, Error = nom::error::Error<&'a str>>) -> impl Parser<&'a str, Output = O, Error = nom::error::Error<&'a str>> {
    delimited(multispace0, p, multispace0)
}

fn ident(i: &str) -> IResult<&str, &str> {
    verify(take_while1(|c: char| c.is_ascii_alphanumeric() || c == '_'), |s: &str| {
        s.starts_with(|c: char| c.is_ascii_alphabetic())
    })
    .parse(i)
}

fn atom(i: &str) -> IResult<&str, Expr> {
    let call = map(
        pair(ident, delimited(ws(char('(')), separated_list1(ws(char(',')), expr), ws(char(')')))),
        |(name, args)| Expr::Call(name.to_string(), args),
    );
    let var = map(ident, |name: &str| Expr::Call(name.to_string(), Vec::new()));
    ws(alt((
        map(double, Expr::Num),
        call,
        var,
        delimited(char('('), expr, ws(char(')'))),
    )))
    .parse(i)
}

fn unary(i: &str) -> IResult<&str, Expr> {
    alt((map(preceded(ws(char('-')), unary), |e| Expr::Neg(Box::new(e))), power)).parse(i)
}

fn power(i: &str) -> IResult<&str, Expr> {
    // right associative
    let (i, base) = atom(i)?;
    let (i, exp) = opt(preceded(ws(alt((tag("^"), tag("**")))), unary)).parse(i)?;
    Ok((i, match exp {
        Some(e) => Expr::Bin('^', Box::new(base), Box::new(e)),
        None => base,
    }))
}

fn fold(first: Expr, rest: Vec<(char, Expr)>) -> Expr {
    rest.into_iter().fold(first, |a, (op, b)| Expr::Bin(op, Box::new(a), Box::new(b)))
}

fn term(i: &str) -> IResult<&str, Expr> {
    map(pair(unary, many0(pair(ws(alt((char('*'), char('/')))), unary))), |(a, r)| fold(a, r)).parse(i)
}

fn expr(i: &str) -> IResult<&str, Expr> {
    map(pair(term, many0(pair(ws(alt((char('+'), char('-')))), term))), |(a, r)| fold(a, r)).parse(i)
}

impl Expr {
    /// Parses and resolves variable names against a state of dimension `n`.
    pub fn parse(src: &str, n: usize) -> Result<Expr> {
        let (_, e) = all_consuming(expr)
            .parse(src)
            .map_err(|e| Error::Payoff(format!("cannot parse {src:?}: {e}")))?;
        e.resolve(n)
    }

    fn resolve(self, n: usize) -> Result<Expr> {
        Ok(match self {
            Expr::Call(name, args) if args.is_empty() => {
                let idx = match name.as_str() {
                    "x" => Some(0),
                    s => s.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()),
                };
                match idx {
                    Some(k) if k < n => Expr::Var(k),
                    Some(k) => return Err(Error::Payoff(format!("variable x{k} outside state of dimension {n}"))),
                    None => match name.as_str() {
                        "pi" => Expr::Num(std::f64::consts::PI),
                        "e" => Expr::Num(std::f64::consts::E),
                        _ => return Err(Error::Payoff(format!("unknown name {name:?}"))),
                    },
                }
            }
            Expr::Call(name, args) => {
                let arity = match name.as_str() {
                    "exp" | "ln" | "log" | "sqrt" | "abs" | "sin" | "cos" | "tanh" => 1,
                    "min" | "max" => 2,
                    _ => return Err(Error::Payoff(format!("unknown function {name:?}"))),
                };
                if args.len() != arity {
                    return Err(Error::Payoff(format!("{name} takes {arity} argument(s)")));
                }
                Expr::Call(name, args.into_iter().map(|a| a.resolve(n)).collect::<Result<_>>()?)
            }
            Expr::Neg(a) => Expr::Neg(Box::new(a.resolve(n)?)),
            Expr::Bin(op, a, b) => Expr::Bin(op, Box::new(a.resolve(n)?), Box::new(b.resolve(n)?)),
            e => e,
        })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(k) => x[*k],
            Expr::Neg(a) => -a.eval(x),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(x), b.eval(x));
                match op {
                    '+' => a + b,
                    '-' => a - b,
                    '*' => a * b,
                    '/' => a / b,
                    _ => a.powf(b),
                }
            }
            Expr::Call(name, args) => {
                let a = args[0].eval(x);
                match name.as_str() {
                    "exp" => a.exp(),
                    "ln" | "log" => a.ln(),
                    "sqrt" => a.sqrt(),
                    "abs" => a.abs(),
                    "sin" => a.sin(),
                    "cos" => a.cos(),
                    "tanh" => a.tanh(),
                    "min" => a.min(args[1].eval(x)),
                    _ => a.max(args[1].eval(x)),
                }
            }
        }
    }
}
