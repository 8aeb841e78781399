//! Guards as prefix s-expressions, e.g. `(and (= x y) (< x 3))`.
//!
//! Leaves are variables (bare identifiers), integers, quoted symbols
//! (`'approve`), unit `()` and literal tuples `(tuple 1 'a)`. `true` and
//! `false` are the constant guards.

use crate::color::ColorValue;
use crate::net::{CmpOp, Guard, Operand};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Sx {
    Atom(String, usize),
    List(Vec<Sx>, usize),
}

impl Sx {
    fn pos(&self) -> usize {
        match self {
            Sx::Atom(_, p) | Sx::List(_, p) => *p,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("guard syntax error at column {column}: {message}")]
pub struct SexprError {
    pub column: usize,
    pub message: String,
}

fn err<T>(pos: usize, message: impl Into<String>) -> Result<T, SexprError> {
    Err(SexprError {
        column: pos + 1,
        message: message.into(),
    })
}

fn read(src: &str) -> Result<Sx, SexprError> {
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    let sx = read_one(&chars, &mut i)?;
    skip_ws(&chars, &mut i);
    if i < chars.len() {
        return err(i, "trailing input");
    }
    Ok(sx)
}

fn skip_ws(c: &[char], i: &mut usize) {
    while *i < c.len() && c[*i].is_whitespace() {
        *i += 1;
    }
}

fn read_one(c: &[char], i: &mut usize) -> Result<Sx, SexprError> {
    skip_ws(c, i);
    let start = *i;
    match c.get(*i) {
        None => err(start, "unexpected end of input"),
        Some(')') => err(start, "unexpected )"),
        Some('(') => {
            *i += 1;
            let mut items = Vec::new();
            loop {
                skip_ws(c, i);
                match c.get(*i) {
                    None => return err(start, "unclosed ("),
                    Some(')') => {
                        *i += 1;
                        return Ok(Sx::List(items, start));
                    }
                    _ => items.push(read_one(c, i)?),
                }
            }
        }
        Some(_) => {
            while *i < c.len() && !c[*i].is_whitespace() && c[*i] != '(' && c[*i] != ')' {
                *i += 1;
            }
            Ok(Sx::Atom(c[start..*i].iter().collect(), start))
        }
    }
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn literal(sx: &Sx) -> Result<ColorValue, SexprError> {
    match sx {
        Sx::Atom(a, p) => {
            if let Some(sym) = a.strip_prefix('\'') {
                if is_ident(sym) {
                    return Ok(ColorValue::sym_unresolved(sym));
                }
                return err(*p, format!("bad symbol {a}"));
            }
            a.parse::<i64>()
                .map(ColorValue::Int)
                .or_else(|_| err(*p, format!("expected literal, found {a}")))
        }
        Sx::List(items, p) => match items.split_first() {
            None => Ok(ColorValue::Unit),
            Some((Sx::Atom(head, _), rest)) if head == "tuple" => rest
                .iter()
                .map(literal)
                .collect::<Result<Vec<_>, _>>()
                .map(ColorValue::Tuple),
            _ => err(*p, "expected literal"),
        },
    }
}

fn operand(sx: &Sx) -> Result<Operand, SexprError> {
    match sx {
        Sx::Atom(a, _) if is_ident(a) && a != "true" && a != "false" => Ok(Operand::Var(a.clone())),
        _ => literal(sx).map(Operand::Lit),
    }
}

fn guard(sx: &Sx) -> Result<Guard, SexprError> {
    match sx {
        Sx::Atom(a, _) if a == "true" => Ok(Guard::True),
        Sx::Atom(a, _) if a == "false" => Ok(Guard::Or(vec![])),
        Sx::Atom(a, p) => err(*p, format!("expected guard, found {a}")),
        Sx::List(items, p) => {
            let Some((Sx::Atom(head, hp), args)) = items.split_first() else {
                return err(*p, "expected operator");
            };
            let op = match head.as_str() {
                "and" => return args.iter().map(guard).collect::<Result<_, _>>().map(Guard::And),
                "or" => return args.iter().map(guard).collect::<Result<_, _>>().map(Guard::Or),
                "not" => {
                    return match args {
                        [g] => Ok(Guard::Not(Box::new(guard(g)?))),
                        _ => err(*hp, "not takes one argument"),
                    }
                }
                "=" => CmpOp::Eq,
                "!=" => CmpOp::Ne,
                "<" => CmpOp::Lt,
                "<=" => CmpOp::Le,
                ">" => CmpOp::Gt,
                ">=" => CmpOp::Ge,
                other => return err(*hp, format!("unknown operator {other}")),
            };
            match args {
                [l, r] => Ok(Guard::Cmp(op, operand(l)?, operand(r)?)),
                _ => err(args.first().map_or(*hp, Sx::pos), format!("{head} takes two operands")),
            }
        }
    }
}

pub fn parse_guard(src: &str) -> Result<Guard, SexprError> {
    guard(&read(src)?)
}

fn write_lit(v: &ColorValue, out: &mut String) {
    match v {
        ColorValue::Unit => out.push_str("()"),
        ColorValue::Int(i) => out.push_str(&i.to_string()),
        ColorValue::Sym(s) => {
            out.push('\'');
            out.push_str(&s.name);
        }
        ColorValue::Tuple(es) => {
            out.push_str("(tuple");
            for e in es {
                out.push(' ');
                write_lit(e, out);
            }
            out.push(')');
        }
    }
}

fn write_guard(g: &Guard, out: &mut String) {
    match g {
        Guard::True => out.push_str("true"),
        Guard::Or(gs) if gs.is_empty() => out.push_str("false"),
        Guard::And(gs) | Guard::Or(gs) => {
            out.push_str(if matches!(g, Guard::And(_)) { "(and" } else { "(or" });
            for g in gs {
                out.push(' ');
                write_guard(g, out);
            }
            out.push(')');
        }
        Guard::Not(g) => {
            out.push_str("(not ");
            write_guard(g, out);
            out.push(')');
        }
        Guard::Cmp(op, l, r) => {
            out.push('(');
            out.push_str(op.symbol());
            for o in [l, r] {
                out.push(' ');
                match o {
                    Operand::Var(v) => out.push_str(v),
                    Operand::Lit(v) => write_lit(v, out),
                }
            }
            out.push(')');
        }
    }
}

pub fn guard_to_sexpr(g: &Guard) -> String {
    let mut s = String::new();
    write_guard(g, &mut s);
    s
}
