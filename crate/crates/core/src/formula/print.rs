//! Canonical printing with the fewest parentheses the grammar allows.
//!
//! Precedence is `!` > `&` > `|`; both binary operators associate to the
//! left, so a right operand of equal precedence is parenthesized.

use std::fmt::{self, Display, Formatter};

use super::{Formula, Term};

const OR: u8 = 1;
const AND: u8 = 2;
const UNARY: u8 = 3;

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        _ => UNARY,
    }
}

fn write_at(f: &Formula, min: u8, out: &mut Formatter<'_>) -> fmt::Result {
    if prec(f) < min {
        out.write_str("(")?;
        write_formula(f, out)?;
        out.write_str(")")
    } else {
        write_formula(f, out)
    }
}

fn write_args(args: &[Term], out: &mut Formatter<'_>) -> fmt::Result {
    out.write_str("(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.write_str(", ")?;
        }
        write!(out, "{a}")?;
    }
    out.write_str(")")
}

fn write_formula(f: &Formula, out: &mut Formatter<'_>) -> fmt::Result {
    match f {
        Formula::True => out.write_str("true"),
        Formula::False => out.write_str("false"),
        Formula::Atom(r, args) => {
            out.write_str(r)?;
            write_args(args, out)
        }
        Formula::Eq(a, b) => write!(out, "{a} = {b}"),
        Formula::Not(g) => match &**g {
            Formula::Eq(a, b) => write!(out, "{a} != {b}"),
            g => {
                out.write_str("!")?;
                write_at(g, UNARY, out)
            }
        },
        Formula::And(a, b) => {
            write_at(a, AND, out)?;
            out.write_str(" & ")?;
            write_at(b, UNARY, out)
        }
        Formula::Or(a, b) => {
            write_at(a, OR, out)?;
            out.write_str(" | ")?;
            write_at(b, AND, out)
        }
    }
}

impl Display for Formula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_formula(self, f)
    }
}

impl Display for Term {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) | Term::Const(v) => f.write_str(v),
            Term::App(g, args) => {
                f.write_str(g)?;
                write_args(args, f)
            }
            Term::Ite(c, a, b) => write!(f, "ite({c}, {a}, {b})"),
        }
    }
}
