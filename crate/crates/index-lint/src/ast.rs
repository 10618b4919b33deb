use std::fmt;

use crate::diagnostic::Span;
use crate::symbols::{label_space, Position, Space, SymbolDecl};

/// One written index: a label in an upper or lower position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Index {
    pub label: String,
    pub position: Position,
    pub span: Span,
}

impl Index {
    pub fn space(&self) -> Space {
        label_space(&self.label)
    }

    fn same_structure(&self, other: &Index) -> bool {
        self.label == other.label && self.position == other.position
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolRef {
    pub name: String,
    pub indices: Vec<Index>,
    /// The declaration this reference resolved to.
    pub decl: SymbolDecl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub sign: Sign,
    pub expr: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Symbol(SymbolRef),
    Partial {
        index: Index,
        operand: Box<Expr>,
    },
    Covariant {
        index: Index,
        operand: Box<Expr>,
    },
    Product(Vec<Expr>),
    Sum(Vec<Term>),
    /// Two or more sides joined by `=`.
    Equation(Vec<Expr>),
    Scalar(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Self { kind, span }
    }

    pub fn is_zero_literal(&self) -> bool {
        matches!(self.kind, ExprKind::Scalar(v) if v == 0.0)
    }

    /// Structural equality, ignoring spans.
    pub fn same_structure(&self, other: &Expr) -> bool {
        use ExprKind::*;
        match (&self.kind, &other.kind) {
            (Symbol(a), Symbol(b)) => {
                a.name == b.name
                    && a.decl == b.decl
                    && a.indices.len() == b.indices.len()
                    && a.indices.iter().zip(&b.indices).all(|(x, y)| x.same_structure(y))
            }
            (Partial { index: i, operand: o }, Partial { index: j, operand: p })
            | (Covariant { index: i, operand: o }, Covariant { index: j, operand: p }) => {
                i.same_structure(j) && o.same_structure(p)
            }
            (Product(a), Product(b)) | (Equation(a), Equation(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.same_structure(y))
            }
            (Sum(a), Sum(b)) => {
                a.len() == b.len()
                    && a.iter()
                        .zip(b)
                        .all(|(x, y)| x.sign == y.sign && x.expr.same_structure(&y.expr))
            }
            (Scalar(a), Scalar(b)) => a == b,
            _ => false,
        }
    }

    /// Visits this node and every descendant, parents first.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match &self.kind {
            ExprKind::Symbol(_) | ExprKind::Scalar(_) => {}
            ExprKind::Partial { operand, .. } | ExprKind::Covariant { operand, .. } => operand.walk(f),
            ExprKind::Product(xs) | ExprKind::Equation(xs) => xs.iter().for_each(|x| x.walk(f)),
            ExprKind::Sum(ts) => ts.iter().for_each(|t| t.expr.walk(f)),
        }
    }
}

fn write_indices(f: &mut fmt::Formatter<'_>, indices: &[Index]) -> fmt::Result {
    let mut i = 0;
    while i < indices.len() {
        let pos = indices[i].position;
        let mut j = i;
        while j < indices.len() && indices[j].position == pos {
            j += 1;
        }
        let group = &indices[i..j];
        if group.len() == 1 {
            write!(f, "{}{}", pos.marker(), group[0].label)?;
        } else {
            write!(f, "{}{{", pos.marker())?;
            for (k, idx) in group.iter().enumerate() {
                if k > 0 {
                    f.write_str(" ")?;
                }
                f.write_str(&idx.label)?;
            }
            f.write_str("}")?;
        }
        i = j;
    }
    Ok(())
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    match e.kind {
        ExprKind::Symbol(_) | ExprKind::Scalar(_) | ExprKind::Partial { .. } | ExprKind::Covariant { .. } => {
            write!(f, "{e}")
        }
        _ => write!(f, "({e})"),
    }
}

fn write_scalar(f: &mut fmt::Formatter<'_>, v: f64) -> fmt::Result {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        write!(f, "{}", v as i64)
    } else {
        write!(f, "{v}")
    }
}

impl fmt::Display for Expr {
    /// Canonical source text; parsing it yields a structurally identical tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Symbol(s) => {
                f.write_str(&s.name)?;
                write_indices(f, &s.indices)
            }
            ExprKind::Scalar(v) => write_scalar(f, *v),
            ExprKind::Partial { index, operand } => {
                write!(f, "d{}{} ", index.position.marker(), index.label)?;
                write_operand(f, operand)
            }
            ExprKind::Covariant { index, operand } => {
                write!(f, "D{}{} ", index.position.marker(), index.label)?;
                write_operand(f, operand)
            }
            ExprKind::Product(factors) => {
                for (i, x) in factors.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    match x.kind {
                        // a derivative would otherwise swallow the factors after it
                        ExprKind::Sum(_) | ExprKind::Product(_) => write!(f, "({x})")?,
                        ExprKind::Partial { .. } | ExprKind::Covariant { .. } if i + 1 < factors.len() => {
                            write!(f, "({x})")?
                        }
                        _ => write!(f, "{x}")?,
                    }
                }
                Ok(())
            }
            ExprKind::Sum(terms) => {
                for (i, t) in terms.iter().enumerate() {
                    match (i, t.sign) {
                        (0, Sign::Plus) => {}
                        (0, Sign::Minus) => f.write_str("-")?,
                        (_, Sign::Plus) => f.write_str(" + ")?,
                        (_, Sign::Minus) => f.write_str(" - ")?,
                    }
                    match t.expr.kind {
                        ExprKind::Sum(_) => write!(f, "({})", t.expr)?,
                        _ => write!(f, "{}", t.expr)?,
                    }
                }
                Ok(())
            }
            ExprKind::Equation(sides) => {
                for (i, s) in sides.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" = ")?;
                    }
                    write!(f, "{s}")?;
                }
                Ok(())
            }
        }
    }
}
