//! Lexer and recursive-descent parser for index expressions.
//!
//! ```text
//! line    := expr ('=' expr)*
//! expr    := ['+' | '-'] term (('+' | '-') term)*
//! term    := factor factor*
//! factor  := deriv factor | primary
//! deriv   := ('d' | 'D') ('^' | '_') (ident | '{' ident '}')
//! primary := ident slots | number | '(' expr ')' | '(' deriv+ ')' factor
//! slots   := (('^' | '_') (ident | '{' ident+ '}'))*
//! ```
//!
//! `d` is the partial and `D` the covariant derivative; a derivative applies
//! to the single factor that follows it.

use crate::ast::{Expr, ExprKind, Index, Sign, SymbolRef, Term};
use crate::diagnostic::{Code, Diagnostic, Span};
use crate::symbols::{label_space, Position, Space, SymbolTable};

/// Longest accepted expression, in bytes.
pub const MAX_INPUT: usize = 1 << 16;
const MAX_DEPTH: usize = 128;

/// (covariant?, index, span) of one derivative operator.
type Op = (bool, Index, Span);

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(f64),
    Caret,
    Under,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Plus,
    Minus,
    Eq,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(v) => format!("number {v}"),
            Tok::Caret => "`^`".into(),
            Tok::Under => "`_`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Eq => "`=`".into(),
        }
    }
}

fn syntax(span: Span, msg: impl Into<String>) -> Diagnostic {
    Diagnostic::new(Code::Syntax, span, msg)
}

fn lex(text: &str) -> Result<Vec<(Tok, Span)>, Diagnostic> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b'^' => Some(Tok::Caret),
            b'_' => Some(Tok::Under),
            b'{' => Some(Tok::LBrace),
            b'}' => Some(Tok::RBrace),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'=' => Some(Tok::Eq),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, Span::new(i, i + 1)));
            i += 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() {
            while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), Span::new(start, i)));
        } else if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            let lit = &text[start..i];
            let v: f64 = lit
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| syntax(Span::new(start, i), format!("malformed number `{lit}`")))?;
            out.push((Tok::Number(v), Span::new(start, i)));
        } else {
            let ch = text[i..].chars().next().unwrap_or('?');
            return Err(syntax(
                Span::new(i, i + ch.len_utf8()),
                format!("unexpected character `{ch}`"),
            ));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    end: usize,
    table: &'a SymbolTable,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|(t, _)| t)
    }

    fn span_here(&self) -> Span {
        self.toks
            .get(self.pos)
            .map(|(_, s)| *s)
            .unwrap_or(Span::new(self.end, self.end))
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        self.pos += 1;
        t
    }

    fn unexpected(&self, wanted: &str) -> Diagnostic {
        match self.peek() {
            Some(t) => syntax(self.span_here(), format!("expected {wanted}, found {}", t.describe())),
            None => syntax(self.span_here(), format!("expected {wanted}, found end of input")),
        }
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Result<Span, Diagnostic> {
        if self.peek() == Some(&tok) {
            Ok(self.bump().1)
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn enter(&mut self) -> Result<(), Diagnostic> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(syntax(self.span_here(), "expression nested too deeply"));
        }
        Ok(())
    }

    fn line(&mut self) -> Result<Expr, Diagnostic> {
        let first = self.expr()?;
        let mut sides = vec![first];
        while self.peek() == Some(&Tok::Eq) {
            self.bump();
            sides.push(self.expr()?);
        }
        if self.pos < self.toks.len() {
            return Err(self.unexpected("an operator or end of input"));
        }
        if sides.len() == 1 {
            return Ok(sides.pop().unwrap());
        }
        let span = sides[0].span.join(sides[sides.len() - 1].span);
        Ok(Expr::new(ExprKind::Equation(sides), span))
    }

    fn expr(&mut self) -> Result<Expr, Diagnostic> {
        self.enter()?;
        let start = self.span_here();
        let mut terms = Vec::new();
        let mut sign = Sign::Plus;
        match self.peek() {
            Some(Tok::Plus) => {
                self.bump();
            }
            Some(Tok::Minus) => {
                self.bump();
                sign = Sign::Minus;
            }
            _ => {}
        }
        loop {
            let expr = self.term()?;
            terms.push(Term { sign, expr });
            sign = match self.peek() {
                Some(Tok::Plus) => Sign::Plus,
                Some(Tok::Minus) => Sign::Minus,
                _ => break,
            };
            self.bump();
        }
        self.depth -= 1;
        if terms.len() == 1 && terms[0].sign == Sign::Plus {
            return Ok(terms.pop().unwrap().expr);
        }
        let span = start.join(terms[terms.len() - 1].expr.span);
        Ok(Expr::new(ExprKind::Sum(terms), span))
    }

    fn starts_factor(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(_) | Tok::Number(_) | Tok::LParen))
    }

    fn term(&mut self) -> Result<Expr, Diagnostic> {
        if !self.starts_factor() {
            return Err(self.unexpected("a factor"));
        }
        let mut factors = vec![self.factor()?];
        while self.starts_factor() {
            factors.push(self.factor()?);
        }
        if factors.len() == 1 {
            return Ok(factors.pop().unwrap());
        }
        let span = factors[0].span.join(factors[factors.len() - 1].span);
        Ok(Expr::new(ExprKind::Product(factors), span))
    }

    fn at_derivative(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == "d" || s == "D")
            && matches!(self.peek_at(1), Some(Tok::Caret | Tok::Under))
    }

    /// Parses `d_mu` / `D^mu`, returning (covariant?, index, span).
    fn derivative(&mut self) -> Result<Op, Diagnostic> {
        let (tok, start) = self.bump();
        let covariant = matches!(tok, Tok::Ident(ref s) if s == "D");
        let position = match self.bump().0 {
            Tok::Caret => Position::Upper,
            _ => Position::Lower,
        };
        let (labels, end) = self.index_group()?;
        if labels.len() != 1 {
            return Err(syntax(start.join(end), "a derivative takes exactly one index"));
        }
        let (label, span) = labels.into_iter().next().unwrap();
        if label_space(&label) != Space::Coordinate {
            return Err(syntax(
                span,
                format!("derivative index `{label}` must be a coordinate index"),
            ));
        }
        Ok((covariant, Index { label, position, span }, start.join(end)))
    }

    /// `ident` or `{ident ident ...}` after a `^` / `_`.
    fn index_group(&mut self) -> Result<(Vec<(String, Span)>, Span), Diagnostic> {
        match self.peek() {
            Some(Tok::Ident(_)) => {
                let (t, s) = self.bump();
                let Tok::Ident(l) = t else { unreachable!() };
                Ok((vec![(l, s)], s))
            }
            Some(Tok::LBrace) => {
                self.bump();
                let mut labels = Vec::new();
                while let Some(Tok::Ident(_)) = self.peek() {
                    let (t, s) = self.bump();
                    let Tok::Ident(l) = t else { unreachable!() };
                    labels.push((l, s));
                }
                if labels.is_empty() {
                    return Err(self.unexpected("an index label"));
                }
                let end = self.expect(Tok::RBrace, "`}`")?;
                Ok((labels, end))
            }
            _ => Err(self.unexpected("an index label or `{`")),
        }
    }

    fn factor(&mut self) -> Result<Expr, Diagnostic> {
        self.enter()?;
        let out = if self.at_derivative() {
            let (covariant, index, span) = self.derivative()?;
            let operand = self.factor()?;
            Ok(wrap_derivative(covariant, index, span, operand))
        } else {
            self.primary()
        };
        self.depth -= 1;
        out
    }

    fn primary(&mut self) -> Result<Expr, Diagnostic> {
        match self.peek() {
            Some(Tok::Number(_)) => {
                let (t, s) = self.bump();
                let Tok::Number(v) = t else { unreachable!() };
                Ok(Expr::new(ExprKind::Scalar(v), s))
            }
            Some(Tok::LParen) => {
                let open = self.bump().1;
                if let Some(ops) = self.operator_group()? {
                    // `(D^mu d_mu) q`: composed operators applied to the next factor
                    let mut operand = self.factor()?;
                    for (covariant, index, span) in ops.into_iter().rev() {
                        operand = wrap_derivative(covariant, index, open.join(span), operand);
                    }
                    return Ok(operand);
                }
                let inner = self.expr()?;
                let close = self.expect(Tok::RParen, "`)`")?;
                Ok(Expr::new(inner.kind, open.join(close)))
            }
            Some(Tok::Ident(_)) => self.symbol(),
            _ => Err(self.unexpected("a symbol, number or `(`")),
        }
    }

    /// After `(`: a run of derivatives closed by `)`, or `None` (position restored).
    fn operator_group(&mut self) -> Result<Option<Vec<Op>>, Diagnostic> {
        let save = self.pos;
        let mut ops = Vec::new();
        while self.at_derivative() {
            match self.derivative() {
                Ok(op) => ops.push(op),
                Err(_) => {
                    self.pos = save;
                    return Ok(None);
                }
            }
        }
        if !ops.is_empty() && self.peek() == Some(&Tok::RParen) {
            self.bump();
            if !self.starts_factor() {
                return Err(self.unexpected("an operand after the operator group"));
            }
            return Ok(Some(ops));
        }
        self.pos = save;
        Ok(None)
    }

    fn symbol(&mut self) -> Result<Expr, Diagnostic> {
        let (t, name_span) = self.bump();
        let Tok::Ident(name) = t else { unreachable!() };
        let mut indices = Vec::new();
        let mut end = name_span;
        loop {
            let position = match self.peek() {
                Some(Tok::Caret) => Position::Upper,
                Some(Tok::Under) => Position::Lower,
                _ => break,
            };
            self.bump();
            let (labels, group_end) = self.index_group()?;
            for (label, span) in labels {
                indices.push(Index { label, position, span });
            }
            end = group_end;
        }
        let span = name_span.join(end);
        let written: Vec<(Position, Space)> = indices.iter().map(|i| (i.position, i.space())).collect();
        if self.table.by_name(&name).next().is_none() {
            return Err(Diagnostic::new(
                Code::Undeclared,
                name_span,
                format!("undeclared symbol `{name}`"),
            ));
        }
        let decl = match self.table.by_name(&name).find(|d| d.accepts(&written)) {
            Some(d) => d.clone(),
            None => {
                let pattern: Vec<String> = written
                    .iter()
                    .map(|(p, s)| format!("{}{}", p.marker(), s.name()))
                    .collect();
                let declared: Vec<String> = self.table.by_name(&name).map(|d| d.to_string()).collect();
                return Err(Diagnostic::new(
                    Code::Undeclared,
                    span,
                    format!(
                        "no declaration of `{name}` matches index pattern [{}] (declared: {})",
                        pattern.join(" "),
                        declared.join(", ")
                    ),
                ));
            }
        };
        Ok(Expr::new(ExprKind::Symbol(SymbolRef { name, indices, decl }), span))
    }
}

fn wrap_derivative(covariant: bool, index: Index, span: Span, operand: Expr) -> Expr {
    let span = span.join(operand.span);
    let operand = Box::new(operand);
    let kind = if covariant {
        ExprKind::Covariant { index, operand }
    } else {
        ExprKind::Partial { index, operand }
    };
    Expr::new(kind, span)
}

/// Parses one expression or equation, resolving every symbol against `table`.
pub fn parse_expr(text: &str, table: &SymbolTable) -> Result<Expr, Diagnostic> {
    if text.len() > MAX_INPUT {
        return Err(syntax(Span::new(0, 0), format!("input longer than {MAX_INPUT} bytes")));
    }
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(syntax(Span::new(0, text.len()), "empty expression"));
    }
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        table,
        depth: 0,
    };
    p.line()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<Expr, Diagnostic> {
        parse_expr(s, &SymbolTable::default_table())
    }

    #[test]
    fn postulate_is_a_three_term_sum() {
        let e = parse("d_mu q^a_lam + omega^a_{mu b} q^b_lam - Gamma^nu_{mu lam} q^a_nu").unwrap();
        let ExprKind::Sum(terms) = &e.kind else { panic!("{e:?}") };
        assert_eq!(terms.len(), 3);
        assert_eq!(terms[2].sign, Sign::Minus);
        assert!(matches!(terms[0].expr.kind, ExprKind::Partial { .. }));
        let ExprKind::Product(f) = &terms[1].expr.kind else {
            panic!()
        };
        let ExprKind::Symbol(omega) = &f[0].kind else { panic!() };
        assert_eq!(omega.indices.len(), 3);
        assert_eq!(omega.indices[1].label, "mu");
        assert_eq!(omega.indices[1].position, Position::Lower);
        assert!(!omega.decl.tensorial);
    }

    #[test]
    fn covariant_derivative_of_connection_parses() {
        let e = parse("D^mu omega^a_{mu b}").unwrap();
        let ExprKind::Covariant { index, operand } = &e.kind else {
            panic!()
        };
        assert_eq!(index.position, Position::Upper);
        assert!(matches!(operand.kind, ExprKind::Symbol(_)));
    }

    #[test]
    fn derivative_binds_to_next_factor() {
        let e = parse("D^mu omega^a_{mu b} q^b_lam").unwrap();
        let ExprKind::Product(f) = &e.kind else { panic!() };
        assert_eq!(f.len(), 2);
        assert!(matches!(f[0].kind, ExprKind::Covariant { .. }));
    }

    #[test]
    fn operator_group() {
        let a = parse("(D^mu d_mu) q^a_lam").unwrap();
        let b = parse("D^mu d_mu q^a_lam").unwrap();
        assert!(a.same_structure(&b));
        // a parenthesised expression is still an ordinary group
        let c = parse("(d_mu q^a_lam)").unwrap();
        assert!(matches!(c.kind, ExprKind::Partial { .. }));
    }

    #[test]
    fn inverse_tetrad_resolves_by_index_spaces() {
        let e = parse("q^lam_a q^a_lam").unwrap();
        let ExprKind::Product(f) = &e.kind else { panic!() };
        let (ExprKind::Symbol(x), ExprKind::Symbol(y)) = (&f[0].kind, &f[1].kind) else {
            panic!()
        };
        assert_ne!(x.decl, y.decl);
        assert!(x.decl.is_inverse_pair(&y.decl));
    }

    #[test]
    fn chained_equation() {
        let e = parse("D_mu q^a_lam = d_mu q^a_lam + omega^a_{mu b} q^b_lam - Gamma^nu_{mu lam} q^a_nu = 0").unwrap();
        let ExprKind::Equation(sides) = &e.kind else { panic!() };
        assert_eq!(sides.len(), 3);
        assert!(sides[2].is_zero_literal());
    }

    #[test]
    fn syntax_errors() {
        for bad in [
            "",
            "   ",
            "q^a_",
            "q^{}_mu",
            "(q^a_mu",
            "q^a_mu)",
            "q^a_mu +",
            "= q^a_mu",
            "d_{mu nu} q^a_lam",
            "d_a q^a_lam",
            "q^a_mu ; 3",
            "q^a_mu \u{3bc}",
            "1.2.3",
            "(D^mu d_mu)",
        ] {
            let e = parse(bad).unwrap_err();
            assert_eq!(e.code, Code::Syntax, "{bad:?}: {e}");
            assert!(e.span.start <= e.span.end && e.span.end <= bad.len(), "{bad:?}");
        }
    }

    #[test]
    fn undeclared_and_arity() {
        let e = parse("T^a_mu").unwrap_err();
        assert_eq!(e.code, Code::Undeclared);
        assert_eq!(e.span, Span::new(0, 1));
        let e = parse("omega^a_mu").unwrap_err();
        assert_eq!(e.code, Code::Undeclared);
        assert!(e.message.contains("omega"), "{}", e.message);
        let e = parse("q^mu_nu").unwrap_err();
        assert_eq!(e.code, Code::Undeclared);
    }

    #[test]
    fn deep_nesting_is_rejected_not_overflowed() {
        let s = format!("{}q^a_mu{}", "(".repeat(5000), ")".repeat(5000));
        assert_eq!(parse(&s).unwrap_err().code, Code::Syntax);
        let s = format!("{}q^a_mu", "d_nu ".repeat(5000));
        assert_eq!(parse(&s).unwrap_err().code, Code::Syntax);
    }

    #[test]
    fn unparse_reparses() {
        for src in [
            "d_mu q^a_lam + omega^a_{mu b} q^b_lam - Gamma^nu_{mu lam} q^a_nu",
            "-(q^a_lam - q^a_lam) + 2.5 q^a_lam",
            "(D^mu omega^a_{mu b}) q^b_lam",
            "D^mu (omega^a_{mu b} q^b_lam)",
            "R = q^lam_a d^mu (Gamma^nu_{mu lam} q^a_nu - omega^a_{mu b} q^b_lam)",
            "q^mu_a q^a_nu = delta^mu_nu",
        ] {
            let e = parse(src).unwrap();
            let text = e.to_string();
            let again = parse(&text).unwrap_or_else(|d| panic!("{text}: {d}"));
            assert!(e.same_structure(&again), "{src} -> {text}");
        }
    }
}
