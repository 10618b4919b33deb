//! Lint rules over a parsed expression.

use std::collections::BTreeMap;

use crate::ast::{Expr, ExprKind, Index, Sign, SymbolRef, Term};
use crate::diagnostic::{Code, Diagnostic, Span};
use crate::symbols::{Position, Space};

/// Spacetime dimension: the value of a full tetrad/inverse-tetrad contraction.
pub const DIMENSION: u32 = 4;

/// A free index of an expression.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FreeIndex {
    pub label: String,
    pub position: Position,
}

impl FreeIndex {
    fn of(i: &Index) -> Self {
        Self {
            label: i.label.clone(),
            position: i.position,
        }
    }
}

pub fn format_free(set: &[FreeIndex]) -> String {
    let items: Vec<String> = set
        .iter()
        .map(|f| format!("{}{}", f.label, if f.position == Position::Upper { "^" } else { "_" }))
        .collect();
    format!("{{{}}}", items.join(", "))
}

/// Result of index analysis on one node.
struct Indices {
    free: Vec<FreeIndex>,
    /// A literal zero balances against any free-index set.
    wildcard: bool,
}

fn contract(occs: Vec<(FreeIndex, Span)>, diags: &mut Vec<Diagnostic>) -> Vec<FreeIndex> {
    let mut by_label: BTreeMap<&str, Vec<&(FreeIndex, Span)>> = BTreeMap::new();
    for o in &occs {
        by_label.entry(o.0.label.as_str()).or_default().push(o);
    }
    let mut free = Vec::new();
    for (label, group) in by_label {
        match group.as_slice() {
            [one] => free.push(one.0.clone()),
            [x, y] if x.0.position != y.0.position => {}
            [x, y] => {
                diags.push(Diagnostic::new(
                    Code::DummyMisuse,
                    x.1.join(y.1),
                    format!(
                    "index `{label}` is repeated in the same ({}) position; a dummy pair needs one upper and one lower",
                    if x.0.position == Position::Upper { "upper" } else { "lower" }
                ),
                ))
            }
            many => diags.push(Diagnostic::new(
                Code::DummyMisuse,
                many.iter().fold(many[0].1, |s, o| s.join(o.1)),
                format!("index `{label}` appears {} times in one term", many.len()),
            )),
        }
    }
    free.sort();
    free
}

fn analyze(e: &Expr, diags: &mut Vec<Diagnostic>) -> Indices {
    match &e.kind {
        ExprKind::Scalar(v) => Indices {
            free: Vec::new(),
            wildcard: *v == 0.0,
        },
        ExprKind::Symbol(s) => {
            let occs = s.indices.iter().map(|i| (FreeIndex::of(i), i.span)).collect();
            Indices {
                free: contract(occs, diags),
                wildcard: false,
            }
        }
        ExprKind::Partial { index, operand } | ExprKind::Covariant { index, operand } => {
            let inner = analyze(operand, diags);
            let mut occs: Vec<(FreeIndex, Span)> = vec![(FreeIndex::of(index), index.span)];
            occs.extend(inner.free.into_iter().map(|f| (f, operand.span)));
            Indices {
                free: contract(occs, diags),
                wildcard: inner.wildcard,
            }
        }
        ExprKind::Product(factors) => {
            let mut occs = Vec::new();
            let mut wildcard = false;
            for f in factors {
                let inner = analyze(f, diags);
                wildcard |= inner.wildcard;
                occs.extend(inner.free.into_iter().map(|x| (x, f.span)));
            }
            Indices {
                free: contract(occs, diags),
                wildcard,
            }
        }
        ExprKind::Sum(terms) => {
            let sides: Vec<&Expr> = terms.iter().map(|t| &t.expr).collect();
            balance(&sides, "term", diags)
        }
        ExprKind::Equation(sides) => {
            let sides: Vec<&Expr> = sides.iter().collect();
            balance(&sides, "side", diags)
        }
    }
}

fn balance(parts: &[&Expr], what: &str, diags: &mut Vec<Diagnostic>) -> Indices {
    let mut reference: Option<Vec<FreeIndex>> = None;
    for part in parts {
        let ix = analyze(part, diags);
        if ix.wildcard && ix.free.is_empty() {
            continue;
        }
        match &reference {
            None => reference = Some(ix.free),
            Some(r) if *r == ix.free => {}
            Some(r) => diags.push(Diagnostic::new(
                Code::FreeIndexMismatch,
                part.span,
                format!(
                    "free indices {} of this {what} differ from {}",
                    format_free(&ix.free),
                    format_free(r)
                ),
            )),
        }
    }
    match reference {
        Some(free) => Indices { free, wildcard: false },
        None => Indices {
            free: Vec::new(),
            wildcard: true,
        },
    }
}

/// Free and dummy index well-formedness. An empty list means index-legal.
pub fn check_indices(expr: &Expr) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    analyze(expr, &mut diags);
    diags
}

/// Free indices of an expression (sorted), ignoring diagnostics.
pub fn free_indices(expr: &Expr) -> Vec<FreeIndex> {
    analyze(expr, &mut Vec::new()).free
}

/// `E-NONTENSOR-COVDIV` for every covariant derivative whose operand contains
/// a non-tensorial symbol outside a recognised covariant-derivative expansion.
pub fn check_covariant_applicability(expr: &Expr) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    expr.walk(&mut |node| {
        if let ExprKind::Covariant { index, operand } = &node.kind {
            let mut bare = Vec::new();
            bare_nontensors(operand, &mut bare);
            if !bare.is_empty() {
                bare.dedup();
                let names: Vec<String> = bare.iter().map(|n| format!("`{n}`")).collect();
                diags.push(Diagnostic::new(
                    Code::NonTensorCovDiv,
                    node.span,
                    format!(
                        "covariant derivative D{}{} applied to {} which {} not a tensor",
                        index.position.marker(),
                        index.label,
                        names.join(", "),
                        if names.len() == 1 { "is" } else { "are" }
                    ),
                ));
            }
        }
    });
    diags
}

fn bare_nontensors<'a>(e: &'a Expr, out: &mut Vec<&'a str>) {
    match &e.kind {
        ExprKind::Symbol(s) => {
            if !s.decl.tensorial {
                out.push(&s.name);
            }
        }
        ExprKind::Scalar(_) => {}
        ExprKind::Sum(terms) => {
            if covariant_expansion_of(terms).is_none() {
                terms.iter().for_each(|t| bare_nontensors(&t.expr, out));
            }
        }
        ExprKind::Partial { operand, .. } | ExprKind::Covariant { operand, .. } => bare_nontensors(operand, out),
        ExprKind::Product(xs) | ExprKind::Equation(xs) => xs.iter().for_each(|x| bare_nontensors(x, out)),
    }
}

/// If `terms` spell out `D_mu T` for a tensorial symbol `T`, i.e.
///
/// ```text
/// d_mu T^..a.._..l.. + C^a_{mu b} T^..b.. - C^n_{mu l} T_..n.. (one term per slot)
/// ```
///
/// with the connection `C` matching each slot's index space, returns `T`.
pub fn covariant_expansion_of(terms: &[Term]) -> Option<&SymbolRef> {
    let (deriv_pos, mu, target) = terms.iter().enumerate().find_map(|(i, t)| match &t.expr.kind {
        ExprKind::Partial { index, operand } if t.sign == Sign::Plus && index.position == Position::Lower => {
            match &operand.kind {
                ExprKind::Symbol(s) if s.decl.tensorial => Some((i, index, s)),
                _ => None,
            }
        }
        _ => None,
    })?;
    if terms.len() != target.indices.len() + 1 {
        return None;
    }
    let mut used = vec![false; terms.len()];
    used[deriv_pos] = true;
    for (slot, idx) in target.indices.iter().enumerate() {
        let want_sign = match idx.position {
            Position::Upper => Sign::Plus,
            Position::Lower => Sign::Minus,
        };
        let hit = terms
            .iter()
            .enumerate()
            .position(|(i, t)| !used[i] && t.sign == want_sign && is_connection_term(&t.expr, mu, target, slot))?;
        used[hit] = true;
    }
    Some(target)
}

fn is_connection_term(e: &Expr, mu: &Index, target: &SymbolRef, slot: usize) -> bool {
    let ExprKind::Product(factors) = &e.kind else {
        return false;
    };
    let [x, y] = factors.as_slice() else { return false };
    let (ExprKind::Symbol(x), ExprKind::Symbol(y)) = (&x.kind, &y.kind) else {
        return false;
    };
    let (conn, moved) = if x.decl.connection_space().is_some() {
        (x, y)
    } else {
        (y, x)
    };
    let Some(conn_space) = conn.decl.connection_space() else {
        return false;
    };
    let slot_idx = &target.indices[slot];
    if !conn_space.accepts(slot_idx.space()) {
        return false;
    }
    // `moved` is the target with this slot renamed to a dummy
    if moved.name != target.name || moved.decl != target.decl || moved.indices.len() != target.indices.len() {
        return false;
    }
    for (k, (a, b)) in moved.indices.iter().zip(&target.indices).enumerate() {
        if k != slot && (a.label != b.label || a.position != b.position) {
            return false;
        }
    }
    let dummy = &moved.indices[slot];
    if dummy.position != slot_idx.position || dummy.label == slot_idx.label {
        return false;
    }
    let [c_up, c_mid, c_low] = conn.indices.as_slice() else {
        return false;
    };
    let (outer, inner) = match slot_idx.position {
        // + C^a_{mu b} T^b
        Position::Upper => (slot_idx, dummy),
        // - C^n_{mu l} T_n
        Position::Lower => (dummy, slot_idx),
    };
    if c_up.label != outer.label {
        return false;
    }
    let pair = (c_mid.label.as_str(), c_low.label.as_str());
    let ordered = pair == (mu.label.as_str(), inner.label.as_str());
    // a torsion-free coordinate connection may carry its lower indices in either order
    let swapped = conn_space == Space::Coordinate && pair == (inner.label.as_str(), mu.label.as_str());
    ordered || swapped
}

/// `W-CONTRACTION-IDENTITY` when an equation sets a full two-factor
/// contraction equal to the literal 1.
pub fn check_contraction_identity(expr: &Expr) -> Vec<Diagnostic> {
    let ExprKind::Equation(sides) = &expr.kind else {
        return Vec::new();
    };
    let has_one = sides.iter().any(|s| matches!(s.kind, ExprKind::Scalar(v) if v == 1.0));
    if !has_one {
        return Vec::new();
    }
    let mut diags = Vec::new();
    for side in sides {
        let ExprKind::Product(factors) = &side.kind else {
            continue;
        };
        let [x, y] = factors.as_slice() else { continue };
        let (ExprKind::Symbol(a), ExprKind::Symbol(b)) = (&x.kind, &y.kind) else {
            continue;
        };
        if a.indices.is_empty() || !is_full_contraction(a, b) {
            continue;
        }
        let message = if a.decl.is_inverse_pair(&b.decl) {
            format!(
                "`{side}` contracts a tensor with its inverse over both indices; this is the trace of the Kronecker delta and equals the dimension {DIMENSION}, not 1"
            )
        } else {
            format!("`{side}` is a full contraction, a scalar field that is not identically 1")
        };
        diags.push(Diagnostic::new(Code::ContractionIdentity, side.span, message));
    }
    diags
}

fn is_full_contraction(a: &SymbolRef, b: &SymbolRef) -> bool {
    let mut counts: BTreeMap<&str, (u32, u32)> = BTreeMap::new();
    for i in a.indices.iter().chain(&b.indices) {
        let c = counts.entry(i.label.as_str()).or_default();
        match i.position {
            Position::Upper => c.0 += 1,
            Position::Lower => c.1 += 1,
        }
    }
    counts.values().all(|&c| c == (1, 1))
}
