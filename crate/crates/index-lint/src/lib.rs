//! Static checker for tensor index expressions written in a small ASCII
//! notation.
//!
//! ```
//! use index_lint::{lint_expr, Code, SymbolTable};
//!
//! let table = SymbolTable::default_table();
//! let diags = lint_expr("D^mu omega^a_{mu b} = 0", &table);
//! assert_eq!(diags[0].code, Code::NonTensorCovDiv);
//!
//! assert!(lint_expr("d_mu q^a_lam + omega^a_{mu b} q^b_lam - Gamma^nu_{mu lam} q^a_nu = 0", &table).is_empty());
//! ```

pub mod ast;
pub mod check;
pub mod corpus;
pub mod diagnostic;
pub mod parser;
pub mod symbols;

pub use ast::{Expr, ExprKind, Index, Sign, SymbolRef, Term};
pub use check::{check_contraction_identity, check_covariant_applicability, check_indices, free_indices, FreeIndex};
pub use corpus::{lint_corpus, parse_declaration, CorpusLine, CorpusReport};
pub use diagnostic::{Code, Diagnostic, Severity, Span};
pub use parser::{parse_expr, MAX_INPUT};
pub use symbols::{label_space, Position, Slot, Space, SymbolDecl, SymbolTable};

/// Parses `text` and runs every check. A parse failure yields the single
/// `E-SYNTAX` or `E-UNDECLARED` diagnostic.
pub fn lint_expr(text: &str, table: &SymbolTable) -> Vec<Diagnostic> {
    match parse_expr(text, table) {
        Ok(expr) => lint_parsed(&expr),
        Err(d) => vec![d],
    }
}

/// All checks over an already parsed expression, ordered by position.
pub fn lint_parsed(expr: &Expr) -> Vec<Diagnostic> {
    let mut diags = check_indices(expr);
    diags.extend(check_covariant_applicability(expr));
    diags.extend(check_contraction_identity(expr));
    diags.sort_by_key(|d| (d.span.start, d.span.end));
    diags
}
