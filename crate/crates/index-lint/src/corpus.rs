//! Line-oriented corpus files.
//!
//! ```text
//! # comment
//! tensor  T[^frame _coord]
//! nontensor A[^coord _coord _coord]
//! scalar  phi
//! d_mu T^a_nu = 0
//! ```
//!
//! Each non-blank, non-comment line is a declaration or one expression.
//! Declarations add to the default symbol table and take effect from the
//! line on which they appear.

use std::fmt;

use crate::diagnostic::{Code, Diagnostic, Severity, Span};
use crate::symbols::{Position, Slot, Space, SymbolDecl, SymbolTable};

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusLine {
    /// 1-based line number.
    pub line: usize,
    /// 1-based byte column of the diagnostic start.
    pub column: usize,
    pub diagnostic: Diagnostic,
}

impl fmt::Display for CorpusLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{} {} {}",
            self.line,
            self.column,
            self.diagnostic.code.as_str(),
            self.diagnostic.message
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CorpusReport {
    pub diagnostics: Vec<CorpusLine>,
    pub expressions: usize,
    pub declarations: usize,
}

impl CorpusReport {
    pub fn errors(&self) -> usize {
        self.diagnostics.iter().filter(|d| d.diagnostic.is_error()).count()
    }

    pub fn warnings(&self) -> usize {
        self.diagnostics
            .iter()
            .filter(|d| d.diagnostic.severity() == Severity::Warning)
            .count()
    }
}

const DECL_KEYWORDS: [&str; 3] = ["tensor", "nontensor", "scalar"];

fn is_declaration(line: &str) -> bool {
    let first = line.split(|c: char| c.is_whitespace()).next().unwrap_or("");
    DECL_KEYWORDS.contains(&first)
}

/// Parses `tensor name[^frame _coord]`, `nontensor name[...]` or `scalar name`.
pub fn parse_declaration(line: &str) -> Result<SymbolDecl, Diagnostic> {
    let err = |msg: String| Diagnostic::new(Code::Syntax, Span::new(0, line.len()), msg);
    let trimmed = line.trim();
    let (kind, rest) = trimmed
        .split_once(char::is_whitespace)
        .ok_or_else(|| err("declaration needs a name".into()))?;
    let rest = rest.trim();
    let (name, slots_src) = match rest.find('[') {
        Some(i) => {
            let body = rest[i + 1..]
                .strip_suffix(']')
                .ok_or_else(|| err("slot list must end with `]`".into()))?;
            (rest[..i].trim(), Some(body))
        }
        None => (rest, None),
    };
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric()) || name.as_bytes()[0].is_ascii_digit() {
        return Err(err(format!("invalid symbol name `{name}`")));
    }
    let mut slots = Vec::new();
    for tok in slots_src.unwrap_or("").split_whitespace() {
        let (position, space) = tok.split_at(tok.len().min(1));
        let position = match position {
            "^" => Position::Upper,
            "_" => Position::Lower,
            _ => return Err(err(format!("slot `{tok}` must start with `^` or `_`"))),
        };
        let space = match space {
            "frame" => Space::Frame,
            "coord" => Space::Coordinate,
            "any" => Space::Any,
            _ => return Err(err(format!("unknown index space in slot `{tok}`"))),
        };
        slots.push(Slot::new(position, space));
    }
    match kind {
        "scalar" if slots_src.is_some() => Err(err("a scalar takes no slots".into())),
        "scalar" => Ok(SymbolDecl::scalar(name)),
        "tensor" | "nontensor" if slots.is_empty() => Err(err(format!("`{kind}` needs at least one slot"))),
        "tensor" => Ok(SymbolDecl::tensor(name, &slots)),
        "nontensor" => Ok(SymbolDecl::nontensor(name, &slots)),
        _ => Err(err(format!("unknown declaration kind `{kind}`"))),
    }
}

/// Lints every line of a corpus file.
pub fn lint_corpus(text: &str) -> CorpusReport {
    let mut table = SymbolTable::default_table();
    let mut report = CorpusReport::default();
    for (n, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let lead = content.len() - content.trim_start().len();
        let body = content.trim();
        let mut push = |d: Diagnostic| {
            let d = d.offset(lead);
            report.diagnostics.push(CorpusLine {
                line: n + 1,
                column: d.span.start + 1,
                diagnostic: d,
            })
        };
        if is_declaration(body) {
            match parse_declaration(body) {
                Ok(decl) => {
                    table.declare(decl);
                    report.declarations += 1;
                }
                Err(d) => push(d),
            }
        } else {
            report.expressions += 1;
            crate::lint_expr(body, &table).into_iter().for_each(push);
        }
    }
    report
}
