//! Lexing, parsing and printing of `.acm` model files.

pub mod ast;
mod lexer;
mod parser;
mod printer;

pub use ast::{BinOp, Case, ClassDef, Expr, Init, Literal, Pos, Private, Stmt, StmtKind, UnOp};
pub use lexer::{lex, Keyword, Symbol, Token, TokenKind};
pub use parser::{parse_expr, parse_expr_list, parse_model};
pub use printer::{expr_to_string, expr_to_string_parenthesized, pretty_print};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SyntaxError {
    #[error("{pos}: {message}")]
    Lex { pos: Pos, message: String },
    #[error("{pos}: expected {}, found {found}", expected_list(.expected))]
    Parse { pos: Pos, expected: Vec<String>, found: String },
    #[error("{pos}: {message}")]
    Invalid { pos: Pos, message: String },
}

impl SyntaxError {
    pub(crate) fn lex(pos: Pos, message: String) -> Self {
        SyntaxError::Lex { pos, message }
    }

    pub fn pos(&self) -> Pos {
        match self {
            SyntaxError::Lex { pos, .. } | SyntaxError::Parse { pos, .. } | SyntaxError::Invalid { pos, .. } => *pos,
        }
    }
}

fn expected_list(expected: &[String]) -> String {
    let quoted: Vec<String> = expected
        .iter()
        .map(|e| match e.as_str() {
            "identifier" | "expression" | "literal" | "end of input" => e.clone(),
            _ => format!("`{e}`"),
        })
        .collect();
    match quoted.as_slice() {
        [] => "nothing".to_string(),
        [one] => one.clone(),
        [init @ .., last] => format!("one of {}, {last}", init.join(", ")),
    }
}

/// Lexes and parses a model file.
pub fn parse(source: &str) -> Result<Vec<ClassDef>, SyntaxError> {
    parse_model(&lex(source)?)
}

/// Lexes and parses a single expression.
pub fn parse_expression(source: &str) -> Result<Expr, SyntaxError> {
    parse_expr(&lex(source)?)
}
