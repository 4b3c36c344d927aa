//! MiniLang: the small statically-typed surface language the corpus is
//! written in, and the syntax snippets are rendered back to.
//!
//! A program is a list of classes, each holding methods whose bodies use
//! `var` declarations, assignments, expression statements, `if`/`else`,
//! `while` and `return`. Expressions are literals, variables, field accesses,
//! method calls, `new` and (in condition position only) `==`.

pub mod ast;
mod lexer;
mod parser;
mod render;
mod resolve;

use thiserror::Error;

pub use ast::{ClassDecl, Expr, ExprKind, Literal, MethodDecl, NodeId, Param, Program, Statement};
pub use parser::{parse_program, parse_statements};
pub use render::{render_expr, render_program, render_statements};
pub use resolve::{resolve_types, Access, ResolvedTy, TypedProgram};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl ParseError {
    fn at(line: u32, col: u32, message: impl Into<String>) -> ParseError {
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }
}
