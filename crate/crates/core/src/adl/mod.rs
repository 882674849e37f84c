//! The architecture description language: syntax tree, lexer, parser and
//! cross-reference validation.

pub mod ast;
pub mod diagnostic;
pub mod lexer;
pub mod parser;
pub mod validate;

pub use ast::{
    Check, CheckKind, CheckShape, ComponentLibrary, EntRef, Ident, ProblemSpec, Requirement,
    SetAttr, SetExpr, Span, Template,
};
pub use diagnostic::{has_errors, Diagnostic, Severity};
pub use lexer::{tokenize, Keyword, Token, TokenKind};
pub use parser::{
    merge_libraries, parse_library, parse_library_file, parse_problem, parse_problem_file,
};
pub use validate::validate;
