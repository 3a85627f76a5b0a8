//! LaTeX handling: tokenizer, context walker, sanitizer and linter.

pub mod context;
pub mod lexer;
pub mod lint;
pub mod sanitize;

pub use lexer::{lex, Lexed, Span, Token, TokenKind};
