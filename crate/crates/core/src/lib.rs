//! A compiler from a first-order subset of Coq's Gallina to Scala.
//!
//! The pipeline is `lexer` → `parser` → `analyzer` → `codegen` → `emitter`.
//! `interpreter` evaluates the same source programs directly and serves as
//! a semantic reference for the generated code.

pub mod analyzer;
pub mod ast;
pub mod cli;
pub mod codegen;
pub mod emitter;
pub mod interpreter;
pub mod lexer;
pub mod parser;
#[cfg(test)]
mod testgen;

pub use analyzer::{analyze, Analyzed, SymbolTable};
pub use ast::{Diagnostic, Program, Severity, Span};
pub use codegen::{translate, TargetUnit};
pub use emitter::{print_source, render};
pub use lexer::tokenize;
pub use parser::parse_program;
