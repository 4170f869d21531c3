//! Loop language: parsing, pretty-printing and path normalization.
//!
//! The grammar is documented in `docs/loop-grammar.md`.

mod ast;
mod parser;
mod program;

pub use ast::{Ast, BinOp, Decl, Expr, Span, Stmt};
pub use parser::{parse_expr, parse_loop, ParseError};
pub use program::{
    expr_to_ratfun, normalize_paths, parse_poly, parse_poly_std, std_symbol, Assignment, FrontendError, LoopBody,
    LoopProgram, Target,
};
