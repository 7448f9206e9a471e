//! Single-variable function language and second-order forward-mode
//! differentiation.

mod ast;
mod function;
mod jet;
mod parser;

pub use ast::{Expr, Func};
pub use function::{eval_expr, Domain, EvalError, Function1D};
pub use jet::Jet2;
pub use parser::{parse_expr, ParseError, ParseErrorKind};
