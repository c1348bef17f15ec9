pub mod ast;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod span;

pub use parser::{parse_expr, parse_formula, parse_source, ParseError};
pub use printer::print_unit;
pub use span::{line_col, Span};
