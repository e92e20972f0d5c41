//! The `.dynp` program format and modification scripts.

mod lexer;
mod parser;
mod printer;
mod script;

pub use parser::{parse_formula, parse_program};
pub use printer::print_program;
pub use script::{parse_script, print_script, Script};
