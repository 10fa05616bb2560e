pub mod cli;
pub mod corpus;
pub mod eval;
pub mod expansion;
pub mod frames;
pub mod kb;
pub mod oracle;
pub mod parser;
pub mod pipeline;
pub mod sexpr;
mod util;

pub use util::normalize_text;
