//! Satisfiability checking for TPTL and bounded TPTL with past using a
//! one-pass tree-shaped tableau.

pub mod cli;
pub mod formula;
pub mod model;
pub mod shift;
pub mod syntax;
pub mod tableau;
pub mod translate;

pub use formula::{Bound, Formula, Logic};
pub use syntax::{parse, print, ParseError, SourceFormula};
