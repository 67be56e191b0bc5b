//! Command-line front end for `loewner-core`: spec parsing, the report
//! pipelines and SVG/CSV output.

pub mod pipeline;
pub mod plot;
pub mod spec;
