//! File formats, reporting and command implementations for the `lsa` tool.

pub mod format;
pub mod pgm;
pub mod report;
pub mod run;
