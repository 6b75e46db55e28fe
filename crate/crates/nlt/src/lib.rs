//! File formats, reports and the command-line front end for `nlt-core`.

pub mod cli;
pub mod io;
pub mod report;
