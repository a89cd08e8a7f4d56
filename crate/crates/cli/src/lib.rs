//! Command-line front end for the geared-mechanism velocity analyses:
//! argument handling, the analysis report and its renderings.

pub mod app;
pub mod report;
