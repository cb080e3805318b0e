//! Command-line front end for `hullsolve`: file formats, reports and traces.

pub mod app;
pub mod io;
pub mod report;

pub use app::run;
