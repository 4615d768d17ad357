//! Command-line front end for `cobweb-core`: delimited-text ingestion,
//! fitting and scoring runs with manifests, and a synthetic benchmark.

pub mod bench;
pub mod commands;
pub mod config;
pub mod io;

pub use bench::{BenchReport, BenchmarkSpec};
pub use config::{Manifest, MembershipMode, RunConfig, SigmaArg};
pub use io::{load_csv, load_partition, DataError};
