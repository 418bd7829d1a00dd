//! Instance files, dispatch with independent re-verification, corpus generation and
//! benchmarking on top of `submod-core`.

pub mod bench;
pub mod error;
pub mod generate;
pub mod instance;
pub mod q;
pub mod run;
mod tagged;

pub use bench::{bench, load_corpus, BenchOutcome, BenchSummary};
pub use error::{exit, CliError, CliResult};
pub use generate::{generate_corpus, GenParams, FAMILIES};
pub use instance::{build, parse_instance, parse_instances, InstanceFile, Problem};
pub use run::{run, verify_record, ReportRecord, RunOptions, ALGORITHMS};
