//! Command-line surface of the toolkit: data files, model bundles, reports.
//!
//! File formats:
//!
//! * **pair / table files**: whitespace-separated decimal columns, one
//!   observation per line; blank lines and lines starting with `#` are skipped.
//! * **labels CSV**: `name,label` rows with `label ∈ {1, -1}`; an optional
//!   `name,label` header is ignored. `name` is the pair file's stem.
//! * **model JSON**: see [`bundle`].
//! * **decision-rate CSV**: header `rate,accuracy`, rates `k/N` ascending.
//! * **DOT**: `digraph causal { ... }` with one `"a" -> "b" [label="0.812345"];` per edge.
//! * **bounds CSV**: header `check,index,value,lower,upper,pass`.

pub mod bundle;
pub mod commands;
pub mod error;
pub mod io;
pub mod report;

pub use commands::run;
pub use error::CliError;
