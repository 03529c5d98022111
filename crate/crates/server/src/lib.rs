//! HTTP server and command line around `provenance-core`.

pub mod api;
pub mod cli;
pub mod http_analyzer;

pub use api::router;
pub use cli::{open_platform, serve_with, Cli, CliError};
