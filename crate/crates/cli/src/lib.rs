//! Library side of the `flrw-bgk` command-line tool.
//!
//! Exit codes: 0 success, 1 failed verification or an I/O error, 2 malformed
//! or out-of-range configuration, 3 a numerical failure such as moments
//! outside the Bose-Einstein admissible range.

pub mod commands;
pub mod config;
pub mod output;

use std::env;
use std::path::PathBuf;

use thiserror::Error;

/// Environment variable naming the directory that receives run outputs.
pub const OUT_ROOT_ENV: &str = "FLRW_BGK_OUT";
pub const DEFAULT_OUT_ROOT: &str = "out";

pub fn out_root() -> PathBuf {
    env::var_os(OUT_ROOT_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_ROOT))
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Math(flrw_bgk::Error),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("{0} verification check(s) failed")]
    VerifyFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Math(_) => 3,
            CliError::Io(_) | CliError::VerifyFailed(_) => 1,
        }
    }
}
