//! Stripe storage, spec file formats and the command-line surface for the
//! HashTag code library.
//!
//! The core crate is IO-free; everything that touches the filesystem or a
//! serialization format lives here: versioned JSON documents for code specs
//! and repair plans, byte/symbol packing, and the node-per-directory stripe
//! store that makes read-op accounting observable at the filesystem
//! boundary.

pub mod format;
pub mod packing;
pub mod store;

use thiserror::Error;

/// Errors from the IO layer, tagged for exit-code mapping.
#[derive(Debug, Error)]
pub enum StoreError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("spec mismatch: stripe was written with spec hash {found}, not {expected}")]
    SpecMismatch { expected: String, found: String },
    #[error("missing: {0}")]
    Missing(String),
    #[error("truncated: {path} holds {got} bytes, expected {want}")]
    Truncated {
        path: String,
        got: u64,
        want: u64,
    },
    #[error("invalid: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] htlrc_core::Error),
}

pub type Result<T> = std::result::Result<T, StoreError>;
