//! HashTag vector MDS erasure codes and their locally repairable derivatives.
//!
//! The crate is organised around five layers:
//!
//! * [`field`] — GF(2^w) arithmetic and dense linear algebra over the field.
//! * [`code`] — HashTag code construction: index-array scheduling, coefficient
//!   assignment, encoding, generator-matrix export and MDS verification.
//! * [`repair`] — any-k decoding, bandwidth-efficient single-node repair
//!   planning/execution and the repair-bandwidth bound calculators.
//! * [`locality`] — the parity-splitting transform producing locally
//!   repairable codes, with local/global repair paths and distance
//!   certification.
//! * [`duality`] / [`globalmix`] — the read-cost model that decides between
//!   the local and global repair paths, and the pairwise-mixing construction
//!   that makes global parity nodes repairable at data-node bandwidth.
//!
//! Everything here is deterministic: randomised constructions are driven by a
//! caller-supplied seed and verified before being returned.

#![cfg_attr(not(feature = "std"), no_std)]
// Gaussian elimination reads much better with explicit row/column indices.
#![allow(clippy::needless_range_loop, clippy::explicit_counter_loop)]

extern crate alloc;

pub mod code;
pub mod duality;
pub mod field;
pub mod globalmix;
pub mod golden;
pub mod locality;
pub mod ratio;
pub mod repair;

mod error;

pub use code::{CodeSpec, IndexArray, IndexPair, MdsMode, MdsReport, NodeVector, Stripe};
pub use duality::{CostModel, RepairDecision, RepairStrategy};
pub use error::{Error, Result};
pub use field::Field;
pub use globalmix::{GlobalLrcSpec, MixCoefficients};
pub use locality::{DistanceReport, LocalityConfig, LrcSpec};
pub use ratio::Ratio;
pub use repair::{
    EquationSource, ReadRequest, RepairMetrics, RepairPlan, SolveStep, ValueRef,
};
