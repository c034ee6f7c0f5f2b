//! Line planning toolkit for public transport networks.
//!
//! The crate covers the classic line planning workflow: describe a network
//! and its demand ([`network`]), generate or load a pool of candidate lines,
//! choose lines and frequencies with small MILP formulations
//! ([`formulations`] on top of the deterministic solver in [`milp`]), route
//! passengers at link, line or trip granularity ([`routing`]), and assess
//! the result ([`evaluate`], [`uncertainty`]).
//!
//! Every capability has a runnable example under `examples/`; the `lineplan`
//! binary exposes the same operations as a small CLI.

pub mod cli;
pub mod error;
pub mod evaluate;
pub mod formulations;
pub(crate) mod graph;
pub mod milp;
pub mod network;
pub mod report;
pub mod routing;
pub mod uncertainty;

pub use error::{Error, Result};
