//! Nets of causal loops over finite causal posets.
//!
//! The crate builds the free group of loops on the tangent 1-simplices of a
//! causal poset, quotients it by commutators of causally disjoint loops,
//! assembles the resulting net over the poset, and realises connections
//! through a free scalar field whose Weyl relations are evaluated by
//! quadrature.
//!
//! Modules, bottom up:
//!
//! - [`causet`]: posets, builders, symmetry actions, morphisms
//! - [`simplex`]: 1- and 2-simplices and the nerve
//! - [`loopgrp`]: words, reduction, paths, loops, causal disjointness
//! - [`quotient`]: the causal quotient and its three-valued equality engine
//! - [`net`]: fibres, isotony, causality, covariance
//! - [`cochain`]: test-function cochains, coboundaries, invariant cochains
//! - [`weyl`]: hyperboloid transforms, symplectic form, Weyl elements
//! - [`connection`]: path-frames, connection systems, gauge transformations
//! - [`cli`]: JSON specs and reports behind the `loopnet` binary

pub mod causet;
pub mod cli;
pub mod cochain;
pub mod connection;
pub mod error;
pub mod fixtures;
pub mod loopgrp;
pub mod net;
pub mod quotient;
pub mod simplex;
pub mod weyl;

pub use error::{Error, Result};
