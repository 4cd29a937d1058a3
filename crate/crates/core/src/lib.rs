//! Low Rank Parity Check (LRPC) codes over 𝔽_{q^m}.
//!
//! Layers, bottom up: [`field`] arithmetic, [`subspace`] algebra, the ideal
//! ring [`ring`], codes and the basic decoder in [`lrpc`], syndrome-space
//! expansion in [`expansion`], the [`crypto`] KEM and PKE, closed-form
//! [`analysis`], and Monte Carlo experiments in [`sim`].

pub mod analysis;
pub mod crypto;
pub mod error;
pub mod expansion;
pub mod field;
pub mod lrpc;
pub mod matrix;
pub mod params;
pub mod ring;
pub mod sim;
pub mod subspace;

pub use error::{Error, Result};
