//! Compact indexes over dense day × employee × time activity grids.
//!
//! The building blocks are rank/select bitvectors ([`bits`]) and wavelet
//! trees ([`wavelet`]). A grid is indexed either by a chain of wavelet-tree
//! levels ([`chain`]) whose levels are run-length compressed ([`wtrle`]) or
//! run-removed ([`wtmap`]), or by the run-length [`baseline`].

pub mod baseline;
pub mod bits;
pub mod chain;
pub mod codec;
pub mod error;
pub mod event;
pub mod generator;
pub mod index_file;
pub mod level;
pub mod query;
pub mod wavelet;
pub mod wtmap;
pub mod wtrle;

pub use error::{Error, Result};
