//! Spectral kernels, anisotropic Littlewood-Paley analysis and an
//! anisotropic Navier-Stokes integrator on the periodic 3-torus.
//!
//! The crate is `no_std` (with `alloc`). Enable the `std` feature to use the
//! `rustfft` transform backend.

#![cfg_attr(not(feature = "std"), no_std)]
// NaN must fail range checks, so `!(x > 0.0)` is meant as written.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod data;
pub mod error;
pub mod fft;
pub mod field;
pub mod grid;
pub mod ledger;
pub mod lp;
pub mod norms;
pub mod solver;
pub mod spectral;
pub mod transform;
pub mod verify;

pub use error::{Error, Result};
pub use field::{Band, Field, VecField};
pub use grid::{Grid, Measure};
pub use transform::Transformer;
