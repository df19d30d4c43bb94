//! Equivalent quasi-norms of Besov-Morrey and Besov-type spaces for
//! grid-sampled functions on `R^d` and on Lipschitz domains.
//!
//! The building blocks are local polynomial oscillations
//! ([`localpoly`]), higher-order differences over admissible step sets
//! ([`differences`]), Morrey norms in ball and dyadic-cube form ([`morrey`]),
//! and a Fourier-side Littlewood-Paley reference ([`lpref`]). The
//! [`spacenorms`] module assembles them into full norms and [`harness`] runs
//! equivalence experiments over a test corpus.

pub mod error;
pub mod geometry;
pub mod gridfn;
pub mod differences;
pub mod localpoly;
pub mod morrey;
pub mod params;
pub mod spacenorms;
pub mod lpref;
pub mod harness;

pub use error::{Error, Result};
