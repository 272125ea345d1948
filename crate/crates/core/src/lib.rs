//! Fat-pixel automata, quadtree iterated function systems and Haar zerotrees.
//!
//! The crate renders weighted automata over the quadtree ([`wfa`]), encodes any
//! image exactly as a single fat pixel ([`exact`]), decodes quadtree IFS on a
//! pixel grid ([`ifs`]), compiles such a system into an automaton whose renders
//! match the grid decoder iteration by iteration ([`convert`]), and checks the
//! zerotree structure of Haar coefficients of the resulting images ([`zerotree`]).
//! Text and PGM file formats live in [`formats`].

pub mod address;
pub mod convert;
pub mod error;
pub mod exact;
pub mod formats;
pub mod ifs;
pub mod image;
pub mod matrix;
pub mod sampling;
pub mod wfa;
pub mod zerotree;

pub use address::{QuadAddress, Quadrant};
pub use error::{Error, FormatIssue, Result};
pub use ifs::{QuadIfs, QuadMap};
pub use image::Image;
pub use matrix::ProjectionMatrix;
pub use wfa::{FatPixel, Wfa};
