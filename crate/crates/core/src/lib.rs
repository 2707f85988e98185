//! Symbolic symmetry analysis of geodesic equations.
//!
//! The crate is layered bottom-up:
//!
//! * [`symexpr`] — exact expression kernel (canonical rational-function form);
//! * [`linalg`] — exact rational linear algebra;
//! * [`geometry`] — metrics, Christoffel symbols, geodesic equations;
//! * [`jets`] — total derivatives and prolongations;
//! * [`symmetry`] — Noether and Lie point symmetries;
//! * [`liealg`] — structure constants, Killing form, Levi checks, adjoint maps;
//! * [`optimal`] — one-dimensional optimal systems;
//! * [`io`] — metric and generator file formats.

pub mod symexpr;
pub mod geometry;
pub mod jets;
pub mod linalg;
pub mod symmetry;
pub mod liealg;
pub mod optimal;
pub mod io;
