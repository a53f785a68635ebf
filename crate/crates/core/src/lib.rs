//! Laboratory for approximate knowledge compilation.
//!
//! The crate implements the objects needed to study how well deterministic
//! decomposable NNF circuits (d-DNNF) can approximate Boolean functions:
//!
//! - [`gf2`]: exact linear algebra over the two-element field, s-goodness of
//!   parity-check matrices, seeded sampling.
//! - [`boolfun`]: explicit truth tables, distributions and the weak/strong
//!   approximation metrics.
//! - [`rect`]: combinatorial rectangles, covers, discrepancy and the
//!   cover-size lower-bound calculators.
//! - [`codes`]: characteristic functions of linear codes, the core extraction
//!   operator and the iterative core-extraction trace.
//! - [`bilinear`]: bilinear forms, conditioning, bilinear extension and the
//!   discrepancy bound checks.
//! - [`nnf`]: d-DNNF circuits, the c2d-style text format, validation, model
//!   counting and rectangle-cover extraction.
//! - [`gen`]: seeded generators for every kind of random instance.
//!
//! Assignments of `n` variables are encoded as unsigned integers with variable
//! `x1` (index 0) at the least-significant bit.

pub mod bilinear;
pub mod boolfun;
pub mod codes;
pub mod error;
pub mod gen;
pub mod gf2;
pub mod nnf;
pub mod rational;
pub mod rect;

pub use error::{Error, Result};
