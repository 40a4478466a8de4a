//! Simple unitarizable modules of the quantized function algebra of
//! SO(2n+1): Weyl group combinatorics, weighted shift operator calculus,
//! diagram calculus, and Gelfand-Kirillov growth certificates.

pub mod error;
pub mod cli;
pub mod diagrams;
pub mod growth;
pub mod qoperators;
pub mod repsoq;
pub mod weylb;

pub use error::{Error, Result};
