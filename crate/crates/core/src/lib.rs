//! Exact arithmetic toolkit for flat tori and their lattices.

pub mod codes;
pub mod corpus;
pub mod decomposition;
pub mod enumeration;
pub mod error;
pub mod isometry;
pub mod lattice;
pub mod numeric;
pub mod search;
pub mod spectra;
pub mod triplet;

pub use error::{Error, Result};
