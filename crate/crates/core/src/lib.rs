pub mod curves;
pub mod endoring;
pub mod error;
pub mod ff;
pub mod invariants;
pub mod linalg;
pub mod orders;
pub mod split;

pub use error::{Error, Result};

/// Work caps. Requests beyond them fail with [`Error::Capacity`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest field size enumerated by an exhaustive point count.
    pub max_count: u128,
    /// Largest absolute extension degree [F_{p^N} : F_p] for torsion fields.
    pub max_ext_degree: usize,
    /// Largest torsion field size in bits.
    pub max_field_bits: u64,
    /// Largest number of lattice representatives or subspaces enumerated.
    pub max_enum: u64,
    /// Largest prime used for torsion computations.
    pub max_ell: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_count: 1 << 34, max_ext_degree: 48, max_field_bits: 200, max_enum: 10_000_000, max_ell: 64 }
    }
}
