//! Exact-arithmetic toolkit for supercharacter theories of unipotent
//! matrix groups over finite fields.
//!
//! The crate builds supercharacter theories (SCTs) of pattern groups,
//! ideal subgroups, and the even-dimensional unipotent orthogonal,
//! symplectic, and unitary groups, both directly from two-sided orbits
//! on dual spaces and via a little-groups construction over lattices of
//! ideal subgroups. A brute-force character-table oracle provides ground
//! truth for verification at desk scale. All arithmetic is exact:
//! finite-field elements are table-driven, character values live in
//! cyclotomic fields with big-rational coefficients.

pub mod cap;
pub mod charfun;
pub mod classical;
pub mod cyclo;
pub mod error;
pub mod field;
pub mod groups;
pub mod linalg;
pub mod littlegroups;
pub mod oracle;
pub mod orbits;
pub mod partitions;
pub mod sct;

pub use error::Error;
