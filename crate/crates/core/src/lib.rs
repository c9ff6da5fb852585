//! Genera, fixed-point counts and biellipticity screening for quotients
//! X0(N)/W of the modular curve X0(N) by Atkin-Lehner subgroups.

pub mod atlas;
pub mod error;
pub mod involutions;
pub mod linalg;
pub mod modsym;
pub mod ntheory;
pub mod screening;
pub mod subgroup;
pub mod x0invariants;

pub use error::{Error, Result};
pub use subgroup::AlSubgroup;
