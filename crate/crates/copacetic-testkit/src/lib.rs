//! Test support: brute-force oracles written straight from the axiom
//! definitions (independent of the library's implementation paths), and
//! seeded builders for structured fuzz instances.

pub mod instances;
pub mod oracles;

pub use instances::*;
pub use oracles::*;
