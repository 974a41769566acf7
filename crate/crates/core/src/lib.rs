//! Solutions of purely exponential equations `a^x + b^y = c^z`.
//!
//! * [`arith`]: exact integer and rational primitives.
//! * [`solver`]: enumeration and counting of `(x, y, z)` under a height bound.
//! * [`exceptional`]: the known triples with two or more solutions.
//! * [`system`]: the system `a^2 + b = c^z`, `a + b^2 = c^Z`, by direct
//!   search and by an exact replay of its case analysis.
//! * [`scan`]: parallel census over a box of bases, with JSONL/TSV output.
//! * [`cli`]: the `expdioph` command line.

pub mod arith;
pub mod cli;
pub mod error;
pub mod exceptional;
pub mod scan;
mod serde_dec;
pub mod solver;
pub mod system;

pub use error::{Error, Result};
