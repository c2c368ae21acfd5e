//! Lines, extremal constructions and exact search for the
//! no-three-in-line problem on the discrete torus `T(m x n)`.
//!
//! - [`torus`]: dimensions, points, the projections `π` and `ρ`, and the
//!   collinearity determinant.
//! - [`lines`]: exact line objects, enumeration and the collinearity
//!   predicate.
//! - [`constructions`]: explicit extremal sets and the dispatcher that
//!   certifies `τ(T(m x n))` where a closed form is known.
//! - [`solver`]: verification, pruned exact search and a brute-force
//!   oracle.
//! - [`oracle`]: slow reference implementations used by the test suites
//!   and the CLI self-test.

pub mod arith;
mod bits;
pub mod constructions;
pub mod error;
pub mod lines;
pub mod oracle;
pub mod solver;
pub mod torus;

pub use constructions::{construct_max, Provenance, Tau, TauResult};
pub use error::{Error, Result};
pub use lines::{torus_collinear, Direction, LineSpace, PencilLine, TorusLine};
pub use solver::{max_no3il, verify_no3il, SearchLimits, SearchStats, Verdict};
pub use torus::{Configuration, PlanePoint, TorusDims, TorusPoint};
