//! Exact generating-function calculator for reduced Gromov–Witten and
//! stable-pairs invariants of K3 and abelian surfaces.
//!
//! - [`series`]: exact truncated Laurent series in one and two variables
//! - [`forms`]: Eisenstein series, the discriminant, the odd theta function,
//!   `S`, and the quasi-Jacobi forms `phi_m`, `phi_{m,n}`
//! - [`surface`]: curve classes, cohomology isomorphisms and exponent bookkeeping
//! - [`gw`]: point/Hodge invariants and the multiple cover formula
//! - [`dr`]: the conjectural double-ramification vertex for K3 surfaces
//! - [`pt`]: the signed multiple cover transform for stable-pairs series

pub mod dr;
pub mod error;
pub mod forms;
pub mod gw;
pub mod pt;
pub mod rat;
pub mod series;
pub mod surface;

pub use error::{Error, Result};
pub use rat::Rat;
pub use series::{BiSeries, Laurent, QLaurent};
