//! Natural invariants of linear differential operators: invariant frames,
//! coordinate-free models, and equivalence checks between sampled models.

mod equiv;
mod expr;
mod frame;
mod model;

pub use equiv::*;
pub use expr::*;
pub use frame::*;
pub use model::*;
