pub mod arith;
pub mod char_sums;
pub mod error;
pub mod experiments;
pub mod field;
pub mod par;
pub mod poly;
pub mod quad_forms;
pub mod rudin_shapiro;
pub mod vaughan;

pub use error::{Error, Result};
pub use field::{FieldCtx, Fq};
pub use poly::{Poly, PolyKind, PolySetSpec, DEFAULT_CAP};
