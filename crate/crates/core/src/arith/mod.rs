//! Exact arithmetic: finite fields, `A = F_q[T]`, rational functions with
//! expansions at infinity, and the cyclotomic coefficient ring.

pub mod cyclo;
pub mod field;
pub mod laurent;
pub mod poly;

pub use cyclo::{Character, Cyclo, Mode};
pub use field::{Fe, Field};
pub use laurent::{LaurentPoly, RatFn};
pub use poly::Poly;
