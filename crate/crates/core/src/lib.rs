//! Exact computations on curves over finite fields: divisor class groups,
//! Riemann–Roch spaces, split maximal orders in matrix algebras, section
//! quadratic spaces, and the finite class-group quotients that classify
//! spinor genera of lattices and orders.

pub mod error;
pub mod field;
pub mod linalg;
pub mod poly;
pub mod abelian;
pub mod curve;
pub mod function;
pub mod series;
pub mod divisor;
pub mod picard;
pub mod riemann_roch;
pub mod sheaf;
pub mod quadratic;
pub mod spinor;
pub mod parse;
pub mod checks;
pub mod selftest;
pub mod cli;
