//! Complex-valued and dual-number-valued representations of the Heisenberg
//! group on phase-space functions.
//!
//! The crate is layered bottom-up:
//!
//! * [`algebra`]: arithmetic in the algebra spanned by `1, i, ε, iε`;
//! * [`expr`] and [`parse`]: symbolic phase-space expressions with exact
//!   differentiation, evaluated over that algebra;
//! * [`heisenberg`]: the group law on `ℝ³`;
//! * [`representation`]: both representations, their generators and a small
//!   differential-operator algebra;
//! * [`dynamics`]: Weyl quantization, the Poisson bracket and time evolution
//!   of quadratic observables;
//! * [`suites`]: the self-check suites run by the command-line `check`.

pub mod algebra;
pub mod dynamics;
pub mod expr;
pub mod heisenberg;
pub mod parse;
pub mod representation;
pub mod suites;

pub use algebra::DualComplex;
pub use expr::{Env, Expr, Var};
pub use heisenberg::GroupElement;
pub use parse::parse_expr;
pub use representation::{DiffOp, RepParams};
