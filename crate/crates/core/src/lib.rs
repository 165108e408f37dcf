//! Exact differential polynomial algebra and the encoding of two-counter
//! Minsky machines into differential ideal and subalgebra membership.
//!
//! The crate is organized bottom-up:
//!
//! - [`coeff`], [`deriv`] and [`poly`]: exact coefficients, derivative
//!   operators and sparse differential polynomials with their gradings;
//! - [`envop`]: operators of the universal enveloping ring acting on
//!   polynomials;
//! - [`minsky`]: the machine model and interpreter;
//! - [`encoder`]: machine to generator-system compilation;
//! - [`membership`]: certificates, the bounded oracle and the independence
//!   checker;
//! - [`subalgebra`]: transport of ideal membership to subalgebra membership.

pub mod coeff;
pub mod deriv;
pub mod encoder;
pub mod envop;
pub mod error;
pub mod linalg;
pub mod membership;
pub mod minsky;
pub mod poly;
pub mod subalgebra;
mod serde_util;

pub use coeff::{Coeff, CoeffRing};
pub use deriv::DerivOp;
pub use encoder::EncodedSystem;
pub use envop::{EnvOperator, VOperator, WOperator};
pub use error::{Error, Result};
pub use membership::{Certificate, OracleBounds, OracleOutcome};
pub use minsky::{Command, Config, Machine};
pub use poly::{Algebra, Base, DiffPoly, DiffVar, Mode, Monomial, MultiDegree};
pub use subalgebra::{SubExpr, SubalgebraSystem};
