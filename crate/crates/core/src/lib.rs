//! Bracket algebra, straightening and Grassmann-Cayley tools for deciding
//! whether points lie on a rational normal curve.
//!
//! ```
//! use rnc_core::rnc::{check_membership, random_parameters, sample_moment_curve};
//! use rnc_core::{Method, Verdict};
//!
//! # fn main() -> rnc_core::Result<()> {
//! let config = sample_moment_curve(4, &random_parameters(8, 1), None)?;
//! let report = check_membership(&config, Method::Both)?;
//! assert_eq!(report.verdict, Verdict::InV);
//! # Ok(())
//! # }
//! ```

pub mod bracket;
pub mod coordinatization;
pub mod error;
pub mod gc;
pub mod linalg;
pub mod rational;
pub mod rnc;
pub mod syzygy;
pub mod white;

pub use bracket::{Bracket, BracketMonomial, BracketPolynomial, Label, Sign, SignedBracket};
pub use error::{Error, Result};
pub use gc::{Extensor, GcExpr};
pub use rational::Rational;
pub use rnc::{MembershipReport, Method, PointConfiguration, SubsetI, Verdict};
pub use white::TripleSystem;
