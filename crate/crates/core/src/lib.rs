//! Realization of prescribed sets of lengths in numerical monoids.
//!
//! Given a finite set `L` of integers at least 2 and a count for each, the
//! [`construct`] module builds a finitely generated Puiseux monoid in which 1
//! has exactly that many factorizations of each length, then scales it to a
//! numerical monoid. The [`verify`] module certifies the outcome by
//! exhaustive enumeration with the [`engine`].
//!
//! ```
//! use std::collections::{BTreeMap, BTreeSet};
//! use lengthforge::{construct, verify, Engine};
//!
//! let trace = construct::realize(&BTreeSet::from([2, 3]), &BTreeMap::from([(2, 1), (3, 1)])).unwrap();
//! assert_eq!(trace.target, 777.into());
//! assert!(verify::verify_realization(&Engine::default(), &trace).passed);
//! ```

pub mod arith;
pub mod cli;
pub mod construct;
pub mod engine;
pub mod error;
pub mod monoid;
pub mod verify;

pub use arith::{ExactInteger, ExactRational};
pub use construct::{RealizationTrace, Realizer};
pub use engine::{Engine, ExponentVector, FactorizationSet, LengthProfile, SquarefreeMode};
pub use error::{Error, Result};
pub use monoid::{NumericalMonoid, PuiseuxMonoid, ScalingResult};
pub use verify::VerificationReport;
