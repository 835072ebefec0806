//! Coordinate calculus of double velocities, the principal jet group
//! `P¹ₘ = L¹ₘ ⋉ TₘL¹ₘ` and double contact elements, all in one global
//! chart `E = ℝⁿ`.
//!
//! * [`velocity`]: velocities, double velocities, exchange, regularity and
//!   (semi)holonomic predicates, vertical vectors.
//! * [`group`]: `L¹ₘ`, `P¹ₘ` and its semiholonomic, holonomic and curvature
//!   subgroups.
//! * [`action`]: right actions and the transporter solver.
//! * [`contact`]: canonical forms, vertical quotients and the holonomic ⊕
//!   curvature decomposition.
//! * [`oracle`]: polynomial ground truth for all coordinate formulas.
//! * [`codec`]: JSON encodings.
//! * [`sample`] and [`verify`]: seeded generators and randomized property
//!   suites.

pub mod action;
pub mod codec;
pub mod contact;
pub mod error;
pub mod group;
pub mod numeric;
pub mod oracle;
pub mod sample;
pub mod velocity;
pub mod verify;

pub use error::{JetError, Result};
pub use numeric::{Tensor3, DEFAULT_TOL};
