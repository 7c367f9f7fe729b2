//! Finite-size entropy accumulation bounds together with the quantum Rényi
//! divergence and divergence-variance toolkit they rest on.
//!
//! The crate is organised bottom-up: [`linalg`] supplies dense complex
//! linear algebra, [`states`] builds density operators, [`divergences`] and
//! [`variance`] evaluate entropic quantities, [`continuity`] gives the
//! explicit second-order remainder, [`eat`] turns tradeoff-function
//! statistics into min-entropy bounds and [`dire`] applies everything to
//! CHSH-based randomness expansion. [`verify`] runs the structural identities
//! as seeded property suites.

pub mod continuity;
pub mod dire;
pub mod divergences;
pub mod eat;
pub mod error;
pub mod linalg;
pub mod states;
pub mod variance;
pub mod verify;

pub use error::{Error, Result};
