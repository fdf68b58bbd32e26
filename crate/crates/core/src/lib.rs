//! Epistemic model checking for strategic voting under incomplete knowledge.
//!
//! Elections use positional rules with a tie-break order; knowledge is
//! modelled by profile models (states carrying profiles, one partition per
//! voter). On top of that the crate evaluates epistemic formulas, classifies
//! knowledge of manipulation, searches conditional equilibria and applies
//! announcements and vote declarations.

pub mod builtin;
pub mod dynamics;
pub mod epistemic;
pub mod equilibrium;
pub mod harness;
pub mod error;
pub mod logic;
pub mod manipulation;
pub mod random;
pub mod scenario;
pub mod session;
pub mod voting;

pub use error::{Error, Limits, Result};
