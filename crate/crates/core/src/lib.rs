//! Exact and predicted 2-adic valuations of class numbers attached to a
//! prime p: the imaginary quadratic field Q(sqrt(-2p)) and the pure quartic
//! field Q(p^(1/4)).
//!
//! The library has three layers:
//!
//! * arithmetic kernels ([`modular`], [`zsqrt2`], [`realquad`]): residue
//!   symbols, canonical decompositions p = u^2 - 2v^2, continued fractions
//!   and fundamental units;
//! * an exact class-number oracle ([`formclass`]) by enumeration of reduced
//!   binary quadratic forms;
//! * residue criteria ([`criteria`]) predicting ord_2(h(-2p)) and
//!   ord_2(h_K), cross-validated against the oracle by the campaign
//!   drivers in [`batch`].
//!
//! ord_2(h(-2p)) is decidable from residue symbols except when it is at
//! least 4; ord_2(h_K) predictions additionally support a conjectured
//! refinement (16 | h(-2p) iff 4 exactly divides h_K, for p = 15 mod 16)
//! that the census commands quantify but never present as a theorem.

pub mod batch;
pub mod criteria;
pub mod error;
pub mod formclass;
pub mod modular;
pub mod realquad;
pub mod zsqrt2;

pub use error::{Error, Result};
pub use modular::Symbol;
