//! Exact-arithmetic toolkit for ergodic averages of Dunford-Schwartz
//! operators over sigma-finite infinite measure models.
//!
//! The library computes decreasing rearrangements and the norms of the
//! classical fully symmetric spaces, simulates Cesaro averages, decides
//! which catalog spaces satisfy the individual ergodic theorem, and - for
//! functions whose positive level sets have infinite measure - synthesizes
//! a Dunford-Schwartz operator together with a finite certificate proving
//! that its averages diverge at a base point.
//!
//! Everything rational is computed exactly; the few genuinely irrational
//! quantities (Luxemburg norms, fractional-power Lorentz weights) are
//! resolved by bisection to an explicit tolerance.

pub mod cli;
pub mod counterexample;
pub mod error;
pub mod measure;
pub mod operators;
pub mod rational;
pub mod rearrangement;
pub mod schema;
pub mod spaces;

pub use counterexample::{
    build_tau_phi, find_level_band, greedy_ns, synthesize, verify_certificate, DrivingSign,
    LevelBand, OscillationCertificate,
};
pub use error::{Error, Result};
pub use measure::{EvSeq, Location, Part, SpaceFunction, SpaceModel};
pub use operators::{DSOperator, DsReport, IndexSet, TauMap};
pub use rational::{Extended, Rational};
pub use rearrangement::{majorizes, rearrange, Rearrangement, Step};
pub use spaces::{
    contains_one, has_iet, has_order_continuous_norm, lorentz_norm, luxemburg_norm, norm_l1,
    norm_l1_cap_linf, norm_l1_plus_linf, norm_linf, LorentzWeight, OrliczFunction, SpaceDescriptor,
};
