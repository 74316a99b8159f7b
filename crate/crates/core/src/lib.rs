//! Analysis and simulation of two-agent noncooperative gradient play with
//! loss-averse sensitivities.
//!
//! Each agent climbs its own quadratic payoff with a sensitivity that is low
//! while the payoff falls and high while it rises, so the flow switches among
//! four linear modes `LL`, `HL`, `LH`, `HH` around the Nash equilibrium. The
//! crate builds the phase-indexed mode map, integrates the normalized radial
//! growth rate over one revolution to decide stability, and cross-checks the
//! verdict with an event-driven simulation.
//!
//! ```
//! use nashswitch::game::examples::example2;
//! use nashswitch::stability::{stability_verdict, Verdict};
//!
//! let report = stability_verdict(&example2()).unwrap();
//! assert_eq!(report.verdict, Verdict::Unstable);
//! assert!((report.gamma_rg.unwrap() + 0.3224).abs() < 5e-3);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod game;
pub mod geometry;
pub mod linalg;
pub mod quadrature;
pub mod report;
pub mod simulate;
pub mod stability;

pub use error::{Error, Result};
pub use game::{Agent, Case, Direction, GameSpec, Mode, QuadraticPayoff, Sensitivities};
pub use geometry::{build_mode_map, ModeMap};
pub use simulate::{simulate, SimConfig, Trajectory};
pub use stability::{stability_verdict, StabilityReport, Verdict};
