//! Shapley values, pairwise and setwise interaction indices for
//! cooperative games, with exact enumeration for small games and seeded
//! Monte Carlo estimators for larger ones.

pub mod axioms;
pub mod coalition;
mod enumerate;
pub mod error;
pub mod game;
mod kernels;
pub mod numeric;
pub mod pairwise;
pub mod par;
pub mod sampling;
pub mod setwise;
pub mod shapley;

pub use axioms::{run_axioms, AxiomConfig, AxiomReport, PropertyRecord};
pub use coalition::{Coalition, MAX_PLAYERS};
pub use error::{Error, Result};
pub use game::{build_game, Game, GameSpec, Oracle, ValueTable, Values};
pub use pairwise::{OrderSpectrum, SingletonCoalitionGame, SpectrumKind};
pub use sampling::Estimate;
pub use setwise::{SignificanceReport, TaylorIndex};
pub use shapley::{Mode, OrderProfile, ShapleyVector};
