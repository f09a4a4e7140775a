//! Cooperative path planning for a team of UAVs flying in formation.
//!
//! Planning is cast as a stag-hunt game: every vehicle is a player whose
//! strategy is a 3D path and whose cost mixes a single-vehicle term (length,
//! threat clearance, altitude, turning and climbing smoothness) with a
//! graph-based formation term. A game-based spherical-vector PSO searches for
//! an allocation of paths that no player can improve without another player
//! losing out.
//!
//! ```
//! use stagplan::{planner, scenario::{builtin_scenario, BuiltinId}, spso::PsoConfig};
//!
//! let scenario = builtin_scenario(BuiltinId::Scenario1);
//! let cfg = PsoConfig { n_pop: 20, max_it: 10, seed: 7, ..PsoConfig::default() };
//! let result = planner::plan_game(&scenario, &cfg).unwrap();
//! assert_eq!(result.best_allocation.strategies.len(), 3);
//! ```
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cost;
pub mod error;
pub mod formation;
pub mod game;
pub mod geometry;
pub mod par;
pub mod planner;
pub mod report;
pub mod scenario;
pub mod singlecost;
pub mod spso;

pub use cost::Cost;
pub use error::{Error, Result};
pub use game::{Allocation, CostVector};
pub use geometry::Vec3;
pub use scenario::Scenario;
pub use singlecost::Path;
