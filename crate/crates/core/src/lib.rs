//! Oven scheduling: parallel batch machines with attribute-dependent setup
//! times and costs, release dates, due dates, processing-time windows and
//! machine availability intervals.
//!
//! The crate covers the instance model, objective evaluation, feasibility
//! checking, combinatorial lower bounds, a dispatching heuristic, exact
//! solvers and a seeded instance generator.

pub mod bounds;
pub mod error;
pub mod fixtures;
pub mod gen;
pub mod heuristic;
pub mod model;
pub mod objective;
pub mod solve;
pub mod validate;

pub use error::OspError;
pub use model::{Batch, Instance, Interval, Job, Machine, Schedule, SetupMatrix, Time};
pub use objective::{objective, objective_components, Components, ObjectiveReport, Rational, Weights};
