//! All-pairs optimal electric-car routing.
//!
//! Computes the maximum final charge `alpha_B(s,t)` (and the minimum initial
//! charge `beta_0(s,t)`) between every pair of vertices of a directed graph
//! whose arcs may gain or lose battery charge, including graphs with
//! positive-gain cycles. The solver runs in two stages: Stage I synthesizes a
//! table of monotone-path shortcuts by randomized iteration, Stage II turns
//! the shortcuts into a charge-state reachability graph and reads the answers
//! off it. An exact product-graph oracle ships alongside for verification.

pub mod classify;

pub mod gain;
pub mod fileio;
pub mod gen;
pub mod graph;
pub mod oracle;
pub mod table;
pub mod range_tree;
pub mod stage2;
pub mod stage1;


pub use gain::{Charge, Gain};
pub use graph::{ChargeDropSchedule, EnergyGraph, GraphError, Path};
