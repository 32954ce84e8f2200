//! Hierarchical resource allocation for open-access femtocell networks.
//!
//! The allocation runs in three phases, each using only information its
//! node already has:
//!
//! 1. [`load`]: each FAP turns its users' demands and average channel gains
//!    into a subchannel count.
//! 2. [`coloring`]: a central server colors the interference graph, with each
//!    FAP expanded into as many nodes as it requested, and hands out PRBs.
//! 3. [`allocation`]: each FAP shares its PRBs among its users, max-min fair
//!    in demand-normalized rate.
//!
//! [`simulation`] wires the phases into Monte Carlo trials over random
//! placements ([`topology`]) and fading channels ([`channel`]).

pub mod allocation;
pub mod channel;
pub mod coloring;
pub mod config;
pub mod error;
pub mod load;
pub mod lp;
pub mod rate;
pub mod seed;
pub mod simulation;
pub mod topology;

#[cfg(any(test, feature = "oracles"))]
pub mod oracles;

pub use allocation::{achieved_rates, maxmin_allocate, per_prb_rates, Allocation, RateMatrix};
pub use channel::{NoiseParams, PropagationParams};
pub use coloring::{
    assignment_from_coloring, chromatic_number_exact, dsatur_color, expand_graph, greedy_bfs_color,
    Adjacency, AdjacencyList, Coloring, ExpandedGraph, PrbAssignment,
};
pub use config::{ColoringStrategy, EvalMode, SystemConfig};
pub use error::{Error, Result};
pub use load::{estimate_load, LoadEstimate, LoadParams, UserDemand};
pub use rate::RateModel;
pub use simulation::{
    aggregate, prepare_trial, run_channel, run_sweep, run_sweep_point, run_trial,
    run_trial_detailed, SweepPoint, TrialMetrics, TrialRecord,
};
pub use topology::{CellAssignment, InterferenceGraph, Point, Topology};
