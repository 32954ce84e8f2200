//! End-to-end trials and Monte Carlo aggregation.
//!
//! A trial is one topology plus one channel realization:
//!
//! 1. place FAPs and users, draw large-scale link states, select cells;
//! 2. every FAP estimates its load from average gains;
//! 3. the server colors the demand-expanded interference graph;
//! 4. every FAP draws per-PRB fading on its granted PRBs and solves its
//!    max-min allocation;
//! 5. rates are measured (noise-only, or with co-channel interference in
//!    SINR mode) and summarized.
//!
//! Steps 1-3 depend only on the topology seed and are shared across the
//! channel draws of a topology.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::allocation::{achieved_rates, maxmin_allocate, per_prb_rates, Allocation};
use crate::channel::{draw_fading, ChannelRealization};
use crate::coloring::{
    assignment_from_coloring, dsatur_color, expand_graph, greedy_bfs_color, Coloring, PrbAssignment,
};
use crate::config::{ColoringStrategy, EvalMode, SystemConfig};
use crate::error::Result;
use crate::load::{estimate_load, LoadEstimate, LoadParams, UserDemand};
use crate::rate::RateModel;
use crate::seed::{self, Purpose};
use crate::topology::{
    assign_users, average_gains, build_interference_graph, draw_link_states, generate_topology,
    CellAssignment, GainMatrix, InterferenceGraph, Topology,
};

/// Everything decided from long-term statistics for one topology.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialSetup {
    pub topology: Topology,
    pub avg_gains: GainMatrix,
    pub cells: CellAssignment,
    pub interference: InterferenceGraph,
    pub loads: Vec<LoadEstimate>,
    /// Integer PRB demand per FAP.
    pub demands: Vec<usize>,
    pub coloring: Coloring,
    pub prbs: PrbAssignment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialMetrics {
    /// Achieved rate per user, bits/s.
    pub rates: Vec<f64>,
    pub outage_rate: f64,
    pub min_rate: f64,
    pub max_rate: f64,
}

impl TrialMetrics {
    pub fn from_rates(rates: Vec<f64>, demand_bps: f64, outage_fraction: f64) -> Self {
        let threshold = outage_fraction * demand_bps;
        let (outage_rate, min_rate, max_rate) = if rates.is_empty() {
            (0.0, 0.0, 0.0)
        } else {
            let short = rates.iter().filter(|&&r| r < threshold).count();
            (
                short as f64 / rates.len() as f64,
                rates.iter().copied().fold(f64::INFINITY, f64::min),
                rates.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            )
        };
        TrialMetrics {
            rates,
            outage_rate,
            min_rate,
            max_rate,
        }
    }
}

/// Per-FAP result of the channel phase.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialOutcome {
    /// One allocation per FAP over its granted PRBs; users in the order of
    /// `cells.served_users[l]`.
    pub allocations: Vec<Allocation>,
    pub metrics: TrialMetrics,
}

/// A fully traced trial, for JSON audit dumps.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialRecord {
    pub topology_seed: u64,
    pub channel_seed: u64,
    pub config: SystemConfig,
    pub setup: TrialSetup,
    pub outcome: TrialOutcome,
}

pub fn load_params(cfg: &SystemConfig) -> LoadParams {
    LoadParams {
        rate: RateModel::from_config(cfg),
        w_max: cfg.n_prbs_femto as f64,
    }
}

/// Runs the long-term phases for the topology drawn from `topology_seed`.
pub fn prepare_trial(cfg: &SystemConfig, topology_seed: u64) -> Result<TrialSetup> {
    cfg.validate()?;
    let mut rng = seed::rng(topology_seed);
    let topology = generate_topology(cfg, &mut rng)?;
    let links = draw_link_states(&topology, &cfg.propagation, &mut rng);
    let avg_gains = average_gains(&topology, &cfg.propagation, &links)?;
    let cells = assign_users(&avg_gains);
    let interference = build_interference_graph(&topology);

    let params = load_params(cfg);
    let p_max = cfg.p_max_w();
    let loads: Vec<LoadEstimate> = cells
        .served_users
        .par_iter()
        .enumerate()
        .map(|(l, users)| {
            let demands: Vec<UserDemand> = users
                .iter()
                .map(|&k| UserDemand {
                    rate_bps: cfg.demand_bps,
                    avg_gain: avg_gains.get(l, k),
                })
                .collect();
            estimate_load(&demands, p_max, &params)
        })
        .collect();
    let demands: Vec<usize> = loads.iter().map(|e| e.n_l_int).collect();

    let expanded = expand_graph(&interference, &demands);
    let coloring = match cfg.coloring_strategy {
        ColoringStrategy::Dsatur => dsatur_color(&expanded, cfg.n_prbs_femto),
        ColoringStrategy::Bfs => greedy_bfs_color(&expanded, cfg.n_prbs_femto),
    };
    let prbs = assignment_from_coloring(&expanded, &coloring);

    Ok(TrialSetup {
        topology,
        avg_gains,
        cells,
        interference,
        loads,
        demands,
        coloring,
        prbs,
    })
}

/// Fading of link (`fap`, `user`) on every femtocell PRB for one channel
/// realization. Each link has its own sub-stream, so any subset of links can
/// be drawn in any order.
pub fn link_fading(channel_seed: u64, fap: usize, user: usize, n_prbs: usize) -> Vec<f64> {
    let s = seed::derive(
        channel_seed,
        Purpose::LinkFading,
        &[fap as u64, user as u64],
    );
    draw_fading(n_prbs, &mut seed::rng(s))
}

fn link_gains(
    setup: &TrialSetup,
    channel_seed: u64,
    fap: usize,
    user: usize,
    n: usize,
) -> Vec<f64> {
    let avg = setup.avg_gains.get(fap, user);
    let mut g = link_fading(channel_seed, fap, user, n);
    g.iter_mut().for_each(|x| *x *= avg);
    g
}

/// Interference-aware re-evaluation of a finished allocation.
///
/// Each FAP transmits `p_max / |prbs_l|` on each granted PRB. A user's rate
/// on a PRB counts, as interference, every other FAP transmitting on that
/// PRB for which `include(interferer, user)` holds. Time fractions are kept
/// from the noise-only solution.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_rates_sinr(
    cells: &CellAssignment,
    prbs: &PrbAssignment,
    allocations: &[Allocation],
    gain: impl Fn(usize, usize, usize) -> f64,
    include: impl Fn(usize, usize) -> bool,
    p_max: f64,
    n_prbs: usize,
    rate: &RateModel,
) -> Vec<f64> {
    let users_of_prb = prbs.users_of_prb(n_prbs);
    let power = |l: usize| p_max / prbs.granted(l) as f64;
    let mut rates = vec![0.0; cells.serving_fap.len()];
    for (l, users) in cells.served_users.iter().enumerate() {
        let alloc = &allocations[l];
        for (local, &k) in users.iter().enumerate() {
            rates[k] = prbs.prbs[l]
                .iter()
                .enumerate()
                .map(|(j, &n)| {
                    let c = alloc.fraction(local, j);
                    if c == 0.0 {
                        return 0.0;
                    }
                    let interference: f64 = users_of_prb[n]
                        .iter()
                        .filter(|&&i| i != l && include(i, k))
                        .map(|&i| power(i) * gain(i, k, n))
                        .sum();
                    c * rate.prb_rate_with_interference(power(l), gain(l, k, n), interference)
                })
                .fold(0.0, |acc, x| acc + x);
        }
    }
    rates
}

/// Runs the channel phase of a prepared trial.
pub fn run_channel(
    cfg: &SystemConfig,
    setup: &TrialSetup,
    channel_seed: u64,
) -> Result<TrialOutcome> {
    let rate = RateModel::from_config(cfg);
    let p_max = cfg.p_max_w();
    let n_total = cfg.n_prbs_femto;

    let per_fap: Vec<(Allocation, Vec<f64>)> = setup
        .cells
        .served_users
        .par_iter()
        .enumerate()
        .map(|(l, users)| {
            let granted = &setup.prbs.prbs[l];
            let gains: Vec<Vec<f64>> = users
                .iter()
                .map(|&k| {
                    let full = link_gains(setup, channel_seed, l, k, n_total);
                    granted.iter().map(|&n| full[n]).collect()
                })
                .collect();
            let r = per_prb_rates(&gains, granted.len(), p_max, &rate);
            if users.is_empty() {
                return Ok((
                    Allocation {
                        n_users: 0,
                        n_prbs: granted.len(),
                        c: vec![],
                        t: 0.0,
                    },
                    vec![],
                ));
            }
            let demands = vec![cfg.demand_bps; users.len()];
            let alloc = maxmin_allocate(&r, &demands)?;
            let achieved = achieved_rates(&alloc, &r);
            Ok((alloc, achieved))
        })
        .collect::<Result<_>>()?;

    let n_users = setup.topology.n_users();
    let mut rates = vec![0.0; n_users];
    for (l, users) in setup.cells.served_users.iter().enumerate() {
        for (local, &k) in users.iter().enumerate() {
            rates[k] = per_fap[l].1[local];
        }
    }
    let allocations: Vec<Allocation> = per_fap.into_iter().map(|(a, _)| a).collect();

    if cfg.eval_mode == EvalMode::Sinr {
        let realization = sinr_links(cfg, setup, channel_seed);
        let t = &setup.topology;
        let cutoff = cfg.sinr_cutoff_m;
        rates = evaluate_rates_sinr(
            &setup.cells,
            &setup.prbs,
            &allocations,
            |l, k, n| realization.gain(l, k, n).expect("link drawn for SINR"),
            |i, k| cutoff.is_none_or(|r| t.fap_positions[i].distance(&t.user_positions[k]) <= r),
            p_max,
            n_total,
            &rate,
        );
    }

    Ok(TrialOutcome {
        allocations,
        metrics: TrialMetrics::from_rates(rates, cfg.demand_bps, cfg.outage_fraction),
    })
}

/// Draws every serving and co-channel link that SINR evaluation touches.
fn sinr_links(cfg: &SystemConfig, setup: &TrialSetup, channel_seed: u64) -> ChannelRealization {
    let n_total = cfg.n_prbs_femto;
    let users_of_prb = setup.prbs.users_of_prb(n_total);
    let mut realization = ChannelRealization::default();
    for (l, users) in setup.cells.served_users.iter().enumerate() {
        let mut faps: Vec<usize> = vec![l];
        for &n in &setup.prbs.prbs[l] {
            faps.extend(users_of_prb[n].iter().copied());
        }
        faps.sort_unstable();
        faps.dedup();
        for &k in users {
            for &i in &faps {
                realization
                    .gains
                    .entry((i, k))
                    .or_insert_with(|| link_gains(setup, channel_seed, i, k, n_total));
            }
        }
    }
    realization
}

/// One complete trial.
pub fn run_trial(
    cfg: &SystemConfig,
    topology_seed: u64,
    channel_seed: u64,
) -> Result<TrialMetrics> {
    let setup = prepare_trial(cfg, topology_seed)?;
    Ok(run_channel(cfg, &setup, channel_seed)?.metrics)
}

/// One complete trial with every intermediate result retained.
pub fn run_trial_detailed(
    cfg: &SystemConfig,
    topology_seed: u64,
    channel_seed: u64,
) -> Result<TrialRecord> {
    let setup = prepare_trial(cfg, topology_seed)?;
    let outcome = run_channel(cfg, &setup, channel_seed)?;
    Ok(TrialRecord {
        topology_seed,
        channel_seed,
        config: cfg.clone(),
        setup,
        outcome,
    })
}

/// Monte Carlo summary at one demand level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub demand_bps: f64,
    pub outage_mean: f64,
    pub outage_stderr: f64,
    pub min_rate_mean: f64,
    pub min_rate_stderr: f64,
    pub max_rate_mean: f64,
    pub max_rate_stderr: f64,
    pub n_trials: usize,
    pub seed: u64,
}

fn mean_stderr(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = xs.clone().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Means and standard errors over trials, reduced in the given order.
pub fn aggregate(trials: &[TrialMetrics], cfg: &SystemConfig) -> SweepPoint {
    assert!(!trials.is_empty(), "nothing to aggregate");
    let (outage_mean, outage_stderr) = mean_stderr(trials.iter().map(|t| t.outage_rate));
    let (min_rate_mean, min_rate_stderr) = mean_stderr(trials.iter().map(|t| t.min_rate));
    let (max_rate_mean, max_rate_stderr) = mean_stderr(trials.iter().map(|t| t.max_rate));
    SweepPoint {
        demand_bps: cfg.demand_bps,
        outage_mean,
        outage_stderr,
        min_rate_mean,
        min_rate_stderr,
        max_rate_mean,
        max_rate_stderr,
        n_trials: trials.len(),
        seed: cfg.master_seed,
    }
}

/// All `n_topologies × n_channel_draws` trials at the configured demand,
/// in (topology, draw) order. Topologies run in parallel.
pub fn run_trials(cfg: &SystemConfig) -> Result<Vec<TrialMetrics>> {
    cfg.validate()?;
    let per_topology: Vec<Vec<TrialMetrics>> = (0..cfg.n_topologies as u64)
        .into_par_iter()
        .map(|i| {
            let setup = prepare_trial(cfg, seed::topology_seed(cfg.master_seed, i))?;
            (0..cfg.n_channel_draws as u64)
                .map(|j| {
                    let cs = seed::channel_seed(cfg.master_seed, i, j);
                    Ok(run_channel(cfg, &setup, cs)?.metrics)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(per_topology.into_iter().flatten().collect())
}

pub fn run_sweep_point(cfg: &SystemConfig) -> Result<SweepPoint> {
    Ok(aggregate(&run_trials(cfg)?, cfg))
}

/// One sweep point per demand; topology and channel seeds do not depend on
/// the demand, so every point sees the same scenes.
pub fn run_sweep(cfg: &SystemConfig, demands_bps: &[f64]) -> Result<Vec<SweepPoint>> {
    demands_bps
        .iter()
        .map(|&d| {
            let c = SystemConfig {
                demand_bps: d,
                ..cfg.clone()
            };
            run_sweep_point(&c)
        })
        .collect()
}
