//! Random placement, cell selection and the FAP interference graph.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{average_gain, LinkShadowState, PropagationParams};
use crate::config::SystemConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// FAP and user positions inside a single circular cell centred at the
/// origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub cell_radius_m: f64,
    pub coverage_radius_m: f64,
    pub fap_positions: Vec<Point>,
    pub user_positions: Vec<Point>,
}

impl Topology {
    pub fn n_faps(&self) -> usize {
        self.fap_positions.len()
    }

    pub fn n_users(&self) -> usize {
        self.user_positions.len()
    }
}

/// Node count for a density over the disk area, `round(λ π r²)`.
pub fn expected_count(density_per_m2: f64, radius_m: f64) -> usize {
    (density_per_m2 * PI * radius_m * radius_m).round() as usize
}

fn uniform_in_disk<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> Point {
    // sqrt keeps the density uniform over area
    let r = radius * rng.random::<f64>().sqrt();
    let theta = rng.random_range(0.0..2.0 * PI);
    Point::new(r * theta.cos(), r * theta.sin())
}

/// Places `round(λ_fap π r²)` FAPs and `round(λ_user π r²)` users uniformly
/// and independently in the cell.
pub fn generate_topology<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> Result<Topology> {
    if cfg.cell_radius_m.is_nan() || cfg.cell_radius_m <= 0.0 {
        return Err(Error::config("cell_radius_m", "must be positive"));
    }
    let n_faps = expected_count(cfg.fap_density_per_m2, cfg.cell_radius_m);
    let n_users = expected_count(cfg.user_density_per_m2(), cfg.cell_radius_m);
    if n_faps == 0 {
        return Err(Error::NoFaps);
    }
    let fap_positions = (0..n_faps)
        .map(|_| uniform_in_disk(cfg.cell_radius_m, rng))
        .collect();
    let user_positions = (0..n_users)
        .map(|_| uniform_in_disk(cfg.cell_radius_m, rng))
        .collect();
    Ok(Topology {
        cell_radius_m: cfg.cell_radius_m,
        coverage_radius_m: cfg.coverage_radius_m,
        fap_positions,
        user_positions,
    })
}

/// Long-term average linear gains for every (FAP, user) pair, row-major by
/// FAP.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainMatrix {
    n_faps: usize,
    n_users: usize,
    values: Vec<f64>,
}

impl GainMatrix {
    pub fn from_fn(n_faps: usize, n_users: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(n_faps * n_users);
        for l in 0..n_faps {
            for k in 0..n_users {
                values.push(f(l, k));
            }
        }
        GainMatrix {
            n_faps,
            n_users,
            values,
        }
    }

    pub fn n_faps(&self) -> usize {
        self.n_faps
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    #[inline]
    pub fn get(&self, fap: usize, user: usize) -> f64 {
        self.values[fap * self.n_users + user]
    }

    pub fn scaled(&self, factor: f64) -> Self {
        GainMatrix {
            values: self.values.iter().map(|g| g * factor).collect(),
            ..self.clone()
        }
    }
}

/// Draws the large-scale state of every link, FAP-major.
pub fn draw_link_states<R: Rng + ?Sized>(
    t: &Topology,
    p: &PropagationParams,
    rng: &mut R,
) -> Vec<LinkShadowState> {
    (0..t.n_faps() * t.n_users())
        .map(|_| p.draw_link(rng))
        .collect()
}

pub fn average_gains(
    t: &Topology,
    p: &PropagationParams,
    links: &[LinkShadowState],
) -> Result<GainMatrix> {
    assert_eq!(links.len(), t.n_faps() * t.n_users());
    let mut err = None;
    let m = GainMatrix::from_fn(t.n_faps(), t.n_users(), |l, k| {
        let d = t.fap_positions[l].distance(&t.user_positions[k]);
        match average_gain(p, &links[l * t.n_users() + k], d) {
            Ok(g) => g,
            Err(e) => {
                err.get_or_insert(e);
                f64::NAN
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(m),
    }
}

/// The partition of users onto serving FAPs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellAssignment {
    pub serving_fap: Vec<usize>,
    pub served_users: Vec<Vec<usize>>,
}

impl CellAssignment {
    pub fn from_serving(serving_fap: Vec<usize>, n_faps: usize) -> Self {
        let mut served_users = vec![Vec::new(); n_faps];
        for (k, &l) in serving_fap.iter().enumerate() {
            served_users[l].push(k);
        }
        CellAssignment {
            serving_fap,
            served_users,
        }
    }
}

/// Connects each user to the FAP with the strongest average received power.
///
/// All FAPs transmit at the same power, so this is the argmax of the average
/// gain. Ties go to the lowest FAP index.
pub fn assign_users(avg_gains: &GainMatrix) -> CellAssignment {
    let serving = (0..avg_gains.n_users())
        .map(|k| {
            let mut best = 0;
            for l in 1..avg_gains.n_faps() {
                if avg_gains.get(l, k) > avg_gains.get(best, k) {
                    best = l;
                }
            }
            best
        })
        .collect();
    CellAssignment::from_serving(serving, avg_gains.n_faps())
}

/// Undirected simple graph over FAPs; an edge means the pair may interfere.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterferenceGraph {
    adjacency: Vec<Vec<usize>>,
}

impl InterferenceGraph {
    pub fn empty(n: usize) -> Self {
        InterferenceGraph {
            adjacency: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from an edge list; self-loops and duplicates are dropped.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a != b {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        InterferenceGraph { adjacency }
    }

    pub fn n_nodes(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }
}

/// FAPs `i != j` interfere iff their distance is at most twice the coverage
/// radius.
pub fn build_interference_graph(t: &Topology) -> InterferenceGraph {
    let reach = 2.0 * t.coverage_radius_m;
    let n = t.n_faps();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if t.fap_positions[i].distance(&t.fap_positions[j]) <= reach {
                edges.push((i, j));
            }
        }
    }
    InterferenceGraph::from_edges(n, &edges)
}
