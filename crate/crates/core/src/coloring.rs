//! PRB assignment to FAPs by coloring a demand-expanded interference graph.
//!
//! FAP `l` asking for `n_l` PRBs becomes `n_l` mutually adjacent nodes, and
//! every node of FAP `i` is adjacent to every node of FAP `j` when the two
//! FAPs interfere. A color is a PRB, so a proper coloring hands out PRBs with
//! no reuse between interfering FAPs. With a palette of `N` colors some nodes
//! may stay uncolored; their FAP simply gets fewer PRBs than it asked for.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::InterferenceGraph;

/// Read access to an undirected simple graph.
pub trait Adjacency {
    fn node_count(&self) -> usize;
    fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_;
    fn degree(&self, v: usize) -> usize {
        self.neighbors(v).count()
    }
}

/// Plain adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjacencyList(pub Vec<Vec<usize>>);

impl AdjacencyList {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a != b {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        AdjacencyList(adj)
    }

    pub fn complete(n: usize) -> Self {
        AdjacencyList(
            (0..n)
                .map(|v| (0..n).filter(|&u| u != v).collect())
                .collect(),
        )
    }
}

impl Adjacency for AdjacencyList {
    fn node_count(&self) -> usize {
        self.0.len()
    }

    fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.0[v].iter().copied()
    }

    fn degree(&self, v: usize) -> usize {
        self.0[v].len()
    }
}

impl Adjacency for InterferenceGraph {
    fn node_count(&self) -> usize {
        self.n_nodes()
    }

    fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        InterferenceGraph::neighbors(self, v).iter().copied()
    }

    fn degree(&self, v: usize) -> usize {
        InterferenceGraph::neighbors(self, v).len()
    }
}

/// The demand-expanded graph, stored implicitly: adjacency is derived from
/// node ownership and the FAP-level graph, so dense expansions cost no
/// memory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpandedGraph {
    owner: Vec<usize>,
    fap_nodes: Vec<Vec<usize>>,
    fap_graph: InterferenceGraph,
}

impl ExpandedGraph {
    pub fn owner(&self, v: usize) -> usize {
        self.owner[v]
    }

    pub fn nodes_of(&self, fap: usize) -> &[usize] {
        &self.fap_nodes[fap]
    }

    pub fn n_faps(&self) -> usize {
        self.fap_nodes.len()
    }

    pub fn fap_graph(&self) -> &InterferenceGraph {
        &self.fap_graph
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        let (fa, fb) = (self.owner[a], self.owner[b]);
        a != b && (fa == fb || self.fap_graph.is_adjacent(fa, fb))
    }

    /// Materialized adjacency lists, for small graphs and tests.
    pub fn to_adjacency_list(&self) -> AdjacencyList {
        AdjacencyList(
            (0..self.node_count())
                .map(|v| {
                    let mut n: Vec<usize> = self.neighbors(v).collect();
                    n.sort_unstable();
                    n
                })
                .collect(),
        )
    }
}

impl Adjacency for ExpandedGraph {
    fn node_count(&self) -> usize {
        self.owner.len()
    }

    fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let fap = self.owner[v];
        let own = self.fap_nodes[fap].iter().copied().filter(move |&u| u != v);
        let others = self
            .fap_graph
            .neighbors(fap)
            .iter()
            .flat_map(move |&j| self.fap_nodes[j].iter().copied());
        own.chain(others)
    }

    fn degree(&self, v: usize) -> usize {
        let fap = self.owner[v];
        self.fap_nodes[fap].len() - 1
            + self
                .fap_graph
                .neighbors(fap)
                .iter()
                .map(|&j| self.fap_nodes[j].len())
                .sum::<usize>()
    }
}

/// Replaces FAP `l` by `demands[l]` clique nodes.
///
/// Nodes are numbered round-robin across FAPs (first node of every FAP, then
/// the second, ...) so that no single FAP's clique comes first in every
/// index-based tie-break.
pub fn expand_graph(g: &InterferenceGraph, demands: &[usize]) -> ExpandedGraph {
    assert_eq!(g.n_nodes(), demands.len(), "one demand per FAP");
    let mut owner = Vec::with_capacity(demands.iter().sum());
    let mut fap_nodes = vec![Vec::new(); demands.len()];
    let rounds = demands.iter().copied().max().unwrap_or(0);
    for r in 0..rounds {
        for (l, &d) in demands.iter().enumerate() {
            if r < d {
                fap_nodes[l].push(owner.len());
                owner.push(l);
            }
        }
    }
    ExpandedGraph {
        owner,
        fap_nodes,
        fap_graph: g.clone(),
    }
}

/// A partial proper coloring; `None` means the node got no color.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    pub color: Vec<Option<usize>>,
}

impl Coloring {
    /// Number of distinct colors in use.
    pub fn colors_used(&self) -> usize {
        let mut seen: Vec<usize> = self.color.iter().flatten().copied().collect();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    pub fn colored_count(&self) -> usize {
        self.color.iter().filter(|c| c.is_some()).count()
    }

    pub fn uncolored_count(&self) -> usize {
        self.color.len() - self.colored_count()
    }

    /// No edge joins two nodes of equal color.
    pub fn is_proper<G: Adjacency>(&self, g: &G) -> bool {
        (0..g.node_count()).all(|v| match self.color[v] {
            None => true,
            Some(c) => g.neighbors(v).all(|u| self.color[u] != Some(c)),
        })
    }
}

/// Fixed-width bitset rows, one per node.
struct ColorSets {
    words: usize,
    bits: Vec<u64>,
}

impl ColorSets {
    fn new(n: usize, palette: usize) -> Self {
        let words = palette.div_ceil(64).max(1);
        ColorSets {
            words,
            bits: vec![0; n * words],
        }
    }

    /// Returns true if `c` was not yet present.
    fn insert(&mut self, v: usize, c: usize) -> bool {
        let w = &mut self.bits[v * self.words + c / 64];
        let mask = 1u64 << (c % 64);
        let fresh = *w & mask == 0;
        *w |= mask;
        fresh
    }

    fn smallest_absent(&self, v: usize, palette: usize) -> Option<usize> {
        let row = &self.bits[v * self.words..(v + 1) * self.words];
        row.iter()
            .enumerate()
            .find_map(|(i, &w)| (w != u64::MAX).then(|| i * 64 + (!w).trailing_zeros() as usize))
            .filter(|&c| c < palette)
    }
}

/// Brélaz's DSATUR heuristic with a bounded palette.
///
/// Repeatedly picks the unprocessed node with the most distinct colors among
/// its neighbors (ties: higher degree, then lower index) and gives it the
/// smallest palette color none of its neighbors has. A node whose neighbors
/// already use the whole palette stays uncolored.
pub fn dsatur_color<G: Adjacency>(g: &G, palette: usize) -> Coloring {
    assert!(palette >= 1, "palette must hold at least one color");
    let n = g.node_count();
    let degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut saturation = vec![0usize; n];
    let mut neighbor_colors = ColorSets::new(n, palette);
    let mut done = vec![false; n];
    let mut color = vec![None; n];

    for _ in 0..n {
        let mut pick: Option<usize> = None;
        for v in 0..n {
            if done[v] {
                continue;
            }
            pick = match pick {
                None => Some(v),
                Some(p) if (saturation[v], degree[v]) > (saturation[p], degree[p]) => Some(v),
                keep => keep,
            };
        }
        let v = pick.expect("an unprocessed node remains");
        done[v] = true;
        let Some(c) = neighbor_colors.smallest_absent(v, palette) else {
            continue;
        };
        color[v] = Some(c);
        for u in g.neighbors(v) {
            if !done[u] && neighbor_colors.insert(u, c) {
                saturation[u] += 1;
            }
        }
    }
    Coloring { color }
}

/// Greedy coloring in breadth-first order, linear in `|V| + |E|` for a
/// bounded palette.
///
/// Each component is traversed from its lowest-index node; every node gets
/// the smallest palette color not used by an already-colored neighbor, or
/// stays uncolored if there is none.
pub fn greedy_bfs_color<G: Adjacency>(g: &G, palette: usize) -> Coloring {
    assert!(palette >= 1, "palette must hold at least one color");
    let n = g.node_count();
    let mut color: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; n];
    // used[c] == stamp marks color c as taken for the current node
    let mut used = vec![usize::MAX; palette];
    let mut queue = std::collections::VecDeque::new();

    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for u in g.neighbors(v) {
                if let Some(c) = color[u] {
                    used[c] = v;
                }
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
            color[v] = used.iter().position(|&s| s != v);
        }
    }
    Coloring { color }
}

pub const ORACLE_NODE_CAP: usize = 12;

/// Exact chromatic number by backtracking; refuses graphs above
/// [`ORACLE_NODE_CAP`] nodes.
pub fn chromatic_number_exact<G: Adjacency>(g: &G) -> Result<usize> {
    let n = g.node_count();
    if n > ORACLE_NODE_CAP {
        return Err(Error::OracleTooLarge {
            nodes: n,
            cap: ORACLE_NODE_CAP,
        });
    }
    if n == 0 {
        return Ok(0);
    }
    let masks: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).fold(0u32, |m, u| m | 1 << u))
        .collect();

    fn extend(v: usize, k: usize, used: usize, masks: &[u32], colors: &mut [usize]) -> bool {
        if v == masks.len() {
            return true;
        }
        // symmetry: the next node may open at most one new color
        for c in 0..k.min(used + 1) {
            let clash = (0..v).any(|u| masks[v] & (1 << u) != 0 && colors[u] == c);
            if !clash {
                colors[v] = c;
                if extend(v + 1, k, used.max(c + 1), masks, colors) {
                    return true;
                }
            }
        }
        false
    }

    let mut colors = vec![0; n];
    Ok((1..=n)
        .find(|&k| extend(0, k, 0, &masks, &mut colors))
        .expect("n colors always suffice"))
}

/// PRBs granted to each FAP.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrbAssignment {
    /// Sorted PRB indices per FAP.
    pub prbs: Vec<Vec<usize>>,
}

impl PrbAssignment {
    pub fn granted(&self, fap: usize) -> usize {
        self.prbs[fap].len()
    }

    pub fn total_granted(&self) -> usize {
        self.prbs.iter().map(Vec::len).sum()
    }

    /// FAPs using each PRB, for a palette of `n_prbs`.
    pub fn users_of_prb(&self, n_prbs: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); n_prbs];
        for (l, set) in self.prbs.iter().enumerate() {
            for &n in set {
                out[n].push(l);
            }
        }
        out
    }
}

/// Each FAP receives the colors of its colored nodes.
pub fn assignment_from_coloring(g: &ExpandedGraph, c: &Coloring) -> PrbAssignment {
    let prbs = (0..g.n_faps())
        .map(|l| {
            let mut set: Vec<usize> = g.nodes_of(l).iter().filter_map(|&v| c.color[v]).collect();
            set.sort_unstable();
            set
        })
        .collect();
    PrbAssignment { prbs }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// FAP 0 (demand 1) interferes with FAPs 1 and 2 (demand 3 each).
    fn three_fap_example() -> ExpandedGraph {
        let g = InterferenceGraph::from_edges(3, &[(0, 1), (0, 2)]);
        expand_graph(&g, &[1, 3, 3])
    }

    fn cycle(n: usize) -> AdjacencyList {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        AdjacencyList::from_edges(n, &edges)
    }

    #[test]
    fn expansion_of_three_fap_example() {
        let e = three_fap_example();
        assert_eq!(e.node_count(), 7);
        let hub = e.nodes_of(0)[0];
        assert_eq!(e.degree(hub), 6);
        for &v in e.nodes_of(1) {
            assert_eq!(e.degree(v), 3);
            for &u in e.nodes_of(2) {
                assert!(!e.is_adjacent(u, v));
            }
        }
    }

    #[test]
    fn expansion_small_cases() {
        let single = expand_graph(&InterferenceGraph::empty(1), &[3]);
        assert_eq!(single.to_adjacency_list(), AdjacencyList::complete(3));
        let pair = expand_graph(&InterferenceGraph::from_edges(2, &[(0, 1)]), &[2, 2]);
        assert_eq!(pair.to_adjacency_list(), AdjacencyList::complete(4));
        let with_zero = expand_graph(&InterferenceGraph::from_edges(2, &[(0, 1)]), &[0, 2]);
        assert_eq!(with_zero.node_count(), 2);
        assert!(with_zero.nodes_of(0).is_empty());
    }

    #[test]
    fn expansion_interleaves_faps() {
        let e = expand_graph(&InterferenceGraph::empty(3), &[2, 1, 2]);
        let owners: Vec<usize> = (0..e.node_count()).map(|v| e.owner(v)).collect();
        assert_eq!(owners, vec![0, 1, 2, 0, 2]);
    }

    #[test]
    fn dsatur_on_three_fap_example_uses_four_colors() {
        let e = three_fap_example();
        let c = dsatur_color(&e, 50);
        assert_eq!(c.uncolored_count(), 0);
        assert_eq!(c.colors_used(), 4);
        assert!(c.is_proper(&e));
        let a = assignment_from_coloring(&e, &c);
        assert_eq!(
            a.prbs.iter().map(Vec::len).collect::<Vec<_>>(),
            vec![1, 3, 3]
        );
    }

    #[test]
    fn dsatur_on_clique() {
        let c = dsatur_color(&AdjacencyList::complete(3), 50);
        assert_eq!(c.color, vec![Some(0), Some(1), Some(2)]);
    }

    #[test]
    fn dsatur_short_palette_leaves_one_node_of_k4_uncolored() {
        let e = expand_graph(&InterferenceGraph::from_edges(2, &[(0, 1)]), &[2, 2]);
        let c = dsatur_color(&e, 3);
        assert_eq!(c.uncolored_count(), 1);
        assert!(c.is_proper(&e));
        let a = assignment_from_coloring(&e, &c);
        let mut counts = vec![a.granted(0), a.granted(1)];
        counts.sort();
        assert_eq!(counts, vec![1, 2]);
        assert_eq!(a.total_granted(), 3);
    }

    #[test]
    fn bfs_examples() {
        // path 0-1-2-3 plus a branch 1-4: a tree
        let tree = AdjacencyList::from_edges(5, &[(0, 1), (1, 2), (2, 3), (1, 4)]);
        let c = greedy_bfs_color(&tree, 2);
        assert_eq!(c.uncolored_count(), 0);
        assert_eq!(c.colors_used(), 2);
        assert!(c.is_proper(&tree));

        let e = three_fap_example();
        let c = greedy_bfs_color(&e, 50);
        assert!(c.is_proper(&e));
        assert_eq!(c.uncolored_count(), 0);
        // traced by hand: hub 0, then each 3-clique takes 1, 2, 3
        assert_eq!(c.colors_used(), 4);

        let empty = AdjacencyList(vec![vec![]; 4]);
        let c = greedy_bfs_color(&empty, 1);
        assert_eq!(c.color, vec![Some(0); 4]);
    }

    #[test]
    fn bfs_short_palette_stays_proper() {
        let k5 = AdjacencyList::complete(5);
        let c = greedy_bfs_color(&k5, 3);
        assert!(c.is_proper(&k5));
        assert_eq!(c.colored_count(), 3);
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(
            chromatic_number_exact(&AdjacencyList::complete(4)).unwrap(),
            4
        );
        assert_eq!(chromatic_number_exact(&cycle(5)).unwrap(), 3);
        assert_eq!(chromatic_number_exact(&cycle(6)).unwrap(), 2);
        assert_eq!(chromatic_number_exact(&three_fap_example()).unwrap(), 4);
        assert_eq!(chromatic_number_exact(&AdjacencyList(vec![])).unwrap(), 0);
        assert!(matches!(
            chromatic_number_exact(&AdjacencyList::complete(13)),
            Err(Error::OracleTooLarge { nodes: 13, cap: 12 })
        ));
    }

    #[test]
    fn assignment_edge_cases() {
        let e = expand_graph(&InterferenceGraph::from_edges(3, &[(0, 1)]), &[2, 0, 1]);
        let c = dsatur_color(&e, 50);
        let a = assignment_from_coloring(&e, &c);
        assert!(a.prbs[1].is_empty());
        assert_eq!(a.granted(0), 2);
        assert_eq!(a.granted(2), 1);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn random_graph(max_n: usize) -> impl Strategy<Value = AdjacencyList> {
            (1..=max_n)
                .prop_flat_map(|n| (Just(n), prop::collection::vec(any::<bool>(), n * n)))
                .prop_map(|(n, bits)| {
                    let mut edges = vec![];
                    for i in 0..n {
                        for j in i + 1..n {
                            if bits[i * n + j] {
                                edges.push((i, j));
                            }
                        }
                    }
                    AdjacencyList::from_edges(n, &edges)
                })
        }

        proptest! {
            #[test]
            fn dsatur_between_chromatic_and_max_degree_plus_one(g in random_graph(10)) {
                let n = g.node_count();
                let c = dsatur_color(&g, n.max(1));
                prop_assert!(c.is_proper(&g));
                prop_assert_eq!(c.uncolored_count(), 0);
                let chi = chromatic_number_exact(&g).unwrap();
                let max_deg = (0..n).map(|v| g.degree(v)).max().unwrap_or(0);
                prop_assert!(c.colors_used() >= chi);
                prop_assert!(c.colors_used() <= max_deg + 1);
            }

            #[test]
            fn bounded_palettes_stay_proper(g in random_graph(12), palette in 1usize..5) {
                prop_assert!(dsatur_color(&g, palette).is_proper(&g));
                let b = greedy_bfs_color(&g, palette);
                prop_assert!(b.is_proper(&g));
                prop_assert!(b.color.iter().flatten().all(|&c| c < palette));
            }

            #[test]
            fn grants_conserve_colored_nodes(
                demands in prop::collection::vec(0usize..5, 1..7),
                bits in prop::collection::vec(any::<bool>(), 36),
                palette in 1usize..12,
            ) {
                let n = demands.len();
                let mut edges = vec![];
                for i in 0..n {
                    for j in i + 1..n {
                        if bits[i * 6 + j] {
                            edges.push((i, j));
                        }
                    }
                }
                let g = InterferenceGraph::from_edges(n, &edges);
                let e = expand_graph(&g, &demands);
                let c = dsatur_color(&e, palette);
                let a = assignment_from_coloring(&e, &c);
                prop_assert_eq!(a.total_granted(), c.colored_count());
                for l in 0..n {
                    prop_assert!(a.granted(l) <= demands[l]);
                    let mut s = a.prbs[l].clone();
                    s.dedup();
                    prop_assert_eq!(s.len(), a.granted(l));
                    for &j in g.neighbors(l) {
                        prop_assert!(a.prbs[l].iter().all(|p| !a.prbs[j].contains(p)));
                    }
                }
            }
        }
    }
}
