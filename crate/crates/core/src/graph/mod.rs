//! Communication graphs, adversary placement and the robustness certificates
//! that resilient consensus depends on.

mod check;
mod construct;
mod io;
mod placement;
mod reduced;
mod robust;

pub use check::{check_assumptions, check_assumptions_with, AssumptionReport, CheckOptions, Verdict};
pub use construct::build_robust_graph;
pub use io::{parse_graph_file, write_graph_file};
pub use placement::{place_adversaries, AdversaryPlacement};
pub use reduced::{enumerate_reduced_graphs, min_reduced_size, ReducedGraph};
pub use robust::{
    is_r_reachable, is_r_robust, is_r_robust_with, max_robustness, max_robustness_with,
    DEFAULT_EXHAUSTIVE_LIMIT,
};

use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};

/// Static undirected graph with positive edge weights.
///
/// Neighbor lists are kept sorted so iteration order, and therefore every
/// downstream tie-break, is deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    weights: BTreeMap<(usize, usize), f64>,
}

fn key(i: usize, j: usize) -> (usize, usize) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn new(n: usize) -> Self {
        Graph {
            adjacency: vec![Vec::new(); n],
            weights: BTreeMap::new(),
        }
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::new(n);
        for (i, j) in edges {
            g.add_edge(i, j, 1.0)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::new(n);
        for i in 0..n {
            for j in i + 1..n {
                g.insert(i, j, 1.0);
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Graph::new(n);
        if n >= 3 {
            for i in 0..n {
                g.insert(i, (i + 1) % n, 1.0);
            }
        } else if n == 2 {
            g.insert(0, 1, 1.0);
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Graph::new(n);
        for i in 1..n {
            g.insert(i - 1, i, 1.0);
        }
        g
    }

    /// Adds (or re-weights) the undirected edge `{i, j}`.
    pub fn add_edge(&mut self, i: usize, j: usize, weight: f64) -> Result<()> {
        let n = self.vertex_count();
        if i >= n || j >= n {
            return Err(Error::InvalidArgument(format!(
                "edge ({i}, {j}) out of range for {n} vertices"
            )));
        }
        if i == j {
            return Err(Error::InvalidArgument(format!("self-loop at vertex {i}")));
        }
        if !(weight.is_finite() && weight > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "edge ({i}, {j}) has non-positive weight {weight}"
            )));
        }
        self.insert(i, j, weight);
        Ok(())
    }

    fn insert(&mut self, i: usize, j: usize, weight: f64) {
        for (a, b) in [(i, j), (j, i)] {
            let list = &mut self.adjacency[a];
            if let Err(pos) = list.binary_search(&b) {
                list.insert(pos, b);
            }
        }
        self.weights.insert(key(i, j), weight);
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.weights.len()
    }

    /// Sorted neighbor list of `i`.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.weights.contains_key(&key(i, j))
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        self.weights.get(&key(i, j)).copied()
    }

    /// Edges as `(i, j, weight)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.weights.iter().map(|(&(i, j), &w)| (i, j, w))
    }

    /// Smallest stored edge weight, or `None` for an edgeless graph.
    pub fn kappa(&self) -> Option<f64> {
        self.weights.values().copied().reduce(f64::min)
    }

    /// Every adjacency entry is mirrored and no vertex lists itself.
    pub fn is_symmetric(&self) -> bool {
        self.adjacency.iter().enumerate().all(|(i, list)| {
            list.iter()
                .all(|&j| j != i && self.adjacency[j].binary_search(&i).is_ok())
        })
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n <= 1 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &u in &self.adjacency[v] {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    queue.push_back(u);
                }
            }
        }
        count == n
    }

    /// Graph with vertex `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Graph> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidArgument("relabel needs a permutation".into()));
        }
        let mut g = Graph::new(n);
        for (i, j, w) in self.edges() {
            g.insert(perm[i], perm[j], w);
        }
        Ok(g)
    }
}
