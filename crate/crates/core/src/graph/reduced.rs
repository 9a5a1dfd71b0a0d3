use rand::seq::SliceRandom;
use rand::Rng;

use super::{AdversaryPlacement, Graph};
use crate::seed::{self, Purpose};

/// A graph left after deleting every adversary and at most `F` incident
/// edges at each regular vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedGraph {
    /// Surviving vertices, in original labels.
    pub vertices: Vec<usize>,
    /// Surviving edges `(i, j)` with `i < j`, in original labels.
    pub edges: Vec<(usize, usize)>,
}

impl ReducedGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Sizes of the connected components, largest first.
    pub fn component_sizes(&self) -> Vec<usize> {
        let k = self.vertices.len();
        let index = |v: usize| self.vertices.binary_search(&v).expect("edge endpoint survives");
        let mut parent: Vec<usize> = (0..k).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(i, j) in &self.edges {
            let (a, b) = (find(&mut parent, index(i)), find(&mut parent, index(j)));
            if a != b {
                parent[a] = b;
            }
        }
        let mut sizes = vec![0usize; k];
        for x in 0..k {
            let root = find(&mut parent, x);
            sizes[root] += 1;
        }
        sizes.retain(|&s| s > 0);
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }

    pub fn is_connected(&self) -> bool {
        self.component_sizes().len() <= 1
    }
}

fn regular_edges(graph: &Graph, placement: &AdversaryPlacement) -> Vec<(usize, usize)> {
    graph
        .edges()
        .filter(|&(i, j, _)| !placement.is_adversarial(i) && !placement.is_adversarial(j))
        .map(|(i, j, _)| (i, j))
        .collect()
}

fn assemble(placement: &AdversaryPlacement, edges: &[(usize, usize)], deleted: &[bool]) -> ReducedGraph {
    ReducedGraph {
        vertices: placement.regular().to_vec(),
        edges: edges
            .iter()
            .zip(deleted)
            .filter(|(_, &d)| !d)
            .map(|(&e, _)| e)
            .collect(),
    }
}

// Depth-first walk over deletion sets that respect the per-vertex budget.
// Returns false once `visit` asks to stop.
fn walk(
    edges: &[(usize, usize)],
    k: usize,
    used: &mut [usize],
    deleted: &mut [bool],
    f: usize,
    visit: &mut dyn FnMut(&[bool]) -> bool,
) -> bool {
    if k == edges.len() {
        return visit(deleted);
    }
    if !walk(edges, k + 1, used, deleted, f, visit) {
        return false;
    }
    let (i, j) = edges[k];
    if used[i] < f && used[j] < f {
        used[i] += 1;
        used[j] += 1;
        deleted[k] = true;
        let go_on = walk(edges, k + 1, used, deleted, f, visit);
        deleted[k] = false;
        used[i] -= 1;
        used[j] -= 1;
        return go_on;
    }
    true
}

/// Reduced graphs of `graph` under `placement`.
///
/// Edge deletions are undirected and count against the budget of both
/// endpoints. When the number of feasible deletion sets is at most `budget`
/// every reduced graph is returned; otherwise `budget` seeded samples are
/// drawn, a third of them greedy-maximal so the sparsest witnesses are
/// always represented.
pub fn enumerate_reduced_graphs(
    graph: &Graph,
    placement: &AdversaryPlacement,
    budget: usize,
    seed: u64,
) -> Vec<ReducedGraph> {
    let edges = regular_edges(graph, placement);
    let f = placement.f();
    let n = graph.vertex_count();

    let mut count = 0usize;
    walk(&edges, 0, &mut vec![0; n], &mut vec![false; edges.len()], f, &mut |_| {
        count += 1;
        count <= budget
    });

    if count <= budget {
        let mut out = Vec::with_capacity(count);
        walk(&edges, 0, &mut vec![0; n], &mut vec![false; edges.len()], f, &mut |d| {
            out.push(assemble(placement, &edges, d));
            true
        });
        return out;
    }

    (0..budget)
        .map(|k| {
            let mut rng = seed::stream(seed, Purpose::ReducedSample, k as u64, 0, 0);
            let p = [1.0, 0.5, 0.25][k % 3];
            let mut order: Vec<usize> = (0..edges.len()).collect();
            order.shuffle(&mut rng);
            let mut used = vec![0usize; n];
            let mut deleted = vec![false; edges.len()];
            for e in order {
                let (i, j) = edges[e];
                if used[i] < f && used[j] < f && rng.gen_bool(p) {
                    used[i] += 1;
                    used[j] += 1;
                    deleted[e] = true;
                }
            }
            assemble(placement, &edges, &deleted)
        })
        .collect()
}

/// Smallest largest-component size over `reduced`; equals the regular count
/// whenever every reduced graph is connected.
pub fn min_reduced_size(reduced: &[ReducedGraph]) -> Option<usize> {
    reduced
        .iter()
        .map(|r| r.component_sizes().first().copied().unwrap_or(0))
        .min()
}
