use rand::seq::SliceRandom;

use super::Graph;
use crate::error::{Error, Result};
use crate::seed::{self, Purpose};

/// A fixed adversarial vertex set together with the locality budget `F`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdversaryPlacement {
    adversarial: Vec<bool>,
    regular: Vec<usize>,
    regular_index: Vec<Option<usize>>,
    f: usize,
}

impl AdversaryPlacement {
    pub fn new(vertex_count: usize, adversaries: &[usize], f: usize) -> Result<Self> {
        let mut adversarial = vec![false; vertex_count];
        for &a in adversaries {
            if a >= vertex_count {
                return Err(Error::InvalidArgument(format!(
                    "adversary {a} out of range for {vertex_count} vertices"
                )));
            }
            adversarial[a] = true;
        }
        let regular: Vec<usize> = (0..vertex_count).filter(|&v| !adversarial[v]).collect();
        let mut regular_index = vec![None; vertex_count];
        for (k, &v) in regular.iter().enumerate() {
            regular_index[v] = Some(k);
        }
        Ok(AdversaryPlacement {
            adversarial,
            regular,
            regular_index,
            f,
        })
    }

    /// No adversaries, budget `f`.
    pub fn honest(vertex_count: usize, f: usize) -> Self {
        Self::new(vertex_count, &[], f).expect("empty adversary set is always valid")
    }

    pub fn f(&self) -> usize {
        self.f
    }

    pub fn vertex_count(&self) -> usize {
        self.adversarial.len()
    }

    pub fn is_adversarial(&self, v: usize) -> bool {
        self.adversarial[v]
    }

    pub fn adversaries(&self) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| self.adversarial[v]).collect()
    }

    /// Regular vertices in increasing order; position `k` is row `k` of M(t).
    pub fn regular(&self) -> &[usize] {
        &self.regular
    }

    pub fn regular_count(&self) -> usize {
        self.regular.len()
    }

    pub fn regular_index(&self, v: usize) -> Option<usize> {
        self.regular_index[v]
    }

    /// Largest number of adversarial neighbors seen by a regular vertex.
    pub fn max_adversarial_neighbors(&self, graph: &Graph) -> usize {
        self.regular
            .iter()
            .map(|&i| graph.neighbors(i).iter().filter(|&&j| self.adversarial[j]).count())
            .max()
            .unwrap_or(0)
    }

    /// Every regular vertex has at most `F` adversarial neighbors.
    pub fn is_f_local(&self, graph: &Graph) -> bool {
        self.max_adversarial_neighbors(graph) <= self.f
    }
}

/// Draws an F-local adversary set of exactly `count` vertices.
///
/// Attempts rotate between three greedy passes over a seeded vertex order:
/// the order as shuffled, the order stably sorted by degree, and a pass that
/// always takes the vertex whose regular neighbors carry the least load. A
/// vertex is marked adversarial only when no regular vertex would exceed `f`
/// adversarial neighbors. Fails after `attempts` unsuccessful passes.
pub fn place_adversaries(
    graph: &Graph,
    count: usize,
    f: usize,
    seed: u64,
    attempts: usize,
) -> Result<AdversaryPlacement> {
    let n = graph.vertex_count();
    if count >= n {
        return Err(Error::InvalidArgument(format!(
            "cannot make {count} of {n} vertices adversarial"
        )));
    }
    for attempt in 0..attempts.max(1) {
        let mut rng = seed::stream(seed, Purpose::Placement, attempt as u64, f as u64, count as u64);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        if attempt % 3 == 1 {
            // low-degree vertices load fewer neighbors
            order.sort_by_key(|&v| graph.degree(v));
        }
        let mut adversarial = vec![false; n];
        let mut load = vec![0usize; n];
        let mut chosen = Vec::with_capacity(count);
        let fits = |v: usize, adversarial: &[bool], load: &[usize]| {
            !adversarial[v] && graph.neighbors(v).iter().all(|&u| adversarial[u] || load[u] < f)
        };
        if attempt % 3 == 2 {
            // pick the vertex whose neighbors are least loaded, ties by shuffled rank
            while chosen.len() < count {
                let best = order
                    .iter()
                    .enumerate()
                    .filter(|&(_, &v)| fits(v, &adversarial, &load))
                    .min_by_key(|&(rank, &v)| {
                        let pressure: usize = graph.neighbors(v).iter().filter(|&&u| !adversarial[u]).map(|&u| load[u] + 1).sum();
                        (pressure, rank)
                    })
                    .map(|(_, &v)| v);
                let Some(v) = best else { break };
                adversarial[v] = true;
                chosen.push(v);
                for &u in graph.neighbors(v) {
                    load[u] += 1;
                }
            }
        } else {
            for &v in &order {
                if chosen.len() == count {
                    break;
                }
                if fits(v, &adversarial, &load) {
                    adversarial[v] = true;
                    chosen.push(v);
                    for &u in graph.neighbors(v) {
                        load[u] += 1;
                    }
                }
            }
        }
        if chosen.len() == count {
            chosen.sort_unstable();
            return AdversaryPlacement::new(n, &chosen, f);
        }
    }
    Err(Error::AssumptionFailed(format!(
        "no {f}-local placement of {count} adversaries found in {attempts} attempts"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_robust_graph;

    #[test]
    fn indexing_skips_adversaries() {
        let p = AdversaryPlacement::new(5, &[1, 3], 1).unwrap();
        assert_eq!(p.regular(), &[0, 2, 4]);
        assert_eq!(p.regular_index(2), Some(1));
        assert_eq!(p.regular_index(3), None);
        assert_eq!(p.adversaries(), vec![1, 3]);
        assert!(AdversaryPlacement::new(3, &[3], 0).is_err());
    }

    #[test]
    fn locality_is_measured_on_regular_vertices() {
        let g = Graph::complete(7);
        let ok = AdversaryPlacement::new(7, &[6], 1).unwrap();
        assert!(ok.is_f_local(&g));
        let bad = AdversaryPlacement::new(7, &[5, 6], 1).unwrap();
        assert!(!bad.is_f_local(&g));
        assert_eq!(bad.max_adversarial_neighbors(&g), 2);
    }

    #[test]
    fn placement_is_f_local_and_deterministic() {
        let g = build_robust_graph(100, 7, 3).unwrap();
        let a = place_adversaries(&g, 15, 3, 11, 500).unwrap();
        let b = place_adversaries(&g, 15, 3, 11, 500).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.adversaries().len(), 15);
        assert!(a.is_f_local(&g));
    }

    #[test]
    fn impossible_placement_fails() {
        // every vertex of K5 sees every other; two adversaries break 1-locality
        let g = Graph::complete(5);
        assert!(place_adversaries(&g, 2, 1, 0, 20).is_err());
        assert!(place_adversaries(&g, 1, 1, 0, 20).is_ok());
    }
}
