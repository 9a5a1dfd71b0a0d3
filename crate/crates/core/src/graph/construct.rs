use rand::Rng;

use super::Graph;
use crate::error::{Error, Result};
use crate::seed::{self, Purpose};

/// Grows an r-robust graph by seeded preferential attachment.
///
/// The base is the complete graph on `2r + 1` vertices, which is
/// `(r + 1)`-robust. Every later vertex joins `r` distinct existing vertices
/// drawn with probability proportional to their current degree. Adding a
/// vertex with at least `r` neighbors to an r-robust graph keeps it r-robust,
/// so the result is r-robust by induction. Draws walk vertices in index order,
/// which breaks probability ties by index.
pub fn build_robust_graph(n: usize, r: usize, seed: u64) -> Result<Graph> {
    if r == 0 {
        return Err(Error::InvalidArgument("target robustness must be positive".into()));
    }
    let base = 2 * r + 1;
    if n < base {
        return Err(Error::InvalidArgument(format!(
            "{n} vertices cannot host a {r}-robust construction (need at least {base})"
        )));
    }
    let mut graph = Graph::new(n);
    for i in 0..base {
        for j in i + 1..base {
            graph.insert(i, j, 1.0);
        }
    }
    let mut rng = seed::stream(seed, Purpose::Graph, n as u64, r as u64, 0);
    for v in base..n {
        let mut chosen = vec![false; v];
        let mut total: u64 = (0..v).map(|u| graph.degree(u) as u64).sum();
        for _ in 0..r {
            let mut ticket = rng.gen_range(0..total);
            let pick = (0..v)
                .filter(|&u| !chosen[u])
                .find(|&u| {
                    let d = graph.degree(u) as u64;
                    if ticket < d {
                        true
                    } else {
                        ticket -= d;
                        false
                    }
                })
                .expect("ticket falls inside the unchosen degree mass");
            chosen[pick] = true;
            total -= graph.degree(pick) as u64;
        }
        for u in (0..v).filter(|&u| chosen[u]) {
            graph.insert(v, u, 1.0);
        }
    }
    Ok(graph)
}
