//! r-reachability and exhaustive r-robustness certification.
//!
//! A graph is r-robust when, for every pair of disjoint nonempty vertex
//! subsets, at least one subset contains a vertex with r or more neighbors
//! outside it. Deciding this is exponential in the vertex count; the check
//! below tabulates reachability for all `2^N` subsets and then answers the
//! pair question with a subset-sum sweep, which visits the same `3^N` pairs
//! implicitly in `O(N 2^N)` time.

use super::Graph;
use crate::error::{Error, Result};
use crate::par::Exec;

/// Default vertex cap for exhaustive robustness checks.
pub const DEFAULT_EXHAUSTIVE_LIMIT: usize = 14;

// Subset tables are indexed by u32 masks.
const HARD_LIMIT: usize = 26;

/// True iff some vertex of `subset` has at least `r` neighbors outside it.
pub fn is_r_reachable(graph: &Graph, subset: &[usize], r: usize) -> Result<bool> {
    if subset.is_empty() {
        return Err(Error::InvalidArgument("r-reachability of an empty set".into()));
    }
    let n = graph.vertex_count();
    let mut member = vec![false; n];
    for &v in subset {
        if v >= n {
            return Err(Error::InvalidArgument(format!("vertex {v} not in graph")));
        }
        member[v] = true;
    }
    Ok(subset.iter().any(|&i| {
        graph.neighbors(i).iter().filter(|&&j| !member[j]).count() >= r
    }))
}

/// Exhaustive r-robustness with the default size cap.
pub fn is_r_robust(graph: &Graph, r: usize) -> Result<bool> {
    is_r_robust_with(graph, r, DEFAULT_EXHAUSTIVE_LIMIT, Exec::default())
}

/// Exhaustive r-robustness check refusing graphs above `limit` vertices.
///
/// `r = 1` is answered by a connectivity test for any size, since a graph on
/// two or more vertices is 1-robust exactly when it is connected.
pub fn is_r_robust_with(graph: &Graph, r: usize, limit: usize, exec: Exec) -> Result<bool> {
    if r == 0 {
        return Err(Error::InvalidArgument("robustness level must be positive".into()));
    }
    let n = graph.vertex_count();
    if n < 2 {
        return Ok(true);
    }
    if r == 1 {
        return Ok(graph.is_connected());
    }
    let limit = limit.min(HARD_LIMIT);
    if n > limit {
        return Err(Error::SizeLimit { vertices: n, limit });
    }

    let full: u32 = (1u32 << n) - 1;
    let neighbor_masks: Vec<u32> = (0..n)
        .map(|i| graph.neighbors(i).iter().fold(0u32, |m, &j| m | (1 << j)))
        .collect();

    let subsets = 1usize << n;
    let reachable: Vec<bool> = exec.map_range(subsets, |mask| {
        let mask = mask as u32;
        let mut rest = mask;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if (neighbor_masks[i] & !mask).count_ones() as usize >= r {
                return true;
            }
        }
        false
    });

    // contains_unreachable[m]: some nonempty subset of m is not r-reachable.
    let mut contains_unreachable: Vec<bool> = (0..subsets)
        .map(|m| m != 0 && !reachable[m])
        .collect();
    for bit in 0..n {
        let b = 1usize << bit;
        for m in 0..subsets {
            if m & b != 0 && contains_unreachable[m ^ b] {
                contains_unreachable[m] = true;
            }
        }
    }

    let violated = exec.any_range(subsets, |s1| {
        s1 != 0 && !reachable[s1] && contains_unreachable[(full & !(s1 as u32)) as usize]
    });
    Ok(!violated)
}

/// Largest r for which the graph is r-robust (0 if not even 1-robust).
pub fn max_robustness(graph: &Graph) -> Result<usize> {
    max_robustness_with(graph, DEFAULT_EXHAUSTIVE_LIMIT, Exec::default())
}

pub fn max_robustness_with(graph: &Graph, limit: usize, exec: Exec) -> Result<usize> {
    let n = graph.vertex_count();
    if n < 2 {
        return Ok(0);
    }
    if n > limit.min(HARD_LIMIT) {
        return Err(Error::SizeLimit {
            vertices: n,
            limit: limit.min(HARD_LIMIT),
        });
    }
    let mut best = 0;
    for r in 1..=n {
        if is_r_robust_with(graph, r, limit, exec)? {
            best = r;
        } else {
            break;
        }
    }
    Ok(best)
}

#[cfg(test)]
pub(crate) mod oracle {
    use super::super::Graph;

    /// Direct enumeration of all `3^N` assignments of vertices to S1, S2 or
    /// neither, checking the definition literally.
    pub fn brute_force_r_robust(graph: &Graph, r: usize) -> bool {
        let n = graph.vertex_count();
        let reachable = |set: &[bool]| {
            (0..n).any(|i| {
                set[i] && graph.neighbors(i).iter().filter(|&&j| !set[j]).count() >= r
            })
        };
        let total = 3usize.pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let mut s1 = vec![false; n];
            let mut s2 = vec![false; n];
            for v in 0..n {
                match c % 3 {
                    1 => s1[v] = true,
                    2 => s2[v] = true,
                    _ => {}
                }
                c /= 3;
            }
            if !s1.contains(&true) || !s2.contains(&true) {
                continue;
            }
            if !reachable(&s1) && !reachable(&s2) {
                return false;
            }
        }
        true
    }
}
