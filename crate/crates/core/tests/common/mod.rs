#![allow(dead_code)]

use std::io::Write;

use resilient_ogd::graph::Graph;

/// Writes straight to the process stdout so the line survives test capture.
pub fn report(criterion: usize, pass: bool, detail: &str) {
    let line = format!(
        "[acceptance] criterion {criterion:>2}: {} | {detail}\n",
        if pass { "PASS" } else { "FAIL" }
    );
    let _ = std::io::stdout().write_all(line.as_bytes());
}

/// r-robustness by enumerating every assignment of vertices to
/// (S1, S2, neither), 3^N cases.
pub fn brute_force_r_robust(graph: &Graph, r: usize) -> bool {
    let n = graph.vertex_count();
    let nbr: Vec<u32> = (0..n)
        .map(|v| graph.neighbors(v).iter().fold(0u32, |m, &u| m | (1 << u)))
        .collect();
    let reachable = |set: u32| {
        (0..n).any(|v| set & (1 << v) != 0 && (nbr[v] & !set).count_ones() as usize >= r)
    };
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let (mut s1, mut s2, mut c) = (0u32, 0u32, code);
        for v in 0..n {
            match c % 3 {
                1 => s1 |= 1 << v,
                2 => s2 |= 1 << v,
                _ => {}
            }
            c /= 3;
        }
        if s1 == 0 || s2 == 0 {
            continue;
        }
        if !reachable(s1) && !reachable(s2) {
            return false;
        }
    }
    true
}

/// Sort, drop `f` from each end, average the rest with the agent's own value.
pub fn naive_trimmed_mean(own: f64, mut received: Vec<f64>, f: usize) -> f64 {
    received.sort_by(f64::total_cmp);
    let kept = &received[f..received.len() - f];
    (own + kept.iter().sum::<f64>()) / (kept.len() + 1) as f64
}
