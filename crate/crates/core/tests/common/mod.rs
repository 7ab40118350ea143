#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use crowdnet_core::WorkerGraph;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn name(i: usize) -> String {
    format!("v{i:03}")
}

pub fn graph_from(n: usize, edges: &[(usize, usize)]) -> WorkerGraph {
    let names: Vec<String> = (0..n).map(name).collect();
    let e: Vec<(String, String, u32)> = edges.iter().map(|&(u, v)| (name(u), name(v), 1)).collect();
    WorkerGraph::from_edges(&names, &e).unwrap()
}

/// Random simple graph; when `connected`, a random spanning tree is laid first.
pub fn random_edges(rng: &mut ChaCha8Rng, n: usize, p: f64, connected: bool) -> Vec<(usize, usize)> {
    let mut set = BTreeSet::new();
    if connected {
        for i in 1..n {
            let j = rng.gen_range(0..i);
            set.insert((j, i));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                set.insert((i, j));
            }
        }
    }
    set.into_iter().collect()
}

pub fn adjacency(g: &WorkerGraph) -> Vec<Vec<usize>> {
    (0..g.node_count()).map(|i| g.neighbors(i).iter().map(|&(j, _)| j).collect()).collect()
}

pub fn bfs(adj: &[Vec<usize>], s: usize) -> Vec<Option<usize>> {
    let mut d = vec![None; adj.len()];
    d[s] = Some(0);
    let mut q = VecDeque::from([s]);
    while let Some(u) = q.pop_front() {
        for &v in &adj[u] {
            if d[v].is_none() {
                d[v] = Some(d[u].unwrap() + 1);
                q.push_back(v);
            }
        }
    }
    d
}

/// Every shortest path from `s` to `t`, listed explicitly.
pub fn shortest_paths(adj: &[Vec<usize>], s: usize, t: usize) -> Vec<Vec<usize>> {
    let ds = bfs(adj, s);
    let Some(target) = ds[t] else { return Vec::new() };
    let mut out = Vec::new();
    let mut stack = vec![vec![s]];
    while let Some(path) = stack.pop() {
        let u = *path.last().unwrap();
        if u == t {
            out.push(path);
            continue;
        }
        let du = ds[u].unwrap();
        if du >= target {
            continue;
        }
        for &v in &adj[u] {
            if ds[v] == Some(du + 1) {
                let mut next = path.clone();
                next.push(v);
                stack.push(next);
            }
        }
    }
    out.retain(|p| p.len() == target + 1);
    out
}

/// Betweenness by explicit path enumeration, normalized by (n−1)(n−2)/2 over
/// unordered pairs.
pub fn naive_betweenness(g: &WorkerGraph) -> Vec<f64> {
    let n = g.node_count();
    let adj = adjacency(g);
    let mut bc = vec![0.0; n];
    for s in 0..n {
        for t in s + 1..n {
            let paths = shortest_paths(&adj, s, t);
            if paths.is_empty() {
                continue;
            }
            let share = 1.0 / paths.len() as f64;
            for p in &paths {
                for &v in &p[1..p.len() - 1] {
                    bc[v] += share;
                }
            }
        }
    }
    if n > 2 {
        let norm = 2.0 / ((n - 1) as f64 * (n - 2) as f64);
        bc.iter_mut().for_each(|b| *b *= norm);
    }
    bc
}

/// `Σ_ij [A_ij − k_i k_j / 2m] δ(c_i, c_j) / 2m` over the unweighted adjacency.
pub fn double_sum_modularity(g: &WorkerGraph, assignment: &[usize]) -> f64 {
    let n = g.node_count();
    let m = g.edge_count() as f64;
    let k: Vec<f64> = (0..n).map(|i| g.degree(i) as f64).collect();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if assignment[i] != assignment[j] {
                continue;
            }
            let a = if g.weight(i, j).is_some() { 1.0 } else { 0.0 };
            q += a - k[i] * k[j] / (2.0 * m);
        }
    }
    q / (2.0 * m)
}

/// Two-pass SSB/SSW and F.
pub fn two_pass_f(groups: &[Vec<f64>]) -> f64 {
    let total: usize = groups.iter().map(Vec::len).sum();
    let grand: f64 = groups.iter().flatten().sum::<f64>() / total as f64;
    let mut ssb = 0.0;
    let mut ssw = 0.0;
    for g in groups {
        let mean = g.iter().sum::<f64>() / g.len() as f64;
        ssb += g.len() as f64 * (mean - grand).powi(2);
        ssw += g.iter().map(|x| (x - mean).powi(2)).sum::<f64>();
    }
    let k = groups.len() as f64;
    (ssb / (k - 1.0)) / (ssw / (total as f64 - k))
}
