//! Per-worker network position: common neighbours, worker rank, closeness
//! and betweenness, plus per-cluster summaries.
//!
//! Distances are unweighted hop counts. Worker rank is damped link analysis
//! over co-registration weights (damping 0.85, uniform teleport).

use std::collections::{BTreeMap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::community::Partition;
use crate::error::{Error, Result};
use crate::graph::WorkerGraph;
use crate::stats::{describe, Summary};

pub const DAMPING: f64 = 0.85;
const RANK_TOLERANCE: f64 = 1e-12;
const RANK_MAX_ITER: usize = 10_000;
/// Fixed source-chunk size; keeps parallel accumulation order independent of
/// the thread count.
const SOURCE_CHUNK: usize = 32;

/// Peers over which the mean common-neighbour count is taken.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CnScope {
    #[default]
    Cluster,
    Global,
}

/// `|N(u) ∩ N(v)|` for two distinct nodes given by id.
pub fn common_neighbors(g: &WorkerGraph, u: &str, v: &str) -> Result<usize> {
    let iu = g.index_of(u).ok_or_else(|| Error::UnknownNode(u.into()))?;
    let iv = g.index_of(v).ok_or_else(|| Error::UnknownNode(v.into()))?;
    if iu == iv {
        return Err(Error::InvalidConfig(format!("common neighbours need two distinct nodes, got `{u}` twice")));
    }
    Ok(common_neighbor_count(g, iu, iv))
}

fn common_neighbor_count(g: &WorkerGraph, u: usize, v: usize) -> usize {
    let (a, b) = (g.neighbors(u), g.neighbors(v));
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Mean common-neighbour count of every node against its peers.
///
/// For node `w` the sum over peers `x` of `|N(w) ∩ N(x)|` equals
/// `Σ_{y ∈ N(w)} (#neighbours of y among the peers − 1)`, which avoids the
/// quadratic pair loop. A node without peers scores 0.
pub fn mean_common_neighbors(g: &WorkerGraph, assignment: &[usize], scope: CnScope) -> Vec<f64> {
    let n = g.node_count();
    match scope {
        CnScope::Global => (0..n)
            .map(|w| {
                if n < 2 {
                    return 0.0;
                }
                let s: usize = g.neighbors(w).iter().map(|&(y, _)| g.degree(y) - 1).sum();
                s as f64 / (n - 1) as f64
            })
            .collect(),
        CnScope::Cluster => {
            let mut size: BTreeMap<usize, usize> = BTreeMap::new();
            for &c in assignment {
                *size.entry(c).or_default() += 1;
            }
            // Neighbours of y inside each cluster.
            let per_cluster: Vec<BTreeMap<usize, usize>> = (0..n)
                .map(|y| {
                    let mut m = BTreeMap::new();
                    for &(x, _) in g.neighbors(y) {
                        *m.entry(assignment[x]).or_default() += 1;
                    }
                    m
                })
                .collect();
            (0..n)
                .map(|w| {
                    let c = assignment[w];
                    let peers = size[&c] - 1;
                    if peers == 0 {
                        return 0.0;
                    }
                    let s: usize = g.neighbors(w).iter().map(|&(y, _)| per_cluster[y][&c] - 1).sum();
                    s as f64 / peers as f64
                })
                .collect()
        }
    }
}

/// Damped weighted link analysis. Scores sum to 1; dangling (isolated) nodes
/// spread their mass uniformly.
pub fn worker_rank(g: &WorkerGraph) -> Vec<f64> {
    worker_rank_with(g, DAMPING)
}

pub fn worker_rank_with(g: &WorkerGraph, damping: f64) -> Vec<f64> {
    let n = g.node_count();
    if n == 0 {
        return Vec::new();
    }
    let nf = n as f64;
    let strength: Vec<f64> = (0..n).map(|i| g.weighted_degree(i) as f64).collect();
    let mut rank = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    for _ in 0..RANK_MAX_ITER {
        let dangling: f64 = (0..n).filter(|&i| strength[i] == 0.0).map(|i| rank[i]).sum();
        let base = (1.0 - damping) / nf + damping * dangling / nf;
        for (v, slot) in next.iter_mut().enumerate() {
            let inflow: f64 = g.neighbors(v).iter().map(|&(u, w)| rank[u] * f64::from(w) / strength[u]).sum();
            *slot = base + damping * inflow;
        }
        let total: f64 = next.iter().sum();
        let mut residual = 0.0;
        for (r, x) in rank.iter_mut().zip(&next) {
            let x = x / total;
            residual += (x - *r).abs();
            *r = x;
        }
        if residual < RANK_TOLERANCE {
            break;
        }
    }
    rank
}

/// Hop distances from `s`; `usize::MAX` marks unreachable nodes.
fn bfs(g: &WorkerGraph, s: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.node_count()];
    let mut queue = VecDeque::from([s]);
    dist[s] = 0;
    while let Some(v) = queue.pop_front() {
        for &(w, _) in g.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Closeness with component scaling: `((r−1)/Σd) · ((r−1)/(n−1))`, where `r`
/// counts the nodes reachable from `v` including `v`.
pub fn closeness(g: &WorkerGraph) -> Vec<f64> {
    let n = g.node_count();
    (0..n)
        .into_par_iter()
        .map(|v| {
            let dist = bfs(g, v);
            let (reach, total) =
                dist.iter().filter(|&&d| d != usize::MAX).fold((0usize, 0usize), |(r, t), &d| (r + 1, t + d));
            if reach <= 1 || n <= 1 {
                return 0.0;
            }
            let r1 = (reach - 1) as f64;
            (r1 / total as f64) * (r1 / (n - 1) as f64)
        })
        .collect()
}

/// Dependency accumulation from one source (unnormalized, ordered pairs).
fn accumulate_from(g: &WorkerGraph, s: usize, into: &mut [f64]) {
    let n = g.node_count();
    let mut stack = Vec::with_capacity(n);
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    sigma[s] = 1.0;
    dist[s] = 0;
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        stack.push(v);
        for &(w, _) in g.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
            if dist[w] == dist[v] + 1 {
                sigma[w] += sigma[v];
                preds[w].push(v);
            }
        }
    }
    let mut delta = vec![0.0f64; n];
    while let Some(w) = stack.pop() {
        for &v in &preds[w] {
            delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
        }
        if w != s {
            into[w] += delta[w];
        }
    }
}

/// Shortest-path betweenness normalized by `(n−1)(n−2)/2`.
pub fn betweenness(g: &WorkerGraph) -> Vec<f64> {
    let n = g.node_count();
    if n < 3 {
        return vec![0.0; n];
    }
    let sources: Vec<usize> = (0..n).collect();
    let partials: Vec<Vec<f64>> = sources
        .par_chunks(SOURCE_CHUNK)
        .map(|chunk| {
            let mut acc = vec![0.0; n];
            for &s in chunk {
                accumulate_from(g, s, &mut acc);
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; n];
    for p in &partials {
        for (t, x) in total.iter_mut().zip(p) {
            *t += x;
        }
    }
    // Each unordered pair was counted from both ends.
    let norm = 1.0 / ((n - 1) as f64 * (n - 2) as f64);
    total.iter().map(|b| b * norm).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralityScores {
    pub nodes: Vec<String>,
    pub common_neighbors: Vec<f64>,
    pub worker_rank: Vec<f64>,
    pub closeness: Vec<f64>,
    pub betweenness: Vec<f64>,
}

pub fn compute_scores(g: &WorkerGraph, p: &Partition, scope: CnScope) -> CentralityScores {
    CentralityScores {
        nodes: g.nodes().to_vec(),
        common_neighbors: mean_common_neighbors(g, &p.assignment, scope),
        worker_rank: worker_rank(g),
        closeness: closeness(g),
        betweenness: betweenness(g),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterNetworkStats {
    pub cluster: usize,
    pub size: usize,
    pub common_neighbors: Summary,
    pub worker_rank: Summary,
    pub closeness: Summary,
    pub betweenness: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterNetworkSummary {
    pub clusters: Vec<ClusterNetworkStats>,
}

/// Per-cluster mean and population standard deviation of each score.
pub fn summarize_clusters(scores: &CentralityScores, p: &Partition) -> Result<ClusterNetworkSummary> {
    if scores.nodes.len() != p.assignment.len() {
        return Err(Error::InvalidConfig("scores and partition cover different nodes".into()));
    }
    let pick = |v: &[f64], members: &[usize]| describe(&members.iter().map(|&i| v[i]).collect::<Vec<_>>());
    let clusters = p
        .members()
        .iter()
        .enumerate()
        .map(|(c, members)| {
            Ok(ClusterNetworkStats {
                cluster: c,
                size: members.len(),
                common_neighbors: pick(&scores.common_neighbors, members)?,
                worker_rank: pick(&scores.worker_rank, members)?,
                closeness: pick(&scores.closeness, members)?,
                betweenness: pick(&scores.betweenness, members)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ClusterNetworkSummary { clusters })
}
