//! Modularity and greedy agglomerative modularity maximization.
//!
//! The agglomeration starts from singletons and repeatedly merges the pair of
//! adjacent communities with the largest modularity gain, all the way down to
//! one community per connected component, and returns the best partition seen
//! on that path.
//!
//! Gains are computed in exact integer arithmetic. With total edge weight `m`,
//! community degree sums `D` and inter-community weight `L`,
//! `ΔQ · 2m² = 2m·L_ab − D_a·D_b`, so equal gains compare equal and the
//! tie-break on community labels is reliable.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WorkerGraph;

/// Whether clustering counts edges or sums their co-registration weights.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeWeighting {
    #[default]
    Unweighted,
    Weighted,
}

impl EdgeWeighting {
    fn value(self, w: u32) -> i64 {
        match self {
            EdgeWeighting::Unweighted => 1,
            EdgeWeighting::Weighted => i64::from(w),
        }
    }
}

/// One agglomeration step. Community labels are the smallest node index in
/// the community; `left < right` and the merged community keeps `left`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub delta_q: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    /// Cluster index per graph node (graph node order). Clusters are numbered
    /// from 0 by decreasing size, ties by smallest member.
    pub assignment: Vec<usize>,
    pub modularity: f64,
    /// Full dendrogram, including merges past the best partition.
    pub merge_trace: Vec<Merge>,
    /// Number of leading trace entries applied to reach `assignment`.
    pub best_step: usize,
}

impl Partition {
    pub fn cluster_count(&self) -> usize {
        self.assignment.iter().max().map_or(0, |&c| c + 1)
    }

    /// Node indices of each cluster, in cluster order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.cluster_count()];
        for (node, &c) in self.assignment.iter().enumerate() {
            out[c].push(node);
        }
        out
    }
}

/// Cluster sizes in decreasing order.
pub fn cluster_sizes(p: &Partition) -> Vec<usize> {
    let mut sizes: Vec<usize> = p.members().iter().map(Vec::len).collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

/// `Q = Σ_c [L_c/m − (D_c/2m)²]` for an arbitrary labelling of the nodes.
pub fn modularity(g: &WorkerGraph, assignment: &[usize], weighting: EdgeWeighting) -> Result<f64> {
    if assignment.len() != g.node_count() {
        return Err(Error::InvalidConfig(format!(
            "assignment covers {} nodes, graph has {}",
            assignment.len(),
            g.node_count()
        )));
    }
    let m: i64 = g.edges().map(|(_, _, w)| weighting.value(w)).sum();
    if m == 0 {
        return Err(Error::EmptyGraph);
    }
    let k = assignment.iter().max().map_or(0, |&c| c + 1);
    let mut internal = vec![0i64; k];
    let mut degree = vec![0i64; k];
    for (u, v, w) in g.edges() {
        let w = weighting.value(w);
        degree[assignment[u]] += w;
        degree[assignment[v]] += w;
        if assignment[u] == assignment[v] {
            internal[assignment[u]] += w;
        }
    }
    let m = m as f64;
    Ok(internal.iter().zip(&degree).map(|(&l, &d)| l as f64 / m - (d as f64 / (2.0 * m)).powi(2)).sum())
}

struct Community {
    degree: i64,
    links: BTreeMap<usize, i64>,
}

/// Greedy agglomeration; returns the maximum-modularity partition on the path.
pub fn greedy_cluster(g: &WorkerGraph, weighting: EdgeWeighting) -> Result<Partition> {
    let n = g.node_count();
    let m: i64 = g.edges().map(|(_, _, w)| weighting.value(w)).sum();
    if m == 0 {
        return Err(Error::EmptyGraph);
    }

    let mut comms: Vec<Option<Community>> = (0..n)
        .map(|i| {
            let links: BTreeMap<usize, i64> = g.neighbors(i).iter().map(|&(j, w)| (j, weighting.value(w))).collect();
            Some(Community { degree: links.values().sum(), links })
        })
        .collect();

    // Gain scaled by 2m²; pair key ordered so `first()` is the largest gain,
    // then the smallest (left, right) labels.
    let gain = |da: i64, db: i64, l: i64| 2 * m * l - da * db;
    let mut queue: BTreeSet<(Reverse<i64>, usize, usize)> = BTreeSet::new();
    for (u, v, _) in g.edges() {
        let (a, b) = (comms[u].as_ref().unwrap(), comms[v].as_ref().unwrap());
        queue.insert((Reverse(gain(a.degree, b.degree, a.links[&v])), u, v));
    }

    // Q scaled by 4m²: Σ_c (4m·L_c − D_c²).
    let mut q_scaled: i64 = -comms.iter().flatten().map(|c| c.degree * c.degree).sum::<i64>();
    let mut best = q_scaled;
    let mut best_step = 0;
    let scale = 2.0 * (m as f64) * (m as f64);
    let mut trace = Vec::with_capacity(n.saturating_sub(1));

    while let Some((Reverse(dq), a, b)) = queue.pop_first() {
        trace.push(Merge { left: a, right: b, delta_q: dq as f64 / scale });
        q_scaled += 2 * dq;
        if q_scaled > best {
            best = q_scaled;
            best_step = trace.len();
        }

        let cb = comms[b].take().expect("live community");
        let da = comms[a].as_ref().expect("live community").degree;
        for (&k, &l) in &comms[a].as_ref().unwrap().links {
            if k != b {
                let dk = comms[k].as_ref().unwrap().degree;
                queue.remove(&(Reverse(gain(da, dk, l)), a.min(k), a.max(k)));
            }
        }
        for (&k, &l) in &cb.links {
            if k != a {
                let dk = comms[k].as_ref().unwrap().degree;
                queue.remove(&(Reverse(gain(cb.degree, dk, l)), b.min(k), b.max(k)));
            }
        }

        for (&k, &l) in &cb.links {
            if k == a {
                continue;
            }
            let ck = comms[k].as_mut().unwrap();
            ck.links.remove(&b);
            *ck.links.entry(a).or_default() += l;
            *comms[a].as_mut().unwrap().links.entry(k).or_default() += l;
        }
        let ca = comms[a].as_mut().unwrap();
        ca.links.remove(&b);
        ca.degree += cb.degree;

        let ca = comms[a].as_ref().unwrap();
        for (&k, &l) in &ca.links {
            let dk = comms[k].as_ref().unwrap().degree;
            queue.insert((Reverse(gain(ca.degree, dk, l)), a.min(k), a.max(k)));
        }
    }

    let assignment = replay(n, &trace[..best_step]);
    let modularity = modularity(g, &assignment, weighting)?;
    Ok(Partition { assignment, modularity, merge_trace: trace, best_step })
}

/// Apply `merges` to singletons and number the resulting clusters canonically.
pub fn replay(n: usize, merges: &[Merge]) -> Vec<usize> {
    let mut label: Vec<usize> = (0..n).collect();
    let mut groups: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    for mg in merges {
        let moved = std::mem::take(&mut groups[mg.right]);
        for &v in &moved {
            label[v] = mg.left;
        }
        groups[mg.left].extend(moved);
    }
    canonical_labels(&label)
}

/// Renumber arbitrary labels: decreasing size, ties by smallest node index.
pub fn canonical_labels(labels: &[usize]) -> Vec<usize> {
    let mut groups: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for (node, &l) in labels.iter().enumerate() {
        let e = groups.entry(l).or_insert((0, node));
        e.0 += 1;
        e.1 = e.1.min(node);
    }
    let mut order: Vec<(usize, usize, usize)> = groups.into_iter().map(|(l, (size, first))| (size, first, l)).collect();
    order.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
    let remap: BTreeMap<usize, usize> = order.iter().enumerate().map(|(i, &(_, _, l))| (l, i)).collect();
    labels.iter().map(|l| remap[l]).collect()
}

/// Rebuild a partition from a stored assignment and trace.
pub fn partition_from_parts(
    g: &WorkerGraph,
    assignment: Vec<usize>,
    merge_trace: Vec<Merge>,
    best_step: usize,
    weighting: EdgeWeighting,
) -> Result<Partition> {
    let modularity = modularity(g, &assignment, weighting)?;
    Ok(Partition { assignment: canonical_labels(&assignment), modularity, merge_trace, best_step })
}

fn entropy(counts: impl Iterator<Item = usize>, n: f64) -> f64 {
    counts.filter(|&c| c > 0).map(|c| c as f64 / n).map(|p| -p * p.ln()).sum()
}

/// Normalized mutual information `2·I(X;Y) / (H(X) + H(Y))` between two
/// labellings of the same items. Two single-cluster labellings score 1.
pub fn normalized_mutual_information(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len(), "labellings must cover the same items");
    if a.is_empty() {
        return 1.0;
    }
    let n = a.len() as f64;
    let mut joint: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut ca: BTreeMap<usize, usize> = BTreeMap::new();
    let mut cb: BTreeMap<usize, usize> = BTreeMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *joint.entry((x, y)).or_default() += 1;
        *ca.entry(x).or_default() += 1;
        *cb.entry(y).or_default() += 1;
    }
    let (ha, hb) = (entropy(ca.values().copied(), n), entropy(cb.values().copied(), n));
    if ha + hb == 0.0 {
        return 1.0;
    }
    let mi: f64 = joint
        .iter()
        .map(|(&(x, y), &c)| {
            let pxy = c as f64 / n;
            pxy * (pxy * n * n / (ca[&x] as f64 * cb[&y] as f64)).ln()
        })
        .sum();
    (2.0 * mi / (ha + hb)).clamp(0.0, 1.0)
}

/// True when both labellings induce the same set of groups.
pub fn same_partition(a: &[usize], b: &[usize]) -> bool {
    a.len() == b.len() && canonical_labels(a) == canonical_labels(b)
}
