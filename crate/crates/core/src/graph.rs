//! Worker/task incidence and its weighted one-mode projection onto workers.
//!
//! Identifiers are opaque strings kept in lexicographic order; node indices
//! are positions in that order, so iteration is deterministic.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::data::RegistrationEvent;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BipartiteGraph {
    worker_ids: Vec<String>,
    task_ids: Vec<String>,
    /// Per task (same order as `task_ids`), sorted worker indices.
    incidence: Vec<Vec<usize>>,
    duplicates: usize,
}

impl BipartiteGraph {
    pub fn worker_ids(&self) -> &[String] {
        &self.worker_ids
    }

    pub fn task_ids(&self) -> &[String] {
        &self.task_ids
    }

    /// Registrant indices of the task at position `task`.
    pub fn registrants(&self, task: usize) -> &[usize] {
        &self.incidence[task]
    }

    pub fn incidence(&self) -> BTreeMap<&str, BTreeSet<&str>> {
        self.task_ids
            .iter()
            .zip(&self.incidence)
            .map(|(t, ws)| (t.as_str(), ws.iter().map(|&w| self.worker_ids[w].as_str()).collect()))
            .collect()
    }

    /// Repeated (worker, task) pairs dropped during construction.
    pub fn duplicate_count(&self) -> usize {
        self.duplicates
    }
}

/// Distinct (worker, task) registration pairs. Repeats are dropped and counted.
pub fn build_bipartite(events: &[RegistrationEvent]) -> BipartiteGraph {
    build_bipartite_from_pairs(events.iter().map(|e| (e.worker_id.as_str(), e.task_id.as_str())))
}

pub fn build_bipartite_from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> BipartiteGraph {
    let mut by_task: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    let mut workers = BTreeSet::new();
    let mut duplicates = 0;
    for (w, t) in pairs {
        workers.insert(w);
        if !by_task.entry(t).or_default().insert(w) {
            duplicates += 1;
        }
    }
    let worker_ids: Vec<String> = workers.iter().map(|w| w.to_string()).collect();
    let index: HashMap<&str, usize> = workers.iter().enumerate().map(|(i, &w)| (w, i)).collect();
    let task_ids = by_task.keys().map(|t| t.to_string()).collect();
    let incidence = by_task.values().map(|ws| ws.iter().map(|w| index[w]).collect()).collect();
    BipartiteGraph { worker_ids, task_ids, incidence, duplicates }
}

/// Weighted undirected co-registration network.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WorkerGraph {
    nodes: Vec<String>,
    /// Sorted `(neighbor, weight)` lists; symmetric.
    adjacency: Vec<Vec<(usize, u32)>>,
    edge_count: usize,
}

impl WorkerGraph {
    /// Build from node ids and `(u, v, weight)` triples over those ids.
    ///
    /// Self-loops and zero weights are rejected; repeated pairs accumulate.
    pub fn from_edges<S: AsRef<str>>(nodes: &[S], edges: &[(S, S, u32)]) -> Result<Self> {
        let mut ids: Vec<String> = nodes.iter().map(|s| s.as_ref().to_string()).collect();
        ids.sort();
        ids.dedup();
        let index: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let lookup = |s: &S| index.get(s.as_ref()).copied().ok_or_else(|| Error::UnknownNode(s.as_ref().into()));
        let mut weights: BTreeMap<(usize, usize), u32> = BTreeMap::new();
        for (a, b, w) in edges {
            let (u, v) = (lookup(a)?, lookup(b)?);
            if u == v {
                return Err(Error::InvalidConfig(format!("self-loop on `{}`", a.as_ref())));
            }
            if *w == 0 {
                return Err(Error::InvalidConfig("edge weight must be at least 1".into()));
            }
            *weights.entry((u.min(v), u.max(v))).or_default() += w;
        }
        Ok(Self::assemble(ids, weights))
    }

    fn assemble(nodes: Vec<String>, weights: BTreeMap<(usize, usize), u32>) -> Self {
        let mut adjacency = vec![Vec::new(); nodes.len()];
        for (&(u, v), &w) in &weights {
            adjacency[u].push((v, w));
            adjacency[v].push((u, w));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        WorkerGraph { nodes, adjacency, edge_count: weights.len() }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_id(&self, i: usize) -> &str {
        &self.nodes[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.nodes.binary_search_by(|n| n.as_str().cmp(id)).ok()
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, u32)] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn weighted_degree(&self, i: usize) -> u64 {
        self.adjacency[i].iter().map(|&(_, w)| u64::from(w)).sum()
    }

    pub fn total_weight(&self) -> u64 {
        self.edges().map(|(_, _, w)| u64::from(w)).sum()
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<u32> {
        let list = &self.adjacency[u];
        list.binary_search_by_key(&v, |&(n, _)| n).ok().map(|i| list[i].1)
    }

    /// Each undirected edge once, `u < v`, in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&(v, _)| v > u).map(move |&(v, w)| (u, v, w)))
    }
}

/// Co-registration projection with the default weight threshold of 1.
pub fn project_workers(b: &BipartiteGraph) -> WorkerGraph {
    project_workers_min_weight(b, 1)
}

/// Co-registration projection keeping only edges of weight `>= min_weight`.
/// Every bipartite worker stays a node even if it loses all its edges.
pub fn project_workers_min_weight(b: &BipartiteGraph, min_weight: u32) -> WorkerGraph {
    let mut weights: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    for ws in &b.incidence {
        for (i, &u) in ws.iter().enumerate() {
            for &v in &ws[i + 1..] {
                *weights.entry((u, v)).or_default() += 1;
            }
        }
    }
    weights.retain(|_, w| *w >= min_weight.max(1));
    WorkerGraph::assemble(b.worker_ids.clone(), weights)
}

/// Unweighted degree of every worker.
pub fn degree_sequence(g: &WorkerGraph) -> BTreeMap<String, usize> {
    g.nodes.iter().enumerate().map(|(i, id)| (id.clone(), g.degree(i))).collect()
}
