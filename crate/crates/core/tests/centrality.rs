mod common;

use common::{graph_from, naive_betweenness, random_edges, rng};
use crowdnet_core::centrality::{betweenness, closeness, mean_common_neighbors, worker_rank, CnScope};
use crowdnet_core::community::greedy_cluster;
use crowdnet_core::{EdgeWeighting, WorkerGraph};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn arb_edges(max_n: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (1..=max_n).prop_flat_map(|n| {
        let all: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let len = all.len();
        (Just(n), prop::sample::subsequence(all, 0..=len))
    })
}

fn weighted(n: usize, edges: &[(usize, usize, u32)], names: &[String]) -> WorkerGraph {
    let e: Vec<(String, String, u32)> =
        edges.iter().map(|&(u, v, w)| (names[u].clone(), names[v].clone(), w)).collect();
    WorkerGraph::from_edges(&names[..n], &e).unwrap()
}

#[test]
fn betweenness_matches_path_enumeration() {
    let mut r = rng(3);
    for k in 0..20 {
        let n = r.gen_range(3..=50);
        let p = r.gen_range(0.02..0.12);
        let edges = random_edges(&mut r, n, p, k % 3 != 0);
        let g = graph_from(n, &edges);
        let fast = betweenness(&g);
        let slow = naive_betweenness(&g);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).abs() < 1e-9, "graph {k}: {a} vs {b}");
        }
    }
}

proptest! {
    #[test]
    fn rank_sums_to_one_and_is_equivariant(
        (n, edges) in arb_edges(12),
        weights in prop::collection::vec(1u32..5, 66),
        seed in any::<u64>(),
    ) {
        let names: Vec<String> = (0..n).map(|i| format!("n{i:02}")).collect();
        let triples: Vec<(usize, usize, u32)> = edges.iter().zip(&weights).map(|(&(u, v), &w)| (u, v, w)).collect();
        let g = weighted(n, &triples, &names);
        let wr = worker_rank(&g);
        prop_assert!((wr.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(wr.iter().all(|&x| x > 0.0 && x < 1.0 || n == 1));

        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng(seed));
        let renamed: Vec<String> = perm.iter().map(|&p| format!("n{p:02}")).collect();
        let g2 = weighted(n, &triples, &renamed);
        let wr2 = worker_rank(&g2);
        let cc = closeness(&g);
        let cc2 = closeness(&g2);
        let bc = betweenness(&g);
        let bc2 = betweenness(&g2);
        for i in 0..n {
            let j = g2.index_of(&renamed[i]).unwrap();
            prop_assert!((wr[i] - wr2[j]).abs() < 1e-9);
            prop_assert!((cc[i] - cc2[j]).abs() < 1e-12);
            prop_assert!((bc[i] - bc2[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn scores_are_normalized((n, edges) in arb_edges(12)) {
        let g = graph_from(n, &edges);
        for v in closeness(&g).into_iter().chain(betweenness(&g)) {
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v));
        }
    }

    #[test]
    fn closeness_is_one_iff_adjacent_to_all((n, edges) in arb_edges(10)) {
        prop_assume!(n >= 2);
        let mut connected = edges.clone();
        connected.extend((1..n).map(|i| (i - 1, i)));
        connected.sort();
        connected.dedup();
        let g = graph_from(n, &connected);
        let cc = closeness(&g);
        for (i, c) in cc.iter().enumerate() {
            let full = g.degree(i) == n - 1;
            prop_assert_eq!((c - 1.0).abs() < 1e-12, full, "node {}", i);
        }
    }

    #[test]
    fn parallel_results_are_bitwise_stable((n, edges) in arb_edges(40)) {
        let g = graph_from(n, &edges);
        prop_assert_eq!(betweenness(&g), betweenness(&g));
        prop_assert_eq!(closeness(&g), closeness(&g));
    }

    #[test]
    fn cluster_mean_common_neighbors_bounded((n, edges) in arb_edges(10)) {
        prop_assume!(!edges.is_empty());
        let g = graph_from(n, &edges);
        let p = greedy_cluster(&g, EdgeWeighting::Unweighted).unwrap();
        for scope in [CnScope::Cluster, CnScope::Global] {
            for (i, v) in mean_common_neighbors(&g, &p.assignment, scope).into_iter().enumerate() {
                prop_assert!(v >= 0.0 && v <= g.degree(i) as f64);
            }
        }
    }
}
