use std::collections::BTreeMap;

use crowdnet_core::data::generate_synthetic;
use crowdnet_core::metrics::{build_metric_table, Belt, ClusterMap, Metric};
use crowdnet_core::{Dataset, SynthConfig};
use proptest::prelude::*;

fn synth(seed: u64, workers: usize, clusters: usize) -> (Dataset, ClusterMap) {
    let out = generate_synthetic(&SynthConfig::planted(workers, clusters, seed)).unwrap();
    (out.dataset, out.planted)
}

fn in_unit(v: Option<f64>) -> bool {
    v.is_none_or(|x| (0.0..=1.0).contains(&x))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn ratio_chain_and_ranges(seed in any::<u64>(), workers in 20usize..90, clusters in 1usize..4) {
        let (d, planted) = synth(seed, workers, clusters);
        let t = build_metric_table(&d, &planted).unwrap();
        for w in &t.workers {
            prop_assert!(w.wins <= w.valid_submissions && w.valid_submissions <= w.submissions && w.submissions <= w.registrations);
            if let (Some(rl), Some(tl), Some(sl)) = (w.reliability, w.trustworthiness, w.success) {
                prop_assert!(sl <= tl && tl <= rl);
            } else {
                prop_assert!(w.reliability.is_none() && w.trustworthiness.is_none() && w.success.is_none());
            }
            for v in [w.reliability, w.efficiency, w.contest, w.deceitfulness] {
                prop_assert!(in_unit(v));
            }
            prop_assert!(w.proficiency.values().all(|&v| in_unit(v)));
            if w.belt == Belt::Gray && w.registrations > 0 {
                prop_assert_eq!(w.contest, Some(0.0));
            }
        }
        for m in &Metric::ALL[..4] {
            for c in t.cells(*m) {
                prop_assert_eq!(c.mean.is_none(), c.count == 0);
                prop_assert!(in_unit(c.mean));
                prop_assert!(c.belt != Belt::Red);
            }
        }
        prop_assert!(t.elasticity.iter().all(|e| in_unit(e.value)));
    }

    #[test]
    fn table_is_invariant_under_relabeling(seed in any::<u64>()) {
        let (d, planted) = synth(seed, 40, 2);
        let rename = |id: &str| format!("x{}", id.chars().rev().collect::<String>());
        let mut r = d.clone();
        r.workers.iter_mut().for_each(|w| w.worker_id = rename(&w.worker_id));
        r.events.iter_mut().for_each(|e| e.worker_id = rename(&e.worker_id));
        let renamed: ClusterMap = planted.iter().map(|(k, &v)| (rename(k), v)).collect();

        let a = build_metric_table(&d, &planted).unwrap();
        let mut b = build_metric_table(&r, &renamed).unwrap();
        prop_assert_eq!(&a.belt_tables, &b.belt_tables);
        prop_assert_eq!(&a.elasticity, &b.elasticity);
        prop_assert_eq!(&a.strategy, &b.strategy);
        prop_assert_eq!(&a.mean_registrations, &b.mean_registrations);
        let by_id: BTreeMap<String, _> = b.workers.drain(..).map(|w| (w.worker_id.clone(), w)).collect();
        for w in &a.workers {
            let mut other = by_id[&rename(&w.worker_id)].clone();
            other.worker_id = w.worker_id.clone();
            prop_assert_eq!(w, &other);
        }
    }
}

#[test]
fn constant_cell_mean() {
    let (d, planted) = synth(4, 60, 2);
    let t = build_metric_table(&d, &planted).unwrap();
    for c in t.cells(Metric::Reliability).iter().filter(|c| c.count > 0) {
        let values: Vec<f64> = t
            .workers
            .iter()
            .filter(|w| w.cluster == c.cluster && w.belt == c.belt)
            .filter_map(|w| w.reliability)
            .collect();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        assert_eq!(values.len(), c.count);
        assert!((c.mean.unwrap() - mean).abs() < 1e-12);
    }
}
