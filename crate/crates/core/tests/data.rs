use std::collections::BTreeSet;
use std::fs::File;
use std::path::PathBuf;

use crowdnet_core::data::{
    derive_worker_expertise, generate_synthetic, load_dataset, parse_dataset, serialize_dataset, DEFAULT_BELT_MIX,
};
use crowdnet_core::metrics::assign_belt;
use crowdnet_core::{SynthConfig, TaskStatus};
use proptest::prelude::*;

fn fixture(name: &str) -> File {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fixtures", "f1", name].iter().collect();
    File::open(p).unwrap()
}

#[test]
fn f1_files_parse() {
    let (d, report) =
        parse_dataset(fixture("tasks.csv"), fixture("registrations.csv"), fixture("workers.csv")).unwrap();
    assert_eq!((d.workers.len(), d.tasks.len(), d.events.len()), (4, 3, 7));
    assert_eq!(report.duplicate_registrations, 0);
    assert_eq!(d.starved_tasks(), BTreeSet::from(["t2"]));
    let ex = derive_worker_expertise(&d);
    assert_eq!(ex["w1"], BTreeSet::from(["java".to_string()]));
    assert_eq!(d.tasks[0].status, TaskStatus::Completed);
    assert_eq!(load_dataset(&serialize_dataset(&d)).unwrap(), d);
}

fn small_config() -> impl Strategy<Value = SynthConfig> {
    (20usize..80, 1usize..4, any::<u64>(), 0usize..10).prop_map(|(workers, clusters, seed, inactive)| {
        let mut cfg = SynthConfig::planted(workers, clusters, seed);
        cfg.inactive_workers = inactive;
        cfg
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn canonical_round_trip(cfg in small_config()) {
        let d = generate_synthetic(&cfg).unwrap().dataset;
        let text = serialize_dataset(&d);
        let back = load_dataset(&text).unwrap();
        prop_assert_eq!(&back, &d);
        prop_assert_eq!(serialize_dataset(&back), text);
    }

    #[test]
    fn generated_flags_and_starvation_are_consistent(cfg in small_config()) {
        let d = generate_synthetic(&cfg).unwrap().dataset;
        for e in &d.events {
            prop_assert!(e.flags_consistent());
        }
        let starved = d.starved_tasks();
        for t in &d.tasks {
            let events: Vec<_> = d.events.iter().filter(|e| e.task_id == t.task_id).collect();
            let winners = events.iter().filter(|e| e.won).count();
            prop_assert_eq!(starved.contains(t.task_id.as_str()), !events.iter().any(|e| e.submitted));
            prop_assert_eq!(winners, usize::from(t.status == TaskStatus::Completed));
            if starved.contains(t.task_id.as_str()) {
                prop_assert_eq!(t.status, TaskStatus::Failed);
            }
            if events.iter().any(|e| e.valid) {
                prop_assert_eq!(winners, 1);
            }
        }
    }
}

#[test]
fn belt_mix_converges() {
    let cfg = SynthConfig { task_count: 200, project_count: 10, ..SynthConfig::planted(10_000, 1, 99) };
    let d = generate_synthetic(&cfg).unwrap().dataset;
    let mut counts = [0usize; 5];
    for w in &d.workers {
        counts[assign_belt(w.rating).unwrap().index()] += 1;
    }
    let n = d.workers.len() as f64;
    let chi2: f64 = counts.iter().zip(DEFAULT_BELT_MIX).map(|(&o, p)| (o as f64 - n * p).powi(2) / (n * p)).sum();
    // 4 degrees of freedom; the 0.999 quantile is 18.47.
    assert!(chi2 < 18.47, "chi-square {chi2}, counts {counts:?}");
}
