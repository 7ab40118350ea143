use std::fmt::Write;

use super::{chart_files, LoadedRun, TestStatus};
use crate::centrality::ClusterNetworkStats;
use crate::metrics::{Belt, Metric};
use crate::stats::Summary;

/// Significance level used for report annotations only.
pub const ALPHA: f64 = 0.05;

fn num(v: f64) -> String {
    format!("{v:.4}")
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), num)
}

fn p_value(p: f64) -> String {
    if p != 0.0 && p < 1e-4 {
        format!("{p:.2e}")
    } else {
        format!("{p:.4}")
    }
}

fn mean_std(s: &Summary) -> String {
    format!("{} | {}", num(s.mean), num(s.std))
}

/// Markdown summary of a loaded run. Every number is read from an artifact.
pub fn emit_report(run: &LoadedRun) -> String {
    let mut s = String::new();
    let g = &run.graph;
    let p = &run.partition;
    let t = &run.metrics.table;

    let _ = writeln!(s, "# Worker network analysis\n");
    let _ = writeln!(s, "Dataset checksum: `{}`\n", g.input_hash);

    let _ = writeln!(s, "## Network\n");
    let _ = writeln!(s, "| Quantity | Value |\n|---|---|");
    let _ = writeln!(s, "| Workers in dataset | {} |", g.activity.total_workers);
    let _ = writeln!(s, "| Active workers | {} |", g.activity.active_workers);
    let _ = writeln!(s, "| Active ratio | {} |", opt(g.active_ratio));
    if let Some(w) = &g.activity.window {
        let _ = writeln!(s, "| Activity window | {} to {} |", w.first, w.last);
    }
    let _ = writeln!(s, "| Tasks with registrations | {} |", g.tasks);
    let _ = writeln!(s, "| Registrations | {} |", g.registrations);
    let _ = writeln!(s, "| Duplicate registrations dropped | {} |", g.duplicate_registrations);
    let _ = writeln!(s, "| Minimum edge weight | {} |", g.min_weight);
    let _ = writeln!(s, "| Nodes | {} |", g.node_count);
    let _ = writeln!(s, "| Edges | {} |", g.edge_count);
    let _ = writeln!(s, "| Total edge weight | {} |\n", g.total_weight);

    let _ = writeln!(s, "## Clusters\n");
    let weighting = match p.weighting {
        crate::community::EdgeWeighting::Unweighted => "unweighted",
        crate::community::EdgeWeighting::Weighted => "weighted",
    };
    let _ = writeln!(
        s,
        "Greedy modularity clustering ({weighting}) found {} cluster(s), modularity {}.\n",
        p.cluster_count,
        num(p.modularity)
    );
    let _ = writeln!(
        s,
        "| Cluster | Workers | #CN mean | #CN std | WR mean | WR std | CC mean | CC std | BC mean | BC std |"
    );
    let _ = writeln!(s, "|---|---|---|---|---|---|---|---|---|---|");
    for ClusterNetworkStats { cluster, size, common_neighbors, worker_rank, closeness, betweenness } in
        &run.network.clusters
    {
        let _ = writeln!(
            s,
            "| {cluster} | {size} | {} | {} | {} | {} |",
            mean_std(common_neighbors),
            mean_std(worker_rank),
            mean_std(closeness),
            mean_std(betweenness)
        );
    }
    let scope = match run.network.cn_scope {
        crate::centrality::CnScope::Cluster => "same-cluster peers",
        crate::centrality::CnScope::Global => "all other workers",
    };
    let _ = writeln!(s, "\n#CN is averaged over {scope}. WR: {}.\n", run.network.worker_rank_method);

    let _ = writeln!(s, "## Per-belt metrics\n");
    let _ =
        writeln!(s, "Cells are means over workers with a defined value (n in parentheses); n/a marks an empty cell.\n");
    for (m, file) in chart_files() {
        let _ = writeln!(s, "### {} ({})\n", m.name(), m.code());
        let _ = write!(s, "| Cluster |");
        for b in Belt::REPORTED {
            let _ = write!(s, " {b} |");
        }
        let _ = writeln!(s, "\n|---|---|---|---|---|");
        for c in 0..t.cluster_count {
            let _ = write!(s, "| {c} |");
            for b in Belt::REPORTED {
                match t.cell(m, c, b) {
                    Some(cell) => {
                        let _ = write!(s, " {} ({}) |", opt(cell.mean), cell.count);
                    }
                    None => s.push_str(" n/a |"),
                }
            }
            s.push('\n');
        }
        let _ = writeln!(s, "\n![{}]({file})\n", m.name());
    }

    let _ = writeln!(s, "## Elasticity\n");
    let _ = writeln!(s, "| Cluster | EL | Projects |\n|---|---|---|");
    for e in &t.elasticity {
        let _ = writeln!(s, "| {} | {} | {} |", e.cluster, opt(e.value), e.projects.len());
    }
    s.push('\n');

    let _ = writeln!(s, "## Strategy (Blue and Yellow workers)\n");
    let _ = writeln!(s, "| Cluster | Workers | R | CL | CT | DL | R (all belts) |\n|---|---|---|---|---|---|---|");
    for row in &t.strategy {
        let all = t.mean_registrations.get(row.cluster).copied().flatten();
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {} | {} | {} |",
            row.cluster,
            row.workers,
            opt(row.registrations),
            opt(row.confidence),
            opt(row.contest),
            opt(row.deceitfulness),
            opt(all)
        );
    }
    s.push('\n');

    let a = &run.anova;
    let _ = writeln!(s, "## Cross-cluster differences\n");
    let _ = writeln!(s, "{}; observation unit: {}. Elasticity uses per-project ratios.\n", a.design, a.unit);
    let _ = writeln!(s, "| Metric | Groups | F | df | p | Result |\n|---|---|---|---|---|---|");
    for test in &a.tests {
        let name = Metric::ALL.iter().find(|m| m.code() == test.metric).map_or(test.metric.as_str(), |m| m.name());
        match (test.status, test.p_value) {
            (TestStatus::Tested, Some(pv)) => {
                let f = test.f_statistic.map_or_else(|| "inf".to_string(), num);
                let df = format!("({}, {})", test.df_between.unwrap_or(0), test.df_within.unwrap_or(0));
                let verdict = if pv < ALPHA { "significant at 0.05" } else { "not significant at 0.05" };
                let flag = if test.degenerate { " (zero within-group variance)" } else { "" };
                let _ = writeln!(
                    s,
                    "| {name} ({}) | {} | {f} | {df} | {} | {verdict}{flag} |",
                    test.metric,
                    test.clusters.len(),
                    p_value(pv)
                );
            }
            _ => {
                let why = test.reason.as_deref().unwrap_or("not tested");
                let _ = writeln!(
                    s,
                    "| {name} ({}) | {} | n/a | n/a | n/a | skipped: {why} |",
                    test.metric,
                    test.clusters.len()
                );
            }
        }
    }
    s
}
