use std::fmt::Write;

use crate::metrics::{Belt, BeltCell};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 360.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 16.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 72.0;
const TICKS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

pub struct ChartSpec {
    pub title: String,
    pub y_label: String,
    pub cluster_count: usize,
}

fn colour(b: Belt) -> &'static str {
    match b {
        Belt::Gray => "#9e9e9e",
        Belt::Green => "#43a047",
        Belt::Blue => "#1e88e5",
        Belt::Yellow => "#fdd835",
        Belt::Red => "#e53935",
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Grouped bar chart of a per-belt table: one group per cluster, one bar per
/// reported belt, y axis fixed to `[0, 1]`. Absent cells leave a gap.
pub fn render_bar_chart(spec: &ChartSpec, cells: &[BeltCell]) -> String {
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let base = TOP + plot_h;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(&spec.title)
    );

    for t in TICKS {
        let y = base - t * plot_h;
        let _ =
            writeln!(s, r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e0e0e0"/>"##, LEFT + plot_w);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{t:.2}</text>"#, LEFT - 6.0, y + 4.0);
    }
    let _ = writeln!(s, r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{base:.2}" stroke="black"/>"#);
    let _ =
        writeln!(s, r#"<line x1="{LEFT}" y1="{base:.2}" x2="{:.2}" y2="{base:.2}" stroke="black"/>"#, LEFT + plot_w);
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(&spec.y_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">Cluster</text>"#,
        LEFT + plot_w / 2.0,
        base + 40.0
    );

    let any_value = cells.iter().any(|c| c.mean.is_some());
    if spec.cluster_count == 0 || !any_value {
        let _ = writeln!(
            s,
            r##"<text x="{:.2}" y="{:.2}" text-anchor="middle" fill="#757575">no data</text>"##,
            LEFT + plot_w / 2.0,
            TOP + plot_h / 2.0
        );
    } else {
        let belts = Belt::REPORTED;
        let group_w = plot_w / spec.cluster_count as f64;
        let bar_w = group_w * 0.8 / belts.len() as f64;
        for c in 0..spec.cluster_count {
            let x0 = LEFT + c as f64 * group_w + group_w * 0.1;
            for (k, &b) in belts.iter().enumerate() {
                let cell = cells.iter().find(|x| x.cluster == c && x.belt == b);
                let Some(v) = cell.and_then(|x| x.mean) else { continue };
                let h = v.clamp(0.0, 1.0) * plot_h;
                let _ = writeln!(
                    s,
                    r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}" stroke="black" stroke-width="0.5"><title>cluster {c}, {b}: {v:.4}</title></rect>"#,
                    x0 + k as f64 * bar_w,
                    base - h,
                    bar_w,
                    h,
                    colour(b)
                );
            }
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{c}</text>"#,
                LEFT + (c as f64 + 0.5) * group_w,
                base + 18.0
            );
        }
    }

    for (k, b) in Belt::REPORTED.iter().enumerate() {
        let x = LEFT + k as f64 * 96.0;
        let y = HEIGHT - 18.0;
        let _ = writeln!(s, r#"<rect x="{x:.2}" y="{:.2}" width="12" height="12" fill="{}"/>"#, y - 10.0, colour(*b));
        let _ = writeln!(s, r#"<text x="{:.2}" y="{y:.2}">{b}</text>"#, x + 16.0);
    }
    s.push_str("</svg>\n");
    s
}
