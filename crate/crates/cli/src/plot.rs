//! Minimal SVG and text plots. They only read the numbers that also go into
//! the JSON artifacts.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 16.0;
const MARGIN_TOP: f64 = 36.0;
const MARGIN_BOTTOM: f64 = 48.0;
const COLORS: [&str; 3] = ["#4c72b0", "#dd8452", "#55a868"];

pub struct Series<'a> {
    pub name: &'a str,
    pub values: &'a [f64],
}

fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn header(out: &mut String, title: &str, x_label: &str, y_label: &str) {
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">
<rect width="100%" height="100%" fill="white"/>
<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>
<text x="{}" y="{}" text-anchor="middle">{}</text>
<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>
"#,
        WIDTH / 2.0,
        escape(title),
        MARGIN_LEFT + (WIDTH - MARGIN_LEFT - MARGIN_RIGHT) / 2.0,
        HEIGHT - 8.0,
        escape(x_label),
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label),
    );
}

fn y_axis(out: &mut String, lo: f64, hi: f64, label: impl Fn(f64) -> String) {
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    for k in 0..=4 {
        let v = lo + (hi - lo) * k as f64 / 4.0;
        let y = HEIGHT - MARGIN_BOTTOM - plot_h * k as f64 / 4.0;
        let _ = writeln!(
            out,
            r##"<line x1="{MARGIN_LEFT}" x2="{}" y1="{y:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"##,
            WIDTH - MARGIN_RIGHT,
            MARGIN_LEFT - 4.0,
            y + 4.0,
            label(v)
        );
    }
}

fn legend(out: &mut String, names: &[&str]) {
    for (i, name) in names.iter().enumerate() {
        let x = MARGIN_LEFT + 8.0 + 140.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{x}" y="{}" width="10" height="10" fill="{}"/><text x="{}" y="{}">{}</text>"#,
            MARGIN_TOP - 4.0,
            COLORS[i % COLORS.len()],
            x + 14.0,
            MARGIN_TOP + 5.0,
            escape(name)
        );
    }
}

/// Grouped bar chart, one group per label.
pub fn bar_chart_svg(title: &str, x_label: &str, labels: &[String], series: &[Series]) -> String {
    let mut out = String::new();
    header(&mut out, title, x_label, "probability");
    let top = series
        .iter()
        .flat_map(|s| s.values.iter().cloned())
        .fold(0.0, f64::max)
        .max(1e-12)
        * 1.1;
    y_axis(&mut out, 0.0, top, fmt_num);
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let n = labels.len().max(1);
    let group_w = plot_w / n as f64;
    let bar_w = group_w * 0.8 / series.len().max(1) as f64;
    let label_every = (n / 16).max(1);
    for (i, label) in labels.iter().enumerate() {
        let gx = MARGIN_LEFT + group_w * i as f64 + group_w * 0.1;
        for (k, s) in series.iter().enumerate() {
            let v = s.values.get(i).copied().unwrap_or(0.0);
            let h = plot_h * v / top;
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                gx + bar_w * k as f64,
                HEIGHT - MARGIN_BOTTOM - h,
                bar_w,
                h,
                COLORS[k % COLORS.len()]
            );
        }
        if i % label_every == 0 {
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{}" text-anchor="middle" font-size="10">{}</text>"#,
                gx + group_w * 0.4,
                HEIGHT - MARGIN_BOTTOM + 14.0,
                escape(label)
            );
        }
    }
    legend(&mut out, &series.iter().map(|s| s.name).collect::<Vec<_>>());
    out.push_str("</svg>\n");
    out
}

/// Line chart of `values` against their index on a log10 axis.
pub fn log_line_svg(title: &str, x_label: &str, y_label: &str, values: &[f64]) -> String {
    let mut out = String::new();
    header(&mut out, title, x_label, y_label);
    let logs: Vec<f64> = values
        .iter()
        .map(|v| v.max(1e-300).log10())
        .filter(|v| v.is_finite())
        .collect();
    let (mut lo, mut hi) = logs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    if hi - lo < 1e-9 {
        lo -= 0.5;
        hi += 0.5;
    }
    y_axis(&mut out, lo, hi, |v| fmt_num(10f64.powf(v)));
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let span = (logs.len().max(2) - 1) as f64;
    let points: Vec<String> = logs
        .iter()
        .enumerate()
        .map(|(i, v)| {
            format!(
                "{:.2},{:.2}",
                MARGIN_LEFT + plot_w * i as f64 / span,
                HEIGHT - MARGIN_BOTTOM - plot_h * (v - lo) / (hi - lo)
            )
        })
        .collect();
    let _ = writeln!(
        out,
        r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
        COLORS[0],
        points.join(" ")
    );
    let _ = writeln!(
        out,
        r#"<text x="{MARGIN_LEFT}" y="{}">1</text><text x="{}" y="{}" text-anchor="end">{}</text>"#,
        HEIGHT - MARGIN_BOTTOM + 14.0,
        WIDTH - MARGIN_RIGHT,
        HEIGHT - MARGIN_BOTTOM + 14.0,
        logs.len()
    );
    out.push_str("</svg>\n");
    out
}

/// Horizontal text bars, one row per label and series.
pub fn bar_chart_ascii(title: &str, labels: &[String], series: &[Series]) -> String {
    const BAR: usize = 50;
    let top = series
        .iter()
        .flat_map(|s| s.values.iter().cloned())
        .fold(0.0, f64::max)
        .max(1e-12);
    let label_w = labels.iter().map(|l| l.len()).max().unwrap_or(0);
    let marks = ['#', '*', '+'];
    let mut out = format!("{title}\n");
    for (k, s) in series.iter().enumerate() {
        let _ = writeln!(out, "  {} {}", marks[k % marks.len()], s.name);
    }
    for (i, label) in labels.iter().enumerate() {
        for (k, s) in series.iter().enumerate() {
            let v = s.values.get(i).copied().unwrap_or(0.0);
            let len = ((v / top) * BAR as f64).round() as usize;
            let shown = if k == 0 { label.as_str() } else { "" };
            let _ = writeln!(
                out,
                "{shown:>label_w$} |{:<BAR$}| {v:.4}",
                marks[k % marks.len()].to_string().repeat(len)
            );
        }
    }
    out
}

/// Text sparkline of a log-scaled trace, downsampled to at most 60 columns.
pub fn trace_ascii(title: &str, values: &[f64]) -> String {
    const COLS: usize = 60;
    const ROWS: usize = 10;
    let logs: Vec<f64> = values.iter().map(|v| v.max(1e-300).log10()).collect();
    if logs.is_empty() {
        return format!("{title}\n(empty)\n");
    }
    let cols = logs.len().min(COLS);
    let sampled: Vec<f64> = (0..cols)
        .map(|c| logs[c * (logs.len() - 1) / (cols - 1).max(1)])
        .collect();
    let lo = sampled.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = sampled.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = (hi - lo).max(1e-12);
    let mut out = format!("{title}\n");
    for r in (0..ROWS).rev() {
        let level = lo + span * r as f64 / (ROWS - 1) as f64;
        let row: String = sampled
            .iter()
            .map(|&v| {
                if v >= level - span / (2.0 * (ROWS - 1) as f64) {
                    '*'
                } else {
                    ' '
                }
            })
            .collect();
        let _ = writeln!(out, "{:>10} |{row}", fmt_num(10f64.powf(level)));
    }
    let _ = writeln!(out, "{:>10} +{}", "", "-".repeat(cols));
    let _ = writeln!(out, "{:>10}  evaluations 1..{}", "", logs.len());
    out
}
