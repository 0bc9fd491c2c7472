//! CSV tables and SVG figures of a benchmark run.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::runner::{combined_score, MetricsRow, ScatterData, MODEL_NAMES};
use crate::error::{domain, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub scenario: String,
    pub model: String,
    pub runs: usize,
    pub failed: usize,
    pub mse_mean: f64,
    pub mse_std: f64,
    pub d_k_mean: f64,
    pub d_k_std: f64,
    pub mse_ratio_mean: f64,
    pub mse_ratio_std: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint {
    pub lambda: f64,
    pub model: String,
    pub score: f64,
}

/// Mean and sample standard deviation; NaN when empty, 0 spread for one value.
fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Per-model statistics over the successful seeds, in the order models
/// first appear.
pub fn summarize(rows: &[MetricsRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(&str, &str)> = Vec::new();
    for r in rows {
        if !keys.contains(&(r.scenario.as_str(), r.model.as_str())) {
            keys.push((&r.scenario, &r.model));
        }
    }
    keys.into_iter()
        .map(|(scenario, model)| {
            let group: Vec<&MetricsRow> = rows.iter().filter(|r| r.scenario == scenario && r.model == model).collect();
            let ok: Vec<&&MetricsRow> = group.iter().filter(|r| !r.failed()).collect();
            let col = |f: fn(&MetricsRow) -> f64| {
                mean_std(&ok.iter().map(|r| f(r)).filter(|v| v.is_finite()).collect::<Vec<_>>())
            };
            let (mse_mean, mse_std) = col(|r| r.mse);
            let (d_k_mean, d_k_std) = col(|r| r.d_k);
            let (mse_ratio_mean, mse_ratio_std) = col(|r| r.mse_ratio);
            SummaryRow {
                scenario: scenario.into(),
                model: model.into(),
                runs: group.len(),
                failed: group.len() - ok.len(),
                mse_mean,
                mse_std,
                d_k_mean,
                d_k_std,
                mse_ratio_mean,
                mse_ratio_std,
            }
        })
        .collect()
}

/// Combined score of each model's mean metrics at every `λ`.
pub fn frontier(summary: &[SummaryRow], lambdas: &[f64]) -> Result<Vec<FrontierPoint>> {
    let mut out = Vec::with_capacity(lambdas.len() * summary.len());
    for &lambda in lambdas {
        for s in summary {
            out.push(FrontierPoint {
                lambda,
                model: s.model.clone(),
                score: combined_score(s.mse_mean, s.d_k_mean, lambda)?,
            });
        }
    }
    Ok(out)
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_metrics(path: impl AsRef<Path>, rows: &[MetricsRow]) -> Result<()> {
    write_csv(path.as_ref(), rows)
}

pub fn read_metrics(path: impl AsRef<Path>) -> Result<Vec<MetricsRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let rows = r.deserialize().collect::<std::result::Result<Vec<MetricsRow>, _>>()?;
    Ok(rows)
}

/// Write metrics.csv, summary.csv, frontier.csv, frontier.svg and, when
/// given, scatter.svg into `dir`. Returns the written paths.
pub fn emit_outputs(
    rows: &[MetricsRow],
    scatter: Option<&ScatterData>,
    lambdas: &[f64],
    dir: impl AsRef<Path>,
) -> Result<Vec<PathBuf>> {
    if rows.is_empty() {
        return Err(domain("no metrics to write"));
    }
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let summary = summarize(rows);
    let points = frontier(&summary, lambdas)?;
    let mut written = Vec::new();
    let mut emit = |name: &str, f: &dyn Fn(&Path) -> Result<()>| -> Result<()> {
        let p = dir.join(name);
        f(&p)?;
        written.push(p);
        Ok(())
    };
    emit("metrics.csv", &|p| write_metrics(p, rows))?;
    emit("summary.csv", &|p| write_csv(p, &summary))?;
    emit("frontier.csv", &|p| write_csv(p, &points))?;
    emit("frontier.svg", &|p| Ok(std::fs::write(p, frontier_svg(&points))?))?;
    if let Some(s) = scatter {
        emit("scatter.svg", &|p| Ok(std::fs::write(p, scatter_svg(s))?))?;
    }
    Ok(written)
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;

fn color(model: &str) -> &'static str {
    match MODEL_NAMES.iter().position(|m| *m == model) {
        Some(0) => "#d62728",
        Some(1) => "#1f77b4",
        Some(2) => "#2ca02c",
        _ => "#7f7f7f",
    }
}

/// Linear map from `[lo, hi]` onto `[a, b]`.
fn scale(v: f64, lo: f64, hi: f64, a: f64, b: f64) -> f64 {
    if hi > lo {
        a + (v - lo) / (hi - lo) * (b - a)
    } else {
        (a + b) / 2.0
    }
}

fn svg_open(s: &mut String, title: &str) {
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{title}</text>"#, WIDTH / 2.0);
}

fn axes(s: &mut String, x_label: &str, y_label: &str, x: (f64, f64), y: (f64, f64)) {
    let (x0, x1, y0, y1) = (MARGIN, WIDTH - MARGIN, HEIGHT - MARGIN, MARGIN);
    let _ = writeln!(s, r#"<path d="M{x0},{y1} V{y0} H{x1}" fill="none" stroke="black"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{x_label}</text>"#, (x0 + x1) / 2.0, HEIGHT - 16.0);
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{y_label}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );
    let _ = writeln!(s, r#"<text x="{x0}" y="{}" text-anchor="middle">{:.3}</text>"#, y0 + 16.0, x.0);
    let _ = writeln!(s, r#"<text x="{x1}" y="{}" text-anchor="middle">{:.3}</text>"#, y0 + 16.0, x.1);
    let _ = writeln!(s, r#"<text x="{}" y="{y0}" text-anchor="end">{:.3}</text>"#, x0 - 4.0, y.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{:.3}</text>"#, x0 - 4.0, y1 + 4.0, y.1);
}

fn legend(s: &mut String, entries: &[(&str, &str)]) {
    for (i, (label, fill)) in entries.iter().enumerate() {
        let y = MARGIN + 14.0 * i as f64;
        let x = WIDTH - MARGIN - 110.0;
        let _ = writeln!(s, r#"<rect x="{x}" y="{}" width="10" height="10" fill="{fill}"/>"#, y - 9.0);
        let _ = writeln!(s, r#"<text x="{}" y="{y}">{label}</text>"#, x + 14.0);
    }
}

/// Combined score against `λ`, one line per model.
pub fn frontier_svg(points: &[FrontierPoint]) -> String {
    let mut models: Vec<&str> = Vec::new();
    for p in points {
        if !models.contains(&p.model.as_str()) {
            models.push(&p.model);
        }
    }
    let finite = points.iter().map(|p| p.score).filter(|v| v.is_finite());
    let y_hi = finite.fold(0.0f64, f64::max);
    let mut s = String::new();
    svg_open(&mut s, "combined score λ·MSE + (1−λ)·d_K");
    axes(&mut s, "λ", "score", (0.0, 1.0), (0.0, y_hi));
    for model in &models {
        let path: Vec<String> = points
            .iter()
            .filter(|p| p.model == *model && p.score.is_finite())
            .map(|p| {
                format!(
                    "{:.2},{:.2}",
                    scale(p.lambda, 0.0, 1.0, MARGIN, WIDTH - MARGIN),
                    scale(p.score, 0.0, y_hi, HEIGHT - MARGIN, MARGIN)
                )
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="2"/>"#,
            path.join(" "),
            color(model)
        );
    }
    let entries: Vec<(&str, &str)> = models.iter().map(|m| (*m, color(m))).collect();
    legend(&mut s, &entries);
    s.push_str("</svg>\n");
    s
}

/// Particles, clean test targets and predictions in the plane.
pub fn scatter_svg(data: &ScatterData) -> String {
    let layers: [(&str, &str, &[Vec<f64>], f64); 4] = [
        ("particles", "#bbbbbb", &data.particles, 2.0),
        ("targets", "#000000", &data.targets, 2.5),
        ("mlp", color(MODEL_NAMES[0]), &data.mlp, 2.5),
        ("p-transformer", color(MODEL_NAMES[2]), &data.p_transformer, 2.5),
    ];
    let all = layers.iter().flat_map(|l| l.2.iter()).filter(|p| p.len() >= 2 && p[0].is_finite() && p[1].is_finite());
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in all {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    if !lo[0].is_finite() {
        lo = [-1.0; 2];
        hi = [1.0; 2];
    }
    let mut s = String::new();
    svg_open(&mut s, "test targets and predictions");
    axes(&mut s, "y₁", "y₂", (lo[0], hi[0]), (lo[1], hi[1]));
    for (_, fill, pts, r) in &layers {
        for p in pts.iter().filter(|p| p.len() >= 2 && p[0].is_finite() && p[1].is_finite()) {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="{r}" fill="{fill}"/>"#,
                scale(p[0], lo[0], hi[0], MARGIN, WIDTH - MARGIN),
                scale(p[1], lo[1], hi[1], HEIGHT - MARGIN, MARGIN)
            );
        }
    }
    let entries: Vec<(&str, &str)> = layers.iter().map(|l| (l.0, l.1)).collect();
    legend(&mut s, &entries);
    s.push_str("</svg>\n");
    s
}
