//! Result files: per-trial CSV, configuration hashes and static SVG charts.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::experiments::{SeparationReport, SlopeReport};
use super::HarnessError;
use crate::detect::Status;

/// One line of the results table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultRow {
    pub config_hash: String,
    pub generator: String,
    pub detector: String,
    pub n: usize,
    pub s: usize,
    pub trial: usize,
    pub seed: u64,
    pub status: Status,
    pub queries: u64,
}

/// Hex SHA-256 of the value's JSON form. Struct fields serialize in
/// declaration order and maps are ordered, so equal values hash equally.
pub fn config_hash<T: Serialize + ?Sized>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("configurations are plain data");
    Sha256::digest(&bytes)
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

pub fn write_results_csv(path: &Path, rows: &[ResultRow]) -> Result<(), HarnessError> {
    let io = |e: csv::Error| HarnessError::Io(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    for r in rows {
        w.serialize(r).map_err(io)?;
    }
    w.flush()
        .map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))
}

pub fn read_results_csv(path: &Path) -> Result<Vec<ResultRow>, HarnessError> {
    let io = |e: csv::Error| HarnessError::Io(format!("{}: {e}", path.display()));
    let mut r = csv::Reader::from_path(path).map_err(io)?;
    r.deserialize().map(|row| row.map_err(io)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// A plain line chart. Every data point is emitted as a `<circle>` carrying
/// its exact coordinates in `data-x` / `data-y`, so the chart can be read
/// back and compared against the tables.
#[derive(Debug, Clone, PartialEq)]
pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
}

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD: f64 = 60.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

impl LineChart {
    pub fn render(&self) -> String {
        let tx = |v: f64| if self.log_x { v.log2() } else { v };
        let ty = |v: f64| if self.log_y { v.log2() } else { v };
        let pts = self.series.iter().flat_map(|s| s.points.iter());
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in pts {
            x0 = x0.min(tx(x));
            x1 = x1.max(tx(x));
            y0 = y0.min(ty(y));
            y1 = y1.max(ty(y));
        }
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        if x1 - x0 < 1e-12 {
            x1 = x0 + 1.0;
        }
        if y1 - y0 < 1e-12 {
            y1 = y0 + 1.0;
        }
        let px = |x: f64| PAD + (tx(x) - x0) / (x1 - x0) * (W - 2.0 * PAD);
        let py = |y: f64| H - PAD - (ty(y) - y0) / (y1 - y0) * (H - 2.0 * PAD);

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            W / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            out,
            r#"<line x1="{PAD}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/><line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{b}" stroke="black"/>"#,
            b = H - PAD,
            r = W - PAD
        );
        let scale = |log: bool| if log { " (log scale)" } else { "" };
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">{}{}</text>"#,
            W / 2.0,
            H - 18.0,
            escape(&self.x_label),
            scale(self.log_x)
        );
        let _ = writeln!(
            out,
            r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}{}</text>"#,
            H / 2.0,
            H / 2.0,
            escape(&self.y_label),
            scale(self.log_y)
        );
        for (lo, hi, anchor_x, anchor_y) in [(x0, x1, true, false), (y0, y1, false, true)] {
            let fmt = |v: f64, log: bool| if log { format!("{:.4}", v.exp2()) } else { format!("{v:.4}") };
            if anchor_x {
                let _ = writeln!(out, r#"<text x="{PAD}" y="{}" text-anchor="start">{}</text>"#, H - PAD + 16.0, fmt(lo, self.log_x));
                let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, W - PAD, H - PAD + 16.0, fmt(hi, self.log_x));
            }
            if anchor_y {
                let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, PAD - 4.0, H - PAD, fmt(lo, self.log_y));
                let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, PAD - 4.0, PAD + 4.0, fmt(hi, self.log_y));
            }
        }
        for (k, s) in self.series.iter().enumerate() {
            let color = COLORS[k % COLORS.len()];
            let path: Vec<String> = s
                .points
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            let _ = writeln!(
                out,
                r#"<g class="series" data-name="{}"><polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
                escape(&s.name),
                path.join(" ")
            );
            for &(x, y) in &s.points {
                let _ = writeln!(
                    out,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="{color}" data-x="{x}" data-y="{y}"/>"#,
                    px(x),
                    py(y)
                );
            }
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" fill="{color}">{}</text></g>"#,
                W - PAD - 150.0,
                PAD + 16.0 * k as f64,
                escape(&s.name)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

/// Reads `(series name, data points)` back out of a rendered chart.
pub fn parse_chart_points(svg: &str) -> Vec<(String, Vec<(f64, f64)>)> {
    let attr = |line: &str, key: &str| -> Option<String> {
        let start = line.find(&format!("{key}=\""))? + key.len() + 2;
        let end = line[start..].find('"')? + start;
        Some(line[start..end].to_string())
    };
    let mut out: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for line in svg.lines() {
        if line.starts_with("<g class=\"series\"") {
            let name = attr(line, "data-name").unwrap_or_default();
            out.push((name.replace("&lt;", "<").replace("&gt;", ">").replace("&quot;", "\"").replace("&amp;", "&"), Vec::new()));
        } else if line.starts_with("<circle") {
            let x = attr(line, "data-x").and_then(|v| v.parse().ok());
            let y = attr(line, "data-y").and_then(|v| v.parse().ok());
            if let (Some(x), Some(y), Some(last)) = (x, y, out.last_mut()) {
                last.1.push((x, y));
            }
        }
    }
    out
}

/// Ratio against the number of scales.
pub fn separation_chart(rep: &SeparationReport) -> String {
    LineChart {
        title: format!("Separation at n = {}", rep.n),
        x_label: "scales s".into(),
        y_label: "mean(multiscale) / mean(cert)".into(),
        log_x: false,
        log_y: false,
        series: vec![Series {
            name: "ratio".into(),
            points: rep.rows.iter().map(|r| (r.s as f64, r.ratio)).collect(),
        }],
    }
    .render()
}

/// Log-log cost curves, one per detector.
pub fn slope_chart(rep: &SlopeReport) -> String {
    let series = rep
        .series
        .iter()
        .map(|s| Series {
            name: s.detector.clone(),
            points: rep
                .rows
                .iter()
                .filter(|r| r.detector == s.detector)
                .filter_map(|r| r.mean.map(|m| (r.n as f64, m)))
                .collect(),
        })
        .collect();
    LineChart {
        title: "Mean queries against n".into(),
        x_label: "n".into(),
        y_label: "mean queries".into(),
        log_x: true,
        log_y: true,
        series,
    }
    .render()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = config_hash(&serde_json::json!({"n": 4, "seed": 1}));
        assert_eq!(a.len(), 64);
        assert_eq!(a, config_hash(&serde_json::json!({"seed": 1, "n": 4})));
        assert_ne!(a, config_hash(&serde_json::json!({"n": 4, "seed": 2})));
        // sha256 of the empty JSON object "{}"
        assert_eq!(
            config_hash(&serde_json::json!({})),
            "44136fa355b3678a1146ad16f7e8649e94fb4fc21fe77e8310c060f61caaff8a"
        );
    }

    #[test]
    fn chart_points_parse_back() {
        let chart = LineChart {
            title: "t <1>".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            log_x: true,
            log_y: true,
            series: vec![
                Series {
                    name: "a&b".into(),
                    points: vec![(4096.0, 12.5), (16384.0, 1.0 / 3.0)],
                },
                Series {
                    name: "c".into(),
                    points: vec![(1.0, 2.0)],
                },
            ],
        };
        let back = parse_chart_points(&chart.render());
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].0, "a&b");
        assert_eq!(back[0].1, chart.series[0].points);
        assert_eq!(back[1].1, vec![(1.0, 2.0)]);
    }

    #[test]
    fn csv_round_trip() {
        let dir = std::env::temp_dir().join(format!("qsep-csv-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("r.csv");
        let rows = vec![ResultRow {
            config_hash: "ab".into(),
            generator: "collision-fn".into(),
            detector: "cert-collision".into(),
            n: 64,
            s: 2,
            trial: 0,
            seed: u64::MAX,
            status: Status::BudgetExceeded,
            queries: 9,
        }];
        write_results_csv(&path, &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("config_hash,generator,detector,n,s,trial,seed,status,queries\n"));
        assert!(text.contains("budget-exceeded"));
        assert_eq!(read_results_csv(&path).unwrap(), rows);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
