//! Report emission: CSV table, JSON curves, and an SVG with two stacked
//! charts (best cost on top, success rate below).

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::stats::{ConvergenceCurve, SummaryStats};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Svg,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "svg" => Ok(ReportFormat::Svg),
            other => Err(Error::Data(format!("unknown report format {other:?}"))),
        }
    }
}

pub const CSV_HEADER: &str = "method,arity,checkpoint,mean_cost,cost_lo,cost_hi,success,succ_lo,succ_hi,mean_cost_solved";

pub fn render_csv(curves: &[ConvergenceCurve]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for c in curves {
        for (i, t) in c.grid.iter().enumerate() {
            let (cost, succ) = (&c.best_cost[i], &c.success_rate[i]);
            let solved = c.mean_cost_solved[i].map(|v| v.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                c.method, c.arity, t, cost.mean, cost.ci_low, cost.ci_high, succ.mean, succ.ci_low, succ.ci_high, solved
            );
        }
    }
    out
}

pub fn render_json(curves: &[ConvergenceCurve]) -> Result<String> {
    Ok(serde_json::to_string_pretty(curves)? + "\n")
}

const WIDTH: f64 = 640.0;
const CHART_HEIGHT: f64 = 240.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 120.0;
const MARGIN_TOP: f64 = 28.0;
const MARGIN_BOTTOM: f64 = 36.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

struct Chart {
    top: f64,
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
    log_x: bool,
}

impl Chart {
    fn x(&self, t: f64) -> f64 {
        let frac = if self.log_x {
            (t.max(self.x_lo).ln() - self.x_lo.ln()) / (self.x_hi.ln() - self.x_lo.ln())
        } else {
            (t - self.x_lo) / (self.x_hi - self.x_lo)
        };
        let frac = if frac.is_finite() { frac } else { 0.0 };
        MARGIN_LEFT + frac * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn y(&self, v: f64) -> f64 {
        let span = self.y_hi - self.y_lo;
        let frac = if span > 0.0 { (v - self.y_lo) / span } else { 0.5 };
        let inner = CHART_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        self.top + MARGIN_TOP + (1.0 - frac) * inner
    }

    fn frame(&self, out: &mut String, title: &str, x_label: &str) {
        let (x0, x1) = (MARGIN_LEFT, WIDTH - MARGIN_RIGHT);
        let (y0, y1) = (self.top + MARGIN_TOP, self.top + CHART_HEIGHT - MARGIN_BOTTOM);
        let _ = writeln!(out, r##"<rect x="{x0:.1}" y="{y0:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="#444"/>"##, x1 - x0, y1 - y0);
        let _ = writeln!(out, r#"<text x="{x0:.1}" y="{:.1}" font-size="13">{}</text>"#, y0 - 8.0, escape(title));
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">{}</text>"#, (x0 + x1) / 2.0, y1 + 28.0, escape(x_label));
        for (v, anchor) in [(self.y_lo, y1), (self.y_hi, y0)] {
            let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="end">{}</text>"#, x0 - 4.0, anchor + 4.0, fmt_tick(v));
        }
        for (v, anchor) in [(self.x_lo, x0), (self.x_hi, x1)] {
            let _ = writeln!(out, r#"<text x="{anchor:.1}" y="{:.1}" font-size="10" text-anchor="middle">{}</text>"#, y1 + 14.0, fmt_tick(v));
        }
    }

    fn series(&self, out: &mut String, grid: &[f64], stats: &[SummaryStats], color: &str, label: &str) {
        let upper = grid.iter().zip(stats).map(|(t, s)| format!("{:.2},{:.2}", self.x(*t), self.y(s.ci_high)));
        let lower = grid.iter().zip(stats).rev().map(|(t, s)| format!("{:.2},{:.2}", self.x(*t), self.y(s.ci_low)));
        let band: Vec<String> = upper.chain(lower).collect();
        let _ = writeln!(out, r#"<polygon points="{}" fill="{color}" fill-opacity="0.18" stroke="none"/>"#, band.join(" "));
        let line: Vec<String> = grid.iter().zip(stats).map(|(t, s)| format!("{:.2},{:.2}", self.x(*t), self.y(s.mean))).collect();
        let _ = writeln!(
            out,
            r#"<polyline data-series="{}" points="{}" fill="none" stroke="{color}" stroke-width="1.6"/>"#,
            escape(label),
            line.join(" ")
        );
    }
}

fn fmt_tick(v: f64) -> String {
    if v.abs() >= 100.0 || v == v.trunc() {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

fn curve_label(c: &ConvergenceCurve, multi_arity: bool) -> String {
    if multi_arity {
        format!("{} ({})", c.method, c.arity)
    } else {
        c.method.to_string()
    }
}

/// Two stacked charts sharing the budget axis (log scale when it starts
/// above zero). One CI band polygon and one polyline per curve per chart.
pub fn render_svg(curves: &[ConvergenceCurve], x_label: &str) -> String {
    let grid_lo = curves.iter().flat_map(|c| c.grid.first().copied()).fold(f64::INFINITY, f64::min);
    let grid_hi = curves.iter().flat_map(|c| c.grid.last().copied()).fold(f64::NEG_INFINITY, f64::max);
    let (x_lo, x_hi) = if grid_lo.is_finite() { (grid_lo, grid_hi) } else { (0.0, 1.0) };
    let log_x = x_lo > 0.0 && x_hi > x_lo;
    let (mut c_lo, mut c_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in curves.iter().flat_map(|c| &c.best_cost) {
        c_lo = c_lo.min(s.ci_low);
        c_hi = c_hi.max(s.ci_high);
    }
    if !c_lo.is_finite() {
        (c_lo, c_hi) = (0.0, 1.0);
    }
    let cost = Chart {
        top: 0.0,
        x_lo,
        x_hi,
        y_lo: c_lo.min(0.0),
        y_hi: c_hi,
        log_x,
    };
    let success = Chart {
        top: CHART_HEIGHT,
        y_lo: 0.0,
        y_hi: 1.0,
        ..cost
    };
    let height = 2.0 * CHART_HEIGHT;
    let multi_arity = curves.iter().any(|c| c.arity != curves[0].arity);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{height}" fill="white"/>"#);
    for (chart, title) in [(&cost, "best found cost"), (&success, "success rate")] {
        let _ = writeln!(out, r#"<g class="chart" data-chart="{title}">"#);
        chart.frame(&mut out, title, x_label);
        for (i, c) in curves.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let stats = if chart.top == 0.0 { &c.best_cost } else { &c.success_rate };
            chart.series(&mut out, &c.grid, stats, color, &curve_label(c, multi_arity));
        }
        out.push_str("</g>\n");
    }
    // Legend to the right of the top chart.
    for (i, c) in curves.iter().enumerate() {
        let y = MARGIN_TOP + 14.0 + 18.0 * i as f64;
        let x = WIDTH - MARGIN_RIGHT + 12.0;
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(out, r#"<line x1="{x:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{color}" stroke-width="3"/>"#, x + 18.0);
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" font-size="11">{}</text>"#, x + 24.0, y + 4.0, escape(&curve_label(c, multi_arity)));
    }
    out.push_str("</svg>\n");
    out
}

pub fn emit_report(curves: &[ConvergenceCurve], format: ReportFormat, path: impl AsRef<Path>, x_label: &str) -> Result<()> {
    let path = path.as_ref();
    let text = match format {
        ReportFormat::Csv => render_csv(curves),
        ReportFormat::Json => render_json(curves)?,
        ReportFormat::Svg => render_svg(curves, x_label),
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizers::Method;

    fn curve(method: Method) -> ConvergenceCurve {
        let s = |m: f64| SummaryStats {
            mean: m,
            ci_low: m - 0.5,
            ci_high: m + 0.5,
            n_resamples: 100,
        };
        ConvergenceCurve {
            method,
            arity: 3,
            grid: vec![1.0, 10.0, 100.0],
            best_cost: vec![s(20.0), s(8.0), s(4.0)],
            success_rate: vec![s(0.0), s(0.3), s(0.5)],
            mean_cost_solved: vec![None, Some(5.0), Some(4.0)],
            cells: 3,
        }
    }

    #[test]
    fn csv_has_one_row_per_checkpoint_and_method() {
        let csv = render_csv(&[curve(Method::Random), curve(Method::Ga)]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 1 + 2 * 3);
        assert!(lines[1].starts_with("random,3,1,20,19.5,20.5,0,"));
        assert!(lines[1].ends_with(','));
    }

    #[test]
    fn json_round_trips() {
        let curves = vec![curve(Method::Bo)];
        let back: Vec<ConvergenceCurve> = serde_json::from_str(&render_json(&curves).unwrap()).unwrap();
        assert_eq!(back, curves);
    }

    #[test]
    fn svg_has_polyline_per_series_per_chart() {
        let svg = render_svg(&[curve(Method::Random), curve(Method::Sgd)], "evaluations");
        assert_eq!(svg.matches("<polyline").count(), 4);
        assert_eq!(svg.matches("<polygon").count(), 4);
        assert_eq!(svg.matches("<g class=\"chart\"").count(), 2);
    }

    #[test]
    fn unknown_format() {
        assert!("png".parse::<ReportFormat>().is_err());
        assert_eq!("svg".parse::<ReportFormat>().unwrap(), ReportFormat::Svg);
    }
}
