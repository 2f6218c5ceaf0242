//! Hand-emitted SVG 1.1 figures: coverage-vs-n curves and box summaries
//! of interval-length ratios. Diagnostic quality, no charting dependency.

use super::ResultRow;
use crate::intervals::Method;
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::fmt::Write as _;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 520.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 48.0;
const MARGIN_BOTTOM: f64 = 58.0;

fn color(method: Method) -> &'static str {
    match method {
        Method::Normal => "#1f77b4",
        Method::Gamma => "#ff7f0e",
        Method::ChiSquare => "#2ca02c",
        Method::Bernstein => "#d62728",
        Method::Gba => "#9467bd",
        Method::Gbr => "#8c564b",
    }
}

struct Canvas {
    svg: String,
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Canvas {
    fn new(title: &str, x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        );
        let _ = writeln!(
            svg,
            r##"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>"##
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="26" font-family="sans-serif" font-size="16" text-anchor="middle">{title}</text>"#,
            MARGIN_LEFT + (WIDTH - MARGIN_LEFT - MARGIN_RIGHT) / 2.0
        );
        Canvas {
            svg,
            x_min,
            x_max,
            y_min,
            y_max,
        }
    }

    fn px(&self, x: f64) -> f64 {
        let span = (self.x_max - self.x_min).max(f64::MIN_POSITIVE);
        MARGIN_LEFT + (x - self.x_min) / span * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        let span = (self.y_max - self.y_min).max(f64::MIN_POSITIVE);
        HEIGHT - MARGIN_BOTTOM - (y - self.y_min) / span * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }

    fn axes(&mut self, x_label: &str, y_label: &str) {
        let x0 = MARGIN_LEFT;
        let x1 = WIDTH - MARGIN_RIGHT;
        let y0 = HEIGHT - MARGIN_BOTTOM;
        let y1 = MARGIN_TOP;
        let _ = writeln!(
            self.svg,
            r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black" stroke-width="1"/>"#
        );
        let _ = writeln!(
            self.svg,
            r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black" stroke-width="1"/>"#
        );
        let _ = writeln!(
            self.svg,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle">{x_label}</text>"#,
            (x0 + x1) / 2.0,
            HEIGHT - 16.0
        );
        let _ = writeln!(
            self.svg,
            r#"<text x="18" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 18 {:.1})">{y_label}</text>"#,
            (y0 + y1) / 2.0,
            (y0 + y1) / 2.0
        );
    }

    fn y_ticks(&mut self, step: f64) {
        let mut v = (self.y_min / step).ceil() * step;
        while v <= self.y_max + 1e-12 {
            let y = self.py(v);
            let _ = writeln!(
                self.svg,
                r#"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="black" stroke-width="1"/>"#,
                MARGIN_LEFT - 4.0,
                MARGIN_LEFT
            );
            let _ = writeln!(
                self.svg,
                r##"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#dddddd" stroke-width="0.5"/>"##,
                MARGIN_LEFT,
                WIDTH - MARGIN_RIGHT
            );
            let _ = writeln!(
                self.svg,
                r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="end">{v:.2}</text>"#,
                MARGIN_LEFT - 8.0,
                y + 4.0
            );
            v += step;
        }
    }

    fn x_tick(&mut self, v: f64, label: &str) {
        let x = self.px(v);
        let y0 = HEIGHT - MARGIN_BOTTOM;
        let _ = writeln!(
            self.svg,
            r#"<line x1="{x:.1}" y1="{y0}" x2="{x:.1}" y2="{:.1}" stroke="black" stroke-width="1"/>"#,
            y0 + 4.0
        );
        let _ = writeln!(
            self.svg,
            r#"<text x="{x:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">{label}</text>"#,
            y0 + 18.0
        );
    }

    fn legend(&mut self, entries: &[(Method, &'static str)]) {
        let lx = WIDTH - MARGIN_RIGHT + 16.0;
        let mut ly = MARGIN_TOP + 10.0;
        for (method, color) in entries {
            let _ = writeln!(
                self.svg,
                r#"<rect x="{lx}" y="{:.1}" width="14" height="4" fill="{color}"/>"#,
                ly - 4.0
            );
            let _ = writeln!(
                self.svg,
                r#"<text x="{:.1}" y="{ly}" font-family="sans-serif" font-size="12">{method}</text>"#,
                lx + 20.0
            );
            ly += 20.0;
        }
    }

    fn finish(mut self) -> String {
        self.svg.push_str("</svg>\n");
        self.svg
    }
}

/// Round ticks for an integer-valued axis.
fn integer_ticks(min: f64, max: f64) -> Vec<f64> {
    let span = (max - min).max(1.0);
    let raw = span / 7.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= 8.0)
        .unwrap_or(mag * 10.0)
        .max(1.0);
    let mut ticks = Vec::new();
    let mut v = (min / step).ceil() * step;
    while v <= max + 1e-9 {
        ticks.push(v);
        v += step;
    }
    ticks
}

/// Coverage-probability curves against sample size: one polyline per
/// method present plus a dashed reference at 1 - alpha.
///
/// Rows must be unique per (method, n); apply mu/theta/k-policy filters
/// first when plotting a multi-cell CSV.
pub fn coverage_vs_n(rows: &[ResultRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::Parse("no rows to plot".into()));
    }
    let alpha = rows[0].alpha;
    if rows.iter().any(|r| r.alpha != alpha) {
        return Err(Error::Parse(
            "rows mix alpha levels; filter to a single alpha".into(),
        ));
    }
    let mut series: BTreeMap<Method, BTreeMap<u64, f64>> = BTreeMap::new();
    for r in rows {
        if series
            .entry(r.method)
            .or_default()
            .insert(r.n, r.coverage)
            .is_some()
        {
            return Err(Error::Parse(format!(
                "multiple rows for method {} at n = {}; filter by --mu/--theta/--k-policy",
                r.method, r.n
            )));
        }
    }

    let x_min = rows.iter().map(|r| r.n).min().unwrap() as f64;
    let mut x_max = rows.iter().map(|r| r.n).max().unwrap() as f64;
    if x_max == x_min {
        x_max = x_min + 1.0;
    }
    let cov_min = rows
        .iter()
        .map(|r| r.coverage)
        .fold(f64::INFINITY, f64::min);
    let y_min = (cov_min.min(1.0 - alpha) - 0.05).max(0.0);
    let y_max = 1.0;

    let title = describe_cells(rows, "Coverage probability vs sample size");
    let mut canvas = Canvas::new(&title, x_min, x_max, y_min, y_max);
    canvas.axes("sample size n", "coverage probability");
    canvas.y_ticks(if y_max - y_min > 0.3 { 0.1 } else { 0.05 });
    for t in integer_ticks(x_min, x_max) {
        canvas.x_tick(t, &format!("{t:.0}"));
    }

    // reference line at the nominal level
    let yref = canvas.py(1.0 - alpha);
    let _ = writeln!(
        canvas.svg,
        r#"<line x1="{:.1}" y1="{yref:.1}" x2="{:.1}" y2="{yref:.1}" stroke="black" stroke-width="1" stroke-dasharray="6,4" class="reference"/>"#,
        MARGIN_LEFT,
        WIDTH - MARGIN_RIGHT
    );
    let _ = writeln!(
        canvas.svg,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11">1-alpha = {:.3}</text>"#,
        WIDTH - MARGIN_RIGHT + 16.0,
        yref + 4.0,
        1.0 - alpha
    );

    let mut legend = Vec::new();
    for (&method, points) in &series {
        let path: Vec<String> = points
            .iter()
            .map(|(&n, &cov)| format!("{:.1},{:.1}", canvas.px(n as f64), canvas.py(cov)))
            .collect();
        let _ = writeln!(
            canvas.svg,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.8" points="{}"/>"#,
            color(method),
            path.join(" ")
        );
        legend.push((method, color(method)));
    }
    canvas.legend(&legend);
    Ok(canvas.finish())
}

/// Per-method box summaries (min, quartiles, max) of the median-length
/// ratios across cells.
pub fn length_ratio_box(rows: &[ResultRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::Parse("no rows to plot".into()));
    }
    let mut per_method: BTreeMap<Method, Vec<f64>> = BTreeMap::new();
    for r in rows {
        per_method.entry(r.method).or_default().push(r.length_ratio);
    }
    let methods: Vec<Method> = per_method.keys().copied().collect();
    let y_max = rows
        .iter()
        .map(|r| r.length_ratio)
        .fold(0.0f64, f64::max)
        .max(1.2)
        * 1.05;

    let title = describe_cells(rows, "Interval length ratio vs normal method");
    let mut canvas = Canvas::new(&title, 0.0, methods.len() as f64, 0.0, y_max);
    canvas.axes("method", "median length ratio");
    canvas.y_ticks(if y_max > 2.5 { 0.5 } else { 0.25 });

    // unit ratio marker
    let y1 = canvas.py(1.0);
    let _ = writeln!(
        canvas.svg,
        r#"<line x1="{:.1}" y1="{y1:.1}" x2="{:.1}" y2="{y1:.1}" stroke="black" stroke-width="1" stroke-dasharray="6,4" class="reference"/>"#,
        MARGIN_LEFT,
        WIDTH - MARGIN_RIGHT
    );

    for (i, method) in methods.iter().enumerate() {
        let mut vals = per_method[method].clone();
        vals.sort_by(|a, b| a.partial_cmp(b).expect("ratios are finite"));
        let q1 = sorted_quantile(&vals, 0.25);
        let q2 = sorted_quantile(&vals, 0.5);
        let q3 = sorted_quantile(&vals, 0.75);
        let lo = vals[0];
        let hi = vals[vals.len() - 1];

        let cx = canvas.px(i as f64 + 0.5);
        let half_w = 24.0;
        let (py_lo, py_hi) = (canvas.py(lo), canvas.py(hi));
        let (py_q1, py_q2, py_q3) = (canvas.py(q1), canvas.py(q2), canvas.py(q3));
        let col = color(*method);
        // whiskers
        let _ = writeln!(
            canvas.svg,
            r#"<line x1="{cx:.1}" y1="{py_lo:.1}" x2="{cx:.1}" y2="{py_q1:.1}" stroke="{col}" stroke-width="1"/>"#
        );
        let _ = writeln!(
            canvas.svg,
            r#"<line x1="{cx:.1}" y1="{py_q3:.1}" x2="{cx:.1}" y2="{py_hi:.1}" stroke="{col}" stroke-width="1"/>"#
        );
        // box (guard zero-height boxes for degenerate distributions)
        let box_h = (py_q1 - py_q3).max(1.0);
        let _ = writeln!(
            canvas.svg,
            r#"<rect x="{:.1}" y="{py_q3:.1}" width="{:.1}" height="{box_h:.1}" fill="{col}" fill-opacity="0.25" stroke="{col}" stroke-width="1"/>"#,
            cx - half_w,
            2.0 * half_w
        );
        // median line
        let _ = writeln!(
            canvas.svg,
            r#"<line x1="{:.1}" y1="{py_q2:.1}" x2="{:.1}" y2="{py_q2:.1}" stroke="{col}" stroke-width="2"/>"#,
            cx - half_w,
            cx + half_w
        );
        canvas.x_tick(i as f64 + 0.5, method.name());
    }
    Ok(canvas.finish())
}

fn sorted_quantile(sorted: &[f64], q: f64) -> f64 {
    match sorted.len() {
        0 => 0.0,
        1 => sorted[0],
        n => {
            let pos = q * (n - 1) as f64;
            let idx = pos.floor() as usize;
            let frac = pos - idx as f64;
            if idx + 1 < n {
                sorted[idx] * (1.0 - frac) + sorted[idx + 1] * frac
            } else {
                sorted[n - 1]
            }
        }
    }
}

/// Title suffix naming the cell parameters when they are uniform across
/// the plotted rows.
fn describe_cells(rows: &[ResultRow], base: &str) -> String {
    let mut parts = vec![base.to_string()];
    let first = &rows[0];
    if rows.iter().all(|r| r.mu == first.mu) {
        parts.push(format!("mu={}", first.mu));
    }
    if rows.iter().all(|r| r.theta == first.theta) {
        parts.push(format!("theta={}", first.theta));
    }
    if rows.iter().all(|r| r.k_policy == first.k_policy) {
        parts.push(format!("k-policy={}", first.k_policy));
    }
    parts.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::rows_from_result;
    use crate::simulation::{run_grid, ExperimentSpec, KPolicy};

    fn rows() -> Vec<ResultRow> {
        let grid: Vec<ExperimentSpec> = [10usize, 20, 40]
            .iter()
            .map(|&n| ExperimentSpec {
                mu: 5.0,
                theta: 0.2,
                n,
                alpha: 0.05,
                trials: 40,
                master_seed: 3,
                k_policy: KPolicy::Default,
            })
            .collect();
        run_grid(&grid)
            .unwrap()
            .iter()
            .flat_map(rows_from_result)
            .collect()
    }

    /// Minimal well-formedness check: tags balance, attributes are
    /// quoted, exactly one root element.
    fn assert_well_formed_xml(text: &str) {
        let mut stack: Vec<String> = Vec::new();
        let mut roots = 0usize;
        for (i, c) in text.char_indices() {
            if c != '<' {
                continue;
            }
            let rest = &text[i + 1..];
            if let Some(decl) = rest.strip_prefix('?') {
                assert!(decl.contains("?>"), "unterminated declaration");
                continue;
            }
            let end = rest.find('>').expect("unterminated tag");
            let tag = &rest[..end];
            if let Some(name) = tag.strip_prefix('/') {
                let open = stack.pop().unwrap_or_else(|| panic!("stray </{name}>"));
                assert_eq!(open, name, "mismatched tag");
            } else {
                let self_closing = tag.ends_with('/');
                let body = tag.trim_end_matches('/');
                let name = body.split_whitespace().next().expect("empty tag").to_string();
                // attribute quotes must balance
                assert_eq!(
                    body.matches('"').count() % 2,
                    0,
                    "unbalanced quotes in <{name}>"
                );
                if !self_closing {
                    if stack.is_empty() {
                        roots += 1;
                    }
                    stack.push(name);
                }
            }
        }
        assert!(stack.is_empty(), "unclosed tags: {stack:?}");
        assert_eq!(roots, 1, "expected exactly one root element");
    }

    #[test]
    fn coverage_plot_structure() {
        let svg = coverage_vs_n(&rows()).unwrap();
        assert_well_formed_xml(&svg);
        assert_eq!(svg.matches("<polyline").count(), 6);
        assert_eq!(svg.matches(r#"class="reference""#).count(), 1);
        assert!(svg.contains("1-alpha = 0.950"));
        assert!(svg.contains("mu=5"));
    }

    #[test]
    fn coverage_plot_rejects_ambiguous_rows() {
        let mut doubled = rows();
        doubled.extend(rows());
        let err = coverage_vs_n(&doubled).unwrap_err().to_string();
        assert!(err.contains("multiple rows"), "{err}");
        assert!(coverage_vs_n(&[]).is_err());
    }

    #[test]
    fn box_plot_structure() {
        let svg = length_ratio_box(&rows()).unwrap();
        assert_well_formed_xml(&svg);
        // one box per method
        assert_eq!(svg.matches("<rect").count(), 6 + 1); // boxes + background
        assert!(svg.contains(r#"class="reference""#));
    }

    #[test]
    fn normal_box_is_centered_at_one() {
        let all = rows();
        let normals: Vec<f64> = all
            .iter()
            .filter(|r| r.method == Method::Normal)
            .map(|r| r.length_ratio)
            .collect();
        assert!(normals.iter().all(|&r| r == 1.0));
    }
}
