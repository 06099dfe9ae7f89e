//! CSV and SVG rendering of [`ExperimentReport`]s. Output depends only on the
//! report, so identical reports give identical bytes.

use std::fmt::Write as _;

use crate::experiments::{Cell, Check, ColumnType, ExperimentReport, Plot, Table};

/// Floats with 17 significant digits.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn cell(c: &Cell) -> String {
    match c {
        Cell::Int(i) => i.to_string(),
        Cell::Float(x) => format_float(*x),
        Cell::Text(s) => quote(s),
    }
}

fn write_table(out: &mut String, experiment: &str, table: &Table) {
    let _ = writeln!(out, "experiment,{}", quote(&format!("{experiment}/{}", table.name)));
    let header: Vec<String> = table.columns.iter().map(|(n, t)| quote(&format!("{n}:{}", t.name()))).collect();
    let _ = writeln!(out, "{}", header.join(","));
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(cell).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
}

fn parameters_table(rep: &ExperimentReport) -> Table {
    let mut t = Table::new("parameters", &[("key", ColumnType::Text), ("value", ColumnType::Text)]);
    for (k, v) in &rep.parameters {
        t.push(vec![Cell::Text(k.clone()), Cell::Text(v.clone())]);
    }
    t
}

fn summary_table(rep: &ExperimentReport) -> Table {
    let mut t = Table::new("summary", &[("statistic", ColumnType::Text), ("value", ColumnType::Float)]);
    for (k, v) in &rep.summary {
        t.push(vec![Cell::Text(k.clone()), Cell::Float(*v)]);
    }
    t
}

fn checks_table(checks: &[Check]) -> Table {
    let mut t = Table::new(
        "checks",
        &[
            ("check", ColumnType::Text),
            ("status", ColumnType::Text),
            ("value", ColumnType::Float),
            ("relation", ColumnType::Text),
            ("threshold", ColumnType::Float),
        ],
    );
    for c in checks {
        t.push(vec![
            Cell::Text(c.name.clone()),
            Cell::Text(if c.passed { "PASS" } else { "FAIL" }.into()),
            Cell::Float(c.value),
            Cell::Text(c.relation.into()),
            Cell::Float(c.threshold),
        ]);
    }
    t
}

/// All sections of the reports, separated by blank lines: for each report its
/// parameters, data tables, summary statistics and checks.
pub fn to_csv(reports: &[ExperimentReport]) -> String {
    let mut out = String::new();
    let mut first = true;
    for rep in reports {
        let mut tables = vec![parameters_table(rep)];
        tables.extend(rep.tables.iter().cloned());
        tables.push(summary_table(rep));
        tables.push(checks_table(&rep.checks));
        for t in &tables {
            if !first {
                out.push('\n');
            }
            first = false;
            write_table(&mut out, &rep.name, t);
        }
    }
    out
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: [f64; 4] = [60.0, 20.0, 40.0, 70.0]; // top, right, bottom, left
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Axis range after the optional log transform, padded when degenerate.
fn range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return None;
    }
    if hi - lo < 1e-12 * (1.0 + lo.abs()) {
        Some((lo - 0.5, hi + 0.5))
    } else {
        let pad = 0.05 * (hi - lo);
        Some((lo - pad, hi + pad))
    }
}

fn transform(v: f64, log: bool) -> f64 {
    if log {
        if v > 0.0 {
            v.log10()
        } else {
            f64::NAN
        }
    } else {
        v
    }
}

fn tick_label(v: f64, log: bool) -> String {
    if log {
        format!("1e{v:.1}")
    } else {
        format!("{v:.3}")
    }
}

/// A self-contained line plot: axes, five ticks per axis, one polyline with
/// markers per series, and a legend. Non-positive values are dropped on log
/// axes.
pub fn to_svg(plot: &Plot) -> String {
    let pts: Vec<Vec<(f64, f64)>> = plot
        .series
        .iter()
        .map(|s| {
            s.points
                .iter()
                .map(|&(x, y)| (transform(x, plot.log_x), transform(y, plot.log_y)))
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .collect()
        })
        .collect();
    let xr = range(pts.iter().flatten().map(|p| p.0)).unwrap_or((0.0, 1.0));
    let yr = range(pts.iter().flatten().map(|p| p.1)).unwrap_or((0.0, 1.0));
    let [top, right, bottom, left] = MARGIN;
    let (pw, ph) = (WIDTH - left - right, HEIGHT - top - bottom);
    let sx = |x: f64| left + (x - xr.0) / (xr.1 - xr.0) * pw;
    let sy = |y: f64| top + ph - (y - yr.0) / (yr.1 - yr.0) * ph;

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="15">{}</text>"#, WIDTH / 2.0, escape(&plot.title));
    let _ = writeln!(s, r#"<rect x="{left:.1}" y="{top:.1}" width="{pw:.1}" height="{ph:.1}" fill="none" stroke="black"/>"#);
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let xv = xr.0 + f * (xr.1 - xr.0);
        let yv = yr.0 + f * (yr.1 - yr.0);
        let (x, y) = (sx(xv), sy(yv));
        let _ = writeln!(s, r##"<line x1="{x:.2}" y1="{top:.2}" x2="{x:.2}" y2="{:.2}" stroke="#ddd"/>"##, top + ph);
        let _ = writeln!(s, r##"<line x1="{left:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/>"##, left + pw);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, top + ph + 16.0, tick_label(xv, plot.log_x));
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, left - 6.0, y + 4.0, tick_label(yv, plot.log_y));
    }
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, left + pw / 2.0, HEIGHT - 8.0, escape(&plot.x_label));
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        top + ph / 2.0,
        top + ph / 2.0,
        escape(&plot.y_label)
    );
    for (k, (series, p)) in plot.series.iter().zip(&pts).enumerate() {
        let color = COLORS[k % COLORS.len()];
        let path: Vec<String> = p.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, path.join(" "));
        for &(x, y) in p {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, sx(x), sy(y));
        }
        let ly = top + 14.0 + 16.0 * k as f64;
        let lx = left + pw - 150.0;
        let _ = writeln!(s, r#"<line x1="{lx:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{color}" stroke-width="2"/>"#, ly - 4.0, lx + 20.0, ly - 4.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{ly:.1}">{}</text>"#, lx + 26.0, escape(&series.label));
    }
    s.push_str("</svg>\n");
    s
}

/// Several plots stacked vertically in one self-contained document.
pub fn stack_svg(plots: &[&Plot]) -> Option<String> {
    match plots {
        [] => None,
        [one] => Some(to_svg(one)),
        many => {
            let total = HEIGHT * many.len() as f64;
            let mut s = format!(r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{total}" viewBox="0 0 {WIDTH} {total}">"#);
            s.push('\n');
            for (k, plot) in many.iter().enumerate() {
                let inner = to_svg(plot).replacen(r#"<svg xmlns="http://www.w3.org/2000/svg" "#, &format!(r#"<svg y="{}" "#, HEIGHT * k as f64), 1);
                s.push_str(&inner);
            }
            s.push_str("</svg>\n");
            Some(s)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::Series;

    #[test]
    fn floats_carry_seventeen_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(-2.0), "-2.0000000000000000e0");
        assert_eq!(format_float(f64::NAN), "NaN");
        assert_eq!(format_float(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn csv_sections_have_name_and_typed_header() {
        let mut rep = ExperimentReport::new("demo");
        rep.param("seed", 3);
        let mut t = Table::new("rows", &[("delta", ColumnType::Float), ("k", ColumnType::Int), ("note", ColumnType::Text)]);
        t.push(vec![Cell::Float(0.5), Cell::Int(2), Cell::Text("a,b".into())]);
        rep.tables.push(t);
        rep.check(Check::at_most("small", 1.0, 2.0));
        let csv = to_csv(&[rep]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "experiment,demo/parameters");
        assert_eq!(lines[1], "key:text,value:text");
        assert_eq!(lines[2], "seed,3");
        assert_eq!(lines[4], "experiment,demo/rows");
        assert_eq!(lines[5], "delta:float,k:int,note:text");
        assert_eq!(lines[6], "5.0000000000000000e-1,2,\"a,b\"");
        assert!(csv.contains("small,PASS,1.0000000000000000e0,<=,2.0000000000000000e0"));
    }

    #[test]
    fn svg_is_self_contained() {
        let plot = Plot {
            title: "t <1>".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            log_x: true,
            log_y: true,
            series: vec![Series { label: "s".into(), points: vec![(0.1, 1.0), (0.01, 0.1), (0.001, 0.0)] }],
        };
        let svg = to_svg(&plot);
        assert!(svg.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
        assert!(svg.contains("t &lt;1&gt;"));
        assert!(!svg.contains("href"));
        assert_eq!(svg.matches("<circle").count(), 2);
        assert_eq!(svg, to_svg(&plot));
        let stacked = stack_svg(&[&plot, &plot]).unwrap();
        assert_eq!(stacked.matches("<svg").count(), 3);
        assert_eq!(stacked.matches("xmlns").count(), 1);
        assert!(stack_svg(&[]).is_none());
    }
}
