//! Grouped summaries of sweep CSVs and a minimal SVG line chart.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};

use super::sweep::format_sig;
use crate::error::{Result, RigError};

/// A CSV file held as strings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn read<R: Read>(input: R) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(input);
        let headers = reader.headers()?.iter().map(str::to_string).collect();
        let rows = reader
            .records()
            .map(|r| r.map(|rec| rec.iter().map(str::to_string).collect()))
            .collect::<std::result::Result<Vec<Vec<String>>, _>>()?;
        Ok(Self { headers, rows })
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| RigError::InvalidParams(format!("no column named {name:?}")))
    }

    /// Columns whose nonempty cells all parse as numbers (and that have at
    /// least one nonempty cell).
    fn numeric_columns(&self) -> Vec<usize> {
        (0..self.headers.len())
            .filter(|&c| {
                let mut cells = self
                    .rows
                    .iter()
                    .map(|r| r[c].as_str())
                    .filter(|s| !s.is_empty())
                    .peekable();
                cells.peek().is_some() && cells.all(|s| s.parse::<f64>().is_ok())
            })
            .collect()
    }
}

/// Statistics of one numeric column within one group.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupSummary {
    pub key: Vec<String>,
    pub column: String,
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation; zero for a single value.
    pub std: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

fn summarize(mut values: Vec<f64>) -> (f64, f64, f64, f64, f64) {
    values.sort_by(f64::total_cmp);
    let k = values.len();
    let mean = values.iter().sum::<f64>() / k as f64;
    let std = if k > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1) as f64).sqrt()
    } else {
        0.0
    };
    let median = if k % 2 == 1 {
        values[k / 2]
    } else {
        0.5 * (values[k / 2 - 1] + values[k / 2])
    };
    (mean, std, median, values[0], values[k - 1])
}

fn group_rows<'t>(table: &'t Table, keys: &[usize]) -> BTreeMap<Vec<&'t str>, Vec<&'t Vec<String>>> {
    let mut groups: BTreeMap<Vec<&str>, Vec<&Vec<String>>> = BTreeMap::new();
    for row in &table.rows {
        groups
            .entry(keys.iter().map(|&k| row[k].as_str()).collect())
            .or_default()
            .push(row);
    }
    groups
}

/// Mean, standard deviation, median, min and max of every numeric column,
/// per distinct combination of the `group_by` columns. Blank cells are
/// skipped.
pub fn report(table: &Table, group_by: &[String]) -> Result<Vec<GroupSummary>> {
    if table.rows.is_empty() {
        return Err(RigError::EmptyInput);
    }
    let keys = group_by.iter().map(|g| table.column(g)).collect::<Result<Vec<_>>>()?;
    let numeric: Vec<usize> = table
        .numeric_columns()
        .into_iter()
        .filter(|c| !keys.contains(c))
        .collect();
    let mut out = Vec::new();
    for (key, rows) in group_rows(table, &keys) {
        for &c in &numeric {
            let values: Vec<f64> = rows
                .iter()
                .filter(|r| !r[c].is_empty())
                .map(|r| r[c].parse().expect("numeric column"))
                .collect();
            if values.is_empty() {
                continue;
            }
            let count = values.len();
            let (mean, std, median, min, max) = summarize(values);
            out.push(GroupSummary {
                key: key.iter().map(|s| s.to_string()).collect(),
                column: table.headers[c].clone(),
                count,
                mean,
                std,
                median,
                min,
                max,
            });
        }
    }
    Ok(out)
}

pub fn write_summary_csv<W: Write>(summaries: &[GroupSummary], group_by: &[String], out: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let mut header: Vec<String> = group_by.to_vec();
    header.extend(["column", "count", "mean", "std", "median", "min", "max"].map(String::from));
    writer.write_record(&header)?;
    for s in summaries {
        let mut rec = s.key.clone();
        rec.push(s.column.clone());
        rec.push(s.count.to_string());
        rec.extend([s.mean, s.std, s.median, s.min, s.max].map(format_sig));
        writer.write_record(&rec)?;
    }
    writer.flush()?;
    Ok(())
}

const PALETTE: &[&str] = &[
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf",
];

/// One polyline of mean `y` against `x` per group (the `group_by` columns
/// other than `x`).
pub fn render_svg(table: &Table, group_by: &[String], x: &str, y: &str) -> Result<String> {
    if table.rows.is_empty() {
        return Err(RigError::EmptyInput);
    }
    let (xc, yc) = (table.column(x)?, table.column(y)?);
    let keys = group_by
        .iter()
        .filter(|g| g.as_str() != x)
        .map(|g| table.column(g))
        .collect::<Result<Vec<_>>>()?;
    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for (key, rows) in group_rows(table, &keys) {
        let mut by_x: BTreeMap<u64, (f64, Vec<f64>)> = BTreeMap::new();
        for r in rows {
            let (Ok(xv), Ok(yv)) = (r[xc].parse::<f64>(), r[yc].parse::<f64>()) else {
                continue;
            };
            // Order-preserving key for finite floats.
            let bits = xv.to_bits() ^ (((xv.to_bits() as i64) >> 63) as u64 | 1 << 63);
            by_x.entry(bits).or_insert((xv, Vec::new())).1.push(yv);
        }
        let points = by_x
            .into_values()
            .map(|(xv, ys)| (xv, ys.iter().sum::<f64>() / ys.len() as f64))
            .collect();
        series.push((key.join(" "), points));
    }
    let all: Vec<(f64, f64)> = series.iter().flat_map(|s| s.1.iter().copied()).collect();
    if all.is_empty() {
        return Err(RigError::InvalidParams(format!("no numeric ({x}, {y}) pairs")));
    }
    let span = |v: &mut dyn Iterator<Item = f64>| {
        let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), t| (a.min(t), b.max(t)));
        if hi > lo {
            (lo, hi)
        } else {
            (lo - 0.5, hi + 0.5)
        }
    };
    let (x0, x1) = span(&mut all.iter().map(|p| p.0));
    let (y0, y1) = span(&mut all.iter().map(|p| p.1));
    let (w, h, pad) = (640.0, 420.0, 60.0);
    let sx = |v: f64| pad + (v - x0) / (x1 - x0) * (w - 2.0 * pad);
    let sy = |v: f64| h - pad - (v - y0) / (y1 - y0) * (h - 2.0 * pad);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<path d="M{pad} {top} V{bottom} H{right}" stroke="black" fill="none"/>"#,
        top = pad,
        bottom = h - pad,
        right = w - pad
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="13">{x}</text>"#,
        w / 2.0,
        h - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="15" y="{}" text-anchor="middle" font-size="13" transform="rotate(-90 15 {})">{y}</text>"#,
        h / 2.0,
        h / 2.0
    );
    for (v, anchor, px, py) in [
        (x0, "start", sx(x0), h - pad + 18.0),
        (x1, "end", sx(x1), h - pad + 18.0),
    ] {
        let _ = writeln!(
            svg,
            r#"<text x="{px}" y="{py}" text-anchor="{anchor}" font-size="11">{}</text>"#,
            format_sig(v)
        );
    }
    for v in [y0, y1] {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="end" font-size="11">{}</text>"#,
            pad - 6.0,
            sy(v) + 4.0,
            format_sig(v)
        );
    }
    for (i, (label, points)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = points
            .iter()
            .map(|&(a, b)| format!("{:.2},{:.2}", sx(a), sy(b)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" stroke="{color}" stroke-width="2" fill="none"/>"#,
            path.join(" ")
        );
        for &(a, b) in points {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                sx(a),
                sy(b)
            );
        }
        if !label.is_empty() {
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" font-size="11" fill="{color}">{label}</text>"#,
                w - pad + 4.0 - 120.0,
                pad + 14.0 * i as f64
            );
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
