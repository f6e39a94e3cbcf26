//! File formats: distance matrices as CSV or JSON, barcodes and matchings
//! as JSON, and barcode SVG rendering.
//!
//! All output is deterministic: object keys are sorted, floats carry 15
//! significant digits, infinite deaths serialize as the string `"inf"`, and
//! intervals appear in `(dim, birth, death)` order.

use crate::barcode::{Barcode, Interval};
use crate::bottleneck::Matching;
use crate::invariants::InvariantReport;
use crate::metric::DistanceMatrix;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Metric(#[from] crate::metric::MetricError),
}

/// JSON value with deterministic rendering.
#[derive(Debug, Clone)]
pub enum Json {
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(BTreeMap<String, Json>),
}

impl Json {
    pub fn obj(pairs: Vec<(&str, Json)>) -> Json {
        Json::Obj(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        self.write(&mut s);
        s
    }

    fn write(&self, out: &mut String) {
        match self {
            Json::Bool(b) => {
                let _ = write!(out, "{b}");
            }
            Json::Int(i) => {
                let _ = write!(out, "{i}");
            }
            Json::Float(x) => {
                if x.is_infinite() {
                    out.push_str("\"inf\"");
                } else {
                    let _ = write!(out, "{}", format_float(*x));
                }
            }
            Json::Str(s) => {
                out.push('"');
                for c in s.chars() {
                    match c {
                        '"' => out.push_str("\\\""),
                        '\\' => out.push_str("\\\\"),
                        '\n' => out.push_str("\\n"),
                        c if (c as u32) < 0x20 => {
                            let _ = write!(out, "\\u{:04x}", c as u32);
                        }
                        c => out.push(c),
                    }
                }
                out.push('"');
            }
            Json::Arr(items) => {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    item.write(out);
                }
                out.push(']');
            }
            Json::Obj(map) => {
                out.push('{');
                for (i, (k, v)) in map.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    Json::Str(k.clone()).write(out);
                    out.push(':');
                    v.write(out);
                }
                out.push('}');
            }
        }
    }
}

/// 15 significant digits, scientific notation.
pub fn format_float(x: f64) -> String {
    format!("{x:.14e}")
}

// ---------------------------------------------------------------------------
// distance matrices
// ---------------------------------------------------------------------------

pub fn write_matrix_csv(d: &DistanceMatrix) -> String {
    let mut out = String::new();
    for row in d.rows() {
        let line: Vec<String> = row.iter().map(|&v| format_float(v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn read_matrix_csv(text: &str) -> Result<DistanceMatrix, FormatError> {
    let mut rows = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: Result<Vec<f64>, _> = line.split(',').map(|t| t.trim().parse::<f64>()).collect();
        rows.push(row.map_err(|e| FormatError::Parse(format!("line {}: {e}", ln + 1)))?);
    }
    Ok(DistanceMatrix::validate(&rows)?)
}

pub fn write_matrix_json(d: &DistanceMatrix) -> String {
    let mut pairs = vec![
        ("n", Json::Int(d.n() as i64)),
        (
            "d",
            Json::Arr(
                d.rows()
                    .into_iter()
                    .map(|r| Json::Arr(r.into_iter().map(Json::Float).collect()))
                    .collect(),
            ),
        ),
    ];
    if let Some(labels) = &d.labels {
        pairs.push((
            "labels",
            Json::Arr(labels.iter().map(|l| Json::Str(l.clone())).collect()),
        ));
    }
    if let Some(coords) = &d.coords {
        pairs.push((
            "coords",
            Json::Arr(
                coords
                    .iter()
                    .map(|p| Json::Arr(p.iter().map(|&v| Json::Float(v)).collect()))
                    .collect(),
            ),
        ));
    }
    Json::obj(pairs).render()
}

pub fn read_matrix_json(text: &str) -> Result<DistanceMatrix, FormatError> {
    #[derive(serde::Deserialize)]
    struct MatrixFile {
        #[serde(default)]
        n: Option<usize>,
        d: Vec<Vec<f64>>,
        #[serde(default)]
        labels: Option<Vec<String>>,
        #[serde(default)]
        coords: Option<Vec<Vec<f64>>>,
    }
    let file: MatrixFile =
        serde_json::from_str(text).map_err(|e| FormatError::Parse(e.to_string()))?;
    if let Some(n) = file.n {
        if n != file.d.len() {
            return Err(FormatError::Parse(format!(
                "declared n = {n} but d has {} rows",
                file.d.len()
            )));
        }
    }
    let mut m = DistanceMatrix::validate(&file.d)?;
    if let Some(labels) = file.labels {
        if labels.len() != m.n() {
            return Err(FormatError::Parse("labels length differs from n".into()));
        }
        m.labels = Some(labels);
    }
    if let Some(coords) = file.coords {
        if coords.len() != m.n() {
            return Err(FormatError::Parse("coords length differs from n".into()));
        }
        m.coords = Some(coords);
    }
    Ok(m)
}

/// Reads a matrix from CSV or JSON based on leading content.
pub fn read_matrix_auto(text: &str) -> Result<DistanceMatrix, FormatError> {
    if text.trim_start().starts_with('{') {
        read_matrix_json(text)
    } else {
        read_matrix_csv(text)
    }
}

// ---------------------------------------------------------------------------
// barcodes
// ---------------------------------------------------------------------------

pub fn barcode_to_json(b: &Barcode, extra: Vec<(&str, Json)>) -> Json {
    let mut dims: BTreeMap<String, Json> = BTreeMap::new();
    for dim in b.dims() {
        let bars: Vec<Json> = b
            .in_dim(dim)
            .iter()
            .map(|i| Json::Arr(vec![Json::Float(i.birth), Json::Float(i.death)]))
            .collect();
        dims.insert(dim.to_string(), Json::Arr(bars));
    }
    let mut pairs = vec![
        ("field", Json::Int(b.field_char() as i64)),
        ("dims", Json::Obj(dims)),
    ];
    pairs.extend(extra);
    Json::obj(pairs)
}

pub fn write_barcode_json(b: &Barcode) -> String {
    barcode_to_json(b, vec![]).render()
}

pub fn read_barcode_json(text: &str) -> Result<Barcode, FormatError> {
    let v: serde_json::Value =
        serde_json::from_str(text).map_err(|e| FormatError::Parse(e.to_string()))?;
    let field =
        v.get("field")
            .and_then(|f| f.as_u64())
            .ok_or_else(|| FormatError::Parse("missing integer \"field\"".into()))? as u32;
    let dims = v
        .get("dims")
        .and_then(|d| d.as_object())
        .ok_or_else(|| FormatError::Parse("missing object \"dims\"".into()))?;
    let mut intervals = Vec::new();
    for (key, bars) in dims {
        let dim: usize = key
            .parse()
            .map_err(|_| FormatError::Parse(format!("bad dimension key {key:?}")))?;
        let bars = bars
            .as_array()
            .ok_or_else(|| FormatError::Parse(format!("dims[{key:?}] is not an array")))?;
        for bar in bars {
            let pair = bar
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| FormatError::Parse("each bar must be [birth, death]".into()))?;
            let birth = pair[0]
                .as_f64()
                .ok_or_else(|| FormatError::Parse("birth must be a number".into()))?;
            let death = match &pair[1] {
                serde_json::Value::String(s) if s == "inf" => f64::INFINITY,
                serde_json::Value::Number(n) => n
                    .as_f64()
                    .ok_or_else(|| FormatError::Parse("death out of range".into()))?,
                other => return Err(FormatError::Parse(format!("bad death value {other}"))),
            };
            if !(birth >= 0.0) || !(birth < death) {
                return Err(FormatError::Parse(format!(
                    "invalid interval ({birth}, {death}] in dimension {dim}"
                )));
            }
            intervals.push(Interval::new(dim, birth, death));
        }
    }
    Ok(Barcode::from_intervals(field, intervals))
}

// ---------------------------------------------------------------------------
// matchings and reports
// ---------------------------------------------------------------------------

pub fn matching_to_json(m: &Matching) -> Json {
    Json::obj(vec![
        ("cost", Json::Float(m.cost)),
        (
            "pairs",
            Json::Arr(
                m.pairs
                    .iter()
                    .map(|&(i, j)| Json::Arr(vec![Json::Int(i as i64), Json::Int(j as i64)]))
                    .collect(),
            ),
        ),
        (
            "unmatched1",
            Json::Arr(m.unmatched1.iter().map(|&i| Json::Int(i as i64)).collect()),
        ),
        (
            "unmatched2",
            Json::Arr(m.unmatched2.iter().map(|&i| Json::Int(i as i64)).collect()),
        ),
    ])
}

pub fn invariant_report_to_json(r: &InvariantReport) -> Json {
    let dim_map = |m: &BTreeMap<usize, f64>| {
        Json::Obj(
            m.iter()
                .map(|(k, &v)| (k.to_string(), Json::Float(v)))
                .collect(),
        )
    };
    Json::obj(vec![
        ("diameter", Json::Float(r.diameter)),
        ("radius", Json::Float(r.radius)),
        ("spread", Json::Float(r.spread)),
        ("spread_exact", Json::Bool(r.spread_exact)),
        ("spread_k", dim_map(&r.spread_k)),
        ("hyperbolicity", Json::Float(r.hyperbolicity)),
        ("sfillrad", dim_map(&r.sfillrad)),
        ("fillrad_zero_birth", dim_map(&r.fillrad_zero_birth)),
        (
            "bounds",
            Json::Arr(
                r.bounds
                    .iter()
                    .map(|b| {
                        Json::obj(vec![
                            ("name", Json::Str(b.name.to_string())),
                            ("asserted", Json::Bool(b.asserted)),
                            ("satisfied", Json::Bool(b.satisfied)),
                            ("lhs", Json::Float(b.lhs)),
                            ("rhs", Json::Float(b.rhs)),
                        ])
                    })
                    .collect(),
            ),
        ),
    ])
}

// ---------------------------------------------------------------------------
// SVG
// ---------------------------------------------------------------------------

const BAND_COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

/// Renders one horizontal bar per interval, grouped by dimension, on a
/// linear axis from 0 to 1.1 times the largest finite death.
pub fn render_svg(b: &Barcode) -> String {
    let max_finite = b
        .intervals()
        .iter()
        .map(|i| if i.is_essential() { i.birth } else { i.death })
        .fold(0.0, f64::max);
    let axis_max = if max_finite > 0.0 {
        max_finite * 1.1
    } else {
        1.0
    };

    let width = 840.0;
    let margin = 40.0;
    let plot_w = width - 2.0 * margin;
    let bar_h = 6.0;
    let bar_gap = 4.0;
    let band_gap = 24.0;

    let x = |v: f64| margin + plot_w * (v / axis_max).min(1.0);

    let mut body = String::new();
    let mut y = 30.0;
    for dim in b.dims() {
        let color = BAND_COLORS[dim % BAND_COLORS.len()];
        let _ = write!(
            body,
            "<text x=\"4\" y=\"{:.1}\" font-size=\"12\" font-family=\"monospace\">H{}</text>",
            y + 10.0,
            dim
        );
        for i in b.in_dim(dim) {
            let x0 = x(i.birth);
            let x1 = if i.is_essential() {
                width - margin
            } else {
                x(i.death)
            };
            let w = (x1 - x0).max(0.75);
            let _ = write!(
                body,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{bar_h}\" fill=\"{color}\"{}/>",
                x0,
                y,
                w,
                if i.is_essential() { " opacity=\"0.55\"" } else { "" }
            );
            y += bar_h + bar_gap;
        }
        y += band_gap;
    }
    let height = y + 30.0;
    let axis_y = height - 18.0;
    let _ = write!(
        body,
        "<line x1=\"{margin}\" y1=\"{axis_y}\" x2=\"{:.1}\" y2=\"{axis_y}\" stroke=\"#333\"/>\
         <text x=\"{margin}\" y=\"{:.1}\" font-size=\"10\" font-family=\"monospace\">0</text>\
         <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"10\" font-family=\"monospace\" text-anchor=\"end\">{:.6}</text>",
        width - margin,
        axis_y + 14.0,
        width - margin,
        axis_y + 14.0,
        axis_max
    );
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width} {height:.0}\"><rect width=\"100%\" height=\"100%\" fill=\"white\"/>{body}</svg>"
    )
}
