//! File formats: PGM/CSV fields, diagram CSV, vineyard JSON and SVG plots.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::grid::GridField;
use crate::persistence::PersistenceDiagram;
use crate::vineyard::{EndKind, EndpointMatch, Vine};

/// Reads a square field from a PGM (P2 or P5, maxval ≤ 255) or CSV file.
pub fn ingest_field(path: &Path) -> Result<GridField> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(b"P2") || bytes.starts_with(b"P5") {
        parse_pgm(path, &bytes)
    } else {
        let text = String::from_utf8(bytes)
            .map_err(|e| Error::format(path, format!("byte {}", e.utf8_error().valid_up_to()), "not UTF-8 text"))?;
        parse_csv_field(path, &text)
    }
}

fn square_field(path: &Path, width: usize, height: usize, values: Vec<f64>) -> Result<GridField> {
    if width != height {
        return Err(Error::format(
            path,
            "header",
            format!("field must be square, got {width}x{height}"),
        ));
    }
    GridField::new(width, values).map_err(|e| Error::format(path, "data", e.to_string()))
}

/// PGM header tokens with their line numbers; returns the offset after the
/// whitespace byte that ends the header.
fn pgm_header(path: &Path, bytes: &[u8]) -> Result<(Vec<(usize, usize)>, usize)> {
    let mut tokens = Vec::new();
    let mut k = 2;
    let mut line = 1;
    while tokens.len() < 3 {
        match bytes.get(k) {
            None => return Err(Error::format(path, format!("line {line}"), "truncated header")),
            Some(b'#') => {
                while k < bytes.len() && bytes[k] != b'\n' {
                    k += 1;
                }
            }
            Some(c) if c.is_ascii_whitespace() => {
                if *c == b'\n' {
                    line += 1;
                }
                k += 1;
            }
            Some(c) if c.is_ascii_digit() => {
                let start = k;
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                let text = std::str::from_utf8(&bytes[start..k]).expect("ascii digits");
                let value = text.parse().map_err(|_| {
                    Error::format(path, format!("line {line}"), format!("header value '{text}' too large"))
                })?;
                tokens.push((value, line));
            }
            Some(c) => {
                return Err(Error::format(
                    path,
                    format!("line {line}, byte {k}"),
                    format!("unexpected header byte 0x{c:02x}"),
                ))
            }
        }
    }
    Ok((tokens, k + 1))
}

fn parse_pgm(path: &Path, bytes: &[u8]) -> Result<GridField> {
    let (header, data_start) = pgm_header(path, bytes)?;
    let (width, height, maxval) = (header[0].0, header[1].0, header[2].0);
    if maxval == 0 || maxval > 255 {
        return Err(Error::format(
            path,
            format!("line {}", header[2].1),
            format!("maxval must be in 1..=255, got {maxval}"),
        ));
    }
    let count = width * height;
    let values: Vec<f64> = if bytes[1] == b'5' {
        let data = bytes.get(data_start..data_start + count).ok_or_else(|| {
            Error::format(
                path,
                format!("byte {data_start}"),
                format!("expected {count} pixel bytes, found {}", bytes.len().saturating_sub(data_start)),
            )
        })?;
        data.iter().map(|&b| b as f64).collect()
    } else {
        let text = std::str::from_utf8(&bytes[data_start.min(bytes.len())..])
            .map_err(|_| Error::format(path, "data", "P2 pixel data is not ASCII"))?;
        let mut out = Vec::with_capacity(count);
        let first_line = header[2].1;
        for (l, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            for tok in line.split_whitespace() {
                let v: u32 = tok.parse().map_err(|_| {
                    Error::format(path, format!("line {}", first_line + 1 + l), format!("bad pixel '{tok}'"))
                })?;
                if v as usize > maxval {
                    return Err(Error::format(
                        path,
                        format!("line {}", first_line + 1 + l),
                        format!("pixel {v} exceeds maxval {maxval}"),
                    ));
                }
                out.push(v as f64);
            }
        }
        if out.len() != count {
            return Err(Error::format(
                path,
                "data",
                format!("expected {count} pixels, found {}", out.len()),
            ));
        }
        out
    };
    square_field(path, width, height, values)
}

fn parse_csv_field(path: &Path, text: &str) -> Result<GridField> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (l, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> =
            line.split(',').map(|c| c.trim().parse::<f64>()).collect();
        match parsed {
            Ok(row) => rows.push(row),
            // a single leading header line is allowed
            Err(_) if rows.is_empty() && l == 0 => continue,
            Err(_) => {
                return Err(Error::format(path, format!("line {}", l + 1), "non-numeric cell"));
            }
        }
    }
    let height = rows.len();
    if height == 0 {
        return Err(Error::format(path, "line 1", "no data rows"));
    }
    let width = rows[0].len();
    if let Some(l) = rows.iter().position(|r| r.len() != width) {
        return Err(Error::format(
            path,
            format!("data row {}", l + 1),
            format!("expected {width} columns, found {}", rows[l].len()),
        ));
    }
    square_field(path, width, height, rows.concat())
}

pub fn field_to_csv(field: &GridField) -> String {
    let mut out = String::new();
    for row in field.rows() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// ASCII PGM; values are rounded and clamped to `0..=255`.
pub fn field_to_pgm(field: &GridField) -> String {
    let n = field.n();
    let mut out = format!("P2\n{n} {n}\n255\n");
    for row in field.rows() {
        let cells: Vec<String> = row
            .iter()
            .map(|v| (v.round().clamp(0.0, 255.0) as u8).to_string())
            .collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

/// Writes PGM for a `.pgm` path, CSV otherwise.
pub fn write_field(field: &GridField, path: &Path) -> Result<()> {
    let is_pgm = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
    let text = if is_pgm { field_to_pgm(field) } else { field_to_csv(field) };
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub const DIAGRAM_HEADER: &str = "dim,birth,death,essential";

/// Diagram rows (finite points, then essentials) under [`DIAGRAM_HEADER`].
pub fn diagrams_to_csv(diagrams: &[PersistenceDiagram]) -> String {
    let mut out = format!("{DIAGRAM_HEADER}\n");
    for d in diagrams {
        for &(b, de) in &d.points {
            writeln!(out, "{},{},{},0", d.dim, b, de).unwrap();
        }
        for &b in &d.essential_births {
            writeln!(out, "{},{},inf,1", d.dim, b).unwrap();
        }
    }
    out
}

pub fn export_diagram(diagram: &PersistenceDiagram, path: &Path) -> Result<()> {
    export_diagrams(std::slice::from_ref(diagram), path)
}

pub fn export_diagrams(diagrams: &[PersistenceDiagram], path: &Path) -> Result<()> {
    fs::write(path, diagrams_to_csv(diagrams)).map_err(|e| Error::io(path, e))
}

/// Parses diagram CSV; returns one diagram per dimension present, ascending.
pub fn parse_diagrams(path: &Path, text: &str) -> Result<Vec<PersistenceDiagram>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == DIAGRAM_HEADER => {}
        _ => return Err(Error::format(path, "line 1", format!("expected header '{DIAGRAM_HEADER}'"))),
    }
    let mut out: Vec<PersistenceDiagram> = Vec::new();
    for (l, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let loc = || format!("line {}", l + 1);
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != 4 {
            return Err(Error::format(path, loc(), "expected 4 columns"));
        }
        let dim: usize = cells[0].parse().map_err(|_| Error::format(path, loc(), "bad dim"))?;
        let birth: f64 = cells[1].parse().map_err(|_| Error::format(path, loc(), "bad birth"))?;
        let death: f64 = cells[2].parse().map_err(|_| Error::format(path, loc(), "bad death"))?;
        let d = match out.iter_mut().find(|d| d.dim == dim) {
            Some(d) => d,
            None => {
                out.push(PersistenceDiagram::empty(dim));
                out.last_mut().unwrap()
            }
        };
        match cells[3] {
            "1" if death.is_infinite() => d.essential_births.push(birth),
            "0" if death.is_finite() => d.points.push((birth, death)),
            _ => return Err(Error::format(path, loc(), "essential flag disagrees with death")),
        }
    }
    out.sort_by_key(|d| d.dim);
    Ok(out)
}

pub fn import_diagrams(path: &Path) -> Result<Vec<PersistenceDiagram>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_diagrams(path, &text)
}

fn json_number(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!("inf")
    }
}

fn optional_point(p: Option<(f64, f64)>) -> Value {
    p.map_or(Value::Null, |(b, d)| json!([b, d]))
}

/// Vineyard JSON: vines with their samples plus the endpoint matching.
pub fn vineyard_to_json(vines: &[Vine], matching: &[EndpointMatch]) -> String {
    let vines: Vec<Value> = vines
        .iter()
        .map(|v| {
            let samples: Vec<Value> = v
                .samples
                .iter()
                .map(|&(k, b, d)| json!([k, json_number(b), json_number(d)]))
                .collect();
            json!({
                "dim": v.dim,
                "start_kind": v.start_kind.name(),
                "end_kind": v.end_kind.name(),
                "samples": samples,
            })
        })
        .collect();
    let matching: Vec<Value> = matching
        .iter()
        .map(|m| json!({ "dim": m.dim, "from": optional_point(m.from), "to": optional_point(m.to) }))
        .collect();
    let mut text = serde_json::to_string_pretty(&json!({ "vines": vines, "endpoint_matching": matching }))
        .expect("JSON values serialize");
    text.push('\n');
    text
}

pub fn export_vineyard(vines: &[Vine], matching: &[EndpointMatch], path: &Path) -> Result<()> {
    fs::write(path, vineyard_to_json(vines, matching)).map_err(|e| Error::io(path, e))
}

pub fn parse_vineyard(path: &Path, text: &str) -> Result<(Vec<Vine>, Vec<EndpointMatch>)> {
    let bad = |what: &str| Error::format(path, what.to_string(), "malformed vineyard JSON");
    let root: Value = serde_json::from_str(text)
        .map_err(|e| Error::format(path, format!("line {}, column {}", e.line(), e.column()), e.to_string()))?;
    let number = |v: &Value, what: &str| -> Result<f64> {
        match v {
            Value::String(s) if s == "inf" => Ok(f64::INFINITY),
            v => v.as_f64().ok_or_else(|| bad(what)),
        }
    };
    let mut vines = Vec::new();
    for (k, v) in root["vines"].as_array().ok_or_else(|| bad("vines"))?.iter().enumerate() {
        let what = format!("vines[{k}]");
        let kind = |key: &str| {
            v[key]
                .as_str()
                .and_then(EndKind::from_name)
                .ok_or_else(|| bad(&what))
        };
        let mut samples = Vec::new();
        for s in v["samples"].as_array().ok_or_else(|| bad(&what))? {
            let s = s.as_array().filter(|s| s.len() == 3).ok_or_else(|| bad(&what))?;
            let step = s[0].as_u64().ok_or_else(|| bad(&what))? as usize;
            samples.push((step, number(&s[1], &what)?, number(&s[2], &what)?));
        }
        vines.push(Vine {
            dim: v["dim"].as_u64().ok_or_else(|| bad(&what))? as usize,
            samples,
            start_kind: kind("start_kind")?,
            end_kind: kind("end_kind")?,
        });
    }
    let mut matching = Vec::new();
    let empty = Vec::new();
    let entries = root.get("endpoint_matching").and_then(Value::as_array).unwrap_or(&empty);
    for (k, m) in entries.iter().enumerate() {
        let what = format!("endpoint_matching[{k}]");
        let point = |key: &str| -> Result<Option<(f64, f64)>> {
            match &m[key] {
                Value::Null => Ok(None),
                Value::Array(p) if p.len() == 2 => Ok(Some((number(&p[0], &what)?, number(&p[1], &what)?))),
                _ => Err(bad(&what)),
            }
        };
        matching.push(EndpointMatch {
            dim: m["dim"].as_u64().ok_or_else(|| bad(&what))? as usize,
            from: point("from")?,
            to: point("to")?,
        });
    }
    Ok((vines, matching))
}

pub fn import_vineyard(path: &Path) -> Result<(Vec<Vine>, Vec<EndpointMatch>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_vineyard(path, &text)
}

const SVG_SIZE: f64 = 400.0;
const SVG_MARGIN: f64 = 30.0;
const DIM_COLORS: [&str; 2] = ["#d62728", "#1f77b4"];

struct Frame {
    lo: f64,
    hi: f64,
}

impl Frame {
    fn new(values: impl Iterator<Item = f64>) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite()) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi <= lo {
            hi = lo + 1.0;
        }
        // reserve a band above the range for essential classes
        let band = (hi - lo) * 0.1;
        Frame { lo, hi: hi + band }
    }

    fn essential_height(&self) -> f64 {
        self.hi - (self.hi - self.lo) * 0.04
    }

    fn x(&self, v: f64) -> f64 {
        SVG_MARGIN + (v - self.lo) / (self.hi - self.lo) * (SVG_SIZE - 2.0 * SVG_MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        SVG_SIZE - self.x(v)
    }

    fn open(&self, title: &str) -> String {
        let mut s = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_SIZE}\" height=\"{SVG_SIZE}\">\n\
             <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
             <text x=\"{SVG_MARGIN}\" y=\"18\" font-size=\"12\">{title}</text>\n"
        );
        writeln!(
            s,
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"gray\"/>",
            self.x(self.lo),
            self.y(self.lo),
            self.x(self.hi),
            self.y(self.hi)
        )
        .unwrap();
        s
    }
}

/// Scatter plot of diagrams (birth on x, death on y) with the diagonal;
/// essential classes are drawn as squares in a band above the value range.
pub fn diagrams_svg(diagrams: &[PersistenceDiagram], title: &str) -> String {
    let frame = Frame::new(
        diagrams
            .iter()
            .flat_map(|d| d.points.iter().flat_map(|p| [p.0, p.1]).chain(d.essential_births.iter().copied())),
    );
    let mut s = frame.open(title);
    for d in diagrams {
        let color = DIM_COLORS[d.dim.min(1)];
        for &(b, de) in &d.points {
            writeln!(s, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>", frame.x(b), frame.y(de)).unwrap();
        }
        for &b in &d.essential_births {
            let (x, y) = (frame.x(b), frame.y(frame.essential_height()));
            writeln!(s, "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"6\" height=\"6\" fill=\"{color}\"/>", x - 3.0, y - 3.0).unwrap();
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Vines projected onto the birth–death plane as polylines.
pub fn vineyard_svg(vines: &[Vine], title: &str) -> String {
    let frame = Frame::new(vines.iter().flat_map(|v| v.samples.iter().flat_map(|s| [s.1, s.2])));
    let mut s = frame.open(title);
    for v in vines {
        let color = DIM_COLORS[v.dim.min(1)];
        let points: Vec<String> = v
            .samples
            .iter()
            .map(|&(_, b, d)| {
                let d = if d.is_finite() { d } else { frame.essential_height() };
                format!("{:.2},{:.2}", frame.x(b), frame.y(d))
            })
            .collect();
        writeln!(s, "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\"/>", points.join(" ")).unwrap();
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str, contents: &[u8]) -> (tempfile::TempDir, std::path::PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(name);
        fs::write(&path, contents).unwrap();
        (dir, path)
    }

    #[test]
    fn pgm_p2_and_p5() {
        let (_d, p) = tmp("a.pgm", b"P2\n# comment\n2 2\n255\n0 255\n128 64\n");
        let f = ingest_field(&p).unwrap();
        assert_eq!(f.values(), &[0.0, 255.0, 128.0, 64.0]);
        let mut bin = b"P5 2 2 255\n".to_vec();
        bin.extend_from_slice(&[0, 255, 128, 64]);
        let (_d, p) = tmp("b.pgm", &bin);
        assert_eq!(ingest_field(&p).unwrap().values(), &[0.0, 255.0, 128.0, 64.0]);
    }

    #[test]
    fn pgm_errors() {
        let (_d, p) = tmp("a.pgm", b"P2\n2 3\n255\n0 0\n0 0\n0 0\n");
        assert!(matches!(ingest_field(&p), Err(Error::Format { .. })));
        let (_d, p) = tmp("b.pgm", b"P2\n2 2\n65535\n0 0 0 0\n");
        let err = ingest_field(&p).unwrap_err().to_string();
        assert!(err.contains("line 3") && err.contains("maxval"), "{err}");
        let (_d, p) = tmp("c.pgm", b"P2\n2 2\n255\n0 0 0\n");
        assert!(ingest_field(&p).is_err());
        let (_d, p) = tmp("d.pgm", b"P2\n2 2\n");
        assert!(ingest_field(&p).is_err());
    }

    #[test]
    fn csv_fields() {
        let (_d, p) = tmp("a.csv", b"0,1\n2,3\n");
        assert_eq!(ingest_field(&p).unwrap().values(), &[0.0, 1.0, 2.0, 3.0]);
        let (_d, p) = tmp("b.csv", b"c0,c1\n0,1\n2,3\n");
        assert_eq!(ingest_field(&p).unwrap().values(), &[0.0, 1.0, 2.0, 3.0]);
        let (_d, p) = tmp("c.csv", b"0,1\n2\n");
        assert!(ingest_field(&p).is_err());
        let (_d, p) = tmp("d.csv", b"0,1,2\n3,4,5\n");
        assert!(ingest_field(&p).is_err());
    }

    #[test]
    fn diagram_csv_format() {
        assert_eq!(diagrams_to_csv(&[PersistenceDiagram::empty(0)]), "dim,birth,death,essential\n");
        let d = PersistenceDiagram {
            dim: 0,
            points: vec![(1.0, 5.0)],
            essential_births: vec![0.0],
        };
        assert_eq!(diagrams_to_csv(&[d]), "dim,birth,death,essential\n0,1,5,0\n0,0,inf,1\n");
    }

    #[test]
    fn svg_is_well_formed_enough() {
        let d = PersistenceDiagram {
            dim: 1,
            points: vec![(1.0, 5.0)],
            essential_births: vec![0.0],
        };
        let s = diagrams_svg(&[d], "t");
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
        assert_eq!(s.matches("<circle").count(), 1);
        assert_eq!(s.matches("<rect").count(), 2);
    }
}
