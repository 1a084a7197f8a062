//! CSV readers and writers.
//!
//! A trace file starts with a metadata comment, then a header and rows:
//!
//! ```text
//! # kind=decay, x_unit=s
//! x,y,sigma_y
//! 0.0,1.01,0.02
//! ```
//!
//! `sigma_y` is optional. Junction tables are two-column CSVs with a header.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use hotqubit::fit::{Trace, TraceKind};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct TraceFile {
    pub kind: Option<TraceKind>,
    pub x_unit: Option<String>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub sigma_y: Option<Vec<f64>>,
}

impl TraceFile {
    pub fn into_trace(self, kind: TraceKind) -> Result<Trace, CliError> {
        Ok(Trace::new(kind, self.x, self.y, self.sigma_y)?)
    }
}

fn open(path: &Path) -> Result<File, CliError> {
    File::open(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn read_trace(path: &Path) -> Result<TraceFile, CliError> {
    parse_trace(BufReader::new(open(path)?), &path.display().to_string())
}

pub fn parse_trace<R: BufRead>(mut r: R, name: &str) -> Result<TraceFile, CliError> {
    let mut first = String::new();
    r.read_line(&mut first)?;
    let (mut kind, mut x_unit) = (None, None);
    let (body, offset): (Box<dyn Read + '_>, usize) =
        if let Some(meta) = first.trim().strip_prefix('#') {
            for item in meta.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let (k, v) = item.split_once('=').ok_or_else(|| {
                    CliError::input(format!(
                        "{name}:1: expected key=value in header, got {item:?}"
                    ))
                })?;
                match k.trim() {
                    "kind" => {
                        kind = Some(v.trim().parse::<TraceKind>().map_err(|_| {
                            CliError::input(format!("{name}:1: unknown trace kind {:?}", v.trim()))
                        })?)
                    }
                    "x_unit" => x_unit = Some(v.trim().to_string()),
                    _ => {}
                }
            }
            (Box::new(r), 1)
        } else {
            (
                Box::new(std::io::Cursor::new(first.into_bytes()).chain(r)),
                0,
            )
        };
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(body);
    let headers = rdr.headers()?.clone();
    let col = |h: &str| headers.iter().position(|c| c == h);
    let (xi, yi) = match (col("x"), col("y")) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(CliError::input(format!(
                "{name}:{}: header must contain x and y columns",
                offset + 1
            )))
        }
    };
    let si = col("sigma_y");
    let (mut x, mut y, mut s) = (Vec::new(), Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line()) as usize + offset;
            CliError::input(format!("{name}:{line}: {e}"))
        })?;
        let line = rec.position().map_or(0, |p| p.line()) as usize + offset;
        let field = |i: usize, what: &str| -> Result<f64, CliError> {
            let raw = rec
                .get(i)
                .ok_or_else(|| CliError::input(format!("{name}:{line}: missing {what}")))?;
            raw.parse::<f64>().map_err(|_| {
                CliError::input(format!("{name}:{line}: {what} = {raw:?} is not a number"))
            })
        };
        x.push(field(xi, "x")?);
        y.push(field(yi, "y")?);
        if let Some(i) = si {
            s.push(field(i, "sigma_y")?);
        }
    }
    Ok(TraceFile {
        kind,
        x_unit,
        x,
        y,
        sigma_y: si.map(|_| s),
    })
}

pub fn write_trace<W: Write>(
    w: W,
    kind: TraceKind,
    x_unit: &str,
    x: &[f64],
    y: &[f64],
    sigma_y: Option<&[f64]>,
) -> Result<(), CliError> {
    let mut w = w;
    writeln!(w, "# kind={}, x_unit={x_unit}", kind.as_str())?;
    let mut out = csv::Writer::from_writer(w);
    match sigma_y {
        Some(s) => {
            out.write_record(["x", "y", "sigma_y"])?;
            for i in 0..x.len() {
                out.write_record([num(x[i]), num(y[i]), num(s[i])])?;
            }
        }
        None => {
            out.write_record(["x", "y"])?;
            for i in 0..x.len() {
                out.write_record([num(x[i]), num(y[i])])?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// Numeric table with a header row and exactly `cols` columns.
pub fn read_columns(path: &Path, cols: usize) -> Result<Vec<Vec<f64>>, CliError> {
    let name = path.display().to_string();
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(open(path)?);
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CliError::input(format!("{name}: {e}")))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != cols {
            return Err(CliError::input(format!(
                "{name}:{line}: expected {cols} columns, got {}",
                rec.len()
            )));
        }
        let row = rec
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| CliError::input(format!("{name}:{line}: {f:?} is not a number")))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        out.push(row);
    }
    Ok(out)
}

pub fn read_pairs(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    Ok(read_columns(path, 2)?
        .into_iter()
        .map(|r| (r[0], r[1]))
        .collect())
}

/// Shortest representation that round-trips.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:?}")
    } else {
        String::new()
    }
}

/// Writes rows of numbers with a header.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
    let mut out = csv::Writer::from_path(path)?;
    out.write_record(header)?;
    for r in rows {
        out.write_record(r.iter().map(|&v| num(v)))?;
    }
    out.flush()?;
    Ok(())
}

/// Matrix with a corner label, column coordinates in the first row and row
/// coordinates in the first column.
pub fn write_matrix(
    path: &Path,
    corner: &str,
    rows: &[f64],
    cols: &[f64],
    values: &[f64],
) -> Result<(), CliError> {
    let mut out = csv::Writer::from_path(path)?;
    let mut head = vec![corner.to_string()];
    head.extend(cols.iter().map(|&c| num(c)));
    out.write_record(&head)?;
    for (i, &r) in rows.iter().enumerate() {
        let mut rec = vec![num(r)];
        rec.extend(
            values[i * cols.len()..(i + 1) * cols.len()]
                .iter()
                .map(|&v| num(v)),
        );
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}
