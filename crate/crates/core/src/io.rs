//! CSV and JSON output. Every float is written with 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{Error, Result};
use crate::field::{FrequencyGrid, SpectralField, Trajectory};

/// `{:.16e}` formatting: 17 significant digits, valid as a JSON number.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

struct SigDigitsFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for SigDigitsFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            writer.write_all(fmt_f64(value).as_bytes())
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

/// Pretty JSON with 17-significant-digit floats; non-finite floats become `null`.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigitsFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json_string(value)?)?;
    Ok(())
}

/// CSV text with a header row and float cells.
pub fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(fmt_f64).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

pub fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    fs::write(path, csv_string(header, rows))?;
    Ok(())
}

/// Field as CSV with columns `xi,re,im`.
pub fn field_csv(field: &SpectralField) -> String {
    let grid = field.grid();
    csv_string(
        &["xi", "re", "im"],
        field
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| vec![grid.node(k), c.re, c.im]),
    )
}

/// Parses the `xi,re,im` CSV written by [`field_csv`] back onto `grid`.
pub fn parse_field_csv(grid: FrequencyGrid, text: &str, real: bool) -> Result<SpectralField> {
    let mut coeffs = Vec::with_capacity(grid.n);
    for (line_no, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 3 {
            return Err(Error::Parse(format!("line {}: expected 3 columns", line_no + 1)));
        }
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", line_no + 1)))
        };
        let xi = num(cells[0])?;
        let k = coeffs.len();
        if k >= grid.n || (xi - grid.node(k)).abs() > 1e-9 * grid.dxi.max(1.0) {
            return Err(Error::Parse(format!("line {}: xi = {xi} is not grid node {k}", line_no + 1)));
        }
        coeffs.push(num_complex::Complex64::new(num(cells[1])?, num(cells[2])?));
    }
    SpectralField::new(grid, coeffs, real)
}

#[derive(Serialize)]
struct TrajectoryIndex<'a> {
    t_values: Vec<f64>,
    grid: &'a FrequencyGrid,
    files: Vec<String>,
}

/// Writes `snapshot_XXXX.csv` per sample plus `index.json` `{t_values, grid, files}`.
pub fn write_trajectory(dir: &Path, traj: &Trajectory) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::with_capacity(traj.len());
    for (i, (_, field)) in traj.samples().iter().enumerate() {
        let name = format!("snapshot_{i:04}.csv");
        fs::write(dir.join(&name), field_csv(field))?;
        files.push(name);
    }
    let index = TrajectoryIndex {
        t_values: traj.times(),
        grid: traj.grid(),
        files,
    };
    write_json(&dir.join("index.json"), &index)
}
