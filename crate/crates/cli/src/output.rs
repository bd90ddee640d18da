//! CSV tables and grayscale heatmaps.
//!
//! Floats are written in `{:.16e}` so every file round-trips exactly. Heatmaps
//! map the field minimum to 0 and the maximum to 255; the range goes to a JSON
//! sidecar so the image can be read back quantitatively.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use helmrecon_core::{BoundaryTrace, Complex64, ComplexField, Grid, PotentialField};
use serde::Serialize;

use crate::error::{io_err, CliError};

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Collects written paths so they can be listed in the manifest.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    png: bool,
    written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(root: &Path, png: bool) -> Result<Self, CliError> {
        std::fs::create_dir_all(root).map_err(io_err(root))?;
        Ok(Self { root: root.to_path_buf(), png, written: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    fn record(&mut self, path: PathBuf) {
        self.written.push(path.strip_prefix(&self.root).map(Path::to_path_buf).unwrap_or(path));
    }

    pub fn csv<I, R>(&mut self, name: &str, header: &[&str], rows: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = String>,
    {
        let path = self.path(name);
        let mut w = csv::Writer::from_path(&path).map_err(|e| csv_err(&path, e))?;
        w.write_record(header).map_err(|e| csv_err(&path, e))?;
        for row in rows {
            w.write_record(row).map_err(|e| csv_err(&path, e))?;
        }
        w.flush().map_err(io_err(&path))?;
        self.record(path);
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let path = self.path(name);
        let text = serde_json::to_string_pretty(value).expect("plain data serializes");
        std::fs::write(&path, text + "\n").map_err(io_err(&path))?;
        self.record(path);
        Ok(())
    }

    /// Lattice dump of a real field: `i, j, x, y, value`.
    pub fn real_grid(&mut self, name: &str, field: &PotentialField) -> Result<(), CliError> {
        let g = field.grid();
        let rows =
            lattice(g).map(|(i, j, x)| vec![i.to_string(), j.to_string(), num(x[0]), num(x[1]), num(field.at(i, j))]);
        self.csv(name, &["i", "j", "x", "y", "value"], rows)
    }

    /// Lattice dump of a complex field: `i, j, x, y, re, im`; zero outside the disk.
    pub fn complex_grid(&mut self, name: &str, field: &ComplexField) -> Result<(), CliError> {
        let g = field.grid();
        let rows = lattice(g).map(|(i, j, x)| {
            let v = complex_at(field, i, j);
            vec![i.to_string(), j.to_string(), num(x[0]), num(x[1]), num(v.re), num(v.im)]
        });
        self.csv(name, &["i", "j", "x", "y", "re", "im"], rows)
    }

    /// Boundary samples: `index, angle, x, y, re, im`.
    pub fn trace(&mut self, name: &str, trace: &BoundaryTrace) -> Result<(), CliError> {
        let b = &trace.boundary;
        let rows = trace.values.iter().enumerate().map(|(q, v)| {
            vec![q.to_string(), num(b.angles[q]), num(b.points[q][0]), num(b.points[q][1]), num(v.re), num(v.im)]
        });
        self.csv(name, &["index", "angle", "x", "y", "re", "im"], rows)
    }

    /// Writes `stem.pgm`, `stem.range.json` and optionally `stem.png`.
    pub fn heatmap(&mut self, stem: &str, grid: &Grid, value: impl Fn(usize, usize) -> f64) -> Result<(), CliError> {
        let n = grid.n_per_side();
        let image = Heatmap::render(n, value);
        let pgm = self.path(&format!("{stem}.pgm"));
        let mut w = BufWriter::new(File::create(&pgm).map_err(io_err(&pgm))?);
        write!(w, "P5\n{n} {n}\n255\n").map_err(io_err(&pgm))?;
        w.write_all(&image.pixels).map_err(io_err(&pgm))?;
        w.flush().map_err(io_err(&pgm))?;
        self.record(pgm);
        if self.png {
            let path = self.path(&format!("{stem}.png"));
            write_png(&path, n, &image.pixels)?;
            self.record(path);
        }
        self.json(&format!("{stem}.range.json"), &image.range)
    }

    pub fn real_heatmap(&mut self, stem: &str, field: &PotentialField) -> Result<(), CliError> {
        self.heatmap(stem, field.grid(), |i, j| field.at(i, j))
    }

    pub fn complex_heatmap(&mut self, stem: &str, field: &ComplexField) -> Result<(), CliError> {
        self.heatmap(stem, field.grid(), |i, j| complex_at(field, i, j).re)
    }
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    CliError::Io { path: path.into(), source: e.into() }
}

fn lattice(g: &Grid) -> impl Iterator<Item = (usize, usize, [f64; 2])> + '_ {
    let n = g.n_per_side();
    (0..n).flat_map(move |j| (0..n).map(move |i| (i, j, g.node_position(i, j))))
}

fn complex_at(field: &ComplexField, i: usize, j: usize) -> Complex64 {
    field.grid().unknown(i, j).map_or(Complex64::new(0.0, 0.0), |p| field.values[p])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrayRange {
    /// Value drawn as gray level 0.
    pub min: f64,
    /// Value drawn as gray level 255.
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    /// Row-major, first row at the top (largest y).
    pub pixels: Vec<u8>,
    pub range: GrayRange,
}

impl Heatmap {
    pub fn render(n: usize, value: impl Fn(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(n * n);
        for row in 0..n {
            let j = n - 1 - row;
            values.extend((0..n).map(|i| value(i, j)));
        }
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let span = max - min;
        let pixels =
            values.iter().map(|v| if span > 0.0 { (255.0 * (v - min) / span).round() as u8 } else { 0 }).collect();
        Self { pixels, range: GrayRange { min, max } }
    }
}

fn write_png(path: &Path, n: usize, pixels: &[u8]) -> Result<(), CliError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut encoder = png::Encoder::new(BufWriter::new(file), n as u32, n as u32);
    encoder.set_color(png::ColorType::Grayscale);
    encoder.set_depth(png::BitDepth::Eight);
    let to_io = |e: png::EncodingError| CliError::Io { path: path.into(), source: std::io::Error::other(e) };
    let mut writer = encoder.write_header().map_err(to_io)?;
    writer.write_image_data(pixels).map_err(to_io)?;
    writer.finish().map_err(to_io)
}
