//! Method-by-image benchmark matrix and its CSV/JSON tables.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use lumen::metrics::{ambe, cii_with_stride, psnr};
use lumen::pipeline::enhance_color;
use lumen::{MethodId, Raster};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::io::{load_image, save_image, Format, Image};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    fn extension(self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunManifest {
    pub corpus_dir: PathBuf,
    pub methods: Vec<MethodId>,
    pub config: RunConfig,
    pub output_dir: PathBuf,
    pub format: ReportFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    Ambe,
    Psnr,
    Cii,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Ambe, Metric::Psnr, Metric::Cii];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Ambe => "AMBE",
            Metric::Psnr => "PSNR",
            Metric::Cii => "CII",
        }
    }
}

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Value(f64),
    Undefined,
    Failed(String),
}

/// Metric values for one (image, method) run, averaged over channels.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub image_id: String,
    pub method: MethodId,
    pub psnr: f64,
    pub ambe: f64,
    pub cii: Option<f64>,
    pub degenerate: bool,
}

impl MetricReport {
    pub fn to_json(&self) -> Value {
        json!({
            "image": self.image_id,
            "method": self.method.name(),
            "psnr": float_json(self.psnr),
            "ambe": float_json(self.ambe),
            "cii": self.cii.map_or(Value::String("undefined".into()), float_json),
            "degenerate": self.degenerate,
        })
    }

    fn cell(&self, metric: Metric) -> Cell {
        match metric {
            Metric::Ambe => Cell::Value(self.ambe),
            Metric::Psnr => Cell::Value(self.psnr),
            Metric::Cii => self.cii.map_or(Cell::Undefined, Cell::Value),
        }
    }
}

/// Finite numbers as JSON numbers, infinity as the string `inf`.
pub fn float_json(v: f64) -> Value {
    if v.is_infinite() && v > 0.0 {
        Value::String("inf".into())
    } else {
        json!(v)
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Channel-averaged metrics between an original and an enhanced image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scores {
    pub psnr: f64,
    pub ambe: f64,
    /// `None` when the original has no measurable contrast.
    pub cii: Option<f64>,
}

impl Scores {
    pub fn to_json(&self) -> Value {
        json!({
            "psnr": float_json(self.psnr),
            "ambe": float_json(self.ambe),
            "cii": self.cii.map_or(Value::String("undefined".into()), float_json),
        })
    }
}

/// Color images are scored per channel and averaged.
pub fn compare(orig: &Image, out: &Image, cii_stride: usize) -> Result<Scores> {
    let (a, b) = (orig.channels(), out.channels());
    if a.len() != b.len() {
        return Err(CliError::Pipeline(lumen::Error::ChannelMismatch));
    }
    let mut p = Vec::new();
    let mut m = Vec::new();
    let mut c = Vec::new();
    for (x, y) in a.iter().zip(&b) {
        p.push(psnr(x, y)?);
        m.push(ambe(x, y)?);
        c.push(cii_with_stride(x, y, cii_stride).ok());
    }
    let cii = c
        .iter()
        .copied()
        .collect::<Option<Vec<f64>>>()
        .map(|v| mean(&v));
    Ok(Scores {
        psnr: mean(&p),
        ambe: mean(&m),
        cii,
    })
}

pub fn score(
    image_id: &str,
    method: MethodId,
    orig: &Image,
    out: &Image,
    cii_stride: usize,
    degenerate: bool,
) -> Result<MetricReport> {
    let s = compare(orig, out, cii_stride)?;
    Ok(MetricReport {
        image_id: image_id.to_string(),
        method,
        psnr: s.psnr,
        ambe: s.ambe,
        cii: s.cii,
        degenerate,
    })
}

/// Runs one method on a gray or color image.
pub fn enhance_image(img: &Image, method: MethodId, cfg: &RunConfig) -> Result<(Image, bool)> {
    match img {
        Image::Gray(r) => {
            let e = lumen::run(method, r, &cfg.pipeline)?;
            Ok((Image::Gray(e.image), e.degenerate))
        }
        Image::Rgb([r, g, b]) => {
            let [er, eg, eb] = enhance_color([r, g, b], method, &cfg.pipeline)?;
            let degenerate = er.degenerate || eg.degenerate || eb.degenerate;
            Ok((Image::Rgb([er.image, eg.image, eb.image]), degenerate))
        }
    }
}

/// Image files in `dir` with a supported extension, sorted by name.
pub fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| CliError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && Format::from_path(p).is_some())
        .collect();
    files.sort();
    Ok(files)
}

/// A metric table: rows are images, columns methods.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkTable {
    pub metric: Metric,
    pub methods: Vec<MethodId>,
    pub rows: Vec<(String, Vec<Cell>)>,
}

impl BenchmarkTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("image");
        for m in &self.methods {
            let _ = write!(s, ",{}", m.name());
        }
        s.push('\n');
        for (image, cells) in &self.rows {
            s.push_str(image);
            for c in cells {
                let _ = match c {
                    Cell::Value(v) if v.is_infinite() => write!(s, ",inf"),
                    Cell::Value(v) => write!(s, ",{v:.2}"),
                    Cell::Undefined => write!(s, ",undefined"),
                    Cell::Failed(r) => write!(s, ",failed:{}", r.replace([',', '\n'], ";")),
                };
            }
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|(image, cells)| {
                let mut m = Map::new();
                for (method, c) in self.methods.iter().zip(cells) {
                    let v = match c {
                        Cell::Value(v) => float_json(*v),
                        Cell::Undefined => Value::String("undefined".into()),
                        Cell::Failed(r) => Value::String(format!("failed:{r}")),
                    };
                    m.insert(method.name().to_string(), v);
                }
                json!({ "image": image, "cells": m })
            })
            .collect();
        json!({
            "metric": self.metric.name(),
            "methods": self.methods.iter().map(|m| m.name()).collect::<Vec<_>>(),
            "rows": rows,
        })
    }

    /// Numeric value of a cell, if any.
    pub fn value(&self, image: &str, method: MethodId) -> Option<f64> {
        let col = self.methods.iter().position(|&m| m == method)?;
        let (_, cells) = self.rows.iter().find(|(i, _)| i == image)?;
        match cells[col] {
            Cell::Value(v) => Some(v),
            _ => None,
        }
    }
}

/// Output of [`run_benchmark`].
#[derive(Debug, Clone)]
pub struct BenchmarkResult {
    pub tables: Vec<BenchmarkTable>,
    pub report_paths: Vec<PathBuf>,
}

type RowResult = std::result::Result<MetricReport, String>;

fn process_one(path: &Path, manifest: &RunManifest) -> Vec<RowResult> {
    let name = path.file_name().unwrap().to_string_lossy().to_string();
    let orig = match load_image(path) {
        Ok(img) => img,
        Err(e) => {
            return manifest
                .methods
                .iter()
                .map(|_| Err(e.to_string()))
                .collect()
        }
    };
    manifest
        .methods
        .iter()
        .map(|&method| {
            let (out, degenerate) =
                enhance_image(&orig, method, &manifest.config).map_err(|e| e.to_string())?;
            let dir = manifest.output_dir.join(method.name());
            fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
            save_image(&out, &dir.join(&name)).map_err(|e| e.to_string())?;
            score(
                &name,
                method,
                &orig,
                &out,
                manifest.config.cii_stride,
                degenerate,
            )
            .map_err(|e| e.to_string())
        })
        .collect()
}

/// Runs every method on every corpus image using up to `jobs` threads and
/// writes the three metric tables into the output directory.
pub fn run_benchmark(manifest: &RunManifest, jobs: usize) -> Result<BenchmarkResult> {
    let files = corpus_files(&manifest.corpus_dir)?;
    if files.is_empty() {
        return Err(CliError::EmptyCorpus(manifest.corpus_dir.clone()));
    }
    fs::create_dir_all(&manifest.output_dir).map_err(|e| CliError::io(&manifest.output_dir, e))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool");
    let results: Vec<Vec<RowResult>> =
        pool.install(|| files.par_iter().map(|p| process_one(p, manifest)).collect());

    let all_failed = results.iter().all(|row| row.iter().all(|r| r.is_err()));
    let names: Vec<String> = files
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().to_string())
        .collect();

    let tables: Vec<BenchmarkTable> = Metric::ALL
        .iter()
        .map(|&metric| BenchmarkTable {
            metric,
            methods: manifest.methods.clone(),
            rows: names
                .iter()
                .zip(&results)
                .map(|(name, row)| {
                    let cells = row
                        .iter()
                        .map(|r| match r {
                            Ok(rep) => rep.cell(metric),
                            Err(e) => Cell::Failed(e.clone()),
                        })
                        .collect();
                    (name.clone(), cells)
                })
                .collect(),
        })
        .collect();

    let mut report_paths = Vec::new();
    for t in &tables {
        let path = manifest.output_dir.join(format!(
            "{}.{}",
            t.metric.name().to_ascii_lowercase(),
            manifest.format.extension()
        ));
        let body = match manifest.format {
            ReportFormat::Csv => t.to_csv(),
            ReportFormat::Json => {
                let mut s = serde_json::to_string_pretty(&t.to_json()).expect("serializable");
                s.push('\n');
                s
            }
        };
        fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
        report_paths.push(path);
    }

    if all_failed {
        return Err(CliError::AllFailed);
    }
    Ok(BenchmarkResult {
        tables,
        report_paths,
    })
}

/// Convenience for tests and tools: enhance one gray image and score it.
pub fn score_gray(
    image_id: &str,
    method: MethodId,
    img: &Raster,
    cfg: &RunConfig,
) -> Result<MetricReport> {
    let (out, degenerate) = enhance_image(&Image::Gray(img.clone()), method, cfg)?;
    score(
        image_id,
        method,
        &Image::Gray(img.clone()),
        &out,
        cfg.cii_stride,
        degenerate,
    )
}
