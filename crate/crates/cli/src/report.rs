//! Scan reports.
//!
//! JSON Lines: one `header` line (timestamp, the only non-deterministic
//! content), one `meta` line, then `record` and `failure` lines in sample
//! order, then a single `summary` line. The CSV form carries the same data
//! with `header`, `meta`, `failure` and `summary` as `#` comment lines.

use std::io::Write;

use sepcurv::curvature::{CurvatureReport, CurvatureSample, PlaneKind, Verdict};
use sepcurv::geometry::SampleFailure;
use sepcurv::Tolerances;
use serde::Serialize;

use crate::Format;

pub const REPORT_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct Meta {
    pub format_version: u32,
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub input: String,
    pub input_sha256: String,
    pub surface: String,
    pub n: usize,
    /// 1-based.
    pub height: usize,
    pub seed: u64,
    pub requested_points: usize,
    pub coordinate_pairs: bool,
    pub oblique_planes: usize,
    pub target_k: Option<f64>,
    pub tolerances: Tolerances<f64>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum Plane {
    /// 1-based coordinate indices.
    Pair {
        pair: [usize; 2],
    },
    Oblique {
        u: Vec<f64>,
        w: Vec<f64>,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub point: usize,
    pub coords: Vec<f64>,
    pub plane: Plane,
    pub k_special: Option<f64>,
    pub k_oracle: f64,
    pub residual_flat: Option<f64>,
    pub residual_constk: Option<f64>,
    pub flagged: bool,
}

impl Record {
    pub fn from_sample(s: &CurvatureSample<f64>) -> Self {
        let plane = match &s.plane {
            PlaneKind::Coordinate(i, j) => Plane::Pair {
                pair: [i + 1, j + 1],
            },
            PlaneKind::Oblique(sec) => Plane::Oblique {
                u: sec.u.clone(),
                w: sec.w.clone(),
            },
        };
        Record {
            point: s.point_index,
            coords: s.point.coords().to_vec(),
            plane,
            k_special: s.k_special,
            k_oracle: s.k_oracle,
            residual_flat: s.residual_flat,
            residual_constk: s.residual_constk,
            flagged: s.flagged,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    /// The height solve for a random draw failed; `point` counts draws.
    Sample,
    /// A lifted point failed during curvature evaluation.
    Scan,
}

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub stage: Stage,
    pub point: usize,
    pub coords: Vec<f64>,
    pub error: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SummaryLine {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub spread: f64,
    pub verdict: &'static str,
    /// Mean, snapped to 0 when within the constancy tolerance; absent for
    /// non-constant verdicts.
    pub estimate: Option<f64>,
    pub regular_points: usize,
    pub failed_points: usize,
    pub flagged: usize,
    pub max_equivalence_gap: f64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Line<'a> {
    Header { generated_at: &'a str },
    Meta(&'a Meta),
    Record(&'a Record),
    Failure(&'a Failure),
    Summary(&'a SummaryLine),
}

/// Everything a report file holds.
#[derive(Clone, Debug)]
pub struct ScanReport {
    pub generated_at: String,
    pub meta: Meta,
    pub records: Vec<Record>,
    pub failures: Vec<Failure>,
    pub summary: SummaryLine,
}

/// The value shown after `verdict:`.
pub fn verdict_text(summary: &SummaryLine) -> String {
    match summary.estimate {
        Some(k) => format!("constant {k}"),
        None => format!("non-constant (spread {:e})", summary.spread),
    }
}

impl ScanReport {
    pub fn new(
        generated_at: String,
        meta: Meta,
        report: &CurvatureReport<f64>,
        sample_failures: &[SampleFailure<f64>],
    ) -> Self {
        let records = report.records.iter().map(Record::from_sample).collect();
        let mut failures: Vec<Failure> = sample_failures
            .iter()
            .enumerate()
            .map(|(k, f)| Failure {
                stage: Stage::Sample,
                point: k,
                coords: f.partial.clone(),
                error: f.error.to_string(),
            })
            .collect();
        failures.extend(report.failures.iter().map(|f| Failure {
            stage: Stage::Scan,
            point: f.point_index,
            coords: Vec::new(),
            error: f.error.to_string(),
        }));
        let s = &report.summary;
        let (verdict, estimate) = match report.verdict {
            Verdict::Constant { estimate } => (
                "constant",
                Some(if estimate.abs() <= report.constancy_tol {
                    0.0
                } else {
                    estimate
                }),
            ),
            Verdict::NonConstant { .. } => ("non-constant", None),
        };
        let summary = SummaryLine {
            count: s.count,
            min: s.min,
            max: s.max,
            mean: s.mean,
            spread: s.spread,
            verdict,
            estimate,
            regular_points: report.regular_points(),
            failed_points: report.failures.len(),
            flagged: report.flagged,
            max_equivalence_gap: report.max_equivalence_gap(),
        };
        ScanReport {
            generated_at,
            meta,
            records,
            failures,
            summary,
        }
    }

    pub fn write(&self, format: Format, w: &mut dyn Write) -> std::io::Result<()> {
        match format {
            Format::Json => self.write_jsonl(w),
            Format::Csv => self.write_csv(w),
        }
    }

    fn write_jsonl(&self, w: &mut dyn Write) -> std::io::Result<()> {
        let mut line = |l: Line| -> std::io::Result<()> {
            serde_json::to_writer(&mut *w, &l)?;
            w.write_all(b"\n")
        };
        line(Line::Header {
            generated_at: &self.generated_at,
        })?;
        line(Line::Meta(&self.meta))?;
        for r in &self.records {
            line(Line::Record(r))?;
        }
        for f in &self.failures {
            line(Line::Failure(f))?;
        }
        line(Line::Summary(&self.summary))
    }

    fn write_csv(&self, w: &mut dyn Write) -> std::io::Result<()> {
        writeln!(
            w,
            "# header {}",
            json(&serde_json::json!({ "generated_at": self.generated_at }))
        )?;
        writeln!(w, "# meta {}", json(&self.meta))?;
        write_csv_rows(&self.records, w)?;
        for f in &self.failures {
            writeln!(w, "# failure {}", json(f))?;
        }
        writeln!(w, "# summary {}", json(&self.summary))
    }
}

/// Records alone: one JSON object per line, or a CSV table with header.
pub fn write_records(records: &[Record], format: Format, w: &mut dyn Write) -> std::io::Result<()> {
    match format {
        Format::Json => {
            for r in records {
                serde_json::to_writer(&mut *w, &Line::Record(r))?;
                w.write_all(b"\n")?;
            }
            Ok(())
        }
        Format::Csv => write_csv_rows(records, w),
    }
}

fn write_csv_rows(records: &[Record], w: &mut dyn Write) -> std::io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "point",
        "plane",
        "i",
        "j",
        "coords",
        "u",
        "w",
        "k_special",
        "k_oracle",
        "residual_flat",
        "residual_constk",
        "flagged",
    ])?;
    let num = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let list = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(";");
    for r in records {
        let (kind, i, j, u, wv) = match &r.plane {
            Plane::Pair { pair } => (
                "pair",
                pair[0].to_string(),
                pair[1].to_string(),
                String::new(),
                String::new(),
            ),
            Plane::Oblique { u, w } => ("oblique", String::new(), String::new(), list(u), list(w)),
        };
        out.write_record([
            r.point.to_string(),
            kind.to_string(),
            i,
            j,
            list(&r.coords),
            u,
            wv,
            num(r.k_special),
            r.k_oracle.to_string(),
            num(r.residual_flat),
            num(r.residual_constk),
            r.flagged.to_string(),
        ])?;
    }
    out.flush()
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("report values serialize")
}

/// UTC timestamp for the header line.
pub fn timestamp() -> String {
    time::OffsetDateTime::now_utc()
        .format(&time::format_description::well_known::Rfc3339)
        .unwrap_or_else(|_| "unknown".into())
}

/// Report text without the header line, for determinism comparisons.
pub fn body(text: &str) -> &str {
    let first_is_header = text.starts_with("{\"kind\":\"header\"") || text.starts_with("# header");
    match text.split_once('\n') {
        Some((_, rest)) if first_is_header => rest,
        _ => text,
    }
}
