//! JSONL experiment records and the tables derived from them.
//!
//! Each record is one JSON object per line with fields in this order:
//! `experiment, kind, N, n, ensemble, normalization, estimates, metrics,
//! wall_seconds, version, config`. Each estimate has fields
//! `statistic, threshold, trials, successes, p_hat, ci_low, ci_high,
//! rule_of_three, discarded, master_seed`. Floats are written in scientific
//! notation with 17 significant digits; non-finite values become `null`.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use sigmin_core::montecarlo::{TailEstimate, TailPoint};

use crate::config::ExperimentConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub experiment: String,
    pub kind: String,
    #[serde(rename = "N")]
    pub rows: usize,
    #[serde(rename = "n")]
    pub cols: usize,
    pub ensemble: String,
    pub normalization: String,
    pub estimates: Vec<EstimateRecord>,
    pub metrics: Vec<Metric>,
    #[serde(with = "sig17")]
    pub wall_seconds: f64,
    pub version: String,
    /// Canonical config block that produced this record.
    pub config: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub statistic: String,
    #[serde(with = "sig17")]
    pub threshold: f64,
    pub trials: u64,
    pub successes: u64,
    #[serde(with = "sig17")]
    pub p_hat: f64,
    #[serde(with = "sig17")]
    pub ci_low: f64,
    #[serde(with = "sig17")]
    pub ci_high: f64,
    #[serde(with = "sig17_opt")]
    pub rule_of_three: Option<f64>,
    pub discarded: u64,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    #[serde(with = "sig17")]
    pub value: f64,
}

impl EstimateRecord {
    pub fn new(statistic: &str, point: &TailPoint) -> Self {
        let e: &TailEstimate = &point.estimate;
        Self {
            statistic: statistic.to_string(),
            threshold: point.threshold,
            trials: e.trials,
            successes: e.successes,
            p_hat: e.p_hat,
            ci_low: e.ci_low,
            ci_high: e.ci_high,
            rule_of_three: e.rule_of_three(),
            discarded: e.discarded_degenerate,
            master_seed: e.master_seed,
        }
    }
}

impl Metric {
    pub fn new(name: impl Into<String>, value: f64) -> Self {
        Self { name: name.into(), value }
    }
}

impl ExperimentRecord {
    pub fn new(config: &ExperimentConfig, estimates: Vec<EstimateRecord>, metrics: Vec<Metric>, wall: f64) -> Self {
        Self {
            experiment: config.name.clone(),
            kind: config.kind.name().to_string(),
            rows: config.rows,
            cols: config.cols,
            ensemble: describe(&config.ensemble),
            normalization: config.normalization.name().to_string(),
            estimates,
            metrics,
            wall_seconds: wall,
            version: VERSION.to_string(),
            config: config.to_text(),
        }
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|m| m.name == name).map(|m| m.value)
    }

    /// Table label of an estimate: the experiment name, suffixed with the
    /// statistic when the record carries more than one.
    pub fn label(&self, estimate: &EstimateRecord) -> String {
        let first = self.estimates.first().map(|e| e.statistic.as_str());
        if self.estimates.iter().all(|e| Some(e.statistic.as_str()) == first) {
            self.experiment.clone()
        } else {
            format!("{}/{}", self.experiment, estimate.statistic)
        }
    }

    /// One JSON line, without the trailing newline.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records always serialize")
    }
}

fn describe(spec: &sigmin_core::EnsembleSpec) -> String {
    use sigmin_core::EnsembleSpec as E;
    match spec {
        E::IndependentColumns(c) => format!("independent_columns({})", describe(c)),
        E::Concatenated { base, copies } => format!("concatenated({}, {copies})", describe(base)),
        other => other.name().to_string(),
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RecordError {
    #[error("line {line}: malformed record: {message}")]
    Malformed { line: usize, message: String },
    #[error("reading records: {0}")]
    Io(#[from] std::io::Error),
}

/// Reads JSONL records, skipping blank lines.
pub fn read_records<R: BufRead>(reader: R) -> Result<Vec<ExperimentRecord>, RecordError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line)
            .map_err(|e| RecordError::Malformed { line: i + 1, message: e.to_string() })?;
        out.push(rec);
    }
    Ok(out)
}

/// A row of the summary table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub experiment: String,
    #[serde(rename = "N")]
    pub rows: usize,
    #[serde(rename = "n")]
    pub cols: usize,
    pub threshold: f64,
    pub normalization: String,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: u64,
    pub discards: u64,
}

pub const SUMMARY_HEADER: [&str; 10] =
    ["experiment", "N", "n", "threshold", "normalization", "p_hat", "ci_low", "ci_high", "trials", "discards"];

/// Every estimate as a row, sorted by `(experiment, N, n, threshold)`.
pub fn summary_rows(records: &[ExperimentRecord]) -> Vec<SummaryRow> {
    let mut rows: Vec<SummaryRow> = records
        .iter()
        .flat_map(|r| {
            r.estimates.iter().map(move |e| SummaryRow {
                experiment: r.label(e),
                rows: r.rows,
                cols: r.cols,
                threshold: e.threshold,
                normalization: r.normalization.clone(),
                p_hat: e.p_hat,
                ci_low: e.ci_low,
                ci_high: e.ci_high,
                trials: e.trials,
                discards: e.discarded,
            })
        })
        .collect();
    rows.sort_by(|a, b| {
        (&a.experiment, a.rows, a.cols)
            .cmp(&(&b.experiment, b.rows, b.cols))
            .then(a.threshold.total_cmp(&b.threshold))
    });
    rows
}

/// Writes the summary table as CSV (header always present).
pub fn write_summary<W: Write>(records: &[ExperimentRecord], out: W, header: bool) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    if header {
        w.write_record(SUMMARY_HEADER)?;
    }
    for row in summary_rows(records) {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// A row of a tail curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveRow {
    pub threshold: f64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// The curve `t ↦ p̂(t)` of one experiment label, taken from the most recent
/// record carrying it, in ascending threshold order. `None` if no record matches.
pub fn tail_curve(records: &[ExperimentRecord], experiment: &str) -> Option<Vec<CurveRow>> {
    let record = records.iter().rev().find(|r| r.estimates.iter().any(|e| r.label(e) == experiment))?;
    let mut rows: Vec<CurveRow> = record
        .estimates
        .iter()
        .filter(|e| record.label(e) == experiment)
        .map(|e| CurveRow { threshold: e.threshold, p_hat: e.p_hat, ci_low: e.ci_low, ci_high: e.ci_high })
        .collect();
    rows.sort_by(|a, b| a.threshold.total_cmp(&b.threshold));
    Some(rows)
}

pub fn write_curve<W: Write>(rows: &[CurveRow], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(["threshold", "p_hat", "ci_low", "ci_high"])?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

mod sig17 {
    use serde::de::Deserializer;
    use serde::ser::{Error, Serializer};
    use serde::{Deserialize, Serialize};
    use serde_json::value::RawValue;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if !v.is_finite() {
            return s.serialize_none();
        }
        RawValue::from_string(format!("{v:.16e}")).map_err(S::Error::custom)?.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

mod sig17_opt {
    use serde::de::Deserializer;
    use serde::ser::Serializer;
    use serde::Deserialize;

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => super::sig17::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Option::<f64>::deserialize(d)
    }
}
