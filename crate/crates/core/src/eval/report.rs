use std::io::Write;

use serde::Serialize;

use crate::error::{EcneError, Result};

pub const REPORT_HEADER: &str = "task\tdataset\tmethod\tmetric\tvalue\tstddev\truns";

/// Mean and population standard deviation of one metric over repeated runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub task: String,
    pub dataset: String,
    pub method: String,
    pub metric: String,
    pub value: f64,
    pub stddev: f64,
    pub runs: usize,
}

impl MetricReport {
    pub fn from_runs(task: &str, dataset: &str, method: &str, metric: &str, values: &[f64]) -> Result<MetricReport> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(EcneError::InvalidArgument(format!(
                "{metric} needs at least one finite run value"
            )));
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Ok(MetricReport {
            task: task.to_owned(),
            dataset: dataset.to_owned(),
            method: method.to_owned(),
            metric: metric.to_owned(),
            value: mean,
            stddev: var.sqrt(),
            runs: values.len(),
        })
    }

    pub fn tsv_row(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{:.6}\t{:.6}\t{}",
            self.task, self.dataset, self.method, self.metric, self.value, self.stddev, self.runs
        )
    }
}

pub fn write_report<W: Write>(mut out: W, rows: &[MetricReport]) -> std::io::Result<()> {
    writeln!(out, "{REPORT_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", r.tsv_row())?;
    }
    Ok(())
}
