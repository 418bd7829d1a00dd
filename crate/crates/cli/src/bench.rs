//! Runs algorithm sets over a corpus and summarizes achieved ratios.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{exit, CliError, CliResult};
use crate::instance::{build, parse_instances, InstanceFile};
use crate::run::{compatible_algorithms, run, ReportRecord, RunOptions};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSummary {
    pub algorithm: String,
    pub runs: usize,
    pub violations: usize,
    pub errors: usize,
    /// Over runs with a brute-force optimum.
    pub compared: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_ms: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub instances: usize,
    pub runs: usize,
    pub violations: usize,
    pub errors: usize,
    pub algorithms: Vec<AlgorithmSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunFailure {
    pub instance: String,
    pub algorithm: String,
    pub error: String,
    pub exit_code: i32,
}

#[derive(Clone, Debug, Default)]
pub struct BenchOutcome {
    pub summary: BenchSummary,
    /// Sorted by (digest, algorithm).
    pub records: Vec<ReportRecord>,
    pub failures: Vec<RunFailure>,
}

impl BenchOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.summary.violations > 0 {
            exit::BOUND_VIOLATION
        } else {
            self.failures.first().map_or(exit::OK, |f| f.exit_code)
        }
    }
}

/// Every `.jsonl` file under `path` (sorted), or `path` itself if it is a file.
pub fn corpus_files(path: &Path) -> CliResult<Vec<PathBuf>> {
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(path)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    files.sort();
    Ok(files)
}

pub fn load_corpus(path: &Path) -> CliResult<Vec<InstanceFile>> {
    let mut out = Vec::new();
    for file in corpus_files(path)? {
        let text = std::fs::read_to_string(&file)?;
        let parsed = parse_instances(&text).map_err(|e| match e {
            CliError::Parse { line, field, message } => {
                CliError::Parse { line, field, message: format!("{}: {message}", file.display()) }
            }
            other => other,
        })?;
        out.extend(parsed.into_iter().map(|(_, inst)| inst));
    }
    Ok(out)
}

/// Runs each requested algorithm (all compatible ones when `algorithms` is None) on each
/// instance, concurrently. Each run builds its own oracles.
pub fn bench(corpus: &[InstanceFile], algorithms: Option<&[String]>, opts: &RunOptions) -> CliResult<BenchOutcome> {
    let mut jobs = Vec::new();
    for inst in corpus {
        let p = build(inst.clone(), 0)?;
        for a in compatible_algorithms(&p) {
            if algorithms.is_none_or(|want| want.contains(&a)) {
                jobs.push((inst, a));
            }
        }
    }
    let results: Vec<(String, String, String, CliResult<ReportRecord>)> = jobs
        .par_iter()
        .map(|(inst, a)| {
            let res = build((*inst).clone(), 0).and_then(|p| run(&p, a, opts));
            (crate::instance::digest(inst), a.clone(), inst.name.clone(), res)
        })
        .collect();
    let mut records = Vec::new();
    let mut failures = Vec::new();
    let mut ordered = results;
    ordered.sort_by(|x, y| (&x.0, &x.1).cmp(&(&y.0, &y.1)));
    for (_, algorithm, instance, res) in ordered {
        match res {
            Ok(r) => records.push(r),
            Err(e) => failures.push(RunFailure { instance, algorithm, exit_code: e.exit_code(), error: e.to_string() }),
        }
    }
    let mut names: Vec<String> = records.iter().map(|r| r.algorithm.clone()).chain(failures.iter().map(|f| f.algorithm.clone())).collect();
    names.sort_by_key(|n| crate::run::ALGORITHMS.iter().position(|a| a == n));
    names.dedup();
    let algorithms = names
        .into_iter()
        .map(|name| {
            let rs: Vec<&ReportRecord> = records.iter().filter(|r| r.algorithm == name).collect();
            let ratios: Vec<f64> = rs.iter().filter_map(|r| r.ratio).collect();
            let mean = (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64);
            AlgorithmSummary {
                runs: rs.len(),
                violations: rs.iter().filter(|r| !r.ok).count(),
                errors: failures.iter().filter(|f| f.algorithm == name).count(),
                compared: ratios.len(),
                mean_ratio: mean,
                min_ratio: ratios.iter().copied().reduce(f64::min),
                max_ratio: ratios.iter().copied().reduce(f64::max),
                total_ms: opts.timing.then(|| rs.iter().filter_map(|r| r.wall_ms).sum()),
                algorithm: name,
            }
        })
        .collect();
    let summary = BenchSummary {
        instances: corpus.len(),
        runs: records.len() + failures.len(),
        violations: records.iter().filter(|r| !r.ok).count(),
        errors: failures.len(),
        algorithms,
    };
    Ok(BenchOutcome { summary, records, failures })
}

/// Fixed-width table of the summary for terminals.
pub fn render_table(s: &BenchSummary) -> String {
    let fmt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.4}"));
    let mut out = format!(
        "{:<18} {:>5} {:>8} {:>9} {:>6} {:>10} {:>10} {:>10} {:>10}\n",
        "algorithm", "runs", "compared", "violation", "errors", "mean", "min", "max", "ms"
    );
    for a in &s.algorithms {
        out.push_str(&format!(
            "{:<18} {:>5} {:>8} {:>9} {:>6} {:>10} {:>10} {:>10} {:>10}\n",
            a.algorithm,
            a.runs,
            a.compared,
            a.violations,
            a.errors,
            fmt(a.mean_ratio),
            fmt(a.min_ratio),
            fmt(a.max_ratio),
            a.total_ms.map_or("-".to_string(), |t| format!("{t:.1}")),
        ));
    }
    out
}
