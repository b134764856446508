//! File formats: cohort CSV with JSON ground-truth sidecar, score/ranking
//! CSVs, model and extraction JSON records, and per-replication metric
//! reports. Floats are written in shortest round-trip decimal form.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::lingam::{ErrorExtraction, StandardizationParams};
use crate::rci::{LogisticModel, Ranking, ShapleyMatrix};
use crate::sem::{ErrorDist, GroundTruthSem};

/// Writes `X1,…,Xp,D` rows, one sample per row.
pub fn write_cohort_csv(path: &Path, data: &DataMatrix, labels: &[u8]) -> Result<()> {
    if labels.len() != data.nrows() {
        return Err(Error::DimensionMismatch {
            context: "label vector length",
            expected: data.nrows(),
            actual: labels.len(),
        });
    }
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    let mut header: Vec<String> = data.names.clone();
    header.push("D".to_string());
    w.write_record(&header)?;
    for (k, &label) in labels.iter().enumerate() {
        let mut record: Vec<String> = Vec::with_capacity(data.ncols() + 1);
        for j in 0..data.ncols() {
            record.push(format!("{}", data.values[[k, j]]));
        }
        record.push(format!("{label}"));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a labeled CSV: every column except `label_col` becomes a variable,
/// in file order; the label column must be binary {0,1}.
pub fn read_cohort_csv(path: &Path, label_col: &str) -> Result<(DataMatrix, Vec<u8>)> {
    let mut r = csv::Reader::from_reader(BufReader::new(File::open(path)?));
    let header = r.headers()?.clone();
    let label_idx = header
        .iter()
        .position(|h| h == label_col)
        .ok_or_else(|| Error::Input(format!("label column `{label_col}` not found in header")))?;
    let names: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != label_idx)
        .map(|(_, h)| h.to_string())
        .collect();

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<u8> = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record?;
        if record.len() != header.len() {
            return Err(Error::Input(format!(
                "row {} has {} fields, expected {}",
                line + 2,
                record.len(),
                header.len()
            )));
        }
        let mut row = Vec::with_capacity(names.len());
        for (i, field) in record.iter().enumerate() {
            if i == label_idx {
                let v: f64 = field.parse().map_err(|_| {
                    Error::Input(format!("row {}: label `{field}` is not numeric", line + 2))
                })?;
                if v == 0.0 {
                    labels.push(0);
                } else if v == 1.0 {
                    labels.push(1);
                } else {
                    return Err(Error::Input(format!(
                        "row {}: label `{field}` is not binary {{0,1}}",
                        line + 2
                    )));
                }
            } else {
                let v: f64 = field.parse().map_err(|_| {
                    Error::Input(format!(
                        "row {}: field `{field}` in column {} is not numeric",
                        line + 2,
                        header.get(i).unwrap_or("?")
                    ))
                })?;
                row.push(v);
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Input("no data rows".into()));
    }
    let n = rows.len();
    let p = names.len();
    let mut values = Array2::zeros((n, p));
    for (k, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            values[[k, j]] = v;
        }
    }
    Ok((DataMatrix { values, names }, labels))
}

/// Ground-truth sidecar persisting the generating model.
#[derive(Debug, Serialize, Deserialize)]
pub struct SemRecord {
    pub theta: Vec<Vec<f64>>,
    pub beta: Vec<f64>,
    pub alpha: f64,
    pub error_dists: Vec<ErrorDist>,
    pub seed: u64,
}

impl From<&GroundTruthSem> for SemRecord {
    fn from(sem: &GroundTruthSem) -> Self {
        let p = sem.p();
        let theta = (0..p)
            .map(|i| (0..p).map(|j| sem.theta[[i, j]]).collect())
            .collect();
        SemRecord {
            theta,
            beta: sem.beta.to_vec(),
            alpha: sem.alpha,
            error_dists: sem.error_dists.clone(),
            seed: sem.seed,
        }
    }
}

impl SemRecord {
    pub fn into_sem(self) -> Result<GroundTruthSem> {
        let p = self.theta.len();
        let mut theta = Array2::zeros((p, p));
        for (i, row) in self.theta.iter().enumerate() {
            if row.len() != p {
                return Err(Error::Input("theta record is not square".into()));
            }
            for (j, &v) in row.iter().enumerate() {
                theta[[i, j]] = v;
            }
        }
        GroundTruthSem::from_parts(
            theta,
            Array1::from_vec(self.beta),
            self.alpha,
            self.error_dists,
            self.seed,
        )
    }
}

pub fn write_sem_json(path: &Path, sem: &GroundTruthSem) -> Result<()> {
    write_json_pretty(path, &SemRecord::from(sem))
}

pub fn read_sem_json(path: &Path) -> Result<GroundTruthSem> {
    let record: SemRecord = serde_json::from_reader(BufReader::new(File::open(path)?))?;
    record.into_sem()
}

/// Writes `sample_id,S_X1,…,S_Xp` score rows.
pub fn write_scores_csv(path: &Path, scores: &ShapleyMatrix, names: &[String]) -> Result<()> {
    let (n, p) = scores.scores.dim();
    if names.len() != p {
        return Err(Error::DimensionMismatch {
            context: "score column names",
            expected: p,
            actual: names.len(),
        });
    }
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    let mut header = vec!["sample_id".to_string()];
    header.extend(names.iter().map(|n| format!("S_{n}")));
    w.write_record(&header)?;
    for k in 0..n {
        let mut record = vec![format!("{}", scores.sample_ids[k])];
        for j in 0..p {
            record.push(format!("{}", scores.scores[[k, j]]));
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `sample_id,rank1,…,rankp` rows of variable names, best first.
pub fn write_rankings_csv(
    path: &Path,
    rankings: &[Ranking],
    sample_ids: &[usize],
    names: &[String],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    let mut header = vec!["sample_id".to_string()];
    header.extend((1..=names.len()).map(|i| format!("rank{i}")));
    w.write_record(&header)?;
    for (ranking, &id) in rankings.iter().zip(sample_ids) {
        let mut record = vec![format!("{id}")];
        record.extend(ranking.order.iter().map(|&v| names[v].clone()));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Fitted-model record `{delta, intercept, kept_indices}`.
#[derive(Debug, Serialize, Deserialize)]
pub struct ModelRecord {
    pub delta: Vec<f64>,
    pub intercept: f64,
    pub kept_indices: Vec<usize>,
}

pub fn write_model_json(path: &Path, model: &LogisticModel, kept: &[usize]) -> Result<()> {
    write_json_pretty(
        path,
        &ModelRecord {
            delta: model.delta.clone(),
            intercept: model.intercept,
            kept_indices: kept.to_vec(),
        },
    )
}

/// Extraction record `{order, unmixing (row-major), means, stddevs}`.
#[derive(Debug, Serialize, Deserialize)]
pub struct ExtractionRecord {
    pub order: Vec<usize>,
    pub unmixing: Vec<f64>,
    pub means: Vec<f64>,
    pub stddevs: Vec<f64>,
}

impl From<&ErrorExtraction> for ExtractionRecord {
    fn from(ex: &ErrorExtraction) -> Self {
        let p = ex.standardization.p();
        let mut unmixing = Vec::with_capacity(p * p);
        for i in 0..p {
            for j in 0..p {
                unmixing.push(ex.unmixing[[i, j]]);
            }
        }
        ExtractionRecord {
            order: ex.order.clone(),
            unmixing,
            means: ex.standardization.means.clone(),
            stddevs: ex.standardization.stddevs.clone(),
        }
    }
}

impl ExtractionRecord {
    /// Rebuilds an applicable extraction; the stored training errors are not
    /// part of the record, so `errors` comes back empty.
    pub fn into_extraction(self) -> Result<ErrorExtraction> {
        let p = self.means.len();
        if self.stddevs.len() != p || self.unmixing.len() != p * p {
            return Err(Error::Input("inconsistent extraction record shapes".into()));
        }
        let unmixing = Array2::from_shape_vec((p, p), self.unmixing)
            .map_err(|e| Error::Input(format!("unmixing: {e}")))?;
        Ok(ErrorExtraction {
            order: self.order,
            unmixing,
            errors: Array2::zeros((0, 0)),
            standardization: StandardizationParams {
                means: self.means,
                stddevs: self.stddevs,
            },
            measure_evals: 0,
        })
    }
}

pub fn write_extraction_json(path: &Path, ex: &ErrorExtraction) -> Result<()> {
    write_json_pretty(path, &ExtractionRecord::from(ex))
}

pub fn read_extraction_json(path: &Path) -> Result<ErrorExtraction> {
    let record: ExtractionRecord = serde_json::from_reader(BufReader::new(File::open(path)?))?;
    record.into_extraction()
}

/// One method's metrics on one replication.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricReport {
    pub method: String,
    pub n: usize,
    pub p: usize,
    pub replication: usize,
    pub rbo_weighted: f64,
    pub rbo_unweighted: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mse: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_seconds: Option<f64>,
}

pub fn write_json_pretty<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sem::{generate_sem, sample_cohort};

    #[test]
    fn cohort_roundtrip_is_exact() {
        let dir = std::env::temp_dir().join("rci_core_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cohort.csv");

        let sem = generate_sem(4, 2.0, 1).unwrap();
        let cohort = sample_cohort(&sem, 50, 2).unwrap();
        let data = DataMatrix::from_values(cohort.data.clone());
        write_cohort_csv(&path, &data, &cohort.labels).unwrap();

        let (back, labels) = read_cohort_csv(&path, "D").unwrap();
        assert_eq!(back.names, data.names);
        assert_eq!(labels, cohort.labels);
        assert_eq!(back.values, data.values); // round-trip decimal formatting
    }

    #[test]
    fn missing_label_column_is_reported() {
        let dir = std::env::temp_dir().join("rci_core_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("nolabel.csv");
        std::fs::write(&path, "A,B\n1.0,2.0\n").unwrap();
        let err = read_cohort_csv(&path, "D").unwrap_err();
        assert!(err.to_string().contains("label column"));
    }

    #[test]
    fn non_binary_labels_are_rejected() {
        let dir = std::env::temp_dir().join("rci_core_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("badlabel.csv");
        std::fs::write(&path, "X1,D\n1.0,2\n").unwrap();
        assert!(read_cohort_csv(&path, "D").is_err());
    }

    #[test]
    fn sem_sidecar_roundtrip() {
        let dir = std::env::temp_dir().join("rci_core_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("sem.json");
        let sem = generate_sem(5, 2.0, 77).unwrap();
        write_sem_json(&path, &sem).unwrap();
        let back = read_sem_json(&path).unwrap();
        assert_eq!(back.theta, sem.theta);
        assert_eq!(back.beta, sem.beta);
        assert_eq!(back.error_dists, sem.error_dists);
        assert_eq!(back.seed, sem.seed);
    }
}
