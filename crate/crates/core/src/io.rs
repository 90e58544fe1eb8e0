//! File formats: model JSON, instance and dataset CSV, explanation and
//! heuristic JSON lines.
//!
//! Feature numbers in every external format are 1-based.

use std::io::{BufRead, Read};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::explain::PiExplanation;
use crate::nbc::{LabeledDataset, NbcModel};
use crate::problem::ExplanationProblem;
use crate::xlc::{ClassLabel, Instance, XlcModel};

/// Either model format. NBCs are explained through their XLC reduction.
#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    Xlc(XlcModel),
    Nbc(NbcModel),
}

impl Model {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("model JSON: {e}")))?;
        let parsed = if value.get("priors").is_some() {
            serde_json::from_value(value).map(Model::Nbc)
        } else {
            serde_json::from_value(value).map(Model::Xlc)
        };
        parsed.map_err(|e| Error::Parse(format!("model JSON: {e}")))
    }

    pub fn from_reader<R: Read>(mut reader: R) -> Result<Self> {
        let mut text = String::new();
        reader
            .read_to_string(&mut text)
            .map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json_str(&text)
    }

    pub fn to_xlc(&self) -> XlcModel {
        match self {
            Model::Xlc(m) => m.clone(),
            Model::Nbc(m) => m.reduce_to_xlc(),
        }
    }

    pub fn num_features(&self) -> usize {
        match self {
            Model::Xlc(m) => m.num_features(),
            Model::Nbc(m) => m.num_features(),
        }
    }

    /// The model's own classification rule.
    pub fn predict(&self, instance: &Instance) -> Result<ClassLabel> {
        match self {
            Model::Xlc(m) => m.decide(instance),
            Model::Nbc(m) => m.predict(instance),
        }
    }
}

/// One data row: its 1-based line number in the file and the parsed
/// instance, or the reason it was rejected.
#[derive(Debug)]
pub struct InstanceRow {
    pub line: usize,
    pub instance: Result<Instance>,
}

fn parse_number(field: &str) -> Option<f64> {
    field.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

fn is_label(field: &str) -> bool {
    field.trim().parse::<ClassLabel>().is_ok()
}

fn instance_from_fields(fields: &[&str], num_features: usize) -> Result<Instance> {
    let fields = if fields.len() == num_features + 1 && is_label(fields[num_features]) {
        &fields[..num_features]
    } else {
        fields
    };
    let values = fields
        .iter()
        .enumerate()
        .map(|(j, f)| {
            parse_number(f)
                .ok_or_else(|| Error::Parse(format!("feature {}: {f:?} is not a number", j + 1)))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Instance::new(values))
}

/// Reads instances, one per line, as JSON arrays or CSV rows.
///
/// A CSV header is recognised as a first row with a non-numeric feature
/// field and skipped. A trailing class label column is ignored. Blank lines
/// are skipped.
pub fn read_instances<R: BufRead>(reader: R, num_features: usize) -> Result<Vec<InstanceRow>> {
    let mut rows = Vec::new();
    let mut first = true;
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse(e.to_string()))?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let line_no = i + 1;
        let instance = if text.starts_with('[') {
            serde_json::from_str::<Vec<f64>>(text)
                .map(Instance::new)
                .map_err(|e| Error::Parse(format!("instance JSON: {e}")))
        } else {
            let fields: Vec<&str> = text.split(',').collect();
            let parsed = instance_from_fields(&fields, num_features);
            if first
                && parsed.is_err()
                && fields
                    .iter()
                    .take(num_features)
                    .any(|f| parse_number(f).is_none())
            {
                first = false;
                continue;
            }
            parsed
        };
        first = false;
        rows.push(InstanceRow {
            line: line_no,
            instance,
        });
    }
    Ok(rows)
}

/// Reads a training CSV: header row, 1-based categorical values, last
/// column the class (`+` or `-`).
pub fn read_dataset<R: Read>(reader: R, declared: Option<Vec<usize>>) -> Result<LabeledDataset> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for record in csv.records() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let Some((label, values)) = record
            .iter()
            .collect::<Vec<_>>()
            .split_last()
            .map(|(l, v)| (*l, v.to_vec()))
        else {
            continue;
        };
        let label: ClassLabel = label
            .parse()
            .map_err(|e| Error::InvalidDataset(format!("line {line}: {e}")))?;
        let values = values
            .iter()
            .map(|v| {
                v.parse::<usize>().map_err(|_| {
                    Error::InvalidDataset(format!("line {line}: {v:?} is not a 1-based category"))
                })
            })
            .collect::<Result<Vec<usize>>>()?;
        rows.push(values);
        labels.push(label);
    }
    LabeledDataset::new(rows, labels, declared)
}

/// One line of explanation output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExplanationRecord {
    pub instance_id: u64,
    pub class: ClassLabel,
    pub size: usize,
    pub features: Vec<usize>,
    pub literals: Vec<String>,
}

impl ExplanationRecord {
    pub fn new(
        instance_id: u64,
        problem: &ExplanationProblem,
        explanation: &PiExplanation,
    ) -> Self {
        ExplanationRecord {
            instance_id,
            class: problem.target(),
            size: explanation.cardinality(),
            features: explanation.features().iter().map(|j| j + 1).collect(),
            literals: explanation
                .literals(problem)
                .iter()
                .map(ToString::to_string)
                .collect(),
        }
    }
}

/// A heuristic explanation produced by another tool.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeuristicRecord {
    pub instance_id: u64,
    pub features: Vec<usize>,
}

impl HeuristicRecord {
    /// 0-based features; rejects feature number 0.
    pub fn zero_based(&self) -> Result<Vec<usize>> {
        self.features
            .iter()
            .map(|&f| {
                f.checked_sub(1)
                    .ok_or_else(|| Error::Parse("feature numbers are 1-based".into()))
            })
            .collect()
    }
}

pub fn read_heuristics<R: BufRead>(reader: R) -> Result<Vec<HeuristicRecord>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line)
            .map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
        out.push(record);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_model_kind() {
        let xlc = r#"{"bias":-2.5,"features":[{"kind":"categorical","values":[3,0]}]}"#;
        assert!(matches!(Model::from_json_str(xlc).unwrap(), Model::Xlc(_)));
        let nbc = r#"{"priors":{"plus":0.5,"minus":0.5},"features":[{"domain":2,"cond_plus":[0.2,0.8],"cond_minus":[0.8,0.2]}],"big_m":-20,"threshold":20}"#;
        let m = Model::from_json_str(nbc).unwrap();
        assert!(matches!(m, Model::Nbc(_)));
        assert_eq!(m.to_xlc().num_features(), 1);
        assert!(Model::from_json_str("{").is_err());
    }

    #[test]
    fn instances_from_csv_and_json() {
        let text = "a,b,class\n1,2,+\n\n[2, 1]\n1,x\n2,2\n";
        let rows = read_instances(text.as_bytes(), 2).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].line, 2);
        assert_eq!(rows[0].instance.as_ref().unwrap().values(), &[1.0, 2.0]);
        assert_eq!(rows[1].instance.as_ref().unwrap().values(), &[2.0, 1.0]);
        assert!(rows[2].instance.is_err());
        assert_eq!(rows[2].line, 5);
        assert_eq!(rows[3].instance.as_ref().unwrap().values(), &[2.0, 2.0]);
    }

    #[test]
    fn headerless_csv() {
        let rows = read_instances("1,0.5\n".as_bytes(), 2).unwrap();
        assert_eq!(rows[0].instance.as_ref().unwrap().values(), &[1.0, 0.5]);
    }

    #[test]
    fn dataset_csv() {
        let text = "r1,r2,class\n2,1,+\n1,2,-\n";
        let d = read_dataset(text.as_bytes(), None).unwrap();
        assert_eq!(d.rows, vec![vec![2, 1], vec![1, 2]]);
        assert_eq!(d.labels, vec![ClassLabel::Plus, ClassLabel::Minus]);
        assert_eq!(d.domains, vec![2, 2]);

        let bad = read_dataset("a,class\n1,?\n".as_bytes(), None).unwrap_err();
        assert!(bad.to_string().contains("line 2"), "{bad}");
        assert!(read_dataset("a,class\n0.5,+\n".as_bytes(), None).is_err());
    }

    #[test]
    fn explanation_record_layout() {
        let m = XlcModel::categorical(-2.5, vec![vec![3.0, 0.0], vec![2.0, 0.0], vec![1.0, 0.0]])
            .unwrap();
        let p = ExplanationProblem::derive(&m, &Instance::new(vec![1.0; 3])).unwrap();
        let e = PiExplanation::new(vec![1, 2]);
        let json = serde_json::to_string(&ExplanationRecord::new(7, &p, &e)).unwrap();
        assert_eq!(
            json,
            r#"{"instance_id":7,"class":"+","size":2,"features":[2,3],"literals":["(e₂ = 1)","(e₃ = 1)"]}"#
        );
    }

    #[test]
    fn heuristics() {
        let h = read_heuristics("{\"instance_id\":0,\"features\":[1,3]}\n\n".as_bytes()).unwrap();
        assert_eq!(h[0].zero_based().unwrap(), vec![0, 2]);
        let zero = HeuristicRecord {
            instance_id: 0,
            features: vec![0],
        };
        assert!(zero.zero_based().is_err());
        assert!(read_heuristics("nope\n".as_bytes()).is_err());
    }
}
