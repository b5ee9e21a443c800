use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::experiments::config::ExperimentConfig;

/// One pass/fail line: passes when `value ≤ threshold`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Criterion {
    pub id: String,
    pub description: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Criterion {
    pub fn at_most(id: &str, description: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            id: id.to_string(),
            description: description.into(),
            value,
            threshold,
            pass: value <= threshold,
        }
    }
}

/// Plot-ready numeric table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","));
            s.push('\n');
        }
        s
    }
}

fn num(x: f64) -> String {
    if x == 0.0 || (1e-3..1e6).contains(&x.abs()) {
        format!("{x:.6}")
    } else {
        format!("{x:.3e}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub experiment: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub criteria: Vec<Criterion>,
    pub tables: BTreeMap<String, Table>,
    /// Set when the law violates the standing hypotheses; no criteria are evaluated then.
    pub hypothesis_violation: Option<String>,
    /// Free-form findings that are reported but not gated.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl Report {
    pub fn new(config: &ExperimentConfig) -> Self {
        Self {
            experiment: config.experiment.name().to_string(),
            seed: config.seed,
            config: config.clone(),
            criteria: Vec::new(),
            tables: BTreeMap::new(),
            hypothesis_violation: None,
            notes: Vec::new(),
        }
    }

    pub fn violation(config: &ExperimentConfig, reason: String) -> Self {
        let mut r = Self::new(config);
        r.hypothesis_violation = Some(reason);
        r
    }

    pub fn criterion(&self, id: &str) -> Option<&Criterion> {
        self.criteria.iter().find(|c| c.id == id)
    }

    pub fn passed(&self) -> bool {
        self.hypothesis_violation.is_none() && self.criteria.iter().all(|c| c.pass)
    }

    /// 0 when every criterion passes, 2 on a hypothesis violation, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.hypothesis_violation.is_some() {
            2
        } else if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    /// Writes `report.json` and, for CSV output, one `<table>.csv` per table.
    pub fn write(&self, dir: &Path, format: OutputFormat) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), serde_json::to_string_pretty(&self.to_json())?)?;
        if format == OutputFormat::Csv {
            for (name, t) in &self.tables {
                fs::write(dir.join(format!("{name}.csv")), t.to_csv())?;
            }
        }
        Ok(())
    }

    pub fn summary_lines(&self) -> Vec<String> {
        if let Some(v) = &self.hypothesis_violation {
            return vec![format!("{}: hypothesis violation: {v}", self.experiment)];
        }
        self.criteria
            .iter()
            .map(|c| {
                format!(
                    "{} {}: {} = {} (threshold {})",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.id,
                    c.description,
                    num(c.value),
                    num(c.threshold)
                )
            })
            .collect()
    }
}
