//! Feature tables: CSV with one row per sample, preceded by `# key: value`
//! lines echoing the configuration that produced them.
//!
//! Columns are `id,label,gamma1,gamma2,gamma3,l,n_vertices,n_words,m,error`.
//! A row with a non-empty `error` has no exponents and is never used for training.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitting::FeatureVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub id: String,
    pub label: String,
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
    pub gamma3: Option<f64>,
    pub l: Option<f64>,
    pub n_vertices: Option<usize>,
    pub n_words: Option<usize>,
    pub m: usize,
    pub error: Option<String>,
}

impl FeatureRow {
    pub fn from_features(label: impl Into<String>, f: &FeatureVector<f64>) -> Self {
        FeatureRow {
            id: f.sample_id.clone(),
            label: label.into(),
            gamma1: Some(f.gamma1),
            gamma2: Some(f.gamma2),
            gamma3: Some(f.gamma3),
            l: f.mean_geodesic,
            n_vertices: Some(f.n_vertices),
            n_words: Some(f.n_words),
            m: f.m,
            error: None,
        }
    }

    pub fn failed(id: impl Into<String>, label: impl Into<String>, m: usize, error: &Error) -> Self {
        FeatureRow {
            id: id.into(),
            label: label.into(),
            gamma1: None,
            gamma2: None,
            gamma3: None,
            l: None,
            n_vertices: None,
            n_words: None,
            m,
            error: Some(error.to_string()),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none() && self.gamma1.is_some() && self.gamma2.is_some() && self.gamma3.is_some()
    }

    /// The requested columns; `None` for failed rows or when a column is empty.
    pub fn select(&self, columns: &[FeatureColumn]) -> Option<Vec<f64>> {
        if self.error.is_some() {
            return None;
        }
        columns
            .iter()
            .map(|c| match c {
                FeatureColumn::Gamma1 => self.gamma1,
                FeatureColumn::Gamma2 => self.gamma2,
                FeatureColumn::Gamma3 => self.gamma3,
                FeatureColumn::L => self.l,
            })
            .collect()
    }
}

/// A numeric column usable as a discriminant feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureColumn {
    Gamma1,
    Gamma2,
    Gamma3,
    L,
}

impl FeatureColumn {
    pub const GAMMAS: [FeatureColumn; 3] = [FeatureColumn::Gamma1, FeatureColumn::Gamma2, FeatureColumn::Gamma3];

    pub fn name(self) -> &'static str {
        match self {
            FeatureColumn::Gamma1 => "gamma1",
            FeatureColumn::Gamma2 => "gamma2",
            FeatureColumn::Gamma3 => "gamma3",
            FeatureColumn::L => "l",
        }
    }

    /// `gamma1,gamma2,l` style lists.
    pub fn parse_list(s: &str) -> Result<Vec<FeatureColumn>> {
        let cols = s
            .split(',')
            .map(|c| c.trim().parse())
            .collect::<Result<Vec<FeatureColumn>>>()?;
        if cols.is_empty() {
            return Err(Error::InvalidParameter("no feature columns given".into()));
        }
        Ok(cols)
    }
}

impl std::fmt::Display for FeatureColumn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for FeatureColumn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gamma1" => Ok(FeatureColumn::Gamma1),
            "gamma2" => Ok(FeatureColumn::Gamma2),
            "gamma3" => Ok(FeatureColumn::Gamma3),
            "l" => Ok(FeatureColumn::L),
            other => Err(Error::InvalidParameter(format!(
                "unknown feature column {other:?} (expected gamma1, gamma2, gamma3 or l)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureTable {
    /// `(key, value)` pairs echoed as comment lines.
    pub config: Vec<(String, String)>,
    pub rows: Vec<FeatureRow>,
}

impl FeatureTable {
    pub fn config_value(&self, key: &str) -> Option<&str> {
        self.config.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        let mut head = String::new();
        for (k, v) in &self.config {
            head.push_str(&format!("# {k}: {v}\n"));
        }
        out.write_all(head.as_bytes()).map_err(|e| Error::io("<feature table>", e))?;
        let mut w = csv::Writer::from_writer(out);
        if self.rows.is_empty() {
            w.write_record(["id", "label", "gamma1", "gamma2", "gamma3", "l", "n_vertices", "n_words", "m", "error"])?;
        }
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush().map_err(|e| Error::io("<feature table>", e))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
    }

    pub fn read<R: Read>(mut input: R) -> Result<Self> {
        let mut text = String::new();
        input
            .read_to_string(&mut text)
            .map_err(|e| Error::io("<feature table>", e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut config = Vec::new();
        let mut body = String::new();
        for line in text.lines() {
            if let Some(c) = line.strip_prefix('#') {
                if let Some((k, v)) = c.trim().split_once(':') {
                    config.push((k.trim().to_owned(), v.trim().to_owned()));
                }
            } else {
                body.push_str(line);
                body.push('\n');
            }
        }
        let mut r = csv::Reader::from_reader(body.as_bytes());
        let rows = r.deserialize().collect::<std::result::Result<Vec<FeatureRow>, _>>()?;
        Ok(FeatureTable { config, rows })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Csv(c) => Error::Parse {
                path: path.to_path_buf(),
                line: c.position().map_or(0, |p| p.line() as usize),
                message: c.to_string(),
            },
            other => other,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write(std::io::BufWriter::new(file))
    }

    /// Usable feature vectors of one category, in row order.
    pub fn group(&self, label: &str, columns: &[FeatureColumn]) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .filter(|r| r.label == label)
            .filter_map(|r| r.select(columns))
            .collect()
    }

    /// Usable `(vector, label)` pairs, in row order.
    pub fn labeled(&self, columns: &[FeatureColumn]) -> Vec<(Vec<f64>, String)> {
        self.rows
            .iter()
            .filter_map(|r| r.select(columns).map(|v| (v, r.label.clone())))
            .collect()
    }
}
