//! Discrete distributions over occupation patterns (or any other labels).

use std::collections::BTreeMap;
use std::fmt::Display;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Allowed deviation of a normalized table's total from one.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Where a table came from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TableMetadata {
    pub model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Numeric parameters such as `M`, `N`, `t`.
    #[serde(flatten)]
    pub params: BTreeMap<String, f64>,
}

impl TableMetadata {
    pub fn new(model: impl Into<String>) -> Self {
        Self {
            model: model.into(),
            ..Self::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }
}

/// Probabilities over an ordered support. A truncated table carries the
/// missing mass in `residual`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionTable<S> {
    support: Vec<S>,
    probs: Vec<f64>,
    residual: f64,
    metadata: TableMetadata,
}

impl<S> DistributionTable<S> {
    fn build(support: Vec<S>, probs: Vec<f64>, metadata: TableMetadata) -> Result<(Self, f64)> {
        if support.len() != probs.len() {
            return Err(Error::Dimension(format!(
                "{} support points but {} probabilities",
                support.len(),
                probs.len()
            )));
        }
        if support.is_empty() {
            return Err(Error::DegenerateTable("empty support".into()));
        }
        if let Some(p) = probs.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidParameter(format!("invalid probability {p}")));
        }
        let total: f64 = probs.iter().sum();
        Ok((
            Self {
                support,
                probs,
                residual: 0.0,
                metadata,
            },
            total,
        ))
    }

    /// A table whose probabilities sum to one within [`NORMALIZATION_TOL`].
    pub fn normalized(support: Vec<S>, probs: Vec<f64>, metadata: TableMetadata) -> Result<Self> {
        let (table, total) = Self::build(support, probs, metadata)?;
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Unnormalized { total });
        }
        Ok(table)
    }

    /// A table covering part of a distribution; `1 − Σ probs` becomes the residual.
    pub fn truncated(support: Vec<S>, probs: Vec<f64>, metadata: TableMetadata) -> Result<Self> {
        let (mut table, total) = Self::build(support, probs, metadata)?;
        if total > 1.0 + NORMALIZATION_TOL {
            return Err(Error::Unnormalized { total });
        }
        table.residual = (1.0 - total).max(0.0);
        Ok(table)
    }

    pub fn support(&self) -> &[S] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn metadata(&self) -> &TableMetadata {
        &self.metadata
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.total() - 1.0).abs() <= NORMALIZATION_TOL
    }

    /// Probabilities followed by the residual cell, when the table has one.
    pub fn cells(&self) -> Vec<f64> {
        let mut cells = self.probs.clone();
        if self.residual > 0.0 {
            cells.push(self.residual);
        }
        cells
    }
}

impl<S: Display> DistributionTable<S> {
    /// CSV with columns `pattern,probability`; a truncated table ends with a
    /// `residual` row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["pattern", "probability"])?;
        for (s, p) in self.support.iter().zip(&self.probs) {
            w.write_record([s.to_string(), format_float(*p)])?;
        }
        if self.residual > 0.0 {
            w.write_record(["residual".to_string(), format_float(self.residual)])?;
        }
        w.flush()?;
        Ok(())
    }
}

impl<S: Serialize> DistributionTable<S> {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Seventeen significant digits, enough to round-trip any f64.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalized_rejects_bad_totals() {
        let meta = TableMetadata::new("test");
        assert!(matches!(
            DistributionTable::normalized(vec![1, 2], vec![0.5, 0.4], meta.clone()),
            Err(Error::Unnormalized { .. })
        ));
        assert!(DistributionTable::normalized(vec![1, 2], vec![1.1, -0.1], meta.clone()).is_err());
        assert!(DistributionTable::<u8>::normalized(vec![], vec![], meta).is_err());
    }

    #[test]
    fn truncated_tracks_residual() {
        let t = DistributionTable::truncated(vec!["a", "b"], vec![0.5, 0.25], TableMetadata::new("x"))
            .unwrap();
        assert_eq!(t.residual(), 0.25);
        assert_eq!(t.cells(), vec![0.5, 0.25, 0.25]);
    }

    #[test]
    fn csv_and_json_exports() {
        let meta = TableMetadata::new("tsbs").with_seed(7).with("M", 2.0);
        let t = DistributionTable::normalized(vec!["(1,0)", "(0,1)"], vec![0.25, 0.75], meta).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "pattern,probability\n\
             \"(1,0)\",2.5000000000000000e-1\n\
             \"(0,1)\",7.5000000000000000e-1\n"
        );
        let json: serde_json::Value = serde_json::from_str(&t.to_json().unwrap()).unwrap();
        assert_eq!(json["metadata"]["model"], "tsbs");
        assert_eq!(json["metadata"]["seed"], 7);
        assert_eq!(json["metadata"]["M"], 2.0);
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, 2.0f64.sqrt(), 1e-300, 6.02214076e23] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
    }
}
