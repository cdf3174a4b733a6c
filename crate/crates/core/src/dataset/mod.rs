//! Tabular data handling: CSV ingestion, typed columns, min-max scaling,
//! cyclical encoding of periodic features, and categorical-state utilities.

mod categorical;
mod cyclical;
mod encoder;
mod scaling;

use std::collections::HashSet;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Matrix, Result};

pub use categorical::{filter_category, unique_categorical_states, CategoricalState};
pub use cyclical::{cyclical_decode, cyclical_encode, CyclicalFeature};
pub use encoder::{CategoryLevels, FeatureEncoder, FeatureInfo};
pub use scaling::{scale_apply, scale_fit, unscale_value, ColumnScale, ScalingParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Numerical,
    Categorical,
}

/// Column-kind declarations for a table. Columns of the file that are not
/// listed here are ignored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    #[serde(default)]
    pub numerical: Vec<String>,
    #[serde(default)]
    pub categorical: Vec<String>,
}

impl Schema {
    pub fn new<S: Into<String>>(
        numerical: impl IntoIterator<Item = S>,
        categorical: impl IntoIterator<Item = S>,
    ) -> Self {
        Self {
            numerical: numerical.into_iter().map(Into::into).collect(),
            categorical: categorical.into_iter().map(Into::into).collect(),
        }
    }

    fn declared(&self) -> impl Iterator<Item = (&str, ColumnKind)> {
        self.numerical
            .iter()
            .map(|n| (n.as_str(), ColumnKind::Numerical))
            .chain(
                self.categorical
                    .iter()
                    .map(|n| (n.as_str(), ColumnKind::Categorical)),
            )
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for (name, _) in self.declared() {
            if !seen.insert(name) {
                return Err(Error::Schema(format!("column '{name}' declared twice")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Numerical(Vec<f64>),
    Categorical(Vec<String>),
}

impl ColumnData {
    pub fn len(&self) -> usize {
        match self {
            ColumnData::Numerical(v) => v.len(),
            ColumnData::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> ColumnKind {
        match self {
            ColumnData::Numerical(_) => ColumnKind::Numerical,
            ColumnData::Categorical(_) => ColumnKind::Categorical,
        }
    }

    fn select(&self, indices: &[usize]) -> ColumnData {
        match self {
            ColumnData::Numerical(v) => ColumnData::Numerical(indices.iter().map(|&i| v[i]).collect()),
            ColumnData::Categorical(v) => {
                ColumnData::Categorical(indices.iter().map(|&i| v[i].clone()).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub data: ColumnData,
}

impl Column {
    pub fn numerical(name: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            data: ColumnData::Numerical(values),
        }
    }

    pub fn categorical<S: Into<String>>(name: impl Into<String>, values: impl IntoIterator<Item = S>) -> Self {
        Self {
            name: name.into(),
            data: ColumnData::Categorical(values.into_iter().map(Into::into).collect()),
        }
    }
}

/// An immutable table of typed columns.
///
/// Every column has the same number of rows, names are unique, and numerical
/// entries are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    rows: usize,
    columns: Vec<Column>,
}

impl Dataset {
    pub fn new(columns: Vec<Column>) -> Result<Self> {
        let rows = columns.first().map_or(0, |c| c.data.len());
        let mut seen = HashSet::new();
        for c in &columns {
            if !seen.insert(c.name.as_str()) {
                return Err(Error::Schema(format!("duplicate column name '{}'", c.name)));
            }
            if c.data.len() != rows {
                return Err(Error::Schema(format!(
                    "column '{}' has {} rows, expected {rows}",
                    c.name,
                    c.data.len()
                )));
            }
            if let ColumnData::Numerical(v) = &c.data {
                if let Some(pos) = v.iter().position(|x| !x.is_finite()) {
                    return Err(Error::Parse {
                        row: pos + 1,
                        column: c.name.clone(),
                        message: "non-finite value".into(),
                    });
                }
            }
        }
        Ok(Self { rows, columns })
    }

    /// An empty table with the same columns.
    pub fn empty_like(&self) -> Dataset {
        self.select_rows(&[])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn numerical(&self, name: &str) -> Result<&[f64]> {
        match self.column(name).map(|c| &c.data) {
            Some(ColumnData::Numerical(v)) => Ok(v),
            Some(ColumnData::Categorical(_)) => {
                Err(Error::Schema(format!("column '{name}' is not numerical")))
            }
            None => Err(Error::UnknownColumn(name.to_string())),
        }
    }

    pub fn categorical(&self, name: &str) -> Result<&[String]> {
        match self.column(name).map(|c| &c.data) {
            Some(ColumnData::Categorical(v)) => Ok(v),
            Some(ColumnData::Numerical(_)) => {
                Err(Error::Schema(format!("column '{name}' is not categorical")))
            }
            None => Err(Error::UnknownColumn(name.to_string())),
        }
    }

    fn names_of(&self, kind: ColumnKind) -> Vec<String> {
        self.columns
            .iter()
            .filter(|c| c.data.kind() == kind)
            .map(|c| c.name.clone())
            .collect()
    }

    pub fn numerical_names(&self) -> Vec<String> {
        self.names_of(ColumnKind::Numerical)
    }

    pub fn categorical_names(&self) -> Vec<String> {
        self.names_of(ColumnKind::Categorical)
    }

    pub fn select_rows(&self, indices: &[usize]) -> Dataset {
        Dataset {
            rows: indices.len(),
            columns: self
                .columns
                .iter()
                .map(|c| Column {
                    name: c.name.clone(),
                    data: c.data.select(indices),
                })
                .collect(),
        }
    }

    /// Keeps only the numerical columns.
    pub fn drop_categorical(&self) -> Dataset {
        Dataset {
            rows: self.rows,
            columns: self
                .columns
                .iter()
                .filter(|c| c.data.kind() == ColumnKind::Numerical)
                .cloned()
                .collect(),
        }
    }

    /// Returns a copy with `column` replaced (same name) or appended.
    pub fn with_column(&self, column: Column) -> Result<Dataset> {
        let mut columns = self.columns.clone();
        match columns.iter_mut().find(|c| c.name == column.name) {
            Some(slot) => *slot = column,
            None => columns.push(column),
        }
        Dataset::new(columns)
    }

    /// Numerical columns `names` as a row-major matrix.
    pub fn numerical_matrix(&self, names: &[String]) -> Result<Matrix> {
        let cols = names
            .iter()
            .map(|n| self.numerical(n))
            .collect::<Result<Vec<_>>>()?;
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for i in 0..self.rows {
            data.extend(cols.iter().map(|c| c[i]));
        }
        Matrix::from_vec(self.rows, cols.len(), data)
    }

    /// The categorical state of `row` restricted to `columns`.
    pub fn state_of(&self, row: usize, columns: &[String]) -> Result<CategoricalState> {
        let pairs = columns
            .iter()
            .map(|n| Ok((n.clone(), self.categorical(n)?[row].clone())))
            .collect::<Result<Vec<_>>>()?;
        Ok(CategoricalState::new(pairs))
    }

    /// Replaces a periodic numerical column by its sine and cosine components,
    /// inserted where the original column was.
    pub fn expand_cyclical(&self, feature: &CyclicalFeature) -> Result<Dataset> {
        let values = self.numerical(&feature.column)?;
        let (mut sin, mut cos) = (Vec::with_capacity(self.rows), Vec::with_capacity(self.rows));
        for &v in values {
            let (s, c) = cyclical_encode(v, feature.period)?;
            sin.push(s);
            cos.push(c);
        }
        let mut columns = Vec::with_capacity(self.columns.len() + 1);
        for c in &self.columns {
            if c.name == feature.column {
                columns.push(Column::numerical(feature.sin_name(), std::mem::take(&mut sin)));
                columns.push(Column::numerical(feature.cos_name(), std::mem::take(&mut cos)));
            } else {
                columns.push(c.clone());
            }
        }
        Dataset::new(columns)
    }
}

/// Reads a CSV file with a mandatory header row.
pub fn load_csv(path: impl AsRef<Path>, schema: &Schema) -> Result<Dataset> {
    let file = File::open(path.as_ref())?;
    read_csv(file, schema)
}

/// Reads CSV from any reader. Columns are returned in schema order
/// (numerical first, then categorical). Row numbers in errors are 1-based
/// and count data rows only.
pub fn read_csv<R: Read>(reader: R, schema: &Schema) -> Result<Dataset> {
    schema.validate()?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(Error::Empty("no header row".into()));
    }
    let mut seen = HashSet::new();
    for h in headers.iter() {
        if !seen.insert(h) {
            return Err(Error::Schema(format!("duplicate header '{h}'")));
        }
    }

    let mut positions = Vec::new();
    for (name, kind) in schema.declared() {
        let pos = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Schema(format!("declared column '{name}' not found in header")))?;
        positions.push((name, kind, pos));
    }

    let mut data: Vec<ColumnData> = positions
        .iter()
        .map(|&(_, kind, _)| match kind {
            ColumnKind::Numerical => ColumnData::Numerical(Vec::new()),
            ColumnKind::Categorical => ColumnData::Categorical(Vec::new()),
        })
        .collect();

    let mut record = csv::StringRecord::new();
    let mut row = 0;
    while rdr.read_record(&mut record)? {
        row += 1;
        for (&(name, _, pos), col) in positions.iter().zip(data.iter_mut()) {
            let token = record.get(pos).unwrap_or("");
            let parse_err = |message: &str| Error::Parse {
                row,
                column: name.to_string(),
                message: message.to_string(),
            };
            if token.is_empty() {
                return Err(parse_err("missing value"));
            }
            match col {
                ColumnData::Numerical(v) => {
                    let x: f64 = token
                        .parse()
                        .map_err(|_| parse_err(&format!("'{token}' is not a number")))?;
                    if !x.is_finite() {
                        return Err(parse_err(&format!("'{token}' is not finite")));
                    }
                    v.push(x);
                }
                ColumnData::Categorical(v) => v.push(token.to_string()),
            }
        }
    }
    if row == 0 {
        return Err(Error::Empty("no data rows".into()));
    }

    let columns = positions
        .into_iter()
        .zip(data)
        .map(|((name, _, _), data)| Column {
            name: name.to_string(),
            data,
        })
        .collect();
    Dataset::new(columns)
}
