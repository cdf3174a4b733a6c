use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::{Error, Result};

/// One token per categorical column, compared by exact equality.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CategoricalState {
    pairs: Vec<(String, String)>,
}

impl CategoricalState {
    pub fn new(pairs: Vec<(String, String)>) -> Self {
        Self { pairs }
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn value(&self, column: &str) -> Option<&str> {
        self.pairs
            .iter()
            .find(|(c, _)| c == column)
            .map(|(_, v)| v.as_str())
    }

    /// True when `row` of `d` carries this state. A missing column never
    /// matches.
    pub fn matches_row(&self, d: &Dataset, row: usize) -> bool {
        self.pairs.iter().all(|(col, token)| {
            d.categorical(col)
                .map(|values| values[row] == *token)
                .unwrap_or(false)
        })
    }
}

impl fmt::Display for CategoricalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (c, v)) in self.pairs.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∧ ")?;
            }
            write!(f, "{c} = {v}")?;
        }
        Ok(())
    }
}

/// Distinct combinations of `columns` observed in `d`, in order of first
/// appearance.
pub fn unique_categorical_states(d: &Dataset, columns: &[String]) -> Result<Vec<CategoricalState>> {
    if columns.is_empty() {
        return Err(Error::InvalidParameter(
            "no categorical columns to group by".into(),
        ));
    }
    let cols = columns
        .iter()
        .map(|c| d.categorical(c))
        .collect::<Result<Vec<_>>>()?;
    let mut seen = HashSet::new();
    let mut states = Vec::new();
    for row in 0..d.rows() {
        let key: Vec<&str> = cols.iter().map(|c| c[row].as_str()).collect();
        if seen.contains(&key) {
            continue;
        }
        states.push(CategoricalState::new(
            columns
                .iter()
                .zip(&key)
                .map(|(c, v)| (c.clone(), v.to_string()))
                .collect(),
        ));
        seen.insert(key);
    }
    Ok(states)
}

/// Rows of each input carrying state `c`, with categorical columns dropped.
pub fn filter_category(
    normal: &Dataset,
    anomalous: &Dataset,
    c: &CategoricalState,
) -> (Dataset, Dataset) {
    let pick = |d: &Dataset| {
        let idx: Vec<usize> = (0..d.rows()).filter(|&r| c.matches_row(d, r)).collect();
        d.select_rows(&idx).drop_categorical()
    };
    (pick(normal), pick(anomalous))
}
