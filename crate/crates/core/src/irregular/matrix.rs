use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetric `M × M` matrix of non-negative integers with zero diagonal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DistanceMatrix {
    m: usize,
    rows: Vec<Vec<u32>>,
}

#[derive(Deserialize)]
struct RawMatrix {
    m: Option<usize>,
    rows: Vec<Vec<u32>>,
}

impl<'de> Deserialize<'de> for DistanceMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawMatrix::deserialize(d)?;
        if let Some(m) = raw.m {
            if m != raw.rows.len() {
                return Err(serde::de::Error::custom(format!(
                    "m = {m} but {} rows given",
                    raw.rows.len()
                )));
            }
        }
        DistanceMatrix::new(raw.rows).map_err(serde::de::Error::custom)
    }
}

impl DistanceMatrix {
    pub fn new(rows: Vec<Vec<u32>>) -> Result<Self> {
        let m = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidMatrix(format!(
                    "row {i} has {} entries, expected {m}",
                    row.len()
                )));
            }
            if row[i] != 0 {
                return Err(Error::InvalidMatrix(format!("nonzero diagonal at {i}")));
            }
            for j in 0..i {
                if row[j] != rows[j][i] {
                    return Err(Error::InvalidMatrix(format!(
                        "asymmetric at ({i},{j}): {} vs {}",
                        row[j], rows[j][i]
                    )));
                }
            }
        }
        Ok(Self { m, rows })
    }

    pub fn zeros(m: usize) -> Self {
        Self {
            m,
            rows: vec![vec![0; m]; m],
        }
    }

    /// All off-diagonal entries equal to `d`.
    pub fn uniform(m: usize, d: u32) -> Self {
        Self::from_fn(m, |_, _| d)
    }

    /// Builds a matrix from `entry(i, j)` evaluated for `i < j`.
    pub fn from_fn(m: usize, mut entry: impl FnMut(usize, usize) -> u32) -> Self {
        let mut rows = vec![vec![0; m]; m];
        for i in 0..m {
            for j in i + 1..m {
                let v = entry(i, j);
                rows[i][j] = v;
                rows[j][i] = v;
            }
        }
        Self { m, rows }
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(|&v| v == 0)
    }

    pub fn max_entry(&self) -> u32 {
        self.rows.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Sum of the entries strictly above the diagonal.
    pub fn upper_sum(&self) -> u64 {
        (0..self.m)
            .flat_map(|i| (i + 1..self.m).map(move |j| (i, j)))
            .map(|(i, j)| u64::from(self.rows[i][j]))
            .sum()
    }

    pub fn row_sum(&self, i: usize) -> u64 {
        self.rows[i].iter().map(|&v| u64::from(v)).sum()
    }

    /// `P D Pᵀ`: entry `(i, j)` of the result is entry
    /// `(perm[i], perm[j])` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.m)?;
        Ok(Self::from_fn(self.m, |i, j| self.rows[perm[i]][perm[j]]))
    }

    /// Principal submatrix on the given indices.
    pub fn submatrix(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.m) {
            return Err(Error::Domain(format!("index {bad} out of range")));
        }
        Ok(Self::from_fn(indices.len(), |i, j| {
            self.rows[indices[i]][indices[j]]
        }))
    }

    /// Leading `k × k` block.
    pub fn truncated(&self, k: usize) -> Result<Self> {
        self.submatrix(&(0..k).collect::<Vec<_>>())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidMatrix(e.to_string()))
    }

    /// Rows of comma-separated integers, `#` comments allowed.
    pub fn from_csv(text: &str) -> Result<Self> {
        let cleaned: String = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .collect::<Vec<_>>()
            .join("\n");
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(cleaned.as_bytes());
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| Error::InvalidMatrix(e.to_string()))?;
            let row = record
                .iter()
                .map(|f| {
                    f.parse::<u32>()
                        .map_err(|e| Error::InvalidMatrix(format!("entry {f:?}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Self::new(rows)
    }

    /// JSON if the text starts with `{`, CSV otherwise.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::from_json(text)
        } else {
            Self::from_csv(text)
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn to_csv(&self) -> String {
        self.rows
            .iter()
            .map(|r| r.iter().map(u32::to_string).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join("\n")
            + "\n"
    }
}

impl fmt::Display for DistanceMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.max_entry().to_string().len();
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:>width$}")).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

pub(crate) fn check_permutation(perm: &[usize], m: usize) -> Result<()> {
    let mut seen = vec![false; m];
    if perm.len() != m {
        return Err(Error::SizeMismatch {
            expected: m,
            actual: perm.len(),
        });
    }
    for &p in perm {
        if p >= m || seen[p] {
            return Err(Error::Domain(format!("{perm:?} is not a permutation of 0..{m}")));
        }
        seen[p] = true;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(DistanceMatrix::new(vec![vec![0, 1], vec![1, 0]]).is_ok());
        assert!(matches!(
            DistanceMatrix::new(vec![vec![0, 1], vec![2, 0]]),
            Err(Error::InvalidMatrix(_))
        ));
        assert!(matches!(
            DistanceMatrix::new(vec![vec![1, 1], vec![1, 0]]),
            Err(Error::InvalidMatrix(_))
        ));
        assert!(DistanceMatrix::new(vec![vec![0, 1]]).is_err());
    }

    #[test]
    fn formats() {
        let d = DistanceMatrix::new(vec![vec![0, 2, 3], vec![2, 0, 4], vec![3, 4, 0]]).unwrap();
        assert_eq!(d.to_json(), r#"{"m":3,"rows":[[0,2,3],[2,0,4],[3,4,0]]}"#);
        assert_eq!(DistanceMatrix::parse(&d.to_json()).unwrap(), d);
        assert_eq!(DistanceMatrix::parse(&d.to_csv()).unwrap(), d);
        assert_eq!(
            DistanceMatrix::parse("# m=2\n0, 5\n5, 0\n").unwrap(),
            DistanceMatrix::uniform(2, 5)
        );
        assert!(DistanceMatrix::parse(r#"{"m":3,"rows":[[0,1],[1,0]]}"#).is_err());
        assert!(DistanceMatrix::parse("0,1\n2,0\n").is_err());
    }

    #[test]
    fn permutation_and_submatrix() {
        let d = DistanceMatrix::new(vec![vec![0, 2, 3], vec![2, 0, 4], vec![3, 4, 0]]).unwrap();
        let p = d.permuted(&[2, 0, 1]).unwrap();
        assert_eq!(p.get(0, 1), 3);
        assert_eq!(p.get(1, 2), 2);
        assert_eq!(p.get(0, 2), 4);
        assert!(d.permuted(&[0, 0, 1]).is_err());
        assert_eq!(d.truncated(2).unwrap(), DistanceMatrix::uniform(2, 2));
        assert_eq!(d.upper_sum(), 9);
        assert_eq!(d.row_sum(2), 7);
    }
}
