//! Joint probability-distribution matrices over (component, copy) pairs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const TOLERANCE: f64 = 1e-9;

/// Probability that a circulant lands in component `i` and auxiliary matrix `j`.
///
/// Rows are components `0..=m`, columns are copies `0..M`. Row `i` sums to
/// `row_targets[i]`, the component's share in the underlying SC code.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistJson", into = "DistJson")]
pub struct ProbDistMatrix {
    memory: usize,
    copies: usize,
    row_targets: Vec<f64>,
    coeffs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct DistJson {
    m: usize,
    #[serde(rename = "M")]
    copies: usize,
    row_targets: Vec<f64>,
    coeffs: Vec<Vec<f64>>,
}

impl TryFrom<DistJson> for ProbDistMatrix {
    type Error = Error;

    fn try_from(j: DistJson) -> Result<Self> {
        let p = ProbDistMatrix::from_rows(&j.coeffs, j.row_targets)?;
        if p.memory != j.m || p.copies != j.copies {
            return Err(Error::Dimension {
                expected_rows: j.m + 1,
                expected_cols: j.copies,
                rows: p.memory + 1,
                cols: p.copies,
            });
        }
        Ok(p)
    }
}

impl From<ProbDistMatrix> for DistJson {
    fn from(p: ProbDistMatrix) -> Self {
        DistJson {
            m: p.memory,
            copies: p.copies,
            coeffs: p.to_rows(),
            row_targets: p.row_targets,
        }
    }
}

impl ProbDistMatrix {
    /// Validated constructor: entries non-negative, rows summing to their
    /// targets and the whole matrix to one, all within `1e-9`.
    pub fn from_rows(rows: &[Vec<f64>], row_targets: Vec<f64>) -> Result<Self> {
        let p = Self::unchecked(rows, row_targets)?;
        p.check()?;
        Ok(p)
    }

    /// Builds from printed (rounded) values: the row targets are taken as
    /// the row sums and everything is rescaled to total mass one.
    pub fn from_weights(rows: &[Vec<f64>]) -> Result<Self> {
        let total: f64 = rows.iter().flatten().sum();
        if !(total > 0.0) || rows.iter().flatten().any(|&v| v < 0.0 || !v.is_finite()) {
            return Err(Error::InvalidParams("weights must be non-negative with positive sum".into()));
        }
        let scaled: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.iter().map(|v| v / total).collect())
            .collect();
        let targets = scaled.iter().map(|r| r.iter().sum()).collect();
        Self::from_rows(&scaled, targets)
    }

    /// All mass of row `i` in column 0, i.e. nothing relocated.
    pub fn unrelocated(row_targets: &[f64], copies: usize) -> Result<Self> {
        if copies == 0 {
            return Err(Error::InvalidParams("M must be at least 1".into()));
        }
        let rows: Vec<Vec<f64>> = row_targets
            .iter()
            .map(|&t| {
                let mut r = vec![0.0; copies];
                r[0] = t;
                r
            })
            .collect();
        Self::from_rows(&rows, row_targets.to_vec())
    }

    /// Shape-checked only: the objective polynomials are defined for any
    /// coefficients, which finite-difference checks rely on.
    pub fn from_raw(rows: &[Vec<f64>]) -> Result<Self> {
        let targets = rows.iter().map(|r| r.iter().sum()).collect();
        Self::unchecked(rows, targets)
    }

    fn unchecked(rows: &[Vec<f64>], row_targets: Vec<f64>) -> Result<Self> {
        let copies = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || copies == 0 || rows.iter().any(|r| r.len() != copies) {
            return Err(Error::Parse("distribution must be a non-empty rectangle".into()));
        }
        if row_targets.len() != rows.len() {
            return Err(Error::Dimension {
                expected_rows: row_targets.len(),
                expected_cols: copies,
                rows: rows.len(),
                cols: copies,
            });
        }
        Ok(ProbDistMatrix {
            memory: rows.len() - 1,
            copies,
            row_targets,
            coeffs: rows.concat(),
        })
    }

    fn check(&self) -> Result<()> {
        if let Some(v) = self.coeffs.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidParams(format!("probability {v} is negative or not finite")));
        }
        let target_sum: f64 = self.row_targets.iter().sum();
        if (target_sum - 1.0).abs() > TOLERANCE {
            return Err(Error::InvalidParams(format!("row targets sum to {target_sum}, not 1")));
        }
        for (i, &t) in self.row_targets.iter().enumerate() {
            let s = self.row_sum(i);
            if (s - t).abs() > TOLERANCE {
                return Err(Error::InvalidParams(format!("row {i} sums to {s}, target {t}")));
            }
        }
        Ok(())
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    pub fn row_targets(&self) -> &[f64] {
        &self.row_targets
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.coeffs[i * self.copies + j]
    }

    /// Row-major flat view of the coefficients.
    pub fn as_slice(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.coeffs.chunks(self.copies).map(<[f64]>::to_vec).collect()
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.coeffs[i * self.copies..(i + 1) * self.copies].iter().sum()
    }

    /// Share of component `i` that is relocated, in percent.
    pub fn component_relocation(&self) -> Vec<f64> {
        (0..=self.memory)
            .map(|i| {
                let t = self.row_targets[i];
                if t > 0.0 {
                    100.0 * (1.0 - self.get(i, 0) / t)
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// Total relocated mass, in percent.
    pub fn relocation_percent(&self) -> f64 {
        100.0 * (1.0 - (0..=self.memory).map(|i| self.get(i, 0)).sum::<f64>())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("distribution serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Moves against `direction` by `step` and projects back onto the
    /// feasible set with [`force`].
    pub(crate) fn stepped(&self, direction: &[f64], step: f64) -> Result<Self> {
        let moved: Vec<f64> = self
            .coeffs
            .iter()
            .zip(direction)
            .map(|(p, g)| p - step * g)
            .collect();
        let rows: Vec<Vec<f64>> = moved.chunks(self.copies).map(<[f64]>::to_vec).collect();
        force(&rows, &self.row_targets)
    }
}

/// Projects every row onto `{x >= 0, sum x = target}`.
///
/// Each row first gets the uniform shift `(target - sum) / M`; negative
/// entries are then zeroed and the positive ones rescaled to keep the sum.
pub fn force(rows: &[Vec<f64>], row_targets: &[f64]) -> Result<ProbDistMatrix> {
    let mut out = Vec::with_capacity(rows.len());
    for (i, (row, &target)) in rows.iter().zip(row_targets).enumerate() {
        let shift = (target - row.iter().sum::<f64>()) / row.len() as f64;
        let mut r: Vec<f64> = row.iter().map(|v| (v + shift).max(0.0)).collect();
        let positive: f64 = r.iter().sum();
        if positive > 0.0 {
            let scale = target / positive;
            r.iter_mut().for_each(|v| *v *= scale);
        } else if target > 0.0 {
            return Err(Error::DegenerateRow { row: i, target });
        }
        out.push(r);
    }
    let mut p = ProbDistMatrix::unchecked(&out, row_targets.to_vec())?;
    // Guard against drift of the last ulp in long runs.
    p.check()?;
    p.coeffs.iter_mut().for_each(|v| *v = v.max(0.0));
    Ok(p)
}
