//! Points of the probability simplex.

use crate::error::Error;
use crate::Result;

/// A probability vector over the sites: entries are nonnegative and sum to 1.
///
/// Construction clamps negative rounding dust (entries in `[-tol, 0)`) to zero
/// and renormalizes, so downstream arithmetic can hand back points that are
/// only approximately on the simplex. Anything worse than dust is rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint {
    values: Vec<f64>,
}

/// Slack allowed on the raw sum before renormalization. Inputs are expected
/// to be normalized already; this only absorbs accumulated rounding.
const SUM_SLACK: f64 = 1e-6;

impl SimplexPoint {
    /// Validates and normalizes `values` into a simplex point.
    ///
    /// Entries below `-tol`, non-finite entries, or a sum farther than
    /// `1e-6` from 1 are rejected.
    pub fn new(values: Vec<f64>, tol: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSimplexPoint("no coordinates".into()));
        }
        let mut clamped = values;
        for (i, v) in clamped.iter_mut().enumerate() {
            if !v.is_finite() {
                return Err(Error::InvalidSimplexPoint(format!(
                    "coordinate {i} is {v}"
                )));
            }
            if *v < -tol {
                return Err(Error::InvalidSimplexPoint(format!(
                    "coordinate {i} is {v}, below -{tol:e}"
                )));
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let sum: f64 = clamped.iter().sum();
        if (sum - 1.0).abs() > SUM_SLACK {
            return Err(Error::InvalidSimplexPoint(format!(
                "coordinates sum to {sum}, not 1"
            )));
        }
        for v in clamped.iter_mut() {
            *v /= sum;
        }
        Ok(SimplexPoint { values: clamped })
    }

    /// The point with all mass on `site`.
    pub fn unit(site: usize, n: usize) -> Result<Self> {
        if site >= n {
            return Err(Error::UnknownSite(format!("index {site}")));
        }
        let mut values = vec![0.0; n];
        values[site] = 1.0;
        Ok(SimplexPoint { values })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// Indices of the coordinates strictly above `tol`.
    pub fn support_indices(&self, tol: f64) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&i| self.values[i] > tol)
            .collect()
    }

    /// Largest absolute coordinate difference to `other`.
    pub fn sup_distance(&self, other: &SimplexPoint) -> f64 {
        self.values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}
