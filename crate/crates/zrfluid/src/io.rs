//! JSON documents and CSV emission.
//!
//! All structured input is JSON: a rate matrix document (`{"sites": [...],
//! "rates": [[...]]}`) or an experiment document bundling a model with jump
//! rates, a start point, particle counts, and seeds. Dense numeric output
//! (trajectories, regulators, per-trial distances) goes to CSV with a
//! mandatory header line and floats at 12 significant digits.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::fluid::PiecewiseLinearPath;
use crate::markov::RateMatrix;
use crate::reflect::RegulatorPath;
use crate::simplex::SimplexPoint;
use crate::zrp::{ConvergenceSummary, JumpRate};
use crate::Result;

/// A rate matrix on the wire: site labels plus the square rate table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateMatrixDoc {
    pub sites: Vec<String>,
    pub rates: Vec<Vec<f64>>,
}

impl RateMatrixDoc {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let doc: RateMatrixDoc = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        Ok(doc)
    }

    /// Validates the document into a live rate matrix.
    pub fn to_rate_matrix(&self) -> Result<RateMatrix> {
        RateMatrix::new(self.sites.clone(), self.rates.clone())
    }

    pub fn of(r: &RateMatrix) -> Self {
        RateMatrixDoc {
            sites: r.labels().to_vec(),
            rates: (0..r.n())
                .map(|i| (0..r.n()).map(|j| r.rate(i, j)).collect())
                .collect(),
        }
    }
}

/// A convergence experiment on the wire.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentDoc {
    pub model: RateMatrixDoc,
    #[serde(default)]
    pub g: JumpRate,
    /// Fluid start point, one weight per site.
    pub start: Vec<f64>,
    pub n_list: Vec<u64>,
    pub t_max: f64,
    pub trials: usize,
    pub seed: u64,
    /// Pass/fail bar for the median sup-distance at the largest particle
    /// count, calibrated by a pilot run and recorded here.
    #[serde(default)]
    pub max_median_final: Option<f64>,
}

impl ExperimentDoc {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let doc: ExperimentDoc = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        Ok(doc)
    }

    pub fn start_point(&self, tol: f64) -> Result<SimplexPoint> {
        SimplexPoint::new(self.start.clone(), tol)
    }
}

/// Formats a float with 12 significant digits, the CSV contract.
pub fn fmt12(x: f64) -> String {
    format!("{x:.11e}")
}

/// Writes a trajectory (and optionally its regulator) as CSV on a uniform
/// grid of `intervals` steps over `[0, t_end]`. Columns: `t`, one per site,
/// then `rho_<site>` per site when a regulator is given.
pub fn write_trajectory_csv<W: Write>(
    out: &mut W,
    labels: &[String],
    path: &PiecewiseLinearPath,
    regulator: Option<&RegulatorPath>,
    intervals: usize,
    t_end: f64,
) -> Result<()> {
    if intervals == 0 || !t_end.is_finite() || t_end < 0.0 {
        return Err(Error::InvalidInput(format!(
            "need a positive grid and horizon, got {intervals} steps to {t_end}"
        )));
    }
    writeln!(out, "# tol = {}", fmt12(path.tol()))?;
    let mut header = String::from("t");
    for l in labels {
        header.push(',');
        header.push_str(l);
    }
    if regulator.is_some() {
        for l in labels {
            header.push_str(",rho_");
            header.push_str(l);
        }
    }
    writeln!(out, "{header}")?;
    for k in 0..=intervals {
        let t = t_end * k as f64 / intervals as f64;
        let point = path.evaluate(t)?;
        let mut row = fmt12(t);
        for v in point.values() {
            row.push(',');
            row.push_str(&fmt12(*v));
        }
        if let Some(reg) = regulator {
            for v in reg.rho_at(t)? {
                row.push(',');
                row.push_str(&fmt12(v));
            }
        }
        writeln!(out, "{row}")?;
    }
    Ok(())
}

/// Writes per-trial sup-distances as CSV: `n,trial,sup_distance`.
pub fn write_convergence_csv<W: Write>(out: &mut W, summary: &ConvergenceSummary) -> Result<()> {
    writeln!(out, "n,trial,sup_distance")?;
    for row in &summary.rows {
        for (trial, d) in row.sup_distances.iter().enumerate() {
            writeln!(out, "{},{},{}", row.n_particles, trial, fmt12(*d))?;
        }
    }
    Ok(())
}
