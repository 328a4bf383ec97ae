//! The fluid path as an obliquely reflected linear drift.
//!
//! The same path produced by [`crate::fluid::fluid_trajectory`] solves a
//! reflection problem: start from the free motion `xi(t) = u + t * flow(V)`
//! and push it back onto the nonnegative orthant along the direction
//! `w(i) = unit(i) - p(i, .)` whenever coordinate `i` sits at zero, where `p`
//! is the embedded routing chain. The cumulative push `rho` is the regulator:
//! nondecreasing, growing only against coordinates at zero, and satisfying
//! `zeta(t) = xi(t) + sum_i rho_t(i) w(i)`.
//!
//! Because the path is piecewise linear, the regulator is too, and its slopes
//! have a closed form per segment: they vanish on the minimal absorbing set
//! `A` of the current support and solve `(I - p^T)|_C x = -flow(V)|_C` on the
//! complement `C`. [`verify_orp`] checks the reflection conditions directly,
//! independently of that formula.

use nalgebra::{DMatrix, DVector};

use crate::absorbing::minimal_absorbing;
use crate::error::Error;
use crate::fluid::PiecewiseLinearPath;
use crate::markov::{RateMatrix, SiteSet, StochasticMatrix};
use crate::simplex::SimplexPoint;
use crate::Result;

/// A piecewise-linear cumulative regulator aligned with a fluid path's
/// breakpoints. The slope of the last segment persists beyond the terminal
/// breakpoint: at a stationary face the free drift never stops, so neither
/// does the push that cancels it.
#[derive(Debug, Clone, PartialEq)]
pub struct RegulatorPath {
    times: Vec<f64>,
    slopes: Vec<Vec<f64>>,
    cumulative: Vec<Vec<f64>>,
    tol: f64,
}

impl RegulatorPath {
    /// Builds a regulator from per-segment slopes; `times` are breakpoints
    /// starting at 0 and `slopes[k]` applies from `times[k]` on. Also the
    /// entry point for testing hand-built or deliberately corrupted
    /// candidates against [`verify_orp`].
    pub fn from_slopes(times: Vec<f64>, slopes: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        if times.is_empty() || times[0] != 0.0 || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(
                "breakpoint times must start at 0 and increase strictly".into(),
            ));
        }
        if slopes.len() != times.len() {
            return Err(Error::InvalidInput(
                "need exactly one slope vector per breakpoint".into(),
            ));
        }
        let dim = slopes[0].len();
        if dim == 0 || slopes.iter().any(|s| s.len() != dim) {
            return Err(Error::InvalidInput(
                "slope vectors must share a nonzero dimension".into(),
            ));
        }
        let mut cumulative = vec![vec![0.0; dim]];
        for k in 1..times.len() {
            let dt = times[k] - times[k - 1];
            let prev = &cumulative[k - 1];
            let next: Vec<f64> = (0..dim).map(|i| prev[i] + dt * slopes[k - 1][i]).collect();
            cumulative.push(next);
        }
        Ok(RegulatorPath {
            times,
            slopes,
            cumulative,
            tol,
        })
    }

    pub fn breakpoint_times(&self) -> &[f64] {
        &self.times
    }

    /// Slope on segment `k`; the last one persists past the final breakpoint.
    pub fn slope_on(&self, k: usize) -> &[f64] {
        &self.slopes[k]
    }

    pub fn slopes(&self) -> &[Vec<f64>] {
        &self.slopes
    }

    /// Cumulative regulator at breakpoint `k`.
    pub fn cumulative_at_breakpoint(&self, k: usize) -> &[f64] {
        &self.cumulative[k]
    }

    pub fn dim(&self) -> usize {
        self.slopes[0].len()
    }

    /// Cumulative regulator at time `t >= 0`.
    pub fn rho_at(&self, t: f64) -> Result<Vec<f64>> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidInput(format!("evaluation time {t}")));
        }
        let k = self.times.iter().rposition(|&bt| bt <= t).unwrap_or(0);
        let dt = t - self.times[k];
        Ok((0..self.dim())
            .map(|i| self.cumulative[k][i] + dt * self.slopes[k][i])
            .collect())
    }
}

/// Computes the exact regulator of a fluid path.
///
/// Per segment, slopes vanish on the minimal absorbing set of the segment's
/// support and solve `(I - p^T)|_C x = (flow(A) - flow(V))|_C` off it; the
/// restricted routing block is strictly substochastic for a proper subset,
/// so the system is nonsingular. Slopes must come out nonnegative; a
/// negative one beyond tolerance reports `ConsistencyFailure`.
pub fn regulator_path(
    r: &RateMatrix,
    path: &PiecewiseLinearPath,
    tol: f64,
) -> Result<RegulatorPath> {
    let n = r.n();
    if path.dim() != n {
        return Err(Error::InvalidInput(format!(
            "path has {} coordinates for {} sites",
            path.dim(),
            n
        )));
    }
    let times = path.breakpoint_times().to_vec();
    if n == 1 {
        // A single site never leaves the boundary of nothing: no push.
        let slopes = vec![vec![0.0]; times.len()];
        return RegulatorPath::from_slopes(times, slopes, tol);
    }
    let p = r.embedded()?;
    let lam_full = r.net_flow(&SiteSet::full(n))?.extended(n);
    let thr = r.flow_tol(tol);
    let mut slopes = Vec::with_capacity(times.len());
    for k in 0..times.len() {
        let v = path.point(k);
        let support = SiteSet::from_indices(v.support_indices(tol), n)?;
        let absorbing = minimal_absorbing(r, &support, tol)?;
        let a = absorbing.result().clone();
        let lam_a = r.net_flow(&a)?.extended(n);
        let c = a.complement(n);
        let mut slope = vec![0.0; n];
        if !c.is_empty() {
            let cs = c.as_slice();
            let m = DMatrix::from_fn(cs.len(), cs.len(), |x, y| {
                let d = if x == y { 1.0 } else { 0.0 };
                d - p.prob(cs[y], cs[x])
            });
            let rhs = DVector::from_fn(cs.len(), |x, _| lam_a[cs[x]] - lam_full[cs[x]]);
            let sol = m
                .lu()
                .solve(&rhs)
                .ok_or(Error::SingularSolve("regulator slopes"))?;
            if sol.iter().any(|v| !v.is_finite()) {
                return Err(Error::SingularSolve("regulator slopes"));
            }
            for (x, &site) in cs.iter().enumerate() {
                if sol[x] < -thr {
                    return Err(Error::ConsistencyFailure(format!(
                        "regulator slope {} at site {:?} on segment {k} is negative",
                        sol[x],
                        r.label(site)
                    )));
                }
                slope[site] = sol[x];
            }
        }
        slopes.push(slope);
    }
    RegulatorPath::from_slopes(times, slopes, tol)
}

/// A condition of the reflection problem that a candidate pair violated.
#[derive(Debug, Clone, PartialEq)]
pub enum OrpViolation {
    /// The regulator must never decrease.
    NegativeSlope { segment: usize, site: usize, slope: f64 },
    /// The regulator may grow at a site only while the path coordinate is 0.
    ComplementaritySlack {
        segment: usize,
        site: usize,
        coordinate: f64,
    },
    /// `zeta(t) - xi(t) - sum_i rho_t(i) w(i)` was not 0.
    Reconstruction { t: f64, residual: f64 },
    /// The reflected path left the nonnegative orthant.
    NegativeCoordinate { t: f64, site: usize, value: f64 },
}

impl std::fmt::Display for OrpViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OrpViolation::NegativeSlope { segment, site, slope } => write!(
                f,
                "regulator decreases on segment {segment}: slope {slope:e} at site {site}"
            ),
            OrpViolation::ComplementaritySlack { segment, site, coordinate } => write!(
                f,
                "regulator grows off the boundary on segment {segment}: site {site} sits at {coordinate:e}"
            ),
            OrpViolation::Reconstruction { t, residual } => write!(
                f,
                "path is not the reflected drift at t = {t}: residual {residual:e}"
            ),
            OrpViolation::NegativeCoordinate { t, site, value } => write!(
                f,
                "path coordinate {site} is {value:e} at t = {t}"
            ),
        }
    }
}

/// Result of checking a (path, regulator) pair against the reflection
/// conditions. `max_reconstruction_residual` and `min_coordinate` are raw
/// maxima over all sample times, reported even when they pass.
#[derive(Debug, Clone, PartialEq)]
pub struct OrpReport {
    pub max_reconstruction_residual: f64,
    pub min_coordinate: f64,
    pub samples: usize,
    pub violations: Vec<OrpViolation>,
}

impl OrpReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Verifies by direct substitution that `(path, regulator)` solves the
/// reflection problem for the free drift started at `u`:
///
/// 1. every regulator slope is nonnegative, and positive slope at a site
///    demands the path coordinate be 0 across the whole segment;
/// 2. at breakpoints, segment midpoints, and two post-terminal times, the
///    path equals the free drift plus the regulated push, within `tol`, and
///    stays nonnegative.
///
/// Nothing here uses the closed form behind [`regulator_path`]; this is the
/// independent check of the pair.
pub fn verify_orp(
    r: &RateMatrix,
    path: &PiecewiseLinearPath,
    regulator: &RegulatorPath,
    u: &SimplexPoint,
    tol: f64,
) -> Result<OrpReport> {
    let n = r.n();
    if path.dim() != n || regulator.dim() != n || u.dim() != n {
        return Err(Error::InvalidInput(
            "path, regulator, and start point must share the site count".into(),
        ));
    }
    if path.breakpoint_times() != regulator.breakpoint_times() {
        return Err(Error::InvalidInput(
            "path and regulator disagree on breakpoints".into(),
        ));
    }
    if u.sup_distance(path.point(0)) > tol {
        return Err(Error::InvalidInput(
            "start point is not where the path starts".into(),
        ));
    }
    let thr = r.flow_tol(tol);
    let lam_full = r.net_flow(&SiteSet::full(n))?.extended(n);
    // Reflection directions; a single site has no routing and no push.
    let w: Vec<Vec<f64>> = if n > 1 {
        let p = r.embedded()?;
        (0..n).map(|i| p.reflection_direction(i)).collect()
    } else {
        vec![vec![0.0]]
    };

    let times = path.breakpoint_times();
    let terminal = path.terminal_time();
    let mut violations = Vec::new();

    // Condition set 1: slopes per segment.
    for k in 0..times.len() {
        let t0 = times[k];
        let t1 = if k + 1 < times.len() {
            times[k + 1]
        } else {
            // The terminal segment is unbounded; probe a fixed stretch.
            t0 + 1.0 + 0.5 * terminal
        };
        let slope = regulator.slope_on(k);
        for (site, &slope_site) in slope.iter().enumerate() {
            if slope_site < -thr {
                violations.push(OrpViolation::NegativeSlope {
                    segment: k,
                    site,
                    slope: slope_site,
                });
            } else if slope_site > thr {
                for t in [t0, 0.5 * (t0 + t1), t1] {
                    let coord = path.evaluate(t)?.get(site);
                    if coord > tol {
                        violations.push(OrpViolation::ComplementaritySlack {
                            segment: k,
                            site,
                            coordinate: coord,
                        });
                        break;
                    }
                }
            }
        }
    }

    // Condition set 2: reconstruction and nonnegativity at sample times.
    let mut samples: Vec<f64> = Vec::new();
    for k in 0..times.len() {
        samples.push(times[k]);
        if k + 1 < times.len() {
            samples.push(0.5 * (times[k] + times[k + 1]));
        }
    }
    samples.push(terminal + 1.0);
    samples.push(terminal + 2.5);

    let mut max_residual = 0.0f64;
    let mut min_coordinate = f64::INFINITY;
    for &t in &samples {
        let zeta = path.evaluate(t)?;
        let rho = regulator.rho_at(t)?;
        for j in 0..n {
            let pushed: f64 = (0..n).map(|i| rho[i] * w[i][j]).sum();
            let recon = u.get(j) + t * lam_full[j] + pushed;
            let residual = (zeta.get(j) - recon).abs();
            if residual > max_residual {
                max_residual = residual;
            }
            if residual > tol {
                violations.push(OrpViolation::Reconstruction { t, residual });
            }
            let value = zeta.get(j);
            if value < min_coordinate {
                min_coordinate = value;
            }
            if value < -tol {
                violations.push(OrpViolation::NegativeCoordinate { t, site: j, value });
            }
        }
    }

    Ok(OrpReport {
        max_reconstruction_residual: max_residual,
        min_coordinate,
        samples: samples.len(),
        violations,
    })
}

/// Recovers positive exit rates from a routing matrix and a balanced drift.
///
/// Finds `rates` with `rates(i) p(i, j)` producing net flow `lam` over the
/// full site set, i.e. `(I - p^T) rates = -lam`. The kernel of `I - p^T` is
/// spanned by the routing chain's stationary law `mu`, so the system is
/// solved with the gauge `sum(rates) = 0` via one bordered factorization and
/// then shifted along `mu`: the smallest shift on the grid `{0, 1, 2, 4, ..}`
/// that lifts every rate to at least `1e-6`. Requires `sum(lam)` to vanish
/// within `tol`.
pub fn rates_from_probabilities(
    p: &StochasticMatrix,
    lam: &[f64],
    tol: f64,
) -> Result<Vec<f64>> {
    const MARGIN: f64 = 1e-6;
    let n = p.n();
    if lam.len() != n {
        return Err(Error::InvalidInput(format!(
            "drift has {} entries for {} sites",
            lam.len(),
            n
        )));
    }
    if lam.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("drift entries must be finite".into()));
    }
    let drift_sum: f64 = lam.iter().sum();
    if drift_sum.abs() > tol {
        return Err(Error::DriftNotBalanced(drift_sum.abs()));
    }
    let mu = p.stationary()?;

    // Bordered system [[I - p^T, mu], [1^T, 0]] (a, c) = (-lam, 0). Applying
    // 1^T to the first block forces c = 0 for balanced lam, and the border
    // pins the gauge sum(a) = 0, so the system is nonsingular.
    let mut m = DMatrix::zeros(n + 1, n + 1);
    for x in 0..n {
        for y in 0..n {
            let d = if x == y { 1.0 } else { 0.0 };
            m[(x, y)] = d - p.prob(y, x);
        }
        m[(x, n)] = mu[x];
        m[(n, x)] = 1.0;
    }
    let mut b = DVector::zeros(n + 1);
    for x in 0..n {
        b[x] = -lam[x];
    }
    let sol = m
        .lu()
        .solve(&b)
        .ok_or(Error::SingularSolve("rate recovery"))?;
    if sol.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSolve("rate recovery"));
    }
    let a: Vec<f64> = (0..n).map(|i| sol[i]).collect();

    // Shift along the kernel direction mu (strictly positive) until every
    // rate clears the margin; snapping to a doubling grid keeps the choice
    // stable under tiny input perturbations.
    let mut required = 0.0f64;
    for i in 0..n {
        required = required.max((MARGIN - a[i]) / mu[i]);
    }
    let mut shift = if required <= 0.0 {
        0.0
    } else {
        let mut g = 1.0;
        while g < required {
            g *= 2.0;
        }
        g
    };
    let mut rates: Vec<f64> = (0..n).map(|i| a[i] + shift * mu[i]).collect();
    // Rounding can nick the margin when the grid lands exactly on the
    // requirement; one more doubling restores it with room to spare.
    if rates.iter().any(|v| *v < MARGIN) {
        shift = if shift == 0.0 { 1.0 } else { 2.0 * shift };
        rates = (0..n).map(|i| a[i] + shift * mu[i]).collect();
    }

    // The shift lives in the kernel, so the defining equation still holds;
    // fail loudly if conditioning ate it.
    let mut residual = 0.0f64;
    let linf = lam.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for j in 0..n {
        let v: f64 = rates[j] - (0..n).map(|i| p.prob(i, j) * rates[i]).sum::<f64>() + lam[j];
        residual = residual.max(v.abs());
    }
    if residual > 1e-7 * linf.max(1.0) {
        return Err(Error::SingularSolve("rate recovery"));
    }
    Ok(rates)
}
