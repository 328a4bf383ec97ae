//! The piecewise-linear fluid path of the rescaled process.
//!
//! Away from the boundary the rescaled occupancy moves with a constant
//! velocity determined only by which sites carry mass: the net flow of the
//! minimal absorbing superset of the support, extended by zero. When a
//! draining coordinate hits zero the support shrinks, the velocity is
//! recomputed, and the construction repeats. Since the absorbing superset
//! strictly shrinks at every breakpoint, the path has at most `n - 1`
//! segments and is eventually constant.

use crate::absorbing::minimal_absorbing;
use crate::error::Error;
use crate::markov::{RateMatrix, SiteSet};
use crate::simplex::SimplexPoint;
use crate::Result;

/// Fluid velocity at `u`: the net flow over the minimal absorbing superset
/// of the support of `u`, extended by zero to all sites.
pub fn velocity(r: &RateMatrix, u: &SimplexPoint, tol: f64) -> Result<Vec<f64>> {
    if u.dim() != r.n() {
        return Err(Error::InvalidInput(format!(
            "point has {} coordinates for {} sites",
            u.dim(),
            r.n()
        )));
    }
    let support = SiteSet::from_indices(u.support_indices(tol), r.n())?;
    let absorbing = minimal_absorbing(r, &support, tol)?;
    let flow = r.net_flow(absorbing.result())?;
    Ok(flow.extended(r.n()))
}

/// When the linear motion `u + t * lam` first pushes a supported coordinate
/// to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExitTime {
    Finite(f64),
    /// No coordinate drains; the motion is stationary and never exits.
    Never,
}

impl ExitTime {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExitTime::Finite(_))
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            ExitTime::Finite(t) => Some(*t),
            ExitTime::Never => None,
        }
    }
}

/// First boundary-hitting time of the motion `u + t * lam`: the minimum of
/// `-u(i) / lam(i)` over supported coordinates draining faster than `tol`
/// on the normalized rate scale. [`ExitTime::Never`] iff none drain, which
/// for a fluid velocity means the flow is null.
pub fn exit_time(r: &RateMatrix, u: &SimplexPoint, lam: &[f64], tol: f64) -> ExitTime {
    let thr = r.flow_tol(tol);
    let mut best = f64::INFINITY;
    for i in u.support_indices(tol) {
        if lam[i] < -thr {
            best = best.min(-u.get(i) / lam[i]);
        }
    }
    if best.is_finite() {
        ExitTime::Finite(best)
    } else {
        ExitTime::Never
    }
}

/// A continuous piecewise-linear path on the simplex, constant after its
/// last breakpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearPath {
    times: Vec<f64>,
    points: Vec<SimplexPoint>,
    /// Velocity on `[times[k], times[k+1])`; the last entry is the zero
    /// vector of the terminal segment.
    velocities: Vec<Vec<f64>>,
    tol: f64,
}

impl PiecewiseLinearPath {
    /// Breakpoint times, starting at 0, strictly increasing.
    pub fn breakpoint_times(&self) -> &[f64] {
        &self.times
    }

    /// Path values at the breakpoints.
    pub fn points(&self) -> &[SimplexPoint] {
        &self.points
    }

    pub fn point(&self, k: usize) -> &SimplexPoint {
        &self.points[k]
    }

    /// Velocity on segment `k` (the one starting at breakpoint `k`).
    pub fn velocity_on(&self, k: usize) -> &[f64] {
        &self.velocities[k]
    }

    /// Number of linear segments before the path turns constant.
    pub fn segments(&self) -> usize {
        self.times.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    /// Tolerance the path was built with; evaluation reuses it.
    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// The last breakpoint time, after which the path is constant.
    pub fn terminal_time(&self) -> f64 {
        *self.times.last().expect("paths have at least one breakpoint")
    }

    pub fn terminal(&self) -> &SimplexPoint {
        self.points.last().expect("paths have at least one breakpoint")
    }

    /// The path value at `t >= 0`.
    pub fn evaluate(&self, t: f64) -> Result<SimplexPoint> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidInput(format!("evaluation time {t}")));
        }
        let k = self.times.iter().rposition(|&bt| bt <= t).unwrap_or(0);
        if k + 1 == self.times.len() {
            return Ok(self.terminal().clone());
        }
        let dt = t - self.times[k];
        let base = &self.points[k];
        let lam = &self.velocities[k];
        let values = (0..base.dim()).map(|i| base.get(i) + dt * lam[i]).collect();
        SimplexPoint::new(values, self.tol)
    }
}

/// Builds the fluid path started at `u`: follow the velocity of the current
/// support face until a draining coordinate hits zero, clamp every
/// coordinate that arrives within `tol` of zero together, renormalize, and
/// recurse until the flow is null.
pub fn fluid_trajectory(r: &RateMatrix, u: &SimplexPoint, tol: f64) -> Result<PiecewiseLinearPath> {
    let n = r.n();
    if u.dim() != n {
        return Err(Error::InvalidInput(format!(
            "point has {} coordinates for {} sites",
            u.dim(),
            n
        )));
    }
    let mut times = vec![0.0];
    let mut points = vec![u.clone()];
    let mut velocities: Vec<Vec<f64>> = Vec::new();
    loop {
        let v = points.last().expect("nonempty");
        let lam = velocity(r, v, tol)?;
        match exit_time(r, v, &lam, tol) {
            ExitTime::Never => {
                velocities.push(vec![0.0; n]);
                break;
            }
            ExitTime::Finite(dt) => {
                let mut next: Vec<f64> = (0..n).map(|i| v.get(i) + dt * lam[i]).collect();
                // Coordinates reaching the boundary together clamp together;
                // this also clears negative rounding dust before validation.
                for x in next.iter_mut() {
                    if *x <= tol {
                        *x = 0.0;
                    }
                }
                let next = SimplexPoint::new(next, tol)?;
                velocities.push(lam);
                times.push(times.last().unwrap() + dt);
                points.push(next);
                // The absorbing superset shrinks strictly at each breakpoint,
                // so more than n of them means the tolerance broke down.
                if points.len() > n + 1 {
                    return Err(Error::NonTermination(n + 1));
                }
            }
        }
    }
    Ok(PiecewiseLinearPath {
        times,
        points,
        velocities,
        tol,
    })
}
