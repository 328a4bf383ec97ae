//! Flow-absorbing site sets.
//!
//! A site set `A` absorbs the fluid when no site outside it would fill up if
//! adjoined: either `A` is everything, or for every outside site `j` the net
//! flow into `j` under the trace on `A + {j}` is nonpositive. The empty set
//! absorbs trivially. Absorbing sets are closed under nonempty intersection,
//! so every nonempty support `S` has a unique minimal absorbing superset;
//! [`minimal_absorbing`] finds it by peeling outflow sites from the full set.

use crate::error::Error;
use crate::markov::{RateMatrix, SiteSet};
use crate::Result;

/// Outcome of an absorbing-set test.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsorbingReport {
    subset: SiteSet,
    absorbing: bool,
    /// For each outside site `j`: the net flow `j` would receive once
    /// adjoined. The subset absorbs iff none of these is positive.
    witnesses: Vec<(usize, f64)>,
}

impl AbsorbingReport {
    pub fn subset(&self) -> &SiteSet {
        &self.subset
    }

    pub fn is_absorbing(&self) -> bool {
        self.absorbing
    }

    pub fn witnesses(&self) -> &[(usize, f64)] {
        &self.witnesses
    }
}

/// Tests whether `subset` (possibly empty, possibly everything) absorbs the
/// flow of `r`. Flow comparisons use `tol` on the normalized rate scale.
pub fn is_r_absorbing(r: &RateMatrix, subset: &SiteSet, tol: f64) -> Result<AbsorbingReport> {
    if let Some(bad) = subset.iter().find(|&i| i >= r.n()) {
        return Err(Error::UnknownSite(format!("index {bad}")));
    }
    let thr = r.flow_tol(tol);
    let mut witnesses = Vec::new();
    let mut absorbing = true;
    for j in subset.complement(r.n()).iter() {
        let grown = subset.with_site(j);
        let flow = r.net_flow(&grown)?;
        let v = flow.value_of(j).expect("adjoined site is in the carrier");
        if v > thr {
            absorbing = false;
        }
        witnesses.push((j, v));
    }
    Ok(AbsorbingReport {
        subset: subset.clone(),
        absorbing,
        witnesses,
    })
}

/// One peeling step of [`minimal_absorbing`].
#[derive(Debug, Clone, PartialEq)]
pub struct PeelStep {
    /// The candidate set at the start of the step.
    pub current: SiteSet,
    /// Net flow over `current`, in carrier order.
    pub flow: Vec<f64>,
    /// Sites outside the support whose flow was nonpositive; they get peeled.
    pub removed: SiteSet,
}

/// The minimal absorbing superset of a support, with the peeling iterations
/// that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimalAbsorbingTrace {
    support: SiteSet,
    steps: Vec<PeelStep>,
    result: SiteSet,
}

impl MinimalAbsorbingTrace {
    pub fn support(&self) -> &SiteSet {
        &self.support
    }

    pub fn steps(&self) -> &[PeelStep] {
        &self.steps
    }

    pub fn result(&self) -> &SiteSet {
        &self.result
    }
}

/// Finds the smallest absorbing set containing the nonempty `support`.
///
/// Starts from everything and repeatedly removes the non-support sites whose
/// net flow under the current trace is nonpositive (within `tol` on the
/// normalized rate scale), until only inflow sites remain. The result is the
/// unique absorbing superset `A` with strictly positive flow on every site of
/// `A` outside the support.
pub fn minimal_absorbing(
    r: &RateMatrix,
    support: &SiteSet,
    tol: f64,
) -> Result<MinimalAbsorbingTrace> {
    if support.is_empty() {
        return Err(Error::EmptySiteSet);
    }
    if let Some(bad) = support.iter().find(|&i| i >= r.n()) {
        return Err(Error::UnknownSite(format!("index {bad}")));
    }
    let thr = r.flow_tol(tol);
    let mut current = SiteSet::full(r.n());
    let mut steps = Vec::new();
    loop {
        let flow = r.net_flow(&current)?;
        let removable: Vec<usize> = current
            .iter()
            .filter(|&i| {
                !support.contains(i) && flow.value_of(i).expect("carrier site") <= thr
            })
            .collect();
        let removed = SiteSet::from_indices(removable, r.n())?;
        let done = removed.is_empty();
        steps.push(PeelStep {
            current: current.clone(),
            flow: flow.values().to_vec(),
            removed: removed.clone(),
        });
        if done {
            break;
        }
        // Each pass strictly shrinks the candidate, so this ends within n steps.
        current = current.without(&removed);
    }
    Ok(MinimalAbsorbingTrace {
        support: support.clone(),
        steps,
        result: current,
    })
}

/// Sites of maximal stationary mass (within `tol`, which is dimensionless
/// here). Faces supported inside this set are exactly the ones the fluid
/// never leaves.
pub fn bottleneck_set(r: &RateMatrix, tol: f64) -> Result<SiteSet> {
    let mu = r.invariant_distribution()?;
    let max = mu.values().iter().fold(f64::MIN, |a, &b| a.max(b));
    SiteSet::from_indices(
        (0..r.n()).filter(|&i| mu.get(i) >= max - tol),
        r.n(),
    )
}

/// Enumerates every nonempty absorbing subset, in ascending bitmask order.
///
/// Exhaustive over `2^n` subsets, so it refuses more than
/// [`crate::MAX_ENUMERATION_SITES`] sites.
pub fn enumerate_absorbing(r: &RateMatrix, tol: f64) -> Result<Vec<SiteSet>> {
    let n = r.n();
    if n > crate::MAX_ENUMERATION_SITES {
        return Err(Error::TooManySites {
            n,
            max: crate::MAX_ENUMERATION_SITES,
        });
    }
    let mut out = Vec::new();
    for mask in 1u32..(1u32 << n) {
        let subset = SiteSet::from_indices((0..n).filter(|&i| mask & (1 << i) != 0), n)?;
        if is_r_absorbing(r, &subset, tol)?.is_absorbing() {
            out.push(subset);
        }
    }
    Ok(out)
}
