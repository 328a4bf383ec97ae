//! Validated rate matrices and the linear algebra of watched walks.
//!
//! Everything downstream (absorbing sets, fluid velocities, regulators)
//! reduces to a few primitives on an irreducible rate matrix: the embedded
//! routing chain, the stationary distribution, hitting probabilities of a
//! watched site set, the induced rates of the walk observed only on that set
//! (its trace), and the stationary net flow those trace rates produce.

use std::collections::HashSet;

use nalgebra::{DMatrix, DVector};

use crate::error::Error;
use crate::simplex::SimplexPoint;
use crate::Result;

/// A sorted, deduplicated set of site indices relative to one [`RateMatrix`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SiteSet {
    indices: Vec<usize>,
}

impl SiteSet {
    /// Builds a set from arbitrary indices, checking them against the site
    /// count `n`. Duplicates collapse.
    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I, n: usize) -> Result<Self> {
        let mut v: Vec<usize> = indices.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        if let Some(&bad) = v.iter().find(|&&i| i >= n) {
            return Err(Error::UnknownSite(format!("index {bad}")));
        }
        Ok(SiteSet { indices: v })
    }

    /// The full set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        SiteSet {
            indices: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, site: usize) -> bool {
        self.indices.binary_search(&site).is_ok()
    }

    /// Position of `site` within the sorted set, if present.
    pub fn position(&self, site: usize) -> Option<usize> {
        self.indices.binary_search(&site).ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.indices
    }

    pub fn complement(&self, n: usize) -> SiteSet {
        SiteSet {
            indices: (0..n).filter(|&i| !self.contains(i)).collect(),
        }
    }

    /// This set with `site` added.
    pub fn with_site(&self, site: usize) -> SiteSet {
        let mut v = self.indices.clone();
        if let Err(pos) = v.binary_search(&site) {
            v.insert(pos, site);
        }
        SiteSet { indices: v }
    }

    /// This set with every member of `remove` dropped.
    pub fn without(&self, remove: &SiteSet) -> SiteSet {
        SiteSet {
            indices: self
                .indices
                .iter()
                .copied()
                .filter(|&i| !remove.contains(i))
                .collect(),
        }
    }

    pub fn intersection(&self, other: &SiteSet) -> SiteSet {
        SiteSet {
            indices: self
                .indices
                .iter()
                .copied()
                .filter(|&i| other.contains(i))
                .collect(),
        }
    }

    pub fn is_subset_of(&self, other: &SiteSet) -> bool {
        self.indices.iter().all(|&i| other.contains(i))
    }
}

/// An irreducible matrix of jump rates over labelled sites.
///
/// Invariants, enforced at construction: the matrix is square, entries are
/// finite and nonnegative, the diagonal is zero, and the support digraph is
/// strongly connected. A single site is admitted as a degenerate walk with no
/// jumps; it shows up as the trace of a larger walk on one watched site.
#[derive(Debug, Clone, PartialEq)]
pub struct RateMatrix {
    labels: Vec<String>,
    rates: DMatrix<f64>,
    exit: Vec<f64>,
    scale: f64,
}

impl RateMatrix {
    /// Validates raw rates into a usable matrix.
    pub fn new(labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::EmptySiteSet);
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::DuplicateSite(l.clone()));
            }
        }
        if rows.len() != n {
            return Err(Error::NotSquare {
                expected: n,
                got: rows.len(),
            });
        }
        for row in &rows {
            if row.len() != n {
                return Err(Error::NotSquare {
                    expected: n,
                    got: row.len(),
                });
            }
        }
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidRate {
                        from: labels[i].clone(),
                        to: labels[j].clone(),
                        value: v,
                    });
                }
                if i == j && v != 0.0 {
                    return Err(Error::NonZeroDiagonal(labels[i].clone()));
                }
            }
        }
        if n > 1 {
            if let Err((from, to)) = strongly_connected(n, |i, j| rows[i][j] > 0.0) {
                return Err(Error::NotIrreducible {
                    from: from.into_iter().map(|i| labels[i].clone()).collect(),
                    to: to.into_iter().map(|i| labels[i].clone()).collect(),
                });
            }
        }
        let rates = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        let exit: Vec<f64> = (0..n).map(|i| rates.row(i).sum()).collect();
        let scale = rates.iter().fold(0.0f64, |a, &b| a.max(b));
        Ok(RateMatrix {
            labels,
            rates,
            exit,
            scale,
        })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    /// Jump rate from `i` to `j`.
    pub fn rate(&self, i: usize, j: usize) -> f64 {
        self.rates[(i, j)]
    }

    /// Total exit rate `r(i)`, the row sum.
    pub fn exit_rate(&self, i: usize) -> f64 {
        self.exit[i]
    }

    /// Largest single rate; the reference scale for flow comparisons.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Absolute threshold for comparing flow values: `tol` on the scale where
    /// the largest rate is 1.
    pub fn flow_tol(&self, tol: f64) -> f64 {
        tol * self.scale
    }

    /// Resolves labels into a site set.
    pub fn site_set<S: AsRef<str>>(&self, labels: &[S]) -> Result<SiteSet> {
        if labels.is_empty() {
            return Err(Error::EmptySiteSet);
        }
        let mut idx = Vec::with_capacity(labels.len());
        for l in labels {
            let l = l.as_ref();
            match self.labels.iter().position(|x| x == l) {
                Some(i) => idx.push(i),
                None => return Err(Error::UnknownSite(l.to_string())),
            }
        }
        SiteSet::from_indices(idx, self.n())
    }

    /// Labels of the sites in `set`, in index order.
    pub fn labels_of(&self, set: &SiteSet) -> Vec<String> {
        set.iter().map(|i| self.labels[i].clone()).collect()
    }

    fn check_set(&self, s: &SiteSet) -> Result<()> {
        if s.is_empty() {
            return Err(Error::EmptySiteSet);
        }
        if let Some(bad) = s.iter().find(|&i| i >= self.n()) {
            return Err(Error::UnknownSite(format!("index {bad}")));
        }
        Ok(())
    }

    /// The routing chain: `p(i, j) = r(i, j) / r(i)`.
    ///
    /// Fails on the degenerate single-site walk, whose exit rate is zero.
    pub fn embedded(&self) -> Result<StochasticMatrix> {
        for i in 0..self.n() {
            if self.exit[i] <= 0.0 {
                return Err(Error::NotStochastic(format!(
                    "site {:?} has zero exit rate; the embedded chain is undefined",
                    self.labels[i]
                )));
            }
        }
        let n = self.n();
        let probs = DMatrix::from_fn(n, n, |i, j| self.rates[(i, j)] / self.exit[i]);
        Ok(StochasticMatrix {
            labels: self.labels.clone(),
            probs,
        })
    }

    /// The unique stationary distribution of the walk.
    ///
    /// Solves the balance equations with the normalization `sum(mu) = 1` by
    /// dense LU. Returns `SingularSolve` if the factorization fails or the
    /// balance residual exceeds `1e-7` on the normalized rate scale.
    pub fn invariant_distribution(&self) -> Result<SimplexPoint> {
        if self.n() == 1 {
            return SimplexPoint::new(vec![1.0], crate::DEFAULT_TOL);
        }
        let mu = stationary_from(
            &self.rates,
            &self.exit,
            self.scale,
            "stationary distribution",
        )?;
        SimplexPoint::new(mu, crate::DEFAULT_TOL)
    }

    /// For each site `k`, the probability that the walk started at `k` enters
    /// the watched set at each of its sites. Rows of watched sites are the
    /// corresponding unit vectors.
    pub fn hitting_probabilities(&self, watched: &SiteSet) -> Result<HittingProbabilityMatrix> {
        self.check_set(watched)?;
        let n = self.n();
        let a = watched.as_slice();
        let c: Vec<usize> = watched.complement(n).as_slice().to_vec();
        let mut probs = DMatrix::zeros(n, a.len());
        for (pos, &i) in a.iter().enumerate() {
            probs[(i, pos)] = 1.0;
        }
        if !c.is_empty() {
            // Harmonic off the watched set: (r(k) I - r|_C) h = r(k, target).
            let m = DMatrix::from_fn(c.len(), c.len(), |x, y| {
                let d = if x == y { self.exit[c[x]] } else { 0.0 };
                d - self.rates[(c[x], c[y])]
            });
            let rhs = DMatrix::from_fn(c.len(), a.len(), |x, y| self.rates[(c[x], a[y])]);
            let sol = m
                .lu()
                .solve(&rhs)
                .ok_or(Error::SingularSolve("hitting probabilities"))?;
            if sol.iter().any(|v| !v.is_finite()) {
                return Err(Error::SingularSolve("hitting probabilities"));
            }
            for (x, &k) in c.iter().enumerate() {
                for y in 0..a.len() {
                    probs[(k, y)] = sol[(x, y)];
                }
            }
        }
        Ok(HittingProbabilityMatrix {
            target: watched.clone(),
            probs,
        })
    }

    /// Rates of the walk watched only on `watched`: direct jumps plus the
    /// excursions through unwatched sites, weighted by where they re-enter.
    ///
    /// Watching everything returns `self` exactly. The result is validated,
    /// so it is again irreducible on its sites.
    pub fn trace(&self, watched: &SiteSet) -> Result<RateMatrix> {
        self.check_set(watched)?;
        if watched.len() == self.n() {
            return Ok(self.clone());
        }
        let h = self.hitting_probabilities(watched)?;
        let a = watched.as_slice();
        let c: Vec<usize> = watched.complement(self.n()).as_slice().to_vec();
        let rows: Vec<Vec<f64>> = a
            .iter()
            .enumerate()
            .map(|(pi, &i)| {
                a.iter()
                    .enumerate()
                    .map(|(pj, &j)| {
                        if pi == pj {
                            0.0
                        } else {
                            let rate = self.rates[(i, j)]
                                + c.iter()
                                    .map(|&k| self.rates[(i, k)] * h.probs[(k, pj)])
                                    .sum::<f64>();
                            // A true-zero rate can come back as -1e-17 of
                            // solver dust; genuine negatives still fail the
                            // constructor's validation below.
                            if rate < 0.0 && rate >= -1e-12 * self.scale {
                                0.0
                            } else {
                                rate
                            }
                        }
                    })
                    .collect()
            })
            .collect();
        RateMatrix::new(self.labels_of(watched), rows)
    }

    /// Same trace, computed by eliminating unwatched sites one at a time:
    /// removing `k` rewires `i -> j` as `r(i, j) + r(i, k) r(k, j) / r(k)`.
    ///
    /// `order` lists the unwatched sites in removal order (by index into this
    /// matrix); `None` removes them in ascending order. Any order yields the
    /// same trace up to rounding.
    pub fn trace_recursive(&self, watched: &SiteSet, order: Option<&[usize]>) -> Result<RateMatrix> {
        self.check_set(watched)?;
        let n = self.n();
        let complement = watched.complement(n);
        let order: Vec<usize> = match order {
            Some(o) => {
                let s = SiteSet::from_indices(o.iter().copied(), n)?;
                if s != complement || o.len() != complement.len() {
                    return Err(Error::InvalidInput(
                        "removal order must list each unwatched site exactly once".into(),
                    ));
                }
                o.to_vec()
            }
            None => complement.as_slice().to_vec(),
        };
        let mut alive: Vec<usize> = (0..n).collect();
        let mut cur: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| self.rates[(i, j)]).collect())
            .collect();
        for &site in &order {
            let k = alive
                .iter()
                .position(|&s| s == site)
                .expect("removal site still alive");
            let m = alive.len();
            let exit_k: f64 = cur[k].iter().sum();
            if exit_k <= 0.0 {
                return Err(Error::SingularSolve("one-site elimination"));
            }
            let mut next: Vec<Vec<f64>> = Vec::with_capacity(m - 1);
            for i in 0..m {
                if i == k {
                    continue;
                }
                let mut row = Vec::with_capacity(m - 1);
                for j in 0..m {
                    if j == k {
                        continue;
                    }
                    // Excursions i -> k -> i return where they started; they
                    // only dilate time, so no rate is added on the diagonal.
                    row.push(if i == j {
                        0.0
                    } else {
                        cur[i][j] + cur[i][k] * cur[k][j] / exit_k
                    });
                }
                next.push(row);
            }
            alive.remove(k);
            cur = next;
        }
        let labels = alive.iter().map(|&i| self.labels[i].clone()).collect();
        RateMatrix::new(labels, cur)
    }

    /// Stationary net flow into each watched site under the trace rates:
    /// `flow(i) = sum_j trace(j, i) - trace(i, j)`. Entries sum to zero.
    pub fn net_flow(&self, watched: &SiteSet) -> Result<FlowVector> {
        let tr = self.trace(watched)?;
        let m = watched.len();
        let values: Vec<f64> = (0..m)
            .map(|pi| {
                (0..m)
                    .map(|pj| tr.rates[(pj, pi)] - tr.rates[(pi, pj)])
                    .sum()
            })
            .collect();
        Ok(FlowVector {
            carrier: watched.clone(),
            values,
        })
    }
}

/// A stochastic routing matrix with zero diagonal over labelled sites.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    labels: Vec<String>,
    probs: DMatrix<f64>,
}

impl StochasticMatrix {
    /// Validates raw probabilities: square, finite, nonnegative, zero
    /// diagonal, rows summing to 1 within `tol`, and irreducible.
    pub fn new(labels: Vec<String>, rows: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::EmptySiteSet);
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::DuplicateSite(l.clone()));
            }
        }
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotStochastic("matrix is not square".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            let mut sum = 0.0;
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::NotStochastic(format!(
                        "entry ({:?}, {:?}) is {v}",
                        labels[i], labels[j]
                    )));
                }
                if i == j && v != 0.0 {
                    return Err(Error::NotStochastic(format!(
                        "diagonal entry at {:?} is {v}",
                        labels[i]
                    )));
                }
                sum += v;
            }
            if (sum - 1.0).abs() > tol {
                return Err(Error::NotStochastic(format!(
                    "row {:?} sums to {sum}",
                    labels[i]
                )));
            }
        }
        if n > 1 {
            if let Err((from, to)) = strongly_connected(n, |i, j| rows[i][j] > 0.0) {
                return Err(Error::NotIrreducible {
                    from: from.into_iter().map(|i| labels[i].clone()).collect(),
                    to: to.into_iter().map(|i| labels[i].clone()).collect(),
                });
            }
        } else {
            return Err(Error::NotStochastic(
                "a single site cannot route anywhere".into(),
            ));
        }
        let probs = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Ok(StochasticMatrix { labels, probs })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn prob(&self, i: usize, j: usize) -> f64 {
        self.probs[(i, j)]
    }

    /// The stationary distribution of the routing chain.
    pub fn stationary(&self) -> Result<Vec<f64>> {
        let exit = vec![1.0; self.n()];
        stationary_from(&self.probs, &exit, 1.0, "routing stationary distribution")
    }

    /// Reflection direction of site `i`: the unit vector at `i` minus the
    /// routing row `p(i, .)`. Pushing mass along it feeds the neighbors of
    /// `i` in routing proportion while draining `i` itself.
    pub fn reflection_direction(&self, i: usize) -> Vec<f64> {
        (0..self.n())
            .map(|j| if j == i { 1.0 } else { -self.probs[(i, j)] })
            .collect()
    }
}

/// Hitting probabilities into a watched set, one column per watched site.
#[derive(Debug, Clone, PartialEq)]
pub struct HittingProbabilityMatrix {
    target: SiteSet,
    probs: DMatrix<f64>,
}

impl HittingProbabilityMatrix {
    pub fn target(&self) -> &SiteSet {
        &self.target
    }

    /// Number of sites of the underlying walk.
    pub fn n(&self) -> usize {
        self.probs.nrows()
    }

    /// Probability that the walk from `from` enters the watched set at
    /// `target_site`. Panics if `target_site` is not watched.
    pub fn prob(&self, from: usize, target_site: usize) -> f64 {
        let pos = self
            .target
            .position(target_site)
            .expect("site is not in the watched set");
        self.probs[(from, pos)]
    }
}

/// A net-flow vector supported on a site set; entries sum to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowVector {
    carrier: SiteSet,
    values: Vec<f64>,
}

impl FlowVector {
    pub fn carrier(&self) -> &SiteSet {
        &self.carrier
    }

    /// Values in carrier order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Flow at `site`, if the site is in the carrier.
    pub fn value_of(&self, site: usize) -> Option<f64> {
        self.carrier.position(site).map(|p| self.values[p])
    }

    /// The flow extended by zero to all `n` sites.
    pub fn extended(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for (pos, site) in self.carrier.iter().enumerate() {
            out[site] = self.values[pos];
        }
        out
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }
}

/// Solves the balance equations `sum_i mu(i) w(i, j) = mu(j) exit(j)` with
/// `sum(mu) = 1`. The last balance equation is redundant (the generator's
/// rows sum to zero) and is replaced by the normalization, which makes the
/// system nonsingular exactly when the chain is irreducible.
fn stationary_from(
    weights: &DMatrix<f64>,
    exit: &[f64],
    scale: f64,
    context: &'static str,
) -> Result<Vec<f64>> {
    let n = exit.len();
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            m[(j, i)] = if i == j {
                -exit[i]
            } else {
                weights[(i, j)]
            };
        }
    }
    for i in 0..n {
        m[(n - 1, i)] = 1.0;
    }
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    let mu = m.lu().solve(&b).ok_or(Error::SingularSolve(context))?;
    if mu.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSolve(context));
    }
    // Check every balance equation, including the one replaced above.
    let mut res = 0.0f64;
    for j in 0..n {
        let v: f64 = (0..n)
            .map(|i| if i == j { 0.0 } else { mu[i] * weights[(i, j)] })
            .sum::<f64>()
            - mu[j] * exit[j];
        res = res.max(v.abs());
    }
    if res > 1e-7 * scale {
        return Err(Error::SingularSolve(context));
    }
    Ok(mu.iter().copied().collect())
}

/// Checks strong connectivity of the digraph `edge` on `n` nodes. On failure
/// returns a partition `(from, to)` with no edge from `from` into `to`.
fn strongly_connected(
    n: usize,
    edge: impl Fn(usize, usize) -> bool,
) -> std::result::Result<(), (Vec<usize>, Vec<usize>)> {
    let forward = reach(n, &edge);
    if forward.iter().any(|&r| !r) {
        // The forward closure of site 0 has no edge leaving it.
        let from: Vec<usize> = (0..n).filter(|&i| forward[i]).collect();
        let to: Vec<usize> = (0..n).filter(|&i| !forward[i]).collect();
        return Err((from, to));
    }
    let backward = reach(n, |i, j| edge(j, i));
    if backward.iter().any(|&r| !r) {
        // Sites that never reach 0 have no edge into the set that does.
        let from: Vec<usize> = (0..n).filter(|&i| !backward[i]).collect();
        let to: Vec<usize> = (0..n).filter(|&i| backward[i]).collect();
        return Err((from, to));
    }
    Ok(())
}

fn reach(n: usize, edge: impl Fn(usize, usize) -> bool) -> Vec<bool> {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for (j, seen_j) in seen.iter_mut().enumerate() {
            if !*seen_j && edge(i, j) {
                *seen_j = true;
                stack.push(j);
            }
        }
    }
    seen
}
