//! Chi-squared goodness-of-fit test for uniformity over a constrained simplex.
//!
//! Vectors are projected bijectively by dropping the last coordinate. The
//! unit cube of the projected space is cut into `n_b` equal bins per axis and
//! only bins whose corners all satisfy the exact description of the
//! projected feasible region are kept. Under uniformity every kept bin has
//! the same expected count `E = sum(O_b) / |B|`, and
//! `chi2 = sum_b (O_b - E)^2 / E` has `|B| - 1` degrees of freedom.

use serde::Serialize;

use crate::constraints::ConstraintSet;
use crate::error::{Error, Result};
use crate::sampler::{merge_stats, run_sharded, Sampler, SamplingStats};
use crate::simplex::{RngState, SimplexVector};
pub use crate::stats::incomplete_gamma_q;
use crate::stats::chi2_sf;

/// Corner feasibility slack.
pub const CORNER_TOL: f64 = 1e-12;
/// Largest `n_b^(n-1)` grid that will be enumerated.
pub const MAX_GRID_CELLS: usize = 1 << 24;
/// Target expected count per bin for [`default_bins`].
pub const DEFAULT_TARGET_E: f64 = 50.0;
const MIN_VALID_E: f64 = 5.0;

/// The feasible region in the projected coordinates `x_1..x_(n-1)`.
#[derive(Clone, Debug)]
pub struct ProjectedPolytope {
    constraints: ConstraintSet,
    /// `(coeffs, rhs)` over the projected coordinates, meaning `coeffs.p <= rhs`.
    halfspaces: Vec<(Vec<f64>, f64)>,
    warnings: Vec<String>,
}

impl ProjectedPolytope {
    pub fn new(cs: &ConstraintSet) -> Self {
        let n = cs.dim();
        let d = n - 1;
        let mut halfspaces = Vec::new();
        for j in 0..d {
            let mut lo = vec![0.0; d];
            lo[j] = -1.0;
            halfspaces.push((lo, 0.0));
            let mut hi = vec![0.0; d];
            hi[j] = 1.0;
            halfspaces.push((hi, 1.0));
        }
        // x_n = 1 - sum(p) >= 0
        halfspaces.push((vec![1.0; d], 1.0));
        for hs in cs.expand_linear() {
            let last = hs.coeffs[d];
            let coeffs: Vec<f64> = hs.coeffs[..d].iter().map(|a| a - last).collect();
            halfspaces.push((coeffs, hs.rhs - last));
        }
        let mut warnings = Vec::new();
        for (k, c) in cs.nonlinear.iter().enumerate() {
            let corner_exact = c
                .terms
                .iter()
                .all(|t| t.exponents[d] == 0 && t.exponents.iter().all(|&e| e <= 1));
            if !corner_exact {
                warnings.push(format!(
                    "nonlinear constraint {k} is not multilinear in the kept coordinates; \
                     corner checks may keep bins that cross its boundary"
                ));
            }
        }
        if !cs.predicates.is_empty() {
            warnings.push("predicate constraints are only checked at bin corners".into());
        }
        ProjectedPolytope { constraints: cs.clone(), halfspaces, warnings }
    }

    pub fn constraints(&self) -> &ConstraintSet {
        &self.constraints
    }

    pub fn dim(&self) -> usize {
        self.constraints.dim() - 1
    }

    /// Rebuilds the full vector from its projection.
    pub fn lift(p: &[f64]) -> Vec<f64> {
        let mut x = p.to_vec();
        x.push(1.0 - p.iter().sum::<f64>());
        x
    }

    /// Membership of a projected point, with [`CORNER_TOL`] slack on the
    /// linear description and an exact check of nonlinear constraints.
    pub fn contains(&self, p: &[f64]) -> bool {
        let linear_ok = self
            .halfspaces
            .iter()
            .all(|(a, b)| a.iter().zip(p).map(|(ai, pi)| ai * pi).sum::<f64>() <= b + CORNER_TOL);
        if !linear_ok {
            return false;
        }
        if self.constraints.nonlinear.is_empty() && self.constraints.predicates.is_empty() {
            return true;
        }
        let x = Self::lift(p);
        self.constraints.nonlinear.iter().all(|c| c.is_satisfied(&x))
            && self.constraints.predicates.iter().all(|c| c.is_satisfied(&x))
    }
}

/// Kept bins and their observed counts.
#[derive(Clone, Debug)]
pub struct BinGrid {
    n_b: usize,
    dim: usize,
    kept: Vec<Vec<u32>>,
    lookup: Vec<u32>,
    counts: Vec<u64>,
    seen: u64,
    warnings: Vec<String>,
}

const NOT_KEPT: u32 = u32::MAX;

impl BinGrid {
    pub fn bins_per_dim(&self) -> usize {
        self.n_b
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kept(&self) -> &[Vec<u32>] {
        &self.kept
    }

    pub fn len(&self) -> usize {
        self.kept.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kept.is_empty()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Number of vectors offered to the grid, counted or not.
    pub fn seen(&self) -> u64 {
        self.seen
    }

    /// Corner `mask` of kept bin `b` in projected coordinates.
    pub fn corner(&self, b: usize, mask: usize) -> Vec<f64> {
        let h = self.n_b as f64;
        self.kept[b]
            .iter()
            .enumerate()
            .map(|(k, &i)| (i as f64 + ((mask >> k) & 1) as f64) / h)
            .collect()
    }

    /// Index of the kept bin containing the projection of `x`, if any.
    pub fn bin_of(&self, x: &[f64]) -> Option<usize> {
        let mut flat = 0usize;
        for k in (0..self.dim).rev() {
            let i = ((x[k] * self.n_b as f64).floor().max(0.0) as usize).min(self.n_b - 1);
            flat = flat * self.n_b + i;
        }
        match self.lookup[flat] {
            NOT_KEPT => None,
            b => Some(b as usize),
        }
    }

    pub fn observe(&mut self, x: &[f64]) {
        self.seen += 1;
        if let Some(b) = self.bin_of(x) {
            self.counts[b] += 1;
        }
    }

    /// An all-zero count vector shaped like this grid.
    pub fn empty_counts(&self) -> Vec<u64> {
        vec![0; self.kept.len()]
    }

    pub fn absorb(&mut self, counts: &[u64], seen: u64) {
        for (c, &o) in self.counts.iter_mut().zip(counts) {
            *c += o;
        }
        self.seen += seen;
    }

    pub fn reset(&mut self) {
        self.counts.iter_mut().for_each(|c| *c = 0);
        self.seen = 0;
    }

    pub fn report(&self) -> Result<GofReport> {
        if self.seen == 0 {
            return Err(Error::Input("empty sample".into()));
        }
        let mut report = chi2_from_counts(&self.counts)?;
        report.sample_size = self.seen;
        report.warnings.splice(0..0, self.warnings.iter().cloned());
        Ok(report)
    }
}

/// Enumerates the `n_b^(n-1)` bins and keeps those inside the polytope.
pub fn build_grid(poly: &ProjectedPolytope, n_b: usize) -> Result<BinGrid> {
    let dim = poly.dim();
    if n_b == 0 {
        return Err(Error::Input("need at least one bin per dimension".into()));
    }
    let cells = (0..dim).try_fold(1usize, |acc, _| acc.checked_mul(n_b));
    let cells = match cells {
        Some(c) if c <= MAX_GRID_CELLS => c,
        _ => {
            return Err(Error::Input(format!(
                "{n_b}^{dim} bins exceed the grid limit of {MAX_GRID_CELLS}"
            )))
        }
    };
    let h = n_b as f64;
    let mut kept = Vec::new();
    let mut lookup = vec![NOT_KEPT; cells];
    let mut idx = vec![0u32; dim];
    let mut corner = vec![0.0; dim];
    for (flat, slot) in lookup.iter_mut().enumerate() {
        let mut r = flat;
        for v in idx.iter_mut() {
            *v = (r % n_b) as u32;
            r /= n_b;
        }
        let inside = (0..1usize << dim).all(|mask| {
            for (k, c) in corner.iter_mut().enumerate() {
                *c = (idx[k] as f64 + ((mask >> k) & 1) as f64) / h;
            }
            poly.contains(&corner)
        });
        if inside {
            *slot = kept.len() as u32;
            kept.push(idx.clone());
        }
    }
    if kept.is_empty() {
        return Err(Error::DegenerateRegion(format!(
            "no bin of a {n_b}-per-axis grid fits inside the feasible region"
        )));
    }
    let counts = vec![0; kept.len()];
    Ok(BinGrid { n_b, dim, kept, lookup, counts, seen: 0, warnings: poly.warnings.clone() })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GofReport {
    pub bins: usize,
    #[serde(rename = "E")]
    pub expected: f64,
    pub chi2: f64,
    pub dof: usize,
    #[serde(rename = "p")]
    pub p_value: f64,
    /// Vectors that fell into kept bins.
    pub counted: u64,
    pub sample_size: u64,
    pub warnings: Vec<String>,
}

/// Chi-squared statistic against equal expected counts.
pub fn chi2_from_counts(counts: &[u64]) -> Result<GofReport> {
    let bins = counts.len();
    if bins == 0 {
        return Err(Error::DegenerateRegion("no kept bins".into()));
    }
    let counted: u64 = counts.iter().sum();
    if counted == 0 {
        return Err(Error::Input("no sample vector fell into a kept bin".into()));
    }
    let expected = counted as f64 / bins as f64;
    let chi2: f64 = counts
        .iter()
        .map(|&o| {
            let d = o as f64 - expected;
            d * d / expected
        })
        .sum();
    let dof = bins - 1;
    let mut warnings = Vec::new();
    if expected < MIN_VALID_E {
        warnings.push(format!(
            "expected count per bin {expected:.2} is below {MIN_VALID_E}; the chi-squared approximation is unreliable"
        ));
    }
    let p_value = if dof == 0 {
        warnings.push("a single kept bin gives zero degrees of freedom".into());
        1.0
    } else {
        chi2_sf(chi2, dof as f64)?
    };
    Ok(GofReport { bins, expected, chi2, dof, p_value, counted, sample_size: counted, warnings })
}

/// Counts `sample` into `grid` (after clearing it) and reports.
pub fn chi2_test<'a>(
    grid: &mut BinGrid,
    sample: impl IntoIterator<Item = &'a SimplexVector>,
) -> Result<GofReport> {
    grid.reset();
    for x in sample {
        if x.dim() != grid.dim + 1 {
            return Err(Error::Dimension(format!(
                "sample vector has dimension {}, grid expects {}",
                x.dim(),
                grid.dim + 1
            )));
        }
        grid.observe(x.as_slice());
    }
    grid.report()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwoSampleReport {
    pub bins: usize,
    pub chi2: f64,
    pub dof: usize,
    #[serde(rename = "p")]
    pub p_value: f64,
}

/// Chi-squared test of homogeneity between two count vectors over the same bins
/// (a 2 x |B| contingency table). Bins empty in both samples are skipped.
pub fn two_sample_chi2(a: &[u64], b: &[u64]) -> Result<TwoSampleReport> {
    if a.len() != b.len() {
        return Err(Error::Dimension("count vectors differ in length".into()));
    }
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    if na == 0.0 || nb == 0.0 {
        return Err(Error::Input("both samples need counts in kept bins".into()));
    }
    let total = na + nb;
    let mut chi2 = 0.0;
    let mut used = 0;
    for (&oa, &ob) in a.iter().zip(b) {
        let col = (oa + ob) as f64;
        if col == 0.0 {
            continue;
        }
        used += 1;
        let (ea, eb) = (na * col / total, nb * col / total);
        chi2 += (oa as f64 - ea).powi(2) / ea + (ob as f64 - eb).powi(2) / eb;
    }
    let dof = used.max(1) - 1;
    let p_value = if dof == 0 { 1.0 } else { chi2_sf(chi2, dof as f64)? };
    Ok(TwoSampleReport { bins: used, chi2, dof, p_value })
}

/// Outcome of drawing a sample straight into a grid.
#[derive(Clone, Debug)]
pub struct GofRun {
    pub counts: Vec<u64>,
    pub seen: u64,
    /// Emitted vectors that fail the grid's constraint set.
    pub infeasible: u64,
    pub stats: SamplingStats,
}

/// Draws `n` vectors from `sampler` (sharded as in
/// [`run_sharded`]) and counts them into `grid`'s bins without storing them.
pub fn sample_counts<S: Sampler + ?Sized>(
    grid: &BinGrid,
    poly: &ProjectedPolytope,
    sampler: &S,
    n: usize,
    seed: u64,
    threads: usize,
) -> Result<GofRun> {
    if sampler.dim() != grid.dim + 1 {
        return Err(Error::Dimension(format!(
            "sampler has dimension {}, grid expects {}",
            sampler.dim(),
            grid.dim + 1
        )));
    }
    let cs = poly.constraints();
    let shards = run_sharded(
        sampler,
        n,
        seed,
        threads,
        || (grid.empty_counts(), 0u64),
        |(counts, bad): &mut (Vec<u64>, u64), d| {
            let x = d.vector.as_slice();
            if let Some(b) = grid.bin_of(x) {
                counts[b] += 1;
            }
            if !cs.is_satisfied(x) {
                *bad += 1;
            }
        },
    )?;
    let mut counts = grid.empty_counts();
    let mut infeasible = 0;
    for ((c, bad), _) in &shards {
        counts.iter_mut().zip(c).for_each(|(t, v)| *t += v);
        infeasible += bad;
    }
    let stats = merge_stats(shards.iter().map(|(_, s)| s));
    Ok(GofRun { counts, seen: n as u64, infeasible, stats })
}

/// Bins per axis so that a uniform sample of `planned` vectors puts about
/// `target_e` vectors in each kept bin (never fewer than 2, capped so the
/// grid stays enumerable). The feasible volume is estimated with a fixed-seed
/// rejection run.
pub fn default_bins(cs: &ConstraintSet, planned: usize, target_e: f64) -> Result<usize> {
    let dim = cs.dim() - 1;
    let probe = 200_000;
    let mut rng = RngState::new(0x5eed);
    let mut hits = 0usize;
    for _ in 0..probe {
        let x = crate::simplex::flat_dirichlet_unchecked(cs.dim(), &mut rng);
        if cs.is_satisfied(x.as_slice()) {
            hits += 1;
        }
    }
    if hits == 0 {
        return Err(Error::DegenerateRegion(
            "no probe draw landed in the feasible region; pass --bins explicitly".into(),
        ));
    }
    let simplex_volume = (1..=dim).fold(1.0, |acc, k| acc / k as f64);
    let volume = simplex_volume * hits as f64 / probe as f64;
    let n_b = (planned as f64 / (target_e * volume)).powf(1.0 / dim as f64).floor();
    let cap = (MAX_GRID_CELLS as f64).powf(1.0 / dim as f64).floor().min(400.0);
    Ok(n_b.clamp(2.0, cap) as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simplex3() -> ProjectedPolytope {
        ProjectedPolytope::new(&ConstraintSet::new(3).unwrap())
    }

    #[test]
    fn unconstrained_two_bins_keeps_one() {
        let grid = build_grid(&simplex3(), 2).unwrap();
        assert_eq!(grid.len(), 1);
        assert_eq!(grid.kept()[0], vec![0, 0]);
    }

    #[test]
    fn kept_corners_are_feasible() {
        let cs = ConstraintSet::from_bounds(&[0.0; 4], &[0.1, 0.5, 0.8, 1.0]).unwrap();
        let poly = ProjectedPolytope::new(&cs);
        let grid = build_grid(&poly, 25).unwrap();
        for b in 0..grid.len() {
            for mask in 0..8 {
                assert!(poly.contains(&grid.corner(b, mask)));
            }
        }
    }

    #[test]
    fn perfect_fit_has_zero_statistic() {
        let r = chi2_from_counts(&[100, 100, 100, 100]).unwrap();
        assert_eq!(r.chi2, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.dof, 3);
        assert_eq!(r.expected, 100.0);
    }

    #[test]
    fn small_expected_counts_warn() {
        let r = chi2_from_counts(&[1, 2, 3]).unwrap();
        assert!(r.warnings.iter().any(|w| w.contains("below")));
    }

    #[test]
    fn empty_samples_are_errors() {
        let mut grid = build_grid(&simplex3(), 4).unwrap();
        assert!(chi2_test(&mut grid, std::iter::empty()).is_err());
        assert!(chi2_from_counts(&[0, 0]).is_err());
    }

    #[test]
    fn moving_mass_between_bins_raises_the_statistic() {
        let base = chi2_from_counts(&[50, 50, 50, 50]).unwrap().chi2;
        let moved = chi2_from_counts(&[51, 49, 50, 50]).unwrap().chi2;
        let more = chi2_from_counts(&[53, 47, 50, 50]).unwrap().chi2;
        assert!(base <= moved && moved <= more);
    }

    #[test]
    fn bins_locate_points() {
        let grid = build_grid(&simplex3(), 4).unwrap();
        let b = grid.bin_of(&[0.1, 0.3, 0.6]).unwrap();
        assert_eq!(grid.kept()[b], vec![0, 1]);
        // (0.6, 0.3) lies in bin (2, 1), whose corner (0.75, 0.5) is outside.
        assert!(grid.bin_of(&[0.6, 0.3, 0.1]).is_none());
    }

    #[test]
    fn lift_round_trips() {
        let x = [0.2, 0.3, 0.1, 0.4];
        let back = ProjectedPolytope::lift(&x[..3]);
        for (a, b) in back.iter().zip(x) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn two_sample_identical_counts() {
        let r = two_sample_chi2(&[10, 20, 30, 0], &[10, 20, 30, 0]).unwrap();
        assert_eq!(r.chi2, 0.0);
        assert_eq!(r.bins, 3);
        assert_eq!(r.dof, 2);
        assert!(two_sample_chi2(&[5, 5], &[0, 0]).is_err());
    }

    #[test]
    fn oversized_grids_are_rejected() {
        let poly = ProjectedPolytope::new(&ConstraintSet::new(5).unwrap());
        assert!(build_grid(&poly, 100).is_err());
    }

    #[test]
    fn nonmultilinear_constraints_warn() {
        use crate::constraints::{Monomial, PolynomialConstraint};
        let sq = Monomial { coef: 1.0, exponents: vec![2, 0, 0] };
        let cs = ConstraintSet::new(3)
            .unwrap()
            .with_nonlinear(PolynomialConstraint::new(vec![sq], 0.25).unwrap())
            .unwrap();
        let grid = build_grid(&ProjectedPolytope::new(&cs), 4).unwrap();
        let mut g = grid.clone();
        g.observe(&[0.1, 0.1, 0.8]);
        assert!(!g.report().unwrap().warnings.is_empty());
    }
}
