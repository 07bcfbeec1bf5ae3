//! The Dirichlet-Rescale-Constraints sampler.
//!
//! For every coordinate `i` (in a fixed processing order) a threshold
//! `theta_i` is computed as the largest value of `x_i` attained either by a
//! point of the linear feasible region or by a point of an earlier induced
//! simplex `S_k = {x in S : x_k >= theta_k}`. The simplices
//! `S_i = {x in S : x_i >= theta_i}` are then pairwise non-overlapping and
//! contain no linearly feasible point, so a flat-Dirichlet draw that lands in
//! one of them can be rescaled onto `S` without disturbing uniformity.
//! Draws that are infeasible but outside every `S_i`, and draws that violate
//! a nonlinear constraint, restart from a fresh draw.

use crate::constraints::{ConstraintSet, HalfSpace};
use crate::error::{Error, Result};
use crate::lp::{self, LinearProgram, LpStatus};
use crate::simplex::{flat_dirichlet_unchecked, rescale_to_standard, RegularSubSimplex, RngState, SimplexVector};

/// `S_i` is empty when `1 - theta_i` falls below this.
pub const EMPTY_SIMPLEX_DELTA: f64 = 1e-9;
pub const DEFAULT_MAX_RESTARTS: usize = 1_000_000;
const MAX_RESCALES_PER_ATTEMPT: usize = 10_000;

/// Thresholds and the induced simplices they define.
#[derive(Clone, Debug, PartialEq)]
pub struct InducedSimplexFamily {
    thetas: Vec<f64>,
    order: Vec<usize>,
    simplices: Vec<Option<RegularSubSimplex>>,
}

impl InducedSimplexFamily {
    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    /// Coordinates in processing order; membership is tested in this order.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn simplex(&self, i: usize) -> Option<&RegularSubSimplex> {
        self.simplices[i].as_ref()
    }

    pub fn is_empty(&self, i: usize) -> bool {
        self.simplices[i].is_none()
    }

    pub fn empty_flags(&self) -> Vec<bool> {
        self.simplices.iter().map(Option::is_none).collect()
    }

    pub fn dim(&self) -> usize {
        self.thetas.len()
    }

    /// First nonempty `S_i` (in processing order) containing `x`.
    pub fn locate(&self, x: &[f64]) -> Option<usize> {
        self.order
            .iter()
            .copied()
            .find(|&i| self.simplices[i].is_some() && x[i] >= self.thetas[i])
    }

    /// Fraction of the simplex covered by the induced simplices (`sum s_i^(n-1)`).
    pub fn covered_mass(&self) -> f64 {
        let n = self.dim() as i32;
        self.simplices
            .iter()
            .flatten()
            .map(|s| s.scale().powi(n - 1))
            .sum()
    }
}

fn simplex_program(n: usize, objective_coord: usize) -> LinearProgram {
    let mut c = vec![0.0; n];
    c[objective_coord] = 1.0;
    LinearProgram::new(n).maximize(c).bounds(0.0, 1.0).eq(vec![1.0; n], 1.0)
}

fn max_coordinate(program: &LinearProgram, what: &str) -> Result<Option<f64>> {
    let sol = lp::solve(program).map_err(|e| match e {
        Error::Numeric(msg) => Error::Numeric(format!("{what}: {msg}")),
        other => other,
    })?;
    match sol.status {
        LpStatus::Optimal => Ok(Some(sol.objective_value)),
        LpStatus::Infeasible => Ok(None),
        LpStatus::Unbounded => Err(Error::Numeric(format!("{what}: unbounded on a bounded simplex"))),
    }
}

/// Thresholds in ascending coordinate order.
pub fn compute_thetas(cs: &ConstraintSet) -> Result<InducedSimplexFamily> {
    let order: Vec<usize> = (0..cs.dim()).collect();
    compute_thetas_ordered(cs, &order)
}

/// Thresholds with a caller-chosen processing order (a permutation of `0..n`).
pub fn compute_thetas_ordered(cs: &ConstraintSet, order: &[usize]) -> Result<InducedSimplexFamily> {
    let n = cs.dim();
    let mut seen = vec![false; n];
    if order.len() != n || !order.iter().all(|&i| i < n && !std::mem::replace(&mut seen[i], true)) {
        return Err(Error::Input(format!("{order:?} is not a permutation of 0..{n}")));
    }
    let halfspaces = cs.expand_linear();
    let mut thetas = vec![1.0; n];
    let mut simplices: Vec<Option<RegularSubSimplex>> = vec![None; n];

    for (pos, &i) in order.iter().enumerate() {
        // Feasible-region block: max x_i over the linear feasible region.
        let program = halfspaces
            .iter()
            .fold(simplex_program(n, i), |p, HalfSpace { coeffs, rhs }| p.le(coeffs.clone(), *rhs));
        let what = format!("feasible-region subproblem for coordinate {}", i + 1);
        let mut theta = max_coordinate(&program, &what)?.ok_or_else(|| {
            Error::Infeasible(format!(
                "{what} is infeasible: the linear constraints admit no point on the simplex"
            ))
        })?;

        // Earlier-simplex blocks: max x_i over S_k for every nonempty earlier S_k.
        for &k in &order[..pos] {
            if simplices[k].is_none() {
                continue;
            }
            let mut e = vec![0.0; n];
            e[k] = 1.0;
            let program = simplex_program(n, i).ge(e, thetas[k]);
            let what = format!("overlap subproblem for coordinate {} against S_{}", i + 1, k + 1);
            if let Some(v) = max_coordinate(&program, &what)? {
                theta = theta.max(v);
            }
        }

        let theta = theta.clamp(0.0, 1.0);
        thetas[i] = theta;
        if 1.0 - theta >= EMPTY_SIMPLEX_DELTA {
            simplices[i] = Some(RegularSubSimplex::single(n, i, theta)?);
        }
    }
    Ok(InducedSimplexFamily { thetas, order: order.to_vec(), simplices })
}

/// One accepted DRSC draw with its restart and rescale counts.
#[derive(Clone, Debug, PartialEq)]
pub struct DrscDraw {
    pub vector: SimplexVector,
    pub restarts: usize,
    pub rescales: usize,
}

/// Draws one vector uniformly from the region defined by `cs`.
pub fn drsc_sample(
    cs: &ConstraintSet,
    fam: &InducedSimplexFamily,
    rng: &mut RngState,
    max_restarts: usize,
) -> Result<DrscDraw> {
    let n = cs.dim();
    if fam.dim() != n {
        return Err(Error::Dimension(format!(
            "family has dimension {}, constraint set has {n}",
            fam.dim()
        )));
    }
    let mut restarts = 0;
    let mut rescales = 0;
    loop {
        let mut x = flat_dirichlet_unchecked(n, rng);
        for _ in 0..MAX_RESCALES_PER_ATTEMPT {
            if cs.is_satisfied(x.as_slice()) {
                return Ok(DrscDraw { vector: x, restarts, rescales });
            }
            match fam.locate(x.as_slice()) {
                Some(i) => {
                    let sub = fam.simplices[i].as_ref().expect("located simplices are nonempty");
                    x = rescale_to_standard(&x, sub)?;
                    rescales += 1;
                }
                None => break,
            }
        }
        if restarts == max_restarts {
            return Err(Error::SamplingFailure {
                restarts,
                accepted: 0,
                acceptance_rate: 1.0 / (restarts as f64 + 1.0),
            });
        }
        restarts += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::{LinearConstraint, Monomial, PolynomialConstraint};

    fn upper_bounds(u: &[f64], eps: f64) -> ConstraintSet {
        let n = u.len();
        let mut cs = ConstraintSet::new(n).unwrap().with_tolerances(eps, 0.0).unwrap();
        for (i, &b) in u.iter().enumerate() {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            cs = cs.with_linear(LinearConstraint::le(e, b).unwrap()).unwrap();
        }
        cs
    }

    #[test]
    fn thetas_for_upper_bounds() {
        let fam = compute_thetas(&upper_bounds(&[0.3, 0.5, 0.6], 0.0)).unwrap();
        let want = [0.3, 0.7, 0.7];
        for (a, b) in fam.thetas().iter().zip(want) {
            assert!((a - b).abs() < 1e-9, "{:?}", fam.thetas());
        }
        assert!(fam.empty_flags().iter().all(|e| !e));
    }

    #[test]
    fn single_bound_leaves_other_simplices_empty() {
        let cs = ConstraintSet::new(3)
            .unwrap()
            .with_tolerances(0.0, 0.0)
            .unwrap()
            .with_linear(LinearConstraint::le(vec![1.0, 0.0, 0.0], 0.3).unwrap())
            .unwrap();
        let fam = compute_thetas(&cs).unwrap();
        assert!((fam.thetas()[0] - 0.3).abs() < 1e-12);
        assert_eq!(&fam.thetas()[1..], &[1.0, 1.0]);
        assert_eq!(fam.empty_flags(), vec![false, true, true]);
    }

    #[test]
    fn infeasible_linear_region_is_an_error() {
        let cs = ConstraintSet::new(3)
            .unwrap()
            .with_tolerances(0.0, 0.0)
            .unwrap()
            .with_linear(LinearConstraint::ge(vec![1.0, 1.0, 0.0], 1.5).unwrap())
            .unwrap();
        let err = compute_thetas(&cs).unwrap_err();
        assert!(matches!(err, Error::Infeasible(ref m) if m.contains("feasible-region subproblem")));
    }

    #[test]
    fn bad_order_is_rejected() {
        let cs = upper_bounds(&[0.3, 0.5, 0.6], 0.0);
        assert!(compute_thetas_ordered(&cs, &[0, 0, 1]).is_err());
        assert!(compute_thetas_ordered(&cs, &[0, 1]).is_err());
    }

    #[test]
    fn reversed_order_still_gives_disjoint_simplices() {
        let cs = upper_bounds(&[0.3, 0.5, 0.6], 0.0);
        let fam = compute_thetas_ordered(&cs, &[2, 1, 0]).unwrap();
        // x3 first: 0.6, then x2: max(0.5, 0.4) = 0.5, then x1: max(0.3, 0.4, 0.5) = 0.5.
        let want = [0.5, 0.5, 0.6];
        for (a, b) in fam.thetas().iter().zip(want) {
            assert!((a - b).abs() < 1e-9, "{:?}", fam.thetas());
        }
    }

    #[test]
    fn unconstrained_draws_are_accepted_immediately() {
        let cs = ConstraintSet::new(4).unwrap();
        let fam = compute_thetas(&cs).unwrap();
        assert!(fam.empty_flags().iter().all(|&e| e));
        let mut rng = RngState::new(5);
        for _ in 0..100 {
            let d = drsc_sample(&cs, &fam, &mut rng, 0).unwrap();
            assert_eq!((d.restarts, d.rescales), (0, 0));
        }
    }

    #[test]
    fn outputs_are_feasible() {
        let product = Monomial { coef: 1.0, exponents: vec![1, 1, 0] };
        let cs = ConstraintSet::new(3)
            .unwrap()
            .with_linear(LinearConstraint::ge(vec![1.0, 1.0, 0.0], 0.6).unwrap())
            .unwrap()
            .with_nonlinear(PolynomialConstraint::new(vec![product], 0.1).unwrap())
            .unwrap();
        let fam = compute_thetas(&cs).unwrap();
        let mut rng = RngState::new(8);
        for _ in 0..2000 {
            let d = drsc_sample(&cs, &fam, &mut rng, DEFAULT_MAX_RESTARTS).unwrap();
            assert!(cs.check(d.vector.as_slice()).unwrap().satisfied);
        }
    }

    #[test]
    fn hopeless_regions_report_sampling_failure() {
        // A thin band far from any induced simplex: with one restart allowed
        // the sampler almost surely gives up.
        let cs = ConstraintSet::new(3)
            .unwrap()
            .with_tolerances(0.0, 1e-6)
            .unwrap()
            .with_linear(LinearConstraint::eq(vec![1.0, 1.0, 0.0], 0.6).unwrap())
            .unwrap();
        let fam = compute_thetas(&cs).unwrap();
        let err = drsc_sample(&cs, &fam, &mut RngState::new(1), 1).unwrap_err();
        assert!(matches!(err, Error::SamplingFailure { restarts: 1, .. }));
    }
}
