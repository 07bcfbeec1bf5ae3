//! The simplified Dirichlet-Rescale sampler for per-coordinate bounds.
//!
//! Lower bounds are removed first by the affine substitution
//! `x = l + (1 - sum(l)) * y`, which turns `u` into `u' = (u - l) / (1 - sum(l))`.
//! A flat-Dirichlet draw `y` is then rescaled out of the sub-simplex spanned
//! by all currently violated upper bounds until no bound is violated.
//!
//! This sampler is *not* uniform when several bounds can be violated at
//! once; see [`crate::tiling`] for the analytic demonstration.

use crate::error::{Error, Result};
use crate::simplex::{flat_dirichlet_unchecked, rescale_to_standard, RegularSubSimplex, RngState, SimplexVector};

pub const DEFAULT_MAX_ITERS: usize = 1000;

/// Per-coordinate bounds `lower <= x <= upper` on the simplex.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundsSpec {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoundsSpec {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::Dimension(format!(
                "lower has {} entries, upper has {}",
                lower.len(),
                upper.len()
            )));
        }
        if upper.len() < 2 {
            return Err(Error::Dimension("bounds need n >= 2".into()));
        }
        for (i, (&l, &u)) in lower.iter().zip(&upper).enumerate() {
            if !(0.0..=1.0).contains(&l) || !(0.0..=1.0).contains(&u) || l > u {
                return Err(Error::Input(format!("invalid bounds at {i}: [{l}, {u}]")));
            }
        }
        let (sl, su) = (lower.iter().sum::<f64>(), upper.iter().sum::<f64>());
        if sl > 1.0 || su < 1.0 {
            return Err(Error::Input(format!(
                "empty region: sum(lower) = {sl}, sum(upper) = {su}"
            )));
        }
        Ok(BoundsSpec { lower, upper })
    }

    pub fn upper_only(upper: Vec<f64>) -> Result<Self> {
        Self::new(vec![0.0; upper.len()], upper)
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn dim(&self) -> usize {
        self.upper.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(&self.lower)
            .zip(&self.upper)
            .all(|((&v, &l), &u)| l <= v && v <= u)
    }

    fn free_mass(&self) -> f64 {
        1.0 - self.lower.iter().sum::<f64>()
    }

    /// Upper bounds after the lower-bound substitution.
    pub fn transformed_upper(&self) -> Vec<f64> {
        let free = self.free_mass();
        self.upper
            .iter()
            .zip(&self.lower)
            .map(|(&u, &l)| if free > 0.0 { ((u - l) / free).min(1.0) } else { 0.0 })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DrsDraw {
    pub vector: SimplexVector,
    pub steps: usize,
}

/// Runs the rescale loop from `start` against upper bounds `upper`.
///
/// Deterministic given `start`; returns the feasible point and the number
/// of rescale steps taken.
pub fn rescale_until_feasible(start: SimplexVector, upper: &[f64], max_iters: usize) -> Result<DrsDraw> {
    if start.dim() != upper.len() {
        return Err(Error::Dimension(format!(
            "start has dimension {}, bounds have {}",
            start.dim(),
            upper.len()
        )));
    }
    let mut y = start;
    let mut steps = 0;
    loop {
        let mut any = false;
        let offset: Vec<f64> = y
            .as_slice()
            .iter()
            .zip(upper)
            .map(|(&v, &u)| {
                if v > u {
                    any = true;
                    u
                } else {
                    0.0
                }
            })
            .collect();
        if !any {
            return Ok(DrsDraw { vector: y, steps });
        }
        if steps == max_iters {
            return Err(Error::NonTermination { steps, last: y.into_inner() });
        }
        let sub = RegularSubSimplex::new(offset)?;
        y = rescale_to_standard(&y, &sub)?;
        steps += 1;
    }
}

/// Draws one vector satisfying `bounds` with the simplified DRS algorithm.
pub fn drs_sample(bounds: &BoundsSpec, rng: &mut RngState, max_iters: usize) -> Result<DrsDraw> {
    if max_iters == 0 {
        return Err(Error::Input("max_iters must be at least 1".into()));
    }
    let n = bounds.dim();
    let free = bounds.free_mass();
    if free <= 0.0 {
        return Ok(DrsDraw { vector: SimplexVector::new(bounds.lower.clone())?, steps: 0 });
    }
    let upper = bounds.transformed_upper();
    let start = flat_dirichlet_unchecked(n, rng);
    let DrsDraw { vector, steps } = rescale_until_feasible(start, &upper, max_iters)?;
    if bounds.lower.iter().all(|&l| l == 0.0) {
        return Ok(DrsDraw { vector, steps });
    }
    // Undo the substitution; clamp away last-ulp overshoot.
    let x = vector
        .as_slice()
        .iter()
        .zip(&bounds.lower)
        .zip(&bounds.upper)
        .map(|((&y, &l), &u)| (l + free * y).clamp(l, u))
        .collect();
    Ok(DrsDraw { vector: SimplexVector::from_raw(x), steps })
}
