//! Dense two-phase simplex method with Bland's anti-cycling rule.
//!
//! The problems solved here are tiny (a handful of variables, a few dozen
//! rows), so the tableau is kept dense and pivoting is deterministic.
//! Variables carry finite lower bounds and optional upper bounds; rows are
//! `<=` or `=` relations. Equalities and rows with a negative right-hand side
//! get a phase-one artificial variable.

use crate::error::{Error, Result};

/// Primal feasibility tolerance and optimality (reduced-cost) tolerance.
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Pivot elements at or below this magnitude are never used.
pub const PIVOT_TOL: f64 = 1e-11;
const ZERO_SNAP: f64 = 1e-12;
const MAX_PIVOTS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpRow {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
    pub relation: Relation,
}

/// `maximize c.x  s.t.  rows,  lo <= x <= hi`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Vec<LpRow>,
    pub bounds: Vec<(f64, f64)>,
}

impl LinearProgram {
    /// A problem in `n` variables with bounds `[0, +inf)` and zero objective.
    pub fn new(n: usize) -> Self {
        LinearProgram {
            objective: vec![0.0; n],
            rows: Vec::new(),
            bounds: vec![(0.0, f64::INFINITY); n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn maximize(mut self, objective: Vec<f64>) -> Self {
        self.objective = objective;
        self
    }

    pub fn bounds(mut self, lo: f64, hi: f64) -> Self {
        self.bounds.iter_mut().for_each(|b| *b = (lo, hi));
        self
    }

    pub fn var_bounds(mut self, j: usize, lo: f64, hi: f64) -> Self {
        self.bounds[j] = (lo, hi);
        self
    }

    pub fn le(mut self, coeffs: Vec<f64>, rhs: f64) -> Self {
        self.rows.push(LpRow { coeffs, rhs, relation: Relation::Le });
        self
    }

    /// Adds `coeffs.x >= rhs`, stored as `-coeffs.x <= -rhs`.
    pub fn ge(self, coeffs: Vec<f64>, rhs: f64) -> Self {
        let neg = coeffs.into_iter().map(|v| -v).collect();
        self.le(neg, -rhs)
    }

    pub fn eq(mut self, coeffs: Vec<f64>, rhs: f64) -> Self {
        self.rows.push(LpRow { coeffs, rhs, relation: Relation::Eq });
        self
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if n == 0 {
            return Err(Error::Input("linear program has no variables".into()));
        }
        if self.bounds.len() != n {
            return Err(Error::Input(format!(
                "{} bounds given for {n} variables",
                self.bounds.len()
            )));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.coeffs.len() != n {
                return Err(Error::Input(format!(
                    "row {i} has {} coefficients, expected {n}",
                    row.coeffs.len()
                )));
            }
            if !row.rhs.is_finite() || row.coeffs.iter().any(|v| !v.is_finite()) {
                return Err(Error::Input(format!("row {i} has non-finite data")));
            }
        }
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            if !lo.is_finite() || hi.is_nan() || lo > hi {
                return Err(Error::Input(format!("variable {j} has invalid bounds [{lo}, {hi}]")));
            }
        }
        if self.objective.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("objective has non-finite coefficients".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Quantities that certify the reported status.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    /// Sum of artificial variables at the end of phase one.
    pub phase_one_objective: f64,
    /// Largest reduced cost at termination of phase two (maximization form).
    pub max_reduced_cost: f64,
    pub pivots: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub point: Vec<f64>,
    pub objective_value: f64,
    pub certificate: Certificate,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

struct Tableau {
    /// `m` rows of `cols + 1` entries; the last entry is the right-hand side.
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
    first_artificial: usize,
    pivots: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.cols]
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let p = self.rows[r][q];
        self.rows[r].iter_mut().for_each(|v| *v /= p);
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[q];
            if f != 0.0 {
                for (v, &pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[q] = 0.0;
            }
        }
        for row in self.rows.iter_mut() {
            let last = row.len() - 1;
            if row[last].abs() < ZERO_SNAP {
                row[last] = 0.0;
            }
        }
        self.basis[r] = q;
        self.pivots += 1;
    }

    /// Reduced costs `c_j - c_B B^-1 A_j` for the given cost vector.
    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut d = cost.to_vec();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = cost[b];
            if cb != 0.0 {
                for (dj, &a) in d.iter_mut().zip(row.iter()) {
                    *dj -= cb * a;
                }
            }
        }
        d
    }

    fn objective(&self, cost: &[f64]) -> f64 {
        self.basis
            .iter()
            .enumerate()
            .map(|(i, &b)| cost[b] * self.rhs(i))
            .sum()
    }

    /// Runs Bland-rule simplex iterations over columns `< allowed`.
    /// Returns `Ok(true)` on optimality and `Ok(false)` on unboundedness.
    fn optimize(&mut self, cost: &[f64], allowed: usize, phase: u8) -> Result<bool> {
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(Error::Numeric(format!(
                    "phase {phase}: pivot limit {MAX_PIVOTS} exceeded"
                )));
            }
            let d = self.reduced_costs(cost);
            let Some(q) = (0..allowed).find(|&j| d[j] > FEASIBILITY_TOL) else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            let mut tiny_positive = false;
            for i in 0..self.rows.len() {
                let a = self.rows[i][q];
                if a <= PIVOT_TOL {
                    if a > 0.0 {
                        tiny_positive = true;
                    }
                    continue;
                }
                let ratio = self.rhs(i) / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((r, best)) => {
                        if ratio < best - ZERO_SNAP
                            || (ratio <= best + ZERO_SNAP && self.basis[i] < self.basis[r])
                        {
                            Some((i, ratio))
                        } else {
                            Some((r, best))
                        }
                    }
                };
            }
            match leave {
                Some((r, _)) => self.pivot(r, q),
                None if tiny_positive => {
                    return Err(Error::Numeric(format!(
                        "phase {phase}: column {q} has only pivot candidates below {PIVOT_TOL:e} \
                         (reduced cost {:.3e}, after {} pivots)",
                        d[q], self.pivots
                    )))
                }
                None => return Ok(false),
            }
        }
    }
}

/// Solves the linear program with the two-phase simplex method.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let n = lp.num_vars();
    let lo: Vec<f64> = lp.bounds.iter().map(|b| b.0).collect();

    // Shift to z = x - lo >= 0 and collect rows (coeffs, rhs, relation).
    let mut rows: Vec<(Vec<f64>, f64, Relation)> = lp
        .rows
        .iter()
        .map(|r| {
            let shift: f64 = r.coeffs.iter().zip(&lo).map(|(a, l)| a * l).sum();
            (r.coeffs.clone(), r.rhs - shift, r.relation)
        })
        .collect();
    for (j, &(l, h)) in lp.bounds.iter().enumerate() {
        if h.is_finite() {
            let mut a = vec![0.0; n];
            a[j] = 1.0;
            rows.push((a, h - l, Relation::Le));
        }
    }

    let m = rows.len();
    let num_slack = rows.iter().filter(|r| r.2 == Relation::Le).count();
    let needs_artificial = |r: &(Vec<f64>, f64, Relation)| r.2 == Relation::Eq || r.1 < 0.0;
    let num_art = rows.iter().filter(|r| needs_artificial(r)).count();
    let first_artificial = n + num_slack;
    let cols = first_artificial + num_art;

    let mut table = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let (mut next_slack, mut next_art) = (n, first_artificial);
    for row in &rows {
        let mut t = vec![0.0; cols + 1];
        t[..n].copy_from_slice(&row.0);
        t[cols] = row.1;
        let slack = (row.2 == Relation::Le).then(|| {
            t[next_slack] = 1.0;
            next_slack += 1;
            next_slack - 1
        });
        if needs_artificial(row) {
            if row.1 < 0.0 {
                t.iter_mut().for_each(|v| *v = -*v);
            }
            t[next_art] = 1.0;
            basis.push(next_art);
            next_art += 1;
        } else {
            basis.push(slack.expect("nonnegative <= rows carry a slack"));
        }
        table.push(t);
    }

    let mut tab = Tableau { rows: table, basis, cols, first_artificial, pivots: 0 };

    // Phase one: maximize -sum(artificials).
    let mut phase_one_objective = 0.0;
    if num_art > 0 {
        let mut cost = vec![0.0; cols];
        cost[first_artificial..].iter_mut().for_each(|c| *c = -1.0);
        tab.optimize(&cost, cols, 1)?;
        phase_one_objective = -tab.objective(&cost);
        if phase_one_objective > FEASIBILITY_TOL {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                point: Vec::new(),
                objective_value: f64::NAN,
                certificate: Certificate {
                    phase_one_objective,
                    max_reduced_cost: f64::NAN,
                    pivots: tab.pivots,
                },
            });
        }
        drive_out_artificials(&mut tab);
    }

    // Phase two on the original objective.
    let mut cost = vec![0.0; cols];
    cost[..n].copy_from_slice(&lp.objective);
    let bounded = tab.optimize(&cost, tab.first_artificial, 2)?;
    let d = tab.reduced_costs(&cost);
    let max_reduced_cost = d[..tab.first_artificial]
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);

    let mut z = vec![0.0; cols];
    for (i, &b) in tab.basis.iter().enumerate() {
        z[b] = tab.rhs(i);
    }
    let point: Vec<f64> = (0..n).map(|j| lo[j] + z[j]).collect();
    let objective_value = lp.objective.iter().zip(&point).map(|(c, x)| c * x).sum();
    Ok(LpSolution {
        status: if bounded { LpStatus::Optimal } else { LpStatus::Unbounded },
        point,
        objective_value,
        certificate: Certificate { phase_one_objective, max_reduced_cost, pivots: tab.pivots },
    })
}

/// Pivots zero-valued artificials out of the basis; rows where that is
/// impossible are linearly dependent and dropped.
fn drive_out_artificials(tab: &mut Tableau) {
    let mut i = 0;
    while i < tab.rows.len() {
        if tab.basis[i] >= tab.first_artificial {
            let q = (0..tab.first_artificial).find(|&j| tab.rows[i][j].abs() > PIVOT_TOL);
            match q {
                Some(q) => tab.pivot(i, q),
                None => {
                    tab.rows.remove(i);
                    tab.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tight_upper_bound() {
        let lp = LinearProgram::new(2)
            .maximize(vec![1.0, 0.0])
            .bounds(0.0, 1.0)
            .eq(vec![1.0, 1.0], 1.0)
            .le(vec![1.0, 0.0], 0.3);
        let sol = solve(&lp).unwrap();
        assert!(sol.is_optimal());
        assert!((sol.objective_value - 0.3).abs() < 1e-12);
        assert!((sol.point[0] - 0.3).abs() < 1e-12 && (sol.point[1] - 0.7).abs() < 1e-12);
    }

    #[test]
    fn lower_bound_forces_remaining_mass() {
        let lp = LinearProgram::new(3)
            .maximize(vec![0.0, 1.0, 0.0])
            .bounds(0.0, 1.0)
            .eq(vec![1.0; 3], 1.0)
            .ge(vec![1.0, 0.0, 0.0], 0.3);
        let sol = solve(&lp).unwrap();
        assert!(sol.is_optimal());
        assert!((sol.objective_value - 0.7).abs() < 1e-12);
    }

    #[test]
    fn detects_infeasibility() {
        let lp = LinearProgram::new(2)
            .maximize(vec![1.0, 1.0])
            .bounds(0.0, 1.0)
            .eq(vec![1.0, 1.0], 1.0)
            .ge(vec![1.0, 0.0], 0.8)
            .ge(vec![0.0, 1.0], 0.8);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
        assert!(sol.certificate.phase_one_objective > FEASIBILITY_TOL);
    }

    #[test]
    fn detects_unboundedness() {
        let lp = LinearProgram::new(2).maximize(vec![1.0, 0.0]).le(vec![0.0, 1.0], 1.0);
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        let lp = LinearProgram::new(3)
            .maximize(vec![1.0, 2.0, 0.0])
            .bounds(0.0, 1.0)
            .eq(vec![1.0; 3], 1.0)
            .eq(vec![2.0; 3], 2.0);
        let sol = solve(&lp).unwrap();
        assert!(sol.is_optimal());
        assert!((sol.objective_value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn nonzero_lower_bounds_are_shifted() {
        let lp = LinearProgram::new(2)
            .maximize(vec![-1.0, -1.0])
            .var_bounds(0, 0.25, 2.0)
            .var_bounds(1, -1.0, 1.0)
            .ge(vec![1.0, 1.0], 0.5);
        let sol = solve(&lp).unwrap();
        assert!(sol.is_optimal());
        assert!((sol.objective_value + 0.5).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_an_input_error() {
        let lp = LinearProgram::new(2).le(vec![1.0], 1.0);
        assert!(matches!(solve(&lp), Err(Error::Input(_))));
        let lp = LinearProgram::new(2).var_bounds(0, 1.0, 0.0);
        assert!(matches!(solve(&lp), Err(Error::Input(_))));
    }

    #[test]
    fn solving_is_deterministic() {
        let lp = LinearProgram::new(4)
            .maximize(vec![0.3, -0.2, 0.5, 0.1])
            .bounds(0.0, 1.0)
            .eq(vec![1.0; 4], 1.0)
            .le(vec![1.0, 0.5, 0.0, 0.2], 0.4)
            .ge(vec![0.0, 1.0, 1.0, 0.0], 0.3);
        assert_eq!(solve(&lp).unwrap(), solve(&lp).unwrap());
    }
}
