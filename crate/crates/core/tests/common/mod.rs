//! Brute-force oracles shared by the integration tests.

#![allow(dead_code)]

use drsc::constraints::{ConstraintSet, LinearConstraint, Monomial, PolynomialConstraint};
use drsc::lp::{LinearProgram, Relation};

/// Row-reduces `rows` (each `(a, b)` meaning `a . x = b`) and returns the
/// unique solution, or `None` if the system is rank deficient or inconsistent.
pub fn solve_exact(rows: &[(Vec<f64>, f64)], n: usize) -> Option<Vec<f64>> {
    let mut m: Vec<Vec<f64>> = rows
        .iter()
        .map(|(a, b)| {
            let mut r = a.clone();
            r.push(*b);
            r
        })
        .collect();
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for col in 0..n {
        let Some(best) = (pivot_row..m.len()).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs())) else {
            break;
        };
        if m[best][col].abs() < 1e-10 {
            continue;
        }
        m.swap(pivot_row, best);
        for i in 0..m.len() {
            if i != pivot_row {
                let f = m[i][col] / m[pivot_row][col];
                if f != 0.0 {
                    for k in col..=n {
                        m[i][k] -= f * m[pivot_row][k];
                    }
                }
            }
        }
        pivots.push(col);
        pivot_row += 1;
    }
    if pivots.len() < n {
        return None;
    }
    if m[pivot_row..].iter().any(|r| r[n].abs() > 1e-8) {
        return None;
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleResult {
    Optimal(f64),
    Infeasible,
}

fn feasible(lp: &LinearProgram, x: &[f64], tol: f64) -> bool {
    lp.bounds.iter().zip(x).all(|(&(lo, hi), &v)| v >= lo - tol && v <= hi + tol)
        && lp.rows.iter().all(|r| {
            let lhs: f64 = r.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
            let scale = 1.0 + r.rhs.abs();
            match r.relation {
                Relation::Le => lhs <= r.rhs + tol * scale,
                Relation::Eq => (lhs - r.rhs).abs() <= tol * scale,
            }
        })
}

fn combinations(k: usize, n: usize, start: usize, cur: &mut Vec<usize>, out: &mut dyn FnMut(&[usize])) {
    if cur.len() == k {
        out(cur);
        return;
    }
    for i in start..n {
        cur.push(i);
        combinations(k, n, i + 1, cur, out);
        cur.pop();
    }
}

/// Maximum of a bounded LP by enumerating every basic solution.
/// All variable bounds must be finite.
pub fn vertex_enumeration(lp: &LinearProgram) -> OracleResult {
    let n = lp.objective.len();
    assert!(lp.bounds.iter().all(|b| b.0.is_finite() && b.1.is_finite()), "oracle needs a bounded box");
    let eqs: Vec<(Vec<f64>, f64)> = lp
        .rows
        .iter()
        .filter(|r| r.relation == Relation::Eq)
        .map(|r| (r.coeffs.clone(), r.rhs))
        .collect();
    let mut cands: Vec<(Vec<f64>, f64)> = lp
        .rows
        .iter()
        .filter(|r| r.relation == Relation::Le)
        .map(|r| (r.coeffs.clone(), r.rhs))
        .collect();
    for (j, &(lo, hi)) in lp.bounds.iter().enumerate() {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        cands.push((e.clone(), lo));
        cands.push((e, hi));
    }
    let mut best: Option<f64> = None;
    for k in 0..=n {
        combinations(k, cands.len(), 0, &mut Vec::new(), &mut |pick| {
            let mut rows = eqs.clone();
            rows.extend(pick.iter().map(|&i| cands[i].clone()));
            if let Some(x) = solve_exact(&rows, n) {
                if feasible(lp, &x, 1e-9) {
                    let v: f64 = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
                    best = Some(best.map_or(v, |b: f64| b.max(v)));
                }
            }
        });
    }
    best.map_or(OracleResult::Infeasible, OracleResult::Optimal)
}

/// Oracle thresholds in the given processing order. Feasible-region blocks
/// go through vertex enumeration; the bound `max x_i` over `S` with
/// `x_k >= theta_k` is `1 - theta_k` in closed form. `None` when the linear
/// region is empty.
pub fn oracle_thetas(cs: &ConstraintSet, order: &[usize]) -> Option<Vec<f64>> {
    let n = cs.dim();
    let mut thetas = vec![1.0; n];
    let mut nonempty = vec![false; n];
    for (pos, &i) in order.iter().enumerate() {
        let mut c = vec![0.0; n];
        c[i] = 1.0;
        let lp = cs
            .expand_linear()
            .into_iter()
            .fold(LinearProgram::new(n).maximize(c).bounds(0.0, 1.0).eq(vec![1.0; n], 1.0), |p, h| {
                p.le(h.coeffs, h.rhs)
            });
        let OracleResult::Optimal(mut theta) = vertex_enumeration(&lp) else {
            return None;
        };
        for &k in &order[..pos] {
            if nonempty[k] {
                theta = theta.max(1.0 - thetas[k]);
            }
        }
        thetas[i] = theta.clamp(0.0, 1.0);
        nonempty[i] = 1.0 - thetas[i] >= 1e-9;
    }
    Some(thetas)
}

pub fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

/// The four 3-D instances with one extra constraint each: `x1 + x2 >= 0.6`,
/// `x1 + x2 = 0.6`, `x1 + 0.5 x2 <= 0.6` and `x1 x2 <= 0.1`, at the default tolerances.
pub fn demo_instances() -> Vec<(&'static str, ConstraintSet)> {
    let base = || ConstraintSet::new(3).unwrap();
    vec![
        ("sum_ge", base().with_linear(LinearConstraint::ge(vec![1.0, 1.0, 0.0], 0.6).unwrap()).unwrap()),
        ("sum_eq", base().with_linear(LinearConstraint::eq(vec![1.0, 1.0, 0.0], 0.6).unwrap()).unwrap()),
        ("skew_le", base().with_linear(LinearConstraint::le(vec![1.0, 0.5, 0.0], 0.6).unwrap()).unwrap()),
        (
            "product",
            base()
                .with_nonlinear(
                    PolynomialConstraint::new(vec![Monomial { coef: 1.0, exponents: vec![1, 1, 0] }], 0.1).unwrap(),
                )
                .unwrap(),
        ),
    ]
}
