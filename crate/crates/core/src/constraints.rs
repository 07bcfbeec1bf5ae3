//! Linear and polynomial constraints over the simplex, with feasibility
//! tolerances for the linear part.
//!
//! A `<=` constraint `a.x <= b` is checked as `a.x <= b + eps_ineq`; an
//! equality `a.x = b` is checked as the pair `a.x <= b + eps_eq` and
//! `-a.x <= -b + eps_eq`. Polynomial constraints are compared against their
//! bound with no slack.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use crate::lp::Relation;

pub const DEFAULT_EPS_INEQ: f64 = 1e-3;
pub const DEFAULT_EPS_EQ: f64 = 1e-2;

#[derive(Clone, Debug, PartialEq)]
pub struct LinearConstraint {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
    pub relation: Relation,
}

impl LinearConstraint {
    pub fn new(coeffs: Vec<f64>, relation: Relation, rhs: f64) -> Result<Self> {
        if coeffs.iter().all(|&v| v == 0.0) {
            return Err(Error::Input("linear constraint has an all-zero coefficient vector".into()));
        }
        if !rhs.is_finite() || coeffs.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("linear constraint has non-finite data".into()));
        }
        Ok(LinearConstraint { coeffs, rhs, relation })
    }

    pub fn le(coeffs: Vec<f64>, rhs: f64) -> Result<Self> {
        Self::new(coeffs, Relation::Le, rhs)
    }

    /// `coeffs.x >= rhs`, normalized to `-coeffs.x <= -rhs`.
    pub fn ge(coeffs: Vec<f64>, rhs: f64) -> Result<Self> {
        Self::new(coeffs.into_iter().map(|v| -v).collect(), Relation::Le, -rhs)
    }

    pub fn eq(coeffs: Vec<f64>, rhs: f64) -> Result<Self> {
        Self::new(coeffs, Relation::Eq, rhs)
    }

    pub fn lhs(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().zip(x).map(|(a, v)| a * v).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coef: f64,
    #[serde(rename = "exp")]
    pub exponents: Vec<u32>,
}

/// `sum_k coef_k * prod_i x_i^exp_ki <= bound`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialConstraint {
    pub terms: Vec<Monomial>,
    pub bound: f64,
}

impl PolynomialConstraint {
    pub fn new(terms: Vec<Monomial>, bound: f64) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Input("polynomial constraint has no terms".into()));
        }
        let n = terms[0].exponents.len();
        if terms.iter().any(|t| t.exponents.len() != n) {
            return Err(Error::Input("polynomial terms have different exponent lengths".into()));
        }
        Ok(PolynomialConstraint { terms, bound })
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                t.exponents
                    .iter()
                    .zip(x)
                    .fold(t.coef, |acc, (&e, &v)| if e == 0 { acc } else { acc * v.powi(e as i32) })
            })
            .sum()
    }

    pub fn is_satisfied(&self, x: &[f64]) -> bool {
        self.evaluate(x) <= self.bound
    }

    pub(crate) fn dim(&self) -> usize {
        self.terms[0].exponents.len()
    }
}

/// A programmatic constraint: the predicate returns `true` when `x` is feasible.
/// Treated like a nonlinear constraint (violations trigger a restart).
type CheckFn = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

#[derive(Clone)]
pub struct Predicate {
    pub name: String,
    check: CheckFn,
}

impl Predicate {
    pub fn new(name: impl Into<String>, check: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> Self {
        Predicate { name: name.into(), check: Arc::new(check) }
    }

    pub fn is_satisfied(&self, x: &[f64]) -> bool {
        (self.check)(x)
    }
}

impl fmt::Debug for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Predicate").field("name", &self.name).finish()
    }
}

/// `a.x <= b` after tolerance expansion.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfSpace {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

impl HalfSpace {
    pub fn contains(&self, x: &[f64]) -> bool {
        self.coeffs.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() <= self.rhs
    }
}

#[derive(Clone, Debug)]
pub struct ConstraintSet {
    n: usize,
    pub linear: Vec<LinearConstraint>,
    pub nonlinear: Vec<PolynomialConstraint>,
    pub predicates: Vec<Predicate>,
    pub eps_ineq: f64,
    pub eps_eq: f64,
}

impl ConstraintSet {
    /// An empty constraint set in dimension `n` with the default tolerances.
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Dimension(format!("constraint sets need n >= 2, got {n}")));
        }
        Ok(ConstraintSet {
            n,
            linear: Vec::new(),
            nonlinear: Vec::new(),
            predicates: Vec::new(),
            eps_ineq: DEFAULT_EPS_INEQ,
            eps_eq: DEFAULT_EPS_EQ,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn with_tolerances(mut self, eps_ineq: f64, eps_eq: f64) -> Result<Self> {
        if !(eps_ineq >= 0.0 && eps_eq >= 0.0) {
            return Err(Error::Input(format!(
                "tolerances must be nonnegative, got eps_ineq={eps_ineq}, eps_eq={eps_eq}"
            )));
        }
        self.eps_ineq = eps_ineq;
        self.eps_eq = eps_eq;
        Ok(self)
    }

    pub fn with_linear(mut self, c: LinearConstraint) -> Result<Self> {
        if c.coeffs.len() != self.n {
            return Err(Error::Dimension(format!(
                "linear constraint has {} coefficients, expected {}",
                c.coeffs.len(),
                self.n
            )));
        }
        self.linear.push(c);
        Ok(self)
    }

    pub fn with_nonlinear(mut self, c: PolynomialConstraint) -> Result<Self> {
        if c.dim() != self.n {
            return Err(Error::Dimension(format!(
                "polynomial constraint has exponent vectors of length {}, expected {}",
                c.dim(),
                self.n
            )));
        }
        self.nonlinear.push(c);
        Ok(self)
    }

    pub fn with_predicate(mut self, p: Predicate) -> Self {
        self.predicates.push(p);
        self
    }

    /// Per-coordinate bounds `lower <= x <= upper` as exact (`eps = 0`) linear
    /// constraints; bounds that cannot bind (`l_i <= 0`, `u_i >= 1`) are skipped.
    pub fn from_bounds(lower: &[f64], upper: &[f64]) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::Dimension("lower and upper bounds differ in length".into()));
        }
        let n = upper.len();
        let mut cs = ConstraintSet::new(n)?.with_tolerances(0.0, 0.0)?;
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            if upper[i] < 1.0 {
                cs = cs.with_linear(LinearConstraint::le(e.clone(), upper[i])?)?;
            }
            if lower[i] > 0.0 {
                cs = cs.with_linear(LinearConstraint::ge(e, lower[i])?)?;
            }
        }
        Ok(cs)
    }

    pub fn is_unconstrained(&self) -> bool {
        self.linear.is_empty() && self.nonlinear.is_empty() && self.predicates.is_empty()
    }

    /// Tolerance-expanded inequality list, in input order with equalities
    /// expanding in place.
    pub fn expand_linear(&self) -> Vec<HalfSpace> {
        let mut out = Vec::with_capacity(self.linear.len() * 2);
        for c in &self.linear {
            match c.relation {
                Relation::Le => out.push(HalfSpace { coeffs: c.coeffs.clone(), rhs: c.rhs + self.eps_ineq }),
                Relation::Eq => {
                    out.push(HalfSpace { coeffs: c.coeffs.clone(), rhs: c.rhs + self.eps_eq });
                    out.push(HalfSpace {
                        coeffs: c.coeffs.iter().map(|v| -v).collect(),
                        rhs: -c.rhs + self.eps_eq,
                    });
                }
            }
        }
        out
    }

    fn linear_ok(&self, c: &LinearConstraint, x: &[f64]) -> bool {
        let lhs = c.lhs(x);
        match c.relation {
            Relation::Le => lhs <= c.rhs + self.eps_ineq,
            Relation::Eq => lhs <= c.rhs + self.eps_eq && -lhs <= -c.rhs + self.eps_eq,
        }
    }

    /// Whether every linear constraint holds (with tolerance).
    pub fn satisfies_linear(&self, x: &[f64]) -> bool {
        self.linear.iter().all(|c| self.linear_ok(c, x))
    }

    /// Allocation-free feasibility test.
    pub fn is_satisfied(&self, x: &[f64]) -> bool {
        self.satisfies_linear(x)
            && self.nonlinear.iter().all(|c| c.is_satisfied(x))
            && self.predicates.iter().all(|p| p.is_satisfied(x))
    }

    pub fn check(&self, x: &[f64]) -> Result<ViolationReport> {
        if x.len() != self.n {
            return Err(Error::Dimension(format!(
                "vector has dimension {}, constraint set has {}",
                x.len(),
                self.n
            )));
        }
        let linear: Vec<usize> = (0..self.linear.len())
            .filter(|&j| !self.linear_ok(&self.linear[j], x))
            .collect();
        let nonlinear: Vec<usize> = (0..self.nonlinear.len())
            .filter(|&j| !self.nonlinear[j].is_satisfied(x))
            .collect();
        let predicates: Vec<usize> = (0..self.predicates.len())
            .filter(|&j| !self.predicates[j].is_satisfied(x))
            .collect();
        Ok(ViolationReport {
            satisfied: linear.is_empty() && nonlinear.is_empty() && predicates.is_empty(),
            linear,
            nonlinear,
            predicates,
        })
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: ConstraintFile = serde_json::from_str(s)?;
        file.try_into()
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    /// File representation; programmatic predicates are not serializable and are dropped.
    pub fn to_file(&self) -> ConstraintFile {
        ConstraintFile {
            n: self.n,
            linear: self
                .linear
                .iter()
                .map(|c| LinearEntry {
                    a: c.coeffs.clone(),
                    b: c.rhs,
                    rel: match c.relation {
                        Relation::Le => RelationTag::Le,
                        Relation::Eq => RelationTag::Eq,
                    },
                })
                .collect(),
            nonlinear: self
                .nonlinear
                .iter()
                .map(|c| NonlinearEntry { terms: c.terms.clone(), b: c.bound })
                .collect(),
            eps_ineq: self.eps_ineq,
            eps_eq: self.eps_eq,
        }
    }
}

/// Result of [`ConstraintSet::check`]; index lists are ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ViolationReport {
    pub satisfied: bool,
    pub linear: Vec<usize>,
    pub nonlinear: Vec<usize>,
    pub predicates: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RelationTag {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "==", alias = "=")]
    Eq,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearEntry {
    pub a: Vec<f64>,
    pub b: f64,
    pub rel: RelationTag,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonlinearEntry {
    pub terms: Vec<Monomial>,
    pub b: f64,
}

fn default_eps_ineq() -> f64 {
    DEFAULT_EPS_INEQ
}

fn default_eps_eq() -> f64 {
    DEFAULT_EPS_EQ
}

/// The JSON constraint file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintFile {
    pub n: usize,
    #[serde(default)]
    pub linear: Vec<LinearEntry>,
    #[serde(default)]
    pub nonlinear: Vec<NonlinearEntry>,
    #[serde(default = "default_eps_ineq")]
    pub eps_ineq: f64,
    #[serde(default = "default_eps_eq")]
    pub eps_eq: f64,
}

impl TryFrom<ConstraintFile> for ConstraintSet {
    type Error = Error;

    fn try_from(file: ConstraintFile) -> Result<Self> {
        let mut cs = ConstraintSet::new(file.n)?.with_tolerances(file.eps_ineq, file.eps_eq)?;
        for entry in file.linear {
            let c = match entry.rel {
                RelationTag::Le => LinearConstraint::le(entry.a, entry.b)?,
                RelationTag::Ge => LinearConstraint::ge(entry.a, entry.b)?,
                RelationTag::Eq => LinearConstraint::eq(entry.a, entry.b)?,
            };
            cs = cs.with_linear(c)?;
        }
        for entry in file.nonlinear {
            cs = cs.with_nonlinear(PolynomialConstraint::new(entry.terms, entry.b)?)?;
        }
        Ok(cs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize) -> ConstraintSet {
        ConstraintSet::new(n).unwrap()
    }

    #[test]
    fn equality_expands_into_a_band() {
        let cs = set(3)
            .with_tolerances(1e-3, 1e-2)
            .unwrap()
            .with_linear(LinearConstraint::eq(vec![1.0, 1.0, 0.0], 0.6).unwrap())
            .unwrap();
        let hs = cs.expand_linear();
        assert_eq!(hs.len(), 2);
        assert_eq!(hs[0].coeffs, vec![1.0, 1.0, 0.0]);
        assert!((hs[0].rhs - 0.61).abs() < 1e-15);
        assert_eq!(hs[1].coeffs, vec![-1.0, -1.0, -0.0]);
        assert!((hs[1].rhs + 0.59).abs() < 1e-15);
    }

    #[test]
    fn inequality_expansion() {
        let cs = set(3)
            .with_tolerances(0.0, 1e-2)
            .unwrap()
            .with_linear(LinearConstraint::le(vec![1.0, 0.0, 0.0], 0.3).unwrap())
            .unwrap();
        assert_eq!(cs.expand_linear(), vec![HalfSpace { coeffs: vec![1.0, 0.0, 0.0], rhs: 0.3 }]);

        let cs = set(3)
            .with_tolerances(1e-3, 1e-2)
            .unwrap()
            .with_linear(LinearConstraint::le(vec![1.0, 0.5, 0.0], 0.6).unwrap())
            .unwrap();
        let hs = cs.expand_linear();
        assert!((hs[0].rhs - 0.601).abs() < 1e-15);
    }

    #[test]
    fn check_reports_violations() {
        let cs = set(3)
            .with_linear(LinearConstraint::le(vec![1.0, 0.0, 0.0], 0.3).unwrap())
            .unwrap();
        let r = cs.check(&[0.5, 0.4, 0.1]).unwrap();
        assert!(!r.satisfied);
        assert_eq!(r.linear, vec![0]);

        let product = Monomial { coef: 1.0, exponents: vec![1, 1, 0] };
        let cs = set(3)
            .with_nonlinear(PolynomialConstraint::new(vec![product], 0.1).unwrap())
            .unwrap();
        let r = cs.check(&[0.5, 0.5, 0.0]).unwrap();
        assert_eq!(r.nonlinear, vec![0]);
        assert!(cs.check(&[0.1, 0.5, 0.4]).unwrap().satisfied);
    }

    #[test]
    fn ge_boundary_is_satisfied() {
        let cs = set(3)
            .with_linear(LinearConstraint::ge(vec![1.0, 1.0, 0.0], 0.6).unwrap())
            .unwrap();
        assert!(cs.check(&[0.3, 0.3, 0.4]).unwrap().satisfied);
    }

    #[test]
    fn check_rejects_wrong_dimension() {
        assert!(matches!(set(3).check(&[0.5, 0.5]), Err(Error::Dimension(_))));
    }

    #[test]
    fn zero_coefficients_are_rejected() {
        assert!(LinearConstraint::le(vec![0.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn predicates_are_checked() {
        let cs = set(3).with_predicate(Predicate::new("x1 below x2", |x| x[0] <= x[1]));
        let r = cs.check(&[0.6, 0.2, 0.2]).unwrap();
        assert_eq!(r.predicates, vec![0]);
        assert!(!cs.is_satisfied(&[0.6, 0.2, 0.2]));
    }

    #[test]
    fn parses_the_documented_file() {
        let json = r#"{"n": 3,
            "linear": [{"a": [1.0, 0.5, 0.0], "b": 0.6, "rel": "<="}, {"a": [1,1,0], "b": 0.6, "rel": "=="}],
            "nonlinear": [{"terms": [{"coef": 1.0, "exp": [1,1,0]}], "b": 0.1}],
            "eps_ineq": 0.001, "eps_eq": 0.01}"#;
        let cs = ConstraintSet::from_json_str(json).unwrap();
        assert_eq!(cs.linear.len(), 2);
        assert_eq!(cs.linear[1].relation, Relation::Eq);
        assert_eq!(cs.nonlinear[0].bound, 0.1);
        let back: ConstraintSet = cs.to_file().try_into().unwrap();
        assert_eq!(back.linear, cs.linear);
    }

    #[test]
    fn file_defaults_and_ge_normalization() {
        let json = r#"{"n": 3, "linear": [{"a": [1, 1, 0], "b": 0.6, "rel": ">="}]}"#;
        let cs = ConstraintSet::from_json_str(json).unwrap();
        assert_eq!(cs.eps_ineq, DEFAULT_EPS_INEQ);
        assert_eq!(cs.eps_eq, DEFAULT_EPS_EQ);
        assert_eq!(cs.linear[0].coeffs, vec![-1.0, -1.0, -0.0]);
        assert_eq!(cs.linear[0].rhs, -0.6);
    }

    #[test]
    fn file_dimension_mismatch_is_rejected() {
        let json = r#"{"n": 3, "linear": [{"a": [1, 1], "b": 0.6, "rel": "<="}]}"#;
        assert!(ConstraintSet::from_json_str(json).is_err());
    }

    #[test]
    fn from_bounds_skips_nonbinding_entries() {
        let cs = ConstraintSet::from_bounds(&[0.0, 0.1, 0.0], &[0.5, 1.0, 1.0]).unwrap();
        assert_eq!(cs.linear.len(), 2);
        assert!(cs.is_satisfied(&[0.5, 0.1, 0.4]));
        assert!(!cs.is_satisfied(&[0.5, 0.05, 0.45]));
    }
}
