//! Solver-neutral linear models.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};

/// Absolute tolerance used by [`LinearModel::check_feasibility`].
pub const FEASIBILITY_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub label: String,
    pub terms: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(j, a)| a * values[j]).sum()
    }

    /// Amount by which `values` violates this row (zero when satisfied).
    pub fn violation(&self, values: &[f64]) -> f64 {
        let lhs = self.activity(values);
        match self.relation {
            Relation::Le => (lhs - self.rhs).max(0.0),
            Relation::Ge => (self.rhs - lhs).max(0.0),
            Relation::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// A minimization problem over continuous and binary variables.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    variables: Vec<Variable>,
    objective: Vec<(usize, f64)>,
    constraints: Vec<Constraint>,
    name_index: HashMap<String, usize>,
}

impl Default for LinearModel {
    fn default() -> Self {
        Self::new()
    }
}

impl LinearModel {
    pub fn new() -> Self {
        Self {
            variables: Vec::new(),
            objective: Vec::new(),
            constraints: Vec::new(),
            name_index: HashMap::new(),
        }
    }

    /// Adds a variable and returns its index.
    ///
    /// Panics on duplicate names or non-finite bounds for binaries; both are
    /// programming errors in the model builders.
    pub fn add_var(&mut self, name: impl Into<String>, kind: VarKind, lower: f64, upper: f64) -> usize {
        let name = name.into();
        assert!(!lower.is_nan() && !upper.is_nan(), "NaN bound on {name}");
        let (lower, upper) = match kind {
            VarKind::Binary => (0.0, 1.0),
            VarKind::Continuous => (lower, upper),
        };
        let idx = self.variables.len();
        let prev = self.name_index.insert(name.clone(), idx);
        assert!(prev.is_none(), "duplicate variable name {name}");
        self.variables.push(Variable { name, kind, lower, upper });
        idx
    }

    pub fn add_continuous(&mut self, name: impl Into<String>) -> usize {
        self.add_var(name, VarKind::Continuous, 0.0, f64::INFINITY)
    }

    pub fn add_free(&mut self, name: impl Into<String>) -> usize {
        self.add_var(name, VarKind::Continuous, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> usize {
        self.add_var(name, VarKind::Binary, 0.0, 1.0)
    }

    /// Adds a row. Repeated indices are merged and zero coefficients dropped.
    pub fn add_constraint(
        &mut self,
        label: impl Into<String>,
        terms: impl IntoIterator<Item = (usize, f64)>,
        relation: Relation,
        rhs: f64,
    ) -> usize {
        let label = label.into();
        let terms = normalize_terms(terms);
        assert!(rhs.is_finite(), "non-finite rhs on {label}");
        assert!(terms.iter().all(|&(j, a)| j < self.variables.len() && a.is_finite()));
        self.constraints.push(Constraint { label, terms, relation, rhs });
        self.constraints.len() - 1
    }

    pub fn set_objective(&mut self, terms: impl IntoIterator<Item = (usize, f64)>) {
        self.objective = normalize_terms(terms);
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[(usize, f64)] {
        &self.objective
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn num_binaries(&self) -> usize {
        self.variables.iter().filter(|v| v.kind == VarKind::Binary).count()
    }

    pub fn binary_indices(&self) -> Vec<usize> {
        (0..self.variables.len())
            .filter(|&j| self.variables[j].kind == VarKind::Binary)
            .collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.name_index.get(name).copied()
    }

    pub fn var(&self, name: &str) -> Result<usize> {
        self.index_of(name).ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn name_index(&self) -> &HashMap<String, usize> {
        &self.name_index
    }

    pub fn constraint(&self, label: &str) -> Option<&Constraint> {
        self.constraints.iter().find(|c| c.label == label)
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.iter().map(|&(j, c)| c * values[j]).sum()
    }

    /// Lists every row and bound violated by more than [`FEASIBILITY_TOL`].
    pub fn check_feasibility(&self, values: &[f64]) -> Result<Vec<Violation>> {
        self.check_feasibility_tol(values, FEASIBILITY_TOL)
    }

    pub fn check_feasibility_tol(&self, values: &[f64], tol: f64) -> Result<Vec<Violation>> {
        if values.len() != self.variables.len() {
            return Err(Error::DimensionMismatch {
                expected: self.variables.len(),
                got: values.len(),
            });
        }
        let mut out = Vec::new();
        for (var, &x) in self.variables.iter().zip(values) {
            let slack = (x - var.lower).min(var.upper - x);
            if !(slack >= -tol) {
                out.push(Violation {
                    label: format!("bound:{}", var.name),
                    activity: x,
                    rhs: if x < var.lower { var.lower } else { var.upper },
                    relation: if x < var.lower { Relation::Ge } else { Relation::Le },
                    amount: -slack,
                });
            }
        }
        for c in &self.constraints {
            let amount = c.violation(values);
            if !(amount <= tol) {
                out.push(Violation {
                    label: c.label.clone(),
                    activity: c.activity(values),
                    rhs: c.rhs,
                    relation: c.relation,
                    amount,
                });
            }
        }
        Ok(out)
    }

    /// Looks up values by variable name from another model's assignment.
    ///
    /// Variables of `self` that `source` does not have are set from `fill`.
    pub fn project_from(&self, source: &LinearModel, values: &[f64], fill: impl Fn(&str) -> f64) -> Vec<f64> {
        self.variables
            .iter()
            .map(|v| match source.index_of(&v.name) {
                Some(j) => values[j],
                None => fill(&v.name),
            })
            .collect()
    }

    /// LP-style text listing with deterministic ordering.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let fmt_terms = |terms: &[(usize, f64)]| {
            let mut s = String::new();
            for (pos, &(j, a)) in terms.iter().enumerate() {
                let name = &self.variables[j].name;
                match (pos, a < 0.0) {
                    (0, false) => write!(s, "{a} {name}"),
                    (0, true) => write!(s, "-{} {name}", -a),
                    (_, false) => write!(s, " + {a} {name}"),
                    (_, true) => write!(s, " - {} {name}", -a),
                }
                .expect("writing to a String");
            }
            if s.is_empty() {
                s.push('0');
            }
            s
        };
        let _ = writeln!(out, "Minimize\n obj: {}", fmt_terms(&self.objective));
        let _ = writeln!(out, "Subject To");
        for c in &self.constraints {
            let _ = writeln!(out, " {}: {} {} {}", c.label, fmt_terms(&c.terms), c.relation.symbol(), c.rhs);
        }
        let _ = writeln!(out, "Bounds");
        for v in self.variables.iter().filter(|v| v.kind == VarKind::Continuous) {
            match (v.lower.is_finite(), v.upper.is_finite()) {
                (false, false) => {
                    let _ = writeln!(out, " {} free", v.name);
                }
                (true, false) if v.lower == 0.0 => {}
                (true, false) => {
                    let _ = writeln!(out, " {} >= {}", v.name, v.lower);
                }
                (false, true) => {
                    let _ = writeln!(out, " -inf <= {} <= {}", v.name, v.upper);
                }
                (true, true) => {
                    let _ = writeln!(out, " {} <= {} <= {}", v.lower, v.name, v.upper);
                }
            }
        }
        let bins: Vec<&str> = self
            .variables
            .iter()
            .filter(|v| v.kind == VarKind::Binary)
            .map(|v| v.name.as_str())
            .collect();
        if !bins.is_empty() {
            let _ = writeln!(out, "Binaries\n {}", bins.join(" "));
        }
        out.push_str("End\n");
        out
    }
}

fn normalize_terms(terms: impl IntoIterator<Item = (usize, f64)>) -> Vec<(usize, f64)> {
    let mut terms: Vec<(usize, f64)> = terms.into_iter().collect();
    terms.sort_by_key(|&(j, _)| j);
    let mut merged: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
    for (j, a) in terms {
        match merged.last_mut() {
            Some((k, b)) if *k == j => *b += a,
            _ => merged.push((j, a)),
        }
    }
    merged.retain(|&(_, a)| a != 0.0);
    merged
}

/// One violated row or bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub label: String,
    pub activity: f64,
    pub relation: Relation,
    pub rhs: f64,
    pub amount: f64,
}
