//! A small, deterministic mixed-integer linear programming solver.
//!
//! The LP core is a bounded-variable two-phase primal simplex
//! ([`solve_lp_relaxation`]); integrality is handled by best-bound
//! branch-and-bound ([`solve_milp`]). The solver is written for the
//! desk-sized models produced by the planning formulations in this crate:
//! dense linear algebra, no cutting planes, and strictly deterministic
//! pivoting and branching rules so that identical models always produce
//! identical solutions.

mod branch_bound;
mod simplex;

pub use branch_bound::solve_milp;
pub use simplex::solve_lp_relaxation;

use crate::error::{Error, Result};

/// Optimization direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Constraint relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// Handle to a model variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

#[derive(Debug, Clone)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub integer: bool,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub terms: Vec<(VarId, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A mixed-integer linear program.
///
/// Every variable must be bounded below (finite lower bound); integer
/// variables additionally need a finite upper bound before branch-and-bound
/// will accept the model.
#[derive(Debug, Clone)]
pub struct MilpModel {
    sense: Sense,
    vars: Vec<Variable>,
    constraints: Vec<Constraint>,
    objective: Vec<f64>,
}

impl MilpModel {
    pub fn new(sense: Sense) -> Self {
        MilpModel {
            sense,
            vars: Vec::new(),
            constraints: Vec::new(),
            objective: Vec::new(),
        }
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    /// Adds a variable with the given bounds. The lower bound must be finite.
    pub fn add_var(&mut self, name: impl Into<String>, lower: f64, upper: f64, integer: bool) -> VarId {
        self.vars.push(Variable {
            name: name.into(),
            lower,
            upper,
            integer,
        });
        self.objective.push(0.0);
        VarId(self.vars.len() - 1)
    }

    pub fn set_objective(&mut self, var: VarId, coeff: f64) {
        self.objective[var.0] = coeff;
    }

    pub fn objective_coeff(&self, var: VarId) -> f64 {
        self.objective[var.0]
    }

    pub fn add_constraint(&mut self, terms: Vec<(VarId, f64)>, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint {
            terms,
            relation,
            rhs,
        });
    }

    pub fn set_bounds(&mut self, var: VarId, lower: f64, upper: f64) {
        self.vars[var.0].lower = lower;
        self.vars[var.0].upper = upper;
    }

    pub fn var(&self, id: VarId) -> &Variable {
        &self.vars[id.0]
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn constraint_count(&self) -> usize {
        self.constraints.len()
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Structural sanity: finite lower bounds, ordered bounds, in-range
    /// variable references, finite coefficients.
    pub fn validate(&self) -> Result<()> {
        for (i, v) in self.vars.iter().enumerate() {
            if !v.lower.is_finite() {
                return Err(Error::Validation(format!(
                    "variable {} ({}) has no finite lower bound",
                    i, v.name
                )));
            }
            if v.upper < v.lower {
                return Err(Error::Validation(format!(
                    "variable {} ({}) has upper bound {} below lower bound {}",
                    i, v.name, v.upper, v.lower
                )));
            }
        }
        for (ci, c) in self.constraints.iter().enumerate() {
            if !c.rhs.is_finite() {
                return Err(Error::Validation(format!(
                    "constraint {ci} has non-finite right-hand side"
                )));
            }
            for &(v, coeff) in &c.terms {
                if v.0 >= self.vars.len() {
                    return Err(Error::Validation(format!(
                        "constraint {ci} references unknown variable {}",
                        v.0
                    )));
                }
                if !coeff.is_finite() {
                    return Err(Error::Validation(format!(
                        "constraint {ci} has non-finite coefficient"
                    )));
                }
            }
        }
        for &c in &self.objective {
            if !c.is_finite() {
                return Err(Error::Validation("non-finite objective coefficient".into()));
            }
        }
        Ok(())
    }

    /// Plain-text dump of the model, one constraint per line. Debug aid
    /// only; not meant to be parsed back.
    pub fn dump_lp(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let sense = match self.sense {
            Sense::Minimize => "min",
            Sense::Maximize => "max",
        };
        let term = |coeff: f64, name: &str| format!("{coeff} {name}");
        let obj: Vec<String> = self
            .objective
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(i, &c)| term(c, &self.vars[i].name))
            .collect();
        let _ = writeln!(
            out,
            "{sense}: {}",
            if obj.is_empty() { "0".into() } else { obj.join(" + ") }
        );
        for (i, c) in self.constraints.iter().enumerate() {
            let lhs: Vec<String> = c
                .terms
                .iter()
                .filter(|&&(_, coeff)| coeff != 0.0)
                .map(|&(v, coeff)| term(coeff, &self.vars[v.0].name))
                .collect();
            let rel = match c.relation {
                Relation::Le => "<=",
                Relation::Eq => "=",
                Relation::Ge => ">=",
            };
            let _ = writeln!(
                out,
                "c{}: {} {rel} {}",
                i + 1,
                if lhs.is_empty() { "0".into() } else { lhs.join(" + ") },
                c.rhs
            );
        }
        for v in &self.vars {
            let _ = writeln!(
                out,
                "{} <= {} <= {}{}",
                v.lower,
                v.name,
                v.upper,
                if v.integer { "  [int]" } else { "" }
            );
        }
        out
    }
}

/// Solver tolerances and limits.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Constraint/integrality feasibility tolerance.
    pub feas_tol: f64,
    /// Optimality gap at which branch-and-bound stops.
    pub opt_tol: f64,
    /// Maximum number of branch-and-bound nodes (LP solves).
    pub node_limit: usize,
    /// Simplex pivot cap per LP solve.
    pub iteration_limit: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            feas_tol: 1e-6,
            opt_tol: 1e-6,
            node_limit: 1_000_000,
            iteration_limit: 100_000,
        }
    }
}

/// Termination status of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
        }
    }
}

/// Result of a solve. `values` is indexed by [`VarId`].
///
/// For infeasible models the objective is `+inf` under minimization and
/// `-inf` under maximization (and vice versa for unbounded ones); `bound`
/// is the proven dual bound, equal to the objective when optimal.
#[derive(Debug, Clone)]
pub struct MilpSolution {
    pub status: SolveStatus,
    pub values: Vec<f64>,
    pub objective_value: f64,
    pub bound: f64,
    /// Branch-and-bound nodes solved (0 for a pure LP solve).
    pub nodes: usize,
}

impl MilpSolution {
    pub fn value(&self, var: VarId) -> f64 {
        self.values[var.0]
    }

    /// Variable values keyed by name, for reporting.
    pub fn named_values(&self, model: &MilpModel) -> std::collections::BTreeMap<String, f64> {
        model
            .vars()
            .iter()
            .zip(&self.values)
            .map(|(v, &x)| (v.name.clone(), x))
            .collect()
    }
}

/// Feasible-but-unproven solution carried by a node-limit error.
#[derive(Debug, Clone)]
pub struct Incumbent {
    pub values: Vec<f64>,
    pub objective_value: f64,
    pub bound: f64,
    pub nodes: usize,
}
