//! Best-bound branch-and-bound on top of the simplex core.
//!
//! Branching picks the most fractional integer variable (ties by lowest
//! variable index); node selection is best-bound with ties broken by depth
//! (deeper first) and then creation order. All rules are deterministic.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::milp::simplex::{solve_standard, standardize, LpOutcome, Standardized};
use crate::milp::{Incumbent, MilpModel, MilpSolution, Sense, SolveOptions, SolveStatus};

struct Node {
    /// Parent's LP objective: a valid lower bound for the subtree (min sense).
    bound: f64,
    depth: usize,
    id: usize,
    bounds: Vec<(f64, f64)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // BinaryHeap pops the maximum, so "better" must compare greater:
    // smaller bound, then greater depth, then smaller id.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| self.depth.cmp(&other.depth))
            .then_with(|| other.id.cmp(&self.id))
    }
}

/// Solves the mixed-integer program.
///
/// Infeasible and unbounded models are reported through
/// [`SolveStatus`]; hitting the node limit returns
/// [`Error::NodeLimit`] carrying the best integer solution found so far.
pub fn solve_milp(model: &MilpModel, opts: &SolveOptions) -> Result<MilpSolution> {
    model.validate()?;
    for (i, v) in model.vars().iter().enumerate() {
        if v.integer && !v.upper.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "integer variable {} ({}) needs a finite upper bound for branch-and-bound",
                i, v.name
            )));
        }
    }

    let maximize = model.sense() == Sense::Maximize;
    // Internally everything is minimization; re-negate on the way out.
    let finish = |status: SolveStatus, values: Vec<f64>, obj: f64, bound: f64, nodes: usize| {
        let (objective_value, bound) = if maximize { (-obj, -bound) } else { (obj, bound) };
        MilpSolution {
            status,
            values,
            objective_value,
            bound,
            nodes,
        }
    };

    let root_bounds: Vec<(f64, f64)> = model.vars().iter().map(|v| (v.lower, v.upper)).collect();
    let int_vars: Vec<usize> = model
        .vars()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.integer)
        .map(|(i, _)| i)
        .collect();
    // Minimization-form objective for exact incumbent re-evaluation.
    let min_cost: Vec<f64> = model
        .vars()
        .iter()
        .enumerate()
        .map(|(i, _)| {
            let c = model.objective_coeff(crate::milp::VarId(i));
            if maximize {
                -c
            } else {
                c
            }
        })
        .collect();

    let mut heap = BinaryHeap::new();
    heap.push(Node {
        bound: f64::NEG_INFINITY,
        depth: 0,
        id: 0,
        bounds: root_bounds,
    });
    let mut next_id = 1usize;
    let mut nodes_solved = 0usize;
    let mut incumbent: Option<(f64, Vec<f64>)> = None;

    while let Some(node) = heap.pop() {
        // Remaining global lower bound (this node has the smallest bound).
        let global_lb = node.bound;
        if let Some((inc_obj, _)) = &incumbent {
            if global_lb >= inc_obj - opts.opt_tol {
                // Gap closed: the incumbent is optimal within tolerance.
                let (obj, values) = incumbent.unwrap();
                return Ok(finish(
                    SolveStatus::Optimal,
                    values,
                    obj,
                    global_lb.max(f64::NEG_INFINITY),
                    nodes_solved,
                ));
            }
        }

        if nodes_solved >= opts.node_limit {
            let ext_bound = if maximize { -global_lb } else { global_lb };
            let incumbent = incumbent.map(|(obj, values)| {
                Box::new(Incumbent {
                    values,
                    objective_value: if maximize { -obj } else { obj },
                    bound: ext_bound,
                    nodes: nodes_solved,
                })
            });
            return Err(Error::NodeLimit {
                incumbent,
                bound: ext_bound,
            });
        }

        nodes_solved += 1;
        let outcome = match standardize(model, Some(&node.bounds)) {
            Standardized::Infeasible => continue,
            Standardized::Ready(std_form) => solve_standard(&std_form, opts)?,
        };
        let (x, lp_obj) = match outcome {
            LpOutcome::Infeasible => continue,
            LpOutcome::Unbounded => {
                if node.depth == 0 {
                    let inf = f64::INFINITY;
                    return Ok(finish(SolveStatus::Unbounded, Vec::new(), -inf, -inf, nodes_solved));
                }
                // A child of a bounded parent cannot be unbounded.
                return Err(Error::Numerical("unbounded node below the root".into()));
            }
            LpOutcome::Optimal { x, obj } => (x, obj),
        };

        if let Some((inc_obj, _)) = &incumbent {
            if lp_obj >= inc_obj - opts.opt_tol {
                continue; // cannot improve
            }
        }

        // Most fractional integer variable.
        let mut branch_var: Option<(usize, f64)> = None; // (var, |frac - 0.5|)
        for &j in &int_vars {
            let frac = x[j] - x[j].floor();
            let dist = (frac.min(1.0 - frac)).abs();
            if dist <= opts.feas_tol {
                continue; // integral
            }
            let score = (frac - 0.5).abs();
            match branch_var {
                Some((_, best)) if score >= best => {}
                _ => branch_var = Some((j, score)),
            }
        }

        match branch_var {
            None => {
                // Integer feasible: snap and re-evaluate the objective
                // deterministically from the snapped values.
                let mut values = x.clone();
                for &j in &int_vars {
                    values[j] = values[j].round();
                }
                let obj: f64 = min_cost
                    .iter()
                    .zip(&values)
                    .map(|(&c, &v)| c * v)
                    .sum();
                let better = match &incumbent {
                    Some((inc_obj, _)) => obj < *inc_obj,
                    None => true,
                };
                if better {
                    incumbent = Some((obj, values));
                }
            }
            Some((j, _)) => {
                let floor = x[j].floor();
                let (lo, hi) = node.bounds[j];
                let mut left = node.bounds.clone();
                left[j] = (lo, floor.min(hi));
                let mut right = node.bounds.clone();
                right[j] = ((floor + 1.0).max(lo), hi);
                heap.push(Node {
                    bound: lp_obj,
                    depth: node.depth + 1,
                    id: next_id,
                    bounds: left,
                });
                heap.push(Node {
                    bound: lp_obj,
                    depth: node.depth + 1,
                    id: next_id + 1,
                    bounds: right,
                });
                next_id += 2;
            }
        }
    }

    match incumbent {
        Some((obj, values)) => Ok(finish(SolveStatus::Optimal, values, obj, obj, nodes_solved)),
        None => {
            let inf = f64::INFINITY;
            Ok(finish(SolveStatus::Infeasible, Vec::new(), inf, inf, nodes_solved))
        }
    }
}
