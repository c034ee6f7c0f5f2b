//! Bounded-variable two-phase primal simplex with dense linear algebra.
//!
//! Pivot selection is Dantzig's rule (most negative reduced cost, ties by
//! lowest column index) with a fallback to Bland's rule after a run of
//! degenerate pivots, which guarantees termination. The basis is
//! refactorized from scratch every iteration; models here are small enough
//! that robustness beats speed.

use crate::error::{Error, Result};
use crate::milp::{MilpModel, MilpSolution, Relation, Sense, SolveOptions, SolveStatus};

/// Anything smaller than this is treated as a zero pivot / reduced cost.
const PIVOT_TOL: f64 = 1e-9;
/// Consecutive degenerate pivots before switching to Bland's rule.
const DEGENERACY_THRESHOLD: usize = 50;

/// `min c x, rows x = b, lower <= x <= upper` with slack columns appended.
#[derive(Debug, Clone)]
pub(crate) struct Standard {
    pub n_struct: usize,
    pub ncols: usize,
    pub rows: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub cost: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

pub(crate) enum Standardized {
    Ready(Standard),
    /// Bounds or a degenerate (all-zero) constraint are unsatisfiable.
    Infeasible,
}

/// Brings a model into computational standard form. `bounds` optionally
/// replaces the variable bounds (used by branch-and-bound).
pub(crate) fn standardize(model: &MilpModel, bounds: Option<&[(f64, f64)]>) -> Standardized {
    let n = model.var_count();
    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    for (i, v) in model.vars().iter().enumerate() {
        let (l, u) = match bounds {
            Some(b) => b[i],
            None => (v.lower, v.upper),
        };
        if l > u {
            return Standardized::Infeasible;
        }
        lower.push(l);
        upper.push(u);
    }

    let mut dense_rows: Vec<Vec<f64>> = Vec::new();
    let mut relations: Vec<Relation> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    for c in model.constraints() {
        let mut row = vec![0.0; n];
        for &(v, coeff) in &c.terms {
            row[v.0] += coeff;
        }
        if row.iter().all(|&x| x == 0.0) {
            // Empty constraint: either trivially true (drop it) or the
            // model is infeasible.
            let ok = match c.relation {
                Relation::Le => 0.0 <= c.rhs + 1e-9,
                Relation::Eq => c.rhs.abs() <= 1e-9,
                Relation::Ge => 0.0 >= c.rhs - 1e-9,
            };
            if ok {
                continue;
            }
            return Standardized::Infeasible;
        }
        dense_rows.push(row);
        relations.push(c.relation);
        rhs.push(c.rhs);
    }

    let m = dense_rows.len();
    let n_slack = relations
        .iter()
        .filter(|r| !matches!(r, Relation::Eq))
        .count();
    let ncols = n + n_slack;
    let mut rows = vec![vec![0.0; ncols]; m];
    let mut slack_at = n;
    for (i, row) in dense_rows.into_iter().enumerate() {
        rows[i][..n].copy_from_slice(&row);
        match relations[i] {
            Relation::Le => {
                rows[i][slack_at] = 1.0;
                slack_at += 1;
            }
            Relation::Ge => {
                rows[i][slack_at] = -1.0;
                slack_at += 1;
            }
            Relation::Eq => {}
        }
    }
    let mut cost = vec![0.0; ncols];
    for (i, &c) in model.objective.iter().enumerate() {
        cost[i] = match model.sense {
            Sense::Minimize => c,
            Sense::Maximize => -c,
        };
    }
    lower.resize(ncols, 0.0);
    upper.resize(ncols, f64::INFINITY);

    Standardized::Ready(Standard {
        n_struct: n,
        ncols,
        rows,
        b: rhs,
        cost,
        lower,
        upper,
    })
}

/// Dense LU with partial pivoting.
struct Lu {
    m: usize,
    /// Combined L (below diagonal, unit) and U (diagonal and above).
    lu: Vec<Vec<f64>>,
    /// Row permutation: row `i` of the factored system is row `perm[i]` of
    /// the input.
    perm: Vec<usize>,
}

impl Lu {
    fn factor(mat: Vec<Vec<f64>>) -> Result<Lu> {
        let m = mat.len();
        let mut lu = mat;
        let mut perm: Vec<usize> = (0..m).collect();
        for k in 0..m {
            let mut pivot_row = k;
            let mut pivot_val = lu[k][k].abs();
            for i in k + 1..m {
                if lu[i][k].abs() > pivot_val {
                    pivot_val = lu[i][k].abs();
                    pivot_row = i;
                }
            }
            if pivot_val < 1e-11 {
                return Err(Error::Numerical("singular basis matrix".into()));
            }
            if pivot_row != k {
                lu.swap(k, pivot_row);
                perm.swap(k, pivot_row);
            }
            let pivot = lu[k][k];
            for i in k + 1..m {
                let factor = lu[i][k] / pivot;
                lu[i][k] = factor;
                for j in k + 1..m {
                    let ukj = lu[k][j];
                    lu[i][j] -= factor * ukj;
                }
            }
        }
        Ok(Lu { m, lu, perm })
    }

    /// Solves `B z = rhs`.
    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for i in 0..m {
            let mut v = rhs[self.perm[i]];
            for j in 0..i {
                v -= self.lu[i][j] * y[j];
            }
            y[i] = v;
        }
        for i in (0..m).rev() {
            for j in i + 1..m {
                let yj = y[j];
                y[i] -= self.lu[i][j] * yj;
            }
            y[i] /= self.lu[i][i];
        }
        y
    }

    /// Solves `B^T z = rhs`.
    fn solve_transpose(&self, rhs: &[f64]) -> Vec<f64> {
        let m = self.m;
        // B^T = U^T L^T P, so solve U^T w = rhs, then L^T u = w, then
        // z = P^T u.
        let mut w = vec![0.0; m];
        for i in 0..m {
            let mut v = rhs[i];
            for j in 0..i {
                v -= self.lu[j][i] * w[j];
            }
            w[i] = v / self.lu[i][i];
        }
        for i in (0..m).rev() {
            for j in i + 1..m {
                let wj = w[j];
                w[i] -= self.lu[j][i] * wj;
            }
        }
        let mut z = vec![0.0; m];
        for i in 0..m {
            z[self.perm[i]] = w[i];
        }
        z
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColState {
    Basic,
    AtLower,
    AtUpper,
}

pub(crate) enum LpOutcome {
    Optimal { x: Vec<f64>, obj: f64 },
    Infeasible,
    Unbounded,
}

struct Tableau {
    m: usize,
    /// Structural + slack columns; artificials start here.
    art_start: usize,
    ncols: usize,
    rows: Vec<Vec<f64>>,
    b: Vec<f64>,
    cost: Vec<f64>,
    real_cost: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    state: Vec<ColState>,
    basis: Vec<usize>,
    x: Vec<f64>,
}

enum IterateEnd {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn column(&self, j: usize) -> Vec<f64> {
        (0..self.m).map(|i| self.rows[i][j]).collect()
    }

    fn factor_basis(&self) -> Result<Lu> {
        let mat: Vec<Vec<f64>> = (0..self.m)
            .map(|i| self.basis.iter().map(|&j| self.rows[i][j]).collect())
            .collect();
        Lu::factor(mat)
    }

    /// Recomputes basic values from the nonbasic bounds.
    fn recompute_x(&mut self, lu: &Lu) {
        for j in 0..self.ncols {
            match self.state[j] {
                ColState::AtLower => self.x[j] = self.lower[j],
                ColState::AtUpper => self.x[j] = self.upper[j],
                ColState::Basic => {}
            }
        }
        let mut rhs = self.b.clone();
        for j in 0..self.ncols {
            if self.state[j] != ColState::Basic && self.x[j] != 0.0 {
                for i in 0..self.m {
                    rhs[i] -= self.rows[i][j] * self.x[j];
                }
            }
        }
        let xb = lu.solve(&rhs);
        for (i, &bj) in self.basis.iter().enumerate() {
            self.x[bj] = xb[i];
        }
    }

    fn iterate(&mut self, opts: &SolveOptions) -> Result<IterateEnd> {
        let mut iterations = 0usize;
        let mut degenerate_run = 0usize;
        let mut bland = false;
        loop {
            iterations += 1;
            if iterations > opts.iteration_limit {
                return Err(Error::Numerical(format!(
                    "simplex iteration limit {} exceeded",
                    opts.iteration_limit
                )));
            }
            let lu = self.factor_basis()?;
            self.recompute_x(&lu);
            let cb: Vec<f64> = self.basis.iter().map(|&j| self.cost[j]).collect();
            let y = lu.solve_transpose(&cb);

            // Entering column.
            let mut entering: Option<(usize, f64)> = None; // (col, |d|)
            for j in 0..self.ncols {
                if self.state[j] == ColState::Basic {
                    continue;
                }
                if self.upper[j] - self.lower[j] <= 0.0 {
                    continue; // fixed (includes locked artificials)
                }
                let mut d = self.cost[j];
                for i in 0..self.m {
                    d -= y[i] * self.rows[i][j];
                }
                let improving = match self.state[j] {
                    ColState::AtLower => d < -PIVOT_TOL,
                    ColState::AtUpper => d > PIVOT_TOL,
                    ColState::Basic => false,
                };
                if !improving {
                    continue;
                }
                if bland {
                    entering = Some((j, d.abs()));
                    break;
                }
                match entering {
                    Some((_, best)) if d.abs() <= best => {}
                    _ => entering = Some((j, d.abs())),
                }
            }
            let Some((e, _)) = entering else {
                return Ok(IterateEnd::Optimal);
            };

            let delta = if self.state[e] == ColState::AtLower { 1.0 } else { -1.0 };
            let w = lu.solve(&self.column(e));

            // Ratio test: how far can the entering variable move?
            let mut t_best = self.upper[e] - self.lower[e]; // own-bound flip
            let mut leaving: Option<usize> = None; // basis position
            for i in 0..self.m {
                let rate = delta * w[i]; // basic value shrinks at this rate
                let bj = self.basis[i];
                let t_i = if rate > PIVOT_TOL {
                    (self.x[bj] - self.lower[bj]).max(0.0) / rate
                } else if rate < -PIVOT_TOL {
                    if self.upper[bj].is_finite() {
                        (self.upper[bj] - self.x[bj]).max(0.0) / -rate
                    } else {
                        continue;
                    }
                } else {
                    continue;
                };
                let replace = match leaving {
                    None => t_i < t_best - 1e-12,
                    Some(r) => {
                        t_i < t_best - 1e-12
                            || ((t_i - t_best).abs() <= 1e-12 && bj < self.basis[r])
                    }
                };
                if replace {
                    t_best = t_i;
                    leaving = Some(i);
                }
            }

            if leaving.is_none() && !t_best.is_finite() {
                return Ok(IterateEnd::Unbounded);
            }
            if t_best.abs() <= 1e-12 {
                degenerate_run += 1;
                if degenerate_run > DEGENERACY_THRESHOLD {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
            }

            match leaving {
                None => {
                    // Bound flip: the entering variable traverses its whole range.
                    self.state[e] = if delta > 0.0 {
                        ColState::AtUpper
                    } else {
                        ColState::AtLower
                    };
                }
                Some(r) => {
                    let bj = self.basis[r];
                    let rate = delta * w[r];
                    self.state[bj] = if rate > 0.0 {
                        ColState::AtLower
                    } else {
                        ColState::AtUpper
                    };
                    self.state[e] = ColState::Basic;
                    self.basis[r] = e;
                }
            }
        }
    }

    /// Replaces basic artificials by real columns where possible; rows that
    /// stay artificial-basic are redundant and their artificial is pinned
    /// to zero.
    fn evict_artificials(&mut self) -> Result<()> {
        for r in 0..self.m {
            if self.basis[r] < self.art_start {
                continue;
            }
            let lu = self.factor_basis()?;
            let mut unit = vec![0.0; self.m];
            unit[r] = 1.0;
            let z = lu.solve_transpose(&unit); // row r of B^-1
            let mut replacement = None;
            for j in 0..self.art_start {
                if self.state[j] == ColState::Basic {
                    continue;
                }
                let wrj: f64 = (0..self.m).map(|i| z[i] * self.rows[i][j]).sum();
                if wrj.abs() > PIVOT_TOL {
                    replacement = Some(j);
                    break;
                }
            }
            if let Some(j) = replacement {
                let old = self.basis[r];
                self.state[old] = ColState::AtLower;
                self.state[j] = ColState::Basic;
                self.basis[r] = j;
            }
        }
        // Lock every artificial at zero for phase 2.
        for j in self.art_start..self.ncols {
            self.lower[j] = 0.0;
            self.upper[j] = 0.0;
            self.x[j] = 0.0;
        }
        Ok(())
    }
}

pub(crate) fn solve_standard(std_form: &Standard, opts: &SolveOptions) -> Result<LpOutcome> {
    let m = std_form.rows.len();
    let art_start = std_form.ncols;
    let ncols = art_start + m;

    let mut rows = vec![vec![0.0; ncols]; m];
    for i in 0..m {
        rows[i][..art_start].copy_from_slice(&std_form.rows[i]);
    }
    let mut lower = std_form.lower.clone();
    let mut upper = std_form.upper.clone();
    lower.resize(ncols, 0.0);
    upper.resize(ncols, f64::INFINITY);

    // Start from every real column at its lower bound; artificials absorb
    // the residual with +-1 coefficients so they start nonnegative.
    let mut x = vec![0.0; ncols];
    for j in 0..art_start {
        x[j] = lower[j];
    }
    let mut state = vec![ColState::AtLower; ncols];
    let mut basis = Vec::with_capacity(m);
    for i in 0..m {
        let mut residual = std_form.b[i];
        for j in 0..art_start {
            residual -= rows[i][j] * x[j];
        }
        let sign = if residual >= 0.0 { 1.0 } else { -1.0 };
        let aj = art_start + i;
        rows[i][aj] = sign;
        x[aj] = residual.abs();
        state[aj] = ColState::Basic;
        basis.push(aj);
    }

    let mut phase1_cost = vec![0.0; ncols];
    for slot in phase1_cost.iter_mut().skip(art_start) {
        *slot = 1.0;
    }
    let mut real_cost = std_form.cost.clone();
    real_cost.resize(ncols, 0.0);

    let mut tableau = Tableau {
        m,
        art_start,
        ncols,
        rows,
        b: std_form.b.clone(),
        cost: phase1_cost,
        real_cost,
        lower,
        upper,
        state,
        basis,
        x,
    };

    if m > 0 {
        match tableau.iterate(opts)? {
            IterateEnd::Optimal => {}
            IterateEnd::Unbounded => {
                return Err(Error::Numerical("phase 1 reported an unbounded ray".into()));
            }
        }
        let infeas: f64 = (tableau.art_start..tableau.ncols)
            .map(|j| tableau.x[j].max(0.0))
            .sum();
        if infeas > opts.feas_tol {
            return Ok(LpOutcome::Infeasible);
        }
        tableau.evict_artificials()?;
    }

    tableau.cost = tableau.real_cost.clone();
    match tableau.iterate(opts)? {
        IterateEnd::Optimal => {}
        IterateEnd::Unbounded => return Ok(LpOutcome::Unbounded),
    }

    let obj: f64 = (0..tableau.art_start)
        .map(|j| tableau.real_cost[j] * tableau.x[j])
        .sum();
    Ok(LpOutcome::Optimal {
        x: tableau.x[..std_form.n_struct].to_vec(),
        obj,
    })
}

/// Solves the LP relaxation of `model` (integrality dropped).
pub fn solve_lp_relaxation(model: &MilpModel, opts: &SolveOptions) -> Result<MilpSolution> {
    model.validate()?;
    let maximize = model.sense() == Sense::Maximize;
    let infeasible_obj = if maximize { f64::NEG_INFINITY } else { f64::INFINITY };
    match standardize(model, None) {
        Standardized::Infeasible => Ok(MilpSolution {
            status: SolveStatus::Infeasible,
            values: Vec::new(),
            objective_value: infeasible_obj,
            bound: infeasible_obj,
            nodes: 0,
        }),
        Standardized::Ready(std_form) => match solve_standard(&std_form, opts)? {
            LpOutcome::Optimal { x, obj } => {
                let objective_value = if maximize { -obj } else { obj };
                Ok(MilpSolution {
                    status: SolveStatus::Optimal,
                    values: x,
                    objective_value,
                    bound: objective_value,
                    nodes: 0,
                })
            }
            LpOutcome::Infeasible => Ok(MilpSolution {
                status: SolveStatus::Infeasible,
                values: Vec::new(),
                objective_value: infeasible_obj,
                bound: infeasible_obj,
                nodes: 0,
            }),
            LpOutcome::Unbounded => Ok(MilpSolution {
                status: SolveStatus::Unbounded,
                values: Vec::new(),
                objective_value: -infeasible_obj,
                bound: -infeasible_obj,
                nodes: 0,
            }),
        },
    }
}
