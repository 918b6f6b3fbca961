//! Exact linear programming over rationals.
//!
//! A dense two-phase primal simplex. Every pivot is exact, so feasibility
//! and optimality verdicts are certificates, not estimates. Pivoting uses
//! Dantzig's rule (most negative reduced cost) and falls back to Bland's
//! rule after a run of degenerate pivots, which rules out cycling. The
//! instances this crate produces are small in rows (tens to a few hundred)
//! and at most a few thousand columns, which a dense rational tableau
//! handles comfortably.

use num_traits::{One, Signed, Zero};

use crate::rat::Rat;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    /// Objective present, finite optimum found.
    Optimal,
    /// No objective, a feasible point found.
    Feasible,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpOutcome {
    pub status: LpStatus,
    /// A feasible (for `Optimal`, optimal) point in the original variables.
    pub solution: Option<Vec<Rat>>,
    pub objective_value: Option<Rat>,
}

/// `maximize c.x  s.t.  A_eq x = b_eq, A_ge x >= b_ge, x_i >= lb_i`.
///
/// Redundant rows are tolerated; with no objective, `solve` answers pure
/// feasibility.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    num_vars: usize,
    objective: Option<Vec<Rat>>,
    eq: Vec<(Vec<Rat>, Rat)>,
    ge: Vec<(Vec<Rat>, Rat)>,
    lower_bounds: Vec<Rat>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            objective: None,
            eq: Vec::new(),
            ge: Vec::new(),
            lower_bounds: vec![Rat::zero(); num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn maximize(&mut self, c: Vec<Rat>) {
        assert_eq!(c.len(), self.num_vars, "objective length");
        self.objective = Some(c);
    }

    pub fn add_eq(&mut self, row: Vec<Rat>, rhs: Rat) {
        assert_eq!(row.len(), self.num_vars, "constraint length");
        self.eq.push((row, rhs));
    }

    pub fn add_ge(&mut self, row: Vec<Rat>, rhs: Rat) {
        assert_eq!(row.len(), self.num_vars, "constraint length");
        self.ge.push((row, rhs));
    }

    pub fn add_le(&mut self, row: Vec<Rat>, rhs: Rat) {
        let row = row.into_iter().map(|c| -c).collect();
        self.add_ge(row, -rhs);
    }

    pub fn set_lower_bound(&mut self, var: usize, lb: Rat) {
        self.lower_bounds[var] = lb;
    }

    /// Checks a candidate point against every constraint, exactly.
    pub fn check_solution(&self, x: &[Rat]) -> bool {
        if x.len() != self.num_vars {
            return false;
        }
        let dot = |row: &[Rat]| -> Rat {
            row.iter()
                .zip(x)
                .filter(|(c, _)| !c.is_zero())
                .map(|(c, v)| c * v)
                .sum()
        };
        self.eq.iter().all(|(row, rhs)| &dot(row) == rhs)
            && self.ge.iter().all(|(row, rhs)| &dot(row) >= rhs)
            && x.iter().zip(&self.lower_bounds).all(|(v, lb)| v >= lb)
    }

    pub fn solve(&self) -> Result<LpOutcome> {
        Tableau::build(self)?.run(self)
    }
}

/// Dense simplex tableau. Column layout: structural variables (shifted by
/// their lower bounds), surplus/slack variables for `>=` rows, a block
/// reserved for artificials, then the right-hand side as the final column.
struct Tableau {
    rows: Vec<Vec<Rat>>,
    /// Basic variable (column index) of each row.
    basis: Vec<usize>,
    n_struct: usize,
    n_surplus: usize,
    n_art: usize,
    /// Row length; the rhs lives at `total - 1` regardless of how much of
    /// the artificial block is in use.
    total: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Result<Tableau> {
        let n = lp.num_vars;
        let m = lp.eq.len() + lp.ge.len();
        let n_surplus = lp.ge.len();
        // Shift x = y + lb so y >= 0, and normalize rhs >= 0 row by row.
        let shift = |row: &[Rat], rhs: &Rat| -> (Vec<Rat>, Rat) {
            let off: Rat = row
                .iter()
                .zip(&lp.lower_bounds)
                .filter(|(c, _)| !c.is_zero())
                .map(|(c, lb)| c * lb)
                .sum();
            (row.to_vec(), rhs - off)
        };

        let total = n + n_surplus + m + 1; // artificials bounded by m
        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut n_art = 0;

        let mut push_row = |coeffs: Vec<Rat>, rhs: Rat, surplus: Option<usize>| {
            let negate = rhs.is_negative();
            let mut row = vec![Rat::zero(); total];
            for (j, c) in coeffs.into_iter().enumerate() {
                row[j] = if negate { -c } else { c };
            }
            let rhs = if negate { -rhs } else { rhs };
            let mut basic = None;
            if let Some(s) = surplus {
                // row . y - s = rhs; negated rows turn the surplus into a
                // plain slack which can start basic when rhs is now >= 0.
                row[n + s] = if negate { Rat::one() } else { -Rat::one() };
                if negate {
                    basic = Some(n + s);
                }
            }
            let basic = match basic {
                Some(b) => b,
                None => {
                    let a = n + n_surplus + n_art;
                    n_art += 1;
                    row[a] = Rat::one();
                    a
                }
            };
            *row.last_mut().unwrap() = rhs;
            rows.push(row);
            basis.push(basic);
        };

        for (row, rhs) in &lp.eq {
            let (coeffs, rhs) = shift(row, rhs);
            push_row(coeffs, rhs, None);
        }
        for (s, (row, rhs)) in lp.ge.iter().enumerate() {
            let (coeffs, rhs) = shift(row, rhs);
            push_row(coeffs, rhs, Some(s));
        }

        Ok(Tableau {
            rows,
            basis,
            n_struct: n,
            n_surplus,
            n_art,
            total,
        })
    }

    fn rhs_col(&self) -> usize {
        self.total - 1
    }

    fn pivot(&mut self, obj: &mut Vec<Rat>, r: usize, c: usize) {
        let piv = self.rows[r][c].clone();
        debug_assert!(!piv.is_zero());
        if !piv.is_one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v /= &piv;
                }
            }
        }
        let prow = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        if !obj[c].is_zero() {
            let f = obj[c].clone();
            for (v, p) in obj.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Entering column by Dantzig's rule (most negative reduced cost), with
    /// a switch to Bland's rule (lowest index) after `STALL_LIMIT`
    /// consecutive degenerate pivots; the leaving row breaks ratio ties by
    /// lowest basic variable index. Strict objective decreases visit
    /// pairwise distinct bases, of which there are finitely many, and
    /// between two of them Bland's rule takes over after a bounded stall and
    /// cannot cycle, so the loop terminates. Returns false on unboundedness.
    fn optimize(&mut self, obj: &mut Vec<Rat>, allowed: usize) -> bool {
        const STALL_LIMIT: usize = 64;
        let rhs = self.rhs_col();
        let mut stalled = 0usize;
        loop {
            let c = if stalled < STALL_LIMIT {
                let mut best: Option<usize> = None;
                for j in 0..allowed {
                    if obj[j].is_negative() && best.map_or(true, |b| obj[j] < obj[b]) {
                        best = Some(j);
                    }
                }
                best
            } else {
                (0..allowed).find(|&j| obj[j].is_negative())
            };
            let Some(c) = c else {
                return true;
            };
            let mut leave: Option<(usize, Rat)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[c].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[c];
                match &leave {
                    None => leave = Some((i, ratio)),
                    Some((best, best_ratio)) => {
                        if ratio < *best_ratio
                            || (ratio == *best_ratio && self.basis[i] < self.basis[*best])
                        {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
            let Some((r, ratio)) = leave else {
                return false;
            };
            if ratio.is_zero() {
                stalled += 1;
            } else {
                stalled = 0;
            }
            self.pivot(obj, r, c);
        }
    }

    /// Eliminates basic columns from a fresh objective row.
    fn reduce_obj(&self, obj: &mut Vec<Rat>) {
        for (i, &b) in self.basis.iter().enumerate() {
            if obj[b].is_zero() {
                continue;
            }
            let f = obj[b].clone();
            for (v, p) in obj.iter_mut().zip(&self.rows[i]) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
    }

    fn run(mut self, lp: &LinearProgram) -> Result<LpOutcome> {
        let width = self.total;
        let rhs = self.rhs_col();
        let art_start = self.n_struct + self.n_surplus;

        if self.n_art > 0 {
            // Phase one: maximize -(sum of artificials).
            let mut obj = vec![Rat::zero(); width];
            for j in art_start..art_start + self.n_art {
                obj[j] = Rat::one();
            }
            self.reduce_obj(&mut obj);
            let bounded = self.optimize(&mut obj, rhs);
            debug_assert!(bounded, "phase one is bounded below by zero");
            // obj[rhs] now holds -(optimal infeasibility).
            if !obj[rhs].is_zero() {
                return Ok(LpOutcome {
                    status: LpStatus::Infeasible,
                    solution: None,
                    objective_value: None,
                });
            }
            // Drive remaining artificials out of the basis; rows that cannot
            // pivot are redundant and dropped.
            let mut drop_rows = Vec::new();
            for i in 0..self.rows.len() {
                if self.basis[i] < art_start {
                    continue;
                }
                match (0..art_start).find(|&j| !self.rows[i][j].is_zero()) {
                    Some(c) => self.pivot(&mut obj, i, c),
                    None => drop_rows.push(i),
                }
            }
            for &i in drop_rows.iter().rev() {
                self.rows.remove(i);
                self.basis.remove(i);
            }
            // Artificial columns are dead from here on.
            for row in &mut self.rows {
                for j in art_start..art_start + self.n_art {
                    row[j] = Rat::zero();
                }
            }
        }

        let status = match &lp.objective {
            None => LpStatus::Feasible,
            Some(c) => {
                let mut obj = vec![Rat::zero(); width];
                for (j, cj) in c.iter().enumerate() {
                    obj[j] = -cj.clone();
                }
                self.reduce_obj(&mut obj);
                if self.optimize(&mut obj, art_start) {
                    LpStatus::Optimal
                } else {
                    return Ok(LpOutcome {
                        status: LpStatus::Unbounded,
                        solution: None,
                        objective_value: None,
                    });
                }
            }
        };

        // Read the point back in original coordinates.
        let mut x = lp.lower_bounds.clone();
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n_struct {
                x[b] += &self.rows[i][rhs];
            }
        }
        if !lp.check_solution(&x) {
            return Err(Error::invalid(
                "internal: simplex produced a point violating its own constraints".to_string(),
            ));
        }
        let objective_value = lp.objective.as_ref().map(|c| {
            c.iter()
                .zip(&x)
                .filter(|(cj, _)| !cj.is_zero())
                .map(|(cj, v)| cj * v)
                .sum()
        });
        Ok(LpOutcome {
            status,
            solution: Some(x),
            objective_value,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};

    fn r(v: &[(i64, i64)]) -> Vec<Rat> {
        v.iter().map(|&(n, d)| rat(n, d)).collect()
    }

    #[test]
    fn textbook_optimum() {
        // maximize x + y s.t. x + 2y <= 4, 3x + y <= 6.
        let mut lp = LinearProgram::new(2);
        lp.maximize(r(&[(1, 1), (1, 1)]));
        lp.add_le(r(&[(1, 1), (2, 1)]), int(4));
        lp.add_le(r(&[(3, 1), (1, 1)]), int(6));
        let out = lp.solve().unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert_eq!(out.objective_value.unwrap(), rat(14, 5));
        assert_eq!(out.solution.unwrap(), r(&[(8, 5), (6, 5)]));
    }

    #[test]
    fn infeasible_toy() {
        // x >= 1 and x <= 0.
        let mut lp = LinearProgram::new(1);
        lp.add_ge(r(&[(1, 1)]), int(1));
        lp.add_le(r(&[(1, 1)]), int(0));
        let out = lp.solve().unwrap();
        assert_eq!(out.status, LpStatus::Infeasible);
        assert!(out.solution.is_none());
    }

    #[test]
    fn unbounded_ray() {
        let mut lp = LinearProgram::new(2);
        lp.maximize(r(&[(1, 1), (0, 1)]));
        lp.add_ge(r(&[(1, 1), (-1, 1)]), int(0));
        let out = lp.solve().unwrap();
        assert_eq!(out.status, LpStatus::Unbounded);
    }

    #[test]
    fn pure_feasibility_without_objective() {
        let mut lp = LinearProgram::new(3);
        lp.add_eq(r(&[(1, 1), (1, 1), (1, 1)]), int(1));
        lp.add_eq(r(&[(1, 1), (-1, 1), (0, 1)]), int(0));
        let out = lp.solve().unwrap();
        assert_eq!(out.status, LpStatus::Feasible);
        let x = out.solution.unwrap();
        assert!(lp.check_solution(&x));
        assert_eq!(&x[0], &x[1]);
    }

    #[test]
    fn redundant_rows_are_dropped_not_fatal() {
        let mut lp = LinearProgram::new(2);
        lp.add_eq(r(&[(1, 1), (1, 1)]), int(1));
        lp.add_eq(r(&[(2, 1), (2, 1)]), int(2));
        lp.maximize(r(&[(1, 1), (0, 1)]));
        let out = lp.solve().unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert_eq!(out.objective_value.unwrap(), int(1));
    }

    #[test]
    fn inconsistent_redundant_rows_are_infeasible() {
        let mut lp = LinearProgram::new(2);
        lp.add_eq(r(&[(1, 1), (1, 1)]), int(1));
        lp.add_eq(r(&[(2, 1), (2, 1)]), int(3));
        let out = lp.solve().unwrap();
        assert_eq!(out.status, LpStatus::Infeasible);
    }

    #[test]
    fn lower_bounds_shift() {
        // maximize -x - y with x >= 1/2, y >= -2, x + y >= 0.
        let mut lp = LinearProgram::new(2);
        lp.set_lower_bound(0, rat(1, 2));
        lp.set_lower_bound(1, int(-2));
        lp.maximize(r(&[(-1, 1), (-1, 1)]));
        lp.add_ge(r(&[(1, 1), (1, 1)]), int(0));
        let out = lp.solve().unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert_eq!(out.objective_value.unwrap(), int(0));
        let x = out.solution.unwrap();
        assert!(lp.check_solution(&x));
        assert_eq!(&x[0] + &x[1], int(0));
    }

    #[test]
    fn degenerate_pivots_terminate() {
        // A classic degenerate vertex: several rows tie at zero ratio.
        let mut lp = LinearProgram::new(3);
        lp.maximize(r(&[(3, 4), (-20, 1), (1, 2)]));
        lp.add_le(r(&[(1, 4), (-8, 1), (-1, 1)]), int(0));
        lp.add_le(r(&[(1, 2), (-12, 1), (-1, 2)]), int(0));
        lp.add_le(r(&[(0, 1), (0, 1), (1, 1)]), int(1));
        let out = lp.solve().unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert!(lp.check_solution(&out.solution.unwrap()));
    }

    #[test]
    fn equality_only_system_pins_point() {
        let mut lp = LinearProgram::new(2);
        lp.add_eq(r(&[(1, 1), (1, 1)]), int(1));
        lp.add_eq(r(&[(1, 1), (-1, 1)]), rat(1, 3));
        let out = lp.solve().unwrap();
        assert_eq!(out.status, LpStatus::Feasible);
        assert_eq!(out.solution.unwrap(), vec![rat(2, 3), rat(1, 3)]);
    }

    #[test]
    fn check_solution_is_exact() {
        let mut lp = LinearProgram::new(2);
        lp.add_eq(r(&[(1, 3), (1, 6)]), rat(1, 2));
        assert!(lp.check_solution(&[int(1), int(1)]));
        assert!(!lp.check_solution(&[int(1), rat(999999, 1000000)]));
    }
}
