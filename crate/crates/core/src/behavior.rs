//! Behaviors: one outcome distribution per context.
//!
//! Tables are dense per context, indexed lexicographically over outcome
//! tuples in context order, with exact rational entries. A behavior is
//! non-disturbing when overlapping contexts induce the same marginals, and
//! noncontextual when a single distribution over global outcome assignments
//! reproduces every context table; the latter is decided exactly by a
//! feasibility LP over the deterministic assignments.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::lp::{LinearProgram, LpStatus};
use crate::rat::{fmt_rat, int, parse_rat, rat, Rat};
use crate::scenario::Scenario;
use crate::{Error, Result};

/// Default cap on `|outcomes|^|measurements|` for the global-section LP.
pub const DEFAULT_ASSIGNMENT_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Behavior {
    scenario: Arc<Scenario>,
    tables: Vec<Vec<Rat>>,
}

/// First witness of a non-disturbance failure: two contexts disagreeing on
/// the marginal over their shared measurements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NdViolation {
    pub context_a: usize,
    pub context_b: usize,
    pub overlap: Vec<usize>,
}

/// A distribution over global outcome assignments, sparse on its support.
/// Witnesses noncontextuality: marginalizing it reproduces every context
/// table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalSection {
    /// `(assignment, weight)` pairs; an assignment fixes one outcome index
    /// per measurement.
    pub weights: Vec<(Vec<usize>, Rat)>,
}

impl Behavior {
    /// Shape-checks tables against the scenario; probability constraints are
    /// the business of [`Behavior::validate`].
    pub fn new(scenario: Scenario, tables: Vec<Vec<Rat>>) -> Result<Self> {
        scenario.validate()?;
        Self::with_scenario(Arc::new(scenario), tables)
    }

    pub(crate) fn with_scenario(scenario: Arc<Scenario>, tables: Vec<Vec<Rat>>) -> Result<Self> {
        if tables.len() != scenario.contexts.len() {
            return Err(Error::invalid(format!(
                "expected {} tables, got {}",
                scenario.contexts.len(),
                tables.len()
            )));
        }
        let q = scenario.num_outcomes();
        for (ci, t) in tables.iter().enumerate() {
            let want = q.pow(scenario.contexts[ci].len() as u32);
            if t.len() != want {
                return Err(Error::invalid(format!(
                    "table for context {ci} has {} entries, expected {want}",
                    t.len()
                )));
            }
        }
        Ok(Behavior { scenario, tables })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn scenario_arc(&self) -> Arc<Scenario> {
        Arc::clone(&self.scenario)
    }

    pub fn table(&self, context: usize) -> &[Rat] {
        &self.tables[context]
    }

    pub fn prob(&self, context: usize, outcomes: &[usize]) -> &Rat {
        &self.tables[context][encode(outcomes, self.scenario.num_outcomes())]
    }

    /// Entries in `[0, 1]` and unit context sums; the error names the first
    /// offending context.
    pub fn validate(&self) -> Result<()> {
        for (ci, t) in self.tables.iter().enumerate() {
            let mut sum = Rat::zero();
            for p in t {
                if p < &Rat::zero() || p > &int(1) {
                    return Err(Error::invalid(format!(
                        "context {ci}: entry {} outside [0, 1]",
                        fmt_rat(p)
                    )));
                }
                sum += p;
            }
            if sum != int(1) {
                return Err(Error::invalid(format!(
                    "context {ci}: entries sum to {}, not 1",
                    fmt_rat(&sum)
                )));
            }
        }
        Ok(())
    }

    /// Marginal table of `context` restricted to the measurements in `subset`
    /// (given in the order of `subset`).
    fn marginal_onto(&self, context: usize, subset: &[usize]) -> Vec<Rat> {
        let q = self.scenario.num_outcomes();
        let ctx = &self.scenario.contexts[context];
        let pos: Vec<usize> = subset
            .iter()
            .map(|m| ctx.iter().position(|x| x == m).expect("subset of context"))
            .collect();
        let mut out = vec![Rat::zero(); q.pow(subset.len() as u32)];
        for (idx, p) in self.tables[context].iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let tuple = decode(idx, ctx.len(), q);
            let sub: Vec<usize> = pos.iter().map(|&k| tuple[k]).collect();
            out[encode(&sub, q)] += p;
        }
        out
    }

    /// `None` when all overlapping contexts agree on their shared marginals,
    /// otherwise the first disagreement found.
    pub fn nd_violation(&self) -> Result<Option<NdViolation>> {
        self.validate()?;
        let ctxs = &self.scenario.contexts;
        for a in 0..ctxs.len() {
            for b in a + 1..ctxs.len() {
                let mut overlap: Vec<usize> =
                    ctxs[a].iter().copied().filter(|m| ctxs[b].contains(m)).collect();
                overlap.sort_unstable();
                if overlap.is_empty() {
                    continue;
                }
                if self.marginal_onto(a, &overlap) != self.marginal_onto(b, &overlap) {
                    return Ok(Some(NdViolation {
                        context_a: a,
                        context_b: b,
                        overlap,
                    }));
                }
            }
        }
        Ok(None)
    }

    pub fn is_nondisturbing(&self) -> Result<bool> {
        Ok(self.nd_violation()?.is_none())
    }

    /// Decides noncontextuality by LP feasibility over all deterministic
    /// global assignments, returning a global section when one exists.
    ///
    /// Errors with a capacity message when `|outcomes|^|measurements|`
    /// exceeds `cap`.
    pub fn global_section_with_cap(&self, cap: u64) -> Result<Option<GlobalSection>> {
        self.validate()?;
        let q = self.scenario.num_outcomes();
        let m = self.scenario.num_measurements();
        let mut count: u64 = 1;
        for _ in 0..m {
            count = count.saturating_mul(q as u64);
            if count > cap {
                return Err(Error::capacity(format!(
                    "{q}^{m} global assignments exceed cap {cap}"
                )));
            }
        }
        let num_assignments = count as usize;

        // One equality row per (context, outcome tuple); columns are
        // assignment weights. Normalization follows from any one context.
        let mut row_base = vec![0usize; self.scenario.contexts.len()];
        let mut num_rows = 0;
        for (ci, ctx) in self.scenario.contexts.iter().enumerate() {
            row_base[ci] = num_rows;
            num_rows += q.pow(ctx.len() as u32);
        }
        let mut rows = vec![vec![Rat::zero(); num_assignments]; num_rows];
        for a in 0..num_assignments {
            let assignment = decode(a, m, q);
            for (ci, ctx) in self.scenario.contexts.iter().enumerate() {
                let tuple: Vec<usize> = ctx.iter().map(|&mi| assignment[mi]).collect();
                rows[row_base[ci] + encode(&tuple, q)][a] = int(1);
            }
        }
        let mut lp = LinearProgram::new(num_assignments);
        for (ci, ctx) in self.scenario.contexts.iter().enumerate() {
            for e in 0..q.pow(ctx.len() as u32) {
                lp.add_eq(
                    std::mem::take(&mut rows[row_base[ci] + e]),
                    self.tables[ci][e].clone(),
                );
            }
        }
        let out = lp.solve()?;
        match out.status {
            LpStatus::Feasible => {
                let x = out.solution.expect("feasible LP returns a point");
                let weights = x
                    .into_iter()
                    .enumerate()
                    .filter(|(_, w)| !w.is_zero())
                    .map(|(a, w)| (decode(a, m, q), w))
                    .collect();
                Ok(Some(GlobalSection { weights }))
            }
            LpStatus::Infeasible => Ok(None),
            _ => unreachable!("feasibility LP has no objective"),
        }
    }

    pub fn global_section(&self) -> Result<Option<GlobalSection>> {
        self.global_section_with_cap(DEFAULT_ASSIGNMENT_CAP)
    }

    pub fn is_noncontextual(&self) -> Result<bool> {
        Ok(self.global_section()?.is_some())
    }

    /// Convex mixture `w * self + (1 - w) * other`.
    pub fn mix(&self, other: &Behavior, w: &Rat) -> Result<Behavior> {
        if self.scenario != other.scenario {
            return Err(Error::invalid("mixing behaviors on different scenarios"));
        }
        if w < &Rat::zero() || w > &int(1) {
            return Err(Error::invalid(format!("mixture weight {} outside [0, 1]", fmt_rat(w))));
        }
        let cw = int(1) - w;
        let tables = self
            .tables
            .iter()
            .zip(&other.tables)
            .map(|(ta, tb)| {
                ta.iter()
                    .zip(tb)
                    .map(|(a, b)| w * a + &cw * b)
                    .collect()
            })
            .collect();
        Behavior::with_scenario(Arc::clone(&self.scenario), tables)
    }

    /// `<X_i X_j>` read from a context whose measurement set is `{i, j}`.
    pub fn correlator(&self, i: usize, j: usize) -> Result<Rat> {
        if !self.scenario.is_dichotomic() {
            return Err(Error::invalid("correlator needs dichotomic +1/-1 outcomes"));
        }
        let ctx_idx = self
            .scenario
            .contexts
            .iter()
            .position(|c| {
                c.len() == 2 && ((c[0] == i && c[1] == j) || (c[0] == j && c[1] == i))
            })
            .ok_or_else(|| Error::invalid(format!("no pair context {{{i}, {j}}}")))?;
        let mut sum = Rat::zero();
        for (idx, p) in self.tables[ctx_idx].iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let t = decode(idx, 2, 2);
            let sign = self.scenario.outcome_sign(t[0]) * self.scenario.outcome_sign(t[1]);
            sum += p * int(sign);
        }
        Ok(sum)
    }

    /// `<X_i>` from the first context containing `i`; well-defined across
    /// contexts only for non-disturbing behaviors.
    pub fn single_marginal(&self, i: usize) -> Result<Rat> {
        if !self.scenario.is_dichotomic() {
            return Err(Error::invalid("marginal needs dichotomic +1/-1 outcomes"));
        }
        let (ci, pos) = self
            .scenario
            .contexts
            .iter()
            .enumerate()
            .find_map(|(ci, c)| c.iter().position(|&m| m == i).map(|p| (ci, p)))
            .ok_or_else(|| Error::invalid(format!("measurement {i} is in no context")))?;
        let ctx_len = self.scenario.contexts[ci].len();
        let q = self.scenario.num_outcomes();
        let mut sum = Rat::zero();
        for (idx, p) in self.tables[ci].iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let t = decode(idx, ctx_len, q);
            sum += p * int(self.scenario.outcome_sign(t[pos]));
        }
        Ok(sum)
    }

    /// Correlation coordinates of a cycle behavior: per-measurement `<X_i>`
    /// and per-context `<X_i X_{i+1}>`. Requires the canonical n-cycle
    /// scenario.
    pub fn to_correlations(&self) -> Result<(Vec<Rat>, Vec<Rat>)> {
        let n = self
            .scenario
            .cycle_n()
            .ok_or_else(|| Error::invalid("not the canonical cycle scenario"))?;
        let mut singles = Vec::with_capacity(n);
        let mut corrs = Vec::with_capacity(n);
        for i in 0..n {
            // Context i is [i, i+1]; read <X_i> from its first slot.
            let t = &self.tables[i];
            singles.push(&t[0] + &t[1] - &t[2] - &t[3]);
            corrs.push(&t[0] - &t[1] - &t[2] + &t[3]);
        }
        Ok((singles, corrs))
    }

    /// Rebuilds a cycle behavior from correlation coordinates via
    /// `4 p(a,b) = 1 + a<X_i> + b<X_{i+1}> + ab<X_i X_{i+1}>`. Errors if any
    /// entry comes out negative.
    pub fn from_correlations(n: usize, singles: &[Rat], corrs: &[Rat]) -> Result<Behavior> {
        if singles.len() != n || corrs.len() != n {
            return Err(Error::invalid("correlation vectors must have length n"));
        }
        let scenario = crate::scenario::make_cycle_scenario(n)?;
        let quarter = rat(1, 4);
        let mut tables = Vec::with_capacity(n);
        for i in 0..n {
            let (mi, mj, c) = (&singles[i], &singles[(i + 1) % n], &corrs[i]);
            let mut t = Vec::with_capacity(4);
            for (a, b) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                let v = (int(1) + int(a) * mi + int(b) * mj + int(a * b) * c) * &quarter;
                if v < Rat::zero() {
                    return Err(Error::invalid(format!(
                        "correlations violate positivity at context {i}"
                    )));
                }
                t.push(v);
            }
            tables.push(t);
        }
        Behavior::with_scenario(Arc::new(scenario), tables)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_wire()).expect("behavior serializes")
    }

    fn to_wire(&self) -> BehaviorWire {
        let q = self.scenario.num_outcomes();
        let mut tables = BTreeMap::new();
        for (ci, t) in self.tables.iter().enumerate() {
            let mut m = BTreeMap::new();
            for (idx, p) in t.iter().enumerate() {
                let labels: Vec<&str> = decode(idx, self.scenario.contexts[ci].len(), q)
                    .into_iter()
                    .map(|o| self.scenario.outcomes[o].as_str())
                    .collect();
                m.insert(labels.join(","), serde_json::Value::String(fmt_rat(p)));
            }
            tables.insert(ci.to_string(), m);
        }
        BehaviorWire {
            scenario: ScenarioRef::Inline((*self.scenario).clone()),
            tables,
        }
    }

    /// Parses behavior JSON. A `"scenario"` given as a path string is
    /// resolved against `base`, which CLI callers set to the behavior file's
    /// directory.
    pub fn from_json_with_base(s: &str, base: Option<&std::path::Path>) -> Result<Self> {
        let wire: BehaviorWire =
            serde_json::from_str(s).map_err(|e| Error::parse(format!("behavior: {e}")))?;
        let scenario = match wire.scenario {
            ScenarioRef::Inline(sc) => sc,
            ScenarioRef::Path(p) => {
                let path = match base {
                    Some(b) => b.join(&p),
                    None => std::path::PathBuf::from(&p),
                };
                let text = std::fs::read_to_string(&path).map_err(|e| {
                    Error::parse(format!("scenario file {}: {e}", path.display()))
                })?;
                Scenario::from_json(&text)?
            }
        };
        scenario.validate()?;
        let q = scenario.num_outcomes();
        let mut tables = Vec::with_capacity(scenario.contexts.len());
        for (ci, ctx) in scenario.contexts.iter().enumerate() {
            let table_in = wire
                .tables
                .get(&ci.to_string())
                .ok_or_else(|| Error::parse(format!("missing table for context {ci}")))?;
            let mut t = vec![Rat::zero(); q.pow(ctx.len() as u32)];
            let mut seen = vec![false; t.len()];
            for (key, val) in table_in {
                let labels: Vec<&str> = key.split(',').collect();
                if labels.len() != ctx.len() {
                    return Err(Error::parse(format!(
                        "context {ci}: outcome key {key:?} has {} parts, expected {}",
                        labels.len(),
                        ctx.len()
                    )));
                }
                let tuple: Vec<usize> = labels
                    .iter()
                    .map(|l| {
                        scenario
                            .outcomes
                            .iter()
                            .position(|o| o.as_str() == l.trim())
                            .ok_or_else(|| Error::parse(format!("unknown outcome label {l:?}")))
                    })
                    .collect::<Result<_>>()?;
                let idx = encode(&tuple, q);
                if seen[idx] {
                    return Err(Error::parse(format!(
                        "context {ci}: duplicate entry for {key:?}"
                    )));
                }
                seen[idx] = true;
                t[idx] = parse_wire_rat(val)?;
            }
            tables.push(t);
        }
        Behavior::with_scenario(Arc::new(scenario), tables)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_json_with_base(s, None)
    }
}

fn parse_wire_rat(v: &serde_json::Value) -> Result<Rat> {
    match v {
        serde_json::Value::String(s) => parse_rat(s),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(int(i))
            } else {
                Err(Error::parse(format!(
                    "non-integer number {n}: write it as a string (\"1/3\", \"0.25\") to keep it exact"
                )))
            }
        }
        other => Err(Error::parse(format!("expected a rational, got {other}"))),
    }
}

#[derive(Serialize, Deserialize)]
struct BehaviorWire {
    scenario: ScenarioRef,
    tables: BTreeMap<String, BTreeMap<String, serde_json::Value>>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ScenarioRef {
    Inline(Scenario),
    Path(String),
}

impl GlobalSection {
    /// Exact check that marginalizing this section reproduces `b`.
    pub fn reproduces(&self, b: &Behavior) -> bool {
        let s = b.scenario();
        let q = s.num_outcomes();
        let total: Rat = self.weights.iter().map(|(_, w)| w.clone()).sum();
        if total != int(1) || self.weights.iter().any(|(_, w)| w < &Rat::zero()) {
            return false;
        }
        for (ci, ctx) in s.contexts.iter().enumerate() {
            let mut table = vec![Rat::zero(); q.pow(ctx.len() as u32)];
            for (assignment, w) in &self.weights {
                let tuple: Vec<usize> = ctx.iter().map(|&m| assignment[m]).collect();
                table[encode(&tuple, q)] += w;
            }
            if table.as_slice() != b.table(ci) {
                return false;
            }
        }
        true
    }
}

/// The deterministic behavior induced by one global assignment.
pub fn deterministic_behavior(scenario: &Scenario, assignment: &[usize]) -> Result<Behavior> {
    let q = scenario.num_outcomes();
    if assignment.len() != scenario.num_measurements()
        || assignment.iter().any(|&o| o >= q)
    {
        return Err(Error::invalid("assignment shape does not match scenario"));
    }
    let tables = scenario
        .contexts
        .iter()
        .map(|ctx| {
            let tuple: Vec<usize> = ctx.iter().map(|&m| assignment[m]).collect();
            let mut t = vec![Rat::zero(); q.pow(ctx.len() as u32)];
            t[encode(&tuple, q)] = int(1);
            t
        })
        .collect();
    Behavior::with_scenario(Arc::new(scenario.clone()), tables)
}

/// Lexicographic rank of an outcome tuple, first position most significant.
pub(crate) fn encode(tuple: &[usize], q: usize) -> usize {
    tuple.iter().fold(0, |acc, &o| acc * q + o)
}

pub(crate) fn decode(mut idx: usize, len: usize, q: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = idx % q;
        idx /= q;
    }
    out
}
