//! Compatibility scenarios and their graphs.
//!
//! A scenario is a finite set of measurements, a list of contexts (sets of
//! measurements that can be performed jointly) and a shared outcome alphabet.
//! The compatibility graph has the measurements as vertices and an edge
//! wherever two measurements share a context. Induced (chordless) cycles of
//! length at least four in this graph are exactly what quantum contextuality
//! needs: scenarios without them admit none.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const PLUS: &str = "+1";
pub const MINUS: &str = "-1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub measurements: Vec<String>,
    pub contexts: Vec<Vec<usize>>,
    pub outcomes: Vec<String>,
}

impl Scenario {
    pub fn new(
        measurements: Vec<String>,
        contexts: Vec<Vec<usize>>,
        outcomes: Vec<String>,
    ) -> Result<Self> {
        let s = Scenario {
            measurements,
            contexts,
            outcomes,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.measurements.is_empty() {
            return Err(Error::invalid("scenario has no measurements"));
        }
        if self.outcomes.len() < 2 {
            return Err(Error::invalid("scenario needs at least two outcomes"));
        }
        let mut names = self.measurements.clone();
        names.sort();
        names.dedup();
        if names.len() != self.measurements.len() {
            return Err(Error::invalid("duplicate measurement names"));
        }
        let mut labels = self.outcomes.clone();
        labels.sort();
        labels.dedup();
        if labels.len() != self.outcomes.len() {
            return Err(Error::invalid("duplicate outcome labels"));
        }
        for (ci, ctx) in self.contexts.iter().enumerate() {
            if ctx.is_empty() {
                return Err(Error::invalid(format!("context {ci} is empty")));
            }
            let mut seen = vec![false; self.measurements.len()];
            for &m in ctx {
                if m >= self.measurements.len() {
                    return Err(Error::invalid(format!(
                        "context {ci} references measurement {m} out of range"
                    )));
                }
                if seen[m] {
                    return Err(Error::invalid(format!(
                        "context {ci} repeats measurement {m}"
                    )));
                }
                seen[m] = true;
            }
        }
        Ok(())
    }

    pub fn num_measurements(&self) -> usize {
        self.measurements.len()
    }

    pub fn num_outcomes(&self) -> usize {
        self.outcomes.len()
    }

    /// True when the outcome alphabet is the canonical dichotomic `+1`, `-1`.
    pub fn is_dichotomic(&self) -> bool {
        self.outcomes.len() == 2 && self.outcomes[0] == PLUS && self.outcomes[1] == MINUS
    }

    /// The numeric value of a dichotomic outcome index: `+1` or `-1`.
    pub(crate) fn outcome_sign(&self, idx: usize) -> i64 {
        if idx == 0 {
            1
        } else {
            -1
        }
    }

    /// If this is exactly the canonical n-cycle scenario (contexts
    /// `{i, i+1 mod n}` in order, dichotomic outcomes), returns n.
    pub fn cycle_n(&self) -> Option<usize> {
        let n = self.measurements.len();
        if n < 3 || !self.is_dichotomic() || self.contexts.len() != n {
            return None;
        }
        for (i, ctx) in self.contexts.iter().enumerate() {
            if ctx != &vec![i, (i + 1) % n] {
                return None;
            }
        }
        Some(n)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let sc: Scenario =
            serde_json::from_str(s).map_err(|e| Error::parse(format!("scenario: {e}")))?;
        sc.validate()?;
        Ok(sc)
    }
}

/// The canonical n-cycle scenario: measurements `X0..X{n-1}`, contexts
/// `{X_i, X_{i+1 mod n}}`, outcomes `+1` and `-1`.
pub fn make_cycle_scenario(n: usize) -> Result<Scenario> {
    if n < 3 {
        return Err(Error::invalid(format!("cycle scenario needs n >= 3, got {n}")));
    }
    Scenario::new(
        (0..n).map(|i| format!("X{i}")).collect(),
        (0..n).map(|i| vec![i, (i + 1) % n]).collect(),
        vec![PLUS.to_string(), MINUS.to_string()],
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatibilityGraph {
    n: usize,
    adj: Vec<Vec<bool>>,
}

impl CompatibilityGraph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = CompatibilityGraph {
            n,
            adj: vec![vec![false; n]; n],
        };
        for &(a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(Error::invalid(format!("bad edge ({a}, {b})")));
            }
            g.adj[a][b] = true;
            g.adj[b][a] = true;
        }
        Ok(g)
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a][b]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in a + 1..self.n {
                if self.adj[a][b] {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// Measurements sharing a context become adjacent.
pub fn compatibility_graph(s: &Scenario) -> CompatibilityGraph {
    let n = s.measurements.len();
    let mut edges = Vec::new();
    for ctx in &s.contexts {
        for (i, &a) in ctx.iter().enumerate() {
            for &b in &ctx[i + 1..] {
                edges.push((a, b));
            }
        }
    }
    CompatibilityGraph::new(n, &edges).expect("validated scenario yields a simple graph")
}

/// All induced (chordless) cycles of length at least `min_len`, each in
/// canonical form: starting at its smallest vertex, oriented toward the
/// smaller of that vertex's two cycle neighbors.
pub fn find_induced_cycles(g: &CompatibilityGraph, min_len: usize) -> Vec<Vec<usize>> {
    let min_len = min_len.max(3);
    let mut out = Vec::new();
    let mut path = Vec::new();
    for v in 0..g.num_vertices() {
        path.push(v);
        extend(g, min_len, v, &mut path, &mut out);
        path.pop();
    }
    out
}

fn extend(
    g: &CompatibilityGraph,
    min_len: usize,
    root: usize,
    path: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let last = *path.last().unwrap();
    'next: for w in root + 1..g.num_vertices() {
        if !g.adjacent(last, w) || path.contains(&w) {
            continue;
        }
        if path.len() >= 2 {
            // A chord to any interior path vertex disqualifies w entirely.
            for &p in &path[1..path.len() - 1] {
                if g.adjacent(p, w) {
                    continue 'next;
                }
            }
            if g.adjacent(root, w) {
                // Closing edge; emit each cycle once via the orientation rule.
                if path.len() + 1 >= min_len && path[1] < w {
                    let mut cycle = path.clone();
                    cycle.push(w);
                    out.push(cycle);
                }
                continue;
            }
        }
        path.push(w);
        extend(g, min_len, root, path, out);
        path.pop();
    }
}

/// A scenario can exhibit quantum contextuality exactly when its
/// compatibility graph has an induced cycle longer than three.
pub fn admits_quantum_contextuality(s: &Scenario) -> bool {
    !find_induced_cycles(&compatibility_graph(s), 4).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cycle_graph(n: usize) -> CompatibilityGraph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        CompatibilityGraph::new(n, &edges).unwrap()
    }

    #[test]
    fn cycle_scenario_shape() {
        let s = make_cycle_scenario(4).unwrap();
        assert_eq!(s.measurements, vec!["X0", "X1", "X2", "X3"]);
        assert_eq!(s.contexts, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]]);
        assert_eq!(s.outcomes, vec![PLUS, MINUS]);
        assert_eq!(s.cycle_n(), Some(4));
        assert!(make_cycle_scenario(2).is_err());
    }

    #[test]
    fn cycle_n_rejects_non_canonical() {
        let mut s = make_cycle_scenario(4).unwrap();
        s.contexts.swap(0, 1);
        assert_eq!(s.cycle_n(), None);
        let t = Scenario::new(
            vec!["a".into(), "b".into()],
            vec![vec![0, 1]],
            vec![PLUS.into(), MINUS.into()],
        )
        .unwrap();
        assert_eq!(t.cycle_n(), None);
    }

    #[test]
    fn validation_catches_malformed_scenarios() {
        assert!(Scenario::new(vec![], vec![], vec![PLUS.into(), MINUS.into()]).is_err());
        assert!(Scenario::new(vec!["a".into()], vec![], vec![PLUS.into()]).is_err());
        assert!(Scenario::new(
            vec!["a".into(), "a".into()],
            vec![],
            vec![PLUS.into(), MINUS.into()]
        )
        .is_err());
        assert!(Scenario::new(
            vec!["a".into()],
            vec![vec![1]],
            vec![PLUS.into(), MINUS.into()]
        )
        .is_err());
        assert!(Scenario::new(
            vec!["a".into(), "b".into()],
            vec![vec![0, 0]],
            vec![PLUS.into(), MINUS.into()]
        )
        .is_err());
        assert!(Scenario::new(
            vec!["a".into()],
            vec![vec![]],
            vec![PLUS.into(), MINUS.into()]
        )
        .is_err());
    }

    #[test]
    fn compatibility_graph_of_cycle_scenario() {
        let s = make_cycle_scenario(5).unwrap();
        let g = compatibility_graph(&s);
        assert_eq!(g.edges(), vec![(0, 1), (0, 4), (1, 2), (2, 3), (3, 4)]);
    }

    #[test]
    fn induced_cycles_basic_shapes() {
        assert_eq!(find_induced_cycles(&cycle_graph(4), 4), vec![vec![0, 1, 2, 3]]);
        assert_eq!(find_induced_cycles(&cycle_graph(5), 4), vec![vec![0, 1, 2, 3, 4]]);
        // Triangle has no induced cycle of length >= 4.
        assert!(find_induced_cycles(&cycle_graph(3), 4).is_empty());

        // A chord kills the 4-cycle.
        let chorded =
            CompatibilityGraph::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
        assert!(find_induced_cycles(&chorded, 4).is_empty());

        // A pendant vertex leaves the cycle intact.
        let pendant =
            CompatibilityGraph::new(5, &[(0, 1), (1, 2), (2, 3), (3, 0), (1, 4)]).unwrap();
        assert_eq!(find_induced_cycles(&pendant, 4), vec![vec![0, 1, 2, 3]]);

        // A chord across a 6-cycle yields two induced 4-cycles.
        let six = CompatibilityGraph::new(
            6,
            &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)],
        )
        .unwrap();
        let got = find_induced_cycles(&six, 4);
        assert_eq!(got, vec![vec![0, 1, 2, 3], vec![0, 3, 4, 5]]);
    }

    #[test]
    fn admits_quantum_contextuality_examples() {
        assert!(!admits_quantum_contextuality(&make_cycle_scenario(3).unwrap()));
        assert!(admits_quantum_contextuality(&make_cycle_scenario(4).unwrap()));
        assert!(admits_quantum_contextuality(&make_cycle_scenario(5).unwrap()));
        // A path (tree) has no cycles at all.
        let path = Scenario::new(
            (0..4).map(|i| format!("m{i}")).collect(),
            vec![vec![0, 1], vec![1, 2], vec![2, 3]],
            vec![PLUS.into(), MINUS.into()],
        )
        .unwrap();
        assert!(!admits_quantum_contextuality(&path));
        // One three-measurement context forms a triangle.
        let tri = Scenario::new(
            (0..3).map(|i| format!("m{i}")).collect(),
            vec![vec![0, 1, 2]],
            vec![PLUS.into(), MINUS.into()],
        )
        .unwrap();
        assert!(!admits_quantum_contextuality(&tri));
    }

    #[test]
    fn scenario_json_round_trip() {
        let s = make_cycle_scenario(4).unwrap();
        let j = s.to_json();
        assert_eq!(Scenario::from_json(&j).unwrap(), s);
        assert!(Scenario::from_json("{\"measurements\": []}").is_err());
    }

    /// Exhaustive reference: a vertex subset induces a cycle iff inside it
    /// every vertex has degree exactly two and the subset is connected.
    fn brute_force_induced_cycles(g: &CompatibilityGraph, min_len: usize) -> Vec<Vec<usize>> {
        let n = g.num_vertices();
        let mut out = Vec::new();
        for mask in 0u32..(1 << n) {
            let verts: Vec<usize> = (0..n).filter(|&v| mask & (1 << v) != 0).collect();
            if verts.len() < min_len {
                continue;
            }
            let deg_ok = verts.iter().all(|&v| {
                verts.iter().filter(|&&w| w != v && g.adjacent(v, w)).count() == 2
            });
            if !deg_ok {
                continue;
            }
            // Walk from the smallest vertex; connected iff the walk covers all.
            let start = verts[0];
            let mut cycle = vec![start];
            let mut prev = usize::MAX;
            let mut cur = start;
            loop {
                let nexts: Vec<usize> = verts
                    .iter()
                    .copied()
                    .filter(|&w| w != cur && w != prev && g.adjacent(cur, w))
                    .collect();
                let next = *nexts.iter().min().unwrap();
                if next == start {
                    break;
                }
                prev = cur;
                cur = next;
                cycle.push(cur);
            }
            if cycle.len() == verts.len() {
                out.push(cycle);
            }
        }
        out
    }

    fn canon(mut c: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
        c.sort();
        c
    }

    proptest! {
        #[test]
        fn dfs_matches_brute_force(n in 4usize..9, bits in proptest::collection::vec(any::<bool>(), 36)) {
            let mut edges = Vec::new();
            let mut k = 0;
            for a in 0..n {
                for b in a + 1..n {
                    if bits[k % bits.len()] {
                        edges.push((a, b));
                    }
                    k += 1;
                }
            }
            let g = CompatibilityGraph::new(n, &edges).unwrap();
            prop_assert_eq!(
                canon(find_induced_cycles(&g, 4)),
                canon(brute_force_induced_cycles(&g, 4))
            );
        }
    }
}
