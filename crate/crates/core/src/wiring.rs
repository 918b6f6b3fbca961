//! Noncontextual wirings on cycle scenarios.
//!
//! A deterministic type-preserving wiring on the n-cycle is a pair `(h, g)`:
//! a graph homomorphism `h` of `C_n` picking which original measurement each
//! new measurement reads, and a per-measurement outcome map `g_j` in
//! `{id, flip, const+, const-}`. These are the vertices of the polytope of
//! free operations; general operations are convex mixtures of them.
//!
//! `enumerate_deterministic` lists the vertices up to behavioral equality of
//! the induced channel (distinct `(h, g)` can act identically, e.g. a
//! constant `g_j` makes `h(j)` irrelevant). `decompose_in_polytope` decides
//! membership of an explicit conditional-probability table in the polytope
//! by exact LP feasibility.

use std::collections::BTreeSet;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::behavior::Behavior;
use crate::lp::{LinearProgram, LpStatus};
use crate::rat::{fmt_rat, rat_serde, Rat};
use crate::scenario::Scenario;
use crate::{Error, Result};

/// Enumeration cap: the raw vertex count grows as `|Hom(C_n, C_n)| 4^n`.
pub const WIRING_ENUMERATION_CAP: usize = 8;

/// Outcome post-processing map on `{+1, -1}`, encoded on outcome indices
/// (`0` is `+1`, `1` is `-1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OutcomeMap {
    #[serde(rename = "id")]
    Id,
    #[serde(rename = "flip")]
    Flip,
    #[serde(rename = "const+")]
    ConstPlus,
    #[serde(rename = "const-")]
    ConstMinus,
}

impl OutcomeMap {
    pub const ALL: [OutcomeMap; 4] = [
        OutcomeMap::Id,
        OutcomeMap::Flip,
        OutcomeMap::ConstPlus,
        OutcomeMap::ConstMinus,
    ];

    /// Image of outcome index `s`.
    pub fn apply(self, s: usize) -> usize {
        match self {
            OutcomeMap::Id => s,
            OutcomeMap::Flip => 1 - s,
            OutcomeMap::ConstPlus => 0,
            OutcomeMap::ConstMinus => 1,
        }
    }

    /// `outer . inner` as a single map.
    pub fn compose(outer: OutcomeMap, inner: OutcomeMap) -> OutcomeMap {
        match outer {
            OutcomeMap::ConstPlus | OutcomeMap::ConstMinus => outer,
            OutcomeMap::Id => inner,
            OutcomeMap::Flip => match inner {
                OutcomeMap::Id => OutcomeMap::Flip,
                OutcomeMap::Flip => OutcomeMap::Id,
                OutcomeMap::ConstPlus => OutcomeMap::ConstMinus,
                OutcomeMap::ConstMinus => OutcomeMap::ConstPlus,
            },
        }
    }

    /// Sign action: `Some(+1)` or `Some(-1)` for id/flip, `None` for consts.
    fn sign(self) -> Option<i8> {
        match self {
            OutcomeMap::Id => Some(1),
            OutcomeMap::Flip => Some(-1),
            OutcomeMap::ConstPlus | OutcomeMap::ConstMinus => None,
        }
    }

    /// Output sign for constant maps.
    fn const_sign(self) -> Option<i8> {
        match self {
            OutcomeMap::ConstPlus => Some(1),
            OutcomeMap::ConstMinus => Some(-1),
            _ => None,
        }
    }
}

/// Where a wired correlation coordinate reads from: a source single, a
/// source pair correlator, or the constant 1, up to sign. Two wirings act
/// identically on all non-disturbing behaviors iff their routings agree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Src {
    One,
    Single(usize),
    Corr(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct Routing {
    pub singles: Vec<(Src, i8)>,
    pub corrs: Vec<(Src, i8)>,
}

impl Routing {
    pub(crate) fn eval(&self, singles: &[Rat], corrs: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
        let one = |src: &(Src, i8)| -> Rat {
            let base = match src.0 {
                Src::One => Rat::one(),
                Src::Single(i) => singles[i].clone(),
                Src::Corr(i) => corrs[i].clone(),
            };
            if src.1 < 0 {
                -base
            } else {
                base
            }
        };
        (
            self.singles.iter().map(one).collect(),
            self.corrs.iter().map(one).collect(),
        )
    }
}

/// The source context carrying edge `{a, b}` of `C_n`, and whether `a` sits
/// in its first slot.
fn source_context(n: usize, a: usize, b: usize) -> (usize, bool) {
    if (a + 1) % n == b {
        (a, true)
    } else {
        debug_assert_eq!((b + 1) % n, a);
        (b, false)
    }
}

#[derive(Serialize, Deserialize)]
struct WiringWire {
    n: usize,
    h: Vec<usize>,
    g: Vec<OutcomeMap>,
}

/// A vertex of the free-operations polytope: measurement selection `h`
/// (a graph homomorphism of `C_n`) plus per-measurement outcome maps.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DeterministicWiring {
    n: usize,
    h: Vec<usize>,
    g: Vec<OutcomeMap>,
}

impl DeterministicWiring {
    pub fn new(h: Vec<usize>, g: Vec<OutcomeMap>) -> Result<Self> {
        let n = h.len();
        if n < 3 {
            return Err(Error::invalid("wiring needs n >= 3"));
        }
        if g.len() != n {
            return Err(Error::invalid("outcome map list must have length n"));
        }
        for j in 0..n {
            if h[j] >= n {
                return Err(Error::invalid(format!("h({j}) = {} out of range", h[j])));
            }
            let (a, b) = (h[j], h[(j + 1) % n]);
            let adjacent = a != b && ((a + 1) % n == b || (b + 1) % n == a);
            if !adjacent {
                return Err(Error::invalid(format!(
                    "h is not a homomorphism of C_{n}: h({j}) = {a} and h({}) = {b} are not adjacent",
                    (j + 1) % n
                )));
            }
        }
        Ok(DeterministicWiring { n, h, g })
    }

    pub fn identity(n: usize) -> Result<Self> {
        DeterministicWiring::new((0..n).collect(), vec![OutcomeMap::Id; n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> &[usize] {
        &self.h
    }

    pub fn g(&self) -> &[OutcomeMap] {
        &self.g
    }

    /// Apply to a non-disturbing behavior on the canonical n-cycle: for the
    /// wired context `{j, j+1}`, sum the source context `{h(j), h(j+1)}`
    /// over outcome pairs compatible with the outcome maps.
    pub fn apply(&self, b: &Behavior) -> Result<Behavior> {
        let n = self.check_input(b)?;
        let mut tables = Vec::with_capacity(n);
        for j in 0..n {
            let jp = (j + 1) % n;
            let (i, a_first) = source_context(n, self.h[j], self.h[jp]);
            let src = b.table(i);
            let mut t = vec![Rat::zero(); 4];
            for s0 in 0..2 {
                for s1 in 0..2 {
                    let (sa, sb) = if a_first { (s0, s1) } else { (s1, s0) };
                    let t0 = self.g[j].apply(sa);
                    let t1 = self.g[jp].apply(sb);
                    t[2 * t0 + t1] += &src[2 * s0 + s1];
                }
            }
            tables.push(t);
        }
        Behavior::with_scenario(b.scenario_arc(), tables)
    }

    /// `self . inner`: the single wiring acting as `inner` first, then
    /// `self` on the result.
    pub fn compose(&self, inner: &DeterministicWiring) -> Result<DeterministicWiring> {
        if self.n != inner.n {
            return Err(Error::invalid("composed wirings must share n"));
        }
        let h = (0..self.n).map(|j| inner.h[self.h[j]]).collect();
        let g = (0..self.n)
            .map(|j| OutcomeMap::compose(self.g[j], inner.g[self.h[j]]))
            .collect();
        DeterministicWiring::new(h, g)
    }

    /// Signed routing of every wired coordinate (singles, then pair
    /// correlators) to a source coordinate or a constant.
    pub(crate) fn routing(&self) -> Routing {
        let n = self.n;
        let singles = (0..n)
            .map(|j| match self.g[j].sign() {
                Some(s) => (Src::Single(self.h[j]), s),
                None => (Src::One, self.g[j].const_sign().expect("const map")),
            })
            .collect();
        let corrs = (0..n)
            .map(|j| {
                let jp = (j + 1) % n;
                let (a, b) = (self.h[j], self.h[jp]);
                match (self.g[j].sign(), self.g[jp].sign()) {
                    (Some(s0), Some(s1)) => (Src::Corr(source_context(n, a, b).0), s0 * s1),
                    (Some(s0), None) => (Src::Single(a), s0 * self.g[jp].const_sign().unwrap()),
                    (None, Some(s1)) => (Src::Single(b), self.g[j].const_sign().unwrap() * s1),
                    (None, None) => (
                        Src::One,
                        self.g[j].const_sign().unwrap() * self.g[jp].const_sign().unwrap(),
                    ),
                }
            })
            .collect();
        Routing { singles, corrs }
    }

    /// The explicit conditional-probability table of this wiring.
    pub fn channel(&self) -> WiringChannel {
        let n = self.n;
        let mut tables = vec![vec![zero_block(); n]; n];
        for j in 0..n {
            let jp = (j + 1) % n;
            let (i, a_first) = source_context(n, self.h[j], self.h[jp]);
            for s0 in 0..2 {
                for s1 in 0..2 {
                    let (sa, sb) = if a_first { (s0, s1) } else { (s1, s0) };
                    let t0 = self.g[j].apply(sa);
                    let t1 = self.g[jp].apply(sb);
                    tables[j][i][2 * s0 + s1][2 * t0 + t1] = Rat::one();
                }
            }
        }
        WiringChannel { n, tables }
    }

    fn check_input(&self, b: &Behavior) -> Result<usize> {
        let n = b
            .scenario()
            .cycle_n()
            .ok_or_else(|| Error::invalid("wirings act on canonical cycle scenarios"))?;
        if n != self.n {
            return Err(Error::invalid(format!(
                "wiring is for n = {}, behavior has n = {n}",
                self.n
            )));
        }
        if !b.is_nondisturbing()? {
            return Err(Error::invalid("wirings require a non-disturbing behavior"));
        }
        Ok(n)
    }

    pub fn to_json(&self) -> String {
        let wire = WiringWire {
            n: self.n,
            h: self.h.clone(),
            g: self.g.clone(),
        };
        serde_json::to_string_pretty(&wire).expect("wiring serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: WiringWire =
            serde_json::from_str(text).map_err(|e| Error::parse(format!("wiring JSON: {e}")))?;
        if wire.h.len() != wire.n {
            return Err(Error::invalid("wiring JSON: h must have length n"));
        }
        DeterministicWiring::new(wire.h, wire.g)
    }
}

/// All graph homomorphisms of `C_n`, as closed walks of length n, in
/// lexicographic order.
fn cycle_homs(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut walk = Vec::with_capacity(n);
    fn extend(n: usize, walk: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if walk.len() == n {
            let (first, last) = (walk[0], walk[n - 1]);
            if first != last && ((last + 1) % n == first || (first + 1) % n == last) {
                out.push(walk.clone());
            }
            return;
        }
        let prev = *walk.last().expect("nonempty walk");
        let mut steps = [(prev + 1) % n, (prev + n - 1) % n];
        steps.sort_unstable();
        for next in steps {
            walk.push(next);
            extend(n, walk, out);
            walk.pop();
        }
    }
    for start in 0..n {
        walk.push(start);
        extend(n, &mut walk, &mut out);
        walk.pop();
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// All deterministic wirings for the n-cycle, deduplicated by behavioral
/// equality of the induced channel, in canonical `(h, g)` order.
pub fn enumerate_deterministic(n: usize) -> Result<Vec<DeterministicWiring>> {
    if n < 3 {
        return Err(Error::invalid("wirings need n >= 3"));
    }
    if n > WIRING_ENUMERATION_CAP {
        return Err(Error::capacity(format!(
            "wiring enumeration capped at n <= {WIRING_ENUMERATION_CAP}"
        )));
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for h in cycle_homs(n) {
        for rank in 0..4usize.pow(n as u32) {
            let mut g = Vec::with_capacity(n);
            for j in 0..n {
                g.push(OutcomeMap::ALL[rank >> (2 * (n - 1 - j)) & 3]);
            }
            let w = DeterministicWiring {
                n,
                h: h.clone(),
                g,
            };
            if seen.insert(w.routing()) {
                out.push(w);
            }
        }
    }
    Ok(out)
}

/// Process-wide memo of [`enumerate_deterministic`], shared read-only.
pub(crate) fn enumerated(n: usize) -> Result<Arc<Vec<DeterministicWiring>>> {
    static MEMO: OnceLock<Mutex<Vec<(usize, Arc<Vec<DeterministicWiring>>)>>> = OnceLock::new();
    let memo = MEMO.get_or_init(|| Mutex::new(Vec::new()));
    let mut guard = memo.lock().expect("wiring memo lock");
    if let Some((_, list)) = guard.iter().find(|(m, _)| *m == n) {
        return Ok(Arc::clone(list));
    }
    let list = Arc::new(enumerate_deterministic(n)?);
    guard.push((n, Arc::clone(&list)));
    Ok(list)
}

/// The symmetry wirings: `h` a cycle automorphism (the 2n dihedral maps),
/// every `g_j` a bijection, in canonical `(h, g)` order.
pub fn enumerate_symmetries(n: usize) -> Result<Vec<DeterministicWiring>> {
    if n < 3 {
        return Err(Error::invalid("wirings need n >= 3"));
    }
    let mut hs: Vec<Vec<usize>> = Vec::with_capacity(2 * n);
    for k in 0..n {
        hs.push((0..n).map(|j| (j + k) % n).collect());
        hs.push((0..n).map(|j| (k + n - j % n) % n).collect());
    }
    hs.sort_unstable();
    hs.dedup();
    let mut out = Vec::new();
    for h in hs {
        for mask in 0..1usize << n {
            let g = (0..n)
                .map(|j| {
                    if mask >> (n - 1 - j) & 1 == 1 {
                        OutcomeMap::Flip
                    } else {
                        OutcomeMap::Id
                    }
                })
                .collect();
            out.push(DeterministicWiring {
                n,
                h: h.clone(),
                g,
            });
        }
    }
    out.sort_unstable();
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct MixtureComponentWire {
    #[serde(with = "rat_serde")]
    weight: Rat,
    wiring: WiringWire,
}

#[derive(Serialize, Deserialize)]
struct MixtureWire {
    components: Vec<MixtureComponentWire>,
}

/// A convex mixture of deterministic wirings: a general free operation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WiringMixture {
    components: Vec<(Rat, DeterministicWiring)>,
}

impl WiringMixture {
    pub fn new(components: Vec<(Rat, DeterministicWiring)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("mixture needs at least one component"));
        }
        let n = components[0].1.n;
        if components.iter().any(|(_, w)| w.n != n) {
            return Err(Error::invalid("mixture components must share n"));
        }
        if components.iter().any(|(w, _)| w < &Rat::zero()) {
            return Err(Error::invalid("mixture weights must be nonnegative"));
        }
        let total: Rat = components.iter().map(|(w, _)| w.clone()).sum();
        if !total.is_one() {
            return Err(Error::invalid(format!(
                "mixture weights sum to {}, expected 1",
                fmt_rat(&total)
            )));
        }
        Ok(WiringMixture { components })
    }

    pub fn singleton(w: DeterministicWiring) -> Self {
        WiringMixture {
            components: vec![(Rat::one(), w)],
        }
    }

    pub fn n(&self) -> usize {
        self.components[0].1.n
    }

    pub fn components(&self) -> &[(Rat, DeterministicWiring)] {
        &self.components
    }

    /// Weight-averaged image: exactly the mix of the component images.
    pub fn apply(&self, b: &Behavior) -> Result<Behavior> {
        let mut acc: Option<Vec<Vec<Rat>>> = None;
        for (weight, w) in &self.components {
            let image = w.apply(b)?;
            match &mut acc {
                None => {
                    acc = Some(
                        (0..self.n())
                            .map(|c| image.table(c).iter().map(|p| p * weight).collect())
                            .collect(),
                    );
                }
                Some(tables) => {
                    for (c, table) in tables.iter_mut().enumerate() {
                        for (t, p) in table.iter_mut().zip(image.table(c)) {
                            *t += p * weight;
                        }
                    }
                }
            }
        }
        Behavior::with_scenario(b.scenario_arc(), acc.expect("nonempty mixture"))
    }

    /// The mixture's explicit conditional-probability table.
    pub fn channel(&self) -> WiringChannel {
        let n = self.n();
        let mut acc = WiringChannel::zero(n);
        for (weight, w) in &self.components {
            let ch = w.channel();
            for j in 0..n {
                for c in 0..n {
                    for s in 0..4 {
                        for t in 0..4 {
                            acc.tables[j][c][s][t] += &ch.tables[j][c][s][t] * weight;
                        }
                    }
                }
            }
        }
        acc
    }

    pub fn to_json(&self) -> String {
        let wire = MixtureWire {
            components: self
                .components
                .iter()
                .map(|(weight, w)| MixtureComponentWire {
                    weight: weight.clone(),
                    wiring: WiringWire {
                        n: w.n,
                        h: w.h.clone(),
                        g: w.g.clone(),
                    },
                })
                .collect(),
        };
        serde_json::to_string_pretty(&wire).expect("mixture serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: MixtureWire =
            serde_json::from_str(text).map_err(|e| Error::parse(format!("mixture JSON: {e}")))?;
        let mut components = Vec::with_capacity(wire.components.len());
        for c in wire.components {
            if c.wiring.h.len() != c.wiring.n {
                return Err(Error::invalid("wiring JSON: h must have length n"));
            }
            components.push((c.weight, DeterministicWiring::new(c.wiring.h, c.wiring.g)?));
        }
        WiringMixture::new(components)
    }
}

/// Free-function form of [`WiringMixture::apply`].
pub fn apply_mixture(m: &WiringMixture, b: &Behavior) -> Result<Behavior> {
    m.apply(b)
}

/// Scenario shape summary: measurement count, context sizes, outcome count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioSignature {
    pub measurements: usize,
    pub context_sizes: Vec<usize>,
    pub outcomes: usize,
}

impl ScenarioSignature {
    pub fn of(s: &Scenario) -> Self {
        ScenarioSignature {
            measurements: s.measurements.len(),
            context_sizes: s.contexts.iter().map(|c| c.len()).collect(),
            outcomes: s.outcomes.len(),
        }
    }
}

/// The type of an operation: source and target scenario signatures.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperationType {
    pub source: ScenarioSignature,
    pub target: ScenarioSignature,
}

impl OperationType {
    pub fn of_wiring(w: &DeterministicWiring) -> Result<Self> {
        let s = crate::scenario::make_cycle_scenario(w.n)?;
        let sig = ScenarioSignature::of(&s);
        Ok(OperationType {
            source: sig.clone(),
            target: sig,
        })
    }

    pub fn is_type_preserving(&self) -> bool {
        self.source == self.target
    }
}

/// Explicit conditional-probability table of a candidate wiring of type
/// n -> n: `tables[j][c][s][t]` is the joint probability of selecting source
/// context `c` for wired context `j` and outputting outcome pair `t` when
/// `c`'s outcome pair is `s` (pairs encoded as `2*first + second`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WiringChannel {
    n: usize,
    tables: Vec<Vec<[[Rat; 4]; 4]>>,
}

fn zero_block() -> [[Rat; 4]; 4] {
    std::array::from_fn(|_| std::array::from_fn(|_| Rat::zero()))
}

impl WiringChannel {
    fn zero(n: usize) -> Self {
        WiringChannel {
            n,
            tables: vec![vec![zero_block(); n]; n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, j: usize, c: usize, s: usize, t: usize) -> &Rat {
        &self.tables[j][c][s][t]
    }

    pub fn set_entry(&mut self, j: usize, c: usize, s: usize, t: usize, v: Rat) {
        self.tables[j][c][s][t] = v;
    }

    /// Shape sanity: nonnegative entries and, per wired context, unit total
    /// mass on every source-outcome row.
    pub fn validate(&self) -> Result<()> {
        for j in 0..self.n {
            for s in 0..4 {
                let mut row_total = Rat::zero();
                for c in 0..self.n {
                    for t in 0..4 {
                        let v = &self.tables[j][c][s][t];
                        if v < &Rat::zero() {
                            return Err(Error::invalid(format!(
                                "channel entry ({j},{c},{s},{t}) is negative"
                            )));
                        }
                        row_total += v;
                    }
                }
                if !row_total.is_one() {
                    return Err(Error::invalid(format!(
                        "channel mass for wired context {j}, source outcomes {s} is {}, expected 1",
                        fmt_rat(&row_total)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Decide membership of `channel` in the polytope spanned by the
/// deterministic wirings: exact convex weights, or `None` as refutation.
pub fn decompose_in_polytope(channel: &WiringChannel) -> Result<Option<WiringMixture>> {
    channel.validate()?;
    let n = channel.n;
    let vertices = enumerate_deterministic(n)?;
    let vertex_tables: Vec<WiringChannel> = vertices.iter().map(|w| w.channel()).collect();

    // Fast path: the channel is itself a vertex table.
    for (w, ch) in vertices.iter().zip(&vertex_tables) {
        if ch == channel {
            return Ok(Some(WiringMixture::singleton(w.clone())));
        }
    }

    // A vertex can carry weight only where the channel is supported.
    let supported = |ch: &WiringChannel| {
        (0..n).all(|j| {
            (0..n).all(|c| {
                (0..4).all(|s| {
                    (0..4).all(|t| {
                        ch.tables[j][c][s][t].is_zero() || !channel.tables[j][c][s][t].is_zero()
                    })
                })
            })
        })
    };
    let (candidates, tables): (Vec<&DeterministicWiring>, Vec<&WiringChannel>) = vertices
        .iter()
        .zip(&vertex_tables)
        .filter(|(_, ch)| supported(ch))
        .unzip();
    if candidates.is_empty() {
        return Ok(None);
    }

    let mut lp = LinearProgram::new(candidates.len());
    for j in 0..n {
        for c in 0..n {
            for s in 0..4 {
                for t in 0..4 {
                    let target = &channel.tables[j][c][s][t];
                    let row: Vec<Rat> = tables
                        .iter()
                        .map(|ch| ch.tables[j][c][s][t].clone())
                        .collect();
                    if target.is_zero() && row.iter().all(|v| v.is_zero()) {
                        continue;
                    }
                    lp.add_eq(row, target.clone());
                }
            }
        }
    }
    lp.add_eq(vec![Rat::one(); candidates.len()], Rat::one());
    let outcome = lp.solve()?;
    if outcome.status == LpStatus::Infeasible {
        return Ok(None);
    }
    let weights = outcome.solution.expect("feasible LP carries a solution");
    let components: Vec<(Rat, DeterministicWiring)> = weights
        .into_iter()
        .zip(&candidates)
        .filter(|(w, _)| !w.is_zero())
        .map(|(w, v)| (w, (*v).clone()))
        .collect();
    Ok(Some(WiringMixture::new(components)?))
}
