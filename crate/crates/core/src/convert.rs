//! The convertibility oracle and pre-order classification.
//!
//! `B1 -> B2` holds iff `B2` lies in the convex hull of the images of `B1`
//! under the deterministic wirings. `can_convert` decides this by exact LP
//! feasibility over the deduplicated image list, returning convex weights as
//! a machine-checkable certificate or an exact refutation.
//!
//! `screened_convert` is a cross-validation path for contextual targets: it
//! restricts the hull to images violating a chosen facet and adds a single
//! free boundary component pinned to `Omega_f = n - 2`. The two oracles
//! agree on screened points; the redundancy exists to be tested.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::behavior::Behavior;
use crate::lp::{LinearProgram, LpStatus};
use crate::ncycle::OmegaFunctional;
use crate::rat::{int, Rat};
use crate::wiring::{DeterministicWiring, OutcomeMap, WiringMixture};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Convertible,
    NotConvertible,
}

/// Outcome of a convertibility query, with enough data to re-check it.
#[derive(Debug, Clone)]
pub struct ConversionCertificate {
    pub verdict: Verdict,
    /// Convex weights over deterministic wirings, present when convertible.
    pub weights: Option<WiringMixture>,
    /// Reproduction residual; exact zero by construction when convertible.
    pub residual: Rat,
    lhs: Behavior,
    rhs: Behavior,
}

impl ConversionCertificate {
    pub fn lhs(&self) -> &Behavior {
        &self.lhs
    }

    pub fn rhs(&self) -> &Behavior {
        &self.rhs
    }

    pub fn is_convertible(&self) -> bool {
        self.verdict == Verdict::Convertible
    }

    /// Re-check the certificate from scratch: a convertible certificate must
    /// reproduce `rhs` exactly from `lhs`; a refutation is re-run through
    /// the oracle.
    pub fn verify(&self) -> Result<bool> {
        match self.verdict {
            Verdict::Convertible => {
                let mixture = match &self.weights {
                    Some(m) => m,
                    None => return Ok(false),
                };
                Ok(mixture.apply(&self.lhs)? == self.rhs && self.residual.is_zero())
            }
            Verdict::NotConvertible => {
                Ok(!can_convert(&self.lhs, &self.rhs)?.is_convertible())
            }
        }
    }

    pub fn to_json(&self) -> String {
        let verdict = match self.verdict {
            Verdict::Convertible => "convertible",
            Verdict::NotConvertible => "not-convertible",
        };
        let weights: Value = match &self.weights {
            Some(m) => serde_json::from_str(&m.to_json()).expect("mixture JSON is valid"),
            None => Value::Null,
        };
        let weights = match weights {
            Value::Object(mut o) => o.remove("components").expect("mixture has components"),
            v => v,
        };
        let doc = json!({
            "verdict": verdict,
            "weights": weights,
            "lhs": behavior_value(&self.lhs),
            "rhs": behavior_value(&self.rhs),
        });
        serde_json::to_string_pretty(&doc).expect("certificate serializes")
    }
}

fn behavior_value(b: &Behavior) -> Value {
    serde_json::from_str(&b.to_json()).expect("behavior JSON is valid")
}

/// How a pair of behaviors sits in the pre-order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    StrictlyAbove,
    StrictlyBelow,
    Equivalent,
    Incomparable,
}

impl Relation {
    pub fn as_str(self) -> &'static str {
        match self {
            Relation::StrictlyAbove => "strictly_above",
            Relation::StrictlyBelow => "strictly_below",
            Relation::Equivalent => "equivalent",
            Relation::Incomparable => "incomparable",
        }
    }
}

/// Both conversion directions and the relation they imply.
#[derive(Debug, Clone)]
pub struct PairClassification {
    pub relation: Relation,
    pub forward: ConversionCertificate,
    pub backward: ConversionCertificate,
}

impl PairClassification {
    pub fn to_json(&self) -> String {
        let doc = json!({
            "relation": self.relation.as_str(),
            "forward": serde_json::from_str::<Value>(&self.forward.to_json()).expect("valid"),
            "backward": serde_json::from_str::<Value>(&self.backward.to_json()).expect("valid"),
        });
        serde_json::to_string_pretty(&doc).expect("classification serializes")
    }
}

pub(crate) fn cycle_nd(b: &Behavior) -> Result<usize> {
    let n = b
        .scenario()
        .cycle_n()
        .ok_or_else(|| Error::invalid("convertibility is defined on canonical cycle behaviors"))?;
    if !b.is_nondisturbing()? {
        return Err(Error::invalid("convertibility requires non-disturbing behaviors"));
    }
    Ok(n)
}

fn matching_pair(b1: &Behavior, b2: &Behavior) -> Result<usize> {
    let n1 = cycle_nd(b1)?;
    let n2 = cycle_nd(b2)?;
    if n1 != n2 {
        return Err(Error::invalid(format!(
            "type mismatch: behaviors live on C_{n1} and C_{n2}"
        )));
    }
    Ok(n1)
}

type Correlations = (Vec<Rat>, Vec<Rat>);

/// Deduplicated images of `b` in correlator coordinates, each with the
/// first wiring (in canonical order) achieving it.
fn image_correlations(b: &Behavior) -> Result<Vec<(DeterministicWiring, Correlations)>> {
    let n = cycle_nd(b)?;
    let wirings = crate::wiring::enumerated(n)?;
    let (singles, corrs) = b.to_correlations()?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for w in wirings.iter() {
        let key = w.routing().eval(&singles, &corrs);
        if seen.insert(key.clone()) {
            out.push((w.clone(), key));
        }
    }
    Ok(out)
}

/// Images of `b` under all deterministic wirings, deduplicated, each with
/// the first wiring (in canonical order) achieving it.
pub fn images(b: &Behavior) -> Result<Vec<(DeterministicWiring, Behavior)>> {
    let n = cycle_nd(b)?;
    image_correlations(b)?
        .into_iter()
        .map(|(w, (s, c))| Ok((w, Behavior::from_correlations(n, &s, &c)?)))
        .collect()
}

fn certificate(
    verdict: Verdict,
    weights: Option<WiringMixture>,
    b1: &Behavior,
    b2: &Behavior,
) -> ConversionCertificate {
    ConversionCertificate {
        verdict,
        weights,
        residual: Rat::zero(),
        lhs: b1.clone(),
        rhs: b2.clone(),
    }
}

/// Decide `b1 -> b2`: LP feasibility of `b2` as a convex combination of the
/// deterministic-wiring images of `b1`. Equality is imposed in correlator
/// coordinates; on normalized non-disturbing cycle behaviors every table
/// entry is an affine function of the singles and edge correlators, so with
/// the unit-weight row this is per-entry equality at half the row count.
pub fn can_convert(b1: &Behavior, b2: &Behavior) -> Result<ConversionCertificate> {
    let n = matching_pair(b1, b2)?;
    let imgs = image_correlations(b1)?;
    let target = b2.to_correlations()?;
    for (w, key) in &imgs {
        if key == &target {
            let mixture = WiringMixture::singleton(w.clone());
            return Ok(certificate(Verdict::Convertible, Some(mixture), b1, b2));
        }
    }
    fn pick(block: usize, k: &Correlations) -> &[Rat] {
        if block == 0 {
            &k.0
        } else {
            &k.1
        }
    }
    let mut lp = LinearProgram::new(imgs.len());
    for block in 0..2 {
        for i in 0..n {
            lp.add_eq(
                imgs.iter().map(|(_, k)| pick(block, k)[i].clone()).collect(),
                pick(block, &target)[i].clone(),
            );
        }
    }
    lp.add_eq(vec![Rat::one(); imgs.len()], Rat::one());
    let outcome = lp.solve()?;
    if outcome.status == LpStatus::Infeasible {
        return Ok(certificate(Verdict::NotConvertible, None, b1, b2));
    }
    let weights = outcome.solution.expect("feasible LP carries a solution");
    let components: Vec<(Rat, DeterministicWiring)> = weights
        .into_iter()
        .zip(&imgs)
        .filter(|(v, _)| !v.is_zero())
        .map(|(v, (w, _))| (v, w.clone()))
        .collect();
    let mixture = WiringMixture::new(components)?;
    Ok(certificate(Verdict::Convertible, Some(mixture), b1, b2))
}

/// Run both directions and name the relation.
pub fn classify(b1: &Behavior, b2: &Behavior) -> Result<PairClassification> {
    let forward = can_convert(b1, b2)?;
    let backward = can_convert(b2, b1)?;
    let relation = match (forward.is_convertible(), backward.is_convertible()) {
        (true, true) => Relation::Equivalent,
        (true, false) => Relation::StrictlyAbove,
        (false, true) => Relation::StrictlyBelow,
        (false, false) => Relation::Incomparable,
    };
    Ok(PairClassification {
        relation,
        forward,
        backward,
    })
}

/// The constant wiring whose image is the deterministic behavior of
/// `assignment` (outcome index per measurement).
pub(crate) fn constant_wiring(n: usize, assignment: &[usize]) -> Result<DeterministicWiring> {
    let g = assignment
        .iter()
        .map(|&o| {
            if o == 0 {
                OutcomeMap::ConstPlus
            } else {
                OutcomeMap::ConstMinus
            }
        })
        .collect();
    DeterministicWiring::new((0..n).collect(), g)
}

/// Decide `b1 -> b2` for a screened target (`Omega_f(b2) > n - 2`) via the
/// restricted hull: images of `b1` violating facet `f`, plus one free
/// component pinned to the boundary `Omega_f = n - 2`. Agrees with
/// `can_convert`; exists as an independent derivation path.
pub fn screened_convert(
    b1: &Behavior,
    b2: &Behavior,
    f: &OmegaFunctional,
) -> Result<ConversionCertificate> {
    let n = matching_pair(b1, b2)?;
    if f.n() != n {
        return Err(Error::invalid("facet and behaviors must share n"));
    }
    let bound = int(n as i64 - 2);
    if f.value(b2)? <= bound {
        return Err(Error::invalid(
            "target is not screened: Omega_f(b2) <= n - 2",
        ));
    }
    let screened: Vec<(DeterministicWiring, Behavior)> = images(b1)?
        .into_iter()
        .filter(|(_, img)| f.value(img).expect("image shares n") > bound)
        .collect();

    // Variables: weights on screened images, then the scaled free table
    // z[c][t] (4n entries), then its mass mu.
    let nw = screened.len();
    let zi = |c: usize, t: usize| nw + 4 * c + t;
    let mu = nw + 4 * n;
    let nv = mu + 1;
    let zero_row = || vec![Rat::zero(); nv];

    let mut lp = LinearProgram::new(nv);
    for c in 0..n {
        for t in 0..4 {
            let mut row = zero_row();
            for (k, (_, img)) in screened.iter().enumerate() {
                row[k] = img.table(c)[t].clone();
            }
            row[zi(c, t)] = Rat::one();
            lp.add_eq(row, b2.table(c)[t].clone());
        }
    }
    for c in 0..n {
        let mut row = zero_row();
        for t in 0..4 {
            row[zi(c, t)] = Rat::one();
        }
        row[mu] = -Rat::one();
        lp.add_eq(row, Rat::zero());
    }
    // Non-disturbance of the free part: each measurement's marginal agrees
    // between its two contexts.
    for m in 0..n {
        let prev = (m + n - 1) % n;
        for outcome in 0..2 {
            let mut row = zero_row();
            for other in 0..2 {
                row[zi(prev, 2 * other + outcome)] += Rat::one();
                row[zi(m, 2 * outcome + other)] -= Rat::one();
            }
            lp.add_eq(row, Rat::zero());
        }
    }
    // The free part sits exactly on the facet boundary.
    {
        let mut row = zero_row();
        for c in 0..n {
            let s = int(f.signs()[c] as i64);
            row[zi(c, 0)] = s.clone();
            row[zi(c, 1)] = -s.clone();
            row[zi(c, 2)] = -s.clone();
            row[zi(c, 3)] = s;
        }
        row[mu] = -bound.clone();
        lp.add_eq(row, Rat::zero());
    }
    {
        let mut row = zero_row();
        for k in 0..nw {
            row[k] = Rat::one();
        }
        row[mu] = Rat::one();
        lp.add_eq(row, Rat::one());
    }

    let outcome = lp.solve()?;
    if outcome.status == LpStatus::Infeasible {
        return Ok(certificate(Verdict::NotConvertible, None, b1, b2));
    }
    let x = outcome.solution.expect("feasible LP carries a solution");
    let mut components: Vec<(Rat, DeterministicWiring)> = screened
        .iter()
        .zip(&x)
        .filter(|(_, v)| !v.is_zero())
        .map(|((w, _), v)| (v.clone(), w.clone()))
        .collect();
    if !x[mu].is_zero() {
        let tables: Vec<Vec<Rat>> = (0..n)
            .map(|c| (0..4).map(|t| &x[zi(c, t)] / &x[mu]).collect())
            .collect();
        let free = Behavior::with_scenario(b1.scenario_arc(), tables)?;
        let section = free.global_section()?.ok_or_else(|| {
            Error::invalid("internal: screened boundary component is not noncontextual")
        })?;
        for (assignment, weight) in &section.weights {
            if weight.is_zero() {
                continue;
            }
            components.push((&x[mu] * weight, constant_wiring(n, assignment)?));
        }
    }
    let mixture = WiringMixture::new(components)?;
    Ok(certificate(Verdict::Convertible, Some(mixture), b1, b2))
}
