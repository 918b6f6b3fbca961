//! Structural demonstrations about the conversion pre-order, each packaged
//! as a machine-checkable trail of claims, plus the cycle embedding that
//! carries the results into larger scenarios.
//!
//! A `PropertyDemo` bundles named witness behaviors with claims of three
//! working kinds: `convertible` (an explicit mixture certificate that
//! re-applies exactly), `not-convertible` (re-refuted through the LP
//! oracle), and `monotone-pair` (recomputed monotone values in the stated
//! strict pattern; two opposed strict inequalities witness incomparability).
//! A fourth kind, `rejected-witness`, records candidate witness values that
//! contradict the closed-form monotones, together with a certified
//! conversion showing why the candidate pair is ordered rather than
//! incomparable.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::behavior::{decode, Behavior};
use crate::convert::{can_convert, constant_wiring, cycle_nd};
use crate::monotone::{m_npr, m_omega};
use crate::ncycle::{
    canonical_bbb, canonical_bbb_assignment, make_b_alpha_gamma, make_f_alpha, make_npr,
    OmegaFunctional,
};
use crate::rat::{fmt_rat, int, rat, Rat};
use crate::scenario::{compatibility_graph, Scenario};
use crate::wiring::{DeterministicWiring, WiringMixture};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClaimKind {
    Convertible,
    NotConvertible,
    MonotonePair,
    RejectedWitness,
}

impl ClaimKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ClaimKind::Convertible => "convertible",
            ClaimKind::NotConvertible => "not-convertible",
            ClaimKind::MonotonePair => "monotone-pair",
            ClaimKind::RejectedWitness => "rejected-witness",
        }
    }
}

/// Re-checkable payload behind a claim.
#[derive(Debug, Clone)]
enum Check {
    /// The mixture must map `from` exactly onto `to`.
    Convert {
        from: Behavior,
        to: Behavior,
        mixture: WiringMixture,
    },
    /// The LP oracle must refuse `from -> to`.
    Refute { from: Behavior, to: Behavior },
    /// `M_NPR(a) > M_NPR(b)` while `M_Omega(a) < M_Omega(b)`.
    Opposed { a: Behavior, b: Behavior },
    /// Both monotones strictly higher on `a` than on `b`.
    Higher { a: Behavior, b: Behavior },
}

#[derive(Debug, Clone)]
pub struct Claim {
    pub kind: ClaimKind,
    pub evidence: Value,
    check: Check,
}

impl Claim {
    /// Re-establish the claim from scratch.
    pub fn verify(&self) -> Result<()> {
        match &self.check {
            Check::Convert { from, to, mixture } => {
                if &mixture.apply(from)? == to {
                    Ok(())
                } else {
                    Err(Error::invalid(
                        "certificate mixture does not reproduce the target",
                    ))
                }
            }
            Check::Refute { from, to } => {
                if can_convert(from, to)?.is_convertible() {
                    Err(Error::invalid("claimed refutation is actually feasible"))
                } else {
                    Ok(())
                }
            }
            Check::Opposed { a, b } => {
                let (ao, an) = monotone_values(a)?;
                let (bo, bn) = monotone_values(b)?;
                if an > bn && ao < bo {
                    Ok(())
                } else {
                    Err(Error::invalid(
                        "monotone values are not strictly opposed",
                    ))
                }
            }
            Check::Higher { a, b } => {
                let (ao, an) = monotone_values(a)?;
                let (bo, bn) = monotone_values(b)?;
                if an > bn && ao > bo {
                    Ok(())
                } else {
                    Err(Error::invalid(
                        "monotone values are not strictly ordered",
                    ))
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct PropertyDemo {
    pub property: String,
    pub n: usize,
    witnesses: Vec<(String, Behavior)>,
    claims: Vec<Claim>,
}

impl PropertyDemo {
    pub fn witnesses(&self) -> &[(String, Behavior)] {
        &self.witnesses
    }

    pub fn claims(&self) -> &[Claim] {
        &self.claims
    }

    /// Re-run every claim's check.
    pub fn verify(&self) -> Result<()> {
        for claim in &self.claims {
            claim.verify()?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let witnesses: Vec<Value> = self
            .witnesses
            .iter()
            .map(|(label, b)| {
                let (mo, mn) = monotone_values(b).expect("witnesses are cycle behaviors");
                json!({
                    "label": label,
                    "m_omega": fmt_rat(&mo),
                    "m_npr": fmt_rat(&mn),
                    "behavior": behavior_value(b),
                })
            })
            .collect();
        let claims: Vec<Value> = self
            .claims
            .iter()
            .map(|c| json!({"kind": c.kind.as_str(), "evidence": c.evidence}))
            .collect();
        let doc = json!({
            "property": self.property,
            "n": self.n,
            "witnesses": witnesses,
            "claims": claims,
        });
        serde_json::to_string_pretty(&doc).expect("demo serializes")
    }
}

fn behavior_value(b: &Behavior) -> Value {
    serde_json::from_str(&b.to_json()).expect("behavior serializes")
}

fn monotone_values(b: &Behavior) -> Result<(Rat, Rat)> {
    let mo = m_omega(b)?
        .finite()
        .cloned()
        .ok_or_else(|| Error::invalid("expected a finite monotone value"))?;
    let mn = m_npr(b)?
        .finite()
        .cloned()
        .ok_or_else(|| Error::invalid("expected a finite monotone value"))?;
    Ok((mo, mn))
}

/// The facet `(-1, +1, ..., +1)` all demos are phrased on.
fn canonical_facet(n: usize) -> Result<OmegaFunctional> {
    let mut signs = vec![1i8; n];
    signs[0] = -1;
    OmegaFunctional::new(signs)
}

fn mixture_components(mixture: &WiringMixture) -> Value {
    let doc: Value = serde_json::from_str(&mixture.to_json()).expect("mixture serializes");
    doc["components"].clone()
}

/// Constant-wiring mixture reproducing a noncontextual behavior from any
/// input, scaled by `scale`.
fn section_components(free: &Behavior, scale: &Rat) -> Result<Vec<(Rat, DeterministicWiring)>> {
    let n = cycle_nd(free)?;
    let section = free
        .global_section()?
        .ok_or_else(|| Error::invalid("section mixture requires a noncontextual behavior"))?;
    let mut out = Vec::new();
    for (assignment, w) in section.weights {
        if !w.is_zero() {
            out.push((&w * scale, constant_wiring(n, &assignment)?));
        }
    }
    Ok(out)
}

/// Explicit certificate for `F(alpha_hi) -> F(alpha_lo)`:
/// `F(lo) = (lo/hi) F(hi) + (1 - lo/hi) B_NPR`, with the free summand
/// produced by constant wirings from a global section of `B_NPR`.
fn chain_certificate(f: &OmegaFunctional, hi: &Rat, lo: &Rat) -> Result<WiringMixture> {
    if !(lo < hi) {
        return Err(Error::invalid("chain certificate needs alpha_lo < alpha_hi"));
    }
    let t = lo / hi;
    let mut components = Vec::new();
    if !t.is_zero() {
        components.push((t.clone(), DeterministicWiring::identity(f.n())?));
    }
    let rest = Rat::one() - &t;
    if !rest.is_zero() {
        components.extend(section_components(&make_npr(f)?, &rest)?);
    }
    WiringMixture::new(components)
}

fn convertible_claim(
    from: (&str, &Behavior),
    to: (&str, &Behavior),
    mixture: WiringMixture,
    note: &str,
) -> Result<Claim> {
    if &mixture.apply(from.1)? != to.1 {
        return Err(Error::invalid(
            "certificate mixture does not reproduce the target",
        ));
    }
    let evidence = json!({
        "from": from.0,
        "to": to.0,
        "certificate": mixture_components(&mixture),
        "note": note,
    });
    Ok(Claim {
        kind: ClaimKind::Convertible,
        evidence,
        check: Check::Convert {
            from: from.1.clone(),
            to: to.1.clone(),
            mixture,
        },
    })
}

fn refutation_claim(from: (&str, &Behavior), to: (&str, &Behavior)) -> Result<Claim> {
    if can_convert(from.1, to.1)?.is_convertible() {
        return Err(Error::invalid("claimed refutation is actually feasible"));
    }
    let evidence = json!({
        "from": from.0,
        "to": to.0,
        "method": "infeasible over mixtures of deterministic wirings",
    });
    Ok(Claim {
        kind: ClaimKind::NotConvertible,
        evidence,
        check: Check::Refute {
            from: from.1.clone(),
            to: to.1.clone(),
        },
    })
}

fn opposed_claim(a: (&str, &Behavior), b: (&str, &Behavior), note: Option<&str>) -> Result<Claim> {
    let (ao, an) = monotone_values(a.1)?;
    let (bo, bn) = monotone_values(b.1)?;
    if !(an > bn && ao < bo) {
        return Err(Error::invalid("monotone values are not strictly opposed"));
    }
    let mut evidence = json!({
        "pair": [a.0, b.0],
        "m_npr": [fmt_rat(&an), fmt_rat(&bn)],
        "m_omega": [fmt_rat(&ao), fmt_rat(&bo)],
        "relation": "incomparable",
        "rule": "one monotone strictly rises while the other strictly falls, so no conversion exists in either direction",
    });
    if let Some(note) = note {
        evidence["note"] = Value::String(note.into());
    }
    Ok(Claim {
        kind: ClaimKind::MonotonePair,
        evidence,
        check: Check::Opposed {
            a: a.1.clone(),
            b: b.1.clone(),
        },
    })
}

fn higher_claim(a: (&str, &Behavior), b: (&str, &Behavior)) -> Result<Claim> {
    let (ao, an) = monotone_values(a.1)?;
    let (bo, bn) = monotone_values(b.1)?;
    if !(an > bn && ao > bo) {
        return Err(Error::invalid("monotone values are not strictly ordered"));
    }
    let evidence = json!({
        "pair": [a.0, b.0],
        "m_npr": [fmt_rat(&an), fmt_rat(&bn)],
        "m_omega": [fmt_rat(&ao), fmt_rat(&bo)],
        "relation": "strictly-above",
    });
    Ok(Claim {
        kind: ClaimKind::MonotonePair,
        evidence,
        check: Check::Higher {
            a: a.1.clone(),
            b: b.1.clone(),
        },
    })
}

/// The pre-order is not total: `A = B(1, 3/4)` and `B = B(1/2, 0)` are
/// incomparable, witnessed by opposed monotones and refuted in both LP
/// directions.
pub fn demo_not_total(n: usize) -> Result<PropertyDemo> {
    if n < 4 {
        return Err(Error::invalid("property demos need n >= 4"));
    }
    let f = canonical_facet(n)?;
    let a = make_b_alpha_gamma(&f, &int(1), &rat(3, 4))?;
    let b = make_b_alpha_gamma(&f, &rat(1, 2), &Rat::zero())?;

    let mut claims = vec![
        opposed_claim(("A", &a), ("B", &b), None)?,
        refutation_claim(("A", &a), ("B", &b))?,
        refutation_claim(("B", &b), ("A", &a))?,
    ];
    claims.push(rejected_pair_claim(&f, n)?);

    Ok(PropertyDemo {
        property: "not-total".into(),
        n,
        witnesses: vec![("A".into(), a), ("B".into(), b)],
        claims,
    })
}

/// Candidate incomparability pair `B(0, 0)` vs `B(1, 1/2)`, rejected: the
/// closed-form monotones order it strictly, and the downward conversion is
/// certified outright.
fn rejected_pair_claim(f: &OmegaFunctional, n: usize) -> Result<Claim> {
    let c1 = make_b_alpha_gamma(f, &Rat::zero(), &Rat::zero())?;
    let c2 = make_b_alpha_gamma(f, &int(1), &rat(1, 2))?;
    let (c1o, c1n) = monotone_values(&c1)?;
    let (c2o, c2n) = monotone_values(&c2)?;
    let cert = can_convert(&c2, &c1)?;
    let mixture = cert
        .weights
        .clone()
        .ok_or_else(|| Error::invalid("expected a conversion certificate"))?;
    let evidence = json!({
        "candidate_pair": ["B(0, 0)", "B(1, 1/2)"],
        "reason": format!(
            "rejected as an incomparability witness: B(0, 0) is free, both monotones order the pair the same way, and the conversion B(1, 1/2) -> B(0, 0) is certified below; a reported M_Omega value of {} is impossible because M_Omega >= n - 2 on non-disturbing behaviors",
            n as i64 - 3
        ),
        "m_omega": [fmt_rat(&c1o), fmt_rat(&c2o)],
        "m_npr": [fmt_rat(&c1n), fmt_rat(&c2n)],
        "certificate": mixture_components(&mixture),
    });
    Ok(Claim {
        kind: ClaimKind::RejectedWitness,
        evidence,
        check: Check::Convert {
            from: c2,
            to: c1,
            mixture,
        },
    })
}

/// The pre-order is not weak: incomparability fails transitivity on
/// `A = B(1, 3/4)`, `B = B(1/2, 0)`, `C = B(1/2, 1/4)` with `B -> C`
/// through the explicit mixture `C = 1/4 B*_bb + 3/4 B`.
pub fn demo_not_weak(n: usize) -> Result<PropertyDemo> {
    if n < 4 {
        return Err(Error::invalid("property demos need n >= 4"));
    }
    let f = canonical_facet(n)?;
    let a = make_b_alpha_gamma(&f, &int(1), &rat(3, 4))?;
    let b = make_b_alpha_gamma(&f, &rat(1, 2), &Rat::zero())?;
    let c = make_b_alpha_gamma(&f, &rat(1, 2), &rat(1, 4))?;

    let bbb = canonical_bbb(&f)?;
    if bbb.mix(&b, &rat(1, 4))? != c {
        return Err(Error::invalid("mixture algebra for C = 1/4 B*_bb + 3/4 B failed"));
    }
    let explicit = WiringMixture::new(vec![
        (rat(1, 4), constant_wiring(n, &canonical_bbb_assignment(&f))?),
        (rat(3, 4), DeterministicWiring::identity(n)?),
    ])?;

    let claims = vec![
        opposed_claim(("A", &a), ("B", &b), None)?,
        opposed_claim(("A", &a), ("C", &c), None)?,
        refutation_claim(("A", &a), ("B", &b))?,
        refutation_claim(("B", &b), ("A", &a))?,
        refutation_claim(("A", &a), ("C", &c))?,
        refutation_claim(("C", &c), ("A", &a))?,
        convertible_claim(
            ("B", &b),
            ("C", &c),
            explicit,
            "C = 1/4 B*_bb + 3/4 B; the free summand is produced by a constant wiring, so B -> C while A is incomparable with both: incomparability is not transitive and the pre-order is not weak",
        )?,
        rejected_triple_claim(&f)?,
    ];

    Ok(PropertyDemo {
        property: "not-weak".into(),
        n,
        witnesses: vec![("A".into(), a), ("B".into(), b), ("C".into(), c)],
        claims,
    })
}

/// Candidate transitivity triple `B(0, 0)`, `B(1/2, 1/2)`, `B(1/2, 3/4)`,
/// rejected: the mixture algebra on the last two holds, but the first leg
/// is not an incomparability because `B(0, 0)` is free and reachable.
fn rejected_triple_claim(f: &OmegaFunctional) -> Result<Claim> {
    let c1 = make_b_alpha_gamma(f, &Rat::zero(), &Rat::zero())?;
    let c2 = make_b_alpha_gamma(f, &rat(1, 2), &rat(1, 2))?;
    let c3 = make_b_alpha_gamma(f, &rat(1, 2), &rat(3, 4))?;
    let algebra_holds = canonical_bbb(f)?.mix(&c2, &rat(1, 2))? == c3;
    let cert = can_convert(&c2, &c1)?;
    let mixture = cert
        .weights
        .clone()
        .ok_or_else(|| Error::invalid("expected a conversion certificate"))?;
    let (c1o, c1n) = monotone_values(&c1)?;
    let (c2o, c2n) = monotone_values(&c2)?;
    let evidence = json!({
        "candidate_triple": ["B(0, 0)", "B(1/2, 1/2)", "B(1/2, 3/4)"],
        "mixture_identity_holds": algebra_holds,
        "reason": "rejected as a transitivity counterexample: B(1/2, 3/4) = 1/2 B*_bb + 1/2 B(1/2, 1/2) does hold, but B(0, 0) is free, both monotones order it below B(1/2, 1/2), and the conversion B(1/2, 1/2) -> B(0, 0) is certified below, so the first leg is not an incomparability",
        "m_omega": [fmt_rat(&c1o), fmt_rat(&c2o)],
        "m_npr": [fmt_rat(&c1n), fmt_rat(&c2n)],
        "certificate": mixture_components(&mixture),
    });
    Ok(Claim {
        kind: ClaimKind::RejectedWitness,
        evidence,
        check: Check::Convert {
            from: c2,
            to: c1,
            mixture,
        },
    })
}

fn validated_grid(grid: Option<&[Rat]>, default: &[Rat]) -> Result<Vec<Rat>> {
    let grid: Vec<Rat> = match grid {
        Some(g) => g.to_vec(),
        None => default.to_vec(),
    };
    if grid.len() < 2 {
        return Err(Error::invalid("grid needs at least two points"));
    }
    if !grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::invalid("grid must be strictly ascending"));
    }
    Ok(grid)
}

/// The chain `F(alpha)` on a grid: every downward step certified by an
/// explicit mixture, every upward step refuted by the LP oracle, `M_NPR`
/// strictly increasing along the grid.
pub fn demo_chain(n: usize, grid: Option<&[Rat]>) -> Result<PropertyDemo> {
    if n < 4 {
        return Err(Error::invalid("property demos need n >= 4"));
    }
    let default: Vec<Rat> = [0, 1, 2, 3, 4].iter().map(|&k| rat(k, 4)).collect();
    let grid = validated_grid(grid, &default)?;
    if grid[0] < Rat::zero() || grid[grid.len() - 1] > int(1) {
        return Err(Error::invalid("chain grid must lie in [0, 1]"));
    }
    let f = canonical_facet(n)?;
    let witnesses: Vec<(String, Behavior)> = grid
        .iter()
        .map(|alpha| Ok((format!("F({})", fmt_rat(alpha)), make_f_alpha(&f, alpha)?)))
        .collect::<Result<_>>()?;

    let mut claims = Vec::new();
    for (i, w) in witnesses.windows(2).enumerate() {
        let ((lo_label, lo), (hi_label, hi)) = (&w[0], &w[1]);
        claims.push(convertible_claim(
            (hi_label.as_str(), hi),
            (lo_label.as_str(), lo),
            chain_certificate(&f, &grid[i + 1], &grid[i])?,
            "downward conversion by mixing with the free B_NPR",
        )?);
        claims.push(refutation_claim((lo_label.as_str(), lo), (hi_label.as_str(), hi))?);
        claims.push(higher_claim((hi_label.as_str(), hi), (lo_label.as_str(), lo))?);
    }

    Ok(PropertyDemo {
        property: "chain".into(),
        n,
        witnesses,
        claims,
    })
}

/// The antichain `B(x, x)` on a grid in `(1/2, 1]`: `M_NPR` strictly rises
/// with `x` while `M_Omega = n - 2 + 2x(1 - x)` strictly falls, so all
/// pairs are incomparable; one pair is spot-confirmed by LP.
pub fn demo_antichain(n: usize, grid: Option<&[Rat]>) -> Result<PropertyDemo> {
    if n < 4 {
        return Err(Error::invalid("property demos need n >= 4"));
    }
    let default: Vec<Rat> = [11, 13, 15, 17, 19].iter().map(|&k| rat(k, 20)).collect();
    let grid = validated_grid(grid, &default)?;
    if grid[0] <= rat(1, 2) || grid[grid.len() - 1] > int(1) {
        return Err(Error::invalid("antichain grid must lie in (1/2, 1]"));
    }
    let f = canonical_facet(n)?;
    let witnesses: Vec<(String, Behavior)> = grid
        .iter()
        .map(|x| {
            let label = format!("B({}, {})", fmt_rat(x), fmt_rat(x));
            Ok((label, make_b_alpha_gamma(&f, x, x)?))
        })
        .collect::<Result<_>>()?;

    let mut claims = Vec::new();
    let slope_note = "M_NPR = n + 2(x - 1) rises with x while M_Omega = n - 2 + 2x(1 - x) falls on (1/2, 1] (slope 2 - 4x < 0)";
    for i in 0..witnesses.len() {
        for j in i + 1..witnesses.len() {
            let (xi, xj) = (&witnesses[i], &witnesses[j]);
            let note = if claims.is_empty() { Some(slope_note) } else { None };
            claims.push(opposed_claim((xj.0.as_str(), &xj.1), (xi.0.as_str(), &xi.1), note)?);
        }
    }
    let (first, last) = (&witnesses[0], &witnesses[witnesses.len() - 1]);
    claims.push(refutation_claim((first.0.as_str(), &first.1), (last.0.as_str(), &last.1))?);
    claims.push(refutation_claim((last.0.as_str(), &last.1), (first.0.as_str(), &first.1))?);

    Ok(PropertyDemo {
        property: "antichain".into(),
        n,
        witnesses,
        claims,
    })
}

/// The pre-order is locally infinite: between `F(1/4)` and `F(3/4)` sit
/// pairwise inequivalent chain points, sampled on a denominator-64 grid,
/// each certified reachable from above and convertible downward.
pub fn demo_locally_infinite(n: usize, seed: u64) -> Result<PropertyDemo> {
    if n < 4 {
        return Err(Error::invalid("property demos need n >= 4"));
    }
    let f = canonical_facet(n)?;
    let lo_alpha = rat(1, 4);
    let hi_alpha = rat(3, 4);
    let lo = make_f_alpha(&f, &lo_alpha)?;
    let hi = make_f_alpha(&f, &hi_alpha)?;

    // Numerators strictly inside (16/64, 48/64), so endpoints are excluded.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut numerators = BTreeSet::new();
    while numerators.len() < 9 {
        numerators.insert(rng.gen_range(17..=47i64));
    }
    let interior: Vec<Rat> = numerators.into_iter().map(|p| rat(p, 64)).collect();

    let lo_label = format!("F({})", fmt_rat(&lo_alpha));
    let hi_label = format!("F({})", fmt_rat(&hi_alpha));
    let mut witnesses = vec![(lo_label.clone(), lo.clone())];
    let mut claims = Vec::new();
    let mut sampled: Vec<(String, Behavior)> = Vec::new();
    for alpha in &interior {
        let label = format!("F({})", fmt_rat(alpha));
        let b = make_f_alpha(&f, alpha)?;
        claims.push(convertible_claim(
            (hi_label.as_str(), &hi),
            (label.as_str(), &b),
            chain_certificate(&f, &hi_alpha, alpha)?,
            "strictly interior to the interval (F(1/4), F(3/4))",
        )?);
        claims.push(convertible_claim(
            (label.as_str(), &b),
            (lo_label.as_str(), &lo),
            chain_certificate(&f, alpha, &lo_alpha)?,
            "strictly interior to the interval (F(1/4), F(3/4))",
        )?);
        sampled.push((label, b));
    }
    for w in sampled.windows(2) {
        claims.push(higher_claim((w[1].0.as_str(), &w[1].1), (w[0].0.as_str(), &w[0].1))?);
    }
    witnesses.extend(sampled);
    witnesses.push((hi_label, hi));

    Ok(PropertyDemo {
        property: "locally-infinite".into(),
        n,
        witnesses,
        claims,
    })
}

/// Embed a cycle behavior into a larger dichotomic scenario along a
/// verified induced cycle: cycle contexts reproduce `b` and every
/// measurement outside the cycle is independent and uniform.
pub fn embed_cycle_behavior(b: &Behavior, target: &Scenario, cycle: &[usize]) -> Result<Behavior> {
    target.validate()?;
    if !target.is_dichotomic() {
        return Err(Error::invalid("embedding target must be dichotomic"));
    }
    let n = cycle_nd(b)?;
    if cycle.len() != n {
        return Err(Error::invalid(format!(
            "cycle length {} does not match the behavior's n = {}",
            cycle.len(),
            n
        )));
    }
    let m = target.measurements.len();
    let mut seen = vec![false; m];
    for &v in cycle {
        if v >= m {
            return Err(Error::invalid("cycle vertex out of range"));
        }
        if seen[v] {
            return Err(Error::invalid("cycle vertices must be distinct"));
        }
        seen[v] = true;
    }
    let g = compatibility_graph(target);
    for i in 0..n {
        for j in i + 1..n {
            let on_cycle = j == i + 1 || (i == 0 && j == n - 1);
            if g.adjacent(cycle[i], cycle[j]) != on_cycle {
                return Err(Error::invalid(
                    "cycle is not an induced cycle of the target's compatibility graph",
                ));
            }
        }
    }
    let mut pos = vec![None; m];
    for (i, &v) in cycle.iter().enumerate() {
        pos[v] = Some(i);
    }

    let mut tables = Vec::with_capacity(target.contexts.len());
    for ctx in &target.contexts {
        let slots: Vec<(usize, usize)> = ctx
            .iter()
            .enumerate()
            .filter_map(|(slot, &v)| pos[v].map(|p| (slot, p)))
            .collect();
        if slots.len() > 2 {
            return Err(Error::invalid(
                "a context holds more than two cycle measurements",
            ));
        }
        let rest = ctx.len() - slots.len();
        let uniform = rat(1, 1i64 << rest);
        let mut table = Vec::with_capacity(1 << ctx.len());
        for idx in 0..(1 << ctx.len()) {
            let outcomes = decode(idx, ctx.len(), 2);
            let cycle_part = match slots.as_slice() {
                [] => Rat::one(),
                [(slot, p)] => {
                    let sign = int(target.outcome_sign(outcomes[*slot]));
                    (Rat::one() + sign * b.single_marginal(*p)?) / int(2)
                }
                [(s1, p1), (s2, p2)] => {
                    if (p1 + 1) % n == *p2 {
                        b.prob(*p1, &[outcomes[*s1], outcomes[*s2]]).clone()
                    } else if (p2 + 1) % n == *p1 {
                        b.prob(*p2, &[outcomes[*s2], outcomes[*s1]]).clone()
                    } else {
                        return Err(Error::invalid(
                            "cycle measurements in a context are not cycle-adjacent",
                        ));
                    }
                }
                _ => unreachable!("at most two cycle slots"),
            };
            table.push(cycle_part * &uniform);
        }
        tables.push(table);
    }
    Behavior::new(target.clone(), tables)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncycle::{make_maximally_mixed, make_pr};
    use crate::scenario::find_induced_cycles;

    fn pendant_scenario() -> Scenario {
        Scenario {
            measurements: ["X0", "X1", "X2", "X3", "P"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            contexts: vec![vec![0, 1, 4], vec![1, 2], vec![2, 3], vec![3, 0]],
            outcomes: vec!["+1".into(), "-1".into()],
        }
    }

    #[test]
    fn not_total_demo_holds_up() {
        let demo = demo_not_total(4).unwrap();
        assert_eq!(demo.property, "not-total");
        let values: Vec<(Rat, Rat)> = demo
            .witnesses()
            .iter()
            .map(|(_, b)| monotone_values(b).unwrap())
            .collect();
        assert_eq!(values[0], (rat(5, 2), int(4)));
        assert_eq!(values[1], (int(3), int(3)));
        assert_eq!(demo.claims().len(), 4);
        demo.verify().unwrap();
    }

    #[test]
    fn not_total_records_the_rejected_pair() {
        let demo = demo_not_total(4).unwrap();
        let rejected: Vec<&Claim> = demo
            .claims()
            .iter()
            .filter(|c| c.kind == ClaimKind::RejectedWitness)
            .collect();
        assert_eq!(rejected.len(), 1);
        let evidence = &rejected[0].evidence;
        assert_eq!(evidence["candidate_pair"][0], "B(0, 0)");
        assert_eq!(evidence["m_omega"][0], "2");
        assert_eq!(evidence["m_omega"][1], "3");
        assert_eq!(evidence["m_npr"][1], "4");
    }

    #[test]
    fn not_weak_demo_holds_up() {
        let demo = demo_not_weak(4).unwrap();
        let c_values = monotone_values(&demo.witnesses()[2].1).unwrap();
        assert_eq!(c_values, (rat(11, 4), int(3)));
        let explicit = demo
            .claims()
            .iter()
            .find(|c| c.kind == ClaimKind::Convertible)
            .unwrap();
        let components = explicit.evidence["certificate"].as_array().unwrap();
        assert_eq!(components.len(), 2);
        assert_eq!(components[0]["weight"], "1/4");
        assert_eq!(components[1]["weight"], "3/4");
        demo.verify().unwrap();
    }

    #[test]
    fn chain_demo_links_the_default_grid() {
        let demo = demo_chain(4, None).unwrap();
        assert_eq!(demo.witnesses().len(), 5);
        let npr_values: Vec<Rat> = demo
            .witnesses()
            .iter()
            .map(|(_, b)| monotone_values(b).unwrap().1)
            .collect();
        let expect: Vec<Rat> = [4, 5, 6, 7, 8].iter().map(|&k| rat(k, 2)).collect();
        assert_eq!(npr_values, expect);
        assert_eq!(demo.claims().len(), 12);
        demo.verify().unwrap();
    }

    #[test]
    fn chain_demo_rejects_bad_grids() {
        assert!(demo_chain(4, Some(&[rat(1, 2)])).is_err());
        assert!(demo_chain(4, Some(&[rat(1, 2), rat(1, 4)])).is_err());
        assert!(demo_chain(4, Some(&[rat(1, 2), rat(5, 4)])).is_err());
    }

    #[test]
    fn antichain_demo_defaults() {
        let demo = demo_antichain(4, None).unwrap();
        assert_eq!(demo.witnesses().len(), 5);
        let (mo, mn) = monotone_values(&demo.witnesses()[0].1).unwrap();
        assert_eq!(mo, rat(499, 200));
        assert_eq!(mn, rat(31, 10));
        let pair_claims = demo
            .claims()
            .iter()
            .filter(|c| c.kind == ClaimKind::MonotonePair)
            .count();
        assert_eq!(pair_claims, 10);
        let lp_claims = demo
            .claims()
            .iter()
            .filter(|c| c.kind == ClaimKind::NotConvertible)
            .count();
        assert_eq!(lp_claims, 2);
        demo.verify().unwrap();
        assert!(demo_antichain(4, Some(&[rat(1, 2), rat(3, 4)])).is_err());
    }

    #[test]
    fn locally_infinite_demo_is_seeded_and_interior() {
        let demo = demo_locally_infinite(4, 7).unwrap();
        assert_eq!(demo.witnesses().len(), 11);
        let interior = &demo.witnesses()[1..10];
        for (_, b) in interior {
            let (_, mn) = monotone_values(b).unwrap();
            assert!(mn > rat(5, 2) && mn < rat(7, 2));
        }
        assert_eq!(demo.to_json(), demo_locally_infinite(4, 7).unwrap().to_json());
        assert_ne!(demo.to_json(), demo_locally_infinite(4, 8).unwrap().to_json());
        demo.verify().unwrap();
    }

    #[test]
    fn demo_json_shape() {
        let demo = demo_chain(4, Some(&[Rat::zero(), int(1)])).unwrap();
        let doc: Value = serde_json::from_str(&demo.to_json()).unwrap();
        assert_eq!(doc["property"], "chain");
        assert_eq!(doc["n"], 4);
        assert_eq!(doc["witnesses"].as_array().unwrap().len(), 2);
        assert_eq!(doc["witnesses"][0]["m_npr"], "2");
        let claims = doc["claims"].as_array().unwrap();
        assert_eq!(claims.len(), 3);
        for claim in claims {
            assert!(claim["kind"].is_string());
            assert!(claim["evidence"].is_object());
        }
    }

    #[test]
    fn embedding_reproduces_the_cycle_and_uniformizes_the_rest() {
        let target = pendant_scenario();
        let f = canonical_facet(4).unwrap();
        let pr = make_pr(&f).unwrap();
        let embedded = embed_cycle_behavior(&pr, &target, &[0, 1, 2, 3]).unwrap();
        assert!(embedded.is_nondisturbing().unwrap());

        // Context {X0, X1, P}: marginalizing P recovers PR's first table.
        let table = embedded.table(0);
        for (t, expect) in pr.table(0).iter().enumerate() {
            let got = &table[2 * t] + &table[2 * t + 1];
            assert_eq!(&got, expect);
        }
        // P itself is uniform inside that context.
        let p_plus: Rat = (0..4).map(|t| table[2 * t].clone()).sum();
        assert_eq!(p_plus, rat(1, 2));
        // Pure cycle contexts are copied verbatim.
        for ctx in 1..4 {
            assert_eq!(embedded.table(ctx), pr.table(ctx));
        }
    }

    #[test]
    fn embedding_preserves_contextuality_status() {
        let target = pendant_scenario();
        let cycle = [0, 1, 2, 3];
        let f = canonical_facet(4).unwrap();
        for (b, expect_nc) in [
            (make_pr(&f).unwrap(), false),
            (make_maximally_mixed(4).unwrap(), true),
            (make_f_alpha(&f, &rat(1, 2)).unwrap(), false),
            (make_npr(&f).unwrap(), true),
        ] {
            let embedded = embed_cycle_behavior(&b, &target, &cycle).unwrap();
            assert_eq!(b.is_noncontextual().unwrap(), expect_nc);
            assert_eq!(embedded.is_noncontextual().unwrap(), expect_nc);
        }
    }

    #[test]
    fn embedding_rejects_bad_cycles() {
        let target = pendant_scenario();
        let f = canonical_facet(4).unwrap();
        let pr = make_pr(&f).unwrap();
        assert!(embed_cycle_behavior(&pr, &target, &[0, 1, 2]).is_err());
        assert!(embed_cycle_behavior(&pr, &target, &[0, 1, 2, 2]).is_err());
        // Not a cycle of the graph: P is not adjacent to X2 or X3.
        assert!(embed_cycle_behavior(&pr, &target, &[0, 1, 2, 4]).is_err());

        // A chorded square is not induced.
        let chorded = Scenario {
            measurements: ["X0", "X1", "X2", "X3"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            contexts: vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0], vec![0, 2]],
            outcomes: vec!["+1".into(), "-1".into()],
        };
        assert!(embed_cycle_behavior(&pr, &chorded, &[0, 1, 2, 3]).is_err());
        assert!(find_induced_cycles(&compatibility_graph(&chorded), 4).is_empty());
    }

    #[test]
    fn embedded_cycle_is_detected_in_the_target() {
        let target = pendant_scenario();
        let cycles = find_induced_cycles(&compatibility_graph(&target), 4);
        assert_eq!(cycles, vec![vec![0, 1, 2, 3]]);
    }
}
