//! Cost/yield monotones: the generic constructions and the closed forms
//! M_Omega and M_NPR.
//!
//! M_Omega is the yield against the facet functionals: `n - 2` for free
//! behaviors, else the value of the unique violated facet. M_NPR is the cost
//! against the chain `F(alpha) = alpha B_PR + (1 - alpha) B_NPR`: the least
//! `alpha` with `F(alpha) -> B`, in closed form. Writing
//! `c = Omega_k(B) - (n - 2) > 0`, every probability entry imposes
//! `A_e - K_e / alpha >= 0` with
//! `A_e = p_B - (c/2) p_PR + (c/2) p_NPR` and `K_e = (c/2) p_NPR`, so the
//! optimum is the largest lower bound, `alpha* = max(c/2, max_e K_e / A_e)`,
//! and `M_NPR = n - 2 + 2 alpha*`. `cross_check_m_npr` re-derives the value
//! through the LP oracle and the boundary-saturation argument.

use num_traits::{One, Signed, Zero};
use serde_json::json;

use crate::behavior::Behavior;
use crate::convert::{can_convert, cycle_nd};
use crate::ncycle::{make_f_alpha, make_npr, make_pr, max_omega, OmegaFunctional};
use crate::rat::{fmt_rat, int, Rat};
use crate::Result;

/// A rational extended with infinities, for unreachable costs/yields.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtendedRat {
    Finite(Rat),
    PlusInfinity,
    MinusInfinity,
}

impl ExtendedRat {
    pub fn finite(&self) -> Option<&Rat> {
        match self {
            ExtendedRat::Finite(r) => Some(r),
            _ => None,
        }
    }

    pub fn render(&self) -> String {
        match self {
            ExtendedRat::Finite(r) => fmt_rat(r),
            ExtendedRat::PlusInfinity => "+inf".into(),
            ExtendedRat::MinusInfinity => "-inf".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneValue {
    pub value: ExtendedRat,
    /// Index of the violated facet, for contextual inputs.
    pub facet_k: Option<usize>,
    pub method: Method,
}

impl MonotoneValue {
    fn closed_form(value: Rat, facet_k: Option<usize>) -> Self {
        MonotoneValue {
            value: ExtendedRat::Finite(value),
            facet_k,
            method: Method::ClosedForm,
        }
    }

    pub fn finite(&self) -> Option<&Rat> {
        self.value.finite()
    }

    /// Report document, e.g. for the CLI:
    /// `{"monotone": ..., "value": "p/q"|"+inf", "facet_k": ..., "method": ...}`.
    pub fn report_json(&self, monotone: &str) -> String {
        let doc = json!({
            "monotone": monotone,
            "value": self.value.render(),
            "facet_k": self.facet_k,
            "method": match self.method {
                Method::ClosedForm => "closed_form",
                Method::Oracle => "oracle",
            },
        });
        serde_json::to_string_pretty(&doc).expect("report serializes")
    }
}

/// The violated facet and the violation `c = Omega - (n-2)`, if any.
fn violation(b: &Behavior) -> Result<Option<(OmegaFunctional, Rat)>> {
    let n = cycle_nd(b)?;
    let (f, v) = max_omega(b)?;
    let bound = int(n as i64 - 2);
    if v <= bound {
        Ok(None)
    } else {
        Ok(Some((f, v - bound)))
    }
}

/// `M_Omega`: `n - 2` for free behaviors, else the violated facet's value.
pub fn m_omega(b: &Behavior) -> Result<MonotoneValue> {
    let n = cycle_nd(b)?;
    let bound = int(n as i64 - 2);
    Ok(match violation(b)? {
        None => MonotoneValue::closed_form(bound, None),
        Some((f, c)) => MonotoneValue::closed_form(bound + c, Some(f.index())),
    })
}

/// `M_NPR`: the cost against the `F(alpha)` chain, in closed form.
pub fn m_npr(b: &Behavior) -> Result<MonotoneValue> {
    let n = cycle_nd(b)?;
    let bound = int(n as i64 - 2);
    let (f, c) = match violation(b)? {
        None => return Ok(MonotoneValue::closed_form(bound, None)),
        Some(v) => v,
    };
    let k = f.index();
    match alpha_star(b, &f, &c)? {
        Some(alpha) => Ok(MonotoneValue::closed_form(bound + int(2) * alpha, Some(k))),
        None => Ok(MonotoneValue {
            value: ExtendedRat::PlusInfinity,
            facet_k: Some(k),
            method: Method::ClosedForm,
        }),
    }
}

/// The least feasible `alpha`, or `None` when the chain cannot reach `b`
/// (kept for robustness; positivity makes every ND violation reachable).
fn alpha_star(b: &Behavior, f: &OmegaFunctional, c: &Rat) -> Result<Option<Rat>> {
    let pr = make_pr(f)?;
    let npr = make_npr(f)?;
    let half_c = c / int(2);
    let mut alpha = half_c.clone();
    for ctx in 0..f.n() {
        for t in 0..4 {
            let k_e = &half_c * &npr.table(ctx)[t];
            let a_e = &b.table(ctx)[t] - &half_c * &pr.table(ctx)[t] + &k_e;
            if a_e <= Rat::zero() {
                if k_e.is_zero() && a_e.is_zero() {
                    continue;
                }
                return Ok(None);
            }
            let ratio = k_e / a_e;
            if ratio > alpha {
                alpha = ratio;
            }
        }
    }
    if alpha > Rat::one() {
        return Ok(None);
    }
    Ok(Some(alpha))
}

/// `Y_(S|f)(b) = max { f(s) : s in S, b -> s }`; `-inf` over an empty set.
pub fn generic_yield(
    b: &Behavior,
    candidates: &[Behavior],
    f: &dyn Fn(&Behavior) -> Result<Rat>,
) -> Result<MonotoneValue> {
    let mut best: Option<Rat> = None;
    for cand in candidates {
        if can_convert(b, cand)?.is_convertible() {
            let v = f(cand)?;
            if best.as_ref().map_or(true, |b| &v > b) {
                best = Some(v);
            }
        }
    }
    Ok(MonotoneValue {
        value: best.map_or(ExtendedRat::MinusInfinity, ExtendedRat::Finite),
        facet_k: None,
        method: Method::Oracle,
    })
}

/// `C_(S|f)(b) = min { f(s) : s in S, s -> b }`; `+inf` over an empty set.
pub fn generic_cost(
    b: &Behavior,
    candidates: &[Behavior],
    f: &dyn Fn(&Behavior) -> Result<Rat>,
) -> Result<MonotoneValue> {
    let mut best: Option<Rat> = None;
    for cand in candidates {
        if can_convert(cand, b)?.is_convertible() {
            let v = f(cand)?;
            if best.as_ref().map_or(true, |b| &v < b) {
                best = Some(v);
            }
        }
    }
    Ok(MonotoneValue {
        value: best.map_or(ExtendedRat::PlusInfinity, ExtendedRat::Finite),
        facet_k: None,
        method: Method::Oracle,
    })
}

/// Independent re-derivation of `M_NPR` through the conversion oracle and
/// the boundary-saturation argument.
#[derive(Debug, Clone)]
pub struct NprCrossCheck {
    pub value: MonotoneValue,
    pub alpha_star: Option<Rat>,
    /// `F(alpha*) -> b` per the LP oracle (expected convertible).
    pub forward_convertible: Option<bool>,
    /// `F(alpha* - delta) -/-> b` per the LP oracle (expected refuted);
    /// `None` when `alpha* - delta < 0`.
    pub perturbed_refuted: Option<bool>,
    /// The extracted boundary component has a zero entry and
    /// `Omega = n - 2` (or, when `gamma = 0`, `b = F(alpha*)` exactly).
    pub boundary_saturated: Option<bool>,
    pub consistent: bool,
}

impl NprCrossCheck {
    pub fn to_json(&self) -> String {
        let doc = json!({
            "value": self.value.value.render(),
            "alpha_star": self.alpha_star.as_ref().map(fmt_rat),
            "forward_convertible": self.forward_convertible,
            "perturbed_refuted": self.perturbed_refuted,
            "boundary_saturated": self.boundary_saturated,
            "consistent": self.consistent,
        });
        serde_json::to_string_pretty(&doc).expect("report serializes")
    }
}

/// Cross-check `m_npr(b)` for contextual `b`: the chain point `F(alpha*)`
/// converts to `b`, the perturbed point `F(alpha* - delta)` does not
/// (default `delta = 1/100`), and the extracted boundary component
/// saturates positivity with `Omega = n - 2`.
pub fn cross_check_m_npr(b: &Behavior, delta: Option<&Rat>) -> Result<NprCrossCheck> {
    let n = cycle_nd(b)?;
    let bound = int(n as i64 - 2);
    let value = m_npr(b)?;
    let (f, c) = match violation(b)? {
        None => {
            return Ok(NprCrossCheck {
                value,
                alpha_star: None,
                forward_convertible: None,
                perturbed_refuted: None,
                boundary_saturated: None,
                consistent: true,
            })
        }
        Some(v) => v,
    };
    let alpha = match value.finite() {
        Some(v) => (v - &bound) / int(2),
        None => {
            return Ok(NprCrossCheck {
                value,
                alpha_star: None,
                forward_convertible: None,
                perturbed_refuted: None,
                boundary_saturated: None,
                consistent: false,
            })
        }
    };

    let chain_point = make_f_alpha(&f, &alpha)?;
    let forward = can_convert(&chain_point, b)?.is_convertible();

    let default_delta = crate::rat::rat(1, 100);
    let delta = delta.unwrap_or(&default_delta);
    let perturbed = &alpha - delta;
    let perturbed_refuted = if perturbed >= Rat::zero() {
        Some(!can_convert(&make_f_alpha(&f, &perturbed)?, b)?.is_convertible())
    } else {
        None
    };

    // gamma = 1 - c / (2 alpha); gamma = 0 means b sits on the chain itself.
    let gamma = Rat::one() - &c / (int(2) * &alpha);
    let boundary = if gamma.is_zero() {
        b == &chain_point
    } else {
        let tables: Vec<Vec<Rat>> = (0..n)
            .map(|ctx| {
                (0..4)
                    .map(|t| {
                        (&b.table(ctx)[t] - (Rat::one() - &gamma) * &chain_point.table(ctx)[t])
                            / &gamma
                    })
                    .collect()
            })
            .collect();
        let nonneg = tables.iter().flatten().all(|p| !p.is_negative());
        let has_zero = tables.iter().flatten().any(|p| p.is_zero());
        nonneg && has_zero && {
            let tilde = Behavior::with_scenario(b.scenario_arc(), tables)?;
            f.value(&tilde)? == bound
        }
    };

    let consistent = forward && perturbed_refuted.unwrap_or(true) && boundary;
    Ok(NprCrossCheck {
        value,
        alpha_star: Some(alpha),
        forward_convertible: Some(forward),
        perturbed_refuted,
        boundary_saturated: Some(boundary),
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::deterministic_behavior;
    use crate::convert::images;
    use crate::ncycle::{
        enumerate_facets, make_b_alpha_gamma, make_maximally_mixed, omega_value,
    };
    use crate::rat::rat;
    use crate::scenario::make_cycle_scenario;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn facet() -> OmegaFunctional {
        OmegaFunctional::new(vec![-1, 1, 1, 1]).unwrap()
    }

    fn random_nd_behavior(rng: &mut ChaCha8Rng, n: usize) -> Behavior {
        crate::sample::random_nd_behavior(rng, n).unwrap()
    }

    #[test]
    fn closed_forms_on_the_named_boxes() {
        let f = facet();
        let pr = make_pr(&f).unwrap();
        assert_eq!(m_omega(&pr).unwrap().finite(), Some(&int(4)));
        assert_eq!(m_npr(&pr).unwrap().finite(), Some(&int(4)));
        assert_eq!(m_omega(&pr).unwrap().facet_k, Some(f.index()));

        for free in [
            make_npr(&f).unwrap(),
            make_maximally_mixed(4).unwrap(),
            deterministic_behavior(&make_cycle_scenario(4).unwrap(), &[0, 1, 1, 0]).unwrap(),
        ] {
            assert_eq!(m_omega(&free).unwrap().finite(), Some(&int(2)));
            assert_eq!(m_npr(&free).unwrap().finite(), Some(&int(2)));
            assert_eq!(m_omega(&free).unwrap().facet_k, None);
        }
    }

    #[test]
    fn closed_forms_on_the_two_parameter_family() {
        let f = facet();
        // M_Omega = n - 2 + 2 alpha (1 - gamma); M_NPR = n + 2 (alpha - 1).
        let a = make_b_alpha_gamma(&f, &int(1), &rat(3, 4)).unwrap();
        assert_eq!(m_omega(&a).unwrap().finite(), Some(&rat(5, 2)));
        assert_eq!(m_npr(&a).unwrap().finite(), Some(&int(4)));
        let b = make_b_alpha_gamma(&f, &rat(1, 2), &rat(1, 4)).unwrap();
        assert_eq!(m_omega(&b).unwrap().finite(), Some(&rat(11, 4)));
        assert_eq!(m_npr(&b).unwrap().finite(), Some(&int(3)));
        // M_NPR does not see gamma.
        for gamma in [rat(0, 1), rat(1, 4), rat(1, 2), rat(3, 4)] {
            let b = make_b_alpha_gamma(&f, &rat(1, 2), &gamma).unwrap();
            assert_eq!(m_npr(&b).unwrap().finite(), Some(&int(3)), "gamma = {gamma}");
        }
        // F(alpha) sits on the chain: M_NPR = Omega.
        for alpha in [rat(1, 4), rat(1, 2), int(1)] {
            let fa = make_f_alpha(&f, &alpha).unwrap();
            let expect = int(2) + int(2) * &alpha;
            assert_eq!(m_npr(&fa).unwrap().finite(), Some(&expect));
            assert_eq!(m_omega(&fa).unwrap().finite(), Some(&expect));
        }
    }

    #[test]
    fn facet_index_follows_the_violator() {
        for (k, f) in enumerate_facets(4).unwrap().iter().enumerate() {
            let pr = make_pr(f).unwrap();
            assert_eq!(m_omega(&pr).unwrap().facet_k, Some(k));
            assert_eq!(m_npr(&pr).unwrap().facet_k, Some(k));
        }
    }

    #[test]
    fn sandwich_between_classical_and_algebraic() {
        let f = facet();
        for ai in 0..=4 {
            for gi in 0..4 {
                let b = make_b_alpha_gamma(&f, &rat(ai, 4), &rat(gi, 4)).unwrap();
                let lo = int(2);
                let hi = int(4);
                let mo = m_omega(&b).unwrap().finite().unwrap().clone();
                let mn = m_npr(&b).unwrap().finite().unwrap().clone();
                assert!(lo <= mo && mo <= mn && mn <= hi, "alpha {ai}/4 gamma {gi}/4");
            }
        }
    }

    #[test]
    fn facet_test_matches_the_lp_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let b = random_nd_behavior(&mut rng, 4);
            let free_by_facets = m_omega(&b).unwrap().facet_k.is_none();
            assert_eq!(free_by_facets, b.is_noncontextual().unwrap());
        }
    }

    #[test]
    fn monotones_never_increase_under_mixtures() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..20 {
            let b = random_nd_behavior(&mut rng, 4);
            let m = crate::sample::random_wiring_mixture(&mut rng, 4, 4).unwrap();
            let image = m.apply(&b).unwrap();
            let (mo, mo_img) = (m_omega(&b).unwrap(), m_omega(&image).unwrap());
            assert!(mo_img.finite().unwrap() <= mo.finite().unwrap());
            let (mn, mn_img) = (m_npr(&b).unwrap(), m_npr(&image).unwrap());
            assert!(mn_img.finite().unwrap() <= mn.finite().unwrap());
        }
    }

    #[test]
    fn m_omega_equals_the_yield_over_images() {
        let f = facet();
        for b in [
            make_f_alpha(&f, &rat(1, 2)).unwrap(),
            make_b_alpha_gamma(&f, &rat(3, 4), &rat(1, 2)).unwrap(),
        ] {
            let best = images(&b)
                .unwrap()
                .iter()
                .map(|(_, img)| max_omega(img).unwrap().1)
                .max()
                .unwrap();
            assert_eq!(m_omega(&b).unwrap().finite(), Some(&best));
        }
    }

    #[test]
    fn generic_constructions_degenerate_and_empty() {
        let f = facet();
        let b = make_f_alpha(&f, &rat(1, 2)).unwrap();
        let omega = |x: &Behavior| omega_value(&f, x);
        let y = generic_yield(&b, std::slice::from_ref(&b), &omega).unwrap();
        assert_eq!(y.finite(), Some(&int(3)));
        let c = generic_cost(&b, std::slice::from_ref(&b), &omega).unwrap();
        assert_eq!(c.finite(), Some(&int(3)));
        assert_eq!(generic_yield(&b, &[], &omega).unwrap().value, ExtendedRat::MinusInfinity);
        assert_eq!(generic_cost(&b, &[], &omega).unwrap().value, ExtendedRat::PlusInfinity);
    }

    #[test]
    fn generic_cost_over_the_chain_grid_matches_m_npr() {
        let f = facet();
        let b = make_b_alpha_gamma(&f, &rat(1, 2), &rat(1, 4)).unwrap();
        let grid: Vec<Behavior> = (0..=10)
            .map(|k| make_f_alpha(&f, &rat(k, 10)).unwrap())
            .collect();
        let npr_value = |x: &Behavior| Ok(m_npr(x)?.finite().expect("chain points").clone());
        let cost = generic_cost(&b, &grid, &npr_value).unwrap();
        assert_eq!(cost.finite(), m_npr(&b).unwrap().finite());
    }

    #[test]
    fn cross_check_on_family_and_chain_points() {
        let f = facet();
        let b = make_b_alpha_gamma(&f, &rat(1, 2), &rat(1, 4)).unwrap();
        let report = cross_check_m_npr(&b, None).unwrap();
        assert_eq!(report.alpha_star, Some(rat(1, 2)));
        assert_eq!(report.forward_convertible, Some(true));
        assert_eq!(report.perturbed_refuted, Some(true));
        assert_eq!(report.boundary_saturated, Some(true));
        assert!(report.consistent);

        let chain = make_f_alpha(&f, &rat(3, 4)).unwrap();
        let report = cross_check_m_npr(&chain, None).unwrap();
        assert_eq!(report.alpha_star, Some(rat(3, 4)));
        assert!(report.consistent);

        let pr = make_pr(&f).unwrap();
        let report = cross_check_m_npr(&pr, None).unwrap();
        assert_eq!(report.alpha_star, Some(int(1)));
        assert!(report.consistent);

        let free = make_maximally_mixed(4).unwrap();
        assert!(cross_check_m_npr(&free, None).unwrap().consistent);
    }

    #[test]
    fn report_json_shape() {
        let f = facet();
        let report = m_npr(&make_pr(&f).unwrap()).unwrap().report_json("M_NPR");
        let doc: serde_json::Value = serde_json::from_str(&report).unwrap();
        assert_eq!(doc["monotone"], "M_NPR");
        assert_eq!(doc["value"], "4");
        assert_eq!(doc["facet_k"], 3);
        assert_eq!(doc["method"], "closed_form");
    }
}
