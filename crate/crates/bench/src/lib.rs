//! Shared fixtures for the criterion benches in `benches/`.

use ncwire::rat::{rat, Rat};
use ncwire::{make_b_alpha_gamma, make_f_alpha, Behavior, OmegaFunctional};

/// The facet `(-1, 1, ..., 1)` every fixture is built on.
pub fn canonical_facet(n: usize) -> OmegaFunctional {
    let mut signs = vec![1i8; n];
    signs[0] = -1;
    OmegaFunctional::new(signs).expect("valid facet")
}

/// A generic two-parameter box with nontrivial marginals.
pub fn generic_box(n: usize) -> Behavior {
    make_b_alpha_gamma(&canonical_facet(n), &rat(3, 4), &rat(1, 2)).expect("valid box")
}

/// A convertible pair along the `F(alpha)` chain.
pub fn chain_pair(n: usize) -> (Behavior, Behavior) {
    let f = canonical_facet(n);
    let hi = make_f_alpha(&f, &rat(1, 2)).expect("valid chain point");
    let lo = make_f_alpha(&f, &rat(1, 4)).expect("valid chain point");
    (hi, lo)
}

/// An incomparable pair whose refutation exercises the full LP.
pub fn refuted_pair(n: usize) -> (Behavior, Behavior) {
    let f = canonical_facet(n);
    let a = make_b_alpha_gamma(&f, &Rat::new(1.into(), 1.into()), &rat(3, 4)).expect("valid box");
    let b = make_b_alpha_gamma(&f, &rat(1, 2), &Rat::new(0.into(), 1.into())).expect("valid box");
    (a, b)
}
