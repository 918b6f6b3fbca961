//! Resource theory of contextuality on cycle compatibility scenarios.
//!
//! The crate models behaviors (families of context-wise outcome
//! distributions) over compatibility scenarios, with the n-cycle scenarios
//! as the worked-out case: every measurement is dichotomic and the contexts
//! are the adjacent pairs `{X_i, X_{i+1 mod n}}`. On top of that sit
//!
//! - the noncontextuality facets `Omega_k` of the n-cycle polytope,
//!   together with classical, quantum and algebraic bounds,
//! - deterministic wirings (free operations): a cycle homomorphism routing
//!   new measurements to old ones plus per-measurement outcome relabelings,
//! - an exact-rational LP oracle deciding convertibility between behaviors
//!   under mixtures of deterministic wirings,
//! - closed-form monotones `M_Omega` and `M_NPR` that order behaviors
//!   without solving programs, cross-checkable against the LP oracle,
//! - demonstrations of global order properties of the induced pre-order
//!   (failure of totality and weakness, infinite chains and antichains).
//!
//! All probabilities are arbitrary-precision rationals and every verdict is
//! exact; floating point appears only in informational bounds output.

mod error;

pub mod behavior;
pub mod convert;
pub mod lp;
pub mod monotone;
pub mod ncycle;
pub mod preorder;
pub mod rat;
pub mod sample;
pub mod scenario;
pub mod wiring;

pub use behavior::{deterministic_behavior, Behavior, GlobalSection, NdViolation};
pub use convert::{
    can_convert, classify, images, screened_convert, ConversionCertificate, PairClassification,
    Relation, Verdict,
};
pub use error::{Error, Result};
pub use lp::{LinearProgram, LpOutcome, LpStatus};
pub use monotone::{
    cross_check_m_npr, generic_cost, generic_yield, m_npr, m_omega, ExtendedRat, Method,
    MonotoneValue, NprCrossCheck,
};
pub use ncycle::{
    bounds, bounds_csv, canonical_bbb, enumerate_facets, make_b_alpha_gamma, make_f_alpha,
    make_maximally_mixed, make_npr, make_pr, max_omega, omega_value, positivity_residuals,
    CycleBounds, OmegaFunctional,
};
pub use preorder::{
    demo_antichain, demo_chain, demo_locally_infinite, demo_not_total, demo_not_weak,
    embed_cycle_behavior, Claim, ClaimKind, PropertyDemo,
};
pub use rat::Rat;
pub use scenario::{
    admits_quantum_contextuality, compatibility_graph, find_induced_cycles, make_cycle_scenario,
    CompatibilityGraph, Scenario,
};
pub use wiring::{
    apply_mixture, decompose_in_polytope, enumerate_deterministic, enumerate_symmetries,
    DeterministicWiring, OutcomeMap, WiringChannel, WiringMixture,
};
