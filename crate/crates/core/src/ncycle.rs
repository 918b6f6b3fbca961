//! The n-cycle scenario: noncontextuality facets, bounds, special boxes.
//!
//! For dichotomic measurements `X_0..X_{n-1}` with contexts `{X_i, X_{i+1}}`,
//! the noncontextual polytope is cut out by positivity together with the
//! `2^(n-1)` correlator inequalities
//!
//! ```text
//! Omega_k(B) = sum_i gamma_i <X_i X_{i+1}>  <=  n - 2,
//! ```
//!
//! one for each sign vector `gamma` with an odd number of `-1` entries. A
//! non-disturbing behavior violates at most one of them, and by at most 2.
//! `bounds` reports the classical bound `n - 2`, the algebraic maximum `n`,
//! and the quantum (Tsirelson) bound as a high-precision rational
//! approximation: `n cos(pi/n)` for even n and
//! `(3n cos(pi/n) - n) / (1 + cos(pi/n))` for odd n.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::behavior::{deterministic_behavior, Behavior};
use crate::rat::{decimal_str, fmt_rat, int, rat, Rat};
use crate::scenario::make_cycle_scenario;
use crate::{Error, Result};

/// Facet enumeration cap: `2^(n-1)` functionals get out of hand quickly.
pub const FACET_ENUMERATION_CAP: usize = 24;

/// One facet functional `Omega_k`: signs `gamma_i`, odd count of `-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaFunctional {
    n: usize,
    signs: Vec<i8>,
}

impl OmegaFunctional {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        let n = signs.len();
        if n < 3 {
            return Err(Error::invalid("facet needs n >= 3 signs"));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::invalid("facet signs must be +1 or -1"));
        }
        if signs.iter().filter(|&&s| s == -1).count() % 2 == 0 {
            return Err(Error::invalid("facet needs an odd number of -1 signs"));
        }
        Ok(OmegaFunctional { n, signs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// Rank of this functional in the lexicographic enumeration of
    /// `enumerate_facets` (`-1` sorts before `+1`).
    pub fn index(&self) -> usize {
        // Standard rank-in-ordered-subset count: for every position holding
        // +1, count the admissible completions that put -1 there instead.
        let mut rank = 0usize;
        let mut minus_so_far = 0usize;
        for (i, &s) in self.signs.iter().enumerate() {
            if s == 1 {
                let free = self.n - i - 1;
                if free == 0 {
                    if (minus_so_far + 1) % 2 == 1 {
                        rank += 1;
                    }
                } else {
                    rank += 1 << (free - 1);
                }
            } else {
                minus_so_far += 1;
            }
        }
        rank
    }

    /// `n - 2`, the noncontextual bound of every facet.
    pub fn classical_bound(&self) -> Rat {
        int(self.n as i64 - 2)
    }

    /// `Omega_k(b)`; `b` must live on the canonical n-cycle with matching n.
    pub fn value(&self, b: &Behavior) -> Result<Rat> {
        let n = b
            .scenario()
            .cycle_n()
            .ok_or_else(|| Error::invalid("behavior is not on the canonical cycle scenario"))?;
        if n != self.n {
            return Err(Error::invalid(format!(
                "facet is for n = {}, behavior has n = {n}",
                self.n
            )));
        }
        let (_, corrs) = b.to_correlations()?;
        Ok(self
            .signs
            .iter()
            .zip(&corrs)
            .map(|(&s, c)| c * int(s as i64))
            .sum())
    }
}

/// All `2^(n-1)` facets in lexicographic sign order.
pub fn enumerate_facets(n: usize) -> Result<Vec<OmegaFunctional>> {
    if n < 3 {
        return Err(Error::invalid("facets need n >= 3"));
    }
    if n > FACET_ENUMERATION_CAP {
        return Err(Error::capacity(format!(
            "facet enumeration capped at n <= {FACET_ENUMERATION_CAP}"
        )));
    }
    let mut out = Vec::with_capacity(1 << (n - 1));
    for mask in 0u64..(1 << n) {
        let signs: Vec<i8> = (0..n)
            .map(|i| if mask >> (n - 1 - i) & 1 == 1 { 1 } else { -1 })
            .collect();
        if signs.iter().filter(|&&s| s == -1).count() % 2 == 1 {
            out.push(OmegaFunctional { n, signs });
        }
    }
    Ok(out)
}

/// Alias for [`OmegaFunctional::value`] in operation form.
pub fn omega_value(f: &OmegaFunctional, b: &Behavior) -> Result<Rat> {
    f.value(b)
}

/// The facet maximizing `Omega_k(b)` and its value, computed in O(n) from
/// the correlators: take `gamma_i = sign(c_i)`, then if the minus count is
/// even flip the coordinate of smallest `|c_i|` (lowest index on ties).
pub fn max_omega(b: &Behavior) -> Result<(OmegaFunctional, Rat)> {
    let n = b
        .scenario()
        .cycle_n()
        .ok_or_else(|| Error::invalid("behavior is not on the canonical cycle scenario"))?;
    let (_, corrs) = b.to_correlations()?;
    let mut signs: Vec<i8> = corrs.iter().map(|c| if c.is_negative() { -1 } else { 1 }).collect();
    if signs.iter().filter(|&&s| s == -1).count() % 2 == 0 {
        let flip = (0..n)
            .min_by(|&a, &b| corrs[a].abs().cmp(&corrs[b].abs()))
            .expect("n >= 3");
        signs[flip] = -signs[flip];
    }
    let f = OmegaFunctional { n, signs };
    let v = f.value(b)?;
    Ok((f, v))
}

/// The four quantities `4 p(a,b)` per context, reconstructed from the
/// expectation identities; all must be nonnegative for a valid behavior.
pub fn positivity_residuals(b: &Behavior) -> Result<Vec<[Rat; 4]>> {
    let n = b
        .scenario()
        .cycle_n()
        .ok_or_else(|| Error::invalid("behavior is not on the canonical cycle scenario"))?;
    let (singles, corrs) = b.to_correlations()?;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let (mi, mj, c) = (&singles[i], &singles[(i + 1) % n], &corrs[i]);
        out.push([
            int(1) + mi + mj + c,
            int(1) + mi - mj - c,
            int(1) - mi + mj - c,
            int(1) - mi - mj + c,
        ]);
    }
    Ok(out)
}

/// Classical, quantum and algebraic bounds for the facet inequalities at n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleBounds {
    pub n: usize,
    /// `n - 2`, exact.
    pub classical: Rat,
    /// Tsirelson bound as a rational approximation; see `quantum_error`.
    pub quantum: Rat,
    /// Absolute error bound on `quantum` (`10^-60`).
    pub quantum_error: Rat,
    /// `n`, exact.
    pub algebraic_max: Rat,
}

impl CycleBounds {
    pub fn quantum_f64(&self) -> f64 {
        crate::rat::to_f64(&self.quantum)
    }
}

pub fn bounds(n: usize) -> Result<CycleBounds> {
    if n < 4 {
        return Err(Error::invalid("bounds are reported for n >= 4"));
    }
    let c = cos_pi_over(n);
    let nr = int(n as i64);
    let quantum = if n % 2 == 0 {
        &nr * &c
    } else {
        (int(3) * &nr * &c - &nr) / (int(1) + &c)
    };
    Ok(CycleBounds {
        n,
        classical: int(n as i64 - 2),
        quantum,
        quantum_error: Rat::new(BigInt::one(), BigInt::from(10u32).pow(60)),
        algebraic_max: nr,
    })
}

/// CSV table of bounds, one row per n; the quantum column carries 12
/// significant digits.
pub fn bounds_csv(n_min: usize, n_max: usize) -> Result<String> {
    if n_min > n_max {
        return Err(Error::invalid("empty bounds range"));
    }
    let mut out = String::from("n,classical,quantum,algebraic_max\n");
    for n in n_min..=n_max {
        let b = bounds(n)?;
        out.push_str(&format!(
            "{},{},{},{}\n",
            n,
            fmt_rat(&b.classical),
            decimal_str(&b.quantum, 12),
            fmt_rat(&b.algebraic_max)
        ));
    }
    Ok(out)
}

/// 70 decimal digits of pi.
const PI_DIGITS: &str =
    "3.1415926535897932384626433832795028841971693993751058209749445923078164";

/// Nearest grid point `m / grid` to `v`; the error is at most `1 / (2 grid)`.
fn round_to_grid(v: Rat, grid: &BigInt) -> Rat {
    let scaled = v * Rat::from_integer(grid.clone()) + rat(1, 2);
    Rat::new(scaled.floor().to_integer(), grid.clone())
}

/// `cos(pi/n)` to within `10^-65`, by alternating Taylor series in exact
/// rational arithmetic. Every term is rounded onto a `10^-80` grid, which
/// caps the digit growth the exact products would otherwise compound; with
/// under a hundred terms the accumulated rounding stays far below the final
/// `10^-65` grid the sum is returned on.
fn cos_pi_over(n: usize) -> Rat {
    let pi = crate::rat::parse_rat(PI_DIGITS).expect("pi literal parses");
    let x = pi / int(n as i64);
    let fine = BigInt::from(10u32).pow(80);
    let x2 = round_to_grid(&x * &x, &fine);
    let eps = Rat::new(BigInt::one(), fine.clone());
    let mut term = Rat::one();
    let mut sum = Rat::one();
    let mut k: i64 = 0;
    while term.abs() >= eps {
        term = round_to_grid(-(term * &x2) / int((2 * k + 1) * (2 * k + 2)), &fine);
        sum += &term;
        k += 1;
    }
    round_to_grid(sum, &BigInt::from(10u32).pow(65))
}

/// The PR-like box of facet `f`: zero marginals and correlators equal to the
/// facet signs, attaining the algebraic maximum `Omega_f = n`.
pub fn make_pr(f: &OmegaFunctional) -> Result<Behavior> {
    let zeros = vec![Rat::zero(); f.n];
    let corrs: Vec<Rat> = f.signs.iter().map(|&s| int(s as i64)).collect();
    Behavior::from_correlations(f.n, &zeros, &corrs)
}

/// The maximally mixed box: every entry `1/4`.
pub fn make_maximally_mixed(n: usize) -> Result<Behavior> {
    let zeros = vec![Rat::zero(); n];
    Behavior::from_correlations(n, &zeros, &zeros)
}

/// `B_NPR = ((n-2)/n) B_PR + (2/n) B_mixed`, on the noncontextual boundary
/// of facet `f` with `Omega_f = n - 2`.
pub fn make_npr(f: &OmegaFunctional) -> Result<Behavior> {
    let n = f.n as i64;
    make_pr(f)?.mix(&make_maximally_mixed(f.n)?, &rat(n - 2, n))
}

/// `F(alpha) = alpha B_PR + (1 - alpha) B_NPR`, with
/// `Omega_f = n + 2(alpha - 1)`.
pub fn make_f_alpha(f: &OmegaFunctional, alpha: &Rat) -> Result<Behavior> {
    if alpha < &Rat::zero() || alpha > &int(1) {
        return Err(Error::invalid(format!(
            "alpha = {} outside [0, 1]",
            fmt_rat(alpha)
        )));
    }
    make_pr(f)?.mix(&make_npr(f)?, alpha)
}

/// The outcome assignment of `B*_bb` for facet `f`: the global assignment
/// maximizing `Omega_f` (value `n - 2`), tie-broken toward `+1` outcomes in
/// lexicographic order. Index 0 means outcome `+1`, index 1 means `-1`.
pub fn canonical_bbb_assignment(f: &OmegaFunctional) -> Vec<usize> {
    let n = f.n;
    let mut best: Option<(i64, u64)> = None;
    for mask in 0u64..(1 << n) {
        let lam = |i: usize| -> i64 {
            if mask >> (n - 1 - i) & 1 == 1 {
                -1
            } else {
                1
            }
        };
        let v: i64 = (0..n)
            .map(|i| f.signs[i] as i64 * lam(i) * lam((i + 1) % n))
            .sum();
        if best.as_ref().map_or(true, |&(bv, _)| v > bv) {
            best = Some((v, mask));
        }
    }
    let (v, mask) = best.expect("nonempty enumeration");
    debug_assert_eq!(v, n as i64 - 2);
    (0..n)
        .map(|i| if mask >> (n - 1 - i) & 1 == 1 { 1 } else { 0 })
        .collect()
}

/// The deterministic box maximizing `Omega_f` among global assignments
/// (value `n - 2`), tie-broken toward `+1` outcomes in lexicographic order.
pub fn canonical_bbb(f: &OmegaFunctional) -> Result<Behavior> {
    let assignment = canonical_bbb_assignment(f);
    deterministic_behavior(&make_cycle_scenario(f.n)?, &assignment)
}

/// `B(alpha, gamma) = gamma B*_bb + (1 - gamma) F(alpha)`.
pub fn make_b_alpha_gamma(f: &OmegaFunctional, alpha: &Rat, gamma: &Rat) -> Result<Behavior> {
    if gamma < &Rat::zero() || gamma > &int(1) {
        return Err(Error::invalid(format!(
            "gamma = {} outside [0, 1]",
            fmt_rat(gamma)
        )));
    }
    canonical_bbb(f)?.mix(&make_f_alpha(f, alpha)?, gamma)
}
