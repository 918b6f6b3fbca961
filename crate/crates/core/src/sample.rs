//! Seeded random generators over the objects of the theory, used by tests
//! and stress suites. Everything is exact-rational and reproducible from an
//! `Rng` the caller seeds.

use rand::Rng;

use crate::behavior::{deterministic_behavior, Behavior};
use crate::rat::{int, rat, Rat};
use crate::scenario::make_cycle_scenario;
use crate::wiring::{enumerate_deterministic, WiringMixture};
use crate::Result;

use num_traits::{Signed, Zero};

/// A random non-disturbing cycle behavior: marginals on an eighth grid,
/// correlators interpolated across their positivity window on a sixteenth
/// grid.
pub fn random_nd_behavior<R: Rng>(rng: &mut R, n: usize) -> Result<Behavior> {
    let singles: Vec<Rat> = (0..n).map(|_| rat(rng.gen_range(-6..=6), 8)).collect();
    let corrs: Vec<Rat> = (0..n)
        .map(|i| {
            let (a, b) = (&singles[i], &singles[(i + 1) % n]);
            let lo = (a + b).abs() - int(1);
            let hi = int(1) - (a - b).abs();
            let t = rat(rng.gen_range(0..=16), 16);
            &lo + (hi - &lo) * t
        })
        .collect();
    Behavior::from_correlations(n, &singles, &corrs)
}

/// A random noncontextual cycle behavior: a convex mixture of up to four
/// deterministic global assignments.
pub fn random_nc_behavior<R: Rng>(rng: &mut R, n: usize) -> Result<Behavior> {
    let scenario = make_cycle_scenario(n)?;
    let k = rng.gen_range(1..=4);
    let raw: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=6)).collect();
    let total: i64 = raw.iter().sum();
    let mut tables = vec![vec![Rat::zero(); 4]; n];
    for w in raw {
        let assignment: Vec<usize> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        let det = deterministic_behavior(&scenario, &assignment)?;
        for (c, table) in tables.iter_mut().enumerate() {
            for (t, p) in table.iter_mut().zip(det.table(c)) {
                *t += p * rat(w, total);
            }
        }
    }
    Behavior::new(scenario, tables)
}

/// A random wiring mixture with up to `max_components` deterministic
/// components drawn from the full enumeration for `n`.
pub fn random_wiring_mixture<R: Rng>(
    rng: &mut R,
    n: usize,
    max_components: usize,
) -> Result<WiringMixture> {
    let pool = enumerate_deterministic(n)?;
    let k = rng.gen_range(1..=max_components.max(1));
    let raw: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=5)).collect();
    let total: i64 = raw.iter().sum();
    WiringMixture::new(
        raw.into_iter()
            .map(|w| (rat(w, total), pool[rng.gen_range(0..pool.len())].clone()))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_produce_valid_objects() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [4, 5] {
            for _ in 0..10 {
                let b = random_nd_behavior(&mut rng, n).unwrap();
                assert!(b.is_nondisturbing().unwrap());
                let nc = random_nc_behavior(&mut rng, n).unwrap();
                assert!(nc.is_noncontextual().unwrap());
                let m = random_wiring_mixture(&mut rng, n, 4).unwrap();
                assert!(m.apply(&b).unwrap().is_nondisturbing().unwrap());
            }
        }
    }

    #[test]
    fn generators_are_reproducible() {
        let a = random_nd_behavior(&mut ChaCha8Rng::seed_from_u64(9), 4).unwrap();
        let b = random_nd_behavior(&mut ChaCha8Rng::seed_from_u64(9), 4).unwrap();
        assert_eq!(a, b);
    }
}
