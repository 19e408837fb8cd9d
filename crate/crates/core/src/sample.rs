//! Seeded random inputs for differential tests and benchmarks.

use rand::Rng;

use crate::energy::CubeSet;
use crate::family::{Cluster, SetFamily};
use crate::lab::CubeFunction;

/// Uniform random family: up to `max_clusters` masks over a universe of at
/// most 63 cells (duplicates collapse, so the result may be smaller).
pub fn random_family<R: Rng + ?Sized>(
    rng: &mut R,
    universe: usize,
    max_clusters: usize,
) -> SetFamily {
    assert!(universe <= 63, "sampling is limited to single-word universes");
    let count = rng.random_range(0..=max_clusters);
    let clusters = (0..count)
        .map(|_| {
            let mask = rng.random_range(0..1u64 << universe);
            Cluster::from_words(universe, vec![mask]).expect("mask fits universe")
        })
        .collect();
    SetFamily::new(universe, clusters).expect("masks fit universe")
}

/// Random cube subset containing each point independently with probability
/// `density`.
pub fn random_cube_set<R: Rng + ?Sized>(rng: &mut R, dim: usize, density: f64) -> CubeSet {
    assert!(dim <= 16, "sampling enumerates all 2^dim points");
    let points = (0..1u64 << dim)
        .filter(|_| rng.random::<f64>() < density)
        .collect();
    CubeSet::new(dim, points).expect("points fit dimension")
}

/// Random nonnegative function with values uniform in `[0, 1)`.
pub fn random_cube_function<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CubeFunction {
    CubeFunction::from_fn(dim, |_| rng.random()).expect("values are finite")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn seeded_generation_is_reproducible() {
        let mut a = StdRng::seed_from_u64(7);
        let mut b = StdRng::seed_from_u64(7);
        assert_eq!(random_family(&mut a, 5, 12), random_family(&mut b, 5, 12));
        assert_eq!(
            random_cube_set(&mut a, 6, 0.3),
            random_cube_set(&mut b, 6, 0.3)
        );
        assert_eq!(
            random_cube_function(&mut a, 4),
            random_cube_function(&mut b, 4)
        );
    }

    #[test]
    fn generators_respect_limits() {
        let mut rng = StdRng::seed_from_u64(99);
        for _ in 0..50 {
            let fam = random_family(&mut rng, 4, 10);
            assert!(fam.len() <= 10);
            assert!(fam.universe_size() == 4);
            let set = random_cube_set(&mut rng, 5, 0.5);
            assert!(set.points().iter().all(|&p| p < 32));
        }
    }
}
