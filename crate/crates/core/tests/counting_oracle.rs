//! Differential tests: the pruned scan against the literal triple loop,
//! plus structural invariances the counter must respect.

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::rngs::StdRng;
use rand::SeedableRng;
use uplus_core::counting::{
    count_kfold, count_partition_triples, count_partition_triples_oracle, count_tripartite,
};
use uplus_core::family::{Cluster, SetFamily};

fn family_strategy(universe: usize, max_len: usize) -> impl Strategy<Value = SetFamily> {
    prop::collection::vec(0..(1u64 << universe), 0..=max_len).prop_map(move |masks| {
        let clusters = masks
            .into_iter()
            .map(|m| Cluster::from_words(universe, vec![m]).unwrap())
            .collect();
        SetFamily::new(universe, clusters).unwrap()
    })
}

fn product_family(x: &SetFamily, y: &SetFamily) -> SetFamily {
    let shift = x.universe_size();
    let universe = shift + y.universe_size();
    let mut clusters = Vec::with_capacity(x.len() * y.len());
    for a in x.clusters() {
        for b in y.clusters() {
            let mask = a.words()[0] | b.words()[0] << shift;
            clusters.push(Cluster::from_words(universe, vec![mask]).unwrap());
        }
    }
    SetFamily::new(universe, clusters).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn scan_matches_oracle(fam in family_strategy(6, 24)) {
        let report = count_partition_triples(&fam).unwrap();
        let oracle = count_partition_triples_oracle(&fam).unwrap();
        prop_assert_eq!(report.triples, oracle);
        prop_assert!(report.main_bound_holds());
        prop_assert!(report.trivial_bound_holds());
    }

    #[test]
    fn threefold_tuples_equal_triples(fam in family_strategy(5, 16)) {
        let triples = count_partition_triples(&fam).unwrap().triples;
        let tuples = count_kfold(&fam, 3).unwrap().tuples;
        prop_assert_eq!(tuples, triples);
    }

    #[test]
    fn tripartite_diagonal_matches_triples(fam in family_strategy(5, 16)) {
        let triples = count_partition_triples(&fam).unwrap().triples;
        let diagonal = count_tripartite(&fam, &fam, &fam).unwrap().tuples;
        prop_assert_eq!(diagonal, triples);
    }

    #[test]
    fn relabeling_cells_preserves_the_count(fam in family_strategy(6, 20), seed: u64) {
        let mut perm: Vec<usize> = (0..fam.universe_size()).collect();
        perm.shuffle(&mut StdRng::seed_from_u64(seed));
        let permuted = fam.permuted(&perm).unwrap();
        prop_assert_eq!(permuted.len(), fam.len());
        prop_assert_eq!(
            permuted.compress_universe().unwrap().universe_size(),
            fam.compress_universe().unwrap().universe_size(),
        );
        prop_assert_eq!(
            count_partition_triples(&permuted).unwrap().triples,
            count_partition_triples(&fam).unwrap().triples,
        );
    }

    #[test]
    fn universe_compression_preserves_the_count(fam in family_strategy(6, 20)) {
        let compressed = fam.compress_universe().unwrap();
        prop_assert_eq!(compressed.len(), fam.len());
        prop_assert_eq!(
            count_partition_triples(&compressed).unwrap().triples,
            count_partition_triples(&fam).unwrap().triples,
        );
    }

    #[test]
    fn count_is_multiplicative_over_disjoint_universes(
        x in family_strategy(4, 10),
        y in family_strategy(4, 10),
    ) {
        let product = product_family(&x, &y);
        prop_assert_eq!(product.len(), x.len() * y.len());
        let tx = count_partition_triples(&x).unwrap().triples;
        let ty = count_partition_triples(&y).unwrap().triples;
        let tp = count_partition_triples(&product).unwrap().triples;
        prop_assert_eq!(tp, tx * ty);
    }
}
