use std::collections::HashSet;
use std::sync::Arc;

use kneser_core::combinatorics::{all_ksets, edges_within, rank_kset, star, unrank_kset};
use kneser_core::diversity::{
    decompose, degree_split, distances_to_stars, edge_stats, sample_family, two_linked_components, Side,
};
use kneser_core::reductions::{build_certificate, check_certificate, reduce_to_t2, CertificateConfig};
use kneser_core::shadow::{lovasz_shadow_bound, shadow};
use kneser_core::solver::{alpha, is_ekr, max_nonstar_alpha, SampleGraph};
use kneser_core::{Family, KSet, KneserGraph, Params};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn params() -> impl Strategy<Value = Params> {
    prop_oneof![Just((5, 2)), Just((7, 3)), Just((9, 4)), Just((7, 2)), Just((8, 3)), Just((11, 5)), Just((30, 4))]
        .prop_map(|(n, k)| Params::new(n, k).unwrap())
}

fn family_case() -> impl Strategy<Value = Family> {
    (prop_oneof![Just((5u32, 2u32)), Just((7, 3)), Just((9, 4)), Just((8, 3))], any::<u64>()).prop_map(|((n, k), seed)| {
        let p = Params::new(n, k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = (seed % n as u64) as u32 + 1;
        let max_a = ((n - k) as u64 * p.star_size() / n as u64) as usize;
        let a = (seed >> 8) as usize % max_a + 1;
        sample_family(&p, x, a, &mut rng).unwrap()
    })
}

proptest! {
    #[test]
    fn rank_unrank_roundtrip(p in params(), r in any::<u64>()) {
        let rank = r % p.vertex_count();
        let s = unrank_kset(&p, rank).unwrap();
        prop_assert_eq!(s.len(), p.k());
        prop_assert_eq!(rank_kset(&p, s).unwrap(), rank);
    }

    #[test]
    fn colex_order_compares_largest_elements_first(p in params(), r1 in any::<u64>(), r2 in any::<u64>()) {
        let (a, b) = (unrank_kset(&p, r1 % p.vertex_count()).unwrap(), unrank_kset(&p, r2 % p.vertex_count()).unwrap());
        let key = |s: KSet| { let mut v = s.to_vec(); v.reverse(); v };
        prop_assert_eq!(rank_kset(&p, a).unwrap().cmp(&rank_kset(&p, b).unwrap()), key(a).cmp(&key(b)));
    }

    #[test]
    fn decomposition_rebuilds_the_family(f in family_case()) {
        let d = decompose(&f).unwrap();
        prop_assert_eq!(d.reconstruct(), f.clone());
        prop_assert_eq!(d.a_family.len(), d.a);
        prop_assert_eq!(d.b_family.len(), d.a);
        let dist = distances_to_stars(&f);
        prop_assert_eq!(dist.iter().min().copied(), Some(d.a));
        prop_assert_eq!(dist.iter().position(|&v| v == d.a), Some(d.x as usize - 1));
    }

    #[test]
    fn edge_stats_identities(f in family_case()) {
        let d = decompose(&f).unwrap();
        let s = edge_stats(&d);
        prop_assert!(s.partition_holds());
        prop_assert!(s.identity_holds(f.params(), d.a));
        prop_assert_eq!(s.e_f, edges_within(&f));
    }

    #[test]
    fn degree_splits_partition_each_side(f in family_case(), delta in 0.01f64..=1.0) {
        let d = decompose(&f).unwrap();
        for (side, whole) in [(Side::A, &d.a_family), (Side::B, &d.b_family)] {
            let s = degree_split(&d, side, delta).unwrap();
            prop_assert_eq!(s.high.len() + s.low.len(), whole.len());
            prop_assert_eq!(&s.high.union(&s.low), whole);
        }
    }

    #[test]
    fn components_partition_without_cross_edges(f in family_case()) {
        let d = decompose(&f).unwrap();
        let p = *f.params();
        let comps = two_linked_components(&p, &d.a_family, d.x).unwrap();
        let total: usize = comps.iter().map(|c| c.len()).sum();
        prop_assert_eq!(total, d.a);
        for (i, c) in comps.iter().enumerate() {
            for other in &comps[i + 1..] {
                for s in c.iter() {
                    for t in other.iter() {
                        prop_assert!(s.union(t).len() > p.n() - p.k());
                    }
                }
            }
        }
        let firsts: Vec<KSet> = comps.iter().map(|c| c.members()[0]).collect();
        prop_assert!(firsts.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn shadow_meets_lovasz_bound(n in 5u32..=9, k in 2u32..=4, seed in any::<u64>(), size in 1usize..30) {
        prop_assume!(k < n);
        let sets: Vec<KSet> = all_ksets(n, k).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fam: Vec<KSet> = rand::seq::index::sample(&mut rng, sets.len(), size.min(sets.len()))
            .into_iter().map(|i| sets[i]).collect();
        for ell in 1..=k {
            let sh = shadow(&fam, ell).unwrap().len() as f64;
            prop_assert!(sh >= lovasz_shadow_bound(fam.len() as u64, k, ell).unwrap() * (1.0 - 1e-9));
        }
    }

    #[test]
    fn reductions_keep_edges(f in family_case()) {
        if let Ok(r) = reduce_to_t2(&f) {
            prop_assert!(r.postconditions_hold());
            prop_assert!(edges_within(&r.family) <= edges_within(&f));
        }
    }

    #[test]
    fn certificates_reconstruct_exactly(f in family_case(), seed in any::<u64>(), b_side in any::<bool>()) {
        let side = if b_side { Side::B } else { Side::A };
        let cfg = CertificateConfig { seed, max_tries: 5, ..Default::default() };
        if let Ok(c) = build_certificate(&f, side, &cfg) {
            let r = check_certificate(&c, &f).unwrap();
            prop_assert!(r.reconstruction_ok && r.membership_ok && r.budgets_ok());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solver_bounds(seed in any::<u64>(), p in 0.0f64..=1.0) {
        use rand::Rng;
        let g = Arc::new(KneserGraph::new(Params::new(7, 3).unwrap()).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = SampleGraph::from_edges(g.clone(), (0..g.edge_count()).filter(|_| rng.gen::<f64>() < p));
        let a = alpha(&h).unwrap();
        let ns = max_nonstar_alpha(&h).unwrap();
        prop_assert!(a.size >= 15);
        prop_assert!(ns.size <= a.size);
        prop_assert!(h.is_independent(&a.witness) && h.is_independent(&ns.witness));
        prop_assert!(ns.witness.common_intersection().is_empty());
        prop_assert_eq!(is_ekr(&h).unwrap(), ns.size < 15);
        // every star stays independent
        for x in 1..=7 {
            prop_assert!(h.is_independent(&star(h.graph().params(), x).unwrap()));
        }
        let distinct: HashSet<KSet> = a.witness.iter().copied().collect();
        prop_assert_eq!(distinct.len(), a.size);
    }
}
