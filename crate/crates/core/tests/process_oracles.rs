//! Hitting times from order statistics against scans of the process prefixes.

use std::sync::Arc;

use kneser_core::process::{compute_hitting_times, tau_ell, tau_profile, EdgeLabeling};
use kneser_core::solver::{brute_force_alpha, brute_force_nonstar_alpha, SampleGraph};
use kneser_core::{KneserGraph, Params};

fn graph(n: u32, k: u32) -> Arc<KneserGraph> {
    Arc::new(KneserGraph::new(Params::new(n, k).unwrap()).unwrap())
}

/// Smallest present degree from an off-star vertex into a star, by direct
/// inspection of every (x, A, T) triple.
fn min_degree_direct(g: &SampleGraph) -> usize {
    let kg = g.graph();
    let n = kg.params().n();
    let mut best = usize::MAX;
    for x in 1..=n {
        for (ai, a) in kg.vertices().iter().enumerate() {
            if a.contains(x) {
                continue;
            }
            let d = kg
                .vertices()
                .iter()
                .enumerate()
                .filter(|(ti, t)| t.contains(x) && t.is_disjoint(a) && g.adjacent(ai, *ti))
                .count();
            best = best.min(d);
        }
    }
    best
}

/// Smallest `i` whose prefix has every star degree at least `ell`.
fn scan_tau(l: &EdgeLabeling, ell: usize) -> usize {
    (0..=l.order().len()).find(|&i| min_degree_direct(&l.snapshot_at_count(i).unwrap()) >= ell).unwrap()
}

#[test]
fn tau_one_and_two_match_prefix_scan() {
    for (n, k, seeds) in [(5, 2, 100), (7, 3, 100)] {
        let g = graph(n, k);
        for seed in 0..seeds {
            let l = EdgeLabeling::sample(g.clone(), seed, 0);
            for ell in 1..=2 {
                assert_eq!(tau_ell(&l, ell).unwrap().count, scan_tau(&l, ell), "K({n},{k}) seed {seed} ell {ell}");
            }
        }
    }
}

#[test]
fn last_tau_is_the_full_graph() {
    for (n, k) in [(5, 2), (7, 3), (9, 4), (7, 2)] {
        let g = graph(n, k);
        let d = g.params().star_degree() as usize;
        for seed in 0..10 {
            let l = EdgeLabeling::sample(g.clone(), seed, 1);
            assert_eq!(tau_ell(&l, d).unwrap().count, g.edge_count());
            let profile = tau_profile(&l);
            assert_eq!(profile.len(), d);
            assert!(profile.windows(2).all(|w| w[0].count < w[1].count && w[0].label <= w[1].label));
            assert_eq!(tau_ell(&l, 1).unwrap(), profile[0]);
            assert!(tau_ell(&l, 0).is_err() && tau_ell(&l, d + 1).is_err());
        }
    }
}

#[test]
fn forward_search_matches_full_scan() {
    let g = graph(5, 2);
    let star = 4;
    for seed in 0..100 {
        let l = EdgeLabeling::sample(g.clone(), seed, 3);
        let h = compute_hitting_times(&l, true).unwrap();
        let m = l.order().len();
        let alpha_scan = (0..=m).find(|&i| brute_force_alpha(&l.snapshot_at_count(i).unwrap()).unwrap() == star).unwrap();
        let ekr_scan =
            (0..=m).find(|&i| brute_force_nonstar_alpha(&l.snapshot_at_count(i).unwrap()).unwrap() < star).unwrap();
        assert_eq!(h.tau_alpha.unwrap().count, alpha_scan, "seed {seed}");
        assert_eq!(h.tau_ekr.unwrap().count, ekr_scan, "seed {seed}");
        assert_eq!(h.alpha_at_tau_super == star, alpha_scan == h.tau_super.count);
    }
}

#[test]
fn hitting_time_labels_are_the_edge_labels() {
    let g = graph(7, 3);
    let l = EdgeLabeling::sample(g, 5, 5);
    let t = tau_ell(&l, 1).unwrap();
    let e = l.order()[t.count - 1] as usize;
    assert_eq!(t.label, l.label(e));
    assert_eq!(l.position(e), t.count - 1);
    assert_eq!(l.count_at(t.label), t.count);
}

#[test]
fn labels_average_one_half() {
    let g = graph(9, 4);
    let mut total = 0.0;
    let mut count = 0usize;
    for seed in 0..100 {
        let l = EdgeLabeling::sample(g.clone(), seed, 0);
        total += l.labels().iter().sum::<f64>();
        count += l.labels().len();
    }
    assert!((total / count as f64 - 0.5).abs() < 0.05);
}

#[test]
fn seeds_give_distinct_labelings() {
    let g = graph(5, 2);
    let a = EdgeLabeling::sample(g.clone(), 1, 0);
    let b = EdgeLabeling::sample(g.clone(), 2, 0);
    assert_ne!(a.labels(), b.labels());
    assert_eq!(a.labels(), EdgeLabeling::sample(g, 1, 0).labels());
}

#[test]
fn snapshot_extremes() {
    let g = graph(7, 3);
    for seed in 0..100 {
        let l = EdgeLabeling::sample(g.clone(), seed, 0);
        assert_eq!(l.snapshot(0.0).edge_count(), 0);
        assert_eq!(l.snapshot(1.0), SampleGraph::full(g.clone()));
        assert_eq!(l.snapshot_at_count(g.edge_count()).unwrap(), SampleGraph::full(g.clone()));
        let (i, j) = (seed as usize % 70, 20 + seed as usize % 50);
        let (a, b) = (l.snapshot_at_count(i.min(j)).unwrap(), l.snapshot_at_count(i.max(j)).unwrap());
        assert!(a.edge_indices().all(|e| b.has_edge(e)));
    }
}

#[test]
fn alpha_never_increases_along_the_process() {
    let g = graph(5, 2);
    for seed in 0..20 {
        let l = EdgeLabeling::sample(g.clone(), seed, 9);
        let alphas: Vec<usize> =
            (0..=15).map(|i| brute_force_alpha(&l.snapshot_at_count(i).unwrap()).unwrap()).collect();
        assert!(alphas.windows(2).all(|w| w[0] >= w[1]));
        assert_eq!(alphas[0], 10);
        assert_eq!(alphas[15], 4);
    }
}
