//! Strategy outputs checked against independent brute-force enumeration.

use cellfree::assignment::{
    exhaustive_sum_rate, optimal_repulsive, random_assignment, repulsive_from,
    repulsive_heuristic, swap_gain, Euclidean, RepulsionFunction,
};
use cellfree::{
    estimation_quality, generate_realization, sum_rate, PilotAssignment, SimConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every label vector in `0..clusters` of length `n`, in lexicographic order.
fn all_label_vectors(n: usize, clusters: usize) -> Vec<Vec<usize>> {
    let total = clusters.pow(n as u32);
    (0..total)
        .map(|mut code| {
            let mut v = vec![0; n];
            for slot in v.iter_mut().rev() {
                *slot = code % clusters;
                code /= clusters;
            }
            v
        })
        .collect()
}

fn balanced(labels: &[usize], clusters: usize) -> bool {
    let lo = labels.len() / clusters;
    (0..clusters).all(|c| {
        let n = labels.iter().filter(|&&l| l == c).count();
        n >= lo && n <= lo + 1
    })
}

fn brute_score(f: &dyn RepulsionFunction, labels: &[usize]) -> f64 {
    let mut s = 0.0;
    for a in 0..labels.len() {
        for b in 0..labels.len() {
            if a < b && labels[a] == labels[b] {
                s += f.repulsion(a, b);
            }
        }
    }
    s
}

fn brute_optimum(f: &dyn RepulsionFunction, clusters: usize) -> f64 {
    all_label_vectors(f.len(), clusters)
        .into_iter()
        .filter(|l| balanced(l, clusters))
        .map(|l| brute_score(f, &l))
        .fold(f64::NEG_INFINITY, f64::max)
}

fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Euclidean {
    Euclidean::new(
        (0..n)
            .map(|_| vec![rng.random::<f64>() * 1000.0, rng.random::<f64>() * 1000.0])
            .collect(),
    )
}

#[test]
fn line_of_four_has_three_partitions_best_twenty() {
    let f = Euclidean::from_scalars(&[0.0, 1.0, 10.0, 11.0]);
    let partitions: Vec<_> = all_label_vectors(4, 2)
        .into_iter()
        .filter(|l| balanced(l, 2) && l[0] == 0)
        .collect();
    assert_eq!(partitions.len(), 3);
    assert_eq!(brute_optimum(&f, 2), 20.0);
}

#[test]
fn six_collinear_points_three_pairs() {
    let f = Euclidean::from_scalars(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
    let distinct: Vec<_> = all_label_vectors(6, 3)
        .into_iter()
        .filter(|l| balanced(l, 3) && l[0] == 0 && l.iter().position(|&x| x == 2) > l.iter().position(|&x| x == 1))
        .collect();
    assert_eq!(distinct.len(), 15);
    // max-distance-first matching: {0,5}, {1,4}, {2,3} gives 5 + 3 + 1 = 9
    let best = brute_optimum(&f, 3);
    assert_eq!(best, 9.0);
    let p = optimal_repulsive(&f, 3).unwrap();
    assert_eq!(brute_score(&f, p.pilots()), best);
}

#[test]
fn optimal_repulsive_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..40 {
        let n = rng.random_range(2..=9);
        let clusters = rng.random_range(1..=n.min(4));
        let f = random_points(&mut rng, n);
        let p = optimal_repulsive(&f, clusters).unwrap();
        assert!(p.is_balanced(clusters));
        let got = brute_score(&f, p.pilots());
        let want = brute_optimum(&f, clusters);
        assert!((got - want).abs() <= 1e-9 * want.max(1.0), "{got} vs {want}");
    }
}

#[test]
fn exhaustive_matches_brute_force_over_generic_rate() {
    for index in 0..8 {
        let cfg = SimConfig {
            num_aps: 12,
            num_ues: 5,
            num_pilots: 3,
            seed: 77,
            ..SimConfig::default()
        };
        let r = generate_realization(&cfg, index);
        let full = vec![1.0; 5];
        let rate_of = |labels: &[usize]| {
            let p = PilotAssignment::new(labels.to_vec(), 3).unwrap();
            let q = estimation_quality(&r.beta, &p, 3, cfg.rho_p()).unwrap();
            sum_rate(&r.beta, &q.gamma, &p, &full, cfg.rho_u()).unwrap()
        };
        let best = all_label_vectors(5, 3)
            .iter()
            .map(|l| rate_of(l))
            .fold(f64::NEG_INFINITY, f64::max);
        let p = exhaustive_sum_rate(&r, &cfg).unwrap();
        let got = rate_of(p.pilots());
        assert!((got - best).abs() <= 1e-9 * best, "{got} vs {best}");

        // and it dominates the heuristic
        let h = repulsive_heuristic(&Euclidean::from_points(&r.ue_positions), 3, index).unwrap();
        assert!(got >= rate_of(h.pilots()) - 1e-12);
    }
}

#[test]
fn exhaustive_breaks_ties_towards_smallest_labels() {
    // identical UEs: every assignment with the same partition shape ties
    let cfg = SimConfig {
        num_aps: 3,
        num_ues: 3,
        num_pilots: 3,
        ..SimConfig::default()
    };
    let mut r = generate_realization(&cfg, 0);
    r.beta.fill(1e-9);
    let p = exhaustive_sum_rate(&r, &cfg).unwrap();
    assert_eq!(p.pilots(), &[0, 1, 2]);
}

#[test]
fn heuristic_matches_optimum_on_most_small_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut equal, mut worst_ratio) = (0, f64::INFINITY);
    for seed in 0..100 {
        let f = random_points(&mut rng, 8);
        let h = repulsive_heuristic(&f, 2, seed).unwrap();
        let opt = brute_score(&f, optimal_repulsive(&f, 2).unwrap().pilots());
        let got = brute_score(&f, h.pilots());
        assert!(got <= opt + 1e-9);
        if (opt - got).abs() <= 1e-9 * opt {
            equal += 1;
        }
        worst_ratio = worst_ratio.min(got / opt);
    }
    println!("heuristic optimal on {equal}/100, worst ratio {worst_ratio:.4}");
    assert!(equal >= 90, "{equal}");
    assert!(worst_ratio >= 0.99, "{worst_ratio}");
}

#[test]
fn swap_gain_matches_full_recomputation() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let n = rng.random_range(4..14);
        let clusters = rng.random_range(2..=n / 2);
        let f = random_points(&mut rng, n);
        let labels = random_assignment(n, clusters, rng.random()).unwrap().pilots().to_vec();
        let (u, w) = (rng.random_range(0..n), rng.random_range(0..n));
        let mut swapped = labels.clone();
        swapped.swap(u, w);
        let direct = brute_score(&f, &swapped) - brute_score(&f, &labels);
        assert!((swap_gain(&f, &labels, u, w) - direct).abs() < 1e-9);
    }
}

#[test]
fn local_search_reaches_one_swap_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let n = rng.random_range(6..30);
        let clusters = rng.random_range(2..=n / 3);
        let f = random_points(&mut rng, n);
        let init = random_assignment(n, clusters, rng.random()).unwrap();
        let out = repulsive_from(&f, &init, clusters).unwrap();
        assert_eq!(out.assignment.pilot_counts(clusters), init.pilot_counts(clusters));
        let labels = out.assignment.pilots();
        for u in 0..n {
            for w in 0..n {
                assert!(swap_gain(&f, labels, u, w) <= 1e-9);
            }
        }
        assert!(out.score >= brute_score(&f, init.pilots()));
    }
}
