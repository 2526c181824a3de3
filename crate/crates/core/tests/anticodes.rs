use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ulam_core::anticode::DEFAULT_SEARCH_BUDGET;
use ulam_core::bounds::{falling_factorial, prop5_bound};
use ulam_core::perm::for_each_subset_of_size;
use ulam_core::{
    compatibility_graph, cylinder, enumerate_permutations, family_diameter, is_cylinder,
    max_anticode, tensor_lift, ulam_distance, Family, Permutation, SearchCap, SearchStatus,
    SymbolSet,
};

fn random_perm(n: usize, rng: &mut ChaCha8Rng) -> Permutation {
    let mut s: Vec<usize> = (1..=n).collect();
    s.shuffle(rng);
    Permutation::from_one_line(&s).unwrap()
}

fn random_family(n: usize, rng: &mut ChaCha8Rng) -> Family {
    let size = rng.gen_range(1..=8);
    Family::new(n, (0..size).map(|_| random_perm(n, rng))).unwrap()
}

/// Largest diameter-`k` family by plain backtracking over all of `S_n`.
fn brute_max(n: usize, k: usize) -> usize {
    fn grow(
        perms: &[Permutation],
        k: usize,
        chosen: &mut Vec<usize>,
        from: usize,
        best: &mut usize,
    ) {
        *best = (*best).max(chosen.len());
        if chosen.len() + perms.len() - from <= *best {
            return;
        }
        for i in from..perms.len() {
            if chosen
                .iter()
                .all(|&j| ulam_distance(&perms[i], &perms[j]).unwrap() <= k)
            {
                chosen.push(i);
                grow(perms, k, chosen, i + 1, best);
                chosen.pop();
            }
        }
    }
    let perms: Vec<Permutation> = enumerate_permutations(n).unwrap().collect();
    let mut best = 0;
    grow(&perms, k, &mut Vec::new(), 0, &mut best);
    best
}

#[test]
fn search_matches_backtracking_for_small_n() {
    for n in 1..=4 {
        for k in 0..=n {
            let report = max_anticode(n, k, DEFAULT_SEARCH_BUDGET, SearchCap::Standard).unwrap();
            assert_eq!(report.status, SearchStatus::Exact);
            assert_eq!(report.best_size, brute_max(n, k).into(), "n={n} k={k}");
            assert!(family_diameter(&report.witness).unwrap() <= k);
            assert!(report.witness.contains(&Permutation::identity(n)));
        }
    }
}

#[test]
fn exact_table_is_monotone_and_sandwiched() {
    let mut table = vec![vec![0usize; 7]; 7];
    for (n, row) in table.iter_mut().enumerate().take(6).skip(1) {
        for (k, slot) in row.iter_mut().enumerate().take(n + 1) {
            let report = max_anticode(n, k, DEFAULT_SEARCH_BUDGET, SearchCap::Standard).unwrap();
            assert_eq!(report.status, SearchStatus::Exact);
            let f = report.witness.len();
            *slot = f;
            assert!(falling_factorial(n as u64, k as u64).unwrap() <= f.into());
            if k >= 1 {
                assert!(prop5_bound(n as u64, k as u64).unwrap() >= f.into());
            }
        }
    }
    for n in 1..=5 {
        for k in 0..=n {
            if k < n {
                assert!(table[n][k] <= table[n][k + 1]);
            }
            if n < 5 {
                assert!(table[n][k] <= table[n + 1][k]);
                assert!((n + 1) * table[n][k] <= table[n + 1][k + 1]);
            }
        }
    }
}

#[test]
fn search_witness_is_lexicographically_least() {
    // Among maximum cliques through the identity, ordered by sorted ranks.
    for (n, k) in [(3, 1), (4, 1), (4, 2)] {
        let report = max_anticode(n, k, DEFAULT_SEARCH_BUDGET, SearchCap::Standard).unwrap();
        let size = report.witness.len();
        let perms: Vec<Permutation> = enumerate_permutations(n).unwrap().collect();
        let mut least: Option<Vec<usize>> = None;
        for_each_subset_of_size(perms.len() - 1, size - 1, |pick| {
            let ranks: Vec<usize> = std::iter::once(0).chain(pick.iter().copied()).collect();
            let ok = ranks.iter().all(|&a| {
                ranks
                    .iter()
                    .all(|&b| ulam_distance(&perms[a], &perms[b]).unwrap() <= k)
            });
            if ok {
                least = Some(ranks);
                return false;
            }
            true
        });
        let got: Vec<usize> = report
            .witness
            .members()
            .iter()
            .map(|p| p.rank_u64() as usize)
            .collect();
        assert_eq!(Some(got), least, "n={n} k={k}");
    }
}

#[test]
fn cylinders_have_expected_size_and_diameter() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for n in 1..=6 {
        let anchor = random_perm(n, &mut rng);
        for a in 0..=n {
            for_each_subset_of_size(n, a, |s| {
                let set = SymbolSet::from_symbols(n, s).unwrap();
                let c = cylinder(n, &set, &anchor).unwrap();
                assert_eq!(
                    falling_factorial(n as u64, a as u64).unwrap(),
                    c.len().into()
                );
                let expected: BTreeSet<Permutation> = enumerate_permutations(n)
                    .unwrap()
                    .filter(|g| g.delete(&set).unwrap() == anchor.delete(&set).unwrap())
                    .collect();
                assert_eq!(
                    c.members().iter().cloned().collect::<BTreeSet<_>>(),
                    expected
                );
                let d = family_diameter(&c).unwrap();
                assert!(d <= a);
                if a < n {
                    assert_eq!(d, a);
                }
                let (found, found_anchor) = is_cylinder(&c).unwrap();
                // Deleting n - 1 or n symbols gives the same family, all of S_n.
                if a + 1 < n {
                    assert_eq!(found.len(), a);
                }
                assert_eq!(
                    cylinder(n, &found, &found_anchor).unwrap().members(),
                    c.members()
                );
                // Only the first subset of each size gets the full treatment at n = 6.
                n < 6
            });
        }
    }
}

#[test]
fn non_cylinders_are_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    // At n = 2 the pair is all of S_2, a cylinder.
    for n in 3..=5 {
        let ends = Family::new(n, [Permutation::identity(n), Permutation::reversal(n)]).unwrap();
        assert!(is_cylinder(&ends).is_none());
        for _ in 0..50 {
            let f = random_family(n, &mut rng);
            if let Some((a, anchor)) = is_cylinder(&f) {
                assert_eq!(cylinder(n, &a, &anchor).unwrap().members(), f.members());
            }
        }
    }
}

#[test]
fn lifting_multiplies_size_and_adds_one_to_diameter() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let mut tried = 0;
    while tried < 40 {
        let n = rng.gen_range(2..=6);
        let f = random_family(n, &mut rng);
        let d = family_diameter(&f).unwrap();
        if d >= n - 1 {
            continue;
        }
        tried += 1;
        let lifted = tensor_lift(&f).unwrap();
        assert_eq!(lifted.len(), (n + 1) * f.len());
        assert_eq!(family_diameter(&lifted).unwrap(), d + 1);
        assert!(lifted.members().iter().all(|g| f.contains(
            &g.delete(&SymbolSet::from_symbols(n + 1, &[n + 1]).unwrap())
                .map(|s| Permutation::from_one_line(&s.symbols()).unwrap())
                .unwrap()
        )));
    }
}

#[test]
fn lifted_cylinder_is_a_cylinder() {
    let anchor = Permutation::identity(3);
    for a in 0..=3 {
        for_each_subset_of_size(3, a, |s| {
            let set = SymbolSet::from_symbols(3, s).unwrap();
            let lifted = tensor_lift(&cylinder(3, &set, &anchor).unwrap()).unwrap();
            let mut wider: Vec<usize> = s.to_vec();
            wider.push(4);
            let direct = cylinder(
                4,
                &SymbolSet::from_symbols(4, &wider).unwrap(),
                &Permutation::identity(4),
            )
            .unwrap();
            assert_eq!(lifted.members(), direct.members());
            true
        });
    }
}

#[test]
fn compatibility_graph_edges_follow_distance() {
    for n in 1..=4 {
        let perms: Vec<Permutation> = enumerate_permutations(n).unwrap().collect();
        for k in 0..n {
            let g = compatibility_graph(n, k, SearchCap::Standard).unwrap();
            for (i, a) in perms.iter().enumerate() {
                for (j, b) in perms.iter().enumerate() {
                    if i != j {
                        assert_eq!(g.has_edge(i + 1, j + 1), ulam_distance(a, b).unwrap() <= k);
                    }
                }
            }
        }
    }
}

#[test]
fn search_result_does_not_depend_on_thread_count() {
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                let r = max_anticode(5, 2, DEFAULT_SEARCH_BUDGET, SearchCap::Standard).unwrap();
                (r.best_size, r.status, r.witness.members().to_vec())
            })
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn search_beyond_cap_is_refused() {
    assert!(max_anticode(7, 2, 10, SearchCap::Standard).is_err());
}

#[test]
fn boundary_maximum_need_not_be_a_cylinder() {
    // At k = n - 2 = 2 the least maximum family is not a cylinder, though a
    // cylinder of the same size exists.
    let report = max_anticode(4, 2, DEFAULT_SEARCH_BUDGET, SearchCap::Standard).unwrap();
    assert_eq!(report.witness.len(), 12);
    assert!(!report.witness_is_cylinder);
    assert_eq!(family_diameter(&report.witness).unwrap(), 2);
    let set = SymbolSet::from_symbols(4, &[1, 2]).unwrap();
    let c = cylinder(4, &set, &Permutation::identity(4)).unwrap();
    assert_eq!(c.len(), 12);
    assert_eq!(family_diameter(&c).unwrap(), 2);
}
