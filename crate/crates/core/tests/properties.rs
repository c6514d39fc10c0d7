use std::collections::BTreeSet;

use proptest::prelude::*;

use omega_core::bounds::{binom, ekr_bound};
use omega_core::setcore::{
    apply_perm, canonical_form, is_intersecting, k_subsets, Family, Permutation,
};
use omega_core::weights::{
    degree_product_sum, intersection_profile, omega_cross, omega_cross_strict, omega_family,
};

/// (n, k, family masks) with 1 <= k <= n <= n_max.
fn family(n_max: u32, size_max: usize) -> impl Strategy<Value = Family> {
    (1..=n_max)
        .prop_flat_map(|n| (Just(n), 1..=n))
        .prop_flat_map(move |(n, k)| {
            let all: Vec<u64> = k_subsets(n, k).collect();
            let len = all.len();
            (Just(n), Just(k), proptest::sample::subsequence(all, 0..=size_max.min(len)))
        })
        .prop_map(|(n, k, masks)| Family::from_masks(n, k, masks).unwrap())
}

fn pair(n_max: u32, size_max: usize) -> impl Strategy<Value = (Family, Family)> {
    (1..=n_max)
        .prop_flat_map(|n| (Just(n), 1..=n, 1..=n))
        .prop_flat_map(move |(n, k, l)| {
            let a: Vec<u64> = k_subsets(n, k).collect();
            let b: Vec<u64> = k_subsets(n, l).collect();
            let (la, lb) = (a.len(), b.len());
            (
                Just((n, k, l)),
                proptest::sample::subsequence(a, 0..=size_max.min(la)),
                proptest::sample::subsequence(b, 0..=size_max.min(lb)),
            )
        })
        .prop_map(|((n, k, l), a, b)| (Family::from_masks(n, k, a).unwrap(), Family::from_masks(n, l, b).unwrap()))
}

fn permutation(n: u32) -> impl Strategy<Value = Permutation> {
    Just((1..=n).collect::<Vec<u32>>())
        .prop_shuffle()
        .prop_map(|image| Permutation::from_images(image).unwrap())
}

fn with_perm(n_max: u32, size_max: usize) -> impl Strategy<Value = (Family, Permutation)> {
    family(n_max, size_max).prop_flat_map(|f| {
        let n = f.n();
        (Just(f), permutation(n))
    })
}

// Pairwise meets by explicit element lists.
fn slow_omega(f: &Family) -> u128 {
    let lists = f.to_lists();
    let mut total = 0u128;
    for i in 0..lists.len() {
        for j in i + 1..lists.len() {
            total += lists[i].iter().filter(|e| lists[j].contains(e)).count() as u128;
        }
    }
    total
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn relabelling_preserves_intersection_and_omega((f, p) in with_perm(12, 10)) {
        let g = apply_perm(&f, &p).unwrap();
        prop_assert_eq!(g.len(), f.len());
        prop_assert_eq!(is_intersecting(&g), is_intersecting(&f));
        prop_assert_eq!(omega_family(&g), omega_family(&f));
    }

    #[test]
    fn omega_matches_element_lists(f in family(20, 12)) {
        prop_assert_eq!(omega_family(&f), slow_omega(&f));
    }

    #[test]
    fn halving_identity(f in family(20, 12)) {
        let k = f.k() as u128;
        prop_assert_eq!(2 * omega_family(&f), omega_cross(&f, &f).unwrap() - k * f.len() as u128);
        prop_assert_eq!(2 * omega_family(&f), omega_cross_strict(&f, &f).unwrap());
    }

    #[test]
    fn cross_is_symmetric((a, b) in pair(12, 8)) {
        prop_assert_eq!(omega_cross(&a, &b).unwrap(), omega_cross(&b, &a).unwrap());
    }

    #[test]
    fn profile_sums((a, b) in pair(12, 8)) {
        let p = intersection_profile(&a, &b).unwrap();
        prop_assert_eq!(p.total_pairs(), (a.len() * b.len()) as u128);
        prop_assert_eq!(p.weighted_sum(), omega_cross(&a, &b).unwrap());
    }

    #[test]
    fn degree_identity((a, b) in pair(12, 8)) {
        prop_assert_eq!(degree_product_sum(&a, &b).unwrap(), omega_cross(&a, &b).unwrap());
        let da = a.degrees();
        prop_assert_eq!(da.iter().sum::<u64>(), a.k() as u64 * a.len() as u64);
    }

    #[test]
    fn canonical_form_is_an_orbit_invariant((f, p) in with_perm(5, 6)) {
        let c = canonical_form(&f).unwrap();
        prop_assert_eq!(canonical_form(&c).unwrap(), c.clone());
        prop_assert_eq!(canonical_form(&apply_perm(&f, &p).unwrap()).unwrap(), c.clone());
        prop_assert!(c <= f);
    }

    #[test]
    fn omega_grows_with_the_family(f in family(10, 8), extra in 0usize..256) {
        let all: Vec<u64> = k_subsets(f.n(), f.k()).collect();
        let s = all[extra % all.len()];
        let mut masks: BTreeSet<u64> = f.masks().into_iter().collect();
        masks.insert(s);
        let g = Family::from_masks(f.n(), f.k(), masks).unwrap();
        prop_assert!(omega_family(&g) >= omega_family(&f));
    }
}

#[test]
fn intersecting_families_respect_the_size_bound() {
    // Largest intersecting family by clique search over k-subsets, n <= 7.
    fn largest(sets: &[u64], chosen: &mut Vec<u64>, from: usize) -> usize {
        let mut best = chosen.len();
        for i in from..sets.len() {
            if chosen.iter().all(|&c| c & sets[i] != 0) {
                chosen.push(sets[i]);
                best = best.max(largest(sets, chosen, i + 1));
                chosen.pop();
            }
        }
        best
    }
    for n in 2..=7u32 {
        for k in 1..=n / 2 {
            let sets: Vec<u64> = k_subsets(n, k).collect();
            let size = largest(&sets, &mut Vec::new(), 0) as u128;
            let bound = ekr_bound(n, k).unwrap().value;
            assert_eq!(size, bound, "({n},{k})");
            assert_eq!(bound, binom(n as i64 - 1, k as i64 - 1).unwrap());
        }
    }
}
