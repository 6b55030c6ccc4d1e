use std::collections::BTreeSet;
use std::f64::consts::PI;

use approx::assert_relative_eq;
use bergman_hs::domain::{count_of_order, enumerate_order, DomainSpec, MultiIndex};
use bergman_hs::hankel::{diagonal_sum, hankel_row_norm_squared_raw, s_alpha_partial};
use bergman_hs::norms::{log_c_squared, log_ratio};
use bergman_hs::summation::blocked_sum;
use proptest::prelude::*;

fn multi_index(n: usize, max_entry: u32) -> impl Strategy<Value = MultiIndex> {
    prop::collection::vec(0..=max_entry, n).prop_map(MultiIndex::new)
}

fn nonzero_multi_index(n: usize, max_entry: u32) -> impl Strategy<Value = MultiIndex> {
    multi_index(n, max_entry).prop_filter("α ≠ 0", |a| !a.is_zero())
}

fn ellipsoid(n: usize) -> impl Strategy<Value = DomainSpec> {
    prop::collection::vec(0.25f64..4.0, n).prop_map(DomainSpec::Ellipsoid)
}

fn any_domain() -> impl Strategy<Value = DomainSpec> {
    prop_oneof![
        Just(DomainSpec::Disc),
        (2usize..=3).prop_map(DomainSpec::Polydisc),
        (1usize..=3).prop_flat_map(ellipsoid),
    ]
}

fn domain_with_pair() -> impl Strategy<Value = (DomainSpec, MultiIndex, MultiIndex)> {
    any_domain().prop_flat_map(|d| {
        let n = d.dimension();
        (Just(d), multi_index(n, 30), nonzero_multi_index(n, 4))
    })
}

proptest! {
    #[test]
    fn enumeration_matches_count(n in 1usize..=4, order in 0u32..=12) {
        let all = enumerate_order(n, order);
        prop_assert_eq!(all.len() as u128, count_of_order(n, order));
        prop_assert!(all.iter().all(|g| g.order() == u64::from(order) && g.dim() == n));
        let distinct: BTreeSet<_> = all.iter().cloned().collect();
        prop_assert_eq!(distinct.len(), all.len());
    }

    #[test]
    fn multi_index_text_round_trip(g in (1usize..=5).prop_flat_map(|n| multi_index(n, 1000))) {
        let back: MultiIndex = g.to_string().parse().unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn domain_text_round_trip(d in any_domain()) {
        let back: DomainSpec = d.key().parse().unwrap();
        prop_assert_eq!(back, d);
    }

    #[test]
    fn one_dimensional_ellipsoid_is_the_disc(m in 0.25f64..4.0, g in 0u32..500) {
        let e = log_c_squared(&DomainSpec::Ellipsoid(vec![m]), &MultiIndex::new(vec![g])).unwrap().c_squared();
        assert_relative_eq!(e, PI / f64::from(g + 1), max_relative = 1e-12);
    }

    #[test]
    fn polydisc_norm_factorizes(g in (2usize..=4).prop_flat_map(|n| multi_index(n, 200))) {
        let got = log_c_squared(&DomainSpec::Polydisc(g.dim()), &g).unwrap().log_c_squared;
        let want: f64 = g.entries().iter().map(|&k| (PI / f64::from(k + 1)).ln()).sum();
        assert_relative_eq!(got, want, max_relative = 1e-12, epsilon = 1e-12);
    }

    #[test]
    fn log_ratio_is_difference_of_logs((d, g, a) in domain_with_pair()) {
        let direct = log_ratio(&d, &g, &a).unwrap();
        let via_norms = log_c_squared(&d, &g.add(&a)).unwrap().log_c_squared
            - log_c_squared(&d, &g).unwrap().log_c_squared;
        assert_relative_eq!(direct, via_norms, max_relative = 1e-10, epsilon = 1e-10);
        prop_assert!(direct < 0.0);
    }

    #[test]
    fn raw_row_norm_is_nonnegative((d, g, a) in domain_with_pair()) {
        let raw = hankel_row_norm_squared_raw(&d, &g, &a).unwrap();
        prop_assert!(raw >= -1e-12, "raw row norm {raw} on {d} at γ={g}, α={a}");
    }

    #[test]
    fn partial_sum_dominates_diagonal(
        d in (2usize..=3).prop_flat_map(ellipsoid),
        seed in nonzero_multi_index(3, 3),
        order in 1u64..=60,
    ) {
        let a = MultiIndex::new(seed.entries()[..d.dimension()].to_vec());
        prop_assume!(!a.is_zero());
        let s = s_alpha_partial(&d, &a, order).unwrap();
        let diag = diagonal_sum(&d, &a, order).unwrap();
        prop_assert!(s >= diag - 1e-9, "S={s}, diagonal={diag}");
    }

    #[test]
    fn blocked_sum_ignores_thread_count(values in prop::collection::vec(-1e6f64..1e6, 0..20_000)) {
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| blocked_sum(&values, |&x| x))
        };
        prop_assert_eq!(run(1).to_bits(), run(4).to_bits());
    }
}
