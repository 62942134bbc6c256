mod common;

use coalmon::bisim::{
    bisimilar, is_detector_bisimulation, largest_detector_bisimulation, largest_s_bisimulation,
};
use coalmon::detector::check_detector_morphism;
use coalmon::monitor::monitor_lasso;
use coalmon::{SSystem, Symbol};
use common::*;
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #[test]
    fn self_bisimulation_is_an_equivalence(seed in any::<u64>()) {
        let mut g = rng(seed);
        let n = g.gen_range(1..=5);
        let d = detector_from_raw(&random_table(&mut g, n, 0.3));
        let rel = largest_detector_bisimulation(&d, &d).unwrap();
        prop_assert!(rel.is_equivalence_on(n));
        prop_assert!(is_detector_bisimulation(&rel, &d, &d).unwrap());
    }

    #[test]
    fn bisimilarity_is_language_equality(seed in any::<u64>()) {
        let mut g = rng(seed);
        let (n, m) = (g.gen_range(1..=4), g.gen_range(1..=4));
        let (ta, tb) = (random_table(&mut g, n, 0.3), random_table(&mut g, m, 0.3));
        let (a, b) = (detector_from_raw(&ta), detector_from_raw(&tb));
        let rel = largest_detector_bisimulation(&a, &b).unwrap();
        prop_assert!(is_detector_bisimulation(&rel, &a, &b).unwrap());
        for x in 0..n {
            for y in 0..m {
                let same = oracle_violations(&ta, x, n + m) == oracle_violations(&tb, y, n + m);
                prop_assert_eq!(rel.contains(x, y), same);
                prop_assert_eq!(bisimilar(&a, x, &b, y).unwrap(), same);
            }
        }
    }

    #[test]
    fn morphism_graphs_are_bisimulations(seed in any::<u64>()) {
        let mut g = rng(seed);
        let (n, m) = (g.gen_range(1..=4), g.gen_range(1..=2));
        let a = detector_from_raw(&random_table(&mut g, n, 0.3));
        let b = detector_from_raw(&random_table(&mut g, m, 0.3));
        let f: Vec<usize> = (0..n).map(|_| g.gen_range(0..m)).collect();
        if check_detector_morphism(&f, &a, &b) {
            let rel = largest_detector_bisimulation(&a, &b).unwrap();
            for (x, &y) in f.iter().enumerate() {
                prop_assert!(rel.contains(x, y));
            }
        }
    }

    #[test]
    fn bisimilar_states_monitor_alike(seed in any::<u64>()) {
        let mut g = rng(seed);
        let (n, m) = (g.gen_range(1..=3), g.gen_range(1..=3));
        let a = detector_from_raw(&random_table(&mut g, n, 0.3));
        let b = detector_from_raw(&random_table(&mut g, m, 0.3));
        let rel = largest_detector_bisimulation(&a, &b).unwrap();
        for (x, y) in rel.iter() {
            for (prefix, period) in all_lassos(5) {
                let s = lasso(&prefix, &period);
                prop_assert_eq!(monitor_lasso(&a, x, &s).unwrap(), monitor_lasso(&b, y, &s).unwrap());
            }
        }
    }

    #[test]
    fn s_bisimilarity_is_stream_equality(seed in any::<u64>()) {
        let mut g = rng(seed);
        let sys = |g: &mut rand::rngs::StdRng| {
            let k = g.gen_range(1..=4);
            let out = (0..k).map(|_| Symbol::new(g.gen_range(0..2))).collect();
            let tr = (0..k).map(|_| g.gen_range(0..k)).collect();
            SSystem::new(ab(), out, tr).unwrap()
        };
        let (sigma, tau) = (sys(&mut g), sys(&mut g));
        let rel = largest_s_bisimulation(&sigma, &tau).unwrap();
        for x in 0..sigma.len() {
            for y in 0..tau.len() {
                let same = sigma.anamorphism(x).unwrap() == tau.anamorphism(y).unwrap();
                prop_assert_eq!(rel.contains(x, y), same);
            }
        }
    }
}
