use std::collections::BTreeMap;

use flyterm::automata::registry;
use flyterm::fa::RunOptions;
use flyterm::oracle::{
    gen_random_incidence_term, gen_random_term, oracle_correct, oracle_irredundant, shrink, GenConfig,
};
use flyterm::td::{gen_partial_ktree, parse_td, td_to_term, Compiled};
use flyterm::term::{evaluate, make_irredundant};
use flyterm::{parse_term, Label, Term};
use proptest::prelude::*;

fn accepts(id: &str, t: &Term) -> bool {
    let opts = RunOptions { timing: false, ..RunOptions::default() };
    registry::build(id).unwrap().check(t, &opts).unwrap().accepted
}

fn profile(t: &Term) -> (Vec<(Label, usize, usize)>, usize) {
    let s = evaluate(t);
    let deg = s.degrees();
    let mut p: Vec<_> = s.vertices().map(|(v, l)| (l, deg[&v].0, deg[&v].1)).collect();
    p.sort_unstable();
    (p, s.num_edges())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn print_parse_round_trip(seed in any::<u64>(), size in 1usize..60, p in 0usize..3, m in 0usize..3) {
        let t = gen_random_term(seed, size, 3, 3, (p, m));
        let back = parse_term(&t.to_sexpr()).unwrap();
        prop_assert_eq!(back.to_sexpr(), t.to_sexpr());
        prop_assert_eq!(back.len(), t.len());
    }

    #[test]
    fn generated_encodings_pass_the_guard(seed in any::<u64>()) {
        let cfg = GenConfig { seed, ..GenConfig::default() };
        let (t, _) = gen_random_incidence_term(&cfg).unwrap();
        prop_assert!(oracle_correct(&t) && oracle_irredundant(&t));
        prop_assert!(accepts("ct", &t) && accepts("irr", &t));
    }

    #[test]
    fn make_irredundant_keeps_the_value(seed in any::<u64>(), size in 1usize..50) {
        let t = gen_random_term(seed, size, 2, 3, (0, 0));
        let u = make_irredundant(&t);
        prop_assert!(oracle_irredundant(&u));
        prop_assert!(u.len() <= t.len());
        prop_assert_eq!(profile(&u), profile(&t));
    }

    #[test]
    fn irr_and_ct_agree_with_oracles_on_arbitrary_terms(seed in any::<u64>(), size in 1usize..40) {
        let t = gen_random_term(seed, size, 3, 3, (0, 0));
        prop_assert_eq!(accepts("irr", &t), oracle_irredundant(&t));
        if oracle_irredundant(&t) {
            prop_assert_eq!(accepts("ct", &t), oracle_correct(&t));
        }
    }

    #[test]
    fn swapping_labels_preserves_acceptance(seed in any::<u64>(), size in 1usize..40) {
        let t = gen_random_term(seed, size, 3, 3, (0, 0));
        let swap = |l: Label| match l.value() {
            1 => Label::vertex(3),
            3 => Label::vertex(1),
            -1 => Label::edge(2),
            -2 => Label::edge(1),
            _ => l,
        };
        let u = t.map_labels(swap).unwrap();
        for id in ["irr", "ct", "ham-core", "dirham"] {
            prop_assert_eq!(accepts(id, &t), accepts(id, &u), "{}", id);
        }
    }

    #[test]
    fn shrinking_preserves_failure(seed in any::<u64>(), size in 1usize..40) {
        let t = gen_random_term(seed, size, 3, 3, (0, 0));
        let fails = |c: &Term| !oracle_correct(c);
        if fails(&t) {
            let s = shrink(&t, fails);
            prop_assert!(fails(&s));
            prop_assert!(s.len() <= t.len());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn decompositions_compile_within_budget(k in 1usize..=3, n in 1usize..=24, density in 0.0f64..=1.0, seed in any::<u64>()) {
        let (g, td) = gen_partial_ktree(k, n, density, seed);
        prop_assert_eq!(&parse_td(&td.to_string()).unwrap(), &td);
        let c = td_to_term(&g, &td).unwrap();
        prop_assert!(c.reconstructs(&g));
        prop_assert!(oracle_correct(&c.term) && oracle_irredundant(&c.term));
        prop_assert!(c.c_used <= 2 && c.d_used <= 2 * k + 3);
        prop_assert!(c.term.len() <= Compiled::size_bound(&g, &td));
    }

    #[test]
    fn label_classes_gain_degree_uniformly(seed in any::<u64>(), size in 1usize..40) {
        let t = make_irredundant(&gen_random_term(seed, size, 2, 2, (0, 0)));
        let full = evaluate(&t).degrees();
        for id in t.post_order() {
            let sub = evaluate(&t.subterm(id)).shifted(t.subterm_range(id).start);
            let deg = sub.degrees();
            let mut gain = BTreeMap::new();
            for (v, l) in sub.vertices() {
                let d = (full[&v].0 - deg[&v].0, full[&v].1 - deg[&v].1);
                prop_assert_eq!(*gain.entry(l).or_insert(d), d);
            }
        }
    }
}
