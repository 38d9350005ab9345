mod common;

use armflow::de::decode;
use armflow::rule::{confidence, count, fitness, support};
use armflow::{AssociationRule, FitnessWeights, Genotype, Item, ScoredRule};
use common::*;
use proptest::prelude::*;

/// Random rule over the given arities: a shuffled subset of features with
/// random attributes, split at a random point.
fn arb_rule(arities: Vec<usize>) -> impl Strategy<Value = (Vec<Item>, Vec<Item>)> {
    let d = arities.len();
    let attrs: Vec<_> = arities.iter().map(|&a| 0..a).collect();
    let order = Just((0..d).collect::<Vec<usize>>()).prop_shuffle();
    let split = (2..=d).prop_flat_map(|p| (Just(p), 1..p));
    (order, split, attrs).prop_map(|(order, (p, cut), attrs)| {
        let items: Vec<Item> = order[..p].iter().map(|&f| Item::new(f, attrs[f])).collect();
        (items[..cut].to_vec(), items[cut..].to_vec())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn metrics_match_brute_force_on_random_rules(
        (arities, rows, (ante, cons)) in arb_table(4, 3, 1, 50)
            .prop_flat_map(|(a, r)| (Just(a.clone()), Just(r), arb_rule(a)))
    ) {
        let (supp, conf) = brute_metrics(&rows, &ante, &cons);
        let db = db(catalog(&arities), &rows);
        let rule = AssociationRule::new(ante.clone(), cons.clone()).unwrap();
        prop_assert_eq!(support(&rule, &db).unwrap(), supp);
        prop_assert_eq!(confidence(&rule, &db).unwrap(), conf);
        let c = count(&rule, &db).unwrap();
        prop_assert_eq!((c.antecedent, c.joint, c.total), {
            let (a, j) = brute_counts(&rows, &ante, &cons);
            (a, j, rows.len())
        });
        prop_assert_eq!(fitness(&rule, &db, FitnessWeights::default()).unwrap(), (conf + supp) / 2.0);
    }

    #[test]
    fn metrics_match_brute_force_on_decoded_rules(
        (arities, rows, g) in arb_table(4, 3, 1, 50)
            .prop_flat_map(|(a, r)| { let d = a.len(); (Just(a), Just(r), arb_genotype(d)) })
    ) {
        let cat = catalog(&arities);
        if let Some(rule) = decode(&Genotype::new(g).unwrap(), &cat) {
            let (supp, conf) = brute_metrics(&rows, rule.antecedent(), rule.consequent());
            let db = db(cat, &rows);
            let scored = ScoredRule::evaluate(rule, &db, FitnessWeights::default()).unwrap();
            prop_assert_eq!(scored.support, supp);
            prop_assert_eq!(scored.confidence, conf);
            prop_assert!((0.0..=1.0).contains(&scored.fitness));
        }
    }

    #[test]
    fn weighted_fitness_is_the_weighted_mean(
        alpha in 0.0f64..5.0, beta in 0.0f64..5.0, s in 0.0f64..=1.0, c in 0.0f64..=1.0
    ) {
        prop_assume!(alpha + beta > 0.0);
        let w = FitnessWeights::new(alpha, beta).unwrap();
        let f = w.combine(s, c);
        prop_assert!((f - (alpha * c + beta * s) / (alpha + beta)).abs() < 1e-12);
        prop_assert!(f >= s.min(c) - 1e-12 && f <= s.max(c) + 1e-12);
    }
}
