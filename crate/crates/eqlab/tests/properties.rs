//! Randomized property checks over the generated economy family.

use eqlab::consumer::{demand, slutsky, PriceVector};
use eqlab::economy::{generate_random_economy, validate_economy, Economy, Mode};
use eqlab::excess::excess_demand;
use eqlab::producer::supply;
use proptest::prelude::*;

fn arb_economy() -> impl Strategy<Value = Economy> {
    (any::<u64>(), 2usize..=4, 1usize..=3, 0usize..=2)
        .prop_map(|(seed, l, n, mu)| generate_random_economy(seed, l, n, mu).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_economies_validate((seed, l, n, mu) in (any::<u64>(), 2usize..=4, 1usize..=3, 0usize..=2)) {
        let economy = generate_random_economy(seed, l, n, mu).unwrap();
        let report = validate_economy(&economy);
        prop_assert!(report.ok, "{:?}", report.violations);
    }

    #[test]
    fn economy_json_round_trips(economy in arb_economy()) {
        let text = economy.to_json_string();
        let back = Economy::from_json_str(&text).unwrap();
        prop_assert_eq!(economy, back);
    }

    #[test]
    fn walras_law(economy in arb_economy(), raw in prop::collection::vec(0.2f64..4.0, 4)) {
        let prices = PriceVector::new(raw[..economy.l].to_vec()).unwrap();
        let r = excess_demand(&economy, &prices).unwrap();
        let value = prices.dot(&r.zeta).abs();
        prop_assert!(value <= 1e-9 * (1.0 + prices.norm() * r.zeta_norm()), "p.zeta = {value}");
    }

    #[test]
    fn excess_demand_is_homogeneous(economy in arb_economy(), raw in prop::collection::vec(0.2f64..4.0, 4), factor in 0.1f64..10.0) {
        let prices = PriceVector::new(raw[..economy.l].to_vec()).unwrap();
        let base = excess_demand(&economy, &prices).unwrap();
        let scaled = excess_demand(&economy, &prices.scaled(factor).unwrap()).unwrap();
        for (a, b) in base.zeta.iter().zip(&scaled.zeta) {
            prop_assert!((a - b).abs() <= 1e-8 * (1.0 + a.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn demand_satisfies_the_budget(economy in arb_economy(), raw in prop::collection::vec(0.2f64..4.0, 4), m in 0.5f64..50.0) {
        let prices = PriceVector::new(raw[..economy.l].to_vec()).unwrap();
        for consumer in &economy.consumers {
            let d = demand(consumer, Mode::First, &prices, m).unwrap();
            prop_assert!((prices.dot(&d.bundle) - m).abs() <= 1e-9 * m.max(1.0));
        }
    }

    #[test]
    fn non_numeraire_demand_ignores_wealth(economy in arb_economy(), raw in prop::collection::vec(0.2f64..4.0, 4)) {
        let prices = PriceVector::new(raw[..economy.l].to_vec()).unwrap();
        let consumer = &economy.consumers[0];
        let lo = demand(consumer, Mode::First, &prices, 1.0).unwrap().bundle;
        let hi = demand(consumer, Mode::First, &prices, 1000.0).unwrap().bundle;
        for j in 0..economy.l - 1 {
            prop_assert_eq!(lo[j], hi[j]);
        }
    }

    #[test]
    fn slutsky_is_symmetric_and_annihilated_by_prices(economy in arb_economy(), raw in prop::collection::vec(0.2f64..4.0, 4), m in 0.5f64..50.0) {
        let l = economy.l;
        let prices = PriceVector::new(raw[..l].to_vec()).unwrap();
        let s = slutsky(&economy.consumers[0], Mode::First, &prices, m).unwrap().entries;
        for j in 0..l {
            let row: f64 = (0..l).map(|k| s[(j, k)] * prices[k]).sum();
            prop_assert!(row.abs() <= 1e-9 * (1.0 + s.abs().max()));
            for k in 0..l {
                prop_assert!((s[(j, k)] - s[(k, j)]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn supply_is_homogeneous_and_consistent(economy in arb_economy(), raw in prop::collection::vec(0.2f64..4.0, 4), factor in 0.1f64..10.0) {
        let prices = PriceVector::new(raw[..economy.l].to_vec()).unwrap();
        for producer in &economy.producers {
            let s = supply(producer, &prices).unwrap();
            prop_assert!((s.profit - prices.dot(&s.netput)).abs() <= 1e-9 * (1.0 + s.profit.abs()));
            prop_assert!(s.profit >= 0.0);
            let scaled = supply(producer, &prices.scaled(factor).unwrap()).unwrap();
            for (a, b) in s.netput.iter().zip(&scaled.netput) {
                prop_assert!((a - b).abs() <= 1e-8 * (1.0 + a.abs()));
            }
        }
    }

    #[test]
    fn price_parser_never_accepts_nonpositive(raw in prop::collection::vec(-2.0f64..3.0, 2..5)) {
        let text = raw.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
        let parsed = eqlab::cli::parse_price_list(&text);
        if raw.iter().all(|v| *v > 0.0) {
            prop_assert!(parsed.is_ok());
        } else {
            prop_assert!(parsed.is_err());
        }
    }
}
