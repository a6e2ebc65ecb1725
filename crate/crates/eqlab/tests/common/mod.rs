//! Shared fixtures for the integration suites.
// Each suite uses a different subset of the fixtures.
#![allow(dead_code)]

use eqlab::{ConsumerSpec, Economy, Mode, ProducerSpec, UtilitySpec};

/// Two-good desk instance: one consumer with u(x1) = 2 sqrt(x1), endowment
/// (0, 10), full ownership of a producer making good 1 from good 2 with
/// A = 1, alpha = 0.5. Equilibrium at p1/p2 = 2^{1/3}.
pub fn desk_economy() -> Economy {
    Economy {
        l: 2,
        mode: Mode::First,
        consumers: vec![ConsumerSpec {
            utility: UtilitySpec { a: vec![2.0], b: vec![0.5] },
            endowment: vec![0.0, 10.0],
            shares: vec![1.0],
        }],
        producers: vec![ProducerSpec {
            output: 1,
            inputs: vec![2],
            scale: 1.0,
            alpha: vec![0.5],
        }],
    }
}

/// Pure-exchange instance whose equilibrium is the no-trade point: marginal
/// utility at the endowment equals the price ratio 1.
pub fn no_trade_economy() -> Economy {
    Economy {
        l: 2,
        mode: Mode::First,
        consumers: vec![ConsumerSpec {
            utility: UtilitySpec { a: vec![2.0], b: vec![0.5] },
            endowment: vec![1.0, 5.0],
            shares: vec![],
        }],
        producers: vec![],
    }
}

/// The desk consumer alone (L = 2).
pub fn desk_consumer() -> ConsumerSpec {
    ConsumerSpec {
        utility: UtilitySpec { a: vec![2.0], b: vec![0.5] },
        endowment: vec![0.0, 10.0],
        shares: vec![],
    }
}

/// Three-good consumer with u = 2 sqrt(x1) + 2 sqrt(x2).
pub fn three_good_consumer() -> ConsumerSpec {
    ConsumerSpec {
        utility: UtilitySpec { a: vec![2.0, 2.0], b: vec![0.5, 0.5] },
        endowment: vec![1.0, 1.0, 10.0],
        shares: vec![],
    }
}

/// Equilibrium of `economy`, found from the all-ones start with a fallback
/// to multi-start sampling when Newton stalls there.
pub fn solve_star(economy: &Economy) -> eqlab::EquilibriumReport {
    let ones = eqlab::PriceVector::new(vec![1.0; economy.l]).unwrap();
    let report = eqlab::find_equilibrium(economy, &ones).unwrap();
    if report.converged {
        return report;
    }
    let fallback = eqlab::verify_uniqueness(economy, 10, 2).unwrap();
    eqlab::find_equilibrium(economy, &fallback.clusters[0].0).unwrap()
}

/// Deterministic shape parameters for a generated economy, derived from the
/// seed: L in {2,3,4}, n in {1,2,3}, mu in {0,1,2}.
pub fn shape_for_seed(seed: u64) -> (usize, usize, usize) {
    let l = 2 + (seed % 3) as usize;
    let n = 1 + ((seed / 3) % 3) as usize;
    let mu = ((seed / 9) % 3) as usize;
    (l, n, mu)
}
