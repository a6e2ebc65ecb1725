//! Numerical laboratory for quasi-linear general-equilibrium economies.
//!
//! Demand, supply, and excess demand are evaluated in closed form; the
//! equilibrium price is found by damped Newton iteration and checked for
//! uniqueness, index, and local stability under the price-adjustment ODE;
//! consumer surplus is a path-independent line integral of demand.

// Negated comparisons like `!(x > 0.0)` are used on purpose throughout:
// they reject NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod consumer;
pub mod dynamics;
pub mod economy;
pub mod error;
pub mod excess;
pub mod producer;
pub mod solve;
pub mod surplus;

pub use analysis::{partial_eq_curves, CurveTable};
pub use cli::{execute, CommandOutcome};
pub use consumer::{demand, inverse_marginal_utility, slutsky, DemandResult, PriceVector, SlutskyMatrix};
pub use dynamics::{
    integrate_tatonnement, lyapunov_v, norm_h, TatonnementConfig, TatonnementTrace, TraceSample,
    Verdict,
};
pub use economy::{
    generate_random_economy, validate_economy, ConsumerSpec, Economy, Mode, ProducerSpec,
    UtilitySpec, ValidationReport,
};
pub use error::{Error, Result};
pub use excess::{excess_demand, excess_jacobian, wealth, ExcessResult};
pub use producer::{hotelling_residual, supply, SupplyResult};
pub use solve::{
    equilibrium_index, find_equilibrium, verify_uniqueness, EquilibriumReport, UniquenessReport,
};
pub use surplus::{
    aggregate_surplus_identity, path_independence_gap, surplus_line_integral, AggregateSurplus,
    PricePath, SurplusResult,
};
