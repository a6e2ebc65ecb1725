//! Two-good partial-equilibrium view: demand and supply curves for good 1
//! with the numeraire price pinned to 1, and the crossing cross-check against
//! the general-equilibrium solver.

use crate::consumer::{inverse_marginal_utility, PriceVector};
use crate::economy::Economy;
use crate::error::{Error, Result};
use crate::excess::excess_demand;

/// Tabulated demand and supply curves over an increasing price grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    /// Strictly increasing prices of good 1.
    pub grid: Vec<f64>,
    /// Aggregate demand for good 1 at each grid price.
    pub demand: Vec<f64>,
    /// Market supply of good 1: producer netput plus the fixed aggregate
    /// endowment, so that demand minus supply is the market-1 excess demand.
    pub supply: Vec<f64>,
    /// zeta_1(p, 1) at each grid price; equals demand - supply.
    pub excess: Vec<f64>,
}

impl CurveTable {
    /// First grid interval on which the excess demand changes sign.
    pub fn crossing_bracket(&self) -> Option<(f64, f64)> {
        self.excess
            .windows(2)
            .position(|w| w[0] > 0.0 && w[1] <= 0.0)
            .map(|i| (self.grid[i], self.grid[i + 1]))
    }

    /// CSV export: `p,D,S,excess`, 17 significant digits.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "p,D,S,excess")?;
        for i in 0..self.grid.len() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                self.grid[i], self.demand[i], self.supply[i], self.excess[i]
            )?;
        }
        Ok(())
    }
}

/// Tabulates the good-1 demand and supply curves of a two-good economy.
pub fn partial_eq_curves(economy: &Economy, grid: &[f64]) -> Result<CurveTable> {
    if economy.l != 2 {
        return Err(Error::NotTwoGoods);
    }
    if grid.is_empty() {
        return Err(Error::BadDimensions("price grid must be nonempty".into()));
    }
    if grid.iter().any(|p| !(*p > 0.0) || !p.is_finite()) {
        return Err(Error::PriceOutOfDomain("grid prices must be strictly positive".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::BadDimensions("price grid must be strictly increasing".into()));
    }

    let endowment_1: f64 = economy.consumers.iter().map(|c| c.endowment[0]).sum();
    let mut demand = Vec::with_capacity(grid.len());
    let mut supply = Vec::with_capacity(grid.len());
    let mut excess = Vec::with_capacity(grid.len());
    for &p1 in grid {
        let prices = PriceVector::new(vec![p1, 1.0])?;
        let mut d = 0.0;
        for c in &economy.consumers {
            d += inverse_marginal_utility(&c.utility, &[p1])?[0];
        }
        let r = excess_demand(economy, &prices)?;
        let produced: f64 = r.supplies.iter().map(|y| y[0]).sum();
        demand.push(d);
        supply.push(produced + endowment_1);
        excess.push(r.zeta[0]);
    }
    Ok(CurveTable { grid: grid.to_vec(), demand, supply, excess })
}
