//! Wealth, aggregate excess demand, and its Jacobian structure.

use nalgebra::DMatrix;

use crate::consumer::{demand, slutsky, PriceVector};
use crate::economy::Economy;
use crate::error::{Error, Result};
use crate::producer::supply;

/// Excess demand at a price, with the per-consumer and per-producer pieces.
#[derive(Debug, Clone)]
pub struct ExcessResult {
    /// zeta(p) = sum_i X^i - sum_j y^j, length L.
    pub zeta: Vec<f64>,
    /// Per-consumer excess demands X^i = f^i - omega^i.
    pub per_consumer: Vec<Vec<f64>>,
    /// Producer netputs y^j.
    pub supplies: Vec<Vec<f64>>,
    /// Consumer wealths m^i(p).
    pub wealths: Vec<f64>,
}

impl ExcessResult {
    pub fn zeta_norm(&self) -> f64 {
        self.zeta.iter().map(|z| z * z).sum::<f64>().sqrt()
    }
}

/// m^i(p) = p . omega^i + sum_j theta_ij pi^j(p).
pub fn wealth(economy: &Economy, consumer: usize, prices: &PriceVector) -> Result<f64> {
    let c = economy
        .consumers
        .get(consumer)
        .ok_or(Error::IndexOutOfRange(consumer))?;
    let mut m = prices.dot(&c.endowment);
    for (j, producer) in economy.producers.iter().enumerate() {
        let theta = c.shares.get(j).copied().unwrap_or(0.0);
        if theta > 0.0 {
            m += theta * supply(producer, prices)?.profit;
        }
    }
    Ok(m)
}

/// Assembles demand, supply, and wealth into the excess demand vector.
pub fn excess_demand(economy: &Economy, prices: &PriceVector) -> Result<ExcessResult> {
    let l = economy.l;
    if prices.len() != l {
        return Err(Error::BadDimensions(format!(
            "price length {} != L={}",
            prices.len(),
            l
        )));
    }
    let supplies: Vec<Vec<f64>> = economy
        .producers
        .iter()
        .map(|pr| supply(pr, prices).map(|s| s.netput))
        .collect::<Result<_>>()?;
    let profits: Vec<f64> = supplies.iter().map(|y| prices.dot(y)).collect();

    let mut zeta = vec![0.0; l];
    let mut per_consumer = Vec::with_capacity(economy.consumers.len());
    let mut wealths = Vec::with_capacity(economy.consumers.len());
    for c in &economy.consumers {
        let mut m = prices.dot(&c.endowment);
        for (theta, pi) in c.shares.iter().zip(&profits) {
            m += theta * pi;
        }
        let d = demand(c, economy.mode, prices, m)?;
        let x: Vec<f64> = d
            .bundle
            .iter()
            .zip(&c.endowment)
            .map(|(x, w)| x - w)
            .collect();
        for (z, xi) in zeta.iter_mut().zip(&x) {
            *z += xi;
        }
        per_consumer.push(x);
        wealths.push(m);
    }
    for y in &supplies {
        for (z, yj) in zeta.iter_mut().zip(y) {
            *z -= yj;
        }
    }
    Ok(ExcessResult { zeta, per_consumer, supplies, wealths })
}

fn fd_jacobian<F>(prices: &PriceVector, step: f64, mut f: F) -> Result<DMatrix<f64>>
where
    F: FnMut(&PriceVector) -> Result<Vec<f64>>,
{
    if !(step > 0.0 && step < 0.5) {
        return Err(Error::StepOutOfRange(step));
    }
    let l = prices.len();
    let mut jac = DMatrix::<f64>::zeros(l, l);
    for k in 0..l {
        let h = step * prices[k];
        let mut up = prices.values().to_vec();
        let mut down = up.clone();
        up[k] += h;
        down[k] -= h;
        let f_up = f(&PriceVector::new(up)?)?;
        let f_down = f(&PriceVector::new(down)?)?;
        for j in 0..l {
            jac[(j, k)] = (f_up[j] - f_down[j]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Central finite-difference Jacobian of zeta, relative step `step * p_k`.
pub fn excess_jacobian(economy: &Economy, prices: &PriceVector, step: f64) -> Result<DMatrix<f64>> {
    fd_jacobian(prices, step, |p| Ok(excess_demand(economy, p)?.zeta))
}

/// Central finite-difference Jacobian of the consumer part X(p).
pub fn demand_jacobian(economy: &Economy, prices: &PriceVector, step: f64) -> Result<DMatrix<f64>> {
    fd_jacobian(prices, step, |p| {
        let r = excess_demand(economy, p)?;
        let mut x = vec![0.0; economy.l];
        for xc in &r.per_consumer {
            for (acc, v) in x.iter_mut().zip(xc) {
                *acc += v;
            }
        }
        Ok(x)
    })
}

/// Central finite-difference Jacobian of one consumer's excess demand X^i,
/// with wealth re-evaluated at each displaced price.
pub fn consumer_excess_jacobian(
    economy: &Economy,
    consumer: usize,
    prices: &PriceVector,
    step: f64,
) -> Result<DMatrix<f64>> {
    if consumer >= economy.consumers.len() {
        return Err(Error::IndexOutOfRange(consumer));
    }
    fd_jacobian(prices, step, |p| {
        Ok(excess_demand(economy, p)?.per_consumer[consumer].clone())
    })
}

/// Sum of the analytic Slutsky matrices at wealths m^i(p).
pub fn slutsky_sum(economy: &Economy, prices: &PriceVector) -> Result<DMatrix<f64>> {
    let l = economy.l;
    let mut total = DMatrix::<f64>::zeros(l, l);
    for (i, c) in economy.consumers.iter().enumerate() {
        let m = wealth(economy, i, prices)?;
        total += slutsky(c, economy.mode, prices, m)?.entries;
    }
    Ok(total)
}

/// Analytic Jacobian of X^i: the Slutsky matrix, with the numeraire row
/// corrected by the income-channel term `-(X^i_k - sum_j theta_ij y^j_k)/p_L`.
pub fn expected_consumer_excess_jacobian(
    economy: &Economy,
    consumer: usize,
    prices: &PriceVector,
) -> Result<DMatrix<f64>> {
    let c = economy
        .consumers
        .get(consumer)
        .ok_or(Error::IndexOutOfRange(consumer))?;
    let r = excess_demand(economy, prices)?;
    let m = r.wealths[consumer];
    let mut jac = slutsky(c, economy.mode, prices, m)?.entries;
    let l = economy.l;
    let p_l = prices.numeraire();
    for k in 0..l {
        let mut owned_supply = 0.0;
        for (theta, y) in c.shares.iter().zip(&r.supplies) {
            owned_supply += theta * y[k];
        }
        jac[(l - 1, k)] -= (r.per_consumer[consumer][k] - owned_supply) / p_l;
    }
    Ok(jac)
}
