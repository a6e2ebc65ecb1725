//! Closed-form supply and profit for decreasing-returns Cobb-Douglas
//! technologies, plus the gradient identity `D pi = y` as a checkable
//! residual.

use crate::consumer::PriceVector;
use crate::economy::ProducerSpec;
use crate::error::{Error, Result};

/// Profit-maximizing netput: output positive, inputs negative, zero elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct SupplyResult {
    pub netput: Vec<f64>,
    pub profit: f64,
}

/// Solves `max p_o A prod z_k^{alpha_k} - sum p_k z_k` in closed form.
///
/// The log-linear first-order system gives output
/// `Q = (A prod (alpha_k p_o / p_k)^{alpha_k})^{1/(1-sigma)}` with
/// `sigma = sum alpha_k`, and inputs `z_k = alpha_k p_o Q / p_k`.
pub fn supply(producer: &ProducerSpec, prices: &PriceVector) -> Result<SupplyResult> {
    let l = prices.len();
    if producer.output < 1 || producer.output > l || producer.inputs.iter().any(|&k| k < 1 || k > l)
    {
        return Err(Error::BadDimensions(format!(
            "producer good indices out of range for L={l}"
        )));
    }
    let p_o = prices[producer.output - 1];
    let sigma: f64 = producer.alpha.iter().sum();

    // Work in logs so extreme price ratios stay finite.
    let mut log_q = producer.scale.ln();
    for (&k, &alpha) in producer.inputs.iter().zip(&producer.alpha) {
        log_q += alpha * (alpha * p_o / prices[k - 1]).ln();
    }
    log_q /= 1.0 - sigma;
    let output = log_q.exp();
    if !output.is_finite() {
        return Err(Error::ParameterOverflow);
    }

    let mut netput = vec![0.0; l];
    netput[producer.output - 1] = output;
    let mut cost = 0.0;
    for (&k, &alpha) in producer.inputs.iter().zip(&producer.alpha) {
        let z = alpha * p_o * output / prices[k - 1];
        netput[k - 1] = -z;
        cost += prices[k - 1] * z;
    }
    Ok(SupplyResult { netput, profit: p_o * output - cost })
}

/// Max-abs gap between a central finite difference of the profit function and
/// the supply netput, over all price coordinates.
pub fn hotelling_residual(producer: &ProducerSpec, prices: &PriceVector, step: f64) -> Result<f64> {
    let min_p = prices.values().iter().cloned().fold(f64::INFINITY, f64::min);
    if !(step > 0.0 && step < min_p / 2.0) {
        return Err(Error::StepOutOfRange(step));
    }
    let y = supply(producer, prices)?.netput;
    let mut worst: f64 = 0.0;
    for coord in 0..prices.len() {
        let mut up = prices.values().to_vec();
        let mut down = up.clone();
        up[coord] += step;
        down[coord] -= step;
        let pi_up = supply(producer, &PriceVector::new(up)?)?.profit;
        let pi_down = supply(producer, &PriceVector::new(down)?)?.profit;
        let fd = (pi_up - pi_down) / (2.0 * step);
        worst = worst.max((fd - y[coord]).abs());
    }
    Ok(worst)
}
