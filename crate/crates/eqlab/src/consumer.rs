//! Closed-form quasi-linear demand and the Slutsky matrix.
//!
//! With `u(x) = sum a_l x_l^{b_l}`, the first-order condition `Du(x) = p`
//! inverts componentwise, so demand for the non-numeraire goods depends only
//! on the normalized prices `p_l / p_L`, and the numeraire absorbs the budget.

use nalgebra::DMatrix;

use crate::economy::{ConsumerSpec, Mode, UtilitySpec};
use crate::error::{Error, Result};

/// Strictly positive, finite price tuple. The first L-1 entries are the
/// non-numeraire prices; the last entry is the numeraire price.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceVector {
    values: Vec<f64>,
}

impl PriceVector {
    pub fn new(values: Vec<f64>) -> Result<PriceVector> {
        if values.len() < 2 {
            return Err(Error::BadDimensions(format!(
                "price vector needs at least 2 entries, got {}",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return Err(Error::PriceOutOfDomain(format!("entry {bad} is not strictly positive")));
        }
        Ok(PriceVector { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The non-numeraire prices.
    pub fn tilde(&self) -> &[f64] {
        &self.values[..self.values.len() - 1]
    }

    pub fn numeraire(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn scaled(&self, factor: f64) -> Result<PriceVector> {
        PriceVector::new(self.values.iter().map(|v| v * factor).collect())
    }

    /// Rescaled to unit Euclidean norm.
    pub fn normalized(&self) -> PriceVector {
        let norm = self.norm();
        PriceVector { values: self.values.iter().map(|v| v / norm).collect() }
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        self.values.iter().zip(other).map(|(p, x)| p * x).sum()
    }
}

impl std::ops::Index<usize> for PriceVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

/// A utility-maximizing bundle.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandResult {
    /// The chosen bundle, length L.
    pub bundle: Vec<f64>,
    /// True iff the second-type constraint `x_L >= 0` binds.
    pub boundary: bool,
    /// Budget multiplier; 1 at interior points, > 1 on the boundary branch.
    pub multiplier: f64,
}

/// Slutsky substitution matrix at an interior demand point.
#[derive(Debug, Clone)]
pub struct SlutskyMatrix {
    pub entries: DMatrix<f64>,
}

/// Solves `Du(x) = p` componentwise: `x_l = (p_l / (a_l b_l))^{1/(b_l - 1)}`.
pub fn inverse_marginal_utility(utility: &UtilitySpec, prices: &[f64]) -> Result<Vec<f64>> {
    if prices.len() != utility.a.len() {
        return Err(Error::BadDimensions(format!(
            "price length {} != utility dimension {}",
            prices.len(),
            utility.a.len()
        )));
    }
    if prices.iter().any(|p| !(*p > 0.0) || !p.is_finite()) {
        return Err(Error::PriceOutOfDomain("inverse marginal utility needs p >> 0".into()));
    }
    let mut x = Vec::with_capacity(prices.len());
    for ((a, b), p) in utility.a.iter().zip(&utility.b).zip(prices) {
        let value = (p / (a * b)).powf(1.0 / (b - 1.0));
        if !value.is_finite() {
            return Err(Error::ParameterOverflow);
        }
        x.push(value);
    }
    Ok(x)
}

/// Utility-maximizing demand at prices `p` and wealth `m`.
///
/// First-type: the non-numeraire bundle comes from the inverse marginal
/// utility at normalized prices and the numeraire absorbs the rest of the
/// budget, possibly going negative. Second-type: if that numeraire holding
/// would be negative, all wealth is spent on the other goods instead and the
/// budget multiplier is found by bisection.
pub fn demand(
    consumer: &ConsumerSpec,
    mode: Mode,
    prices: &PriceVector,
    wealth: f64,
) -> Result<DemandResult> {
    if !(wealth > 0.0) || !wealth.is_finite() {
        return Err(Error::NonpositiveWealth(wealth));
    }
    let p_l = prices.numeraire();
    let q_tilde: Vec<f64> = prices.tilde().iter().map(|p| p / p_l).collect();
    let x_tilde = inverse_marginal_utility(&consumer.utility, &q_tilde)?;
    let spent: f64 = q_tilde.iter().zip(&x_tilde).map(|(q, x)| q * x).sum();
    let x_numeraire = wealth / p_l - spent;

    if mode == Mode::First || x_numeraire >= 0.0 {
        let mut bundle = x_tilde;
        bundle.push(x_numeraire);
        return Ok(DemandResult { bundle, boundary: false, multiplier: 1.0 });
    }

    // Second-type boundary branch: maximize u subject to p~ . x~ <= m with
    // x_L = 0. Expenditure is strictly decreasing in the multiplier, so
    // bracket and bisect.
    let p_tilde = prices.tilde();
    let expenditure = |lambda: f64| -> Result<f64> {
        let scaled: Vec<f64> = p_tilde.iter().map(|p| lambda * p).collect();
        let x = inverse_marginal_utility(&consumer.utility, &scaled)?;
        Ok(p_tilde.iter().zip(&x).map(|(p, x)| p * x).sum())
    };

    let mut lo = 1.0;
    let mut hi = 1.0;
    while expenditure(lo)? < wealth {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(Error::ParameterOverflow);
        }
    }
    while expenditure(hi)? > wealth {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::ParameterOverflow);
        }
    }
    let mut lambda = 0.5 * (lo + hi);
    for _ in 0..200 {
        lambda = 0.5 * (lo + hi);
        let e = expenditure(lambda)?;
        if (e - wealth).abs() <= 1e-10 * wealth {
            break;
        }
        if e > wealth {
            lo = lambda;
        } else {
            hi = lambda;
        }
    }
    let scaled: Vec<f64> = p_tilde.iter().map(|p| lambda * p).collect();
    let mut bundle = inverse_marginal_utility(&consumer.utility, &scaled)?;
    bundle.push(0.0);
    Ok(DemandResult { bundle, boundary: true, multiplier: lambda })
}

/// Analytic Slutsky matrix at an interior demand point.
///
/// The upper-left block is the derivative of the normalized inverse marginal
/// utility (diagonal for the separable family); the numeraire row and column
/// are forced by `S p = 0` and `p^T S = 0`.
pub fn slutsky(
    consumer: &ConsumerSpec,
    mode: Mode,
    prices: &PriceVector,
    wealth: f64,
) -> Result<SlutskyMatrix> {
    if mode == Mode::Second {
        let d = demand(consumer, mode, prices, wealth)?;
        if d.boundary {
            return Err(Error::SlutskyAtBoundary);
        }
    }
    let l = prices.len();
    let p_l = prices.numeraire();
    let utility = &consumer.utility;
    let mut s = DMatrix::<f64>::zeros(l, l);

    // Upper-left diagonal: d/dp_j of x_j(p_j / p_L). With x(q) = C q^beta,
    // dx/dq = beta x / q.
    for j in 0..l - 1 {
        let q = prices[j] / p_l;
        let x = (q / (utility.a[j] * utility.b[j])).powf(1.0 / (utility.b[j] - 1.0));
        if !x.is_finite() {
            return Err(Error::ParameterOverflow);
        }
        let beta = 1.0 / (utility.b[j] - 1.0);
        s[(j, j)] = beta * x / q / p_l;
    }
    // Null-space completion.
    for j in 0..l - 1 {
        let mut acc = 0.0;
        for k in 0..l - 1 {
            acc += s[(j, k)] * prices[k];
        }
        s[(j, l - 1)] = -acc / p_l;
        s[(l - 1, j)] = s[(j, l - 1)];
    }
    let mut acc = 0.0;
    for j in 0..l - 1 {
        acc += prices[j] * s[(j, l - 1)];
    }
    s[(l - 1, l - 1)] = -acc / p_l;

    Ok(SlutskyMatrix { entries: s })
}
