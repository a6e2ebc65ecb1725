//! Consumer-surplus line integrals along price paths.
//!
//! Non-numeraire demand is a gradient field for the separable family, so the
//! integral depends only on the endpoints; the path-independence gap and both
//! sides of the aggregate-surplus identity are computed, never assumed.

use crate::consumer::{demand, inverse_marginal_utility, PriceVector};
use crate::economy::{ConsumerSpec, Mode};
use crate::error::{Error, Result};

/// Piecewise-linear path through the open positive orthant of dimension L-1.
#[derive(Debug, Clone, PartialEq)]
pub struct PricePath {
    waypoints: Vec<Vec<f64>>,
}

impl PricePath {
    pub fn new(waypoints: Vec<Vec<f64>>) -> Result<PricePath> {
        if waypoints.len() < 2 {
            return Err(Error::BadDimensions(format!(
                "path needs at least 2 waypoints, got {}",
                waypoints.len()
            )));
        }
        let dim = waypoints[0].len();
        if dim == 0 || waypoints.iter().any(|w| w.len() != dim) {
            return Err(Error::BadDimensions("waypoints must share a positive dimension".into()));
        }
        if waypoints.iter().flatten().any(|x| !(*x > 0.0) || !x.is_finite()) {
            return Err(Error::BoundaryPath);
        }
        if waypoints.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::BadDimensions("consecutive waypoints must be distinct".into()));
        }
        Ok(PricePath { waypoints })
    }

    /// Straight segment from one price to another.
    pub fn segment(from: Vec<f64>, to: Vec<f64>) -> Result<PricePath> {
        if from == to {
            // A degenerate path integrates to zero; model it as a two-point
            // path with no displacement handled explicitly by the caller.
            return Err(Error::BadDimensions("consecutive waypoints must be distinct".into()));
        }
        PricePath::new(vec![from, to])
    }

    pub fn start(&self) -> &[f64] {
        &self.waypoints[0]
    }

    pub fn end(&self) -> &[f64] {
        self.waypoints.last().unwrap()
    }

    pub fn waypoints(&self) -> &[Vec<f64>] {
        &self.waypoints
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurplusResult {
    /// The line integral of non-numeraire demand along the path.
    pub value: f64,
    /// Accumulated adaptive-quadrature error estimate, >= 0.
    pub error_estimate: f64,
}

// 16-point Gauss-Legendre rule on [-1,1], nodes found by Newton iteration on
// the Legendre recurrence from Chebyshev initial guesses.
fn gauss_legendre_16() -> &'static (Vec<f64>, Vec<f64>) {
    use std::sync::OnceLock;
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = 16usize;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    })
}

fn segment_quadrature<F>(f: &F, a: f64, b: f64, tol: f64, depth: usize) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let (nodes, weights) = gauss_legendre_16();
    let rule = |lo: f64, hi: f64| -> Result<f64> {
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let mut acc = 0.0;
        for (x, w) in nodes.iter().zip(weights) {
            acc += w * f(mid + half * x)?;
        }
        Ok(acc * half)
    };
    let whole = rule(a, b)?;
    let mid = 0.5 * (a + b);
    let halves = rule(a, mid)? + rule(mid, b)?;
    let err = (whole - halves).abs();
    if err <= tol || depth >= 24 {
        return Ok((halves, err));
    }
    let (left, el) = segment_quadrature(f, a, mid, 0.5 * tol, depth + 1)?;
    let (right, er) = segment_quadrature(f, mid, b, 0.5 * tol, depth + 1)?;
    Ok((left + right, el + er))
}

/// `int_0^1 x~(c(t)) . c'(t) dt` over the piecewise-linear path, per-segment
/// adaptive Gauss-Legendre quadrature with target 1e-10.
///
/// The integrand is the non-numeraire demand at numeraire price 1, which does
/// not depend on wealth; `_wealth` is accepted to mirror the definition and
/// ignored.
pub fn surplus_line_integral(
    consumer: &ConsumerSpec,
    path: &PricePath,
    _wealth: f64,
) -> Result<SurplusResult> {
    if path.waypoints[0].len() != consumer.utility.a.len() {
        return Err(Error::BadDimensions(format!(
            "path dimension {} != L-1 = {}",
            path.waypoints[0].len(),
            consumer.utility.a.len()
        )));
    }
    let mut value = 0.0;
    let mut error_estimate = 0.0;
    for w in path.waypoints.windows(2) {
        let (from, to) = (&w[0], &w[1]);
        let direction: Vec<f64> = to.iter().zip(from).map(|(t, f)| t - f).collect();
        let integrand = |t: f64| -> Result<f64> {
            let point: Vec<f64> = from
                .iter()
                .zip(&direction)
                .map(|(f, d)| f + t * d)
                .collect();
            let x = inverse_marginal_utility(&consumer.utility, &point)?;
            Ok(x.iter().zip(&direction).map(|(x, d)| x * d).sum())
        };
        let (v, e) = segment_quadrature(&integrand, 0.0, 1.0, 1e-10, 0)?;
        value += v;
        error_estimate += e;
    }
    Ok(SurplusResult { value, error_estimate })
}

/// Max pairwise |V difference| over paths sharing the endpoints `from`/`to`.
pub fn path_independence_gap(
    consumer: &ConsumerSpec,
    from: &[f64],
    to: &[f64],
    paths: &[PricePath],
) -> Result<f64> {
    if paths.len() < 2 {
        return Err(Error::BadDimensions("need at least 2 paths".into()));
    }
    let close = |a: &[f64], b: &[f64]| {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-12)
    };
    let mut values = Vec::with_capacity(paths.len());
    for path in paths {
        if !close(path.start(), from) || !close(path.end(), to) {
            return Err(Error::EndpointMismatch);
        }
        values.push(surplus_line_integral(consumer, path, 1.0)?.value);
    }
    let mut gap: f64 = 0.0;
    for (i, a) in values.iter().enumerate() {
        for b in values.iter().skip(i + 1) {
            gap = gap.max((a - b).abs());
        }
    }
    Ok(gap)
}

/// Both sides of the aggregate-surplus relation, reported rather than
/// asserted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateSurplus {
    /// Aggregate line integral minus the expenditure bracket
    /// `q~.D(q~) - p~.D(p~)`.
    pub lhs: f64,
    /// Change of total utility `sum_i [U_i(f^i(q,m)) - U_i(f^i(p,m))]` with
    /// the numeraire price pinned to 1.
    pub rhs: f64,
    /// lhs - rhs.
    pub gap: f64,
}

/// Evaluates the aggregate-surplus relation between `from` and `to` along a
/// straight path. The utility change on the right side is independent of the
/// fixed wealths, which are set to a common constant internally.
pub fn aggregate_surplus_identity(
    consumers: &[ConsumerSpec],
    from: &[f64],
    to: &[f64],
) -> Result<AggregateSurplus> {
    if consumers.is_empty() {
        return Err(Error::BadDimensions("need at least one consumer".into()));
    }
    if from.iter().chain(to).any(|x| !(*x > 0.0) || !x.is_finite()) {
        return Err(Error::BoundaryPath);
    }
    if from.len() != to.len() {
        return Err(Error::EndpointMismatch);
    }
    if from == to {
        return Ok(AggregateSurplus { lhs: 0.0, rhs: 0.0, gap: 0.0 });
    }

    let path = PricePath::segment(from.to_vec(), to.to_vec())?;
    let mut line_integral = 0.0;
    for c in consumers {
        line_integral += surplus_line_integral(c, &path, 1.0)?.value;
    }

    let aggregate_demand = |point: &[f64]| -> Result<f64> {
        let mut value = 0.0;
        for c in consumers {
            let x = inverse_marginal_utility(&c.utility, point)?;
            value += point.iter().zip(&x).map(|(p, x)| p * x).sum::<f64>();
        }
        Ok(value)
    };
    let bracket = aggregate_demand(to)? - aggregate_demand(from)?;
    let lhs = line_integral - bracket;

    // Fixed-wealth utility change with p_L = 1. The numeraire cancels the
    // wealth, so the constant below does not matter; it only needs to be
    // positive.
    let wealth = 10.0;
    let mut rhs = 0.0;
    for c in consumers {
        let utility_at = |tilde: &[f64]| -> Result<f64> {
            let mut p = tilde.to_vec();
            p.push(1.0);
            let d = demand(c, Mode::First, &PriceVector::new(p.clone())?, wealth)?;
            let x_tilde = &d.bundle[..tilde.len()];
            Ok(c.utility.eval(x_tilde) + d.bundle[tilde.len()])
        };
        rhs += utility_at(to)? - utility_at(from)?;
    }
    Ok(AggregateSurplus { lhs, rhs, gap: lhs - rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::economy::UtilitySpec;
    use approx::assert_abs_diff_eq;

    fn desk_consumer() -> ConsumerSpec {
        ConsumerSpec {
            utility: UtilitySpec { a: vec![2.0], b: vec![0.5] },
            endowment: vec![0.0, 10.0],
            shares: vec![],
        }
    }

    fn three_good_consumer() -> ConsumerSpec {
        ConsumerSpec {
            utility: UtilitySpec { a: vec![2.0, 2.0], b: vec![0.5, 0.5] },
            endowment: vec![1.0, 1.0, 10.0],
            shares: vec![],
        }
    }

    /// Closed-form potential for one power term: integral of
    /// (p/(ab))^{1/(b-1)} dp.
    fn potential(a: f64, b: f64, p: f64) -> f64 {
        let beta = 1.0 / (b - 1.0);
        (a * b).powf(-beta) * p.powf(beta + 1.0) / (beta + 1.0)
    }

    #[test]
    fn two_good_desk_integral() {
        // int_1^4 p^{-2} dp = 0.75 by the antiderivative -1/p.
        let path = PricePath::segment(vec![1.0], vec![4.0]).unwrap();
        for m in [1.0, 100.0] {
            let r = surplus_line_integral(&desk_consumer(), &path, m).unwrap();
            assert_abs_diff_eq!(r.value, 0.75, epsilon = 1e-10);
        }
    }

    #[test]
    fn three_good_desk_integral() {
        // Potential phi(p) = -1/p1 - 1/p2: phi(4,2) - phi(1,1) = 1.25.
        let path = PricePath::segment(vec![1.0, 1.0], vec![4.0, 2.0]).unwrap();
        let r = surplus_line_integral(&three_good_consumer(), &path, 1.0).unwrap();
        assert_abs_diff_eq!(r.value, 1.25, epsilon = 1e-8);
    }

    #[test]
    fn closed_form_potential_agreement() {
        let c = ConsumerSpec {
            utility: UtilitySpec { a: vec![1.2, 3.1], b: vec![0.35, 0.6] },
            endowment: vec![1.0, 1.0, 1.0],
            shares: vec![],
        };
        let from = [0.7, 1.4];
        let to = [2.2, 0.9];
        let path = PricePath::segment(from.to_vec(), to.to_vec()).unwrap();
        let r = surplus_line_integral(&c, &path, 1.0).unwrap();
        let expected: f64 = (0..2)
            .map(|l| {
                potential(c.utility.a[l], c.utility.b[l], to[l])
                    - potential(c.utility.a[l], c.utility.b[l], from[l])
            })
            .sum();
        assert_abs_diff_eq!(r.value, expected, epsilon = 1e-8);
    }

    #[test]
    fn path_independence() {
        let c = three_good_consumer();
        let from = vec![1.0, 1.0];
        let to = vec![4.0, 2.0];
        let straight = PricePath::segment(from.clone(), to.clone()).unwrap();
        let elbow = PricePath::new(vec![from.clone(), vec![4.0, 1.0], to.clone()]).unwrap();
        let gap = path_independence_gap(&c, &from, &to, &[straight.clone(), elbow]).unwrap();
        assert!(gap <= 1e-8, "gap {gap}");

        let duplicated =
            path_independence_gap(&c, &from, &to, &[straight.clone(), straight]).unwrap();
        assert_eq!(duplicated, 0.0);
    }

    #[test]
    fn endpoint_mismatch_rejected() {
        let c = three_good_consumer();
        let p1 = PricePath::segment(vec![1.0, 1.0], vec![4.0, 2.0]).unwrap();
        let p2 = PricePath::segment(vec![1.0, 1.0], vec![4.0, 3.0]).unwrap();
        assert!(matches!(
            path_independence_gap(&c, &[1.0, 1.0], &[4.0, 2.0], &[p1, p2]),
            Err(Error::EndpointMismatch)
        ));
    }

    #[test]
    fn boundary_path_rejected() {
        assert!(matches!(
            PricePath::segment(vec![0.0], vec![1.0]),
            Err(Error::BoundaryPath)
        ));
    }

    #[test]
    fn aggregate_identity_desk_values() {
        // Desk evaluation: line integral 0.75, bracket 4/16 - 1 = -0.75, so
        // lhs = 1.5, while the total-utility change is -0.75. The two sides
        // genuinely differ; both are reported.
        let r = aggregate_surplus_identity(&[desk_consumer()], &[1.0], &[4.0]).unwrap();
        assert_abs_diff_eq!(r.lhs, 1.5, epsilon = 1e-8);
        assert_abs_diff_eq!(r.rhs, -0.75, epsilon = 1e-8);
        assert_abs_diff_eq!(r.gap, 2.25, epsilon = 1e-8);
    }

    #[test]
    fn aggregate_identity_degenerate_endpoints() {
        let r = aggregate_surplus_identity(&[desk_consumer()], &[2.0], &[2.0]).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert_eq!(r.rhs, 0.0);
        assert_eq!(r.gap, 0.0);
    }

    #[test]
    fn envelope_relation_pins_the_integral() {
        // V = delta(p~.x~) - delta(u), each term in closed form.
        let c = desk_consumer();
        let (from, to) = (1.0, 4.0);
        let x_at = |p: f64| inverse_marginal_utility(&c.utility, &[p]).unwrap()[0];
        let expenditure = |p: f64| p * x_at(p);
        let u = |p: f64| c.utility.eval(&[x_at(p)]);
        let expected = (expenditure(to) - expenditure(from)) - (u(to) - u(from));
        let path = PricePath::segment(vec![from], vec![to]).unwrap();
        let v = surplus_line_integral(&c, &path, 1.0).unwrap().value;
        assert_abs_diff_eq!(v, expected, epsilon = 1e-8);
    }

    #[test]
    fn wealth_invariance_is_exact() {
        let c = three_good_consumer();
        let path = PricePath::segment(vec![1.0, 1.0], vec![4.0, 2.0]).unwrap();
        let base = surplus_line_integral(&c, &path, 0.1).unwrap().value;
        for m in [1.0, 1e3] {
            let v = surplus_line_integral(&c, &path, m).unwrap().value;
            assert_abs_diff_eq!(v, base, epsilon = 1e-12);
        }
    }
}
