//! Equilibrium computation: damped Newton with the numeraire pinned to 1,
//! multi-start uniqueness verification, and the bordered-determinant index.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::consumer::PriceVector;
use crate::economy::Economy;
use crate::error::{Error, Result};
use crate::excess::{excess_demand, excess_jacobian};

pub const SOLVER_RESIDUAL_TOL: f64 = 1e-10;
pub const CLUSTER_RADIUS: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct EquilibriumReport {
    /// Normalized to unit Euclidean norm.
    pub p_star: PriceVector,
    /// ||zeta(p_star)|| at the normalized point.
    pub residual: f64,
    /// Poincare-Hopf index; absent when the solve did not converge.
    pub index: Option<i32>,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct UniquenessReport {
    pub starts: usize,
    /// (normalized representative, member count) per cluster.
    pub clusters: Vec<(PriceVector, usize)>,
    pub max_intra_cluster_distance: f64,
    pub max_inter_cluster_distance: f64,
    pub unique: bool,
}

fn zeta_norm_at(economy: &Economy, tilde: &[f64]) -> Result<(Vec<f64>, f64)> {
    let mut p = tilde.to_vec();
    p.push(1.0);
    let r = excess_demand(economy, &PriceVector::new(p)?)?;
    let norm = r.zeta_norm();
    Ok((r.zeta, norm))
}

/// Damped Newton on the reduced system `zeta~(p~, 1) = 0`.
///
/// The numeraire market then clears by Walras' law. The Jacobian is a central
/// finite difference; steps are halved until the residual decreases and the
/// iterate stays strictly positive.
pub fn find_equilibrium(economy: &Economy, p0: &PriceVector) -> Result<EquilibriumReport> {
    let l = economy.l;
    if p0.len() != l {
        return Err(Error::BadDimensions(format!("p0 length {} != L={l}", p0.len())));
    }
    let mut tilde: Vec<f64> = p0.tilde().iter().map(|p| p / p0.numeraire()).collect();
    let (_, mut norm) = zeta_norm_at(economy, &tilde)?;
    let mut iterations = 0;
    let mut converged = norm <= SOLVER_RESIDUAL_TOL;

    while !converged && iterations < 100 {
        iterations += 1;
        // Reduced FD Jacobian, columns in the non-numeraire prices only.
        let n = l - 1;
        let mut jac = DMatrix::<f64>::zeros(n, n);
        let mut g = DVector::<f64>::zeros(n);
        {
            let (zeta, _) = zeta_norm_at(economy, &tilde)?;
            for j in 0..n {
                g[j] = zeta[j];
            }
        }
        for k in 0..n {
            let h = 1e-6 * tilde[k].max(1e-6);
            let mut up = tilde.clone();
            let mut down = tilde.clone();
            up[k] += h;
            down[k] = (down[k] - h).max(down[k] * 0.5);
            let (zu, _) = zeta_norm_at(economy, &up)?;
            let (zd, _) = zeta_norm_at(economy, &down)?;
            let denom = up[k] - down[k];
            for j in 0..n {
                jac[(j, k)] = (zu[j] - zd[j]) / denom;
            }
        }
        let lu = jac.lu();
        let direction = lu.solve(&(-&g)).ok_or(Error::SingularJacobian)?;

        let mut t = 1.0;
        let mut advanced = false;
        while t >= 1e-12 {
            let candidate: Vec<f64> =
                tilde.iter().zip(direction.iter()).map(|(p, d)| p + t * d).collect();
            if candidate.iter().all(|p| *p > 0.0) {
                if let Ok((_, cand_norm)) = zeta_norm_at(economy, &candidate) {
                    if cand_norm < norm {
                        tilde = candidate;
                        norm = cand_norm;
                        advanced = true;
                        break;
                    }
                }
            }
            t *= 0.5;
        }
        if !advanced {
            break;
        }
        converged = norm <= SOLVER_RESIDUAL_TOL;
    }

    let mut full = tilde.clone();
    full.push(1.0);
    let p_star = PriceVector::new(full)?.normalized();
    // zeta is homogeneous of degree zero, so the residual survives the
    // renormalization unchanged; recompute at the reported point anyway.
    let residual = excess_demand(economy, &p_star)?.zeta_norm();
    let index = if converged {
        Some(equilibrium_index(economy, &p_star)?)
    } else {
        None
    };
    Ok(EquilibriumReport { p_star, residual, index, iterations, converged })
}

/// Runs the solver from `starts` deterministic random points on the positive
/// unit sphere (every coordinate at least 0.05) and clusters the normalized
/// results with radius [`CLUSTER_RADIUS`].
pub fn verify_uniqueness(economy: &Economy, starts: usize, seed: u64) -> Result<UniquenessReport> {
    if starts < 2 {
        return Err(Error::BadDimensions(format!("need at least 2 starts, got {starts}")));
    }
    let l = economy.l;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sample_start = || -> PriceVector {
        loop {
            let mut v: Vec<f64> = (0..l)
                .map(|_| {
                    // Box-Muller magnitude for a rotation-invariant direction.
                    let u1: f64 = rng.gen_range(1e-12..1.0);
                    let u2: f64 = rng.gen_range(0.0..1.0);
                    ((-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()).abs()
                })
                .collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                continue;
            }
            v.iter_mut().for_each(|x| *x /= norm);
            if v.iter().all(|x| *x >= 0.05) {
                return PriceVector::new(v).expect("positive by construction");
            }
        }
    };

    let mut results: Vec<PriceVector> = Vec::new();
    for _ in 0..starts {
        let p0 = sample_start();
        if let Ok(report) = find_equilibrium(economy, &p0) {
            if report.converged {
                results.push(report.p_star);
            }
        }
    }
    if results.is_empty() {
        return Err(Error::NoEquilibrium);
    }

    let distance = |a: &PriceVector, b: &PriceVector| -> f64 {
        a.values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    };

    let mut clusters: Vec<(PriceVector, Vec<PriceVector>)> = Vec::new();
    for p in results {
        match clusters.iter_mut().find(|(rep, _)| distance(rep, &p) <= CLUSTER_RADIUS) {
            Some((_, members)) => members.push(p),
            None => clusters.push((p.clone(), vec![p])),
        }
    }

    let mut max_intra: f64 = 0.0;
    for (_, members) in &clusters {
        for a in members {
            for b in members {
                max_intra = max_intra.max(distance(a, b));
            }
        }
    }
    let mut max_inter: f64 = 0.0;
    for (i, (a, _)) in clusters.iter().enumerate() {
        for (b, _) in clusters.iter().skip(i + 1) {
            max_inter = max_inter.max(distance(a, b));
        }
    }
    let unique = clusters.len() == 1;
    Ok(UniquenessReport {
        starts,
        clusters: clusters
            .into_iter()
            .map(|(rep, members)| (rep, members.len()))
            .collect(),
        max_intra_cluster_distance: max_intra,
        max_inter_cluster_distance: max_inter,
        unique,
    })
}

/// Sign of `(-1)^L` times the bordered determinant of the excess-demand
/// Jacobian at an equilibrium price.
pub fn equilibrium_index(economy: &Economy, p_star: &PriceVector) -> Result<i32> {
    let r = excess_demand(economy, p_star)?;
    let residual = r.zeta_norm();
    if residual > 1e-8 {
        return Err(Error::NoEquilibrium);
    }
    let l = economy.l;
    let jac = excess_jacobian(economy, p_star, 1e-5)?;
    let mut bordered = DMatrix::<f64>::zeros(l + 1, l + 1);
    bordered.view_mut((0, 0), (l, l)).copy_from(&jac);
    for j in 0..l {
        bordered[(j, l)] = p_star[j];
        bordered[(l, j)] = p_star[j];
    }
    let chi = bordered.determinant();
    if chi.abs() < 1e-12 {
        return Err(Error::DegenerateEquilibrium);
    }
    let sign = if l.is_multiple_of(2) { chi } else { -chi };
    Ok(if sign > 0.0 { 1 } else { -1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::economy::{desk_economy, ConsumerSpec, Economy, Mode, UtilitySpec};
    use approx::assert_abs_diff_eq;

    fn no_trade_economy() -> Economy {
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

    #[test]
    fn desk_equilibrium() {
        let e = desk_economy();
        let report =
            find_equilibrium(&e, &PriceVector::new(vec![1.0, 1.0]).unwrap()).unwrap();
        assert!(report.converged);
        assert!(report.residual <= SOLVER_RESIDUAL_TOL);
        let ratio = report.p_star[0] / report.p_star[1];
        assert_abs_diff_eq!(ratio, 2f64.powf(1.0 / 3.0), epsilon = 1e-9);
        assert_abs_diff_eq!(report.p_star.norm(), 1.0, epsilon = 1e-12);
        assert_eq!(report.index, Some(1));
    }

    #[test]
    fn no_trade_equilibrium_is_at_marginal_utility_of_endowment() {
        // Du(omega~) = 2*0.5*1^{-0.5} = 1, so p1/p2 = 1 and nobody trades.
        let report = find_equilibrium(
            &no_trade_economy(),
            &PriceVector::new(vec![3.0, 1.0]).unwrap(),
        )
        .unwrap();
        assert!(report.converged);
        assert_abs_diff_eq!(report.p_star[0] / report.p_star[1], 1.0, epsilon = 1e-9);
        assert_eq!(report.index, Some(1));
    }

    #[test]
    fn rescaled_equilibrium_is_still_an_equilibrium() {
        let e = desk_economy();
        let report =
            find_equilibrium(&e, &PriceVector::new(vec![1.0, 1.0]).unwrap()).unwrap();
        let doubled = report.p_star.scaled(2.0).unwrap();
        let r = excess_demand(&e, &doubled).unwrap();
        assert!(r.zeta_norm() <= 1e-9);
    }

    #[test]
    fn uniqueness_on_the_desk_economy() {
        let report = verify_uniqueness(&desk_economy(), 50, 1).unwrap();
        assert!(report.unique, "clusters: {}", report.clusters.len());
        assert!(report.max_intra_cluster_distance <= CLUSTER_RADIUS);
        let expected = PriceVector::new(vec![2f64.powf(1.0 / 3.0), 1.0])
            .unwrap()
            .normalized();
        let rep = &report.clusters[0].0;
        for (a, b) in rep.values().iter().zip(expected.values()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-7);
        }
    }

    #[test]
    fn uniqueness_is_deterministic() {
        let a = verify_uniqueness(&desk_economy(), 5, 42).unwrap();
        let b = verify_uniqueness(&desk_economy(), 5, 42).unwrap();
        assert_eq!(a.clusters[0].0, b.clusters[0].0);
        assert_eq!(a.clusters[0].1, b.clusters[0].1);
    }

    #[test]
    fn index_requires_an_equilibrium() {
        let e = desk_economy();
        assert!(matches!(
            equilibrium_index(&e, &PriceVector::new(vec![1.0, 1.0]).unwrap()),
            Err(Error::NoEquilibrium)
        ));
    }

    #[test]
    fn random_three_good_exchange_economy_has_one_cluster() {
        let e = crate::economy::generate_random_economy(11, 3, 2, 0).unwrap();
        let report = verify_uniqueness(&e, 50, 1).unwrap();
        assert!(report.unique);
        // Separable utilities make each market clear independently; confirm
        // the representative by bisection on each scalar market equation.
        let rep = &report.clusters[0].0;
        let p_l = rep.numeraire();
        for market in 0..2 {
            let excess_in_market = |q: f64| -> f64 {
                let mut p = rep.values().to_vec();
                p[market] = q * p_l;
                let r = excess_demand(&e, &PriceVector::new(p).unwrap()).unwrap();
                r.zeta[market]
            };
            let (mut lo, mut hi) = (1e-3, 1e3);
            assert!(excess_in_market(lo) > 0.0 && excess_in_market(hi) < 0.0);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if excess_in_market(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let root = 0.5 * (lo + hi);
            assert_abs_diff_eq!(rep[market] / p_l, root, epsilon = 1e-6);
        }
    }
}
