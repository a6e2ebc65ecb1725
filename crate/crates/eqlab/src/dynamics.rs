//! Price-adjustment dynamics: `dp_j/dt = a_j zeta_j(p)`, integrated with an
//! embedded Dormand-Prince 5(4) pair, monitoring the conserved weighted norm
//! `h` and the Lyapunov distance `V` to the equilibrium ray.

use crate::consumer::PriceVector;
use crate::economy::Economy;
use crate::error::{Error, Result};
use crate::excess::excess_demand;

/// Weighted norm `h(p) = sqrt(sum a_l^{-1} p_l^2)`; conserved along the flow.
pub fn norm_h(prices: &[f64], speeds: &[f64]) -> f64 {
    prices
        .iter()
        .zip(speeds)
        .map(|(p, a)| p * p / a)
        .sum::<f64>()
        .sqrt()
}

/// Lyapunov function `V(p) = h(p - (h(p)/h(p*)) p*)^2`: squared h-distance
/// from `p` to the point on the equilibrium ray with matching h.
pub fn lyapunov_v(prices: &[f64], p_star: &[f64], speeds: &[f64]) -> f64 {
    let ratio = norm_h(prices, speeds) / norm_h(p_star, speeds);
    let displaced: Vec<f64> = prices
        .iter()
        .zip(p_star)
        .map(|(p, s)| p - ratio * s)
        .collect();
    let h = norm_h(&displaced, speeds);
    h * h
}

#[derive(Debug, Clone)]
pub struct TatonnementConfig {
    /// Adjustment speeds a_1..a_L, each > 0.
    pub speeds: Vec<f64>,
    pub t_max: f64,
    pub initial_step: f64,
    /// Per-step absolute and relative error tolerance.
    pub step_tol: f64,
    /// Record every `sample_stride`-th accepted step.
    pub sample_stride: usize,
    /// Declare convergence when ||zeta(p)|| falls below this.
    pub convergence_threshold: f64,
    /// Equilibrium ray used for the V column; when absent V is reported as NaN.
    pub v_reference: Option<Vec<f64>>,
}

impl TatonnementConfig {
    /// Defaults scaled to the starting point: tolerance 1e-10, threshold
    /// 1e-9 * (1 + ||p0||).
    pub fn with_defaults(speeds: Vec<f64>, t_max: f64, p0: &PriceVector) -> TatonnementConfig {
        TatonnementConfig {
            speeds,
            t_max,
            initial_step: 1e-3,
            step_tol: 1e-10,
            sample_stride: 1,
            convergence_threshold: 1e-9 * (1.0 + p0.norm()),
            v_reference: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Converged,
    MaxTime,
    BoundaryEscape,
    StepFailure,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Converged => "converged",
            Verdict::MaxTime => "max-time",
            Verdict::BoundaryEscape => "boundary-escape",
            Verdict::StepFailure => "step-failure",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct TraceSample {
    pub t: f64,
    pub prices: Vec<f64>,
    pub zeta: Vec<f64>,
    pub h: f64,
    pub v: f64,
}

#[derive(Debug, Clone)]
pub struct TatonnementTrace {
    pub samples: Vec<TraceSample>,
    pub verdict: Verdict,
    /// Present iff the run converged.
    pub limit: Option<PriceVector>,
    /// Max |h(p_t) - h(p_0)| / h(p_0) over the trajectory.
    pub h_drift: f64,
}

// Dormand-Prince 5(4) tableau.
const STAGES: usize = 7;
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const B5: [f64; 7] =
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates the price-adjustment ODE from `p0`.
///
/// A step that would push any price to zero or below is halved; steps whose
/// embedded error estimate exceeds the tolerance are retried with a smaller
/// step. The conserved-norm drift is measured, never enforced.
pub fn integrate_tatonnement(
    economy: &Economy,
    p0: &PriceVector,
    cfg: &TatonnementConfig,
) -> Result<TatonnementTrace> {
    let l = economy.l;
    if cfg.speeds.len() != l || p0.len() != l {
        return Err(Error::BadDimensions(format!(
            "speeds/p0 length must equal L={l}"
        )));
    }
    if cfg.speeds.iter().any(|a| !(*a > 0.0))
        || !(cfg.t_max > 0.0)
        || !(cfg.initial_step > 0.0)
        || !(cfg.step_tol > 0.0)
        || cfg.sample_stride == 0
        || !(cfg.convergence_threshold > 0.0)
    {
        return Err(Error::BadDimensions("invalid tatonnement configuration".into()));
    }

    let h0 = norm_h(p0.values(), &cfg.speeds);
    let boundary_threshold = 1e-8 * h0;

    let rhs = |p: &[f64]| -> Result<Vec<f64>> {
        let r = excess_demand(economy, &PriceVector::new(p.to_vec())?)?;
        Ok(r.zeta.iter().zip(&cfg.speeds).map(|(z, a)| a * z).collect())
    };

    let mut samples: Vec<TraceSample> = Vec::new();
    let mut h_drift: f64 = 0.0;
    let mut record = |t: f64, p: &[f64], zeta: &[f64]| {
        let h = norm_h(p, &cfg.speeds);
        let v = match &cfg.v_reference {
            Some(reference) => lyapunov_v(p, reference, &cfg.speeds),
            None => f64::NAN,
        };
        samples.push(TraceSample { t, prices: p.to_vec(), zeta: zeta.to_vec(), h, v });
        h
    };

    let mut t = 0.0;
    let mut p = p0.values().to_vec();
    let mut step = cfg.initial_step;
    let mut accepted: usize = 0;

    let r0 = excess_demand(economy, p0)?;
    record(0.0, &p, &r0.zeta);
    if r0.zeta_norm() <= cfg.convergence_threshold {
        return Ok(TatonnementTrace {
            samples,
            verdict: Verdict::Converged,
            limit: Some(p0.clone()),
            h_drift: 0.0,
        });
    }

    let mut k0 = rhs(&p)?;
    let verdict = loop {
        if t >= cfg.t_max {
            break Verdict::MaxTime;
        }
        if step < 1e-14 {
            break Verdict::StepFailure;
        }
        step = step.min(cfg.t_max - t);

        // Evaluate the seven stages; bail out of the attempt if any stage
        // point leaves the positive orthant.
        let mut stages: Vec<Vec<f64>> = Vec::with_capacity(STAGES);
        stages.push(k0.clone());
        let mut positivity_ok = true;
        for s in 0..6 {
            let mut point = p.clone();
            for (coeff, k) in A[s].iter().zip(&stages) {
                if *coeff != 0.0 {
                    for (x, kv) in point.iter_mut().zip(k) {
                        *x += step * coeff * kv;
                    }
                }
            }
            let _ = C[s];
            if point.iter().any(|x| !(*x > 0.0)) {
                positivity_ok = false;
                break;
            }
            stages.push(rhs(&point)?);
        }
        if !positivity_ok {
            step *= 0.5;
            continue;
        }

        let mut next = p.clone();
        let mut err_acc = 0.0;
        for j in 0..l {
            let mut d5 = 0.0;
            let mut d4 = 0.0;
            for (s, k) in stages.iter().enumerate() {
                d5 += B5[s] * k[j];
                d4 += B4[s] * k[j];
            }
            next[j] = p[j] + step * d5;
            let scale = cfg.step_tol + cfg.step_tol * p[j].abs().max(next[j].abs());
            let e = step * (d5 - d4) / scale;
            err_acc += e * e;
        }
        let err = (err_acc / l as f64).sqrt();

        if err > 1.0 || next.iter().any(|x| !(*x > 0.0)) {
            let shrink = if err.is_finite() && err > 0.0 {
                (0.9 * err.powf(-0.2)).clamp(0.1, 0.5)
            } else {
                0.5
            };
            step *= shrink;
            continue;
        }

        // Accepted.
        t += step;
        p = next;
        accepted += 1;
        let zeta: Vec<f64> = {
            let r = excess_demand(economy, &PriceVector::new(p.clone())?)?;
            r.zeta
        };
        k0 = zeta.iter().zip(&cfg.speeds).map(|(z, a)| a * z).collect();
        let zeta_norm = zeta.iter().map(|z| z * z).sum::<f64>().sqrt();

        let should_sample = accepted.is_multiple_of(cfg.sample_stride)
            || zeta_norm <= cfg.convergence_threshold
            || t >= cfg.t_max;
        if should_sample {
            let h = record(t, &p, &zeta);
            h_drift = h_drift.max((h - h0).abs() / h0);
        }

        if p.iter().cloned().fold(f64::INFINITY, f64::min) < boundary_threshold {
            break Verdict::BoundaryEscape;
        }
        if zeta_norm <= cfg.convergence_threshold {
            break Verdict::Converged;
        }

        let grow = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        step *= grow;
    };

    let limit = if verdict == Verdict::Converged {
        Some(PriceVector::new(p.clone())?)
    } else {
        None
    };
    Ok(TatonnementTrace { samples, verdict, limit, h_drift })
}

impl TatonnementTrace {
    /// CSV export: `t,p_1..p_L,zeta_1..zeta_L,h,V`, 17 significant digits.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        let l = self.samples.first().map(|s| s.prices.len()).unwrap_or(0);
        let mut header = String::from("t");
        for j in 1..=l {
            header.push_str(&format!(",p_{j}"));
        }
        for j in 1..=l {
            header.push_str(&format!(",zeta_{j}"));
        }
        header.push_str(",h,V");
        writeln!(out, "{header}")?;
        for s in &self.samples {
            let mut row = format!("{:.16e}", s.t);
            for p in &s.prices {
                row.push_str(&format!(",{p:.16e}"));
            }
            for z in &s.zeta {
                row.push_str(&format!(",{z:.16e}"));
            }
            row.push_str(&format!(",{:.16e},{:.16e}", s.h, s.v));
            writeln!(out, "{row}")?;
        }
        Ok(())
    }
}
