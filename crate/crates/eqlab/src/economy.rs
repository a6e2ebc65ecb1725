//! Economy instances: parametric families, validation, generation, JSON I/O.
//!
//! Utility functions are additively separable powers `u(x) = sum a_l * x_l^{b_l}`
//! with `a_l > 0` and `b_l` in the open interval (0,1); producers are
//! single-output Cobb-Douglas technologies with decreasing returns. Good
//! indices in files are 1-based; the numeraire is good `L`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which consumption space the economy uses for the numeraire good.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    /// Negative numeraire holdings are admitted.
    #[serde(rename = "first")]
    First,
    /// Numeraire holdings must be nonnegative.
    #[serde(rename = "second")]
    Second,
}

/// Separable power utility over the non-numeraire goods.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilitySpec {
    /// Marginal-utility scales, one per non-numeraire good, each > 0.
    pub a: Vec<f64>,
    /// Curvature exponents, each strictly in (0,1).
    pub b: Vec<f64>,
}

impl UtilitySpec {
    /// u(x) = sum a_l * x_l^{b_l}
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.a
            .iter()
            .zip(&self.b)
            .zip(x)
            .map(|((a, b), x)| a * x.powf(*b))
            .sum()
    }

    /// Du(x), defined for x >> 0.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.a
            .iter()
            .zip(&self.b)
            .zip(x)
            .map(|((a, b), x)| a * b * x.powf(b - 1.0))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsumerSpec {
    pub utility: UtilitySpec,
    /// Initial endowment, length L, each >= 0 and not all zero.
    pub endowment: Vec<f64>,
    /// Ownership shares in each producer, length mu, each in [0,1].
    pub shares: Vec<f64>,
}

/// Single-output Cobb-Douglas technology `y_o <= A * prod z_k^{alpha_k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProducerSpec {
    /// Output good, 1-based.
    pub output: usize,
    /// Input goods, 1-based, disjoint from the output.
    pub inputs: Vec<usize>,
    /// Output scale, > 0.
    pub scale: f64,
    /// Input exponents, one per input, each > 0, summing to < 1.
    pub alpha: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Economy {
    /// Number of goods, >= 2; good `l` is the numeraire.
    pub l: usize,
    pub mode: Mode,
    pub consumers: Vec<ConsumerSpec>,
    pub producers: Vec<ProducerSpec>,
}

/// Outcome of checking a candidate economy against the model assumptions.
///
/// Violations are data, not failures: any candidate is accepted for
/// inspection.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub ok: bool,
    /// (rule identifier, human-readable message) pairs.
    pub violations: Vec<(String, String)>,
}

/// Checks every model invariant of `economy` and reports all violations.
pub fn validate_economy(economy: &Economy) -> ValidationReport {
    let mut v: Vec<(String, String)> = Vec::new();
    let mut push = |rule: &str, msg: String| v.push((rule.to_string(), msg));

    let l = economy.l;
    if l < 2 {
        push("dimension", format!("need at least 2 goods, got {l}"));
    }
    if economy.consumers.is_empty() {
        push("consumers", "economy must have at least one consumer".into());
    }
    let mu = economy.producers.len();

    for (i, c) in economy.consumers.iter().enumerate() {
        let u = &c.utility;
        if u.a.len() != l.saturating_sub(1) || u.b.len() != l.saturating_sub(1) {
            push(
                "utility-dimension",
                format!(
                    "consumer {}: utility coefficient lengths {}/{} do not match L-1={}",
                    i + 1,
                    u.a.len(),
                    u.b.len(),
                    l.saturating_sub(1)
                ),
            );
        }
        if u.a.iter().any(|a| !(*a > 0.0) || !a.is_finite()) {
            push(
                "utility-scale",
                format!("consumer {}: all utility scales must be positive and finite", i + 1),
            );
        }
        if u.b.iter().any(|b| !(*b > 0.0 && *b < 1.0)) {
            push(
                "utility-exponent",
                format!("consumer {}: all exponents must lie strictly in (0,1)", i + 1),
            );
        }
        if c.endowment.len() != l {
            push(
                "endowment-dimension",
                format!("consumer {}: endowment length {} != L={}", i + 1, c.endowment.len(), l),
            );
        }
        if c.endowment.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            push(
                "endowment-nonnegative",
                format!("consumer {}: endowment must be nonnegative and finite", i + 1),
            );
        } else if c.endowment.iter().all(|w| *w == 0.0) {
            push("endowment-nonzero", format!("consumer {}: endowment must be nonzero", i + 1));
        }
        if c.shares.len() != mu {
            push(
                "shares-dimension",
                format!("consumer {}: share vector length {} != mu={}", i + 1, c.shares.len(), mu),
            );
        }
        if c.shares.iter().any(|t| !(*t >= 0.0 && *t <= 1.0)) {
            push("shares-range", format!("consumer {}: shares must lie in [0,1]", i + 1));
        }
    }

    for (j, pr) in economy.producers.iter().enumerate() {
        if pr.output < 1 || pr.output > l {
            push(
                "producer-output",
                format!("producer {}: output good {} out of range 1..={}", j + 1, pr.output, l),
            );
        }
        if pr.inputs.is_empty() {
            push("producer-inputs", format!("producer {}: input set must be nonempty", j + 1));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &k in &pr.inputs {
            if k < 1 || k > l {
                push(
                    "producer-inputs",
                    format!("producer {}: input good {} out of range 1..={}", j + 1, k, l),
                );
            }
            if k == pr.output {
                push(
                    "producer-inputs",
                    format!("producer {}: output good {} cannot also be an input", j + 1, k),
                );
            }
            if !seen.insert(k) {
                push("producer-inputs", format!("producer {}: duplicate input good {}", j + 1, k));
            }
        }
        if !(pr.scale > 0.0) || !pr.scale.is_finite() {
            push("producer-scale", format!("producer {}: scale must be positive and finite", j + 1));
        }
        if pr.alpha.len() != pr.inputs.len() {
            push(
                "producer-alpha",
                format!(
                    "producer {}: exponent length {} != input count {}",
                    j + 1,
                    pr.alpha.len(),
                    pr.inputs.len()
                ),
            );
        }
        if pr.alpha.iter().any(|a| !(*a > 0.0) || !a.is_finite()) {
            push("producer-alpha", format!("producer {}: all exponents must be positive", j + 1));
        }
        let sigma: f64 = pr.alpha.iter().sum();
        if !(sigma < 1.0) {
            push(
                "producer-returns",
                format!("producer {}: exponents must sum to < 1, got {}", j + 1, sigma),
            );
        }
    }

    // Shares must sum to 1 over consumers, per producer.
    for j in 0..mu {
        let total: f64 = economy
            .consumers
            .iter()
            .filter_map(|c| c.shares.get(j))
            .sum();
        if (total - 1.0).abs() > 1e-12 {
            push(
                "shares-sum",
                format!("shares must sum to 1 for producer {}, got {}", j + 1, total),
            );
        }
    }

    // Aggregate endowment must be strictly positive coordinatewise. This is a
    // condition on endowments only, regardless of what producers can make.
    for coord in 0..l {
        let total: f64 = economy
            .consumers
            .iter()
            .filter_map(|c| c.endowment.get(coord))
            .sum();
        if !(total > 0.0) {
            push(
                "aggregate-endowment",
                format!("aggregate endowment not strictly positive in coordinate {}", coord + 1),
            );
        }
    }

    ValidationReport { ok: v.is_empty(), violations: v }
}

/// Deterministically generates an economy that passes [`validate_economy`].
///
/// Ranges: a in [0.5,4], b in [0.2,0.8], non-numeraire endowments in [0,5]
/// (with 0.1 added to any zero aggregate), numeraire endowment in [5,20],
/// shares drawn from the simplex, Cobb-Douglas exponents with sum <= 0.8.
pub fn generate_random_economy(seed: u64, l: usize, n: usize, mu: usize) -> Result<Economy> {
    if l < 2 || n < 1 {
        return Err(Error::BadDimensions(format!("need L >= 2 and n >= 1, got L={l}, n={n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut consumers: Vec<ConsumerSpec> = (0..n)
        .map(|_| {
            let a: Vec<f64> = (0..l - 1).map(|_| rng.gen_range(0.5..=4.0)).collect();
            let b: Vec<f64> = (0..l - 1).map(|_| rng.gen_range(0.2..=0.8)).collect();
            let mut endowment: Vec<f64> = (0..l - 1).map(|_| rng.gen_range(0.0..=5.0)).collect();
            endowment.push(rng.gen_range(5.0..=20.0));
            ConsumerSpec { utility: UtilitySpec { a, b }, endowment, shares: Vec::new() }
        })
        .collect();

    // Simplex-distributed shares per producer.
    for _ in 0..mu {
        let raw: Vec<f64> = (0..n).map(|_| -rng.gen_range(1e-12_f64..1.0).ln()).collect();
        let total: f64 = raw.iter().sum();
        let mut acc = 0.0;
        for (i, c) in consumers.iter_mut().enumerate() {
            let share = if i + 1 == n { 1.0 - acc } else { raw[i] / total };
            acc += share;
            c.shares.push(share);
        }
    }

    let producers: Vec<ProducerSpec> = (0..mu)
        .map(|_| {
            let output = rng.gen_range(1..=l);
            let others: Vec<usize> = (1..=l).filter(|&g| g != output).collect();
            let count = rng.gen_range(1..=others.len());
            // Reservoir-free subset draw: shuffle indices by sampling without
            // replacement.
            let mut pool = others;
            let mut inputs = Vec::with_capacity(count);
            for _ in 0..count {
                let idx = rng.gen_range(0..pool.len());
                inputs.push(pool.swap_remove(idx));
            }
            inputs.sort_unstable();
            let target: f64 = rng.gen_range(0.3..=0.8);
            let raw: Vec<f64> = (0..count).map(|_| rng.gen_range(0.1..1.0)).collect();
            let raw_sum: f64 = raw.iter().sum();
            let alpha = raw.iter().map(|r| r / raw_sum * target).collect();
            ProducerSpec { output, inputs, scale: rng.gen_range(0.5..=2.0), alpha }
        })
        .collect();

    // Guarantee a strictly positive aggregate endowment in every coordinate.
    for coord in 0..l {
        let total: f64 = consumers.iter().map(|c| c.endowment[coord]).sum();
        if total == 0.0 {
            consumers[0].endowment[coord] += 0.1;
        }
    }

    Ok(Economy { l, mode: Mode::First, consumers, producers })
}

// --- JSON file schema --------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct ConsumerFile {
    a: Vec<f64>,
    b: Vec<f64>,
    omega: Vec<f64>,
    theta: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ProducerFile {
    output: usize,
    inputs: Vec<usize>,
    #[serde(rename = "A")]
    scale: f64,
    alpha: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct EconomyFile {
    #[serde(rename = "L")]
    l: usize,
    mode: Mode,
    consumers: Vec<ConsumerFile>,
    #[serde(default)]
    producers: Vec<ProducerFile>,
}

impl Economy {
    /// Parses the JSON economy-file format. Structural well-formedness only;
    /// model assumptions are checked by [`validate_economy`].
    pub fn from_json_str(text: &str) -> Result<Economy> {
        let file: EconomyFile = serde_json::from_str(text)?;
        Ok(Economy {
            l: file.l,
            mode: file.mode,
            consumers: file
                .consumers
                .into_iter()
                .map(|c| ConsumerSpec {
                    utility: UtilitySpec { a: c.a, b: c.b },
                    endowment: c.omega,
                    shares: c.theta,
                })
                .collect(),
            producers: file
                .producers
                .into_iter()
                .map(|p| ProducerSpec {
                    output: p.output,
                    inputs: p.inputs,
                    scale: p.scale,
                    alpha: p.alpha,
                })
                .collect(),
        })
    }

    pub fn to_json_string(&self) -> String {
        let file = EconomyFile {
            l: self.l,
            mode: self.mode,
            consumers: self
                .consumers
                .iter()
                .map(|c| ConsumerFile {
                    a: c.utility.a.clone(),
                    b: c.utility.b.clone(),
                    omega: c.endowment.clone(),
                    theta: c.shares.clone(),
                })
                .collect(),
            producers: self
                .producers
                .iter()
                .map(|p| ProducerFile {
                    output: p.output,
                    inputs: p.inputs.clone(),
                    scale: p.scale,
                    alpha: p.alpha.clone(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("economy serialization cannot fail")
    }

    pub fn from_json_file(path: &std::path::Path) -> Result<Economy> {
        let text = std::fs::read_to_string(path)?;
        Economy::from_json_str(&text)
    }
}

#[cfg(test)]
pub use tests::desk_economy;
