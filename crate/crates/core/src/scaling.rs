//! Norming constants `a_n = exp(Σ k⁻¹ e^{−k/n} P(S_k > 0))`, positivity
//! probabilities and both sides of Fristedt's identity.

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::increments::{rng_from_seed, trial_seed, IncrementLaw};
use crate::lattice::LevelMeasure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PositivitySource {
    Exact,
    Estimated,
}

/// `P(S_k > 0)` (or `P(S_k < 0)`) for `k = 1..=K`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivitySequence {
    /// Entry `k − 1` holds the value at `k`.
    pub probabilities: Vec<f64>,
    #[serde(skip)]
    pub exact: Option<Vec<BigRational>>,
    pub std_errors: Option<Vec<f64>>,
    pub source: PositivitySource,
}

impl PositivitySequence {
    pub fn exact(values: Vec<BigRational>) -> Self {
        Self {
            probabilities: values.iter().map(|p| p.to_f64().unwrap_or(f64::NAN)).collect(),
            exact: Some(values),
            std_errors: None,
            source: PositivitySource::Exact,
        }
    }

    pub fn estimated(probabilities: Vec<f64>, std_errors: Vec<f64>) -> Self {
        Self {
            probabilities,
            exact: None,
            std_errors: Some(std_errors),
            source: PositivitySource::Estimated,
        }
    }

    pub fn horizon(&self) -> usize {
        self.probabilities.len()
    }

    pub fn at(&self, k: usize) -> Option<f64> {
        k.checked_sub(1).and_then(|i| self.probabilities.get(i)).copied()
    }
}

/// Where `P(S_k > 0)` comes from when computing `a_n`.
#[derive(Debug, Clone, PartialEq)]
pub enum PositivityRule {
    Constant(f64),
    /// Symmetric simple walk: `(1 − P(S_k = 0))/2`, same for either sign.
    SimpleSymmetric,
    Table(PositivitySequence),
}

impl PositivityRule {
    /// Values for `k = 1..=k_max`, or `None` if the rule runs out.
    fn values(&self, k_max: usize) -> Option<Vec<f64>> {
        match self {
            PositivityRule::Constant(c) => Some(vec![*c; k_max]),
            PositivityRule::SimpleSymmetric => {
                let mut out = Vec::with_capacity(k_max);
                let mut u = 1.0f64;
                for k in 1..=k_max {
                    if k % 2 == 0 {
                        u *= (k - 1) as f64 / k as f64;
                        out.push((1.0 - u) / 2.0);
                    } else {
                        out.push(0.5);
                    }
                }
                Some(out)
            }
            PositivityRule::Table(t) => (t.horizon() >= k_max).then(|| t.probabilities[..k_max].to_vec()),
        }
    }
}

/// Smallest `K` with `n e^{−K/n} / K ≤ rel_tol`, which bounds `Σ_{k>K} k⁻¹ e^{−k/n}`.
pub fn truncation_bound(n: usize, rel_tol: f64) -> usize {
    let nf = n as f64;
    let mut k = 1usize;
    while nf * (-(k as f64) / nf).exp() / k as f64 > rel_tol {
        k = (k as f64 * 1.05).ceil() as usize + 1;
    }
    // walk back to the smallest admissible value
    while k > 1 && nf * (-((k - 1) as f64) / nf).exp() / (k - 1) as f64 <= rel_tol {
        k -= 1;
    }
    k
}

/// `a_n` for the given positivity input; pass negativity probabilities for `â_n`.
pub fn norming_constant(rule: &PositivityRule, n: usize, rel_tol: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Parameter("n must be positive".into()));
    }
    if !(rel_tol > 0.0) {
        return Err(Error::Parameter(format!("rel_tol must be positive, got {rel_tol}")));
    }
    let k_max = truncation_bound(n, rel_tol);
    let probs = rule.values(k_max).ok_or_else(|| {
        Error::InsufficientData(format!("positivity probabilities needed up to k = {k_max}"))
    })?;
    let nf = n as f64;
    let sum: f64 = probs
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let k = (i + 1) as f64;
            (-k / nf).exp() * p / k
        })
        .sum();
    Ok(sum.exp())
}

/// How positivity probabilities are produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PositivityMode {
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sign {
    Positive,
    Negative,
}

/// `P(S_k > 0)` for `k = 1..=k_max`.
pub fn positivity_probabilities(law: &IncrementLaw, k_max: usize, mode: PositivityMode) -> Result<PositivitySequence> {
    sign_probabilities(law, k_max, mode, Sign::Positive)
}

/// `P(S_k < 0)` for `k = 1..=k_max`, the input of `â_n`.
pub fn negativity_probabilities(law: &IncrementLaw, k_max: usize, mode: PositivityMode) -> Result<PositivitySequence> {
    sign_probabilities(law, k_max, mode, Sign::Negative)
}

fn sign_probabilities(law: &IncrementLaw, k_max: usize, mode: PositivityMode, sign: Sign) -> Result<PositivitySequence> {
    match mode {
        PositivityMode::Exact => {
            let grid = law.lattice_grid().ok_or_else(|| {
                Error::UnsupportedMode(format!("exact positivity needs a lattice law, got {}", law.description()))
            })?;
            let mut dist = LevelMeasure::dirac(0, BigRational::one());
            let mut out = Vec::with_capacity(k_max);
            for _ in 0..k_max {
                dist = dist.step(&grid.steps, &grid.probs);
                let p = dist
                    .iter()
                    .filter(|(l, _)| match sign {
                        Sign::Positive => *l > 0,
                        Sign::Negative => *l < 0,
                    })
                    .fold(BigRational::zero(), |a, (_, m)| a + m);
                out.push(p);
            }
            Ok(PositivitySequence::exact(out))
        }
        PositivityMode::MonteCarlo { samples, seed } => {
            if samples < 2 {
                return Err(Error::Parameter("Monte Carlo needs at least two samples".into()));
            }
            let counts = (0..samples as u64)
                .into_par_iter()
                .map(|t| {
                    let mut rng = rng_from_seed(trial_seed(seed, t));
                    let mut s = 0.0;
                    let mut c = vec![0u32; k_max];
                    for slot in c.iter_mut() {
                        s += law.draw(&mut rng);
                        let hit = match sign {
                            Sign::Positive => s > 0.0,
                            Sign::Negative => s < 0.0,
                        };
                        *slot = hit as u32;
                    }
                    c
                })
                .reduce(
                    || vec![0u32; k_max],
                    |mut a, b| {
                        a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                        a
                    },
                );
            let nf = samples as f64;
            let p: Vec<f64> = counts.iter().map(|&c| c as f64 / nf).collect();
            let se = p.iter().map(|q| (q * (1.0 - q) / nf).sqrt()).collect();
            Ok(PositivitySequence::estimated(p, se))
        }
    }
}

/// Both sides of `1 − E e^{−αT₁−βH₁} = exp(−Σ k⁻¹ e^{−αk} E(e^{−βS_k}; S_k > 0))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FristedtReport {
    pub alpha: f64,
    pub beta: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub tail_bound: f64,
}

impl FristedtReport {
    pub fn within_bound(&self) -> bool {
        self.residual <= self.tail_bound
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain numbers")
    }
}

/// Allowance for floating-point evaluation of the exponentials and sums.
pub const ROUNDING_ALLOWANCE: f64 = 1e-12;

/// Evaluates both sides with exact lattice masses up to `k_max` steps.
///
/// The left side follows the walk killed on first entering `(0, ∞)`; the
/// event `T₁ > K` carries weight at most `e^{−α(K+1)}`. The right side's
/// omitted terms total at most `e^{−α(K+1)} / ((K+1)(1 − e^{−α}))`. The
/// reported bound adds both and [`ROUNDING_ALLOWANCE`].
pub fn fristedt_residual(law: &IncrementLaw, alpha: f64, beta: f64, k_max: usize) -> Result<FristedtReport> {
    if alpha == 0.0 {
        return Err(Error::UnboundedTail("alpha = 0 leaves both series without a tail bound".into()));
    }
    if !(alpha > 0.0) || !(beta >= 0.0) {
        return Err(Error::Parameter(format!("need alpha > 0 and beta >= 0, got ({alpha}, {beta})")));
    }
    if k_max == 0 {
        return Err(Error::Parameter("truncation must be at least 1".into()));
    }
    let grid = law
        .lattice_grid()
        .ok_or_else(|| Error::UnsupportedMode(format!("Fristedt check needs a lattice law, got {}", law.description())))?;
    let unit = grid.unit.to_f64().unwrap_or(f64::NAN);
    let height_weight = |level: i64| (-beta * unit * level as f64).exp();

    let mut killed = LevelMeasure::dirac(0, BigRational::one());
    let mut free = killed.clone();
    let mut lhs_sum = 0.0;
    let mut rhs_sum = 0.0;
    for k in 1..=k_max {
        let damp = (-alpha * k as f64).exp();
        let (alive, crossed) = killed.step(&grid.steps, &grid.probs).split(|l| l <= 0);
        killed = alive;
        lhs_sum += damp
            * crossed
                .iter()
                .map(|(l, m)| m.to_f64().unwrap_or(f64::NAN) * height_weight(l))
                .sum::<f64>();
        free = free.step(&grid.steps, &grid.probs);
        rhs_sum += damp / k as f64
            * free
                .iter()
                .filter(|(l, _)| *l > 0)
                .map(|(l, m)| m.to_f64().unwrap_or(f64::NAN) * height_weight(l))
                .sum::<f64>();
    }
    let lhs = 1.0 - lhs_sum;
    let rhs = (-rhs_sum).exp();
    let k1 = (k_max + 1) as f64;
    let tail = (-alpha * k1).exp();
    let tail_bound = tail + tail / (k1 * (1.0 - (-alpha).exp())) + ROUNDING_ALLOWANCE;
    Ok(FristedtReport {
        alpha,
        beta,
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
        tail_bound,
    })
}
