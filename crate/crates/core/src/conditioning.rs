//! Walks conditioned to stay nonnegative and meanders.
//!
//! `V` is the renewal function of the strict descending ladder heights,
//! `V(x) = Σ_{k≥0} P(|Ĥ_k| ≤ x)`. It is harmonic for the walk killed on
//! entering `(−∞, 0)`, so `q(x, y) = V(y)/V(x) · p(y − x)` on `y ≥ 0` is a
//! Markov kernel, and a meander of length `k` has density
//! `V(0) / (P(C_k) V(x_k))` against the chain started at 0.

use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::increments::{rng_from_seed, trial_seed, IncrementLaw, LawKind, WalkPath};
use crate::lattice::LevelMeasure;
use crate::oracle::{pushforward_on, ExactDistribution, DEFAULT_BUDGET};
use crate::scaling::{norming_constant, PositivityRule, PositivitySequence};
use crate::transforms::tanaka_doney_weak;

#[derive(Debug, Clone, PartialEq)]
enum Renewal {
    /// `V(x) = Σ_{k=0}^{⌊x/u⌋} r^k` for walks whose downward steps are single units.
    Geometric {
        unit: Rational64,
        unit_f: f64,
        ratio: BigRational,
        ratio_f: f64,
    },
    Tabulated {
        step: f64,
        values: Vec<f64>,
        std_errors: Vec<f64>,
        slope: f64,
        stepwise: bool,
    },
}

/// Renewal function of the strict descending ladder heights.
#[derive(Debug, Clone, PartialEq)]
pub struct RenewalFunction {
    repr: Renewal,
    /// False when the walk drifts to −∞; `V` is then not harmonic and the
    /// kernel below is defective.
    harmonic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RenewalMode {
    Exact,
    /// Averages ladder counts over `chains` simulated descending ladder chains
    /// on `[0, x_max]`; beyond `x_max` the estimate is extended linearly.
    MonteCarlo {
        chains: usize,
        x_max: f64,
        grid_points: usize,
        seed: u64,
    },
}

/// Steps after which a descending ladder chain is treated as escaped.
const CHAIN_STEP_CAP: usize = 1 << 22;

pub fn renewal_function(law: &IncrementLaw, mode: RenewalMode) -> Result<RenewalFunction> {
    if !law.charges_negative() {
        // no descending ladder epoch is ever realized
        return Ok(RenewalFunction::geometric(Rational64::one(), BigRational::zero()));
    }
    let mut v = match mode {
        RenewalMode::Exact => exact_renewal(law)?,
        RenewalMode::MonteCarlo {
            chains,
            x_max,
            grid_points,
            seed,
        } => tabulated_renewal(law, chains, x_max, grid_points, seed)?,
    };
    v.harmonic = law.mean().is_none_or(|m| m >= 0.0);
    Ok(v)
}

fn exact_renewal(law: &IncrementLaw) -> Result<RenewalFunction> {
    let grid = law.lattice_grid().ok_or_else(|| {
        Error::UnsupportedMode(format!("exact renewal function needs a lattice law, got {}", law.description()))
    })?;
    let skip_free = grid
        .steps
        .iter()
        .zip(&grid.probs)
        .all(|(s, p)| *s >= -1 || p.is_zero());
    if !skip_free {
        return Err(Error::UnsupportedMode(
            "exact renewal function needs downward steps of one lattice unit".into(),
        ));
    }
    let mean = law.exact_mean().expect("lattice");
    let ratio = if !mean.is_positive() {
        BigRational::one()
    } else if grid.steps.iter().zip(&grid.probs).all(|(s, p)| s.abs() <= 1 || p.is_zero()) {
        let up = mass_at(&grid.steps, &grid.probs, 1);
        let down = mass_at(&grid.steps, &grid.probs, -1);
        down / up
    } else {
        return Err(Error::UnsupportedMode(
            "exact renewal function for upward drift needs steps in {-1, 0, 1}".into(),
        ));
    };
    Ok(RenewalFunction::geometric(grid.unit, ratio))
}

fn mass_at(steps: &[i64], probs: &[BigRational], s: i64) -> BigRational {
    steps
        .iter()
        .zip(probs)
        .filter(|(t, _)| **t == s)
        .fold(BigRational::zero(), |a, (_, p)| a + p)
}

fn tabulated_renewal(law: &IncrementLaw, chains: usize, x_max: f64, grid_points: usize, seed: u64) -> Result<RenewalFunction> {
    if chains < 2 || grid_points < 2 || !(x_max > 0.0) {
        return Err(Error::Parameter("need chains >= 2, grid_points >= 2 and x_max > 0".into()));
    }
    let (step, points, stepwise) = match law.lattice_grid() {
        Some(g) => {
            let u = g.unit.to_f64().unwrap_or(f64::NAN);
            (u, (x_max / u).floor() as usize + 1, true)
        }
        None => (x_max / (grid_points - 1) as f64, grid_points, false),
    };
    let (sum, sum_sq) = (0..chains as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_from_seed(trial_seed(seed, t));
            let mut diff = vec![0.0f64; points + 1];
            diff[0] += 1.0;
            let (mut s, mut min) = (0.0f64, 0.0f64);
            for _ in 0..CHAIN_STEP_CAP {
                s += law.draw(&mut rng);
                if s < min {
                    min = s;
                    let idx = if stepwise {
                        (-s / step - 1e-9).ceil().max(0.0) as usize
                    } else {
                        (-s / step).ceil() as usize
                    };
                    if idx >= points {
                        break;
                    }
                    diff[idx] += 1.0;
                }
            }
            let mut c = 0.0;
            let counts: Vec<f64> = diff[..points]
                .iter()
                .map(|d| {
                    c += d;
                    c
                })
                .collect();
            let sq = counts.iter().map(|x| x * x).collect::<Vec<_>>();
            (counts, sq)
        })
        .reduce(
            || (vec![0.0; points], vec![0.0; points]),
            |(mut a, mut b), (c, d)| {
                a.iter_mut().zip(c).for_each(|(x, y)| *x += y);
                b.iter_mut().zip(d).for_each(|(x, y)| *x += y);
                (a, b)
            },
        );
    let n = chains as f64;
    let values: Vec<f64> = sum.iter().map(|s| s / n).collect();
    let std_errors = values
        .iter()
        .zip(&sum_sq)
        .map(|(m, q)| ((q / n - m * m).max(0.0) / (n - 1.0)).sqrt())
        .collect();
    let half = points / 2;
    let slope = (values[points - 1] - values[half]) / ((points - 1 - half).max(1) as f64 * step);
    Ok(RenewalFunction {
        repr: Renewal::Tabulated {
            step,
            values,
            std_errors,
            slope,
            stepwise,
        },
        harmonic: true,
    })
}

impl RenewalFunction {
    fn geometric(unit: Rational64, ratio: BigRational) -> Self {
        Self {
            repr: Renewal::Geometric {
                unit_f: unit.to_f64().unwrap_or(f64::NAN),
                unit,
                ratio_f: ratio.to_f64().unwrap_or(f64::NAN),
                ratio,
            },
            harmonic: true,
        }
    }

    pub fn is_harmonic(&self) -> bool {
        self.harmonic
    }

    fn require_harmonic(&self) -> Result<()> {
        if self.harmonic {
            Ok(())
        } else {
            Err(Error::HypothesisViolation(
                "the walk drifts to -infinity, so V is not harmonic for the killed walk".into(),
            ))
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.repr, Renewal::Geometric { .. })
    }

    /// `V(x)`, zero for `x < 0`.
    pub fn eval(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match &self.repr {
            Renewal::Geometric { unit_f, ratio_f, .. } => {
                // tolerate rounding in path values that sit on the lattice
                let m = (x / unit_f + 1e-9).floor();
                if *ratio_f == 1.0 {
                    m + 1.0
                } else {
                    (1.0 - ratio_f.powf(m + 1.0)) / (1.0 - ratio_f)
                }
            }
            Renewal::Tabulated {
                step,
                values,
                slope,
                stepwise,
                ..
            } => {
                let pos = x / step;
                let last = values.len() - 1;
                if pos >= last as f64 {
                    return values[last] + slope * (x - last as f64 * step);
                }
                if *stepwise {
                    values[(pos + 1e-9).floor() as usize]
                } else {
                    let i = pos.floor() as usize;
                    let f = pos - i as f64;
                    values[i] * (1.0 - f) + values[i + 1] * f
                }
            }
        }
    }

    /// Standard error of [`eval`](Self::eval); zero in exact mode.
    pub fn std_error(&self, x: f64) -> f64 {
        match &self.repr {
            Renewal::Geometric { .. } => 0.0,
            Renewal::Tabulated { step, std_errors, .. } => {
                let i = ((x.max(0.0) / step).round() as usize).min(std_errors.len() - 1);
                std_errors[i]
            }
        }
    }

    /// Exact `V(x)` on the lattice; `None` for estimated renewal functions.
    pub fn eval_exact(&self, x: Rational64) -> Option<BigRational> {
        match &self.repr {
            Renewal::Geometric { unit, ratio, .. } => {
                if x.is_negative() {
                    return Some(BigRational::zero());
                }
                let m = (x / unit).floor().to_integer();
                let mut term = BigRational::one();
                let mut total = BigRational::zero();
                for _ in 0..=m {
                    total += &term;
                    term *= ratio;
                }
                Some(total)
            }
            Renewal::Tabulated { .. } => None,
        }
    }
}

fn degenerate(x: f64) -> Error {
    Error::DegenerateState(format!("V({x}) = 0, no conditioned transition from a negative state"))
}

/// Exact row `y ↦ q(x, y)` of the kernel for lattice laws with exact `V`.
pub fn h_kernel_row(law: &IncrementLaw, v: &RenewalFunction, x: Rational64) -> Result<Vec<(Rational64, BigRational)>> {
    let (support, probs) = law
        .lattice_parts()
        .ok_or_else(|| Error::UnsupportedMode("exact kernel rows need a lattice law".into()))?;
    v.require_harmonic()?;
    let vx = v
        .eval_exact(x)
        .ok_or_else(|| Error::UnsupportedMode("exact kernel rows need an exact renewal function".into()))?;
    if vx.is_zero() {
        return Err(degenerate(x.to_f64().unwrap_or(f64::NAN)));
    }
    let mut row = Vec::new();
    for (s, p) in support.iter().zip(probs) {
        let y = x + s;
        let vy = v.eval_exact(y).expect("exact");
        if !vy.is_zero() && !p.is_zero() {
            row.push((y, p * vy / &vx));
        }
    }
    Ok(row)
}

/// Proposals allowed per continuous kernel step.
const KERNEL_PROPOSAL_CAP: usize = 1_000_000;

/// One step of the conditioned chain from `x ≥ 0`.
///
/// Lattice laws draw from the exact row. Gaussian laws use rejection from the
/// free step with acceptance `V(y)/V(x + 10σ)`; mass beyond `x + 10σ` is
/// neglected.
pub fn h_kernel_step<R: Rng + ?Sized>(law: &IncrementLaw, v: &RenewalFunction, x: f64, rng: &mut R) -> Result<f64> {
    v.require_harmonic()?;
    let vx = v.eval(x);
    if !(vx > 0.0) {
        return Err(degenerate(x));
    }
    match law.kind() {
        LawKind::Lattice { .. } => {
            let (support, _) = law.lattice_parts().expect("lattice");
            let probs = lattice_probs_f64(law);
            let u: f64 = rng.random::<f64>() * vx;
            let mut acc = 0.0;
            let mut last = None;
            for (s, p) in support.iter().zip(&probs) {
                let y = x + s.to_f64().unwrap_or(f64::NAN);
                let w = p * v.eval(y);
                if w > 0.0 {
                    acc += w;
                    last = Some(y);
                    if u < acc {
                        return Ok(y);
                    }
                }
            }
            last.ok_or_else(|| degenerate(x))
        }
        LawKind::Gaussian { stddev, .. } => {
            let cap = v.eval(x + 10.0 * stddev);
            for _ in 0..KERNEL_PROPOSAL_CAP {
                let y = x + law.draw(rng);
                if y >= 0.0 && rng.random::<f64>() * cap < v.eval(y) {
                    return Ok(y);
                }
            }
            Err(Error::Budget {
                message: format!("no accepted kernel proposal from x = {x}"),
                acceptance_rate: 0.0,
            })
        }
        LawKind::SymmetricStable { .. } => Err(Error::UnsupportedMode(
            "kernel rejection needs a light-tailed law; use the Tanaka–Doney method".into(),
        )),
    }
}

fn lattice_probs_f64(law: &IncrementLaw) -> Vec<f64> {
    law.lattice_parts()
        .map(|(_, p)| p.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect())
        .unwrap_or_default()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConditionedMethod<'a> {
    HChain(&'a RenewalFunction),
    /// Weak-ladder Tanaka–Doney transform of a free walk, run until a weak
    /// ladder epoch at or after the requested length; at most `max_steps` steps.
    /// For oscillating walks the cap is hit with probability of order
    /// `sqrt(length / max_steps)`.
    TanakaDoney { max_steps: usize },
}

/// Path of the walk conditioned to stay nonnegative, started at 0.
pub fn conditioned_walk(law: &IncrementLaw, length: usize, seed: u64, method: ConditionedMethod<'_>) -> Result<WalkPath<f64>> {
    if length == 0 {
        return Err(Error::Parameter("conditioned walk length must be at least 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    match method {
        ConditionedMethod::HChain(v) => {
            let mut values = Vec::with_capacity(length + 1);
            values.push(0.0);
            let mut x = 0.0;
            for _ in 0..length {
                x = h_kernel_step(law, v, x, &mut rng)?;
                values.push(x);
            }
            WalkPath::new(values)
        }
        ConditionedMethod::TanakaDoney { max_steps } => {
            let mut values = vec![0.0f64];
            let mut level = 0.0f64;
            let mut s = 0.0f64;
            while values.len() <= max_steps {
                s += law.draw(&mut rng);
                values.push(s);
                if s >= level {
                    level = s;
                    if values.len() - 1 >= length {
                        let td = tanaka_doney_weak(&WalkPath::new(values)?);
                        return Ok(td.truncated(length));
                    }
                }
            }
            Err(Error::Budget {
                message: format!("no weak ladder epoch at or after {length} within {max_steps} steps"),
                acceptance_rate: 0.0,
            })
        }
    }
}

/// `P(C_k) = P(S_1 ≥ 0, …, S_k ≥ 0)` with its uncertainty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurvivalEstimate {
    pub k: usize,
    pub value: f64,
    #[serde(serialize_with = "ser_opt_ratio")]
    pub exact: Option<BigRational>,
    /// Zero for the recursions; binomial standard error for Monte Carlo.
    pub std_error: f64,
}

fn ser_opt_ratio<S: serde::Serializer>(v: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_str(&r.to_string()),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurvivalMode {
    /// Rational recursion over reachable levels.
    Exact,
    /// The same recursion in `f64`, for long horizons.
    Float,
    MonteCarlo { samples: usize, seed: u64 },
}

pub fn survival_probability(law: &IncrementLaw, k: usize, mode: SurvivalMode) -> Result<SurvivalEstimate> {
    match mode {
        SurvivalMode::Exact => {
            let grid = lattice_or_unsupported(law)?;
            let mut m = LevelMeasure::dirac(0, BigRational::one());
            for _ in 0..k {
                m = m.step(&grid.steps, &grid.probs).split(|l| l >= 0).0;
            }
            let p = m.total();
            Ok(SurvivalEstimate {
                k,
                value: p.to_f64().unwrap_or(f64::NAN),
                exact: Some(p),
                std_error: 0.0,
            })
        }
        SurvivalMode::Float => {
            let curve = survival_curve(law, k)?;
            Ok(SurvivalEstimate {
                k,
                value: curve[k],
                exact: None,
                std_error: 0.0,
            })
        }
        SurvivalMode::MonteCarlo { samples, seed } => {
            if samples < 2 {
                return Err(Error::Parameter("Monte Carlo needs at least two samples".into()));
            }
            let hits: usize = (0..samples as u64)
                .into_par_iter()
                .map(|t| {
                    let mut rng = rng_from_seed(trial_seed(seed, t));
                    let mut s = 0.0;
                    for _ in 0..k {
                        s += law.draw(&mut rng);
                        if s < 0.0 {
                            return 0;
                        }
                    }
                    1
                })
                .sum();
            let p = hits as f64 / samples as f64;
            Ok(SurvivalEstimate {
                k,
                value: p,
                exact: None,
                std_error: (p * (1.0 - p) / samples as f64).sqrt(),
            })
        }
    }
}

fn lattice_or_unsupported(law: &IncrementLaw) -> Result<crate::increments::LatticeGrid> {
    law.lattice_grid().ok_or_else(|| {
        Error::UnsupportedMode(format!("survival recursion needs a lattice law, got {}", law.description()))
    })
}

/// `P(C_j)` for `j = 0..=k_max` by the `f64` recursion.
pub fn survival_curve(law: &IncrementLaw, k_max: usize) -> Result<Vec<f64>> {
    let grid = lattice_or_unsupported(law)?;
    let probs: Vec<f64> = grid.probs.iter().map(|p| p.to_f64().unwrap_or(f64::NAN)).collect();
    let mut m = LevelMeasure::dirac(0, 1.0f64);
    let mut out = Vec::with_capacity(k_max + 1);
    out.push(1.0);
    for _ in 0..k_max {
        m = m.step(&grid.steps, &probs).split(|l| l >= 0).0;
        out.push(m.total());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeanderMethod<'a> {
    /// Free walks kept when they stay nonnegative; `max_attempts` in total.
    Rejection { max_attempts: usize },
    /// Conditioned-chain paths weighted by `V(0)/(P(C_k) V(S_k))`.
    Reweight { renewal: &'a RenewalFunction, survival: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanderBatch {
    pub paths: Vec<WalkPath<f64>>,
    pub weights: Option<Vec<f64>>,
    /// Free walks drawn by the rejection sampler.
    pub attempts: usize,
}

impl MeanderBatch {
    pub fn acceptance_rate(&self) -> Option<f64> {
        (self.weights.is_none() && self.attempts > 0).then(|| self.paths.len() as f64 / self.attempts as f64)
    }

    pub fn endpoints(&self) -> Vec<f64> {
        self.paths.iter().map(|p| p.last()).collect()
    }

    /// One row per path, `S_0, …, S_k` then the weight when present.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (i, p) in self.paths.iter().enumerate() {
            let mut row: Vec<String> = p.values().iter().map(|v| v.to_string()).collect();
            if let Some(w) = &self.weights {
                row.push(w[i].to_string());
            }
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// `samples` meanders of length `k`; sample `i` uses stream `trial_seed(seed, i)`.
pub fn meander_sample(law: &IncrementLaw, k: usize, samples: usize, seed: u64, method: MeanderMethod<'_>) -> Result<MeanderBatch> {
    if k == 0 || samples == 0 {
        return Err(Error::Parameter("meander length and sample count must be positive".into()));
    }
    match method {
        MeanderMethod::Rejection { max_attempts } => {
            let per_sample = (max_attempts / samples).max(1);
            let results: Vec<(Option<WalkPath<f64>>, usize)> = (0..samples as u64)
                .into_par_iter()
                .map(|i| {
                    let mut rng = rng_from_seed(trial_seed(seed, i));
                    'attempt: for a in 1..=per_sample {
                        let mut values = Vec::with_capacity(k + 1);
                        values.push(0.0);
                        let mut s = 0.0;
                        for _ in 0..k {
                            s += law.draw(&mut rng);
                            if s < 0.0 {
                                continue 'attempt;
                            }
                            values.push(s);
                        }
                        return (Some(WalkPath::new(values).expect("starts at zero")), a);
                    }
                    (None, per_sample)
                })
                .collect();
            let attempts: usize = results.iter().map(|r| r.1).sum();
            let accepted = results.iter().filter(|r| r.0.is_some()).count();
            if accepted < samples {
                return Err(Error::Budget {
                    message: format!("{accepted} of {samples} meanders accepted within {attempts} attempts"),
                    acceptance_rate: accepted as f64 / attempts as f64,
                });
            }
            Ok(MeanderBatch {
                paths: results.into_iter().filter_map(|r| r.0).collect(),
                weights: None,
                attempts,
            })
        }
        MeanderMethod::Reweight { renewal, survival } => {
            if !(survival > 0.0 && survival <= 1.0) {
                return Err(Error::Parameter(format!("survival probability must lie in (0,1], got {survival}")));
            }
            let v0 = renewal.eval(0.0);
            let paths = (0..samples as u64)
                .into_par_iter()
                .map(|i| conditioned_walk(law, k, trial_seed(seed, i), ConditionedMethod::HChain(renewal)))
                .collect::<Result<Vec<_>>>()?;
            let weights = paths.iter().map(|p| v0 / (survival * renewal.eval(p.last()))).collect();
            Ok(MeanderBatch {
                paths,
                weights: Some(weights),
                attempts: 0,
            })
        }
    }
}

/// Exact law of the first `length` steps of the conditioned chain, keyed by path values.
pub fn exact_chain_distribution(law: &IncrementLaw, v: &RenewalFunction, length: usize) -> Result<ExactDistribution<Vec<Rational64>>> {
    let (support, _) = law
        .lattice_parts()
        .ok_or_else(|| Error::UnsupportedMode("exact chain law needs a lattice law".into()))?;
    let leaves = (support.len() as u128).checked_pow(length as u32).unwrap_or(u128::MAX);
    if leaves > DEFAULT_BUDGET {
        return Err(Error::Budget {
            message: format!("{} ^ {length} chain paths exceed the enumeration budget", support.len()),
            acceptance_rate: 0.0,
        });
    }
    let mut out = ExactDistribution::default();
    let mut stack: Vec<(Vec<Rational64>, BigRational)> = vec![(vec![Rational64::zero()], BigRational::one())];
    while let Some((path, mass)) = stack.pop() {
        if path.len() == length + 1 {
            out.add(path, mass);
            continue;
        }
        for (y, q) in h_kernel_row(law, v, *path.last().unwrap())? {
            let mut next = path.clone();
            next.push(y);
            stack.push((next, &mass * q));
        }
    }
    Ok(out)
}

/// Exact meander law of length `k` (paths of the free walk on `C_k`, normalized).
pub fn exact_meander_distribution(law: &IncrementLaw, k: usize) -> Result<ExactDistribution<Vec<Rational64>>> {
    let sub = pushforward_on(law, k, |_, p| {
        p.values()
            .iter()
            .all(|v| !v.is_negative())
            .then(|| p.values().to_vec())
    })?;
    sub.normalized()
}

/// One row of the harmonic-limit table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicRow {
    pub n: usize,
    pub x: f64,
    pub a_hat_n: f64,
    pub p_cn: f64,
    /// `â_n P(C_n)`.
    pub product: f64,
    /// `V(x c_n)` with `c_n = σ√n`.
    pub v_at_x: f64,
    /// `P(C_n) V(x c_n)`.
    pub harmonic_product: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicReport {
    pub rows: Vec<HarmonicRow>,
    /// Relative change of `â_n P(C_n)` between successive grid points.
    pub relative_changes: Vec<f64>,
    /// Set when the law never steps down, so the limit is not regular downwards.
    pub degenerate: bool,
}

impl HarmonicReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,x,a_hat_n,P_Cn,product,V_at_x,harmonic_product\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.n, r.x, r.a_hat_n, r.p_cn, r.product, r.v_at_x, r.harmonic_product
            ));
        }
        s
    }
}

/// Largest `K · width` handled by the floating-point convolution for `â_n`.
const NEGATIVITY_WORK_CAP: f64 = 5e8;

/// Negativity input for `â_n` of a lattice law.
fn negativity_rule(law: &IncrementLaw, n_max: usize, rel_tol: f64) -> Result<PositivityRule> {
    let grid = lattice_or_unsupported(law)?;
    let symmetric_simple = law.is_symmetric() && grid.steps.iter().all(|s| s.abs() == 1);
    if symmetric_simple {
        return Ok(PositivityRule::SimpleSymmetric);
    }
    let k_max = crate::scaling::truncation_bound(n_max, rel_tol);
    let span = (grid.max_step() - grid.min_step()) as f64;
    if k_max as f64 * k_max as f64 * span > NEGATIVITY_WORK_CAP {
        return Err(Error::InsufficientData(format!(
            "negativity probabilities up to k = {k_max} are beyond the convolution budget"
        )));
    }
    let probs: Vec<f64> = grid.probs.iter().map(|p| p.to_f64().unwrap_or(f64::NAN)).collect();
    let mut m = LevelMeasure::dirac(0, 1.0f64);
    let mut out = Vec::with_capacity(k_max);
    for _ in 0..k_max {
        m = m.step(&grid.steps, &probs);
        out.push(m.iter().filter(|(l, _)| *l < 0).map(|(_, p)| *p).sum());
    }
    Ok(PositivityRule::Table(PositivitySequence::estimated(out, vec![0.0; k_max])))
}

/// `â_n P(C_n)` and `P(C_n) V(x c_n)` over an `n` grid for a lattice law.
pub fn harmonic_limits(law: &IncrementLaw, xs: &[f64], ns: &[usize], rel_tol: f64) -> Result<HarmonicReport> {
    if ns.is_empty() || xs.iter().any(|x| *x < 0.0) {
        return Err(Error::Parameter("need a nonempty n grid and nonnegative x".into()));
    }
    let n_max = *ns.iter().max().unwrap();
    let degenerate = !law.charges_negative();
    let sigma = law
        .variance()
        .filter(|v| *v > 0.0)
        .map(f64::sqrt)
        .unwrap_or(1.0);
    let v = renewal_function(law, RenewalMode::Exact)?;
    let survival = survival_curve(law, n_max)?;
    let rule = if degenerate {
        PositivityRule::Constant(0.0)
    } else {
        negativity_rule(law, n_max, rel_tol)?
    };
    let mut rows = Vec::new();
    let mut products = Vec::new();
    for &n in ns {
        let a_hat = norming_constant(&rule, n, rel_tol)?;
        let p = survival[n];
        products.push(a_hat * p);
        for &x in xs {
            let vx = v.eval(x * sigma * (n as f64).sqrt());
            rows.push(HarmonicRow {
                n,
                x,
                a_hat_n: a_hat,
                p_cn: p,
                product: a_hat * p,
                v_at_x: vx,
                harmonic_product: p * vx,
            });
        }
    }
    let relative_changes = products.windows(2).map(|w| (w[1] - w[0]).abs() / w[0].abs()).collect();
    Ok(HarmonicReport {
        rows,
        relative_changes,
        degenerate,
    })
}

/// Exact path probability under the free walk.
pub fn free_path_probability(law: &IncrementLaw, path: &[Rational64]) -> Option<BigRational> {
    let (support, probs) = law.lattice_parts()?;
    let mut mass = BigRational::one();
    for w in path.windows(2) {
        let d = w[1] - w[0];
        let i = support.iter().position(|s| *s == d)?;
        mass *= &probs[i];
    }
    Some(mass)
}

/// Exact `P(C_k)` as a big rational.
pub fn exact_survival(law: &IncrementLaw, k: usize) -> Result<BigRational> {
    Ok(survival_probability(law, k, SurvivalMode::Exact)?
        .exact
        .expect("exact mode"))
}
