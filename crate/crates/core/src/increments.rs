//! Increment laws, seeded walk generation and skeletons of fine paths.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{Float, One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::str::FromStr;

/// Step distribution of a walk.
#[derive(Debug, Clone, PartialEq)]
pub enum LawKind {
    /// Finitely supported law on rationals with exact rational masses.
    Lattice {
        support: Vec<Rational64>,
        probs: Vec<BigRational>,
    },
    Gaussian { mean: f64, stddev: f64 },
    /// Symmetric stable law with characteristic function `exp(-|scale·u|^tail_index)`,
    /// drawn with the Chambers–Mallows–Stuck representation. `tail_index = 1` is
    /// the Cauchy law with the given scale.
    SymmetricStable { tail_index: f64, scale: f64 },
}

#[derive(Debug, Clone)]
pub struct IncrementLaw {
    kind: LawKind,
    description: String,
    // lattice sampling table: cumulative masses as f64 and support as f64
    cumulative: Vec<f64>,
    support_f64: Vec<f64>,
}

impl PartialEq for IncrementLaw {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.description == other.description
    }
}

/// A lattice law rewritten on the integer grid `unit·ℤ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeGrid {
    /// Grid spacing: every support point is an integer multiple of it.
    pub unit: Rational64,
    pub steps: Vec<i64>,
    pub probs: Vec<BigRational>,
}

impl LatticeGrid {
    pub fn min_step(&self) -> i64 {
        *self.steps.iter().min().expect("nonempty support")
    }

    pub fn max_step(&self) -> i64 {
        *self.steps.iter().max().expect("nonempty support")
    }

    pub fn level_value(&self, level: i64) -> Rational64 {
        self.unit * Rational64::from_integer(level)
    }
}

impl IncrementLaw {
    pub fn new(kind: LawKind, description: impl Into<String>) -> Result<Self> {
        let (cumulative, support_f64) = match &kind {
            LawKind::Lattice { support, probs } => {
                if support.is_empty() || support.len() != probs.len() {
                    return Err(Error::Parameter(
                        "lattice law needs matching nonempty support and probabilities".into(),
                    ));
                }
                if probs.iter().any(|p| p.is_negative()) {
                    return Err(Error::Parameter("negative lattice probability".into()));
                }
                let total: BigRational = probs.iter().cloned().sum();
                if !total.is_one() {
                    return Err(Error::Parameter(format!(
                        "lattice probabilities sum to {total}, not 1"
                    )));
                }
                let mut sorted = support.clone();
                sorted.sort();
                sorted.dedup();
                if sorted.len() != support.len() {
                    return Err(Error::Parameter("duplicate lattice support point".into()));
                }
                let mut acc = 0.0;
                let cumulative = probs
                    .iter()
                    .map(|p| {
                        acc += p.to_f64().unwrap_or(0.0);
                        acc
                    })
                    .collect();
                let support_f64 = support.iter().map(|s| Scalar::to_f64(*s)).collect();
                (cumulative, support_f64)
            }
            LawKind::Gaussian { mean, stddev } => {
                if !(stddev.is_finite() && *stddev > 0.0) || !mean.is_finite() {
                    return Err(Error::Parameter(format!(
                        "gaussian needs finite mean and stddev > 0, got ({mean}, {stddev})"
                    )));
                }
                (Vec::new(), Vec::new())
            }
            LawKind::SymmetricStable { tail_index, scale } => {
                if !(*tail_index > 0.0 && *tail_index <= 2.0) {
                    return Err(Error::Parameter(format!(
                        "tail index must lie in (0, 2], got {tail_index}"
                    )));
                }
                if !(scale.is_finite() && *scale > 0.0) {
                    return Err(Error::Parameter(format!("stable scale must be > 0, got {scale}")));
                }
                (Vec::new(), Vec::new())
            }
        };
        Ok(Self {
            kind,
            description: description.into(),
            cumulative,
            support_f64,
        })
    }

    pub fn lattice(support: Vec<Rational64>, probs: Vec<BigRational>) -> Result<Self> {
        let description = format!("lattice on {} points", support.len());
        Self::new(LawKind::Lattice { support, probs }, description)
    }

    /// Simple symmetric walk, steps ±1 with mass 1/2 each.
    pub fn fair_coin() -> Self {
        Self::biased_coin(ratio(1, 2)).expect("valid law").described("fair ±1")
    }

    /// Steps +1 with probability `p_up`, −1 otherwise.
    pub fn biased_coin(p_up: BigRational) -> Result<Self> {
        let q = BigRational::one() - &p_up;
        if p_up.is_negative() || q.is_negative() {
            return Err(Error::Parameter(format!("p_up = {p_up} outside [0,1]")));
        }
        let (support, probs): (Vec<_>, Vec<_>) = [(-1, q), (1, p_up.clone())]
            .into_iter()
            .filter(|(_, p)| !p.is_zero())
            .map(|(s, p)| (Rational64::from_integer(s), p))
            .unzip();
        Self::new(LawKind::Lattice { support, probs }, format!("±1 with p_up = {p_up}"))
    }

    /// Uniform law on {−1, 0, +1}.
    pub fn uniform_three() -> Self {
        Self::new(
            LawKind::Lattice {
                support: (-1..=1).map(Rational64::from_integer).collect(),
                probs: vec![ratio(1, 3); 3],
            },
            "uniform {-1,0,1}",
        )
        .expect("valid law")
    }

    pub fn point_mass(x: Rational64) -> Self {
        Self::new(
            LawKind::Lattice {
                support: vec![x],
                probs: vec![BigRational::one()],
            },
            format!("point mass at {x}"),
        )
        .expect("valid law")
    }

    pub fn gaussian(mean: f64, stddev: f64) -> Result<Self> {
        Self::new(
            LawKind::Gaussian { mean, stddev },
            format!("gaussian({mean}, {stddev})"),
        )
    }

    pub fn symmetric_stable(tail_index: f64, scale: f64) -> Result<Self> {
        Self::new(
            LawKind::SymmetricStable { tail_index, scale },
            format!("symmetric stable(index {tail_index}, scale {scale})"),
        )
    }

    pub fn cauchy() -> Self {
        Self::symmetric_stable(1.0, 1.0).expect("valid law").described("cauchy")
    }

    pub fn described(mut self, description: impl Into<String>) -> Self {
        self.description = description.into();
        self
    }

    pub fn kind(&self) -> &LawKind {
        &self.kind
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn is_lattice(&self) -> bool {
        matches!(self.kind, LawKind::Lattice { .. })
    }

    /// Support points and masses of a lattice law.
    pub fn lattice_parts(&self) -> Option<(&[Rational64], &[BigRational])> {
        match &self.kind {
            LawKind::Lattice { support, probs } => Some((support, probs)),
            _ => None,
        }
    }

    /// The lattice law on its integer grid; `None` for non-lattice laws.
    pub fn lattice_grid(&self) -> Option<LatticeGrid> {
        let (support, probs) = self.lattice_parts()?;
        let denominator = support.iter().fold(1i64, |acc, s| acc.lcm(s.denom()));
        let scaled: Vec<i64> = support
            .iter()
            .map(|s| (s * Rational64::from_integer(denominator)).to_integer())
            .collect();
        let g = scaled.iter().fold(0i64, |acc, z| acc.gcd(z)).max(1);
        Some(LatticeGrid {
            unit: Rational64::new(g, denominator),
            steps: scaled.iter().map(|z| z / g).collect(),
            probs: probs.to_vec(),
        })
    }

    pub fn mean(&self) -> Option<f64> {
        match &self.kind {
            LawKind::Lattice { .. } => Some(
                self.support_f64
                    .iter()
                    .zip(self.masses_f64())
                    .map(|(s, p)| s * p)
                    .sum(),
            ),
            LawKind::Gaussian { mean, .. } => Some(*mean),
            LawKind::SymmetricStable { tail_index, .. } => (*tail_index > 1.0).then_some(0.0),
        }
    }

    /// Exact mean of a lattice law.
    pub fn exact_mean(&self) -> Option<BigRational> {
        let (support, probs) = self.lattice_parts()?;
        Some(
            support
                .iter()
                .zip(probs)
                .map(|(s, p)| to_big(*s) * p)
                .sum(),
        )
    }

    pub fn variance(&self) -> Option<f64> {
        match &self.kind {
            LawKind::Lattice { .. } => {
                let m = self.mean()?;
                Some(
                    self.support_f64
                        .iter()
                        .zip(self.masses_f64())
                        .map(|(s, p)| (s - m) * (s - m) * p)
                        .sum(),
                )
            }
            LawKind::Gaussian { stddev, .. } => Some(stddev * stddev),
            LawKind::SymmetricStable {
                tail_index, scale, ..
            } => (*tail_index == 2.0).then_some(2.0 * scale * scale),
        }
    }

    fn masses_f64(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.cumulative
            .iter()
            .map(|c| {
                let p = c - prev;
                prev = *c;
                p
            })
            .collect()
    }

    /// Whether the law charges `(0, ∞)`.
    pub fn charges_positive(&self) -> bool {
        match &self.kind {
            LawKind::Lattice { support, probs } => support
                .iter()
                .zip(probs)
                .any(|(s, p)| s.is_positive() && p.is_positive()),
            _ => true,
        }
    }

    /// Whether the law charges `(−∞, 0)`.
    pub fn charges_negative(&self) -> bool {
        match &self.kind {
            LawKind::Lattice { support, probs } => support
                .iter()
                .zip(probs)
                .any(|(s, p)| s.is_negative() && p.is_positive()),
            _ => true,
        }
    }

    /// Law of `−Y`.
    pub fn is_symmetric(&self) -> bool {
        match &self.kind {
            LawKind::Lattice { support, probs } => support.iter().zip(probs).all(|(s, p)| {
                support
                    .iter()
                    .position(|t| *t == -*s)
                    .is_some_and(|j| probs[j] == *p)
            }),
            LawKind::Gaussian { mean, .. } => *mean == 0.0,
            LawKind::SymmetricStable { .. } => true,
        }
    }

    /// True for laws without atoms.
    pub fn is_diffuse(&self) -> bool {
        !self.is_lattice()
    }

    /// Draws one increment.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.kind {
            LawKind::Lattice { .. } => {
                let last = self.support_f64.len() - 1;
                if last == 0 {
                    return self.support_f64[0];
                }
                let u: f64 = rng.random::<f64>() * self.cumulative[last];
                let idx = self.cumulative.partition_point(|c| *c <= u).min(last);
                self.support_f64[idx]
            }
            LawKind::Gaussian { mean, stddev } => {
                let z: f64 = StandardNormal.sample(rng);
                mean + stddev * z
            }
            LawKind::SymmetricStable { tail_index, scale } => {
                scale * symmetric_stable_draw(*tail_index, rng)
            }
        }
    }
}

fn symmetric_stable_draw<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    // uniform angle on (-π/2, π/2), kept away from the endpoints
    let v = (rng.random::<f64>().clamp(1e-15, 1.0 - 1e-15) - 0.5) * PI;
    if (alpha - 1.0).abs() < 1e-12 {
        return v.tan();
    }
    let w: f64 = Exp1.sample(rng);
    (alpha * v).sin() / v.cos().powf(1.0 / alpha)
        * (((1.0 - alpha) * v).cos() / w).powf((1.0 - alpha) / alpha)
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_big(r: Rational64) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum LawRepr {
    Lattice {
        support: Vec<String>,
        probs: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        description: Option<String>,
    },
    Gaussian {
        mean: f64,
        stddev: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        description: Option<String>,
    },
    SymmetricStable {
        tail_index: f64,
        #[serde(default = "unit_scale")]
        scale: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        description: Option<String>,
    },
}

fn unit_scale() -> f64 {
    1.0
}

impl Serialize for IncrementLaw {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let description = Some(self.description.clone());
        let repr = match &self.kind {
            LawKind::Lattice { support, probs } => LawRepr::Lattice {
                support: support.iter().map(|s| s.to_string()).collect(),
                probs: probs.iter().map(|p| p.to_string()).collect(),
                description,
            },
            LawKind::Gaussian { mean, stddev } => LawRepr::Gaussian {
                mean: *mean,
                stddev: *stddev,
                description,
            },
            LawKind::SymmetricStable { tail_index, scale } => LawRepr::SymmetricStable {
                tail_index: *tail_index,
                scale: *scale,
                description,
            },
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IncrementLaw {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = LawRepr::deserialize(deserializer)?;
        let law = match repr {
            LawRepr::Lattice {
                support,
                probs,
                description,
            } => {
                let support = support
                    .iter()
                    .map(|s| Rational64::from_str(s.trim()))
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| D::Error::custom(format!("bad support point: {e}")))?;
                let probs = probs
                    .iter()
                    .map(|s| BigRational::from_str(s.trim()))
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| D::Error::custom(format!("bad probability: {e}")))?;
                let d = description.unwrap_or_else(|| format!("lattice on {} points", support.len()));
                IncrementLaw::new(LawKind::Lattice { support, probs }, d)
            }
            LawRepr::Gaussian {
                mean,
                stddev,
                description,
            } => IncrementLaw::new(
                LawKind::Gaussian { mean, stddev },
                description.unwrap_or_else(|| format!("gaussian({mean}, {stddev})")),
            ),
            LawRepr::SymmetricStable {
                tail_index,
                scale,
                description,
            } => IncrementLaw::new(
                LawKind::SymmetricStable { tail_index, scale },
                description.unwrap_or_else(|| format!("symmetric stable({tail_index})")),
            ),
        };
        law.map_err(D::Error::custom)
    }
}

/// A finite walk `S_0 = 0, S_1, …, S_m`, optionally killed.
///
/// A kill index `j` marks the lifetime: entries at indices `≥ j` are frozen at
/// the pre-death value `values[j-1]` (or at 0 when `j = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct WalkPath<T> {
    values: Vec<T>,
    kill_index: Option<usize>,
}

impl<T: Scalar> WalkPath<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        match values.first() {
            None => Err(Error::Input("a walk path needs at least S_0".into())),
            Some(v) if !v.is_zero() => Err(Error::Input(format!("S_0 must be 0, got {v:?}"))),
            Some(_) => Ok(Self {
                values,
                kill_index: None,
            }),
        }
    }

    /// Partial sums of `increments`, starting at 0.
    pub fn from_increments<I: IntoIterator<Item = T>>(increments: I) -> Self {
        let mut acc = T::zero();
        let mut values = vec![acc];
        for y in increments {
            acc = acc + y;
            values.push(acc);
        }
        Self {
            values,
            kill_index: None,
        }
    }

    /// Kills the path at index `j`, freezing every later entry.
    pub fn killed_at(mut self, j: usize) -> Result<Self> {
        let m = self.len();
        if j > m {
            return Err(Error::Dimension(format!("kill index {j} beyond length {m}")));
        }
        let frozen = if j == 0 { T::zero() } else { self.values[j - 1] };
        for v in &mut self.values[j..] {
            *v = frozen;
        }
        self.kill_index = Some(j);
        Ok(self)
    }

    /// Number of steps `m`.
    pub fn len(&self) -> usize {
        self.values.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn kill_index(&self) -> Option<usize> {
        self.kill_index
    }

    pub fn last(&self) -> T {
        *self.values.last().expect("nonempty path")
    }

    pub fn increments(&self) -> impl Iterator<Item = T> + '_ {
        self.values.windows(2).map(|w| w[1] - w[0])
    }

    /// The reflected path `−S`.
    pub fn negated(&self) -> Self {
        Self {
            values: self.values.iter().map(|v| -*v).collect(),
            kill_index: self.kill_index,
        }
    }

    /// Prefix `S_0..=S_k`.
    pub fn truncated(&self, k: usize) -> Self {
        Self {
            values: self.values[..=k.min(self.len())].to_vec(),
            kill_index: self.kill_index.filter(|&j| j <= k),
        }
    }

    pub fn to_f64(&self) -> WalkPath<f64> {
        WalkPath {
            values: self.values.iter().map(|v| v.to_f64()).collect(),
            kill_index: self.kill_index,
        }
    }
}

/// Mixes a master seed with a trial index into an independent stream seed.
pub fn trial_seed(master_seed: u64, trial_index: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(trial_index.wrapping_add(0x9E37_79B9_7F4A_7C15)))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Samples `length` steps of `law`; a pure function of `(law, length, seed)`.
pub fn sample_walk<F: Float + Scalar>(law: &IncrementLaw, length: usize, seed: u64) -> Result<WalkPath<F>> {
    if length == 0 {
        return Err(Error::Parameter("walk length must be at least 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    Ok(sample_walk_with(law, length, &mut rng))
}

pub fn sample_walk_with<F: Float + Scalar, R: Rng + ?Sized>(
    law: &IncrementLaw,
    length: usize,
    rng: &mut R,
) -> WalkPath<F> {
    let mut acc = 0.0f64;
    let mut values = Vec::with_capacity(length + 1);
    values.push(F::zero());
    for _ in 0..length {
        acc += law.draw(rng);
        values.push(F::from(acc).unwrap_or_else(F::nan));
    }
    WalkPath {
        values,
        kill_index: None,
    }
}

/// Subsamples a path on the coarse grid: `out[j] = path[stride·j]`.
///
/// The skeleton of a killed path is returned without a kill index; its frozen
/// tail still carries the pre-death value.
pub fn skeleton<T: Scalar>(path: &WalkPath<T>, stride: usize) -> Result<WalkPath<T>> {
    if stride == 0 || path.len() % stride != 0 {
        return Err(Error::Dimension(format!(
            "stride {stride} does not divide path length {}",
            path.len()
        )));
    }
    Ok(WalkPath {
        values: path.values.iter().step_by(stride).copied().collect(),
        kill_index: if stride == 1 { path.kill_index } else { None },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational64 {
        Rational64::from_integer(n)
    }

    #[test]
    fn point_mass_walk_is_deterministic_ramp() {
        let law = IncrementLaw::point_mass(r(1));
        let p: WalkPath<f64> = sample_walk(&law, 3, 7).unwrap();
        assert_eq!(p.values(), &[0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn same_seed_same_path() {
        for law in [IncrementLaw::gaussian(0.0, 1.0).unwrap(), IncrementLaw::cauchy(), IncrementLaw::fair_coin()] {
            let a: WalkPath<f64> = sample_walk(&law, 500, 42).unwrap();
            let b: WalkPath<f64> = sample_walk(&law, 500, 42).unwrap();
            assert_eq!(a, b);
            let c: WalkPath<f64> = sample_walk(&law, 500, 43).unwrap();
            assert_ne!(a, c);
        }
    }

    #[test]
    fn zero_length_is_rejected() {
        let law = IncrementLaw::fair_coin();
        assert!(matches!(sample_walk::<f64>(&law, 0, 1), Err(Error::Parameter(_))));
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(IncrementLaw::gaussian(0.0, 0.0).is_err());
        assert!(IncrementLaw::symmetric_stable(2.5, 1.0).is_err());
        assert!(IncrementLaw::symmetric_stable(0.0, 1.0).is_err());
        assert!(IncrementLaw::lattice(vec![r(1), r(-1)], vec![ratio(1, 2), ratio(1, 3)]).is_err());
        assert!(IncrementLaw::lattice(vec![r(1), r(-1)], vec![ratio(3, 2), ratio(-1, 2)]).is_err());
    }

    #[test]
    fn fair_coin_endpoint_mean_within_clt_band() {
        // S_m/√m has mean 0 and variance 1; the mean of 1000 copies has stddev 1/√1000
        let law = IncrementLaw::fair_coin();
        let m = 10_000;
        let trials = 1_000;
        let mean: f64 = (0..trials)
            .map(|t| sample_walk::<f64>(&law, m, trial_seed(11, t)).unwrap().last() / (m as f64).sqrt())
            .sum::<f64>()
            / trials as f64;
        assert!(mean.abs() <= 4.0 / (trials as f64).sqrt(), "mean {mean}");
    }

    #[test]
    fn skeleton_examples() {
        let p = WalkPath::new((0..=8).map(|i| (i * i) as f64).collect()).unwrap();
        let s = skeleton(&p, 2).unwrap();
        assert_eq!(s.values(), &[0.0, 4.0, 16.0, 36.0, 64.0]);
        assert_eq!(skeleton(&p, 1).unwrap(), p);
        assert_eq!(skeleton(&s, 2).unwrap(), skeleton(&p, 4).unwrap());
        assert!(matches!(skeleton(&p, 3), Err(Error::Dimension(_))));
        assert!(matches!(skeleton(&p, 0), Err(Error::Dimension(_))));
    }

    #[test]
    fn killed_path_freezes() {
        let p = WalkPath::new(vec![0.0, 1.0, -1.0, 3.0, 5.0]).unwrap().killed_at(2).unwrap();
        assert_eq!(p.values(), &[0.0, 1.0, 1.0, 1.0, 1.0]);
        assert_eq!(p.kill_index(), Some(2));
    }

    #[test]
    fn lattice_json_round_trip_uses_fraction_strings() {
        let law = IncrementLaw::lattice(vec![r(-1), r(2)], vec![ratio(5, 8), ratio(3, 8)]).unwrap();
        let json = serde_json::to_string(&law).unwrap();
        assert!(json.contains("\"3/8\""), "{json}");
        assert!(json.contains("\"kind\":\"lattice\""));
        let back: IncrementLaw = serde_json::from_str(&json).unwrap();
        assert_eq!(back, law);
        let bad = r#"{"kind":"lattice","support":["1","-1"],"probs":["1/2","1/4"]}"#;
        assert!(serde_json::from_str::<IncrementLaw>(bad).is_err());
        let g: IncrementLaw = serde_json::from_str(r#"{"kind":"gaussian","mean":0,"stddev":1}"#).unwrap();
        assert_eq!(g.variance(), Some(1.0));
    }

    #[test]
    fn lattice_grid_scales_rational_support() {
        let law = IncrementLaw::lattice(
            vec![Rational64::new(-1, 2), Rational64::new(3, 2)],
            vec![ratio(1, 2), ratio(1, 2)],
        )
        .unwrap();
        let grid = law.lattice_grid().unwrap();
        assert_eq!(grid.unit, Rational64::new(1, 2));
        assert_eq!(grid.steps, vec![-1, 3]);
    }
}
