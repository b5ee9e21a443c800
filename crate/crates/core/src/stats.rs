//! Empirical distribution tools: (weighted) ECDFs, Kolmogorov–Smirnov
//! statistics with DKW bands, Wasserstein-1 distance and a monotone trend test.

use serde::Serialize;

use crate::error::{Error, Result};

/// Real sample, optionally weighted.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    weights: Option<Vec<f64>>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Input("sample contains NaN".into()));
        }
        Ok(Self { values, weights: None })
    }

    pub fn weighted(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(Error::Dimension(format!(
                "{} values but {} weights",
                values.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::Input("weights must be positive and finite".into()));
        }
        let mut s = Self::new(values)?;
        s.weights = Some(weights);
        Ok(s)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Kish effective size `(Σw)² / Σw²`; the plain size when unweighted.
    pub fn effective_size(&self) -> f64 {
        match &self.weights {
            None => self.values.len() as f64,
            Some(w) => {
                let s: f64 = w.iter().sum();
                let s2: f64 = w.iter().map(|x| x * x).sum();
                s * s / s2
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match &self.weights {
            None => self.values.iter().sum::<f64>() / self.values.len() as f64,
            Some(w) => {
                let s: f64 = w.iter().sum();
                self.values.iter().zip(w).map(|(x, w)| x * w).sum::<f64>() / s
            }
        }
    }

    pub fn ecdf(&self) -> Result<Ecdf> {
        Ecdf::new(self)
    }
}

/// Right-continuous step function through the distinct sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct Ecdf {
    points: Vec<f64>,
    cumulative: Vec<f64>,
}

impl Ecdf {
    pub fn new(sample: &Sample) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::Input("empty sample".into()));
        }
        let mut pairs: Vec<(f64, f64)> = match &sample.weights {
            None => sample.values.iter().map(|&v| (v, 1.0)).collect(),
            Some(w) => sample.values.iter().copied().zip(w.iter().copied()).collect(),
        };
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        let mut points: Vec<f64> = Vec::new();
        let mut cumulative: Vec<f64> = Vec::new();
        let mut acc = 0.0;
        for (x, w) in pairs {
            acc += w;
            if points.last() == Some(&x) {
                *cumulative.last_mut().unwrap() = acc / total;
            } else {
                points.push(x);
                cumulative.push(acc / total);
            }
        }
        *cumulative.last_mut().unwrap() = 1.0;
        Ok(Self { points, cumulative })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.points.partition_point(|p| *p <= x);
        if i == 0 {
            0.0
        } else {
            self.cumulative[i - 1]
        }
    }

    /// `F(x−)`.
    pub fn eval_left(&self, x: f64) -> f64 {
        let i = self.points.partition_point(|p| *p < x);
        if i == 0 {
            0.0
        } else {
            self.cumulative[i - 1]
        }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,F\n");
        for (x, f) in self.points.iter().zip(&self.cumulative) {
            s.push_str(&format!("{x},{f}\n"));
        }
        s
    }
}

/// What a sample is compared against.
pub enum Reference<'a> {
    Sample(&'a Sample),
    /// Continuous CDF.
    Cdf(&'a dyn Fn(f64) -> f64),
    /// Discrete law given by its atoms `(x, P(X = x))`.
    Atoms(&'a [(f64, f64)]),
    /// Law of `min(X, cap)` for continuous `X`: the CDF up to `cap`, an atom there.
    Censored { cdf: &'a dyn Fn(f64) -> f64, cap: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KsReport {
    pub statistic: f64,
    pub n1: usize,
    pub n2: Option<usize>,
    /// Size entering the band: Kish size for one sample, `n1 n2 / (n1 + n2)` for two.
    pub effective_n: f64,
    pub delta: f64,
    pub dkw_epsilon: f64,
}

impl KsReport {
    pub fn within_band(&self) -> bool {
        self.statistic <= self.dkw_epsilon
    }
}

/// `sqrt(ln(2/δ) / (2N))`.
pub fn dkw_epsilon(n: f64, delta: f64) -> f64 {
    ((2.0 / delta).ln() / (2.0 * n)).sqrt()
}

pub fn ks_statistic(sample: &Sample, reference: Reference<'_>, delta: f64) -> Result<KsReport> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Parameter(format!("confidence level delta must lie in (0,1), got {delta}")));
    }
    let f = sample.ecdf()?;
    let n1 = sample.len();
    let (statistic, n2, effective_n) = match reference {
        Reference::Sample(other) => {
            let g = other.ecdf()?;
            let d = sup_distance(&f, &g);
            let (a, b) = (sample.effective_size(), other.effective_size());
            (d, Some(other.len()), a * b / (a + b))
        }
        Reference::Cdf(cdf) => {
            let mut d: f64 = 0.0;
            let mut below = 0.0;
            for (x, fx) in f.points.iter().zip(&f.cumulative) {
                let c = cdf(*x);
                d = d.max((fx - c).abs()).max((below - c).abs());
                below = *fx;
            }
            (d, None, sample.effective_size())
        }
        Reference::Censored { cdf, cap } => {
            let at_cap = cdf(cap);
            let (mut d, mut below, mut prev): (f64, f64, f64) = (0.0, 0.0, f64::NEG_INFINITY);
            for (x, fx) in f.points.iter().zip(&f.cumulative) {
                let right = if *x < cap { cdf(*x) } else { 1.0 };
                let mut gap = (below - if *x <= cap { cdf(*x) } else { 1.0 }).abs();
                if *x > cap && prev < cap {
                    gap = gap.max((below - at_cap).abs());
                }
                d = d.max((fx - right).abs()).max(gap);
                below = *fx;
                prev = *x;
            }
            (d, None, sample.effective_size())
        }
        Reference::Atoms(atoms) => {
            let mut xs: Vec<(f64, f64)> = atoms.to_vec();
            xs.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut pts: Vec<f64> = f.points.iter().copied().chain(xs.iter().map(|a| a.0)).collect();
            pts.sort_by(f64::total_cmp);
            pts.dedup();
            let mut d: f64 = 0.0;
            let mut acc = 0.0;
            let mut j = 0;
            for x in pts {
                while j < xs.len() && xs[j].0 <= x {
                    acc += xs[j].1;
                    j += 1;
                }
                d = d.max((f.eval(x) - acc).abs());
            }
            (d, None, sample.effective_size())
        }
    };
    Ok(KsReport {
        statistic,
        n1,
        n2,
        effective_n,
        delta,
        dkw_epsilon: dkw_epsilon(effective_n, delta),
    })
}

fn merged_points(f: &Ecdf, g: &Ecdf) -> Vec<f64> {
    let mut pts: Vec<f64> = f.points.iter().chain(&g.points).copied().collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

fn sup_distance(f: &Ecdf, g: &Ecdf) -> f64 {
    merged_points(f, g)
        .into_iter()
        .map(|x| (f.eval(x) - g.eval(x)).abs())
        .fold(0.0, f64::max)
}

/// `∫ |F₁ − F₂| dx`.
pub fn wasserstein1(a: &Sample, b: &Sample) -> Result<f64> {
    let f = a.ecdf()?;
    let g = b.ecdf()?;
    let pts = merged_points(&f, &g);
    Ok(pts
        .windows(2)
        .map(|w| (f.eval(w[0]) - g.eval(w[0])).abs() * (w[1] - w[0]))
        .sum())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendReport {
    pub points: usize,
    /// Steps where the value fails to decrease strictly.
    pub violations: usize,
    pub ratio: f64,
}

pub fn trend_test(series: &[(f64, f64)]) -> Result<TrendReport> {
    if series.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "trend test needs at least 3 points, got {}",
            series.len()
        )));
    }
    let violations = series.windows(2).filter(|w| w[1].1 >= w[0].1).count();
    Ok(TrendReport {
        points: series.len(),
        violations,
        ratio: series.last().unwrap().1 / series[0].1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::increments::rng_from_seed;
    use proptest::prelude::*;
    use rand::Rng;

    fn s(v: &[f64]) -> Sample {
        Sample::new(v.to_vec()).unwrap()
    }

    #[test]
    fn ks_examples() {
        let a = s(&[0.3, 1.0, 2.0]);
        assert_eq!(ks_statistic(&a, Reference::Sample(&a), 0.05).unwrap().statistic, 0.0);
        let b = s(&[5.0, 6.0]);
        assert_eq!(ks_statistic(&a, Reference::Sample(&b), 0.05).unwrap().statistic, 1.0);
        let unif = |x: f64| x.clamp(0.0, 1.0);
        let r = ks_statistic(&s(&[0.0, 1.0]), Reference::Cdf(&unif), 0.05).unwrap();
        assert_eq!(r.statistic, 0.5);
        assert!((r.dkw_epsilon - ((40.0f64).ln() / 4.0).sqrt()).abs() < 1e-15);
        assert!(matches!(
            ks_statistic(&s(&[]), Reference::Cdf(&unif), 0.05),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn ks_against_atoms() {
        let atoms = [(0.0, 0.5), (1.0, 0.25), (2.0, 0.25)];
        let r = ks_statistic(&s(&[0.0, 2.0]), Reference::Atoms(&atoms), 0.05).unwrap();
        // F_n = 1/2 on [0,2), reference 3/4 at 1
        assert_eq!(r.statistic, 0.25);
    }

    #[test]
    fn ks_against_censored_law() {
        let unif = |x: f64| x.clamp(0.0, 1.0);
        let censored = Reference::Censored { cdf: &unif, cap: 0.5 };
        // half the mass of min(U, 1/2) sits on the cap
        let r = ks_statistic(&s(&[0.25, 0.5, 0.5, 0.5]), censored, 0.05).unwrap();
        assert!((r.statistic - 0.25).abs() < 1e-15);
        let r = ks_statistic(&s(&[0.1, 0.2]), Reference::Censored { cdf: &unif, cap: 0.5 }, 0.05).unwrap();
        assert!((r.statistic - 0.8).abs() < 1e-15);
        let v = [0.05, 0.3, 0.7, 0.9];
        let plain = ks_statistic(&s(&v), Reference::Cdf(&unif), 0.05).unwrap();
        let far = ks_statistic(&s(&v), Reference::Censored { cdf: &unif, cap: 2.0 }, 0.05).unwrap();
        assert_eq!(plain.statistic, far.statistic);
    }

    #[test]
    fn weighted_ecdf_normalizes() {
        let w = Sample::weighted(vec![0.0, 1.0], vec![3.0, 1.0]).unwrap();
        let f = w.ecdf().unwrap();
        assert_eq!(f.eval(0.0), 0.75);
        assert_eq!(f.eval_left(0.0), 0.0);
        assert_eq!(f.eval(1.0), 1.0);
        assert!((w.effective_size() - 1.6).abs() < 1e-12);
        assert!(Sample::weighted(vec![0.0], vec![0.0]).is_err());
        assert!(f.to_csv().starts_with("x,F\n0,0.75\n"));
    }

    #[test]
    fn wasserstein_examples() {
        assert_eq!(wasserstein1(&s(&[1.0, 2.0]), &s(&[2.0, 1.0])).unwrap(), 0.0);
        assert_eq!(wasserstein1(&s(&[0.0]), &s(&[1.0])).unwrap(), 1.0);
        assert_eq!(wasserstein1(&s(&[0.0, 0.0]), &s(&[0.0, 2.0])).unwrap(), 1.0);
        assert!(wasserstein1(&s(&[]), &s(&[1.0])).is_err());
    }

    #[test]
    fn trend_examples() {
        let r = trend_test(&[(1.0, 4.0), (2.0, 2.0), (3.0, 1.0)]).unwrap();
        assert_eq!((r.violations, r.ratio), (0, 0.25));
        let r = trend_test(&[(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)]).unwrap();
        assert_eq!((r.violations, r.ratio), (2, 3.0));
        let r = trend_test(&[(1.0, 4.0), (2.0, 5.0), (3.0, 1.0)]).unwrap();
        assert_eq!((r.violations, r.ratio), (1, 0.25));
        assert!(trend_test(&[(1.0, 1.0), (2.0, 0.5)]).is_err());
    }

    #[test]
    fn dkw_band_calibration() {
        let reps = 2000;
        let mut rng = rng_from_seed(17);
        let unif = |x: f64| x.clamp(0.0, 1.0);
        let mut exceed = 0;
        for _ in 0..reps {
            let v: Vec<f64> = (0..200).map(|_| rng.random::<f64>()).collect();
            let r = ks_statistic(&s(&v), Reference::Cdf(&unif), 0.01).unwrap();
            exceed += (!r.within_band()) as usize;
        }
        // DKW guarantees at most 1%; allow binomial noise around that level
        assert!(exceed <= 2 * reps / 100, "{exceed} exceedances");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn ecdf_shape(v in prop::collection::vec(-50.0f64..50.0, 1..40)) {
            let f = s(&v).ecdf().unwrap();
            let max = v.iter().cloned().fold(f64::MIN, f64::max);
            prop_assert_eq!(f.eval(max), 1.0);
            let pts = f.points().to_vec();
            for w in pts.windows(2) {
                prop_assert!(f.eval(w[0]) < f.eval(w[1]));
                prop_assert_eq!(f.eval((w[0] + w[1]) / 2.0), f.eval(w[0]));
            }
        }

        #[test]
        fn two_sample_symmetric_and_invariant(
            a in prop::collection::vec(-5.0f64..5.0, 1..30),
            b in prop::collection::vec(-5.0f64..5.0, 1..30),
        ) {
            let (sa, sb) = (s(&a), s(&b));
            let d1 = ks_statistic(&sa, Reference::Sample(&sb), 0.05).unwrap().statistic;
            let d2 = ks_statistic(&sb, Reference::Sample(&sa), 0.05).unwrap().statistic;
            prop_assert_eq!(d1, d2);
            let ta = s(&a.iter().map(|x| x.exp()).collect::<Vec<_>>());
            let tb = s(&b.iter().map(|x| x.exp()).collect::<Vec<_>>());
            let d3 = ks_statistic(&ta, Reference::Sample(&tb), 0.05).unwrap().statistic;
            prop_assert!((d1 - d3).abs() < 1e-12);
        }
    }
}
