//! Exact enumeration of finite-support lattice walks.
//!
//! Paths are keyed by their increment-index sequences and carry exact
//! rational masses; functionals are pushed forward while the enumeration
//! streams depth-first, so paths are never stored unless asked for.

use std::collections::BTreeMap;

use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::increments::{to_big, IncrementLaw, WalkPath};

/// Largest number of leaves `|support|^m` enumerated by default.
pub const DEFAULT_BUDGET: u128 = 1 << 24;

/// Finite measure with exact rational atoms.
///
/// Pushforwards of [`enumerate`] are probability measures; restricting to an
/// event with [`pushforward_on`] gives a sub-probability measure.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistribution<O: Ord> {
    atoms: BTreeMap<O, BigRational>,
}

impl<O: Ord> Default for ExactDistribution<O> {
    fn default() -> Self {
        Self { atoms: BTreeMap::new() }
    }
}

impl<O: Ord + Clone> ExactDistribution<O> {
    pub fn from_atoms<I: IntoIterator<Item = (O, BigRational)>>(atoms: I) -> Self {
        let mut d = Self::default();
        for (o, p) in atoms {
            d.add(o, p);
        }
        d
    }

    /// Adds mass to an atom; zero masses are dropped.
    pub fn add(&mut self, outcome: O, mass: BigRational) {
        if mass.is_zero() {
            return;
        }
        let slot = self.atoms.entry(outcome).or_insert_with(BigRational::zero);
        *slot += mass;
    }

    fn merge(mut self, other: Self) -> Self {
        for (o, p) in other.atoms {
            self.add(o, p);
        }
        self
    }

    pub fn atoms(&self) -> &BTreeMap<O, BigRational> {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn mass(&self, outcome: &O) -> BigRational {
        self.atoms.get(outcome).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn total_mass(&self) -> BigRational {
        self.atoms.values().fold(BigRational::zero(), |a, b| a + b)
    }

    pub fn probability<F: Fn(&O) -> bool>(&self, event: F) -> BigRational {
        self.atoms
            .iter()
            .filter(|(o, _)| event(o))
            .fold(BigRational::zero(), |a, (_, p)| a + p)
    }

    pub fn map<P: Ord + Clone, F: Fn(&O) -> P>(&self, f: F) -> ExactDistribution<P> {
        let mut d = ExactDistribution::default();
        for (o, p) in &self.atoms {
            d.add(f(o), p.clone());
        }
        d
    }

    /// `∫ f dμ`.
    pub fn expectation<F: Fn(&O) -> BigRational>(&self, f: F) -> BigRational {
        self.atoms
            .iter()
            .fold(BigRational::zero(), |a, (o, p)| a + f(o) * p)
    }

    /// Divides by the total mass.
    pub fn normalized(&self) -> Result<Self> {
        let z = self.total_mass();
        if z.is_zero() {
            return Err(Error::DegenerateState("cannot normalize a null measure".into()));
        }
        Ok(Self {
            atoms: self.atoms.iter().map(|(o, p)| (o.clone(), p / &z)).collect(),
        })
    }
}

impl<O: Ord + Clone + Serialize> ExactDistribution<O> {
    /// `{outcome: "fraction"}`, outcomes encoded as compact JSON.
    pub fn to_json(&self) -> Result<serde_json::Value> {
        let mut map = serde_json::Map::new();
        for (o, p) in &self.atoms {
            let key = match serde_json::to_value(o)? {
                serde_json::Value::String(s) => s,
                v => v.to_string(),
            };
            map.insert(key, serde_json::Value::String(p.to_string()));
        }
        Ok(serde_json::Value::Object(map))
    }
}

/// `½ Σ |μ − ν|`.
pub fn total_variation<O: Ord + Clone>(a: &ExactDistribution<O>, b: &ExactDistribution<O>) -> BigRational {
    let mut sum = BigRational::zero();
    for (o, p) in &a.atoms {
        sum += (p - b.mass(o)).abs();
    }
    for (o, q) in &b.atoms {
        if !a.atoms.contains_key(o) {
            sum += q.clone();
        }
    }
    sum / BigRational::from_integer(2.into())
}

/// Total variation under the name used by the certification reports.
pub fn distribution_equality<O: Ord + Clone>(a: &ExactDistribution<O>, b: &ExactDistribution<O>) -> BigRational {
    total_variation(a, b)
}

fn support_of(law: &IncrementLaw) -> Result<(Vec<Rational64>, Vec<BigRational>)> {
    let (s, p) = law.lattice_parts().ok_or_else(|| {
        Error::UnsupportedMode(format!("exact enumeration needs a lattice law, got {}", law.description()))
    })?;
    Ok((s.to_vec(), p.to_vec()))
}

fn check_budget(k: usize, m: usize, budget: u128) -> Result<()> {
    let mut leaves: u128 = 1;
    for _ in 0..m {
        leaves = leaves.saturating_mul(k as u128);
        if leaves > budget {
            return Err(Error::Budget {
                message: format!("{k}^{m} paths exceed the enumeration budget {budget}"),
                acceptance_rate: 0.0,
            });
        }
    }
    Ok(())
}

struct Walker<'a, F> {
    support: &'a [Rational64],
    probs: &'a [BigRational],
    m: usize,
    indices: Vec<usize>,
    values: Vec<Rational64>,
    masses: Vec<BigRational>,
    visit: &'a F,
}

impl<F> Walker<'_, F>
where
    F: Fn(&[usize], &WalkPath<Rational64>, &BigRational),
{
    fn descend(&mut self) {
        let depth = self.indices.len();
        if depth == self.m {
            let path = WalkPath::new(self.values.clone()).expect("starts at zero");
            (self.visit)(&self.indices, &path, self.masses.last().unwrap());
            return;
        }
        for i in 0..self.support.len() {
            let v = *self.values.last().unwrap() + self.support[i];
            let p = self.masses.last().unwrap() * &self.probs[i];
            self.indices.push(i);
            self.values.push(v);
            self.masses.push(p);
            self.descend();
            self.indices.pop();
            self.values.pop();
            self.masses.pop();
        }
    }
}

/// Streams every path of length `m` with positive mass and pushes forward the
/// outcome returned by `f`; `None` drops the path. Subtrees after the first
/// step are reduced in parallel.
pub fn pushforward_on_with_budget<O, F>(
    law: &IncrementLaw,
    m: usize,
    budget: u128,
    f: F,
) -> Result<ExactDistribution<O>>
where
    O: Ord + Clone + Send,
    F: Fn(&[usize], &WalkPath<Rational64>) -> Option<O> + Sync,
{
    pushforward_multi_with_budget(law, m, budget, f)
}

/// Every outcome yielded for a path receives that path's full mass, so the
/// result is a sum of sub-laws (for instance one per ladder index).
pub fn pushforward_multi_with_budget<O, F, I>(
    law: &IncrementLaw,
    m: usize,
    budget: u128,
    f: F,
) -> Result<ExactDistribution<O>>
where
    O: Ord + Clone + Send,
    I: IntoIterator<Item = O>,
    F: Fn(&[usize], &WalkPath<Rational64>) -> I + Sync,
{
    let (support, probs) = support_of(law)?;
    check_budget(support.len(), m, budget)?;
    let run = |first: Option<usize>| {
        let acc = std::sync::Mutex::new(ExactDistribution::default());
        let visit = |idx: &[usize], path: &WalkPath<Rational64>, mass: &BigRational| {
            let mut acc = acc.lock().unwrap();
            for o in f(idx, path) {
                acc.add(o, mass.clone());
            }
        };
        let mut w = Walker {
            support: &support,
            probs: &probs,
            m,
            indices: Vec::with_capacity(m),
            values: vec![Rational64::zero()],
            masses: vec![BigRational::one()],
            visit: &visit,
        };
        if let Some(i) = first {
            w.indices.push(i);
            w.values.push(support[i]);
            w.masses.push(probs[i].clone());
        }
        w.descend();
        acc.into_inner().unwrap()
    };
    if m == 0 {
        return Ok(run(None));
    }
    Ok((0..support.len())
        .into_par_iter()
        .map(|i| run(Some(i)))
        .reduce(ExactDistribution::default, ExactDistribution::merge))
}

pub fn pushforward_on<O, F>(law: &IncrementLaw, m: usize, f: F) -> Result<ExactDistribution<O>>
where
    O: Ord + Clone + Send,
    F: Fn(&[usize], &WalkPath<Rational64>) -> Option<O> + Sync,
{
    pushforward_on_with_budget(law, m, DEFAULT_BUDGET, f)
}

/// Law of `f(S_0, …, S_m)`.
pub fn pushforward<O, F>(law: &IncrementLaw, m: usize, f: F) -> Result<ExactDistribution<O>>
where
    O: Ord + Clone + Send,
    F: Fn(&WalkPath<Rational64>) -> O + Sync,
{
    pushforward_on(law, m, |_, p| Some(f(p)))
}

/// Law of the whole path, keyed by increment indices.
pub fn enumerate(law: &IncrementLaw, m: usize) -> Result<ExactDistribution<Vec<usize>>> {
    enumerate_with_budget(law, m, DEFAULT_BUDGET)
}

pub fn enumerate_with_budget(law: &IncrementLaw, m: usize, budget: u128) -> Result<ExactDistribution<Vec<usize>>> {
    pushforward_on_with_budget(law, m, budget, |idx, _| Some(idx.to_vec()))
}

/// Rebuilds the path encoded by an increment-index key.
pub fn decode_path(law: &IncrementLaw, key: &[usize]) -> Result<WalkPath<Rational64>> {
    let (support, _) = support_of(law)?;
    key.iter()
        .map(|&i| {
            support
                .get(i)
                .copied()
                .ok_or_else(|| Error::Input(format!("increment index {i} outside the support")))
        })
        .collect::<Result<Vec<_>>>()
        .map(WalkPath::from_increments)
}

/// Law of `f` under an already enumerated path law.
pub fn functional_distribution<O, F>(
    law: &IncrementLaw,
    dist: &ExactDistribution<Vec<usize>>,
    f: F,
) -> Result<ExactDistribution<O>>
where
    O: Ord + Clone,
    F: Fn(&WalkPath<Rational64>) -> O,
{
    let mut out = ExactDistribution::default();
    for (k, p) in dist.atoms() {
        out.add(f(&decode_path(law, k)?), p.clone());
    }
    Ok(out)
}

/// Exact value of a path as a vector of big rationals, convenient as an outcome key.
pub fn path_key(path: &WalkPath<Rational64>) -> Vec<Rational64> {
    path.values().to_vec()
}

/// Lifts a 64-bit rational to an arbitrary-precision one.
pub fn big(x: Rational64) -> BigRational {
    to_big(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fluctuation::{local_time_strict, local_time_verbatim};
    use crate::increments::ratio;

    #[test]
    fn enumerate_examples() {
        let fair = enumerate(&IncrementLaw::fair_coin(), 2).unwrap();
        assert_eq!(fair.len(), 4);
        assert!(fair.atoms().values().all(|p| *p == ratio(1, 4)));

        let point = enumerate(&IncrementLaw::point_mass(Rational64::new(1, 3)), 5).unwrap();
        assert_eq!(point.len(), 1);
        assert_eq!(point.total_mass(), BigRational::one());

        let biased = IncrementLaw::biased_coin(ratio(3, 4)).unwrap();
        let d = enumerate(&biased, 2).unwrap();
        let mut masses: Vec<_> = d.atoms().values().cloned().collect();
        masses.sort();
        assert_eq!(masses, vec![ratio(1, 16), ratio(3, 16), ratio(3, 16), ratio(9, 16)]);
    }

    #[test]
    fn local_time_laws_and_distance() {
        let fair = IncrementLaw::fair_coin();
        let verbatim = pushforward(&fair, 2, |p| local_time_verbatim(p).at(2)).unwrap();
        let strict = pushforward(&fair, 2, |p| local_time_strict(p).at(2)).unwrap();
        let expect_v = ExactDistribution::from_atoms([(0, ratio(1, 4)), (1, ratio(1, 2)), (2, ratio(1, 4))]);
        let expect_s = ExactDistribution::from_atoms([(0, ratio(1, 2)), (1, ratio(1, 4)), (2, ratio(1, 4))]);
        assert_eq!(verbatim, expect_v);
        assert_eq!(strict, expect_s);
        assert_eq!(total_variation(&verbatim, &strict), ratio(1, 4));
        assert_eq!(total_variation(&verbatim, &verbatim), BigRational::zero());

        let paths = enumerate(&fair, 2).unwrap();
        let again = functional_distribution(&fair, &paths, |p| local_time_verbatim(p).at(2)).unwrap();
        assert_eq!(again, verbatim);
        let constant = functional_distribution(&fair, &paths, |_| 7u8).unwrap();
        assert_eq!(constant.atoms().len(), 1);
        assert_eq!(constant.mass(&7), BigRational::one());
    }

    #[test]
    fn mass_is_conserved() {
        for law in [
            IncrementLaw::fair_coin(),
            IncrementLaw::uniform_three(),
            IncrementLaw::biased_coin(ratio(2, 7)).unwrap(),
        ] {
            for m in 0..=8 {
                let d = pushforward(&law, m, |p| p.last()).unwrap();
                assert_eq!(d.total_mass(), BigRational::one());
            }
        }
    }

    #[test]
    fn budget_and_mode_errors() {
        let fair = IncrementLaw::fair_coin();
        assert!(matches!(enumerate_with_budget(&fair, 5, 16), Err(Error::Budget { .. })));
        assert!(enumerate_with_budget(&fair, 4, 16).is_ok());
        let g = IncrementLaw::gaussian(0.0, 1.0).unwrap();
        assert!(matches!(enumerate(&g, 2), Err(Error::UnsupportedMode(_))));
    }

    #[test]
    fn json_export() {
        let d = pushforward(&IncrementLaw::fair_coin(), 2, |p| local_time_verbatim(p).at(2)).unwrap();
        let j = d.to_json().unwrap();
        assert_eq!(j["1"], "1/2");
        assert_eq!(j["0"], "1/4");
    }
}
