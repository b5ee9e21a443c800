//! Measures on the integer grid of a lattice law, evolved one step at a time.
//!
//! Masses are generic so the same convolution serves exact rationals and
//! `f64` for long horizons.

use num_traits::Zero;
use std::ops::{Add, Mul};

/// Finite measure on integer levels `offset, offset + 1, …`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelMeasure<P> {
    pub offset: i64,
    pub masses: Vec<P>,
}

impl<P> LevelMeasure<P>
where
    P: Clone + Zero + Add<Output = P>,
    for<'a> &'a P: Mul<&'a P, Output = P>,
{
    pub fn dirac(level: i64, mass: P) -> Self {
        Self {
            offset: level,
            masses: vec![mass],
        }
    }

    pub fn empty() -> Self {
        Self {
            offset: 0,
            masses: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.masses.iter().all(|m| m.is_zero())
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &P)> {
        self.masses
            .iter()
            .enumerate()
            .map(move |(i, m)| (self.offset + i as i64, m))
            .filter(|(_, m)| !m.is_zero())
    }

    pub fn total(&self) -> P {
        self.masses.iter().cloned().fold(P::zero(), |a, b| a + b)
    }

    pub fn mass_at(&self, level: i64) -> P {
        let i = level - self.offset;
        if i < 0 {
            return P::zero();
        }
        self.masses.get(i as usize).cloned().unwrap_or_else(P::zero)
    }

    /// Convolution with the step law `Σ probs[i] δ_{steps[i]}`.
    pub fn step(&self, steps: &[i64], probs: &[P]) -> Self {
        if self.masses.is_empty() {
            return Self::empty();
        }
        let lo = *steps.iter().min().expect("nonempty support");
        let hi = *steps.iter().max().expect("nonempty support");
        let width = self.masses.len() + (hi - lo) as usize;
        let mut out = vec![P::zero(); width];
        for (i, m) in self.masses.iter().enumerate() {
            if m.is_zero() {
                continue;
            }
            for (s, p) in steps.iter().zip(probs) {
                let j = i + (s - lo) as usize;
                out[j] = out[j].clone() + m * p;
            }
        }
        Self {
            offset: self.offset + lo,
            masses: out,
        }
    }

    /// Splits into the part on levels where `keep` holds and the rest.
    pub fn split<F: Fn(i64) -> bool>(self, keep: F) -> (Self, Self) {
        let mut kept = self.masses.clone();
        let mut removed = self.masses;
        for (i, (k, r)) in kept.iter_mut().zip(removed.iter_mut()).enumerate() {
            if keep(self.offset + i as i64) {
                *r = P::zero();
            } else {
                *k = P::zero();
            }
        }
        (
            Self {
                offset: self.offset,
                masses: kept,
            }
            .trimmed(),
            Self {
                offset: self.offset,
                masses: removed,
            }
            .trimmed(),
        )
    }

    fn trimmed(mut self) -> Self {
        let first = self.masses.iter().position(|m| !m.is_zero());
        match first {
            None => Self::empty(),
            Some(f) => {
                let last = self.masses.iter().rposition(|m| !m.is_zero()).unwrap();
                self.masses.truncate(last + 1);
                self.masses.drain(..f);
                self.offset += f as i64;
                self
            }
        }
    }
}
