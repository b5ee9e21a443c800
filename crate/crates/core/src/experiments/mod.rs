//! Convergence experiments and exact certification suites, each producing a
//! [`Report`] of pass/fail criteria and plot-ready tables.

pub mod config;
pub mod harmonic;
pub mod lemma1;
pub mod localtime;
pub mod meander;
pub mod report;
pub mod theorem1;
pub mod verify;

use rand::Rng;

pub use config::{ExperimentConfig, ExperimentId, Params};
pub use report::{Criterion, OutputFormat, Report, Table};

use crate::error::{Error, Result};
use crate::increments::{IncrementLaw, LawKind};
use crate::scaling::{norming_constant, PositivityRule, PositivitySequence};

/// Runs the experiment named in the config.
pub fn run(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    match config.experiment {
        ExperimentId::Theorem1 => theorem1::run_theorem1(config),
        ExperimentId::Localtime => localtime::run_localtime_stability(config),
        ExperimentId::Lemma1 => lemma1::run_lemma1(config),
        ExperimentId::Meander => meander::run_meander(config),
        ExperimentId::Harmonic => harmonic::run_harmonic(config),
        ExperimentId::Fristedt => verify::verify_fristedt(config),
        ExperimentId::Reversal => verify::verify_reversal(config),
        ExperimentId::Idloc => verify::verify_idloc(config),
        ExperimentId::MeanderAc => verify::verify_meander_ac(config),
        ExperimentId::HKernel => verify::verify_h_kernel(config),
    }
}

/// Reason the law falls outside the standing hypotheses (0 regular for both
/// half-lines in the limit), if any.
pub fn hypothesis_violation(law: &IncrementLaw) -> Option<String> {
    match (law.charges_positive(), law.charges_negative()) {
        (true, true) => None,
        (false, _) => Some(format!("{} never steps up: the walk has no ascending ladder structure", law.description())),
        (_, false) => Some(format!(
            "{} never steps down: the limit is not regular for (-inf, 0)",
            law.description()
        )),
    }
}

/// Standard deviation used to put the walk on the Brownian scale.
pub(crate) fn diffusive_scale(law: &IncrementLaw) -> Result<f64> {
    law.variance()
        .filter(|v| *v > 0.0)
        .map(f64::sqrt)
        .ok_or_else(|| Error::UnsupportedMode(format!("{} has no finite positive variance", law.description())))
}

/// `P(S_{k·stride} > 0)` rule for the walk observed every `stride` steps.
///
/// Symmetric diffuse laws give 1/2 exactly; the symmetric simple walk uses
/// `(1 − P(S_m = 0))/2`. Other laws are not supported.
pub(crate) fn positivity_rule(law: &IncrementLaw, stride: usize, k_max: usize) -> Result<PositivityRule> {
    if law.is_symmetric() && law.is_diffuse() {
        return Ok(PositivityRule::Constant(0.5));
    }
    if let Some(grid) = law.lattice_grid() {
        if law.is_symmetric() && grid.steps.iter().all(|s| s.abs() == 1) {
            if stride == 1 {
                return Ok(PositivityRule::SimpleSymmetric);
            }
            let mut u = 1.0f64;
            let mut out = Vec::with_capacity(k_max);
            for m in 1..=(k_max * stride) {
                if m % 2 == 0 {
                    u *= (m - 1) as f64 / m as f64;
                }
                if m % stride == 0 {
                    let zero = if m % 2 == 0 { u } else { 0.0 };
                    out.push((1.0 - zero) / 2.0);
                }
            }
            return Ok(PositivityRule::Table(PositivitySequence::estimated(out, vec![0.0; k_max])));
        }
    }
    Err(Error::UnsupportedMode(format!(
        "norming constants for {} need a symmetric diffuse or symmetric simple law",
        law.description()
    )))
}

/// `a_n` (equal to `â_n` for the symmetric laws supported) of the walk seen every `stride` steps.
pub(crate) fn norming(law: &IncrementLaw, n: usize, stride: usize, rel_tol: f64) -> Result<f64> {
    let k_max = crate::scaling::truncation_bound(n, rel_tol);
    norming_constant(&positivity_rule(law, stride, k_max)?, n, rel_tol)
}

/// Streams the walk until its `k`-th strict ascending ladder epoch; `None`
/// when `cap` steps pass first. Returns `(T_k, H_k)`.
pub(crate) fn ladder_until<R: Rng + ?Sized>(law: &IncrementLaw, k: usize, cap: usize, rng: &mut R) -> Option<(usize, f64)> {
    if k == 0 {
        return Some((0, 0.0));
    }
    let (mut s, mut max, mut found) = (0.0f64, 0.0f64, 0usize);
    for step in 1..=cap {
        s += law.draw(rng);
        if s > max {
            max = s;
            found += 1;
            if found == k {
                return Some((step, s));
            }
        }
    }
    None
}

/// As [`ladder_until`] for both directions on one path:
/// `(T_k, H_k, T̂_j, |Ĥ_j|)`.
pub(crate) fn bilateral_ladder_until<R: Rng + ?Sized>(
    law: &IncrementLaw,
    k: usize,
    j: usize,
    cap: usize,
    rng: &mut R,
) -> Option<(usize, f64, usize, f64)> {
    let (mut s, mut max, mut min) = (0.0f64, 0.0f64, 0.0f64);
    let (mut up, mut down) = (0usize, 0usize);
    let mut asc = if k == 0 { Some((0, 0.0)) } else { None };
    let mut desc = if j == 0 { Some((0, 0.0)) } else { None };
    for step in 1..=cap {
        if asc.is_some() && desc.is_some() {
            break;
        }
        s += law.draw(rng);
        if s > max {
            max = s;
            up += 1;
            if up == k {
                asc = Some((step, s));
            }
        }
        if s < min {
            min = s;
            down += 1;
            if down == j {
                desc = Some((step, -s));
            }
        }
    }
    match (asc, desc) {
        (Some(a), Some(d)) => Some((a.0, a.1, d.0, d.1)),
        _ => None,
    }
}

pub(crate) fn is_heavy_tailed(law: &IncrementLaw) -> Option<f64> {
    match law.kind() {
        LawKind::SymmetricStable { tail_index, .. } if *tail_index < 2.0 => Some(*tail_index),
        _ => None,
    }
}

pub(crate) fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0).max(1.0);
    (m, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::increments::rng_from_seed;
    use num_rational::Rational64;

    #[test]
    fn guards() {
        assert!(hypothesis_violation(&IncrementLaw::fair_coin()).is_none());
        assert!(hypothesis_violation(&IncrementLaw::point_mass(Rational64::from_integer(1))).is_some());
    }

    #[test]
    fn skeleton_positivity_matches_direct_rule() {
        let fair = IncrementLaw::fair_coin();
        let a = norming(&fair, 64, 1, 1e-9).unwrap();
        let b = norming_constant(&PositivityRule::SimpleSymmetric, 64, 1e-9).unwrap();
        assert!((a - b).abs() < 1e-12);
        // stride 2 sees only even times, where P(S_2k > 0) = (1 − u_2k)/2
        match positivity_rule(&fair, 2, 3).unwrap() {
            PositivityRule::Table(t) => assert_eq!(t.probabilities, vec![0.25, 0.3125, 0.34375]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ladder_streams() {
        let up = IncrementLaw::point_mass(Rational64::from_integer(1));
        let mut rng = rng_from_seed(1);
        assert_eq!(ladder_until(&up, 5, 100, &mut rng), Some((5, 5.0)));
        assert_eq!(ladder_until(&up, 5, 4, &mut rng), None);
        assert_eq!(ladder_until(&up, 0, 4, &mut rng), Some((0, 0.0)));
        let g = IncrementLaw::gaussian(0.0, 1.0).unwrap();
        let (t, h, tt, hh) = bilateral_ladder_until(&g, 3, 2, 1 << 30, &mut rng).unwrap();
        assert!(t >= 3 && tt >= 2 && h > 0.0 && hh > 0.0);
    }
}
