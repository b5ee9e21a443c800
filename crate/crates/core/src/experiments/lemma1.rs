//! Small-time asymptotics of the first ladder pair: `a_n E H₁/√n → δ_H`,
//! `a_n P(H₁/√n ∈ (a,b]) → π^H(a,b]`, `a_n P(T₁ > cn) → π^τ(c,∞)`, plus
//! normalization-free tail ratios for a heavy-tailed family.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::experiments::{diffusive_scale, hypothesis_violation, is_heavy_tailed, ladder_until, norming};
use crate::experiments::{Criterion, ExperimentConfig, Report, Table};
use crate::increments::{rng_from_seed, trial_seed, IncrementLaw};
use crate::limit_laws::{tau_levy_tail, DELTA_H};

/// Independent draws of `(T₁, H₁)`; `None` for runs censored at `cap`.
pub fn first_ladder_pairs(law: &IncrementLaw, samples: usize, cap: usize, seed: u64) -> Vec<Option<(usize, f64)>> {
    (0..samples)
        .into_par_iter()
        .map(|i| ladder_until(law, 1, cap, &mut rng_from_seed(trial_seed(seed, i as u64))))
        .collect()
}

fn fraction(pairs: &[Option<(usize, f64)>], keep: impl Fn(usize, f64) -> bool) -> f64 {
    pairs.iter().flatten().filter(|(t, h)| keep(*t, *h)).count() as f64 / pairs.len() as f64
}

/// `(a^{−γ} − b^{−γ})` for a tail `∝ x^{−γ}`.
fn tail_mass(a: f64, b: f64, gamma: f64) -> f64 {
    a.powf(-gamma) - b.powf(-gamma)
}

pub fn run_lemma1(config: &ExperimentConfig) -> Result<Report> {
    if let Some(reason) = hypothesis_violation(&config.law) {
        return Ok(Report::violation(config, reason));
    }
    let p = &config.params;
    if p.intervals.len() < 2 || p.intervals.iter().any(|(a, b)| !(*a > 0.0 && b > a)) {
        return Err(Error::Config(format!("need two intervals 0 < a < b, got {:?}", p.intervals)));
    }
    let mut report = Report::new(config);
    let heavy = is_heavy_tailed(&config.law);
    if heavy.is_none() {
        brownian_part(config, &mut report)?;
    }
    let (ratio_law, tail_index) = match heavy {
        Some(a) => (config.law.clone(), a),
        None => (IncrementLaw::cauchy(), 1.0),
    };
    ratio_part(config, &ratio_law, tail_index, &mut report)?;
    Ok(report)
}

fn brownian_part(config: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let p = &config.params;
    let sigma = diffusive_scale(&config.law)?;
    let pairs = first_ladder_pairs(&config.law, config.trials, p.step_cap, config.seed);
    let censored = pairs.iter().filter(|r| r.is_none()).count();
    let (a0, b0) = p.intervals[0];
    let mut table = Table::new(&["n", "a_n", "drift", "height_measure", "tau_tail", "tau_tail_target"]);
    let mut last = (0.0, 0.0);
    for &n in &config.n_grid {
        let a_n = norming(&config.law, n, 1, p.rel_tol)?;
        let scale = sigma * (n as f64).sqrt();
        let mean_h = pairs.iter().flatten().map(|(_, h)| h / scale).sum::<f64>() / pairs.len() as f64;
        let drift = a_n * mean_h;
        let height = a_n * fraction(&pairs, |_, h| h / scale > a0 && h / scale <= b0);
        // censored runs have T₁ > cap > n
        let tau = a_n * (fraction(&pairs, |t, _| t > n) + censored as f64 / pairs.len() as f64);
        table.push(vec![n as f64, a_n, drift, height, tau, tau_levy_tail(1.0)?]);
        last = (drift, height);
    }
    report.criteria.push(Criterion::at_most(
        "drift_rel_error",
        "relative error of a_n E H1/(sigma sqrt n) against 1/sqrt 2",
        (last.0 - DELTA_H).abs() / DELTA_H,
        config.tolerance("drift_rel_error")?,
    ));
    report.criteria.push(Criterion::at_most(
        "height_measure",
        format!("a_n P(H1/(sigma sqrt n) in ({a0},{b0}])"),
        last.1,
        config.tolerance("height_measure")?,
    ));
    if censored > 0 {
        report.notes.push(format!("{censored} first-ladder searches hit the cap of {} steps", p.step_cap));
    }
    report.tables.insert("brownian".into(), table);
    Ok(())
}

fn ratio_part(config: &ExperimentConfig, law: &IncrementLaw, tail_index: f64, report: &mut Report) -> Result<()> {
    let p = &config.params;
    // the ascending ladder height of a symmetric stable walk has tail index α/2
    let gamma = tail_index / 2.0;
    let pairs = first_ladder_pairs(law, p.ratio_samples, p.step_cap, trial_seed(config.seed, 0xCA0C));
    let censored = pairs.iter().filter(|r| r.is_none()).count();
    let (a0, b0) = p.intervals[0];
    let (a1, b1) = p.intervals[1];
    let target = tail_mass(a0, b0, gamma) / tail_mass(a1, b1, gamma);
    let mut table = Table::new(&["n", "scale", "p_first", "p_second", "ratio", "target"]);
    let mut last = f64::NAN;
    for &n in &config.n_grid {
        let c = (n as f64).powf(1.0 / tail_index);
        let p0 = fraction(&pairs, |_, h| h / c > a0 && h / c <= b0);
        let p1 = fraction(&pairs, |_, h| h / c > a1 && h / c <= b1);
        let r = p0 / p1;
        table.push(vec![n as f64, c, p0, p1, r, target]);
        last = r;
    }
    report.criteria.push(Criterion::at_most(
        "tail_ratio_rel_error",
        format!("relative error of the ladder-height interval ratio for {}", law.description()),
        ((last - target) / target).abs(),
        config.tolerance("tail_ratio_rel_error")?,
    ));
    if censored > 0 {
        report
            .notes
            .push(format!("{censored} heavy-tailed ladder searches hit the cap of {} steps", p.step_cap));
    }
    report.tables.insert("tail_ratio".into(), table);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::ExperimentId;
    use num_rational::Rational64;

    #[test]
    fn tail_ratio_target_for_cauchy() {
        let t = tail_mass(0.5, 1.0, 0.5) / tail_mass(1.0, 2.0, 0.5);
        assert!((t - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn monotone_law_is_refused() {
        let mut c = ExperimentConfig::default_for(ExperimentId::Lemma1);
        c.law = IncrementLaw::point_mass(Rational64::from_integer(-1));
        assert_eq!(run_lemma1(&c).unwrap().exit_code(), 2);
    }

    #[test]
    fn small_run_has_the_brownian_drift() {
        let mut c = ExperimentConfig::default_for(ExperimentId::Lemma1);
        c.n_grid = vec![64, 256];
        c.trials = 20_000;
        c.params.ratio_samples = 2000;
        c.params.step_cap = 1 << 16;
        let r = run_lemma1(&c).unwrap();
        assert!(r.criterion("drift_rel_error").unwrap().value < 0.05, "{:?}", r.summary_lines());
        assert!(r.tables.contains_key("tail_ratio"));
    }
}
