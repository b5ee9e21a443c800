//! Stability of the rescaled local time at the maximum across nested
//! dyadic skeletons of one fine path.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::experiments::{hypothesis_violation, norming, Criterion, ExperimentConfig, Report, Table};
use crate::fluctuation::local_time_verbatim;
use crate::increments::{sample_walk, skeleton, WalkPath};
use crate::stats::trend_test;

/// `max_{0≤j≤2n} |Λ⁽ⁿ⁾_{⌊j/2⌋}/a_n − Λ⁽²ⁿ⁾_j/a_{2n}|` on the `n`- and
/// `2n`-skeletons of `base` (whose length must be a multiple of `2n`).
pub fn nested_discrepancy(base: &WalkPath<f64>, n: usize, a_n: f64, a_2n: f64) -> Result<f64> {
    let len = base.len();
    if n == 0 || len % (2 * n) != 0 {
        return Err(Error::Dimension(format!("base length {len} is not a multiple of 2n = {}", 2 * n)));
    }
    let coarse = local_time_verbatim(&skeleton(base, len / n)?);
    let fine = local_time_verbatim(&skeleton(base, len / (2 * n))?);
    Ok((0..=2 * n)
        .map(|j| (coarse.at(j / 2) as f64 / a_n - fine.at(j) as f64 / a_2n).abs())
        .fold(0.0, f64::max))
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

pub fn run_localtime_stability(config: &ExperimentConfig) -> Result<Report> {
    if let Some(reason) = hypothesis_violation(&config.law) {
        return Ok(Report::violation(config, reason));
    }
    let p = &config.params;
    let big_n = 1usize
        .checked_shl(p.base_exponent)
        .ok_or_else(|| Error::Config(format!("base exponent {} is too large", p.base_exponent)))?;
    for &n in &config.n_grid {
        if !n.is_power_of_two() || 2 * n > big_n {
            return Err(Error::Config(format!(
                "n = {n} must be a power of two with 2n <= 2^{}",
                p.base_exponent
            )));
        }
    }
    let norm: Vec<(f64, f64)> = config
        .n_grid
        .iter()
        .map(|&n| Ok((norming(&config.law, n, big_n / n, p.rel_tol)?, norming(&config.law, 2 * n, big_n / (2 * n), p.rel_tol)?)))
        .collect::<Result<_>>()?;
    let per_path: Vec<Vec<f64>> = (0..config.trials)
        .into_par_iter()
        .map(|i| {
            let base = sample_walk::<f64>(&config.law, big_n, crate::increments::trial_seed(config.seed, i as u64))?;
            config
                .n_grid
                .iter()
                .zip(&norm)
                .map(|(&n, &(a, b))| nested_discrepancy(&base, n, a, b))
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(&["n", "a_n", "a_2n", "median_discrepancy", "mean_discrepancy"]);
    let mut series = Vec::new();
    for (col, (&n, &(a, b))) in config.n_grid.iter().zip(&norm).enumerate() {
        let values: Vec<f64> = per_path.iter().map(|r| r[col]).collect();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let med = median(values);
        series.push((n as f64, med));
        table.push(vec![n as f64, a, b, med, mean]);
    }
    let trend = trend_test(&series)?;
    let mut report = Report::new(config);
    report.criteria.push(Criterion::at_most(
        "trend_violations",
        "steps where the median discrepancy fails to decrease",
        trend.violations as f64,
        config.tolerance("trend_violations")?,
    ));
    report.criteria.push(Criterion::at_most(
        "trend_ratio",
        "last over first median discrepancy",
        trend.ratio,
        config.tolerance("trend_ratio")?,
    ));
    report.tables.insert("discrepancy".into(), table);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::ExperimentId;
    use crate::increments::IncrementLaw;

    #[test]
    fn monotone_path_has_linear_local_time() {
        let base = WalkPath::from_increments(vec![1.0; 16]);
        // Λ⁽ⁿ⁾_k = k, so with a_n = n the curves differ only by the floor at odd j
        assert_eq!(nested_discrepancy(&base, 4, 4.0, 8.0).unwrap(), 0.125);
        assert_eq!(nested_discrepancy(&base, 8, 8.0, 16.0).unwrap(), 1.0 / 16.0);
        assert!(nested_discrepancy(&base, 3, 1.0, 1.0).is_err());
        let c = local_time_verbatim(&skeleton(&base, 2).unwrap());
        assert_eq!(c.counts, (0..=8).collect::<Vec<_>>());
    }

    #[test]
    fn full_resolution_is_the_path_itself() {
        let base = sample_walk::<f64>(&IncrementLaw::gaussian(0.0, 1.0).unwrap(), 32, 5).unwrap();
        let a = local_time_verbatim(&skeleton(&base, 1).unwrap());
        assert_eq!(a, local_time_verbatim(&base));
    }

    #[test]
    fn rejects_non_dyadic_grid() {
        let mut c = ExperimentConfig::default_for(ExperimentId::Localtime);
        c.n_grid = vec![100, 200, 400];
        assert!(matches!(run_localtime_stability(&c), Err(Error::Config(_))));
        c.n_grid = vec![1 << 15, 1 << 16];
        assert!(matches!(run_localtime_stability(&c), Err(Error::Config(_))));
    }

    #[test]
    fn small_run_decreases() {
        let mut c = ExperimentConfig::default_for(ExperimentId::Localtime);
        c.params.base_exponent = 12;
        c.n_grid = vec![16, 64, 256, 1024];
        c.trials = 100;
        let r = run_localtime_stability(&c).unwrap();
        assert!(r.passed(), "{:?}", r.summary_lines());
    }
}
