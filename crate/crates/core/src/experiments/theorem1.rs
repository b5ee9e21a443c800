//! Ladder marginals at a fixed time: `(T_{⌊a_n t⌋}/n, H_{⌊a_n t⌋}/(σ√n))`
//! against the Lévy first-passage law and the drift `t/√2`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::experiments::{bilateral_ladder_until, diffusive_scale, hypothesis_violation, ladder_until, mean_sd, norming};
use crate::experiments::{Criterion, ExperimentConfig, Report, Table};
use crate::fluctuation::local_time_verbatim;
use crate::increments::{rng_from_seed, sample_walk_with, trial_seed};
use crate::limit_laws::{levy_half_cdf, DELTA_H};
use crate::stats::{ks_statistic, Reference, Sample};

/// `P(τ_t ≤ s) = erfc(t / (2√s))`; a unit mass at zero when `t = 0`.
pub fn levy_cdf_at(t: f64, s: f64) -> f64 {
    if t == 0.0 {
        return if s >= 0.0 { 1.0 } else { 0.0 };
    }
    levy_half_cdf(s / (t * t)).unwrap_or(0.0)
}

/// Rescaled ladder marginals at one `n`; censored runs have `time = horizon`
/// and no height.
#[derive(Debug, Clone)]
pub struct LadderMarginals {
    pub n: usize,
    pub index: usize,
    pub times: Vec<f64>,
    pub heights: Vec<f64>,
    pub censored: usize,
}

pub fn ladder_marginals(config: &ExperimentConfig, n: usize) -> Result<LadderMarginals> {
    let p = &config.params;
    let law = &config.law;
    let sigma = diffusive_scale(law)?;
    let a_n = norming(law, n, 1, p.rel_tol)?;
    let index = (a_n * p.t).floor() as usize;
    let cap = (p.horizon * n as f64).ceil() as usize;
    let base = trial_seed(config.seed, n as u64);
    let runs: Vec<Option<(usize, f64)>> = (0..config.trials)
        .into_par_iter()
        .map(|i| ladder_until(law, index, cap, &mut rng_from_seed(trial_seed(base, i as u64))))
        .collect();
    let mut out = LadderMarginals {
        n,
        index,
        times: Vec::with_capacity(runs.len()),
        heights: Vec::with_capacity(runs.len()),
        censored: 0,
    };
    for r in runs {
        match r {
            Some((t, h)) => {
                out.times.push(t as f64 / n as f64);
                out.heights.push(h / (sigma * (n as f64).sqrt()));
            }
            None => {
                out.times.push(p.horizon);
                out.censored += 1;
            }
        }
    }
    Ok(out)
}

pub fn run_theorem1(config: &ExperimentConfig) -> Result<Report> {
    if let Some(reason) = hypothesis_violation(&config.law) {
        return Ok(Report::violation(config, reason));
    }
    let p = &config.params;
    if !(p.t >= 0.0) || !(p.horizon > 0.0) {
        return Err(Error::Parameter(format!("need t >= 0 and horizon > 0, got {} and {}", p.t, p.horizon)));
    }
    let mut report = Report::new(config);
    let mut table = Table::new(&["n", "index", "ks_time", "dkw_epsilon", "censored", "mean_height", "sd_height"]);
    let t = p.t;
    let mut last = None;
    for &n in &config.n_grid {
        let m = ladder_marginals(config, n)?;
        let cdf = |s: f64| levy_cdf_at(t, s);
        let reference = if t == 0.0 {
            Reference::Atoms(&[(0.0, 1.0)])
        } else {
            Reference::Censored { cdf: &cdf, cap: p.horizon }
        };
        let ks = ks_statistic(&Sample::new(m.times.clone())?, reference, p.delta)?;
        let (mean, sd) = if m.heights.len() > 1 { mean_sd(&m.heights) } else { (f64::NAN, f64::NAN) };
        table.push(vec![n as f64, m.index as f64, ks.statistic, ks.dkw_epsilon, m.censored as f64, mean, sd]);
        last = Some((ks.statistic, mean, sd, m.censored));
    }
    let (ks, mean, sd, censored) = last.expect("non-empty grid");
    let target = t * DELTA_H;
    report.criteria.push(Criterion::at_most(
        "ks_ladder_time",
        "KS distance of T/n to the censored Levy law",
        ks,
        config.tolerance("ks_ladder_time")?,
    ));
    report.criteria.push(Criterion::at_most(
        "mean_height",
        format!("|mean H/(sigma sqrt n) - {target:.4}|"),
        (mean - target).abs(),
        config.tolerance("mean_height")?,
    ));
    report.criteria.push(Criterion::at_most(
        "sd_height",
        "standard deviation of H/(sigma sqrt n)",
        sd,
        config.tolerance("sd_height")?,
    ));
    if censored > 0 {
        report.notes.push(format!(
            "{censored} of {} runs at the largest n hit the cap of {} n steps; their times sit at the cap and heights are dropped",
            config.trials, p.horizon
        ));
    }
    report.tables.insert("marginals".into(), table);
    if p.joint {
        report.tables.insert("joint".into(), joint_table(config)?);
    }
    Ok(report)
}

/// Per-coordinate joint samples at one `n`: the ladder tuple
/// `(T/n, H, T̂/n, Ĥ)` and the triple `(S_{⌊nt⌋}, Λ/a_n, Λ̂/â_n)` on the
/// diffusive scale.
fn joint_samples(config: &ExperimentConfig, n: usize) -> Result<Vec<Vec<f64>>> {
    let p = &config.params;
    let law = &config.law;
    let sigma = diffusive_scale(law)?;
    let a_n = norming(law, n, 1, p.rel_tol)?;
    let k = (a_n * p.t).floor() as usize;
    let cap = (p.horizon * n as f64).ceil() as usize;
    let base = trial_seed(config.seed ^ 0x4a01, n as u64);
    let steps = (n as f64 * p.t).floor() as usize;
    let scale_h = sigma * (n as f64).sqrt();
    let rows: Vec<Option<[f64; 7]>> = (0..config.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(trial_seed(base, i as u64));
            let (t, h, tt, hh) = bilateral_ladder_until(law, k, k, cap, &mut rng)?;
            let path = sample_walk_with::<f64, _>(law, steps, &mut rng);
            let up = local_time_verbatim(&path).total() as f64;
            let down = local_time_verbatim(&path.negated()).total() as f64;
            // `norming` only admits symmetric laws, where â_n = a_n
            Some([
                t as f64 / n as f64,
                h / scale_h,
                tt as f64 / n as f64,
                hh / scale_h,
                path.last() / scale_h,
                up / a_n,
                down / a_n,
            ])
        })
        .collect();
    let kept: Vec<[f64; 7]> = rows.into_iter().flatten().collect();
    Ok((0..7).map(|c| kept.iter().map(|r| r[c]).collect()).collect())
}

const JOINT_COLUMNS: [&str; 7] = ["time", "height", "time_desc", "height_desc", "position", "local_time", "local_time_desc"];

/// Two-sample KS per coordinate between successive `n`; uncensored runs only.
fn joint_table(config: &ExperimentConfig) -> Result<Table> {
    let mut columns = vec!["n_prev", "n"];
    columns.extend(JOINT_COLUMNS);
    let mut table = Table::new(&columns);
    let mut prev: Option<(usize, Vec<Vec<f64>>)> = None;
    for &n in &config.n_grid {
        let cur = joint_samples(config, n)?;
        if let Some((m, old)) = &prev {
            let mut row = vec![*m as f64, n as f64];
            for (a, b) in old.iter().zip(&cur) {
                let (a, b) = (Sample::new(a.clone())?, Sample::new(b.clone())?);
                row.push(ks_statistic(&a, Reference::Sample(&b), config.params.delta)?.statistic);
            }
            table.push(row);
        }
        prev = Some((n, cur));
    }
    Ok(table)
}
