//! Exact certification suites; every distance here is an exact rational
//! converted to `f64` only for reporting.

use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::conditioning::{
    exact_chain_distribution, exact_meander_distribution, exact_survival, h_kernel_row, meander_sample, renewal_function,
    survival_curve, MeanderMethod, RenewalFunction, RenewalMode,
};
use crate::error::{Error, Result};
use crate::experiments::{mean_sd, Criterion, ExperimentConfig, Report, Table};
use crate::fluctuation::local_time_verbatim;
use crate::increments::{sample_walk, trial_seed, IncrementLaw, WalkPath};
use crate::oracle::{distribution_equality, enumerate, pushforward_multi_with_budget, pushforward_on, ExactDistribution, DEFAULT_BUDGET};
use crate::scaling::fristedt_residual;
use crate::transforms::{
    future_min_local_time, future_min_local_time_strict, reverse_at_last_strict_max, reverse_at_ladder,
    strict_future_min_records, tanaka_doney_weak, tanaka_doney_with, LadderKind,
};
use crate::fluctuation::local_time_strict;

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn lattice_laws(config: &ExperimentConfig) -> Result<&[IncrementLaw]> {
    if let Some(bad) = config.params.laws.iter().find(|l| !l.is_lattice()) {
        return Err(Error::UnsupportedMode(format!("exact certification needs lattice laws, got {}", bad.description())));
    }
    Ok(&config.params.laws)
}

pub fn verify_fristedt(config: &ExperimentConfig) -> Result<Report> {
    let p = &config.params;
    let mut report = Report::new(config);
    let mut table = Table::new(&["law", "alpha", "beta", "lhs", "rhs", "residual", "tail_bound"]);
    let (mut excess, mut bound) = (0.0f64, 0.0f64);
    for (i, law) in lattice_laws(config)?.iter().enumerate() {
        for &(a, b) in &p.alpha_beta {
            let r = fristedt_residual(law, a, b, p.truncation)?;
            excess = excess.max(r.residual - r.tail_bound);
            bound = bound.max(r.tail_bound);
            table.push(vec![i as f64, a, b, r.lhs, r.rhs, r.residual, r.tail_bound]);
        }
    }
    let spot = fristedt_residual(&IncrementLaw::fair_coin(), 1.0, 0.0, p.truncation)?;
    report.criteria.push(Criterion::at_most(
        "max_residual_excess",
        "largest residual minus its tail bound, clipped at 0",
        excess.max(0.0),
        config.tolerance("max_residual_excess")?,
    ));
    report.criteria.push(Criterion::at_most(
        "max_tail_bound",
        "largest combined tail bound",
        bound,
        config.tolerance("max_tail_bound")?,
    ));
    report.criteria.push(Criterion::at_most(
        "spot_value",
        "largest |side - 0.8094| at alpha = 1, beta = 0 for the fair coin",
        (spot.lhs - 0.8094).abs().max((spot.rhs - 0.8094).abs()),
        config.tolerance("spot_value")?,
    ));
    report.tables.insert("fristedt".into(), table);
    Ok(report)
}

type PathKey = Vec<Rational64>;

/// Sub-laws `k ↦ (S_{T_k} − S_{T_k−i})_{i ≤ T_k}` and `k ↦ (S↑_i)_{i ≤ T↑_k}`
/// over paths of length `m` with `T_k ≤ m`, `T↑_k` the `k`-th strict
/// future-minimum record of the transformed path.
pub fn reversal_part1(law: &IncrementLaw, m: usize) -> Result<(ExactDistribution<(usize, PathKey)>, ExactDistribution<(usize, PathKey)>)> {
    let lhs = pushforward_multi_with_budget(law, m, DEFAULT_BUDGET, |_, p| {
        (1..=m)
            .map_while(|k| reverse_at_ladder(p, k).ok().map(|r| (k, r.into_values())))
            .collect::<Vec<_>>()
    })?;
    let rhs = pushforward_multi_with_budget(law, m, DEFAULT_BUDGET, |_, p| {
        let td = tanaka_doney_with(p, LadderKind::Strict);
        let v = td.path.values();
        strict_future_min_records(&td.path, td.complete_end)
            .into_iter()
            .enumerate()
            .map(|(i, t)| (i + 1, v[..=t].to_vec()))
            .collect::<Vec<_>>()
    })?;
    Ok((lhs, rhs))
}

/// Laws of the reversal at the last strict ladder epoch up to `m` and of the
/// transformed path on its complete part.
pub fn reversal_part2(law: &IncrementLaw, m: usize) -> Result<(ExactDistribution<PathKey>, ExactDistribution<PathKey>)> {
    let lhs = pushforward_on(law, m, |_, p| reverse_at_last_strict_max(p, m).ok().map(WalkPath::into_values))?;
    let rhs = pushforward_on(law, m, |_, p| {
        let td = tanaka_doney_with(p, LadderKind::Strict);
        Some(td.path.values()[..=td.complete_end].to_vec())
    })?;
    Ok((lhs, rhs))
}

pub fn verify_reversal(config: &ExperimentConfig) -> Result<Report> {
    let mut report = Report::new(config);
    let mut table = Table::new(&["law", "m", "tv_part1", "tv_part2", "ladder_mass"]);
    let (mut worst1, mut worst2) = (BigRational::zero(), BigRational::zero());
    for (i, law) in lattice_laws(config)?.iter().enumerate() {
        for &m in &config.n_grid {
            let (l1, r1) = reversal_part1(law, m)?;
            let (l2, r2) = reversal_part2(law, m)?;
            let tv1 = distribution_equality(&l1, &r1);
            let tv2 = distribution_equality(&l2, &r2);
            table.push(vec![i as f64, m as f64, to_f64(&tv1), to_f64(&tv2), to_f64(&l1.total_mass())]);
            worst1 = worst1.max(tv1);
            worst2 = worst2.max(tv2);
        }
    }
    report.criteria.push(Criterion::at_most(
        "tv_part1",
        "exact TV, reversal at the k-th ladder epoch against the transform, all k",
        to_f64(&worst1),
        config.tolerance("tv_part1")?,
    ));
    report.criteria.push(Criterion::at_most(
        "tv_part2",
        "exact TV, reversal at the last strict ladder epoch against the transform",
        to_f64(&worst2),
        config.tolerance("tv_part2")?,
    ));
    report.tables.insert("reversal".into(), table);
    Ok(report)
}

/// Whether the future-minimum local time of the transformed path matches the
/// local time at the maximum strictly before the last ladder epoch.
pub fn idloc_holds<T: crate::Scalar>(path: &WalkPath<T>, strict: bool) -> bool {
    let td = tanaka_doney_with(path, LadderKind::Strict);
    let end = td.complete_end;
    if strict {
        future_min_local_time_strict(&td.path).counts[..end] == local_time_strict(path).counts[..end]
    } else {
        future_min_local_time(&td.path).counts[..end] == local_time_verbatim(path).counts[..end]
    }
}

pub fn verify_idloc(config: &ExperimentConfig) -> Result<Report> {
    let law = &config.law;
    if !law.is_lattice() {
        return Err(Error::UnsupportedMode("the enumerated part of the window check needs a lattice law".into()));
    }
    let mut table = Table::new(&["m", "paths", "violations_verbatim", "violations_strict", "violation_probability"]);
    let (mut verbatim, mut strict) = (0usize, 0usize);
    for &m in &config.n_grid {
        let paths = enumerate(law, m)?;
        let (mut bad, mut bad_strict) = (0usize, 0usize);
        let mut mass = BigRational::zero();
        for (key, p) in paths.atoms() {
            let path = crate::oracle::decode_path(law, key)?;
            if !idloc_holds(&path, false) {
                bad += 1;
                mass += p;
            }
            if !idloc_holds(&path, true) {
                bad_strict += 1;
            }
        }
        table.push(vec![m as f64, paths.len() as f64, bad as f64, bad_strict as f64, to_f64(&mass)]);
        verbatim += bad;
        strict += bad_strict;
    }
    let gaussian = IncrementLaw::gaussian(0.0, 1.0)?;
    let len = config.params.path_length;
    let gaussian_bad = (0..config.trials)
        .into_par_iter()
        .map(|i| {
            let path = sample_walk::<f64>(&gaussian, len, trial_seed(config.seed, i as u64))?;
            Ok(usize::from(!idloc_holds(&path, false)))
        })
        .sum::<Result<usize>>()?;
    let mut report = Report::new(config);
    report.criteria.push(Criterion::at_most(
        "lattice_violations",
        "enumerated lattice paths where the verbatim window identity fails",
        verbatim as f64,
        config.tolerance("lattice_violations")?,
    ));
    report.criteria.push(Criterion::at_most(
        "gaussian_violations",
        "Gaussian paths where the window identity fails",
        gaussian_bad as f64,
        config.tolerance("gaussian_violations")?,
    ));
    report.notes.push(format!(
        "strict-record form of the identity: {strict} violations over the same enumerated paths"
    ));
    report.tables.insert("idloc".into(), table);
    Ok(report)
}

/// Exact chain law reweighted by `V(0)/(P(C_k) V(S_k))`.
fn reweighted_chain(law: &IncrementLaw, v: &RenewalFunction, k: usize) -> Result<ExactDistribution<PathKey>> {
    let chain = exact_chain_distribution(law, v, k)?;
    let v0 = v.eval_exact(Rational64::zero()).expect("exact");
    let pc = exact_survival(law, k)?;
    let mut out = ExactDistribution::default();
    for (path, mass) in chain.atoms() {
        let vy = v.eval_exact(*path.last().unwrap()).expect("exact");
        out.add(path.clone(), mass * &v0 / (&pc * vy));
    }
    Ok(out)
}

fn harmonic_renewal(law: &IncrementLaw, report: &mut Report) -> Result<Option<RenewalFunction>> {
    let v = renewal_function(law, RenewalMode::Exact)?;
    if v.is_harmonic() {
        Ok(Some(v))
    } else {
        report
            .notes
            .push(format!("{} skipped: V is not harmonic for a walk drifting to -inf", law.description()));
        Ok(None)
    }
}

pub fn verify_meander_ac(config: &ExperimentConfig) -> Result<Report> {
    let mut report = Report::new(config);
    let mut table = Table::new(&["law", "k", "tv_meander", "survival"]);
    let mut worst = BigRational::zero();
    for (i, law) in lattice_laws(config)?.iter().enumerate() {
        let Some(v) = harmonic_renewal(law, &mut report)? else { continue };
        for &k in &config.n_grid {
            let lhs = exact_meander_distribution(law, k)?;
            let rhs = reweighted_chain(law, &v, k)?;
            let tv = distribution_equality(&lhs, &rhs);
            table.push(vec![i as f64, k as f64, to_f64(&tv), to_f64(&exact_survival(law, k)?)]);
            worst = worst.max(tv);
        }
    }
    report.criteria.push(Criterion::at_most(
        "tv_meander",
        "exact TV, meander law against the reweighted conditioned chain",
        to_f64(&worst),
        config.tolerance("tv_meander")?,
    ));
    report.tables.insert("meander_ac".into(), table);
    Ok(report)
}

/// Chain sub-law `Πq · V(0)/V(y_t)` and the law of the weak transform over
/// paths where `t` is a weak ladder epoch.
pub fn chain_and_transform(law: &IncrementLaw, v: &RenewalFunction, t: usize) -> Result<(ExactDistribution<PathKey>, ExactDistribution<PathKey>)> {
    let chain = exact_chain_distribution(law, v, t)?;
    let v0 = v.eval_exact(Rational64::zero()).expect("exact");
    let mut lhs = ExactDistribution::default();
    for (path, mass) in chain.atoms() {
        lhs.add(path.clone(), mass * &v0 / v.eval_exact(*path.last().unwrap()).expect("exact"));
    }
    let rhs = pushforward_on(law, t, |_, p| {
        let s = p.values();
        let weak_epoch = s[..t].iter().all(|x| *x <= s[t]);
        weak_epoch.then(|| tanaka_doney_weak(p).into_values())
    })?;
    Ok((lhs, rhs))
}

pub fn verify_h_kernel(config: &ExperimentConfig) -> Result<Report> {
    let p = &config.params;
    let mut report = Report::new(config);
    let mut table = Table::new(&["law", "t", "tv_chain_vs_transform", "sub_law_mass"]);
    let mut worst = BigRational::zero();
    let mut row_error = BigRational::zero();
    for (i, law) in lattice_laws(config)?.iter().enumerate() {
        let Some(v) = harmonic_renewal(law, &mut report)? else { continue };
        for &t in &config.n_grid {
            let (lhs, rhs) = chain_and_transform(law, &v, t)?;
            let tv = distribution_equality(&lhs, &rhs);
            table.push(vec![i as f64, t as f64, to_f64(&tv), to_f64(&lhs.total_mass())]);
            worst = worst.max(tv);
        }
        let unit = law.lattice_grid().expect("lattice").unit;
        for x in 0..=30i64 {
            let total: BigRational = h_kernel_row(law, &v, unit * x)?.into_iter().map(|(_, q)| q).sum();
            row_error = row_error.max((total - BigRational::one()).abs());
        }
    }
    report.criteria.push(Criterion::at_most(
        "tv_chain_vs_transform",
        "exact TV, conditioned chain against the weak Tanaka-Doney transform",
        to_f64(&worst),
        config.tolerance("tv_chain_vs_transform")?,
    ));
    report.criteria.push(Criterion::at_most(
        "row_sum_error",
        "largest exact |sum of a kernel row - 1| over states 0..30",
        to_f64(&row_error),
        config.tolerance("row_sum_error")?,
    ));
    let z = weight_mean_z(config)?;
    report.criteria.push(Criterion::at_most(
        "weight_mean_z",
        format!("|mean reweight factor - 1| in standard errors at n = {}", p.small_n),
        z,
        config.tolerance("weight_mean_z")?,
    ));
    report.tables.insert("h_kernel".into(), table);
    Ok(report)
}

fn weight_mean_z(config: &ExperimentConfig) -> Result<f64> {
    let law = &config.law;
    let n = config.params.small_n;
    let v = renewal_function(law, RenewalMode::Exact)?;
    let survival = survival_curve(law, n)?[n];
    let batch = meander_sample(
        law,
        n,
        config.trials,
        trial_seed(config.seed, 0x3EF),
        MeanderMethod::Reweight { renewal: &v, survival },
    )?;
    let w = batch.weights.expect("reweighted");
    let (m, sd) = mean_sd(&w);
    Ok((m - 1.0).abs() / (sd / (w.len() as f64).sqrt()))
}

/// Exact probability that the weak reading of the second reversal identity
/// (reversal at the last weak maximum) disagrees, as a TV distance.
pub fn weak_reversal_gap(law: &IncrementLaw, m: usize) -> Result<BigRational> {
    let lhs = pushforward_on(law, m, |_, p| crate::transforms::reverse_at_last_max(p, m).ok().map(WalkPath::into_values))?;
    let rhs = pushforward_on(law, m, |_, p| {
        let td = tanaka_doney_with(p, LadderKind::Strict);
        Some(td.path.values()[..=td.complete_end].to_vec())
    })?;
    Ok(distribution_equality(&lhs, &rhs))
}

/// Outcome of repeating a cheap KS experiment whose reference law is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct DkwCalibration {
    pub repetitions: usize,
    pub exceedances: usize,
    pub epsilon: f64,
    pub statistics: Vec<f64>,
}

/// `repetitions` independent batches of `samples` rejection meanders of
/// length `k`; counts how often the KS distance of the endpoint to its exact
/// law exceeds the DKW radius at level `delta`.
pub fn dkw_calibration(
    law: &IncrementLaw,
    k: usize,
    samples: usize,
    repetitions: usize,
    delta: f64,
    seed: u64,
) -> Result<DkwCalibration> {
    let exact = exact_meander_distribution(law, k)?.map(|path| *path.last().expect("nonempty"));
    let atoms: Vec<(f64, f64)> = exact
        .atoms()
        .iter()
        .map(|(x, p)| (x.to_f64().unwrap_or(f64::NAN), to_f64(p)))
        .collect();
    let survival = to_f64(&exact_survival(law, k)?);
    let max_attempts = ((50.0 / survival).ceil() as usize).saturating_mul(samples);
    let statistics = (0..repetitions)
        .map(|r| {
            let batch = meander_sample(law, k, samples, trial_seed(seed, r as u64), MeanderMethod::Rejection { max_attempts })?;
            let sample = crate::stats::Sample::new(batch.endpoints())?;
            Ok(crate::stats::ks_statistic(&sample, crate::stats::Reference::Atoms(&atoms), delta)?.statistic)
        })
        .collect::<Result<Vec<f64>>>()?;
    let epsilon = crate::stats::dkw_epsilon(samples as f64, delta);
    Ok(DkwCalibration {
        repetitions,
        exceedances: statistics.iter().filter(|d| **d > epsilon).count(),
        epsilon,
        statistics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::ExperimentId;

    fn small(id: ExperimentId, grid: Vec<usize>) -> ExperimentConfig {
        let mut c = ExperimentConfig::default_for(id);
        c.n_grid = grid;
        c
    }

    #[test]
    fn fristedt_suite_passes() {
        let r = verify_fristedt(&ExperimentConfig::default_for(ExperimentId::Fristedt)).unwrap();
        assert!(r.passed(), "{:?}", r.summary_lines());
        assert_eq!(r.tables["fristedt"].rows.len(), 27);
    }

    #[test]
    fn reversal_small_lengths() {
        let r = verify_reversal(&small(ExperimentId::Reversal, vec![1, 2, 3, 4, 5, 6])).unwrap();
        assert!(r.passed(), "{:?}", r.summary_lines());
    }

    #[test]
    fn dkw_calibration_small() {
        let c = dkw_calibration(&IncrementLaw::fair_coin(), 6, 500, 20, 0.01, 9).unwrap();
        assert_eq!(c.statistics.len(), 20);
        assert!(c.exceedances <= 2, "{c:?}");
    }

    #[test]
    fn weak_reading_fails_on_lattices() {
        assert!(weak_reversal_gap(&IncrementLaw::fair_coin(), 3).unwrap() > BigRational::zero());
    }

    #[test]
    fn idloc_counts_verbatim_failures() {
        let mut c = small(ExperimentId::Idloc, vec![2, 3, 4, 5]);
        c.trials = 200;
        let r = verify_idloc(&c).unwrap();
        // [0,-1,0,1] is the shortest failing path: its weak record at index 2
        // has no counterpart in the transform
        let t = &r.tables["idloc"];
        assert_eq!(t.rows[0][2], 0.0);
        assert!(t.rows[1][2] > 0.0);
        assert!(t.rows.iter().all(|row| row[3] == 0.0));
        assert_eq!(r.criterion("gaussian_violations").unwrap().value, 0.0);
    }

    #[test]
    fn conditioning_suites_small() {
        let r = verify_meander_ac(&small(ExperimentId::MeanderAc, vec![1, 2, 3, 4, 5])).unwrap();
        assert!(r.passed(), "{:?}", r.summary_lines());
        let mut c = small(ExperimentId::HKernel, vec![1, 2, 3, 4]);
        c.trials = 5000;
        let r = verify_h_kernel(&c).unwrap();
        assert!(r.passed(), "{:?}", r.summary_lines());
    }
}
