use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::increments::{ratio, IncrementLaw};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentId {
    Theorem1,
    Localtime,
    Lemma1,
    Meander,
    Harmonic,
    Fristedt,
    Reversal,
    Idloc,
    MeanderAc,
    HKernel,
}

impl ExperimentId {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::Theorem1 => "theorem1",
            ExperimentId::Localtime => "localtime",
            ExperimentId::Lemma1 => "lemma1",
            ExperimentId::Meander => "meander",
            ExperimentId::Harmonic => "harmonic",
            ExperimentId::Fristedt => "fristedt",
            ExperimentId::Reversal => "reversal",
            ExperimentId::Idloc => "idloc",
            ExperimentId::MeanderAc => "meander-ac",
            ExperimentId::HKernel => "h-kernel",
        }
    }
}

/// Knobs beyond the common fields; each experiment reads the ones it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// Fixed time `t` of the ladder marginals.
    pub t: f64,
    /// Ladder searches stop after `horizon · n` steps.
    pub horizon: f64,
    /// Absolute step cap for ladder searches that do not scale with `n`.
    pub step_cap: usize,
    /// Base resolution `N = 2^base_exponent` for nested skeletons.
    pub base_exponent: u32,
    /// Small horizon where rejection sampling is the ground truth.
    pub small_n: usize,
    pub small_samples: usize,
    pub x_grid: Vec<f64>,
    /// Truncation tolerance for norming constants.
    pub rel_tol: f64,
    /// Confidence level of the DKW bands.
    pub delta: f64,
    /// Samples of the heavy-tailed family used for ratio checks.
    pub ratio_samples: usize,
    /// Ladder-height intervals `(a, b]` in units of `n`.
    pub intervals: Vec<(f64, f64)>,
    /// Laws used by the exact certification suites.
    pub laws: Vec<IncrementLaw>,
    /// `(α, β)` pairs for the Fristedt check.
    pub alpha_beta: Vec<(f64, f64)>,
    pub truncation: usize,
    /// Length of the simulated diffuse paths in the window-identity check.
    pub path_length: usize,
    /// Also collect the descending ladder tuple for the joint check.
    pub joint: bool,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            t: 1.0,
            horizon: 1000.0,
            step_cap: 1 << 24,
            base_exponent: 16,
            small_n: 32,
            small_samples: 100_000,
            x_grid: vec![1.0, 3.0],
            rel_tol: 1e-9,
            delta: 0.01,
            ratio_samples: 200_000,
            intervals: vec![(0.5, 1.0), (1.0, 2.0)],
            laws: certification_laws(),
            alpha_beta: [0.5, 1.0, 2.0]
                .iter()
                .flat_map(|a| [0.0, 0.5, 1.0].map(|b| (*a, b)))
                .collect(),
            truncation: 60,
            path_length: 1000,
            joint: false,
        }
    }
}

pub fn certification_laws() -> Vec<IncrementLaw> {
    vec![
        IncrementLaw::fair_coin(),
        IncrementLaw::biased_coin(ratio(3, 4)).expect("valid"),
        IncrementLaw::uniform_three(),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub law: IncrementLaw,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Thresholds by criterion id; a criterion passes when its value is at most the threshold.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub params: Params,
}

fn tol(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

pub const DEFAULT_SEED: u64 = 0x5EED_2024;

impl ExperimentConfig {
    /// The pinned configuration of each experiment.
    pub fn default_for(id: ExperimentId) -> Self {
        let gaussian = IncrementLaw::gaussian(0.0, 1.0).expect("valid");
        let fair = IncrementLaw::fair_coin();
        let pow2 = |lo: u32, hi: u32| (lo..=hi).map(|e| 1usize << e).collect::<Vec<_>>();
        let (law, n_grid, trials, tolerances) = match id {
            ExperimentId::Theorem1 => (
                gaussian,
                vec![256, 1024, 4096],
                10_000,
                tol(&[("ks_ladder_time", 0.02), ("mean_height", 0.02), ("sd_height", 0.05)]),
            ),
            ExperimentId::Localtime => (gaussian, pow2(8, 13), 200, tol(&[("trend_violations", 1.0), ("trend_ratio", 0.5)])),
            ExperimentId::Lemma1 => (
                gaussian,
                vec![1024, 2048, 4096],
                100_000,
                tol(&[("drift_rel_error", 0.03), ("height_measure", 0.02), ("tail_ratio_rel_error", 0.10)]),
            ),
            ExperimentId::Meander => (
                fair,
                vec![1024, 2048, 4096],
                10_000,
                tol(&[("ks_rayleigh", 0.02), ("ks_methods", 0.01)]),
            ),
            ExperimentId::Harmonic => (
                fair,
                pow2(4, 13),
                100,
                tol(&[("product_rel_error", 0.05), ("last_doubling_change", 0.02)]),
            ),
            ExperimentId::Fristedt => (fair, vec![60], 100, tol(&[("max_residual_excess", 0.0), ("max_tail_bound", 1e-6), ("spot_value", 5e-5)])),
            ExperimentId::Reversal => (fair, (1..=10).collect(), 100, tol(&[("tv_part1", 0.0), ("tv_part2", 0.0)])),
            ExperimentId::Idloc => (
                fair,
                (1..=12).collect(),
                10_000,
                tol(&[("lattice_violations", 0.0), ("gaussian_violations", 0.0)]),
            ),
            ExperimentId::MeanderAc => (fair, (1..=10).collect(), 100, tol(&[("tv_meander", 0.0)])),
            ExperimentId::HKernel => (
                fair,
                (1..=10).collect(),
                100_000,
                tol(&[("tv_chain_vs_transform", 1e-12), ("row_sum_error", 0.0), ("weight_mean_z", 3.0)]),
            ),
        };
        Self {
            experiment: id,
            law,
            n_grid,
            trials,
            seed: DEFAULT_SEED,
            tolerances,
            params: Params::default(),
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: Self = serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() {
            return Err(Error::Config("n-grid is empty".into()));
        }
        if self.n_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(format!("n-grid must be strictly increasing: {:?}", self.n_grid)));
        }
        if self.n_grid[0] == 0 {
            return Err(Error::Config("n-grid entries must be positive".into()));
        }
        if self.trials < 100 {
            return Err(Error::Config(format!("trials must be at least 100, got {}", self.trials)));
        }
        Ok(())
    }

    pub fn tolerance(&self, id: &str) -> Result<f64> {
        self.tolerances
            .get(id)
            .copied()
            .ok_or_else(|| Error::Config(format!("no tolerance configured for {id}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        for id in [
            ExperimentId::Theorem1,
            ExperimentId::Localtime,
            ExperimentId::Lemma1,
            ExperimentId::Meander,
            ExperimentId::Harmonic,
            ExperimentId::Fristedt,
            ExperimentId::Reversal,
            ExperimentId::Idloc,
            ExperimentId::MeanderAc,
            ExperimentId::HKernel,
        ] {
            let c = ExperimentConfig::default_for(id);
            c.validate().unwrap();
            let text = serde_json::to_string(&c).unwrap();
            let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
            assert_eq!(back, c);
        }
    }

    #[test]
    fn rejects_bad_grids() {
        let mut c = ExperimentConfig::default_for(ExperimentId::Theorem1);
        c.n_grid = vec![4, 4, 8];
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        c.n_grid = vec![4, 8];
        c.trials = 99;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn partial_params_use_defaults() {
        let text = r#"{"experiment":"theorem1","law":{"kind":"gaussian","mean":0.0,"stddev":1.0},
            "n_grid":[16,32,64],"trials":100,"seed":3,"params":{"t":0.5}}"#;
        let c: ExperimentConfig = serde_json::from_str(text).unwrap();
        assert_eq!(c.params.t, 0.5);
        assert_eq!(c.params.horizon, Params::default().horizon);
    }
}
