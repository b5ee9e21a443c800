//! Local times at the maximum, ladder sequences and last-extremum indices.

use crate::increments::WalkPath;
use crate::scalar::Scalar;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalTimeVariant {
    /// Counts `j` with `S_{j-1} < S_j = max_{i≤j} S_i` (up-step records, ties included).
    Verbatim,
    /// Counts `j` with `S_j > max_{i<j} S_i`.
    Strict,
}

/// Nondecreasing counting curve `Λ_0 = 0, Λ_1, …, Λ_m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalTimeCurve {
    pub counts: Vec<usize>,
    pub variant: LocalTimeVariant,
}

impl LocalTimeCurve {
    pub fn total(&self) -> usize {
        *self.counts.last().expect("curve has Λ_0")
    }

    pub fn at(&self, k: usize) -> usize {
        self.counts[k]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,value\n");
        for (i, c) in self.counts.iter().enumerate() {
            out.push_str(&format!("{i},{c}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Ascending,
    Descending,
}

/// Strict ladder epochs and heights realized inside the window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderSequence<T> {
    pub epochs: Vec<usize>,
    pub heights: Vec<T>,
    /// The window continues past the last epoch without a further strict
    /// record: the next epoch is not observed in the window.
    pub killed_in_window: bool,
    pub direction: Direction,
}

impl<T: Scalar> LadderSequence<T> {
    /// Number of epochs after `T_0`.
    pub fn count(&self) -> usize {
        self.epochs.len() - 1
    }

    pub fn last_epoch(&self) -> usize {
        *self.epochs.last().expect("T_0 always present")
    }
}

impl<T: Scalar + Serialize> LadderSequence<T> {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "epochs": self.epochs,
            "heights": self.heights,
            "killed": self.killed_in_window,
            "direction": self.direction,
        })
    }
}

pub fn running_max<T: Scalar>(path: &WalkPath<T>) -> Vec<T> {
    let mut out = Vec::with_capacity(path.values().len());
    let mut m = T::zero();
    for &v in path.values() {
        m = m.max_of(v);
        out.push(m);
    }
    out
}

pub fn running_min<T: Scalar>(path: &WalkPath<T>) -> Vec<T> {
    let mut out = Vec::with_capacity(path.values().len());
    let mut m = T::zero();
    for &v in path.values() {
        m = m.min_of(v);
        out.push(m);
    }
    out
}

pub fn local_time_verbatim<T: Scalar>(path: &WalkPath<T>) -> LocalTimeCurve {
    let s = path.values();
    let mut counts = Vec::with_capacity(s.len());
    counts.push(0);
    let mut max = s[0];
    let mut c = 0;
    for j in 1..s.len() {
        max = max.max_of(s[j]);
        if s[j - 1] < s[j] && s[j] == max {
            c += 1;
        }
        counts.push(c);
    }
    LocalTimeCurve {
        counts,
        variant: LocalTimeVariant::Verbatim,
    }
}

pub fn local_time_strict<T: Scalar>(path: &WalkPath<T>) -> LocalTimeCurve {
    let s = path.values();
    let mut counts = Vec::with_capacity(s.len());
    counts.push(0);
    let mut max = s[0];
    let mut c = 0;
    for &v in &s[1..] {
        if v > max {
            c += 1;
            max = v;
        }
        counts.push(c);
    }
    LocalTimeCurve {
        counts,
        variant: LocalTimeVariant::Strict,
    }
}

pub fn local_time<T: Scalar>(path: &WalkPath<T>, variant: LocalTimeVariant) -> LocalTimeCurve {
    match variant {
        LocalTimeVariant::Verbatim => local_time_verbatim(path),
        LocalTimeVariant::Strict => local_time_strict(path),
    }
}

/// Strict ladder recursion `T_{k+1} = min{j > T_k : S_j > S_{T_k}}`; the
/// descending direction runs it on `−S` and reports heights of `−S`.
pub fn ladder_sequence<T: Scalar>(path: &WalkPath<T>, direction: Direction) -> LadderSequence<T> {
    let sign = |v: T| match direction {
        Direction::Ascending => v,
        Direction::Descending => -v,
    };
    let s = path.values();
    let mut epochs = vec![0];
    let mut heights = vec![T::zero()];
    let mut level = T::zero();
    for (j, &v) in s.iter().enumerate().skip(1) {
        let v = sign(v);
        if v > level {
            level = v;
            epochs.push(j);
            heights.push(v);
        }
    }
    let killed_in_window = *epochs.last().unwrap() < path.len();
    LadderSequence {
        epochs,
        heights,
        killed_in_window,
        direction,
    }
}

/// `G_k = max{j ≤ k : M_j = S_j}`.
pub fn last_max_index<T: Scalar>(path: &WalkPath<T>, k: usize) -> usize {
    let s = &path.values()[..=k];
    let mut max = s[0];
    let mut last = 0;
    for (j, &v) in s.iter().enumerate() {
        if v >= max {
            max = v;
            last = j;
        }
    }
    last
}

/// Last strict ladder epoch at or before `k`.
pub fn last_strict_max_index<T: Scalar>(path: &WalkPath<T>, k: usize) -> usize {
    let s = &path.values()[..=k];
    let mut max = s[0];
    let mut last = 0;
    for (j, &v) in s.iter().enumerate() {
        if v > max {
            max = v;
            last = j;
        }
    }
    last
}

/// `K_k = max{j ≤ k : S_j = min_{l ≤ j} S_l}`.
pub fn last_min_index<T: Scalar>(path: &WalkPath<T>, k: usize) -> usize {
    last_max_index(&path.negated(), k)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum RatioValue {
    Finite(f64),
    Infinite,
    Undefined,
}

/// Records at the maximum against records at the minimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecordsRatio {
    pub up: usize,
    pub down: usize,
    pub ratio: RatioValue,
}

pub fn records_ratio<T: Scalar>(path: &WalkPath<T>) -> RecordsRatio {
    let up = local_time_verbatim(path).total();
    let down = local_time_verbatim(&path.negated()).total();
    let ratio = match (up, down) {
        (0, 0) => RatioValue::Undefined,
        (_, 0) => RatioValue::Infinite,
        (u, d) => RatioValue::Finite(u as f64 / d as f64),
    };
    RecordsRatio { up, down, ratio }
}
