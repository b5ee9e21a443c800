//! Path transformations: the Tanaka–Doney construction, time reversal at
//! ladder epochs and at the last maximum, the post-minimum process and the
//! local time at the future minimum.

use crate::error::{Error, Result};
use crate::fluctuation::{
    ladder_sequence, last_max_index, last_min_index, last_strict_max_index, running_max, Direction,
    LocalTimeCurve, LocalTimeVariant,
};
use crate::increments::WalkPath;
use crate::scalar::Scalar;

/// Excursions of the reflected process `M − S` between consecutive strict
/// ladder epochs, plus the unfinished trailing piece.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcursionDecomposition<T> {
    pub excursions: Vec<Vec<T>>,
    pub boundary: Vec<T>,
}

impl<T> ExcursionDecomposition<T> {
    /// Total number of steps covered; equals the window length.
    pub fn steps(&self) -> usize {
        self.excursions.iter().map(|e| e.len() - 1).sum::<usize>() + self.boundary.len() - 1
    }
}

pub fn excursion_decomposition<T: Scalar>(path: &WalkPath<T>) -> ExcursionDecomposition<T> {
    let s = path.values();
    let m = running_max(path);
    let reflected: Vec<T> = m.iter().zip(s).map(|(a, b)| *a - *b).collect();
    let epochs = ladder_sequence(path, Direction::Ascending).epochs;
    let excursions = epochs
        .windows(2)
        .map(|w| reflected[w[0]..=w[1]].to_vec())
        .collect();
    let last = *epochs.last().unwrap();
    ExcursionDecomposition {
        excursions,
        boundary: reflected[last..].to_vec(),
    }
}

/// Which ladder epochs delimit the reversed excursions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderKind {
    /// `T_{k+1} = min{j > T_k : S_j > S_{T_k}}`.
    Strict,
    /// `T_{k+1} = min{j > T_k : S_j ≥ S_{T_k}}`.
    Weak,
}

/// Output of the Tanaka–Doney transformation together with the boundary of
/// its fully determined part.
#[derive(Debug, Clone, PartialEq)]
pub struct TanakaDoney<T> {
    pub path: WalkPath<T>,
    /// Ladder epochs used, `T_0 = 0 < T_1 < … < T_K ≤ m`.
    pub epochs: Vec<usize>,
    /// `T_K`: indices up to here are built from complete excursions; later
    /// indices use the trailing rule `H_K + (M − S)`.
    pub complete_end: usize,
}

pub fn ladder_epochs<T: Scalar>(path: &WalkPath<T>, kind: LadderKind) -> Vec<usize> {
    match kind {
        LadderKind::Strict => ladder_sequence(path, Direction::Ascending).epochs,
        LadderKind::Weak => {
            let s = path.values();
            let mut epochs = vec![0];
            let mut level = s[0];
            for (j, &v) in s.iter().enumerate().skip(1) {
                if v >= level {
                    level = v;
                    epochs.push(j);
                }
            }
            epochs
        }
    }
}

pub fn tanaka_doney_with<T: Scalar>(path: &WalkPath<T>, kind: LadderKind) -> TanakaDoney<T> {
    let s = path.values();
    let epochs = ladder_epochs(path, kind);
    let mut out = vec![T::zero(); s.len()];
    for w in epochs.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (ha, hb) = (s[a], s[b]);
        for i in a..=b {
            out[i] = ha + hb - s[b - (i - a)];
        }
    }
    let last = *epochs.last().unwrap();
    let m = running_max(path);
    for i in last..s.len() {
        out[i] = s[last] + (m[i] - s[i]);
    }
    TanakaDoney {
        path: WalkPath::new(out).expect("starts at zero"),
        epochs,
        complete_end: last,
    }
}

/// `S↑_i = H_k + ê^{(k)}_{i−T_k}` on each strict ladder interval.
pub fn tanaka_doney<T: Scalar>(path: &WalkPath<T>) -> WalkPath<T> {
    tanaka_doney_with(path, LadderKind::Strict).path
}

/// Same construction over weak ladder epochs.
pub fn tanaka_doney_weak<T: Scalar>(path: &WalkPath<T>) -> WalkPath<T> {
    tanaka_doney_with(path, LadderKind::Weak).path
}

fn suffix_min<T: Scalar>(s: &[T]) -> Vec<T> {
    let mut out = s.to_vec();
    for i in (0..s.len().saturating_sub(1)).rev() {
        out[i] = out[i].min_of(out[i + 1]);
    }
    out
}

/// Counts `j ≥ 1` with `S↑_j = min_{i≥j} S↑_i` and `S↑_j < S↑_{j+1}`, future
/// minima taken over the window; the last index has no successor and never
/// counts.
pub fn future_min_local_time<T: Scalar>(path: &WalkPath<T>) -> LocalTimeCurve {
    let s = path.values();
    let suf = suffix_min(s);
    let mut counts = vec![0; s.len()];
    let mut c = 0;
    for j in 1..s.len() {
        if j + 1 < s.len() && s[j] <= suf[j + 1] && s[j] < s[j + 1] {
            c += 1;
        }
        counts[j] = c;
    }
    LocalTimeCurve {
        counts,
        variant: LocalTimeVariant::Verbatim,
    }
}

/// Counts `j ≥ 1` with `S↑_j < min_{i>j} S↑_i` inside the window.
pub fn future_min_local_time_strict<T: Scalar>(path: &WalkPath<T>) -> LocalTimeCurve {
    let s = path.values();
    let suf = suffix_min(s);
    let mut counts = vec![0; s.len()];
    let mut c = 0;
    for j in 1..s.len() {
        if j + 1 < s.len() && s[j] < suf[j + 1] {
            c += 1;
        }
        counts[j] = c;
    }
    LocalTimeCurve {
        counts,
        variant: LocalTimeVariant::Strict,
    }
}

/// Strict future-minimum records of `td` computed on its complete part
/// `0..=complete_end`. The endpoint is always a record: beyond it the
/// transformed path stays strictly above the last ladder height.
pub fn strict_future_min_records<T: Scalar>(td: &WalkPath<T>, complete_end: usize) -> Vec<usize> {
    let s = &td.values()[..=complete_end];
    let suf = suffix_min(s);
    (1..=complete_end)
        .filter(|&j| j == complete_end || s[j] < suf[j + 1])
        .collect()
}

fn reversed_prefix<T: Scalar>(s: &[T], end: usize) -> WalkPath<T> {
    WalkPath::new((0..=end).map(|i| s[end] - s[end - i]).collect()).expect("starts at zero")
}

fn check_index<T: Scalar>(path: &WalkPath<T>, m: usize) -> Result<()> {
    if m > path.len() {
        return Err(Error::Dimension(format!("index {m} beyond path length {}", path.len())));
    }
    Ok(())
}

/// `(S_{T_k} − S_{T_k − i}, 0 ≤ i ≤ T_k)`.
pub fn reverse_at_ladder<T: Scalar>(path: &WalkPath<T>, k: usize) -> Result<WalkPath<T>> {
    let ladder = ladder_sequence(path, Direction::Ascending);
    if k == 0 || k > ladder.count() {
        return Err(Error::InsufficientLadder {
            requested: k,
            observed: ladder.count(),
        });
    }
    Ok(reversed_prefix(path.values(), ladder.epochs[k]))
}

/// `(S_{G_m} − S_{G_m − i}, 0 ≤ i ≤ G_m)` with `G_m` the last time `S = M` up to `m`.
pub fn reverse_at_last_max<T: Scalar>(path: &WalkPath<T>, m: usize) -> Result<WalkPath<T>> {
    check_index(path, m)?;
    Ok(reversed_prefix(path.values(), last_max_index(path, m)))
}

/// Reversal at the last strict ladder epoch up to `m`.
pub fn reverse_at_last_strict_max<T: Scalar>(path: &WalkPath<T>, m: usize) -> Result<WalkPath<T>> {
    check_index(path, m)?;
    Ok(reversed_prefix(path.values(), last_strict_max_index(path, m)))
}

/// `(S_{K_m + i} − S_{K_m}, 0 ≤ i ≤ m − K_m)`.
pub fn post_min_process<T: Scalar>(path: &WalkPath<T>, m: usize) -> Result<WalkPath<T>> {
    check_index(path, m)?;
    let s = path.values();
    let k = last_min_index(path, m);
    Ok(WalkPath::new((k..=m).map(|i| s[i] - s[k]).collect()).expect("starts at zero"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fluctuation::{local_time_strict, local_time_verbatim};
    use crate::increments::{sample_walk, trial_seed, IncrementLaw};
    use proptest::prelude::*;

    fn p(v: &[i64]) -> WalkPath<i64> {
        WalkPath::new(v.to_vec()).unwrap()
    }

    #[test]
    fn tanaka_doney_examples() {
        assert_eq!(tanaka_doney(&p(&[0, 1, 0, 2])).values(), &[0, 1, 3, 2]);
        assert_eq!(tanaka_doney(&p(&[0, 1, 2])).values(), &[0, 1, 2]);
        assert_eq!(tanaka_doney(&p(&[0, -1, 1])).values(), &[0, 2, 1]);
    }

    #[test]
    fn weak_transform_keeps_flat_returns() {
        // weak epochs 0, 2 at height 0: the reversed excursion returns to 0
        assert_eq!(tanaka_doney_weak(&p(&[0, -1, 0])).values(), &[0, 1, 0]);
        assert_eq!(tanaka_doney(&p(&[0, -1, 0])).values(), &[0, 1, 0]);
        let td = tanaka_doney_with(&p(&[0, -1, 0]), LadderKind::Strict);
        assert_eq!(td.complete_end, 0);
    }

    #[test]
    fn future_min_examples() {
        assert_eq!(future_min_local_time(&p(&[0, 1, 3, 2])).counts, vec![0, 1, 1, 1]);
        assert_eq!(future_min_local_time(&p(&[0, 1, 2, 3])).counts, vec![0, 1, 2, 2]);
        assert_eq!(future_min_local_time(&p(&[0])).counts, vec![0]);
    }

    #[test]
    fn reversal_examples() {
        let s = p(&[0, 1, 0, 2]);
        assert_eq!(reverse_at_ladder(&s, 2).unwrap().values(), &[0, 2, 1, 2]);
        assert_eq!(reverse_at_ladder(&s, 1).unwrap().values(), &[0, 1]);
        assert_eq!(reverse_at_ladder(&p(&[0, 1, 2]), 1).unwrap().values(), &[0, 1]);
        assert_eq!(
            reverse_at_ladder(&s, 3),
            Err(Error::InsufficientLadder { requested: 3, observed: 2 })
        );
        assert_eq!(reverse_at_last_max(&s, 2).unwrap().values(), &[0, 1]);
        assert_eq!(reverse_at_last_max(&s, 3).unwrap().values(), &[0, 2, 1, 2]);
        assert_eq!(reverse_at_last_max(&s, 0).unwrap().values(), &[0]);
        assert!(reverse_at_last_max(&s, 4).is_err());
    }

    #[test]
    fn post_min_examples() {
        let s = p(&[0, -1, 1, -2]);
        assert_eq!(post_min_process(&s, 2).unwrap().values(), &[0, 2]);
        assert_eq!(post_min_process(&s, 3).unwrap().values(), &[0]);
        assert_eq!(post_min_process(&s, 0).unwrap().values(), &[0]);
    }

    #[test]
    fn verbatim_identity_breaks_on_lattice_ties() {
        // the tie at level 1 (index 3) is mirrored to index 2 inside the
        // reversed excursion, so the curves differ strictly below T_last = 4
        let s = p(&[0, 1, 0, 1, 2]);
        let td = tanaka_doney(&s);
        assert_eq!(td.values(), &[0, 1, 2, 3, 2]);
        assert_eq!(future_min_local_time(&td).counts[..4], [0, 1, 2, 2]);
        assert_eq!(local_time_verbatim(&s).counts[..4], [0, 1, 1, 2]);
        assert_eq!(future_min_local_time_strict(&td).counts[..4], local_time_strict(&s).counts[..4]);
    }

    #[test]
    fn idloc_window_form_on_gaussian_paths() {
        let law = IncrementLaw::gaussian(0.0, 1.0).unwrap();
        for t in 0..2_000 {
            let s: WalkPath<f64> = sample_walk(&law, 200, trial_seed(5, t)).unwrap();
            let td = tanaka_doney_with(&s, LadderKind::Strict);
            let lhs = future_min_local_time(&td.path);
            let rhs = local_time_verbatim(&s);
            assert_eq!(lhs.counts[..td.complete_end], rhs.counts[..td.complete_end]);
        }
    }

    fn lattice_path() -> impl Strategy<Value = WalkPath<i64>> {
        prop::collection::vec(-2i64..=2, 0..40).prop_map(WalkPath::from_increments)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn positivity_and_heights(path in lattice_path()) {
            let td = tanaka_doney_with(&path, LadderKind::Strict);
            let ladder = ladder_sequence(&path, Direction::Ascending);
            let v = td.path.values();
            prop_assert!(v.iter().all(|x| *x >= 0));
            prop_assert!(v[1..=td.complete_end].iter().all(|x| *x > 0));
            for (t, h) in ladder.epochs.iter().zip(&ladder.heights) {
                prop_assert_eq!(v[*t], *h);
            }
            prop_assert_eq!(v.len(), path.values().len());
        }

        #[test]
        fn increments_are_reversed_per_interval(path in lattice_path()) {
            let td = tanaka_doney_with(&path, LadderKind::Strict);
            let s = path.values();
            let u = td.path.values();
            for w in td.epochs.windows(2) {
                let mut a: Vec<i64> = (w[0]..w[1]).map(|i| u[i + 1] - u[i]).collect();
                let b: Vec<i64> = (w[0]..w[1]).map(|i| s[i + 1] - s[i]).collect();
                a.reverse();
                prop_assert_eq!(a, b);
            }
        }

        #[test]
        fn strict_idloc_window_form(path in lattice_path()) {
            let td = tanaka_doney_with(&path, LadderKind::Strict);
            let lhs = future_min_local_time_strict(&td.path);
            let rhs = local_time_strict(&path);
            prop_assert_eq!(&lhs.counts[..td.complete_end], &rhs.counts[..td.complete_end]);
            let records = strict_future_min_records(&td.path, td.complete_end);
            prop_assert_eq!(records, td.epochs[1..].to_vec());
        }

        #[test]
        fn verbatim_idloc_holds_at_ladder_epochs(path in lattice_path()) {
            let td = tanaka_doney_with(&path, LadderKind::Strict);
            let lhs = future_min_local_time(&td.path);
            let rhs = local_time_verbatim(&path);
            for &t in &td.epochs[..td.epochs.len() - 1] {
                prop_assert_eq!(lhs.counts[t], rhs.counts[t]);
            }
        }

        #[test]
        fn excursions_tile_the_window(path in lattice_path()) {
            let d = excursion_decomposition(&path);
            prop_assert_eq!(d.steps(), path.len());
            for e in &d.excursions {
                prop_assert_eq!(e[0], 0);
                prop_assert_eq!(*e.last().unwrap(), 0);
                prop_assert!(e.iter().all(|x| *x >= 0));
            }
        }
    }
}
