//! Exact identities through the public API, and the lattice counterexamples
//! that fix which reading of each identity holds.

use num_rational::{BigRational, Rational64};
use num_traits::{ToPrimitive, Zero};

use ladder::experiments::verify::{chain_and_transform, idloc_holds, reversal_part1, reversal_part2, weak_reversal_gap};
use ladder::fluctuation::{local_time_strict, local_time_verbatim};
use ladder::increments::{ratio, sample_walk, trial_seed};
use ladder::oracle::{distribution_equality, enumerate, functional_distribution, pushforward};
use ladder::stats::{dkw_epsilon, ks_statistic, Reference, Sample};
use ladder::transforms::{reverse_at_last_max, reverse_at_last_strict_max, tanaka_doney_with, LadderKind};
use ladder::conditioning::{renewal_function, RenewalMode};
use ladder::{ExactPath, IncrementLaw, WalkPath};

fn r(n: i64, d: i64) -> BigRational {
    ratio(n, d)
}

fn exact(v: &[i64]) -> ExactPath {
    WalkPath::new(v.iter().map(|x| Rational64::from_integer(*x)).collect()).unwrap()
}

fn laws() -> Vec<IncrementLaw> {
    vec![
        IncrementLaw::fair_coin(),
        IncrementLaw::biased_coin(r(3, 4)).unwrap(),
        IncrementLaw::uniform_three(),
    ]
}

#[test]
fn local_time_tables_and_their_distance() {
    let fair = IncrementLaw::fair_coin();
    let paths = enumerate(&fair, 2).unwrap();
    let verbatim = functional_distribution(&fair, &paths, |p| local_time_verbatim(p).total()).unwrap();
    let strict = functional_distribution(&fair, &paths, |p| local_time_strict(p).total()).unwrap();
    assert_eq!(verbatim.mass(&0), r(1, 4));
    assert_eq!(verbatim.mass(&1), r(1, 2));
    assert_eq!(verbatim.mass(&2), r(1, 4));
    assert_eq!(strict.mass(&0), r(1, 2));
    assert_eq!(strict.mass(&1), r(1, 4));
    assert_eq!(distribution_equality(&verbatim, &strict), r(1, 4));
    assert!(distribution_equality(&verbatim, &verbatim).is_zero());
}

#[test]
fn strict_last_maximum_reversal_matches_the_transform() {
    for law in laws() {
        for m in 1..=8 {
            let (a, b) = reversal_part2(&law, m).unwrap();
            assert!(distribution_equality(&a, &b).is_zero(), "{} m={m}", law.description());
            let (a, b) = reversal_part1(&law, m).unwrap();
            assert!(distribution_equality(&a, &b).is_zero(), "{} m={m}", law.description());
        }
    }
}

#[test]
fn weak_last_maximum_reading_fails_on_a_tie() {
    // S = [0,1,0,1], m = 3: the weak last maximum is at 3, the strict one at 1
    let s = exact(&[0, 1, 0, 1]);
    assert_eq!(reverse_at_last_max(&s, 3).unwrap().values().len(), 4);
    assert_eq!(reverse_at_last_strict_max(&s, 3).unwrap(), exact(&[0, 1]));
    let td = tanaka_doney_with(&s, LadderKind::Strict);
    assert_eq!(td.complete_end, 1);
    let fair = IncrementLaw::fair_coin();
    assert!(weak_reversal_gap(&fair, 1).unwrap().is_zero());
    // [0,-1,0] is the first tie at the maximum
    assert_eq!(weak_reversal_gap(&fair, 2).unwrap(), r(1, 4));
    assert_eq!(weak_reversal_gap(&fair, 3).unwrap(), r(1, 4));
    // a flat step ties at once
    assert_eq!(weak_reversal_gap(&IncrementLaw::uniform_three(), 1).unwrap(), r(1, 3));
}

#[test]
fn conditioned_chain_is_the_weak_transform() {
    for law in laws() {
        let v = renewal_function(&law, RenewalMode::Exact).unwrap();
        for t in 1..=6 {
            let (a, b) = chain_and_transform(&law, &v, t).unwrap();
            assert!(distribution_equality(&a, &b).is_zero(), "{} t={t}", law.description());
        }
    }
}

#[test]
fn verbatim_window_identity_needs_tie_free_paths() {
    assert!(!idloc_holds(&exact(&[0, -1, 0, 1]), false));
    assert!(!idloc_holds(&exact(&[0, 1, 0, 1, 2]), false));
    assert!(idloc_holds(&exact(&[0, -1, 0, 1]), true));
    assert!(idloc_holds(&exact(&[0, 1, 0, 2]), false));
}

#[test]
fn monte_carlo_frequencies_sit_in_dkw_bands() {
    // 300 batches per law at level 0.99: more than 8 exceedances has
    // probability below 0.005 when the bands are valid
    let m = 6;
    let n = 1000;
    for (li, law) in laws().into_iter().enumerate() {
        let oracle = pushforward(&law, m, |p| p.last()).unwrap();
        let atoms: Vec<(f64, f64)> = oracle
            .atoms()
            .iter()
            .map(|(x, p)| (x.to_f64().unwrap(), p.to_f64().unwrap()))
            .collect();
        let eps = dkw_epsilon(n as f64, 0.01);
        let mut exceed = 0;
        for b in 0..300u64 {
            let seed = trial_seed(0xD0C + li as u64, b);
            let ends: Vec<f64> = (0..n as u64)
                .map(|i| sample_walk::<f64>(&law, m, trial_seed(seed, i)).unwrap().last())
                .collect();
            let d = ks_statistic(&Sample::new(ends).unwrap(), Reference::Atoms(&atoms), 0.01).unwrap();
            exceed += usize::from(d.statistic > eps);
        }
        assert!(exceed <= 8, "{}: {exceed} exceedances", law.description());
    }
}
