//! Pulsed Monte Carlo of the coincidence experiment: per pulse, at most one
//! two-photon event lands on the detectors, sampled from the outcome
//! distribution at the configured source ratio and overlap.

use std::collections::BTreeMap;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::Binomial;

use crate::error::{Error, Result};
use crate::interference::outcome_distribution;

/// Configuration of one counting run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CountingRun {
    pub gamma: f64,
    /// Pairwise source overlap f in [0, 1].
    pub overlap: f64,
    /// Probability per pulse that a post-selected two-photon event occurs.
    pub mean_pairs_per_pulse: f64,
    pub pulses: u64,
    pub seed: u64,
    /// Coincidence window, metadata echoed into output files.
    pub window_ns: f64,
    /// Per-pulse, per-detector probability of a dark count (singles only).
    pub dark_count_prob: f64,
}

impl CountingRun {
    pub fn new(gamma: f64, overlap: f64, mean_pairs_per_pulse: f64, pulses: u64, seed: u64) -> Self {
        Self {
            gamma,
            overlap,
            mean_pairs_per_pulse,
            pulses,
            seed,
            window_ns: 1.0,
            dark_count_prob: 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if !self.mean_pairs_per_pulse.is_finite()
            || self.mean_pairs_per_pulse <= 0.0
            || self.mean_pairs_per_pulse > 1.0
        {
            return Err(Error::ParameterOutOfRange {
                name: "mean_pairs_per_pulse",
                value: self.mean_pairs_per_pulse,
                range: "(0, 1]",
            });
        }
        if self.pulses == 0 {
            return Err(Error::ParameterOutOfRange {
                name: "pulses",
                value: 0.0,
                range: "[1, inf)",
            });
        }
        if !self.window_ns.is_finite() || self.window_ns <= 0.0 {
            return Err(Error::ParameterOutOfRange {
                name: "window_ns",
                value: self.window_ns,
                range: "(0, inf)",
            });
        }
        if !self.dark_count_prob.is_finite() || !(0.0..1.0).contains(&self.dark_count_prob) {
            return Err(Error::ParameterOutOfRange {
                name: "dark_count_prob",
                value: self.dark_count_prob,
                range: "[0, 1)",
            });
        }
        Ok(())
    }
}

/// Accumulated counts of one run.  Without dark counts the singles sum to
/// exactly twice the number of events.
#[derive(Clone, Debug, PartialEq)]
pub struct CountRecord {
    pub run: CountingRun,
    /// Two-photon events that actually occurred.
    pub events: u64,
    /// Photons registered per detector (a double-occupancy event adds two).
    pub singles: [u64; 4],
    /// Events with one photon on each detector of the pair.
    pub coincidences: BTreeMap<(usize, usize), u64>,
    /// Events with both photons on the same detector.
    pub double_occupancy: [u64; 4],
}

impl CountRecord {
    /// (max - min) / (max + min) over the six pair counts.
    pub fn coincidence_visibility(&self) -> f64 {
        let max = self.coincidences.values().copied().max().unwrap_or(0) as f64;
        let min = self.coincidences.values().copied().min().unwrap_or(0) as f64;
        if max + min == 0.0 { 0.0 } else { (max - min) / (max + min) }
    }

    /// Pearson statistic of the ten outcome categories against the model
    /// distribution (9 degrees of freedom when all events are kept).
    pub fn chi_squared_statistic(&self) -> Result<f64> {
        let model = outcome_distribution(self.run.gamma, self.run.overlap)?;
        let events = self.events as f64;
        let mut statistic = 0.0;
        for (&pair, &count) in &self.coincidences {
            let expected = events * model.pairs[&pair];
            statistic += (count as f64 - expected).powi(2) / expected;
        }
        for detector in 0..4 {
            let expected = events * model.doubles[detector];
            statistic += (self.double_occupancy[detector] as f64 - expected).powi(2) / expected;
        }
        Ok(statistic)
    }
}

#[derive(Clone, Copy)]
enum Outcome {
    Pair(usize, usize),
    Double(usize),
}

/// Run the counting experiment with default window and no dark counts.
pub fn simulate_counts(
    gamma: f64,
    overlap: f64,
    mean_pairs_per_pulse: f64,
    pulses: u64,
    seed: u64,
) -> Result<CountRecord> {
    simulate_counts_with(&CountingRun::new(gamma, overlap, mean_pairs_per_pulse, pulses, seed))
}

pub fn simulate_counts_with(run: &CountingRun) -> Result<CountRecord> {
    run.validate()?;
    let model = outcome_distribution(run.gamma, run.overlap)?;

    let mut outcomes: Vec<(Outcome, f64)> = Vec::with_capacity(10);
    for (&(j, k), &p) in &model.pairs {
        outcomes.push((Outcome::Pair(j, k), p));
    }
    for (detector, &p) in model.doubles.iter().enumerate() {
        outcomes.push((Outcome::Double(detector), p));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(run.seed);
    // One Bernoulli trial per pulse, drawn in bulk.
    let events = Binomial::new(run.pulses, run.mean_pairs_per_pulse)
        .expect("validated probability")
        .sample(&mut rng);

    let mut singles = [0u64; 4];
    let mut double_occupancy = [0u64; 4];
    let mut coincidences: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for &pair in model.pairs.keys() {
        coincidences.insert(pair, 0);
    }

    for _ in 0..events {
        let draw: f64 = rng.random();
        let mut cumulative = 0.0;
        let mut chosen = outcomes[outcomes.len() - 1].0;
        for &(outcome, p) in &outcomes {
            cumulative += p;
            if draw < cumulative {
                chosen = outcome;
                break;
            }
        }
        match chosen {
            Outcome::Pair(j, k) => {
                singles[j] += 1;
                singles[k] += 1;
                *coincidences.get_mut(&(j, k)).expect("seeded key") += 1;
            }
            Outcome::Double(detector) => {
                singles[detector] += 2;
                double_occupancy[detector] += 1;
            }
        }
    }

    if run.dark_count_prob > 0.0 {
        let dark = Binomial::new(run.pulses, run.dark_count_prob).expect("validated probability");
        for detector in &mut singles {
            *detector += dark.sample(&mut rng);
        }
    }

    Ok(CountRecord {
        run: *run,
        events,
        singles,
        coincidences,
        double_occupancy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_seed_reproduces_the_record() {
        let first = simulate_counts(1.0, 1.0, 0.1, 50_000, 42).unwrap();
        let second = simulate_counts(1.0, 1.0, 0.1, 50_000, 42).unwrap();
        assert_eq!(first, second);
        let shifted = simulate_counts(1.0, 1.0, 0.1, 50_000, 43).unwrap();
        assert_ne!(first, shifted);
    }

    #[test]
    fn singles_account_for_every_photon() {
        for (gamma, overlap, seed) in [(1.0, 1.0, 1u64), (0.5, 0.3, 2), (0.0, 0.0, 3)] {
            let record = simulate_counts(gamma, overlap, 0.2, 20_000, seed).unwrap();
            let photons: u64 = record.singles.iter().sum();
            assert_eq!(photons, 2 * record.events);
            let pair_events: u64 = record.coincidences.values().sum();
            let double_events: u64 = record.double_occupancy.iter().sum();
            assert_eq!(pair_events + double_events, record.events);
        }
    }

    #[test]
    fn coincidences_never_exceed_their_singles() {
        let record = simulate_counts(1.0, 0.7, 0.15, 30_000, 9).unwrap();
        for (&(j, k), &count) in &record.coincidences {
            assert!(count <= record.singles[j].min(record.singles[k]));
        }
    }

    #[test]
    fn event_total_tracks_the_pulse_rate() {
        let pulses = 200_000u64;
        let rate = 0.05;
        let record = simulate_counts(1.0, 1.0, rate, pulses, 11).unwrap();
        let expected = pulses as f64 * rate;
        let sigma = (pulses as f64 * rate * (1.0 - rate)).sqrt();
        let deviation = (record.events as f64 - expected).abs();
        assert!(deviation < 5.0 * sigma, "deviation {deviation:.1} vs sigma {sigma:.1}");
    }

    #[test]
    fn dark_counts_inflate_singles_only() {
        let mut run = CountingRun::new(1.0, 1.0, 0.1, 50_000, 5);
        run.dark_count_prob = 0.01;
        let record = simulate_counts_with(&run).unwrap();
        let photons: u64 = record.singles.iter().sum();
        assert!(photons > 2 * record.events);
        let pair_events: u64 = record.coincidences.values().sum();
        let double_events: u64 = record.double_occupancy.iter().sum();
        assert_eq!(pair_events + double_events, record.events);
    }

    #[test]
    fn sampled_outcomes_pass_the_pearson_check() {
        // 1% critical value for 9 degrees of freedom.
        const CRITICAL: f64 = 21.666;
        for (seed, overlap) in [(7u64, 1.0), (19, 0.5), (23, 0.0)] {
            let record = simulate_counts(1.0, overlap, 0.2, 500_000, seed).unwrap();
            let statistic = record.chi_squared_statistic().unwrap();
            assert!(
                statistic < CRITICAL,
                "seed {seed}, overlap {overlap}: chi2 {statistic:.2}"
            );
        }
    }

    #[test]
    fn balanced_run_reproduces_the_suppression_visibility() {
        let record = simulate_counts(1.0, 1.0, 0.1, 1_000_000, 4242).unwrap();
        let visibility = record.coincidence_visibility();
        assert!(
            (visibility - 0.5).abs() < 0.02,
            "visibility {visibility:.4}"
        );
    }

    #[test]
    fn invalid_configurations_are_rejected() {
        assert!(simulate_counts(1.0, 1.0, 0.0, 1000, 1).is_err());
        assert!(simulate_counts(1.0, 1.0, 1.5, 1000, 1).is_err());
        assert!(simulate_counts(1.0, 1.1, 0.1, 1000, 1).is_err());
        assert!(simulate_counts(1.0, 1.0, 0.1, 0, 1).is_err());
        let mut run = CountingRun::new(1.0, 1.0, 0.1, 1000, 1);
        run.dark_count_prob = 1.0;
        assert!(simulate_counts_with(&run).is_err());
        let mut run = CountingRun::new(1.0, 1.0, 0.1, 1000, 1);
        run.window_ns = 0.0;
        assert!(simulate_counts_with(&run).is_err());
    }
}
