//! Two phase-randomized weak coherent sources feeding two input modes.
//!
//! With both sources phase-randomized there is no first-order coherence
//! between the inputs, so conditioning on exactly two photons leaves a
//! classical mixture of |2> in the first fed mode, |2> in the second, and
//! one photon in each.  The mixture weights depend only on the intensity
//! ratio gamma = mu / mu':
//!
//!   1 : gamma^2 : 2 gamma   (normalized by (1 + gamma)^2)
//!
//! where mu' is the mean photon number of the source on the first fed mode
//! and mu the one on the second.  The factor 2 on the mixed term is the
//! identity p2(mu) p0(mu) = p1(mu)^2 / 2 at work.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{TwoPhotonDensityMatrix, canonical_basis};

/// Input modes used when none are specified: the second and fourth port.
pub const DEFAULT_INPUT_MODES: (usize, usize) = (1, 3);

/// Poisson photon-number probability mu^n e^{-mu} / n!.
pub fn poisson_photon_prob(mu: f64, n: u32) -> Result<f64> {
    if !mu.is_finite() || mu < 0.0 {
        return Err(Error::ParameterOutOfRange {
            name: "mu",
            value: mu,
            range: "[0, inf)",
        });
    }
    let mut log_factorial = 0.0;
    for i in 2..=n {
        log_factorial += f64::from(i).ln();
    }
    if mu == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    Ok((f64::from(n) * mu.ln() - mu - log_factorial).exp())
}

/// Probability that the two sources emit exactly two photons in total:
/// e^{-mu-mu'} (mu^2/2 + mu'^2/2 + mu mu').
pub fn two_photon_sector_probability(mu: f64, mu_prime: f64) -> Result<f64> {
    for (name, value) in [("mu", mu), ("mu_prime", mu_prime)] {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::ParameterOutOfRange {
                name,
                value,
                range: "[0, inf)",
            });
        }
    }
    Ok((-mu - mu_prime).exp() * (mu * mu / 2.0 + mu_prime * mu_prime / 2.0 + mu * mu_prime))
}

/// Mixture weights of the two-photon sector, normalized to sum to 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncatedInputState {
    /// Both photons in the first fed mode.
    pub both_in_first: f64,
    /// Both photons in the second fed mode.
    pub both_in_second: f64,
    /// One photon in each fed mode.
    pub one_in_each: f64,
}

impl TruncatedInputState {
    pub fn from_gamma(gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        let norm = (1.0 + gamma) * (1.0 + gamma);
        Ok(Self {
            both_in_first: 1.0 / norm,
            both_in_second: gamma * gamma / norm,
            one_in_each: 2.0 * gamma / norm,
        })
    }

    pub fn sum(&self) -> f64 {
        self.both_in_first + self.both_in_second + self.one_in_each
    }
}

/// A pair of mutually incoherent weak coherent sources, described by the
/// intensity ratio gamma of the second fed mode to the first.
#[derive(Clone, Copy, Debug)]
pub struct WcsPair {
    gamma: f64,
    input_modes: (usize, usize),
}

impl WcsPair {
    /// Sources on the default input modes (1, 3).
    pub fn new(gamma: f64) -> Result<Self> {
        Self::with_modes(gamma, DEFAULT_INPUT_MODES)
    }

    pub fn with_modes(gamma: f64, input_modes: (usize, usize)) -> Result<Self> {
        check_gamma(gamma)?;
        if input_modes.0 == input_modes.1 {
            return Err(Error::DegeneratePair(input_modes.0, input_modes.1));
        }
        Ok(Self { gamma, input_modes })
    }

    /// From mean photon numbers: `mu_prime` feeds the first input mode, `mu`
    /// the second, and gamma = mu / mu_prime.  gamma = 0 is a single source.
    pub fn from_mean_photon_numbers(mu: f64, mu_prime: f64) -> Result<Self> {
        if !mu.is_finite() || mu < 0.0 {
            return Err(Error::ParameterOutOfRange {
                name: "mu",
                value: mu,
                range: "[0, inf)",
            });
        }
        if !mu_prime.is_finite() || mu_prime <= 0.0 {
            return Err(Error::ParameterOutOfRange {
                name: "mu_prime",
                value: mu_prime,
                range: "(0, inf)",
            });
        }
        Self::new(mu / mu_prime)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn input_modes(&self) -> (usize, usize) {
        self.input_modes
    }

    pub fn weights(&self) -> TruncatedInputState {
        TruncatedInputState::from_gamma(self.gamma).expect("gamma validated at construction")
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::ParameterOutOfRange {
            name: "gamma",
            value: gamma,
            range: "[0, inf)",
        });
    }
    Ok(())
}

/// The two-photon input state over `modes` modes: a diagonal mixture of
/// |2>_j, |2>_k and |11>_jk at the pair's input modes.
pub fn build_input_state(pair: &WcsPair, modes: usize) -> Result<TwoPhotonDensityMatrix> {
    let basis = canonical_basis(modes)?;
    let (j, k) = pair.input_modes();
    let weights = pair.weights();
    let mut matrix = DMatrix::from_element(basis.dim(), basis.dim(), Complex64::ZERO);
    let mut put = |row: usize, col: usize, w: f64| -> Result<()> {
        let index = basis.index_of(row, col)?;
        matrix[(index, index)] = Complex64::new(w, 0.0);
        Ok(())
    };
    put(j, j, weights.both_in_first)?;
    put(k, k, weights.both_in_second)?;
    put(j, k, weights.one_in_each)?;
    TwoPhotonDensityMatrix::from_matrix(modes, matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn poisson_matches_hand_values() {
        let mu = 0.1f64;
        assert_abs_diff_eq!(
            poisson_photon_prob(mu, 0).unwrap(),
            (-mu).exp(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            poisson_photon_prob(mu, 1).unwrap(),
            mu * (-mu).exp(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            poisson_photon_prob(mu, 2).unwrap(),
            mu * mu / 2.0 * (-mu).exp(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(poisson_photon_prob(0.0, 0).unwrap(), 1.0, epsilon = 0.0);
        assert_eq!(poisson_photon_prob(0.0, 3).unwrap(), 0.0);
        assert!(poisson_photon_prob(-0.1, 0).is_err());
    }

    #[test]
    fn double_emission_equals_half_squared_single() {
        // p2(mu) p0(mu) = p1(mu)^2 / 2 makes the 1 : gamma^2 : 2 gamma
        // weight structure exact.
        for mu in [0.01, 0.05, 0.1, 0.5, 1.0, 2.5] {
            let p0 = poisson_photon_prob(mu, 0).unwrap();
            let p1 = poisson_photon_prob(mu, 1).unwrap();
            let p2 = poisson_photon_prob(mu, 2).unwrap();
            assert_abs_diff_eq!(p2 * p0, p1 * p1 / 2.0, epsilon = 1e-15 * p1);
        }
    }

    #[test]
    fn sector_probability_matches_hand_value() {
        let p = two_photon_sector_probability(0.1, 0.1).unwrap();
        assert_abs_diff_eq!(p, (-0.2f64).exp() * 0.02, epsilon = 1e-15);
        assert_abs_diff_eq!(p, 0.016374615061559637, epsilon = 1e-15);
        assert!(two_photon_sector_probability(-1.0, 0.1).is_err());
    }

    #[test]
    fn weights_are_normalized_and_match_known_points() {
        for gamma in [0.0, 0.2, 0.435, 0.5, 1.0, 2.0] {
            let w = TruncatedInputState::from_gamma(gamma).unwrap();
            assert_abs_diff_eq!(w.sum(), 1.0, epsilon = 1e-15);
        }
        let balanced = TruncatedInputState::from_gamma(1.0).unwrap();
        assert_abs_diff_eq!(balanced.both_in_first, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(balanced.both_in_second, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(balanced.one_in_each, 0.5, epsilon = 1e-15);

        let single = TruncatedInputState::from_gamma(0.0).unwrap();
        assert_eq!(single.both_in_first, 1.0);
        assert_eq!(single.both_in_second, 0.0);
        assert_eq!(single.one_in_each, 0.0);
    }

    #[test]
    fn weights_match_conditional_poisson_probabilities() {
        // Conditioning the product of two Poissonians on two total photons
        // must reproduce the gamma construction: here (mu, mu') = (0.05, 0.1)
        // so gamma = 0.5.
        let (mu, mu_prime) = (0.05, 0.1);
        let first = poisson_photon_prob(mu_prime, 2).unwrap() * poisson_photon_prob(mu, 0).unwrap();
        let second = poisson_photon_prob(mu_prime, 0).unwrap() * poisson_photon_prob(mu, 2).unwrap();
        let mixed = poisson_photon_prob(mu_prime, 1).unwrap() * poisson_photon_prob(mu, 1).unwrap();
        let sector = first + second + mixed;
        assert_abs_diff_eq!(
            sector,
            two_photon_sector_probability(mu, mu_prime).unwrap(),
            epsilon = 1e-15
        );

        let pair = WcsPair::from_mean_photon_numbers(mu, mu_prime).unwrap();
        assert_abs_diff_eq!(pair.gamma(), 0.5, epsilon = 0.0);
        let w = pair.weights();
        assert_abs_diff_eq!(w.both_in_first, first / sector, epsilon = 1e-12);
        assert_abs_diff_eq!(w.both_in_second, second / sector, epsilon = 1e-12);
        assert_abs_diff_eq!(w.one_in_each, mixed / sector, epsilon = 1e-12);
    }

    #[test]
    fn input_state_is_diagonal_with_expected_entries() {
        let pair = WcsPair::new(0.5).unwrap();
        let rho = build_input_state(&pair, 4).unwrap();
        let basis = rho.basis();
        let norm = 2.25;
        assert_abs_diff_eq!(
            rho.entry(basis.index_of(1, 1).unwrap(), basis.index_of(1, 1).unwrap()).re,
            1.0 / norm,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            rho.entry(basis.index_of(3, 3).unwrap(), basis.index_of(3, 3).unwrap()).re,
            0.25 / norm,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            rho.entry(basis.index_of(1, 3).unwrap(), basis.index_of(1, 3).unwrap()).re,
            1.0 / norm,
            epsilon = 1e-15
        );
        for row in 0..rho.dim() {
            for col in 0..rho.dim() {
                if row != col {
                    assert_eq!(rho.entry(row, col), Complex64::ZERO);
                }
            }
        }
    }

    #[test]
    fn constructor_rejects_bad_parameters() {
        assert!(WcsPair::new(-0.1).is_err());
        assert!(WcsPair::new(f64::NAN).is_err());
        assert!(WcsPair::with_modes(1.0, (2, 2)).is_err());
        assert!(WcsPair::from_mean_photon_numbers(0.1, 0.0).is_err());
        // Modes must exist in the requested network size.
        let pair = WcsPair::with_modes(1.0, (1, 5)).unwrap();
        assert!(build_input_state(&pair, 4).is_err());
    }
}
