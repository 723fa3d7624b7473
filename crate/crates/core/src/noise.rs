//! Imperfections of the post-selected pair state: partial source overlap
//! (mixing with the label-traced distinguishable state) and collective
//! dephasing of the qubit coherences.

use num_complex::Complex64;

use crate::correlations::{
    BipartiteQubitState, geometric_discord_general, local_coherence,
};
use crate::error::{Error, Result};
use crate::interference::distinguishable_postselected_block;

/// Noise channel parameters, both in [0, 1]; (1, 1) is the ideal channel.
#[derive(Clone, Copy, Debug)]
pub struct NoiseParams {
    /// Multiplies every off-diagonal element of the post-selected state.
    pub dephasing_lambda: f64,
    /// Pairwise overlap of the two sources; doubles as the weight of the
    /// interfering state in the overlap mixture, so the balanced coincidence
    /// visibility is overlap_visibility / 2.
    pub overlap_visibility: f64,
}

impl NoiseParams {
    pub fn new(dephasing_lambda: f64, overlap_visibility: f64) -> Result<Self> {
        for (name, value) in [
            ("dephasing_lambda", dephasing_lambda),
            ("overlap_visibility", overlap_visibility),
        ] {
            if !value.is_finite() || !(0.0..=1.0).contains(&value) {
                return Err(Error::ParameterOutOfRange {
                    name,
                    value,
                    range: "[0, 1]",
                });
            }
        }
        Ok(Self {
            dephasing_lambda,
            overlap_visibility,
        })
    }

    pub fn ideal() -> Self {
        Self {
            dephasing_lambda: 1.0,
            overlap_visibility: 1.0,
        }
    }

    pub fn is_ideal(&self) -> bool {
        self.dephasing_lambda == 1.0 && self.overlap_visibility == 1.0
    }
}

/// Post-selected state under the noise channel: mix the interfering state
/// with the distinguishable one at weight `overlap_visibility`, then scale
/// every off-diagonal by `dephasing_lambda`.  Both operations preserve
/// positivity; the constructor re-checks anyway.
pub fn apply_noise(gamma: f64, params: &NoiseParams) -> Result<BipartiteQubitState> {
    let v = params.overlap_visibility;
    let ideal = BipartiteQubitState::from_gamma(gamma)?;
    let mut matrix = if v == 1.0 {
        *ideal.matrix()
    } else {
        let (classical, _) = distinguishable_postselected_block(gamma, (0, 1), (2, 3))?;
        ideal.matrix().scale(v) + classical.scale(1.0 - v)
    };
    for row in 0..4 {
        for col in 0..4 {
            if row != col {
                matrix[(row, col)] *= Complex64::from(params.dephasing_lambda);
            }
        }
    }
    BipartiteQubitState::new(matrix)
}

/// One point of the coherence/discord trade-off curve.
#[derive(Clone, Copy, Debug)]
pub struct CorrelationCurvePoint {
    pub gamma: f64,
    pub coherence: f64,
    pub discord: f64,
}

/// Local coherence and geometric discord of the noisy post-selected state
/// over a gamma grid.
pub fn discord_vs_coherence_curve(
    gammas: &[f64],
    params: &NoiseParams,
) -> Result<Vec<CorrelationCurvePoint>> {
    gammas
        .iter()
        .map(|&gamma| {
            let state = apply_noise(gamma, params)?;
            Ok(CorrelationCurvePoint {
                gamma,
                coherence: local_coherence(&state),
                discord: geometric_discord_general(&state),
            })
        })
        .collect()
}
