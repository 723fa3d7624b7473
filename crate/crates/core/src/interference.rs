//! Two-photon interference of the source pair at the 4x4 splitter:
//! the closed-form output state, coincidence tables, partial
//! distinguishability, and phase fringes on a post-splitter mode pair.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, Matrix3, Matrix4};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{
    CreationPolynomial, TransferMatrix, TwoPhotonBasis, TwoPhotonDensityMatrix, canonical_basis,
    transform_density_matrix,
};
use crate::sources::{DEFAULT_INPUT_MODES, TruncatedInputState};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Closed-form coefficients of the post-splitter two-photon state for the
/// default sources on modes (1, 3); every entry of the 10x10 matrix is one of
/// +-a, +-b, +-c, +-d up to a block-dependent scale and a global 1/16.
#[derive(Clone, Copy, Debug)]
pub struct OutputCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl OutputCoefficients {
    pub fn from_gamma(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::ParameterOutOfRange {
                name: "gamma",
                value: gamma,
                range: "[0, inf)",
            });
        }
        let norm = (1.0 + gamma) * (1.0 + gamma);
        Ok(Self {
            a: (2.0 + 8.0 * gamma + 2.0 * gamma * gamma) / norm,
            b: (2.0 - 2.0 * gamma * gamma) / norm,
            c: (2.0 - 8.0 * gamma + 2.0 * gamma * gamma) / norm,
            d: (2.0 + 2.0 * gamma * gamma) / norm,
        })
    }
}

/// Coefficient layout of the output matrix over the canonical M = 4 basis
/// (doubles 0..3, then pairs 01, 02, 03, 12, 13, 23).  Codes: +-1 = a,
/// +-2 = b, +-3 = c, +-4 = d.  Entries in the doubles block carry an extra
/// 1/2, the doubles-pairs blocks 1/sqrt 2, the pairs block 1.  The matrix is
/// symmetric; the (5, 0) entry is fixed by Hermiticity to -a (its transpose
/// partner), which at gamma = 1 is the required -3/sqrt 2.
const OUTPUT_LAYOUT: [[i8; 10]; 10] = [
    [1, 3, 1, 3, 2, -1, -2, -2, -3, 2],
    [3, 1, 3, 1, 2, -3, -2, -2, -1, 2],
    [1, 3, 1, 3, 2, -1, -2, -2, -3, 2],
    [3, 1, 3, 1, 2, -3, -2, -2, -1, 2],
    [2, 2, 2, 2, 4, -2, -4, -4, -2, 4],
    [-1, -3, -1, -3, -2, 1, 2, 2, 3, -2],
    [-2, -2, -2, -2, -4, 2, 4, 4, 2, -4],
    [-2, -2, -2, -2, -4, 2, 4, 4, 2, -4],
    [-3, -1, -3, -1, -2, 3, 2, 2, 1, -2],
    [2, 2, 2, 2, 4, -2, -4, -4, -2, 4],
];

/// The post-splitter two-photon state in closed form (no engine evolution
/// involved; the exact-evolution path through
/// [`crate::fock::transform_density_matrix`] must agree with this to 1e-12).
pub fn output_density_matrix(gamma: f64) -> Result<TwoPhotonDensityMatrix> {
    let co = OutputCoefficients::from_gamma(gamma)?;
    let values = [co.a, co.b, co.c, co.d];
    let mut matrix = DMatrix::from_element(10, 10, Complex64::ZERO);
    for row in 0..10 {
        for col in 0..10 {
            let code = OUTPUT_LAYOUT[row][col];
            let coefficient = values[(code.unsigned_abs() - 1) as usize] * f64::from(code.signum());
            let scale = match (row < 4, col < 4) {
                (true, true) => 0.5,
                (false, false) => 1.0,
                _ => 1.0 / SQRT_2,
            };
            matrix[(row, col)] = Complex64::new(coefficient * scale / 16.0, 0.0);
        }
    }
    TwoPhotonDensityMatrix::from_matrix(4, matrix)
}

/// Coincidence probabilities P_jk over all unordered output pairs j < k.
#[derive(Clone, Debug)]
pub struct CoincidenceTable {
    modes: usize,
    pairs: BTreeMap<(usize, usize), f64>,
}

impl CoincidenceTable {
    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn probability(&self, j: usize, k: usize) -> Result<f64> {
        let key = (j.min(k), j.max(k));
        self.pairs.get(&key).copied().ok_or({
            Error::ModeOutOfRange {
                index: key.1,
                modes: self.modes,
            }
        })
    }

    pub fn pairs(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.pairs.iter().map(|(&key, &p)| (key, p))
    }

    /// Sum over all pairs (the rest of the sector sits in doubles).
    pub fn total(&self) -> f64 {
        self.pairs.values().sum()
    }

    /// (P_max - P_min) / (P_max + P_min) over the pairs.
    pub fn visibility(&self) -> f64 {
        let max = self.pairs.values().fold(f64::MIN, |acc, &p| acc.max(p));
        let min = self.pairs.values().fold(f64::MAX, |acc, &p| acc.min(p));
        if max + min == 0.0 {
            0.0
        } else {
            (max - min) / (max + min)
        }
    }
}

/// Pair and double-occupancy probabilities of one full two-photon outcome
/// distribution (sums to 1).
#[derive(Clone, Debug)]
pub struct OutcomeDistribution {
    pub pairs: BTreeMap<(usize, usize), f64>,
    pub doubles: [f64; 4],
}

impl OutcomeDistribution {
    pub fn total(&self) -> f64 {
        self.pairs.values().sum::<f64>() + self.doubles.iter().sum::<f64>()
    }
}

/// Coincidence table for mutually indistinguishable sources (read off the
/// pair block of [`output_density_matrix`]) or for fully distinguishable
/// sources (cross-source interference removed constructively by giving the
/// second source an orthogonal internal label and tracing it out).
pub fn coincidence_table(gamma: f64, indistinguishable: bool) -> Result<CoincidenceTable> {
    let distribution = if indistinguishable {
        indistinguishable_distribution(gamma)?
    } else {
        distinguishable_distribution(gamma)?
    };
    Ok(CoincidenceTable {
        modes: 4,
        pairs: distribution.pairs,
    })
}

fn indistinguishable_distribution(gamma: f64) -> Result<OutcomeDistribution> {
    let rho = output_density_matrix(gamma)?;
    let basis = rho.basis();
    let mut pairs = BTreeMap::new();
    let mut doubles = [0.0; 4];
    for index in 0..basis.dim() {
        let (j, k) = basis.modes_at(index);
        let p = rho.entry(index, index).re;
        if j == k {
            doubles[j] = p;
        } else {
            pairs.insert((j, k), p);
        }
    }
    Ok(OutcomeDistribution { pairs, doubles })
}

/// Outcome distribution at source overlap `f`: linear interpolation between
/// the distinguishable (f = 0) and indistinguishable (f = 1) distributions.
pub fn outcome_distribution(gamma: f64, f: f64) -> Result<OutcomeDistribution> {
    if !f.is_finite() || !(0.0..=1.0).contains(&f) {
        return Err(Error::ParameterOutOfRange {
            name: "f",
            value: f,
            range: "[0, 1]",
        });
    }
    let interfering = indistinguishable_distribution(gamma)?;
    let classical = distinguishable_distribution(gamma)?;
    let mut pairs = BTreeMap::new();
    for (&key, &p1) in &interfering.pairs {
        let p0 = classical.pairs[&key];
        pairs.insert(key, (1.0 - f) * p0 + f * p1);
    }
    let doubles: [f64; 4] = std::array::from_fn(|j| {
        (1.0 - f) * classical.doubles[j] + f * interfering.doubles[j]
    });
    Ok(OutcomeDistribution { pairs, doubles })
}

/// Per-pair coincidence curves over a grid of source-overlap values.
#[derive(Clone, Debug)]
pub struct DistinguishabilitySweep {
    pub overlap_values: Vec<f64>,
    pub curves: BTreeMap<(usize, usize), Vec<f64>>,
}

/// P_jk as a function of the pairwise source overlap f in [0, 1].
pub fn distinguishability_sweep(gamma: f64, overlap_values: &[f64]) -> Result<DistinguishabilitySweep> {
    let mut curves: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
    for &f in overlap_values {
        let distribution = outcome_distribution(gamma, f)?;
        for (key, p) in distribution.pairs {
            curves.entry(key).or_default().push(p);
        }
    }
    Ok(DistinguishabilitySweep {
        overlap_values: overlap_values.to_vec(),
        curves,
    })
}

// --- distinguishable sources, derived with an explicit internal label ------
//
// Give each photon an internal state (the first source H, the second V) by
// doubling every spatial mode into (mode, label) with index 2*mode + label.
// The splitter acts on spatial modes only, i.e. as kron(B4, I2).  Projecting
// on spatial outcomes and tracing the label then removes exactly the
// cross-source interference terms; nothing is tagged by hand.

fn doubled_b4() -> TransferMatrix {
    let b4 = TransferMatrix::b4();
    let mut matrix = DMatrix::from_element(8, 8, Complex64::ZERO);
    for i in 0..4 {
        for j in 0..4 {
            for label in 0..2 {
                matrix[(2 * i + label, 2 * j + label)] = b4.entry(i, j);
            }
        }
    }
    TransferMatrix::lossless(matrix).expect("kron(B4, I2) is unitary")
}

/// Amplitudes of one normalized two-photon component a†_m a†_n |0> pushed
/// through the doubled splitter (m, n are doubled-mode indices).
fn doubled_component(m: usize, n: usize) -> Result<DVector<Complex64>> {
    let u8 = doubled_b4();
    let mut poly = CreationPolynomial::new(8)?;
    let coefficient = if m == n { 1.0 / SQRT_2 } else { 1.0 };
    poly.add_term(m, n, Complex64::new(coefficient, 0.0))?;
    Ok(poly.transform(&u8)?.amplitudes())
}

/// The three doubled-space components of the input mixture and their weights.
/// `same_label` selects mutually indistinguishable sources (both H).
fn doubled_components(
    gamma: f64,
    same_label: bool,
) -> Result<[(f64, DVector<Complex64>); 3]> {
    let weights = TruncatedInputState::from_gamma(gamma)?;
    let (first, second) = DEFAULT_INPUT_MODES;
    let first_h = 2 * first;
    let second_label = if same_label { 2 * second } else { 2 * second + 1 };
    Ok([
        (weights.both_in_first, doubled_component(first_h, first_h)?),
        (weights.both_in_second, doubled_component(second_label, second_label)?),
        (weights.one_in_each, doubled_component(first_h, second_label)?),
    ])
}

/// Label-blind outcome probabilities of a doubled-space amplitude vector.
fn spatial_outcomes(
    psi: &DVector<Complex64>,
    basis8: &TwoPhotonBasis,
    pairs: &mut BTreeMap<(usize, usize), f64>,
    doubles: &mut [f64; 4],
    weight: f64,
) {
    for index in 0..basis8.dim() {
        let (m, n) = basis8.modes_at(index);
        let (j, k) = (m / 2, n / 2);
        let p = weight * psi[index].norm_sqr();
        if j == k {
            doubles[j] += p;
        } else {
            *pairs.entry((j.min(k), j.max(k))).or_insert(0.0) += p;
        }
    }
}

fn distinguishable_distribution(gamma: f64) -> Result<OutcomeDistribution> {
    let basis8 = canonical_basis(8)?;
    let mut pairs: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for j in 0..4 {
        for k in j + 1..4 {
            pairs.insert((j, k), 0.0);
        }
    }
    let mut doubles = [0.0; 4];
    for (weight, psi) in doubled_components(gamma, false)? {
        spatial_outcomes(&psi, &basis8, &mut pairs, &mut doubles, weight);
    }
    Ok(OutcomeDistribution { pairs, doubles })
}

/// Post-selected two-qubit block (one photon in each side of the partition)
/// for fully distinguishable sources, label traced out.  Returns the
/// normalized 4x4 block and the post-selection probability.
pub fn distinguishable_postselected_block(
    gamma: f64,
    side_a: (usize, usize),
    side_b: (usize, usize),
) -> Result<(Matrix4<Complex64>, f64)> {
    let chosen = [side_a.0, side_a.1, side_b.0, side_b.1];
    for &mode in &chosen {
        if mode >= 4 {
            return Err(Error::ModeOutOfRange {
                index: mode,
                modes: 4,
            });
        }
    }
    for i in 0..4 {
        for j in i + 1..4 {
            if chosen[i] == chosen[j] {
                return Err(Error::DegeneratePair(chosen[i], chosen[j]));
            }
        }
    }
    let basis8 = canonical_basis(8)?;
    // Qubit basis (j, k) with j on side A and k on side B.
    let spatial: [(usize, usize); 4] = [
        (side_a.0, side_b.0),
        (side_a.0, side_b.1),
        (side_a.1, side_b.0),
        (side_a.1, side_b.1),
    ];
    let mut block = Matrix4::from_element(Complex64::ZERO);
    for (weight, psi) in doubled_components(gamma, false)? {
        for label_a in 0..2 {
            for label_b in 0..2 {
                // Amplitudes of "photon with label_a on side A, label_b on
                // side B"; coherences between different label patterns drop
                // out of the label trace.
                let mut amplitudes = [Complex64::ZERO; 4];
                for (slot, &(j, k)) in spatial.iter().enumerate() {
                    let index = basis8.index_of(2 * j + label_a, 2 * k + label_b)?;
                    amplitudes[slot] = psi[index];
                }
                for row in 0..4 {
                    for col in 0..4 {
                        block[(row, col)] +=
                            Complex64::from(weight) * amplitudes[row] * amplitudes[col].conj();
                    }
                }
            }
        }
    }
    let success: f64 = (0..4).map(|i| block[(i, i)].re).sum();
    if success <= f64::EPSILON {
        return Err(Error::EmptyPostSelection(success));
    }
    Ok((block.unscale(success), success))
}

// --- fringes on one output pair --------------------------------------------

/// Renormalized restriction of the output state to {|2>_j, |11>_jk, |2>_k},
/// together with its pre-normalization weight.
pub fn two_photon_subblock(gamma: f64, pair: (usize, usize)) -> Result<(Matrix3<Complex64>, f64)> {
    let (j, k) = pair;
    if j == k {
        return Err(Error::DegeneratePair(j, k));
    }
    let rho = output_density_matrix(gamma)?;
    let basis = rho.basis();
    let indices = [
        basis.index_of(j, j)?,
        basis.index_of(j, k)?,
        basis.index_of(k, k)?,
    ];
    let mut block = Matrix3::from_element(Complex64::ZERO);
    for row in 0..3 {
        for col in 0..3 {
            block[(row, col)] = rho.entry(indices[row], indices[col]);
        }
    }
    let weight: f64 = (0..3).map(|i| block[(i, i)].re).sum();
    if weight <= f64::EPSILON {
        return Err(Error::EmptyPostSelection(weight));
    }
    Ok((block.unscale(weight), weight))
}

/// One sampled interference curve.
#[derive(Clone, Debug)]
pub struct FringeCurve {
    pub phases: Vec<f64>,
    pub values: Vec<f64>,
}

impl FringeCurve {
    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// (max - min) / (max + min) over the sampled values.
    pub fn visibility_max_min(&self) -> f64 {
        let max = self.values.iter().fold(f64::MIN, |a, &v| a.max(v));
        let min = self.values.iter().fold(f64::MAX, |a, &v| a.min(v));
        if max + min == 0.0 { 0.0 } else { (max - min) / (max + min) }
    }
}

/// Coincidence fringe of the pair subblock plus the reference single-photon
/// fringe, computed over the same phase grid.
#[derive(Clone, Debug)]
pub struct FringeScan {
    pub two_photon: FringeCurve,
    pub single_photon: FringeCurve,
}

#[derive(Clone, Copy, Debug)]
pub struct FringeOptions {
    /// Off-diagonal magnitude (0..=1) of the one-photon admixture used for
    /// the reference fringe; small in practice since the sources are nearly
    /// balanced.
    pub single_photon_contrast: f64,
    /// Diagnostic: drop every subblock coherence before the sweep, which
    /// must flatten the two-photon curve.
    pub zero_coherence: bool,
}

impl Default for FringeOptions {
    fn default() -> Self {
        Self {
            single_photon_contrast: 0.2,
            zero_coherence: false,
        }
    }
}

/// Sweep a phase on mode `pair.1`, recombine the pair on a balanced splitter,
/// and record the coincidence probability between the two splitter outputs,
/// conditioned on both photons staying in the pair.  The closed form is
/// (a - c cos 2phi)/8 for the default pair (0, 1); at gamma = 1 that is
/// (3 + cos 2phi)/8, a frequency-2 fringe.  The single-photon reference
/// oscillates at frequency 1.
pub fn two_photon_fringe(
    gamma: f64,
    pair: (usize, usize),
    phases: &[f64],
    options: &FringeOptions,
) -> Result<FringeScan> {
    let chi = options.single_photon_contrast;
    if !chi.is_finite() || !(0.0..=1.0).contains(&chi) {
        return Err(Error::ParameterOutOfRange {
            name: "single_photon_contrast",
            value: chi,
            range: "[0, 1]",
        });
    }
    let (mut subblock, _) = two_photon_subblock(gamma, pair)?;
    if options.zero_coherence {
        for row in 0..3 {
            for col in 0..3 {
                if row != col {
                    subblock[(row, col)] = Complex64::ZERO;
                }
            }
        }
    }
    // Re-express over the canonical two-mode basis (|2,0>, |0,2>, |1,1>);
    // the subblock ordering is (|2>_j, |11>, |2>_k).
    let order = [0usize, 2, 1];
    let embedded = DMatrix::from_fn(3, 3, |r, c| subblock[(order[r], order[c])]);
    let rho_pair = TwoPhotonDensityMatrix::from_matrix(2, embedded)?;

    let mut two_photon = Vec::with_capacity(phases.len());
    let mut single_photon = Vec::with_capacity(phases.len());
    let coincidence_index = canonical_basis(2)?.index_of(0, 1)?;
    for &phi in phases {
        let t = phased_splitter(phi);
        let evolved = transform_density_matrix(&t, &rho_pair)?;
        two_photon.push(evolved.entry(coincidence_index, coincidence_index).re);
        single_photon.push(single_photon_probability(&t, chi));
    }
    Ok(FringeScan {
        two_photon: FringeCurve {
            phases: phases.to_vec(),
            values: two_photon,
        },
        single_photon: FringeCurve {
            phases: phases.to_vec(),
            values: single_photon,
        },
    })
}

/// Balanced splitter preceded by a phase on the second mode.
fn phased_splitter(phi: f64) -> TransferMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let phase = Complex64::from_polar(1.0, phi);
    let matrix = DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(s, 0.0),
            phase * s,
            Complex64::new(s, 0.0),
            -phase * s,
        ],
    );
    TransferMatrix::lossless(matrix).expect("phased splitter is unitary")
}

/// Probability of finding one photon in the first splitter output, for a
/// one-photon state across the pair with off-diagonal coherence chi/2.
fn single_photon_probability(t: &TransferMatrix, chi: f64) -> f64 {
    let row = [t.entry(0, 0), t.entry(0, 1)];
    let rho = [
        [Complex64::new(0.5, 0.0), Complex64::new(chi / 2.0, 0.0)],
        [Complex64::new(chi / 2.0, 0.0), Complex64::new(0.5, 0.0)],
    ];
    let mut p = Complex64::ZERO;
    for m in 0..2 {
        for n in 0..2 {
            p += row[m] * rho[m][n] * row[n].conj();
        }
    }
    p.re
}

// --- frequency analysis -----------------------------------------------------

/// Least-squares sinusoid frequency: for each candidate f, fit
/// y ~ c0 + A cos(f phi) + B sin(f phi) and score the explained variance,
/// then refine the best grid point by golden-section search.  The raw
/// periodogram is not used because its peak is biased by leakage between the
/// positive- and negative-frequency lobes; the full fit is exact for a pure
/// tone.  Meaningless for a constant curve (every frequency explains zero).
pub fn dominant_frequency(phases: &[f64], values: &[f64]) -> Result<f64> {
    if phases.len() != values.len() {
        return Err(Error::DimensionMismatch {
            rows: values.len(),
            cols: 1,
            expected_rows: phases.len(),
            expected_cols: 1,
        });
    }
    if phases.len() < 8 {
        return Err(Error::InvariantViolation(format!(
            "need at least 8 samples to fit a frequency, got {}",
            phases.len()
        )));
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let centered: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let power = |freq: f64| -> f64 {
        let mut gram = nalgebra::Matrix3::<f64>::zeros();
        let mut moments = nalgebra::Vector3::<f64>::zeros();
        for (&phi, &y) in phases.iter().zip(&centered) {
            let basis = [1.0, (freq * phi).cos(), (freq * phi).sin()];
            for row in 0..3 {
                for col in 0..3 {
                    gram[(row, col)] += basis[row] * basis[col];
                }
                moments[row] += basis[row] * y;
            }
        }
        match gram.lu().solve(&moments) {
            Some(fit) => fit.dot(&moments),
            None => f64::MIN,
        }
    };

    let (f_min, f_max, step) = (0.05, 8.0, 0.005);
    let mut best = f_min;
    let mut best_power = f64::MIN;
    let mut freq = f_min;
    while freq <= f_max {
        let p = power(freq);
        if p > best_power {
            best_power = p;
            best = freq;
        }
        freq += step;
    }

    // Golden-section refinement of the peak on [best - step, best + step].
    const INV_GOLDEN: f64 = 0.618_033_988_749_895;
    let (mut lo, mut hi) = ((best - step).max(f_min), best + step);
    let mut x1 = hi - INV_GOLDEN * (hi - lo);
    let mut x2 = lo + INV_GOLDEN * (hi - lo);
    let (mut p1, mut p2) = (power(x1), power(x2));
    while hi - lo > 1e-9 {
        if p1 < p2 {
            lo = x1;
            x1 = x2;
            p1 = p2;
            x2 = lo + INV_GOLDEN * (hi - lo);
            p2 = power(x2);
        } else {
            hi = x2;
            x2 = x1;
            p2 = p1;
            x1 = hi - INV_GOLDEN * (hi - lo);
            p1 = power(x1);
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Harmonic amplitude estimates |c_k| for k = 0..=N/2 of samples on a uniform
/// grid covering exactly one fundamental period.  c_0 is the mean; for
/// 0 < k < N/2 the amplitude of cos(k phi) recovered in c_k is exact.
pub fn harmonic_amplitudes(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    if n == 0 {
        return Vec::new();
    }
    let mut amplitudes = Vec::with_capacity(n / 2 + 1);
    for k in 0..=n / 2 {
        let mut re = 0.0;
        let mut im = 0.0;
        for (idx, &y) in values.iter().enumerate() {
            let angle = -2.0 * std::f64::consts::PI * (k * idx) as f64 / n as f64;
            re += y * angle.cos();
            im += y * angle.sin();
        }
        let magnitude = (re * re + im * im).sqrt();
        let scale = if k == 0 || (n.is_multiple_of(2) && k == n / 2) {
            1.0 / n as f64
        } else {
            2.0 / n as f64
        };
        amplitudes.push(magnitude * scale);
    }
    amplitudes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::max_abs;
    use crate::sources::{WcsPair, build_input_state};
    use approx::assert_abs_diff_eq;

    fn engine_output(gamma: f64) -> TwoPhotonDensityMatrix {
        let pair = WcsPair::new(gamma).unwrap();
        let input = build_input_state(&pair, 4).unwrap();
        transform_density_matrix(&TransferMatrix::b4(), &input).unwrap()
    }

    #[test]
    fn coefficients_at_unit_gamma_and_identities() {
        let co = OutputCoefficients::from_gamma(1.0).unwrap();
        assert_abs_diff_eq!(co.a, 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(co.b, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(co.c, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(co.d, 1.0, epsilon = 1e-15);
        for gamma in [0.0, 0.2, 0.435, 0.75, 1.0, 1.8] {
            let co = OutputCoefficients::from_gamma(gamma).unwrap();
            // Unit trace and pair/doubles bookkeeping of the closed form.
            assert_abs_diff_eq!(co.a + co.d, 4.0, epsilon = 1e-12);
            assert_abs_diff_eq!(co.a + co.c, 2.0 * co.d, epsilon = 1e-12);
        }
        assert!(OutputCoefficients::from_gamma(-0.5).is_err());
    }

    #[test]
    fn closed_form_agrees_with_exact_evolution() {
        for gamma in [0.0, 0.25, 0.435, 0.6, 1.0, 1.5] {
            let closed = output_density_matrix(gamma).unwrap();
            let engine = engine_output(gamma);
            let deviation = max_abs(&(closed.matrix() - engine.matrix()));
            assert!(deviation <= 1e-12, "gamma {gamma}: deviation {deviation:.3e}");
        }
    }

    #[test]
    fn hermitized_entry_follows_its_transpose_partner() {
        // The (5, 0) coherence <11_02| rho |2_0> must equal the (0, 5) entry,
        // -a/(16 sqrt 2); at gamma = 1 that is -3/(16 sqrt 2).
        let rho = output_density_matrix(1.0).unwrap();
        let expected = -3.0 / (16.0 * SQRT_2);
        assert_abs_diff_eq!(rho.entry(5, 0).re, expected, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.entry(0, 5).re, expected, epsilon = 1e-15);
    }

    #[test]
    fn balanced_coincidence_table_shows_suppression_pattern() {
        let table = coincidence_table(1.0, true).unwrap();
        for (pair, expected) in [
            ((0, 1), 1.0 / 16.0),
            ((0, 2), 3.0 / 16.0),
            ((0, 3), 1.0 / 16.0),
            ((1, 2), 1.0 / 16.0),
            ((1, 3), 3.0 / 16.0),
            ((2, 3), 1.0 / 16.0),
        ] {
            assert_abs_diff_eq!(table.probability(pair.0, pair.1).unwrap(), expected, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(table.visibility(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn distinguishable_table_is_flat_for_any_gamma() {
        for gamma in [0.0, 0.3, 1.0, 2.0] {
            let table = coincidence_table(gamma, false).unwrap();
            for (_, p) in table.pairs() {
                assert_abs_diff_eq!(p, 0.125, epsilon = 1e-12);
            }
            assert_abs_diff_eq!(table.visibility(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn single_source_interferes_with_itself_only() {
        // gamma = 0: one source, every pair at 1/8 even with full overlap.
        let table = coincidence_table(0.0, true).unwrap();
        for (_, p) in table.pairs() {
            assert_abs_diff_eq!(p, 0.125, epsilon = 1e-15);
        }
    }

    #[test]
    fn outcome_distribution_is_normalized_everywhere() {
        for gamma in [0.0, 0.435, 1.0] {
            for f in [0.0, 0.31, 1.0] {
                let distribution = outcome_distribution(gamma, f).unwrap();
                assert_abs_diff_eq!(distribution.total(), 1.0, epsilon = 1e-12);
            }
        }
        assert!(outcome_distribution(1.0, 1.2).is_err());
        assert!(outcome_distribution(1.0, -0.1).is_err());
    }

    #[test]
    fn sweep_interpolates_linearly_at_unit_gamma() {
        let overlaps = [0.0, 0.25, 0.5, 0.75, 1.0];
        let sweep = distinguishability_sweep(1.0, &overlaps).unwrap();
        for (index, &f) in overlaps.iter().enumerate() {
            for (&pair, curve) in &sweep.curves {
                let sign = if pair == (0, 2) || pair == (1, 3) { 1.0 } else { -1.0 };
                let expected = 0.125 * (1.0 + sign * f / 2.0);
                assert_abs_diff_eq!(curve[index], expected, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn distinguishable_block_at_unit_gamma_is_maximally_mixed() {
        let (block, success) = distinguishable_postselected_block(1.0, (0, 1), (2, 3)).unwrap();
        assert_abs_diff_eq!(success, 0.5, epsilon = 1e-12);
        for row in 0..4 {
            for col in 0..4 {
                let expected = if row == col { 0.25 } else { 0.0 };
                assert_abs_diff_eq!(block[(row, col)].re, expected, epsilon = 1e-12);
                assert_abs_diff_eq!(block[(row, col)].im, 0.0, epsilon = 1e-12);
            }
        }
        assert!(distinguishable_postselected_block(1.0, (0, 1), (1, 3)).is_err());
    }

    #[test]
    fn subblock_at_unit_gamma_matches_frozen_matrix() {
        let (block, weight) = two_photon_subblock(1.0, (0, 1)).unwrap();
        assert_abs_diff_eq!(weight, 0.25, epsilon = 1e-15);
        let expected = [
            [3.0 / 8.0, 0.0, -1.0 / 8.0],
            [0.0, 2.0 / 8.0, 0.0],
            [-1.0 / 8.0, 0.0, 3.0 / 8.0],
        ];
        for row in 0..3 {
            for col in 0..3 {
                assert_abs_diff_eq!(block[(row, col)].re, expected[row][col], epsilon = 1e-15);
            }
        }
        // The complementary pair carries the same subblock.
        let (other, other_weight) = two_photon_subblock(1.0, (2, 3)).unwrap();
        assert_abs_diff_eq!(other_weight, 0.25, epsilon = 1e-15);
        for row in 0..3 {
            for col in 0..3 {
                assert_abs_diff_eq!(other[(row, col)].re, block[(row, col)].re, epsilon = 1e-15);
            }
        }
    }

    fn uniform_phases(n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| 2.0 * std::f64::consts::PI * i as f64 / n as f64)
            .collect()
    }

    #[test]
    fn fringe_matches_amplitude_oracle() {
        // Independent oracle: coincidence amplitudes of the three subblock
        // basis states after phase phi and a balanced splitter are
        // (1/sqrt2, 0, -e^{2 i phi}/sqrt2) in the (|2>_j, |11>, |2>_k) order.
        let phases = uniform_phases(24);
        for gamma in [0.0, 0.5, 1.0] {
            let scan =
                two_photon_fringe(gamma, (0, 1), &phases, &FringeOptions::default()).unwrap();
            let (block, _) = two_photon_subblock(gamma, (0, 1)).unwrap();
            for (index, &phi) in phases.iter().enumerate() {
                let alpha = [
                    Complex64::new(1.0 / SQRT_2, 0.0),
                    Complex64::ZERO,
                    -Complex64::from_polar(1.0, 2.0 * phi) / SQRT_2,
                ];
                let mut oracle = Complex64::ZERO;
                for m in 0..3 {
                    for n in 0..3 {
                        oracle += block[(m, n)] * alpha[m] * alpha[n].conj();
                    }
                }
                assert_abs_diff_eq!(scan.two_photon.values[index], oracle.re, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn balanced_fringe_has_third_contrast_and_double_frequency() {
        let phases = uniform_phases(180);
        let scan = two_photon_fringe(1.0, (0, 1), &phases, &FringeOptions::default()).unwrap();
        for (index, &phi) in phases.iter().enumerate() {
            let expected = (3.0 + (2.0 * phi).cos()) / 8.0;
            assert_abs_diff_eq!(scan.two_photon.values[index], expected, epsilon = 1e-12);
        }
        let amplitudes = harmonic_amplitudes(&scan.two_photon.values);
        assert_abs_diff_eq!(amplitudes[0], 3.0 / 8.0, epsilon = 1e-12);
        assert_abs_diff_eq!(amplitudes[2], 1.0 / 8.0, epsilon = 1e-12);
        for (k, &amp) in amplitudes.iter().enumerate() {
            if k != 0 && k != 2 {
                assert!(amp <= 1e-12, "harmonic {k} leaked: {amp:.3e}");
            }
        }
        assert_abs_diff_eq!(amplitudes[2] / amplitudes[0], 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(scan.two_photon.visibility_max_min(), 1.0 / 3.0, epsilon = 1e-9);

        let f2 = dominant_frequency(&phases, &scan.two_photon.values).unwrap();
        let f1 = dominant_frequency(&phases, &scan.single_photon.values).unwrap();
        assert_abs_diff_eq!(f2, 2.0, epsilon = 1e-6);
        assert_abs_diff_eq!(f1, 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(f2 / f1, 2.0, epsilon = 1e-5);
    }

    #[test]
    fn zeroed_coherence_flattens_the_fringe() {
        let phases = uniform_phases(32);
        let options = FringeOptions {
            zero_coherence: true,
            ..FringeOptions::default()
        };
        let scan = two_photon_fringe(1.0, (0, 1), &phases, &options).unwrap();
        let first = scan.two_photon.values[0];
        for &value in &scan.two_photon.values {
            assert_abs_diff_eq!(value, first, epsilon = 1e-12);
        }
    }

    #[test]
    fn general_gamma_fringe_follows_closed_form() {
        let phases = uniform_phases(48);
        let gamma = 0.5;
        let co = OutputCoefficients::from_gamma(gamma).unwrap();
        let scan = two_photon_fringe(gamma, (0, 1), &phases, &FringeOptions::default()).unwrap();
        for (index, &phi) in phases.iter().enumerate() {
            let expected = (co.a - co.c * (2.0 * phi).cos()) / 8.0;
            assert_abs_diff_eq!(scan.two_photon.values[index], expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn frequency_fit_recovers_synthetic_tone() {
        let phases = uniform_phases(96);
        let values: Vec<f64> = phases.iter().map(|&p| 0.4 + 0.1 * (3.0 * p).cos()).collect();
        let freq = dominant_frequency(&phases, &values).unwrap();
        assert_abs_diff_eq!(freq, 3.0, epsilon = 1e-6);
        assert!(dominant_frequency(&phases[..4], &values[..4]).is_err());
    }
}
