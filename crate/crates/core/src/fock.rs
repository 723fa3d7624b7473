//! Exact evolution of two-photon states through a lossless linear-optical
//! network.
//!
//! Everything in this module works on the two-photon sector of M >= 2 modes.
//! A basis state is either a doubly occupied mode |2>_j or a pair of singly
//! occupied modes |1>_j |1>_k with j < k.  The canonical ordering puts the M
//! doubles first (ascending j), then the pairs in lexicographic order, which
//! for M = 4 reads
//!
//!   |2>_0, |2>_1, |2>_2, |2>_3,
//!   |11>_01, |11>_02, |11>_03, |11>_12, |11>_13, |11>_23.
//!
//! States evolve by substituting the transfer matrix into creation-operator
//! polynomials: a†_j a†_k -> (sum_m U_mj a†_m)(sum_n U_nk a†_n).

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Max |UU^H - I| accepted when flagging a transfer matrix lossless.
pub const UNITARITY_TOL: f64 = 1e-12;
/// Max |A - A^H| accepted when validating a density matrix.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Max |tr - 1| accepted when validating a density matrix.
pub const TRACE_TOL: f64 = 1e-12;
/// Most negative eigenvalue accepted when validating a density matrix.
pub const PSD_TOL: f64 = -1e-10;

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// One basis state of the two-photon sector: mode occupations summing to 2.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TwoPhotonBasisState {
    occupations: Vec<u8>,
}

impl TwoPhotonBasisState {
    /// Two photons in modes `j` and `k` (j == k means a doubly occupied mode).
    pub fn new(modes: usize, j: usize, k: usize) -> Result<Self> {
        check_mode(j, modes)?;
        check_mode(k, modes)?;
        let mut occupations = vec![0u8; modes];
        if j == k {
            occupations[j] = 2;
        } else {
            occupations[j] = 1;
            occupations[k] = 1;
        }
        Ok(Self { occupations })
    }

    pub fn occupations(&self) -> &[u8] {
        &self.occupations
    }

    /// The occupied mode indices (j, k) with j <= k.
    pub fn modes(&self) -> (usize, usize) {
        let mut found = [0usize; 2];
        let mut n = 0;
        for (m, &occ) in self.occupations.iter().enumerate() {
            for _ in 0..occ {
                found[n] = m;
                n += 1;
            }
        }
        debug_assert_eq!(n, 2);
        (found[0], found[1])
    }

    pub fn is_double(&self) -> bool {
        let (j, k) = self.modes();
        j == k
    }
}

impl fmt::Display for TwoPhotonBasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (j, k) = self.modes();
        if j == k {
            write!(f, "|2>_{j}")
        } else {
            write!(f, "|11>_{j}{k}")
        }
    }
}

/// The canonically ordered two-photon basis over M modes.
#[derive(Clone, Debug)]
pub struct TwoPhotonBasis {
    modes: usize,
    states: Vec<TwoPhotonBasisState>,
}

/// Basis in the canonical order: doubles ascending, then pairs lexicographic.
pub fn canonical_basis(modes: usize) -> Result<TwoPhotonBasis> {
    if modes < 2 {
        return Err(Error::ModeCountTooSmall(modes));
    }
    let mut states = Vec::with_capacity(modes * (modes + 1) / 2);
    for j in 0..modes {
        states.push(TwoPhotonBasisState::new(modes, j, j)?);
    }
    for j in 0..modes {
        for k in j + 1..modes {
            states.push(TwoPhotonBasisState::new(modes, j, k)?);
        }
    }
    Ok(TwoPhotonBasis { modes, states })
}

impl TwoPhotonBasis {
    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Sector dimension M(M+1)/2.
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    /// Canonical index of the state with photons in modes j and k (any order).
    pub fn index_of(&self, j: usize, k: usize) -> Result<usize> {
        check_mode(j, self.modes)?;
        check_mode(k, self.modes)?;
        let (j, k) = (j.min(k), j.max(k));
        if j == k {
            return Ok(j);
        }
        // Rank of (j, k) among pairs in lexicographic order.
        let before_j = j * self.modes - j * (j + 1) / 2;
        Ok(self.modes + before_j + (k - j - 1))
    }

    pub fn state(&self, index: usize) -> &TwoPhotonBasisState {
        &self.states[index]
    }

    /// Occupied modes (j, k), j <= k, of the state at `index`.
    pub fn modes_at(&self, index: usize) -> (usize, usize) {
        self.states[index].modes()
    }

    pub fn iter(&self) -> impl Iterator<Item = &TwoPhotonBasisState> {
        self.states.iter()
    }
}

fn check_mode(index: usize, modes: usize) -> Result<()> {
    if index >= modes {
        return Err(Error::ModeOutOfRange { index, modes });
    }
    Ok(())
}

/// Max entry modulus of a complex matrix.
pub(crate) fn max_abs(matrix: &DMatrix<Complex64>) -> f64 {
    matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Max |UU^H - I| over all entries.
fn unitarity_deviation(matrix: &DMatrix<Complex64>) -> f64 {
    let product = matrix * matrix.adjoint();
    let mut worst = 0.0f64;
    for i in 0..matrix.nrows() {
        for j in 0..matrix.ncols() {
            let expected = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((product[(i, j)] - Complex64::from(expected)).norm());
        }
    }
    worst
}

/// True when max |UU^H - I| <= tol.
pub fn check_unitary(matrix: &DMatrix<Complex64>, tol: f64) -> bool {
    matrix.is_square() && unitarity_deviation(matrix) <= tol
}

/// Serialized form of a transfer matrix: {"m": .., "re": [[..]], "im": [[..]]}.
#[derive(Serialize, Deserialize)]
struct TransferMatrixJson {
    m: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

/// A single-photon transfer matrix acting on creation operators,
/// a†_out = U a†_in.
#[derive(Clone, Debug)]
pub struct TransferMatrix {
    matrix: DMatrix<Complex64>,
    lossless: bool,
    labels: Option<Vec<String>>,
}

impl TransferMatrix {
    /// A transfer matrix verified unitary to within [`UNITARITY_TOL`].
    pub fn lossless(matrix: DMatrix<Complex64>) -> Result<Self> {
        let tm = Self::new(matrix)?;
        let deviation = unitarity_deviation(&tm.matrix);
        if deviation > UNITARITY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self {
            lossless: true,
            ..tm
        })
    }

    /// An unverified (possibly lossy) transfer matrix; it can describe a
    /// network but refuses to evolve states.
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() < 2 {
            return Err(Error::DimensionMismatch {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                expected_rows: matrix.nrows().max(2),
                expected_cols: matrix.nrows().max(2),
            });
        }
        Ok(Self {
            matrix,
            lossless: false,
            labels: None,
        })
    }

    /// The 4x4 symmetric multiport, (1/2) [[1,1,1,1],[1,1,-1,-1],[1,-1,1,-1],[1,-1,-1,1]].
    ///
    /// Row/column j flips sign exactly where the 2-bit binary expansions of the
    /// row and column index overlap (a real Hadamard-type matrix).
    pub fn b4() -> Self {
        let signs = [
            [1.0, 1.0, 1.0, 1.0],
            [1.0, 1.0, -1.0, -1.0],
            [1.0, -1.0, 1.0, -1.0],
            [1.0, -1.0, -1.0, 1.0],
        ];
        let matrix =
            DMatrix::from_fn(4, 4, |i, j| Complex64::new(0.5 * signs[i][j], 0.0));
        Self::lossless(matrix).expect("B4 is unitary by construction")
    }

    /// The 2x2 balanced splitter, (1/sqrt 2) [[1,1],[1,-1]].
    pub fn balanced_splitter() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let matrix = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(s, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(-s, 0.0),
            ],
        );
        Self::lossless(matrix).expect("balanced splitter is unitary")
    }

    pub fn modes(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn is_lossless(&self) -> bool {
        self.lossless
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.modes() {
            return Err(Error::DimensionMismatch {
                rows: labels.len(),
                cols: 1,
                expected_rows: self.modes(),
                expected_cols: 1,
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// `self` applied after `other` (matrix product self * other).
    pub fn compose(&self, other: &TransferMatrix) -> Result<Self> {
        if self.modes() != other.modes() {
            return Err(Error::DimensionMismatch {
                rows: other.modes(),
                cols: other.modes(),
                expected_rows: self.modes(),
                expected_cols: self.modes(),
            });
        }
        let matrix = &self.matrix * &other.matrix;
        if self.lossless && other.lossless {
            Self::lossless(matrix)
        } else {
            Self::new(matrix)
        }
    }

    pub fn to_json_string(&self) -> Result<String> {
        let m = self.modes();
        let grab = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..m)
                .map(|i| (0..m).map(|j| f(&self.matrix[(i, j)])).collect())
                .collect()
        };
        let json = TransferMatrixJson {
            m,
            re: grab(|z| z.re),
            im: grab(|z| z.im),
        };
        Ok(serde_json::to_string_pretty(&json)?)
    }

    /// Parse {"m", "re", "im"}; the result is flagged lossless when the
    /// entries pass the unitarity check.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let json: TransferMatrixJson = serde_json::from_str(text)?;
        for part in [&json.re, &json.im] {
            if part.len() != json.m || part.iter().any(|row| row.len() != json.m) {
                return Err(Error::DimensionMismatch {
                    rows: part.len(),
                    cols: part.first().map_or(0, Vec::len),
                    expected_rows: json.m,
                    expected_cols: json.m,
                });
            }
        }
        let matrix = DMatrix::from_fn(json.m, json.m, |i, j| {
            Complex64::new(json.re[i][j], json.im[i][j])
        });
        let plain = Self::new(matrix)?;
        if unitarity_deviation(&plain.matrix) <= UNITARITY_TOL {
            Self::lossless(plain.matrix)
        } else {
            Ok(plain)
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_string()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}

/// A degree-2 polynomial in creation operators, sum_{j<=k} c_jk a†_j a†_k,
/// applied to the vacuum.
#[derive(Clone, Debug)]
pub struct CreationPolynomial {
    modes: usize,
    coeffs: BTreeMap<(usize, usize), Complex64>,
}

impl CreationPolynomial {
    pub fn new(modes: usize) -> Result<Self> {
        if modes < 2 {
            return Err(Error::ModeCountTooSmall(modes));
        }
        Ok(Self {
            modes,
            coeffs: BTreeMap::new(),
        })
    }

    /// The single monomial a†_j a†_k with unit coefficient.
    pub fn monomial(modes: usize, j: usize, k: usize) -> Result<Self> {
        let mut poly = Self::new(modes)?;
        poly.add_term(j, k, Complex64::new(1.0, 0.0))?;
        Ok(poly)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Add `coeff` * a†_j a†_k (the key is stored with j <= k).
    pub fn add_term(&mut self, j: usize, k: usize, coeff: Complex64) -> Result<()> {
        check_mode(j, self.modes)?;
        check_mode(k, self.modes)?;
        let key = (j.min(k), j.max(k));
        let entry = self.coeffs.entry(key).or_insert(Complex64::ZERO);
        *entry += coeff;
        Ok(())
    }

    pub fn coeff(&self, j: usize, k: usize) -> Complex64 {
        let key = (j.min(k), j.max(k));
        self.coeffs.get(&key).copied().unwrap_or(Complex64::ZERO)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((usize, usize), Complex64)> + '_ {
        self.coeffs.iter().map(|(&key, &c)| (key, c))
    }

    /// Substitute a†_j -> sum_m U_mj a†_m.  The monomial a†_j a†_k picks up
    /// the coefficient U_mj U_nk + U_nj U_mk on (m, n) with m < n, and
    /// U_mj U_mk on (m, m).
    pub fn transform(&self, u: &TransferMatrix) -> Result<Self> {
        if u.modes() != self.modes {
            return Err(Error::DimensionMismatch {
                rows: u.modes(),
                cols: u.modes(),
                expected_rows: self.modes,
                expected_cols: self.modes,
            });
        }
        let mut out = Self::new(self.modes)?;
        for (&(j, k), &c) in &self.coeffs {
            for m in 0..self.modes {
                for n in m..self.modes {
                    let weight = if m == n {
                        u.entry(m, j) * u.entry(m, k)
                    } else {
                        u.entry(m, j) * u.entry(n, k) + u.entry(n, j) * u.entry(m, k)
                    };
                    out.add_term(m, n, c * weight)?;
                }
            }
        }
        Ok(out)
    }

    /// Amplitudes over the canonical basis.
    ///
    /// This is the single place where operator coefficients meet state
    /// normalization: (a†_j)^2 |0> = sqrt(2) |2>_j, so the (j, j) coefficient
    /// contributes sqrt(2) * c_jj to the |2>_j amplitude, while (j, k) with
    /// j < k contributes c_jk to |11>_jk unchanged.
    pub fn amplitudes(&self) -> DVector<Complex64> {
        let basis = canonical_basis(self.modes).expect("modes checked at construction");
        let mut psi = DVector::from_element(basis.dim(), Complex64::ZERO);
        for (&(j, k), &c) in &self.coeffs {
            let index = basis.index_of(j, k).expect("keys are in range");
            psi[index] = if j == k { SQRT_2 * c } else { c };
        }
        psi
    }

    /// Inverse of [`CreationPolynomial::amplitudes`].
    pub fn from_amplitudes(modes: usize, psi: &DVector<Complex64>) -> Result<Self> {
        let basis = canonical_basis(modes)?;
        if psi.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                rows: psi.len(),
                cols: 1,
                expected_rows: basis.dim(),
                expected_cols: 1,
            });
        }
        let mut poly = Self::new(modes)?;
        for index in 0..basis.dim() {
            let (j, k) = basis.modes_at(index);
            let c = if j == k { psi[index] / SQRT_2 } else { psi[index] };
            if c != Complex64::ZERO {
                poly.add_term(j, k, c)?;
            }
        }
        Ok(poly)
    }

    /// Norm of the generated state (photons are exchange-symmetric, so this
    /// is the norm of the amplitude vector, not of the coefficients).
    pub fn state_norm(&self) -> f64 {
        self.amplitudes().norm()
    }
}

/// A density matrix on the two-photon sector, stored over the canonical basis.
#[derive(Clone, Debug)]
pub struct TwoPhotonDensityMatrix {
    modes: usize,
    matrix: DMatrix<Complex64>,
}

impl TwoPhotonDensityMatrix {
    /// Validates Hermiticity, unit trace and positivity before accepting.
    pub fn from_matrix(modes: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        let basis = canonical_basis(modes)?;
        let dim = basis.dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                expected_rows: dim,
                expected_cols: dim,
            });
        }
        let hermiticity = max_abs(&(&matrix - matrix.adjoint()));
        if hermiticity > HERMITICITY_TOL {
            return Err(Error::NotHermitian {
                deviation: hermiticity,
            });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::BadTrace {
                trace: trace.re,
                expected: 1.0,
            });
        }
        let lowest = lowest_eigenvalue(&matrix);
        if lowest < PSD_TOL {
            return Err(Error::NotPositive { eigenvalue: lowest });
        }
        Ok(Self { modes, matrix })
    }

    /// |psi><psi| from an amplitude vector (normalized here; zero vectors are
    /// rejected).
    pub fn from_pure(modes: usize, psi: &DVector<Complex64>) -> Result<Self> {
        let norm = psi.norm();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let unit = psi.unscale(norm);
        let matrix = &unit * unit.adjoint();
        Self::from_matrix(modes, matrix)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    pub fn basis(&self) -> TwoPhotonBasis {
        canonical_basis(self.modes).expect("modes checked at construction")
    }
}

fn lowest_eigenvalue(matrix: &DMatrix<Complex64>) -> f64 {
    // The matrix is Hermitian up to HERMITICITY_TOL by the time this runs;
    // symmetrize so the eigensolver sees an exactly Hermitian input.
    let hermitian = (matrix + matrix.adjoint()).scale(0.5);
    let eigen = hermitian.symmetric_eigen();
    eigen.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// The unitary induced on the two-photon sector by a lossless transfer
/// matrix: column i is the amplitude vector of the i-th basis state pushed
/// through `u`.
pub fn two_photon_unitary(u: &TransferMatrix) -> Result<DMatrix<Complex64>> {
    if !u.is_lossless() {
        return Err(Error::NotLossless);
    }
    let basis = canonical_basis(u.modes())?;
    let dim = basis.dim();
    let mut w = DMatrix::from_element(dim, dim, Complex64::ZERO);
    for col in 0..dim {
        let (j, k) = basis.modes_at(col);
        let mut poly = CreationPolynomial::new(u.modes())?;
        // Normalized basis state as a polynomial: |2>_j = (a†_j)^2 |0> / sqrt 2.
        let c = if j == k { 1.0 / SQRT_2 } else { 1.0 };
        poly.add_term(j, k, Complex64::new(c, 0.0))?;
        let psi = poly.transform(u)?.amplitudes();
        w.set_column(col, &psi);
    }
    Ok(w)
}

/// Evolve a density matrix through a lossless network: rho -> W rho W^H with
/// W the induced two-photon unitary.
pub fn transform_density_matrix(
    u: &TransferMatrix,
    rho: &TwoPhotonDensityMatrix,
) -> Result<TwoPhotonDensityMatrix> {
    if u.modes() != rho.modes() {
        return Err(Error::DimensionMismatch {
            rows: u.modes(),
            cols: u.modes(),
            expected_rows: rho.modes(),
            expected_cols: rho.modes(),
        });
    }
    let w = two_photon_unitary(u)?;
    let evolved = &w * rho.matrix() * w.adjoint();
    TwoPhotonDensityMatrix::from_matrix(rho.modes(), evolved)
}

/// A Haar-like random unitary from the QR decomposition of a complex
/// Gaussian matrix, with the R diagonal phases folded back in.
pub fn random_unitary(modes: usize, seed: u64) -> Result<TransferMatrix> {
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    if modes < 2 {
        return Err(Error::ModeCountTooSmall(modes));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
    let ginibre = DMatrix::from_fn(modes, modes, |_, _| Complex64::new(draw(), draw()));
    let qr = ginibre.qr();
    let r = qr.r();
    let mut q = qr.q();
    for col in 0..modes {
        let d = r[(col, col)];
        let phase = if d.norm() > 0.0 {
            d / Complex64::from(d.norm())
        } else {
            Complex64::new(1.0, 0.0)
        };
        for row in 0..modes {
            q[(row, col)] *= phase;
        }
    }
    TransferMatrix::lossless(q)
}
