//! Correlations of the post-selected photon pair: the two-qubit state over a
//! partition of the output modes, its Bell and Bloch decompositions, and the
//! geometric discord in both a closed scalar form and a general
//! eigenvalue-based form.

use nalgebra::{Matrix2, Matrix3, Matrix4, Vector3, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{HERMITICITY_TOL, PSD_TOL, TRACE_TOL, TwoPhotonDensityMatrix};

/// Scalar parameters (t, u, v, w) of the post-selected two-qubit family;
/// the state is (1/4) [[t, u, u, v], [u, w, w, u], [u, w, w, u], [v, u, u, t]]
/// in the |00>, |01>, |10>, |11> basis, with t + w = 2.
#[derive(Clone, Copy, Debug)]
pub struct StateParams {
    pub t: f64,
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

impl StateParams {
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
            t: (1.0 + 4.0 * gamma + gamma * gamma) / norm,
            u: (1.0 - gamma) / (1.0 + gamma),
            v: (1.0 - 4.0 * gamma + gamma * gamma) / norm,
            w: (1.0 + gamma * gamma) / norm,
        })
    }

    pub fn matrix(&self) -> Matrix4<Complex64> {
        let (t, u, v, w) = (self.t, self.u, self.v, self.w);
        Matrix4::from_row_slice(&[
            t, u, u, v, //
            u, w, w, u, //
            u, w, w, u, //
            v, u, u, t,
        ])
        .map(|x| Complex64::new(x / 4.0, 0.0))
    }
}

/// A validated two-qubit density matrix in the |00>, |01>, |10>, |11> basis.
#[derive(Clone, Debug)]
pub struct BipartiteQubitState {
    matrix: Matrix4<Complex64>,
}

impl BipartiteQubitState {
    pub fn new(matrix: Matrix4<Complex64>) -> Result<Self> {
        let mut hermitian_deviation: f64 = 0.0;
        for row in 0..4 {
            for col in 0..4 {
                let gap = (matrix[(row, col)] - matrix[(col, row)].conj()).norm();
                hermitian_deviation = hermitian_deviation.max(gap);
            }
        }
        if hermitian_deviation > HERMITICITY_TOL {
            return Err(Error::NotHermitian {
                deviation: hermitian_deviation,
            });
        }
        let trace: f64 = (0..4).map(|i| matrix[(i, i)].re).sum();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::BadTrace {
                trace,
                expected: 1.0,
            });
        }
        let dynamic = nalgebra::DMatrix::from_fn(4, 4, |r, c| matrix[(r, c)]);
        let eigenvalues = dynamic.symmetric_eigen().eigenvalues;
        if let Some(&lowest) = eigenvalues
            .iter()
            .min_by(|a, b| a.partial_cmp(b).expect("real eigenvalues"))
            && lowest < PSD_TOL
        {
            return Err(Error::NotPositive { eigenvalue: lowest });
        }
        Ok(Self { matrix })
    }

    /// The post-selected family state at source ratio gamma (closed form,
    /// no engine evolution involved).
    pub fn from_gamma(gamma: f64) -> Result<Self> {
        Self::new(StateParams::from_gamma(gamma)?.matrix())
    }

    pub fn bell_phi_plus() -> Self {
        let mut matrix = Matrix4::from_element(Complex64::ZERO);
        for &row in &[0, 3] {
            for &col in &[0, 3] {
                matrix[(row, col)] = Complex64::new(0.5, 0.0);
            }
        }
        Self { matrix }
    }

    pub fn maximally_mixed() -> Self {
        Self {
            matrix: Matrix4::identity().unscale(4.0),
        }
    }

    /// |+>|+>, a pure product state.
    pub fn plus_plus() -> Self {
        Self {
            matrix: Matrix4::from_element(Complex64::new(0.25, 0.0)),
        }
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }
}

/// Restrict a four-mode two-photon state to events with one photon in each
/// side of the partition, mapping pair (j, k), j in side A, k in side B, to
/// the qubit basis (A0 B0, A0 B1, A1 B0, A1 B1).  Returns the renormalized
/// state and the post-selection probability.
pub fn postselect_bipartite(
    rho: &TwoPhotonDensityMatrix,
    side_a: (usize, usize),
    side_b: (usize, usize),
) -> Result<(BipartiteQubitState, f64)> {
    let basis = rho.basis();
    let modes = basis.modes();
    let chosen = [side_a.0, side_a.1, side_b.0, side_b.1];
    for &mode in &chosen {
        if mode >= modes {
            return Err(Error::ModeOutOfRange { index: mode, modes });
        }
    }
    for i in 0..4 {
        for j in i + 1..4 {
            if chosen[i] == chosen[j] {
                return Err(Error::DegeneratePair(chosen[i], chosen[j]));
            }
        }
    }
    let slots = [
        basis.index_of(side_a.0, side_b.0)?,
        basis.index_of(side_a.0, side_b.1)?,
        basis.index_of(side_a.1, side_b.0)?,
        basis.index_of(side_a.1, side_b.1)?,
    ];
    let mut block = Matrix4::from_element(Complex64::ZERO);
    for row in 0..4 {
        for col in 0..4 {
            block[(row, col)] = rho.entry(slots[row], slots[col]);
        }
    }
    let success: f64 = (0..4).map(|i| block[(i, i)].re).sum();
    if success <= f64::EPSILON {
        return Err(Error::EmptyPostSelection(success));
    }
    Ok((BipartiteQubitState::new(block.unscale(success))?, success))
}

/// Diagonal weights of the state in the Bell basis; they sum to 1.
#[derive(Clone, Copy, Debug)]
pub struct BellWeights {
    pub phi_plus: f64,
    pub phi_minus: f64,
    pub psi_plus: f64,
    pub psi_minus: f64,
}

pub fn bell_decomposition(state: &BipartiteQubitState) -> BellWeights {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let overlap = |vector: Vector4<Complex64>| -> f64 {
        (vector.adjoint() * state.matrix() * vector)[(0, 0)].re
    };
    let c = |x: f64| Complex64::new(x, 0.0);
    BellWeights {
        phi_plus: overlap(Vector4::new(c(s), c(0.0), c(0.0), c(s))),
        phi_minus: overlap(Vector4::new(c(s), c(0.0), c(0.0), c(-s))),
        psi_plus: overlap(Vector4::new(c(0.0), c(s), c(s), c(0.0))),
        psi_minus: overlap(Vector4::new(c(0.0), c(s), c(-s), c(0.0))),
    }
}

fn pauli() -> [Matrix2<Complex64>; 3] {
    let zero = Complex64::ZERO;
    let one = Complex64::ONE;
    let i = Complex64::I;
    [
        Matrix2::new(zero, one, one, zero),
        Matrix2::new(zero, -i, i, zero),
        Matrix2::new(one, zero, zero, -one),
    ]
}

/// Bloch-form components: local vectors r_A, r_B and the 3x3 correlation
/// matrix C with C_ij = <sigma_i x sigma_j>.
#[derive(Clone, Debug)]
pub struct BlochDecomposition {
    pub r_a: Vector3<f64>,
    pub r_b: Vector3<f64>,
    pub c: Matrix3<f64>,
}

impl BlochDecomposition {
    /// rho = (1/4) (I + r_A . sigma x I + I x r_B . sigma + C_ij sigma x sigma).
    pub fn reconstruct(&self) -> Matrix4<Complex64> {
        let sigma = pauli();
        let identity = Matrix2::identity();
        let mut matrix = Matrix4::identity().map(|x: Complex64| x);
        for axis in 0..3 {
            matrix += sigma[axis].kronecker(&identity).scale(self.r_a[axis]);
            matrix += identity.kronecker(&sigma[axis]).scale(self.r_b[axis]);
            for other in 0..3 {
                matrix += sigma[axis]
                    .kronecker(&sigma[other])
                    .scale(self.c[(axis, other)]);
            }
        }
        matrix.unscale(4.0)
    }
}

pub fn bloch_decompose(state: &BipartiteQubitState) -> BlochDecomposition {
    let sigma = pauli();
    let identity = Matrix2::identity();
    let expectation = |operator: Matrix4<Complex64>| -> f64 {
        (operator * state.matrix()).trace().re
    };
    let mut r_a = Vector3::zeros();
    let mut r_b = Vector3::zeros();
    let mut c = Matrix3::zeros();
    for axis in 0..3 {
        r_a[axis] = expectation(sigma[axis].kronecker(&identity));
        r_b[axis] = expectation(identity.kronecker(&sigma[axis]));
        for other in 0..3 {
            c[(axis, other)] = expectation(sigma[axis].kronecker(&sigma[other]));
        }
    }
    BlochDecomposition { r_a, r_b, c }
}

pub fn purity(state: &BipartiteQubitState) -> f64 {
    (state.matrix() * state.matrix()).trace().re
}

#[derive(Clone, Copy, Debug)]
pub enum Side {
    A,
    B,
}

pub fn reduced_state(state: &BipartiteQubitState, side: Side) -> Matrix2<Complex64> {
    let rho = state.matrix();
    let mut reduced = Matrix2::from_element(Complex64::ZERO);
    for row in 0..2 {
        for col in 0..2 {
            for traced in 0..2 {
                let (r, c) = match side {
                    Side::A => (2 * row + traced, 2 * col + traced),
                    Side::B => (2 * traced + row, 2 * traced + col),
                };
                reduced[(row, col)] += rho[(r, c)];
            }
        }
    }
    reduced
}

/// Magnitude of the local off-diagonal element, 2 |<0| rho_A |1>|; for the
/// post-selected family this equals |u| = |1 - gamma| / (1 + gamma).
pub fn local_coherence(state: &BipartiteQubitState) -> f64 {
    2.0 * reduced_state(state, Side::A)[(0, 1)].norm()
}

// --- geometric discord -------------------------------------------------------
//
// Both routes compute the squared Hilbert-Schmidt distance to the closest
// zero-discord state, scaled so a Bell state scores exactly 1.  The closed
// route works entirely in the (t, u, v, w) scalars; the general route goes
// through the Bloch decomposition and an eigenvalue problem and accepts any
// two-qubit state.

/// The two competing values whose maximum is subtracted in the closed form.
/// Their crossing is the kink of the discord curve.
#[derive(Clone, Copy, Debug)]
pub struct DiscordBranches {
    /// (w - v)^2 / 4: square of the transverse correlation.
    pub correlation_branch: f64,
    /// ((w + v)^2 + 4 u^2) / 4: local coherence plus longitudinal term.
    pub coherence_branch: f64,
}

pub fn discord_branches(gamma: f64) -> Result<DiscordBranches> {
    let p = StateParams::from_gamma(gamma)?;
    Ok(DiscordBranches {
        correlation_branch: (p.w - p.v) * (p.w - p.v) / 4.0,
        coherence_branch: ((p.w + p.v) * (p.w + p.v) + 4.0 * p.u * p.u) / 4.0,
    })
}

/// Closed-form geometric discord of the post-selected family.
pub fn geometric_discord_closed(gamma: f64) -> Result<f64> {
    let p = StateParams::from_gamma(gamma)?;
    let branches = discord_branches(gamma)?;
    let total = (p.w * p.w + p.v * p.v) / 2.0
        + (p.t - p.w) * (p.t - p.w) / 4.0
        + p.u * p.u;
    Ok((total - branches.correlation_branch.max(branches.coherence_branch)) / 2.0)
}

/// Geometric discord of an arbitrary two-qubit state, measured on side A:
/// (1/2) (|r_A|^2 + |C|_F^2 - k_max), k_max the largest eigenvalue of
/// r_A r_A^T + C C^T.
pub fn geometric_discord_general(state: &BipartiteQubitState) -> f64 {
    let bloch = bloch_decompose(state);
    let k = bloch.r_a * bloch.r_a.transpose() + bloch.c * bloch.c.transpose();
    let k_max = k
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(f64::MIN, |acc, &e| acc.max(e));
    (bloch.r_a.norm_squared() + bloch.c.norm_squared() - k_max) / 2.0
}

/// Location and value of the discord maximum over gamma in [0, 1], plus the
/// branch-crossing point of the closed form.  The maximum sits exactly on
/// the crossing; `tol` bounds how far the two independently computed
/// locations may drift apart.
#[derive(Clone, Copy, Debug)]
pub struct DiscordMaximum {
    pub gamma_star: f64,
    pub d_star: f64,
    pub kink_gamma: f64,
}

pub fn maximize_discord(tol: f64) -> Result<DiscordMaximum> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::ParameterOutOfRange {
            name: "tol",
            value: tol,
            range: "(0, inf)",
        });
    }
    // Coarse scan, then golden-section refinement of the peak.
    let steps = 1000usize;
    let mut best_index = 0usize;
    let mut best_value = f64::MIN;
    for index in 0..=steps {
        let gamma = index as f64 / steps as f64;
        let value = geometric_discord_closed(gamma)?;
        if value > best_value {
            best_value = value;
            best_index = index;
        }
    }
    let mut lo = (best_index.saturating_sub(1)) as f64 / steps as f64;
    let mut hi = ((best_index + 1).min(steps)) as f64 / steps as f64;
    const INV_GOLDEN: f64 = 0.618_033_988_749_895;
    let mut x1 = hi - INV_GOLDEN * (hi - lo);
    let mut x2 = lo + INV_GOLDEN * (hi - lo);
    let mut d1 = geometric_discord_closed(x1)?;
    let mut d2 = geometric_discord_closed(x2)?;
    while hi - lo > 1e-12 {
        if d1 < d2 {
            lo = x1;
            x1 = x2;
            d1 = d2;
            x2 = lo + INV_GOLDEN * (hi - lo);
            d2 = geometric_discord_closed(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            d2 = d1;
            x1 = hi - INV_GOLDEN * (hi - lo);
            d1 = geometric_discord_closed(x1)?;
        }
    }
    let gamma_star = 0.5 * (lo + hi);
    let d_star = geometric_discord_closed(gamma_star)?;

    // Independent route to the same point: bisect the branch crossing.
    let gap = |gamma: f64| -> Result<f64> {
        let b = discord_branches(gamma)?;
        Ok(b.coherence_branch - b.correlation_branch)
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    if gap(lo)? <= 0.0 || gap(hi)? >= 0.0 {
        return Err(Error::InvariantViolation(
            "discord branches do not cross on (0, 1)".into(),
        ));
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if gap(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let kink_gamma = 0.5 * (lo + hi);
    let drift = (kink_gamma - gamma_star).abs();
    if drift > tol.max(1e-3) {
        return Err(Error::InvariantViolation(format!(
            "discord maximum at {gamma_star:.9} but branch crossing at {kink_gamma:.9}"
        )));
    }
    Ok(DiscordMaximum {
        gamma_star,
        d_star,
        kink_gamma,
    })
}
