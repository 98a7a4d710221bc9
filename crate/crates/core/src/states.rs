//! Entangled two-qudit states and the bipartite density matrix.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use crate::error::QuditError;
use crate::gates::{check_dim, controlled_phase, dft_hadamard, Reversal};
use crate::linalg::{kron, validate_density, ComplexMatrix, StateVector, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum StateVariant {
    /// `Σ_j |j,j⟩/√d`
    #[default]
    MaxEntangled,
    /// `Σ_j |j,j⟩/√((j+1)(d−j))`, normalized.
    App,
    /// `Σ_j |j,d−1−j⟩/√d`
    Rev,
    /// `Σ_j |j,(d−j) mod d⟩/√d`
    RevWrapped,
}

impl StateVariant {
    /// Relabeling Bob applies before his rotation, if the variant has one.
    pub fn bob_reversal(self) -> Option<Reversal> {
        match self {
            StateVariant::Rev => Some(Reversal::InRange),
            StateVariant::RevWrapped => Some(Reversal::Wrapped),
            StateVariant::MaxEntangled | StateVariant::App => None,
        }
    }
}

impl fmt::Display for StateVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StateVariant::MaxEntangled => "max",
            StateVariant::App => "app",
            StateVariant::Rev => "rev",
            StateVariant::RevWrapped => "rev-wrapped",
        })
    }
}

impl FromStr for StateVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "max" | "max-entangled" => Ok(StateVariant::MaxEntangled),
            "app" => Ok(StateVariant::App),
            "rev" => Ok(StateVariant::Rev),
            "rev-wrapped" => Ok(StateVariant::RevWrapped),
            other => Err(format!(
                "unknown state '{other}' (expected max, app, rev or rev-wrapped)"
            )),
        }
    }
}

pub fn prepare_entangled_state(d: usize, variant: StateVariant) -> Result<StateVector, QuditError> {
    check_dim(d)?;
    let mut amps = vec![C64::new(0.0, 0.0); d * d];
    for j in 0..d {
        let (bob, weight) = match variant {
            StateVariant::MaxEntangled => (j, 1.0),
            StateVariant::App => (j, 1.0 / (((j + 1) * (d - j)) as f64).sqrt()),
            StateVariant::Rev => (Reversal::InRange.image(j, d), 1.0),
            StateVariant::RevWrapped => (Reversal::Wrapped.image(j, d), 1.0),
        };
        amps[j * d + bob] = C64::new(weight, 0.0);
    }
    Ok(StateVector::normalized(amps)?)
}

/// Runs the preparation circuit `(I⊗H)·CR(2π/d)·(H⊗H)` on `|0,0⟩`.
pub fn prepare_via_circuit(d: usize) -> Result<StateVector, QuditError> {
    let h = dft_hadamard(d)?;
    let id = ComplexMatrix::identity(d);
    let cr = controlled_phase(d, TAU / d as f64)?;
    let psi = StateVector::basis(d * d, 0)
        .evolve(&kron(&h, &h))?
        .evolve(&cr)?
        .evolve(&kron(&id, &h))?;
    Ok(psi)
}

/// Density matrix on the joint `d²`-dimensional space. Row index `j·d + k`
/// labels `|j⟩_Alice ⊗ |k⟩_Bob`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    d: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Wraps a matrix after checking its shape. Positivity is not checked
    /// here; use [`DensityMatrix::is_valid`].
    pub fn new(d: usize, matrix: ComplexMatrix) -> Result<Self, QuditError> {
        check_dim(d)?;
        if !matrix.is_square() || matrix.rows() != d * d {
            return Err(QuditError::DensityShape {
                d,
                expected: d * d,
                found: matrix.rows().max(matrix.cols()),
            });
        }
        Ok(Self { d, matrix })
    }

    pub fn from_pure(d: usize, psi: &StateVector) -> Result<Self, QuditError> {
        Self::new(d, psi.projector())
    }

    pub fn maximally_mixed(d: usize) -> Result<Self, QuditError> {
        check_dim(d)?;
        let n = d * d;
        Self::new(
            d,
            ComplexMatrix::identity(n).scale(C64::new(1.0 / n as f64, 0.0)),
        )
    }

    /// Diagonal state with the given joint populations (normalized to one).
    pub fn diagonal(d: usize, populations: &[f64]) -> Result<Self, QuditError> {
        check_dim(d)?;
        let total: f64 = populations.iter().sum();
        let diag: Vec<C64> = populations
            .iter()
            .map(|&c| C64::new(c / total, 0.0))
            .collect();
        Self::new(d, ComplexMatrix::from_diagonal(&diag))
    }

    pub fn qudit_dim(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        self.matrix.matmul(&self.matrix).trace().re
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        validate_density(&self.matrix, tol).unwrap_or(false)
    }

    /// Entry for `⟨j,k| ρ |l,m⟩`.
    pub fn entry(&self, (j, k): (usize, usize), (l, m): (usize, usize)) -> C64 {
        self.matrix[(j * self.d + k, l * self.d + m)]
    }

    pub(crate) fn with_matrix(&self, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(matrix.rows(), self.d * self.d);
        Self { d: self.d, matrix }
    }
}
