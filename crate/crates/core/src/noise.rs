//! Trace-preserving noise maps applied to the prepared state before the
//! measurement rotations, and the policy for how many times to apply them.

use std::fmt;
use std::str::FromStr;

use crate::error::QuditError;
use crate::gates::check_dim;
use crate::linalg::{ComplexMatrix, C64};
use crate::states::DensityMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NoiseKind {
    Depolarizing,
    Dephasing,
    AmplitudeDamping,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 3] = [
        NoiseKind::Depolarizing,
        NoiseKind::Dephasing,
        NoiseKind::AmplitudeDamping,
    ];
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseKind::Depolarizing => "depolarizing",
            NoiseKind::Dephasing => "dephasing",
            NoiseKind::AmplitudeDamping => "amplitude-damping",
        })
    }
}

impl FromStr for NoiseKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "depolarizing" => Ok(NoiseKind::Depolarizing),
            "dephasing" => Ok(NoiseKind::Dephasing),
            "amplitude-damping" => Ok(NoiseKind::AmplitudeDamping),
            other => Err(format!(
                "unknown noise '{other}' (expected depolarizing, dephasing or amplitude-damping)"
            )),
        }
    }
}

/// How many times the channel is applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IterationPolicy {
    /// N = 1
    Single,
    /// N = d
    Linear,
    Fixed(usize),
}

impl IterationPolicy {
    pub fn count(self, d: usize) -> usize {
        match self {
            IterationPolicy::Single => 1,
            IterationPolicy::Linear => d,
            IterationPolicy::Fixed(n) => n,
        }
    }
}

impl fmt::Display for IterationPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IterationPolicy::Single => f.write_str("single"),
            IterationPolicy::Linear => f.write_str("linear"),
            IterationPolicy::Fixed(n) => write!(f, "{n}"),
        }
    }
}

impl FromStr for IterationPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "single" => Ok(IterationPolicy::Single),
            "linear" => Ok(IterationPolicy::Linear),
            other => other
                .parse::<usize>()
                .map(IterationPolicy::Fixed)
                .map_err(|_| {
                    format!(
                        "unknown iteration policy '{other}' (expected single, linear or a count)"
                    )
                }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub p: f64,
    pub iterations: IterationPolicy,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, p: f64, iterations: IterationPolicy) -> Result<Self, QuditError> {
        check_probability(p)?;
        Ok(Self {
            kind,
            p,
            iterations,
        })
    }

    pub fn noiseless() -> Self {
        Self {
            kind: NoiseKind::Depolarizing,
            p: 1.0,
            iterations: IterationPolicy::Single,
        }
    }

    pub fn with_p(&self, p: f64) -> Result<Self, QuditError> {
        Self::new(self.kind, p, self.iterations)
    }
}

fn check_probability(p: f64) -> Result<(), QuditError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(QuditError::ProbabilityOutOfRange(p))
    }
}

/// `ρ → pρ + (1−p)·I/d²`
pub fn depolarize(rho: &DensityMatrix, p: f64) -> Result<DensityMatrix, QuditError> {
    check_probability(p)?;
    let n = rho.matrix().rows();
    let mut out = rho.matrix().scale(C64::new(p, 0.0));
    let mixed = (1.0 - p) / n as f64;
    for i in 0..n {
        out[(i, i)] += mixed;
    }
    Ok(rho.with_matrix(out))
}

/// `ρ → pρ + (1−p)·diag(ρ)`: off-diagonal entries shrink by `p`.
pub fn dephase(rho: &DensityMatrix, p: f64) -> Result<DensityMatrix, QuditError> {
    check_probability(p)?;
    let n = rho.matrix().rows();
    let mut out = rho.matrix().clone();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                out[(i, j)] *= p;
            }
        }
    }
    Ok(rho.with_matrix(out))
}

/// Kraus operators of one channel, all the same square shape.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausSet {
    operators: Vec<ComplexMatrix>,
}

impl KrausSet {
    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    /// Largest entry of `Σ E†E − I`.
    pub fn completeness_defect(&self) -> f64 {
        let n = self.operators[0].rows();
        let sum = self
            .operators
            .iter()
            .fold(ComplexMatrix::zeros(n, n), |acc, e| {
                &acc + &e.dagger().matmul(e)
            });
        sum.max_abs_diff(&ComplexMatrix::identity(n))
    }

    pub fn is_complete(&self, tol: f64) -> bool {
        self.completeness_defect() <= tol
    }
}

#[inline]
fn survival_amplitude(p: f64, j: usize) -> f64 {
    p.powi(j as i32).sqrt()
}

#[inline]
fn decay_amplitude(p: f64, j: usize) -> f64 {
    (1.0 - p.powi(j as i32)).max(0.0).sqrt()
}

/// Single-qudit damping with `E₀ = Σ_j √(p^j)|j⟩⟨j|` and
/// `E₁ = Σ_{j≥1} √(1−p^j)|j−1⟩⟨j|`.
pub fn amplitude_damping_kraus(d: usize, p: f64) -> Result<KrausSet, QuditError> {
    check_dim(d)?;
    check_probability(p)?;
    let mut e0 = ComplexMatrix::zeros(d, d);
    let mut e1 = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        e0[(j, j)] = C64::new(survival_amplitude(p, j), 0.0);
        if j >= 1 {
            e1[(j - 1, j)] = C64::new(decay_amplitude(p, j), 0.0);
        }
    }
    Ok(KrausSet {
        operators: vec![e0, e1],
    })
}

/// A local operator with at most one non-zero per column: `|j⟩ → w_j|t_j⟩`.
struct Monomial {
    target: Vec<Option<usize>>,
    weight: Vec<f64>,
}

fn damping_monomials(d: usize, p: f64) -> [Monomial; 2] {
    let keep = Monomial {
        target: (0..d).map(Some).collect(),
        weight: (0..d).map(|j| survival_amplitude(p, j)).collect(),
    };
    let lose = Monomial {
        target: (0..d).map(|j| j.checked_sub(1)).collect(),
        weight: (0..d).map(|j| decay_amplitude(p, j)).collect(),
    };
    [keep, lose]
}

/// `ρ → Σ_{ℓ,m} (E_ℓ⊗E_m) ρ (E_ℓ⊗E_m)†` with the same damping on both qudits.
///
/// Each `E_ℓ⊗E_m` moves every basis state to at most one other, so the sum is
/// accumulated entrywise in O(d⁴).
pub fn amplitude_damp(rho: &DensityMatrix, p: f64) -> Result<DensityMatrix, QuditError> {
    check_probability(p)?;
    let d = rho.qudit_dim();
    let n = d * d;
    let ops = damping_monomials(d, p);
    let src = rho.matrix();
    let mut out = ComplexMatrix::zeros(n, n);

    for a in &ops {
        for b in &ops {
            // Flattened targets and weights of a ⊗ b.
            let mut moves: Vec<(usize, usize, f64)> = Vec::with_capacity(n);
            for j in 0..d {
                let Some(tj) = a.target[j] else { continue };
                for k in 0..d {
                    let Some(tk) = b.target[k] else { continue };
                    let w = a.weight[j] * b.weight[k];
                    if w != 0.0 {
                        moves.push((j * d + k, tj * d + tk, w));
                    }
                }
            }
            for &(row, dest_row, w_row) in &moves {
                for &(col, dest_col, w_col) in &moves {
                    out[(dest_row, dest_col)] += src[(row, col)] * (w_row * w_col);
                }
            }
        }
    }
    Ok(rho.with_matrix(out))
}

/// Splits one damping step of strength `p` into `substeps` steps of strength
/// `p^(1/substeps)`.
pub fn amplitude_damp_continuous(
    rho: &DensityMatrix,
    p: f64,
    substeps: usize,
) -> Result<DensityMatrix, QuditError> {
    check_probability(p)?;
    if substeps == 0 {
        return Err(QuditError::ZeroSubsteps);
    }
    if substeps == 1 {
        return amplitude_damp(rho, p);
    }
    if p == 0.0 {
        return Err(QuditError::ZeroProbabilitySubsteps(substeps));
    }
    let step = p.powf(1.0 / substeps as f64);
    let mut out = rho.clone();
    for _ in 0..substeps {
        out = amplitude_damp(&out, step)?;
    }
    Ok(out)
}

pub fn apply_channel(
    rho: &DensityMatrix,
    kind: NoiseKind,
    p: f64,
) -> Result<DensityMatrix, QuditError> {
    match kind {
        NoiseKind::Depolarizing => depolarize(rho, p),
        NoiseKind::Dephasing => dephase(rho, p),
        NoiseKind::AmplitudeDamping => amplitude_damp(rho, p),
    }
}

/// Applies the channel as many times as the iteration policy asks for at the
/// state's dimension.
pub fn apply_noise(rho: &DensityMatrix, spec: &NoiseSpec) -> Result<DensityMatrix, QuditError> {
    check_probability(spec.p)?;
    let times = spec.iterations.count(rho.qudit_dim());
    let mut out = rho.clone();
    if spec.p == 1.0 {
        // Every channel is the identity at p = 1.
        return Ok(out);
    }
    for _ in 0..times {
        out = apply_channel(&out, spec.kind, spec.p)?;
    }
    Ok(out)
}
