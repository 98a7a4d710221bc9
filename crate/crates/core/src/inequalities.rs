//! Joint outcome tables and the two Bell functionals evaluated on them.

use std::fmt;
use std::str::FromStr;

use crate::error::QuditError;
use crate::gates::{measurement_unitary, Choice, MeasurementSetting, PhaseConvention};
use crate::linalg::{apply_local_left, conjugate_local, ComplexMatrix};
use crate::noise::{apply_noise, NoiseSpec};
use crate::states::{prepare_entangled_state, DensityMatrix, StateVariant};

/// Entries below this magnitude count as exact zeros in the ordered sums.
const ORDER_SNAP: f64 = 1e-14;

/// How `P(A = B + k)` is read off a joint table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum OffsetConvention {
    /// `Σ_j P(A = j + k, B = j)`: Alice's outcome leads Bob's by `k`.
    #[default]
    AliceAhead,
    /// `Σ_j P(A = j, B = j + k)`: Bob's outcome leads Alice's by `k`.
    BobAhead,
}

impl fmt::Display for OffsetConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OffsetConvention::AliceAhead => "alice-ahead",
            OffsetConvention::BobAhead => "bob-ahead",
        })
    }
}

impl FromStr for OffsetConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "alice-ahead" => Ok(OffsetConvention::AliceAhead),
            "bob-ahead" => Ok(OffsetConvention::BobAhead),
            other => Err(format!(
                "unknown offset convention '{other}' (expected alice-ahead or bob-ahead)"
            )),
        }
    }
}

/// Everything about the measurement procedure other than the noise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Protocol {
    pub variant: StateVariant,
    pub convention: PhaseConvention,
    pub offset: OffsetConvention,
}

impl Protocol {
    pub fn with_variant(variant: StateVariant) -> Self {
        Self {
            variant,
            ..Self::default()
        }
    }

    pub fn alice_unitary(&self, d: usize, a: Choice) -> Result<ComplexMatrix, QuditError> {
        measurement_unitary(d, MeasurementSetting::alice(a), self.convention)
    }

    /// Bob's rotation, composed with the level reversal when the state
    /// variant reverses Bob's qudit.
    pub fn bob_unitary(&self, d: usize, b: Choice) -> Result<ComplexMatrix, QuditError> {
        let u = measurement_unitary(d, MeasurementSetting::bob(b), self.convention)?;
        Ok(match self.variant.bob_reversal() {
            Some(r) => u.matmul(&r.matrix(d)),
            None => u,
        })
    }
}

/// `P(A_a = j, B_b = k)` for one setting pair, stored row-major in `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityTable {
    d: usize,
    setting: (Choice, Choice),
    entries: Vec<f64>,
}

impl ProbabilityTable {
    pub fn new(d: usize, setting: (Choice, Choice), entries: Vec<f64>) -> Result<Self, QuditError> {
        if entries.len() != d * d {
            return Err(QuditError::InvalidTable(format!(
                "expected {} entries, found {}",
                d * d,
                entries.len()
            )));
        }
        if let Some(x) = entries.iter().find(|x| !x.is_finite() || **x < -1e-12) {
            return Err(QuditError::InvalidTable(format!(
                "entry {x} is not a probability"
            )));
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > 1e-10 {
            return Err(QuditError::InvalidTable(format!("entries sum to {sum}")));
        }
        Ok(Self {
            d,
            setting,
            entries,
        })
    }

    /// Every outcome pair equally likely.
    pub fn uniform(d: usize, setting: (Choice, Choice)) -> Self {
        let w = 1.0 / (d * d) as f64;
        Self {
            d,
            setting,
            entries: vec![w; d * d],
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn setting(&self) -> (Choice, Choice) {
        self.setting
    }

    pub fn get(&self, alice: usize, bob: usize) -> f64 {
        self.entries[alice * self.d + bob]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Entries with tiny negative rounding clamped to zero.
    pub fn clamped(&self) -> Vec<f64> {
        self.entries.iter().map(|&x| x.max(0.0)).collect()
    }

    pub fn alice_marginal(&self) -> Vec<f64> {
        (0..self.d)
            .map(|j| (0..self.d).map(|k| self.get(j, k)).sum())
            .collect()
    }

    pub fn bob_marginal(&self) -> Vec<f64> {
        (0..self.d)
            .map(|k| (0..self.d).map(|j| self.get(j, k)).sum())
            .collect()
    }

    /// Sum of entries whose outcome pair satisfies `keep(alice, bob)`.
    fn ordered_sum(&self, keep: impl Fn(usize, usize) -> bool) -> f64 {
        let mut s = 0.0;
        for j in 0..self.d {
            for k in 0..self.d {
                let x = self.get(j, k);
                if keep(j, k) && x.abs() >= ORDER_SNAP {
                    s += x;
                }
            }
        }
        s
    }
}

/// The four tables for `(a, b) ∈ {1,2}²`.
#[derive(Clone, Debug, PartialEq)]
pub struct SettingTables {
    d: usize,
    tables: [ProbabilityTable; 4],
}

fn slot(a: Choice, b: Choice) -> usize {
    a.index() * 2 + b.index()
}

impl SettingTables {
    /// Accepts the tables in any order; each setting pair must appear once
    /// and all must share a dimension.
    pub fn new(tables: [ProbabilityTable; 4]) -> Result<Self, QuditError> {
        let d = tables[0].d;
        if let Some(t) = tables.iter().find(|t| t.d != d) {
            return Err(QuditError::TableDimensionMismatch(d, t.d));
        }
        let mut seen = [false; 4];
        for t in &tables {
            let s = slot(t.setting.0, t.setting.1);
            if seen[s] {
                return Err(QuditError::DuplicateSetting(format!(
                    "({}, {})",
                    t.setting.0.label(),
                    t.setting.1.label()
                )));
            }
            seen[s] = true;
        }
        let mut tables = tables;
        tables.sort_by_key(|t| slot(t.setting.0, t.setting.1));
        Ok(Self { d, tables })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, a: Choice, b: Choice) -> &ProbabilityTable {
        &self.tables[slot(a, b)]
    }

    pub fn iter(&self) -> impl Iterator<Item = &ProbabilityTable> {
        self.tables.iter()
    }
}

/// `ρ_{a,b} = (U_{A,a} ⊗ U_{B,b}) ρ (U_{A,a} ⊗ U_{B,b})†`
pub fn rotate_state(
    rho: &DensityMatrix,
    a: Choice,
    b: Choice,
    protocol: &Protocol,
) -> Result<DensityMatrix, QuditError> {
    let d = rho.qudit_dim();
    let ua = protocol.alice_unitary(d, a)?;
    let ub = protocol.bob_unitary(d, b)?;
    Ok(rho.with_matrix(conjugate_local(rho.matrix(), &ua, &ub)))
}

/// Diagonal of the rotated state, reshaped to a d×d table.
pub fn joint_probabilities(
    rho: &DensityMatrix,
    a: Choice,
    b: Choice,
    protocol: &Protocol,
) -> Result<ProbabilityTable, QuditError> {
    let d = rho.qudit_dim();
    let ua = protocol.alice_unitary(d, a)?;
    let ub = protocol.bob_unitary(d, b)?;

    // Only the diagonal of W ρ W† is needed: form T = W ρ, then contract each
    // row of T against the matching row of W.
    let t = apply_local_left(rho.matrix(), &ua, &ub);
    let mut entries = Vec::with_capacity(d * d);
    for j in 0..d {
        for k in 0..d {
            let row = t.row(j * d + k);
            let mut acc = 0.0;
            for x in 0..d {
                let wa = ua[(j, x)].conj();
                for y in 0..d {
                    acc += (row[x * d + y] * wa * ub[(k, y)].conj()).re;
                }
            }
            entries.push(acc);
        }
    }
    ProbabilityTable::new(d, (a, b), entries)
}

pub fn measure_all(rho: &DensityMatrix, protocol: &Protocol) -> Result<SettingTables, QuditError> {
    let t = |a, b| joint_probabilities(rho, a, b, protocol);
    SettingTables::new([
        t(Choice::One, Choice::One)?,
        t(Choice::One, Choice::Two)?,
        t(Choice::Two, Choice::One)?,
        t(Choice::Two, Choice::Two)?,
    ])
}

/// `P(A = B + k)` with the offset taken mod d; negative `k` wraps.
pub fn prob_equal_mod(table: &ProbabilityTable, k: i64, offset: OffsetConvention) -> f64 {
    let d = table.d;
    let shift = k.rem_euclid(d as i64) as usize;
    (0..d)
        .map(|j| match offset {
            OffsetConvention::AliceAhead => table.get((j + shift) % d, j),
            OffsetConvention::BobAhead => table.get(j, (j + shift) % d),
        })
        .sum()
}

/// The CGLMP parameter
/// `I_d = Σ_{k<⌊d/2⌋} (1 − 2k/(d−1)) [𝒫(k) − 𝒫(−k−1)]`.
pub fn cglmp(tables: &SettingTables, offset: OffsetConvention) -> f64 {
    use Choice::{One, Two};
    let d = tables.d;
    // B = A + k is A = B − k.
    let script_p = |k: i64| {
        prob_equal_mod(tables.get(One, One), k, offset)
            + prob_equal_mod(tables.get(Two, One), -(k + 1), offset)
            + prob_equal_mod(tables.get(Two, Two), k, offset)
            + prob_equal_mod(tables.get(One, Two), -k, offset)
    };
    (0..(d / 2) as i64)
        .map(|k| {
            let weight = 1.0 - 2.0 * k as f64 / (d as f64 - 1.0);
            weight * (script_p(k) - script_p(-k - 1))
        })
        .sum()
}

/// `P(A₂<B₂) + P(B₂<A₁) + P(A₁<B₁) + P(B₁≤A₂)`; local models give at least 1.
pub fn zohren_gill(tables: &SettingTables) -> f64 {
    use Choice::{One, Two};
    tables.get(Two, Two).ordered_sum(|a, b| a < b)
        + tables.get(One, Two).ordered_sum(|a, b| b < a)
        + tables.get(One, One).ordered_sum(|a, b| a < b)
        + tables.get(Two, One).ordered_sum(|a, b| b <= a)
}

/// Outcome of one full preparation → noise → measurement run.
#[derive(Clone, Debug, PartialEq)]
pub struct BellResult {
    pub d: usize,
    pub noise: NoiseSpec,
    pub protocol: Protocol,
    /// Number of channel applications actually performed.
    pub n_applied: usize,
    pub i_d: f64,
    pub zg_value: f64,
    pub cglmp_violated: bool,
    pub zg_violated: bool,
}

/// Noisy state ready for measurement.
pub fn noisy_state(
    d: usize,
    spec: &NoiseSpec,
    variant: StateVariant,
) -> Result<DensityMatrix, QuditError> {
    let psi = prepare_entangled_state(d, variant)?;
    let rho0 = DensityMatrix::from_pure(d, &psi)?;
    apply_noise(&rho0, spec)
}

pub fn run_experiment(
    d: usize,
    spec: &NoiseSpec,
    protocol: &Protocol,
) -> Result<BellResult, QuditError> {
    let rho = noisy_state(d, spec, protocol.variant)?;
    let tables = measure_all(&rho, protocol)?;
    let i_d = cglmp(&tables, protocol.offset);
    let zg_value = zohren_gill(&tables);
    Ok(BellResult {
        d,
        noise: *spec,
        protocol: *protocol,
        n_applied: spec.iterations.count(d),
        i_d,
        zg_value,
        cglmp_violated: i_d > 2.0,
        zg_violated: zg_value < 1.0,
    })
}
