//! Readout of a `2^n`-level resonator through `n` ancilla qubits.
//!
//! Stage `k` correlates one qubit with bit `y_{n−k+1}` of the resonator level:
//! a qubit-resonator phase gate with angle `π/2^{k−1}`, qubit-qubit gates that
//! cancel the phases picked up from the bits already copied, then a Hadamard.
//! Afterwards the register holds the big-endian bits of `y`.
//!
//! Qubits are numbered from 0, and qubit 0 is the most significant register
//! bit. A composite basis index is `register · 2^n + level`.

use std::f64::consts::PI;
use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::CircuitError;
use crate::linalg::{ComplexMatrix, StateVector, C64};

pub const MAX_QUBITS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    QubitHadamard,
    /// `|x⟩_q ⊗ |y⟩ → e^{−iθxy}|x⟩_q ⊗ |y⟩`
    QubitResonatorPhase,
    /// `|x_a, x_b⟩ → e^{−iθ·x_a·x_b}|x_a, x_b⟩`
    QubitQubitPhase,
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GateKind::QubitHadamard => "qubit-hadamard",
            GateKind::QubitResonatorPhase => "qubit-resonator-phase",
            GateKind::QubitQubitPhase => "qubit-qubit-phase",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateDescriptor {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    /// Radians; zero for Hadamards.
    pub angle: f64,
}

impl GateDescriptor {
    pub fn hadamard(q: usize) -> Self {
        Self {
            kind: GateKind::QubitHadamard,
            targets: vec![q],
            angle: 0.0,
        }
    }

    pub fn resonator_phase(q: usize, angle: f64) -> Self {
        Self {
            kind: GateKind::QubitResonatorPhase,
            targets: vec![q],
            angle,
        }
    }

    pub fn qubit_phase(a: usize, b: usize, angle: f64) -> Self {
        Self {
            kind: GateKind::QubitQubitPhase,
            targets: vec![a, b],
            angle,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct GateCounts {
    pub hadamards: usize,
    pub qubit_resonator: usize,
    pub qubit_qubit: usize,
}

impl GateCounts {
    pub fn of(gates: &[GateDescriptor]) -> Self {
        gates.iter().fold(Self::default(), |mut c, g| {
            match g.kind {
                GateKind::QubitHadamard => c.hadamards += 1,
                GateKind::QubitResonatorPhase => c.qubit_resonator += 1,
                GateKind::QubitQubitPhase => c.qubit_qubit += 1,
            }
            c
        })
    }

    /// `(2n, n, n(n−1)/2)`
    pub fn expected(n: usize) -> Self {
        Self {
            hadamards: 2 * n,
            qubit_resonator: n,
            qubit_qubit: n * (n.saturating_sub(1)) / 2,
        }
    }

    pub fn total(&self) -> usize {
        self.hadamards + self.qubit_resonator + self.qubit_qubit
    }
}

fn check_qubits(n: usize) -> Result<(), CircuitError> {
    if (1..=MAX_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(CircuitError::QubitCount(n))
    }
}

/// Gates grouped by stage: entry 0 holds the initial Hadamards, entry `k`
/// the gates of stage `k`.
pub fn circuit_stages(n: usize) -> Result<Vec<Vec<GateDescriptor>>, CircuitError> {
    check_qubits(n)?;
    let mut stages = vec![(0..n).map(GateDescriptor::hadamard).collect::<Vec<_>>()];
    for k in 1..=n {
        let target = n - k;
        let mut stage = vec![GateDescriptor::resonator_phase(
            target,
            PI / f64::from(1u32 << (k - 1)),
        )];
        // Qubit `later` already holds bit y_later, which picked up a phase
        // e^{−iπ·x·y_later / 2^{later−target}}; undo it.
        for later in target + 1..n {
            let angle = -PI / f64::from(1u32 << (later - target));
            stage.push(GateDescriptor::qubit_phase(target, later, angle));
        }
        stage.push(GateDescriptor::hadamard(target));
        stages.push(stage);
    }
    Ok(stages)
}

pub fn build_circuit(n: usize) -> Result<Vec<GateDescriptor>, CircuitError> {
    Ok(circuit_stages(n)?.into_iter().flatten().collect())
}

/// Qubit register ⊗ resonator, both of dimension `2^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct CompositeState {
    n: usize,
    amplitudes: Vec<C64>,
}

impl CompositeState {
    /// `|0…0⟩ ⊗ |c⟩`
    pub fn with_resonator(c: &StateVector) -> Result<Self, CircuitError> {
        let n = qubits_for(c.dim())?;
        let mut amplitudes = vec![C64::new(0.0, 0.0); c.dim() * c.dim()];
        amplitudes[..c.dim()].copy_from_slice(c.amplitudes());
        Ok(Self { n, amplitudes })
    }

    pub fn from_amplitudes(n: usize, amplitudes: Vec<C64>) -> Result<Self, CircuitError> {
        check_qubits(n)?;
        let levels = 1usize << n;
        if amplitudes.len() != levels * levels {
            return Err(CircuitError::Linalg(crate::LinalgError::ShapeMismatch {
                expected: levels * levels,
                found: amplitudes.len(),
            }));
        }
        StateVector::new(amplitudes.clone())?;
        Ok(Self { n, amplitudes })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn levels(&self) -> usize {
        1 << self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, register: usize, level: usize) -> C64 {
        self.amplitudes[register * self.levels() + level]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    fn bit(&self, register: usize, q: usize) -> usize {
        (register >> (self.n - 1 - q)) & 1
    }

    pub fn overlap(&self, other: &Self) -> C64 {
        assert_eq!(self.n, other.n);
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Reduced density matrix of the resonator.
    pub fn resonator_marginal(&self) -> ComplexMatrix {
        let levels = self.levels();
        ComplexMatrix::from_fn(levels, levels, |y, y2| {
            (0..levels)
                .map(|x| self.amplitude(x, y) * self.amplitude(x, y2).conj())
                .sum()
        })
    }
}

fn qubits_for(dim: usize) -> Result<usize, CircuitError> {
    if !dim.is_power_of_two() || dim < 2 {
        return Err(CircuitError::ResonatorDimension(dim));
    }
    let n = dim.trailing_zeros() as usize;
    check_qubits(n).map_err(|_| CircuitError::ResonatorDimension(dim))?;
    Ok(n)
}

pub fn apply_gate(
    state: &CompositeState,
    gate: &GateDescriptor,
) -> Result<CompositeState, CircuitError> {
    let n = state.n;
    let arity = match gate.kind {
        GateKind::QubitHadamard | GateKind::QubitResonatorPhase => 1,
        GateKind::QubitQubitPhase => 2,
    };
    if gate.targets.len() != arity {
        return Err(CircuitError::Arity(gate.kind.to_string()));
    }
    if let Some(&target) = gate.targets.iter().find(|&&t| t >= n) {
        return Err(CircuitError::Target { target, n });
    }
    if arity == 2 && gate.targets[0] == gate.targets[1] {
        return Err(CircuitError::Target {
            target: gate.targets[1],
            n,
        });
    }

    let levels = state.levels();
    let mut out = state.clone();
    match gate.kind {
        GateKind::QubitHadamard => {
            let q = gate.targets[0];
            let mask = 1 << (n - 1 - q);
            let s = std::f64::consts::FRAC_1_SQRT_2;
            for x in (0..levels).filter(|x| x & mask == 0) {
                for y in 0..levels {
                    let i0 = x * levels + y;
                    let i1 = (x | mask) * levels + y;
                    let (a0, a1) = (state.amplitudes[i0], state.amplitudes[i1]);
                    out.amplitudes[i0] = (a0 + a1) * s;
                    out.amplitudes[i1] = (a0 - a1) * s;
                }
            }
        }
        GateKind::QubitResonatorPhase => {
            let q = gate.targets[0];
            for x in 0..levels {
                if state.bit(x, q) == 0 {
                    continue;
                }
                for y in 1..levels {
                    out.amplitudes[x * levels + y] *= C64::from_polar(1.0, -gate.angle * y as f64);
                }
            }
        }
        GateKind::QubitQubitPhase => {
            let (a, b) = (gate.targets[0], gate.targets[1]);
            let phase = C64::from_polar(1.0, -gate.angle);
            for x in 0..levels {
                if state.bit(x, a) == 1 && state.bit(x, b) == 1 {
                    for y in 0..levels {
                        out.amplitudes[x * levels + y] *= phase;
                    }
                }
            }
        }
    }
    Ok(out)
}

pub fn run_circuit(
    state: &CompositeState,
    gates: &[GateDescriptor],
) -> Result<CompositeState, CircuitError> {
    gates
        .iter()
        .try_fold(state.clone(), |s, g| apply_gate(&s, g))
}

/// Runs the full readout circuit on `|0…0⟩ ⊗ |c⟩`.
pub fn map_resonator_to_qubits(c: &StateVector) -> Result<CompositeState, CircuitError> {
    let start = CompositeState::with_resonator(c)?;
    run_circuit(&start, &build_circuit(start.n)?)
}

/// `Σ_y c_y |bits(y)⟩ ⊗ |y⟩`, the state the circuit should produce.
pub fn ideal_mapping(c: &StateVector) -> Result<CompositeState, CircuitError> {
    let n = qubits_for(c.dim())?;
    let levels = c.dim();
    let mut amplitudes = vec![C64::new(0.0, 0.0); levels * levels];
    for (y, &cy) in c.amplitudes().iter().enumerate() {
        amplitudes[y * levels + y] = cy;
    }
    Ok(CompositeState { n, amplitudes })
}

/// Probability of each register bitstring, resonator traced out.
pub fn readout_distribution(state: &CompositeState) -> Vec<f64> {
    let levels = state.levels();
    (0..levels)
        .map(|x| (0..levels).map(|y| state.amplitude(x, y).norm_sqr()).sum())
        .collect()
}

/// Complex Gaussian amplitudes, normalized.
pub fn random_resonator_state<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> Result<StateVector, CircuitError> {
    check_qubits(n)?;
    let amps = (0..1usize << n)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    Ok(StateVector::normalized(amps)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn basis_composite(n: usize, register: usize, level: usize) -> CompositeState {
        let levels = 1 << n;
        let mut amps = vec![C64::new(0.0, 0.0); levels * levels];
        amps[register * levels + level] = C64::new(1.0, 0.0);
        CompositeState::from_amplitudes(n, amps).unwrap()
    }

    #[test]
    fn gate_counts_for_small_circuits() {
        let one = GateCounts::of(&build_circuit(1).unwrap());
        assert_eq!(
            one,
            GateCounts {
                hadamards: 2,
                qubit_resonator: 1,
                qubit_qubit: 0
            }
        );
        let two = build_circuit(2).unwrap();
        assert_eq!(
            GateCounts::of(&two),
            GateCounts {
                hadamards: 4,
                qubit_resonator: 2,
                qubit_qubit: 1
            }
        );
        let angles: Vec<f64> = two
            .iter()
            .filter(|g| g.kind == GateKind::QubitResonatorPhase)
            .map(|g| g.angle)
            .collect();
        assert_eq!(angles, vec![PI, PI / 2.0]);
        assert_eq!(
            GateCounts::of(&build_circuit(4).unwrap()),
            GateCounts::expected(4)
        );
        assert_eq!(GateCounts::expected(4).qubit_qubit, 6);
        for n in 1..=5 {
            assert_eq!(
                GateCounts::of(&build_circuit(n).unwrap()),
                GateCounts::expected(n)
            );
        }
    }

    #[test]
    fn stage_layout() {
        let stages = circuit_stages(3).unwrap();
        assert_eq!(stages.len(), 4);
        // stage k acts on qubit n-k, correction gates come before its Hadamard
        for (k, stage) in stages.iter().enumerate().skip(1) {
            let target = 3 - k;
            assert_eq!(stage[0].kind, GateKind::QubitResonatorPhase);
            assert_eq!(stage[0].targets, vec![target]);
            assert!((stage[0].angle - PI / f64::from(1u32 << (k - 1))).abs() < 1e-15);
            assert_eq!(stage.last().unwrap(), &GateDescriptor::hadamard(target));
            assert_eq!(stage.len(), k + 1);
        }
    }

    #[test]
    fn qubit_count_limits() {
        assert_eq!(build_circuit(0), Err(CircuitError::QubitCount(0)));
        assert_eq!(build_circuit(6), Err(CircuitError::QubitCount(6)));
    }

    #[test]
    fn resonator_phase_gate_actions() {
        let s = basis_composite(2, 0b01, 3);
        let g = GateDescriptor::resonator_phase(0, 0.9);
        assert_eq!(apply_gate(&s, &g).unwrap(), s);

        let s = basis_composite(1, 1, 1);
        let out = apply_gate(&s, &GateDescriptor::resonator_phase(0, PI)).unwrap();
        assert!((out.amplitude(1, 1) - C64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn hadamard_is_an_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = random_resonator_state(3, &mut rng).unwrap();
        let s = map_resonator_to_qubits(&c).unwrap();
        let twice = run_circuit(
            &s,
            &[GateDescriptor::hadamard(1), GateDescriptor::hadamard(1)],
        )
        .unwrap();
        let worst = s
            .amplitudes()
            .iter()
            .zip(twice.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(worst < 1e-12);
        assert!((twice.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bad_targets_are_rejected() {
        let s = basis_composite(2, 0, 0);
        assert_eq!(
            apply_gate(&s, &GateDescriptor::hadamard(2)),
            Err(CircuitError::Target { target: 2, n: 2 })
        );
        assert!(apply_gate(&s, &GateDescriptor::qubit_phase(1, 1, 0.3)).is_err());
        let bad = GateDescriptor {
            kind: GateKind::QubitQubitPhase,
            targets: vec![0],
            angle: 0.1,
        };
        assert!(matches!(apply_gate(&s, &bad), Err(CircuitError::Arity(_))));
    }

    #[test]
    fn basis_levels_map_to_their_bits() {
        let out = map_resonator_to_qubits(&StateVector::basis(2, 0)).unwrap();
        assert!((out.amplitude(0, 0).norm() - 1.0).abs() < 1e-12);

        let out = map_resonator_to_qubits(&StateVector::basis(4, 2)).unwrap();
        assert!((out.amplitude(0b10, 2).norm() - 1.0).abs() < 1e-12);

        for n in 1..=4 {
            for y in 0..1 << n {
                let out = map_resonator_to_qubits(&StateVector::basis(1 << n, y)).unwrap();
                let dist = readout_distribution(&out);
                assert!((dist[y] - 1.0).abs() < 1e-12, "n={n} y={y}");
            }
        }
    }

    #[test]
    fn uniform_superposition_reads_out_uniformly() {
        let c = StateVector::normalized(vec![C64::new(1.0, 0.0); 8]).unwrap();
        let dist = readout_distribution(&map_resonator_to_qubits(&c).unwrap());
        for p in dist {
            assert!((p - 1.0 / 8.0).abs() < 1e-12);
        }
    }

    #[test]
    fn random_states_map_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=5 {
            for _ in 0..10 {
                let c = random_resonator_state(n, &mut rng).unwrap();
                let got = map_resonator_to_qubits(&c).unwrap();
                let want = ideal_mapping(&c).unwrap();
                assert!((got.overlap(&want).norm() - 1.0).abs() < 1e-10);
                let dist = readout_distribution(&got);
                for (p, cy) in dist.iter().zip(c.amplitudes()) {
                    assert!((p - cy.norm_sqr()).abs() < 1e-10);
                }
                // the register records y, so the resonator decoheres in the number basis
                let pops: Vec<C64> = c
                    .amplitudes()
                    .iter()
                    .map(|a| C64::new(a.norm_sqr(), 0.0))
                    .collect();
                let marginal = got.resonator_marginal();
                assert!(marginal.max_abs_diff(&ComplexMatrix::from_diagonal(&pops)) < 1e-10);
            }
        }
    }

    #[test]
    fn stage_invariant_holds_after_each_stage() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 4;
        let c = random_resonator_state(n, &mut rng).unwrap();
        let stages = circuit_stages(n).unwrap();
        let mut state = CompositeState::with_resonator(&c).unwrap();
        state = run_circuit(&state, &stages[0]).unwrap();
        for (k, stage) in stages.iter().enumerate().skip(1) {
            state = run_circuit(&state, stage).unwrap();
            let low_mask = (1usize << k) - 1;
            for y in 0..1usize << n {
                for x in 0..1usize << n {
                    if state.amplitude(x, y).norm() > 1e-12 {
                        // last k qubits (least significant k register bits) copy y
                        assert_eq!(x & low_mask, y & low_mask, "stage {k} x={x:04b} y={y:04b}");
                    }
                }
            }
        }
    }

    #[test]
    fn resonator_dimension_checks() {
        let three = StateVector::normalized(vec![C64::new(1.0, 0.0); 3]).unwrap();
        assert_eq!(
            map_resonator_to_qubits(&three),
            Err(CircuitError::ResonatorDimension(3))
        );
        let big = StateVector::basis(64, 0);
        assert_eq!(
            map_resonator_to_qubits(&big),
            Err(CircuitError::ResonatorDimension(64))
        );
    }
}
