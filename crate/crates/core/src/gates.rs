//! Single- and two-qudit gates: generalized Hadamard, controlled phase and
//! the measurement rotations used by Alice and Bob.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use crate::error::QuditError;
use crate::linalg::{ComplexMatrix, C64};

pub(crate) fn check_dim(d: usize) -> Result<(), QuditError> {
    if d < 2 {
        Err(QuditError::DimensionTooSmall(d))
    } else {
        Ok(())
    }
}

/// `e^{2πi·m/d}`, with `m` reduced mod `d` first so large products stay exact.
fn root_of_unity(m: i64, d: usize) -> C64 {
    let r = m.rem_euclid(d as i64) as f64;
    C64::from_polar(1.0, TAU * r / d as f64)
}

/// d×d discrete Fourier transform, `H[j][k] = ω^{jk}/√d`.
pub fn dft_hadamard(d: usize) -> Result<ComplexMatrix, QuditError> {
    check_dim(d)?;
    let norm = 1.0 / (d as f64).sqrt();
    Ok(ComplexMatrix::from_fn(d, d, |j, k| {
        root_of_unity((j * k) as i64, d) * norm
    }))
}

/// Diagonal two-qudit gate `|j,k⟩ → e^{−i·j·k·θ}|j,k⟩`.
pub fn controlled_phase(d: usize, theta: f64) -> Result<ComplexMatrix, QuditError> {
    check_dim(d)?;
    let diag: Vec<C64> = (0..d * d)
        .map(|idx| {
            let (j, k) = (idx / d, idx % d);
            C64::from_polar(1.0, -((j * k) as f64) * theta)
        })
        .collect();
    Ok(ComplexMatrix::from_diagonal(&diag))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Party {
    Alice,
    Bob,
}

/// Which of the two measurement settings a party picked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Choice {
    One,
    Two,
}

impl Choice {
    pub const BOTH: [Choice; 2] = [Choice::One, Choice::Two];

    pub fn index(self) -> usize {
        match self {
            Choice::One => 0,
            Choice::Two => 1,
        }
    }

    pub fn label(self) -> u8 {
        self.index() as u8 + 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MeasurementSetting {
    pub party: Party,
    pub choice: Choice,
}

impl MeasurementSetting {
    pub fn alice(choice: Choice) -> Self {
        Self {
            party: Party::Alice,
            choice,
        }
    }

    pub fn bob(choice: Choice) -> Self {
        Self {
            party: Party::Bob,
            choice,
        }
    }

    /// α₁ = 0, α₂ = 1/2, β₁ = 1/4, β₂ = −1/4.
    pub fn phase(&self) -> f64 {
        match (self.party, self.choice) {
            (Party::Alice, Choice::One) => 0.0,
            (Party::Alice, Choice::Two) => 0.5,
            (Party::Bob, Choice::One) => 0.25,
            (Party::Bob, Choice::Two) => -0.25,
        }
    }
}

/// How the setting phase enters the diagonal factor `e^{iφ(k)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum PhaseConvention {
    /// `φ(k) = phase·k`
    PaperLiteral,
    /// `φ(k) = 2π·phase·k/d`
    #[default]
    FourierScaled,
}

impl fmt::Display for PhaseConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PhaseConvention::PaperLiteral => "paper-literal",
            PhaseConvention::FourierScaled => "fourier-scaled",
        })
    }
}

impl FromStr for PhaseConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "paper-literal" => Ok(PhaseConvention::PaperLiteral),
            "fourier-scaled" => Ok(PhaseConvention::FourierScaled),
            other => Err(format!(
                "unknown convention '{other}' (expected paper-literal or fourier-scaled)"
            )),
        }
    }
}

/// Measurement rotation for one party.
///
/// Alice's rotation has entries `e^{+2πi·jk/d}·e^{iφ(k)}/√d`, Bob's
/// `e^{−2πi·jk/d}·e^{iφ(k)}/√d`. The diagonal phase sits on the column
/// (computational-basis) index. On the row index it would be a pure
/// outcome phase and drop out of every probability.
pub fn measurement_unitary(
    d: usize,
    setting: MeasurementSetting,
    conv: PhaseConvention,
) -> Result<ComplexMatrix, QuditError> {
    check_dim(d)?;
    let sign: i64 = match setting.party {
        Party::Alice => 1,
        Party::Bob => -1,
    };
    let phase = setting.phase();
    let step = match conv {
        PhaseConvention::PaperLiteral => phase,
        PhaseConvention::FourierScaled => TAU * phase / d as f64,
    };
    let norm = 1.0 / (d as f64).sqrt();
    Ok(ComplexMatrix::from_fn(d, d, |j, k| {
        let fourier = root_of_unity(sign * (j * k) as i64, d) * norm;
        if phase == 0.0 {
            fourier
        } else {
            fourier * C64::from_polar(1.0, step * k as f64)
        }
    }))
}

/// Relabeling of Bob's levels used by the reversed-state procedures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Reversal {
    /// `|k⟩ → |d−1−k⟩`
    InRange,
    /// `|k⟩ → |(d−k) mod d⟩`, fixing `|0⟩`.
    Wrapped,
}

impl Reversal {
    pub fn image(self, k: usize, d: usize) -> usize {
        match self {
            Reversal::InRange => d - 1 - k,
            Reversal::Wrapped => (d - k) % d,
        }
    }

    /// Permutation matrix `R` with `R|k⟩ = |image(k)⟩`.
    pub fn matrix(self, d: usize) -> ComplexMatrix {
        let mut r = ComplexMatrix::zeros(d, d);
        for k in 0..d {
            r[(self.image(k, d), k)] = C64::new(1.0, 0.0);
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{is_unitary, StateVector};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn dft2_is_the_qubit_hadamard() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let want = ComplexMatrix::from_real(2, 2, &[s, s, s, -s]).unwrap();
        assert!(dft_hadamard(2).unwrap().max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn dft4_matches_displayed_matrix() {
        let (o, i) = (c(1.0, 0.0), c(0.0, 1.0));
        let want = ComplexMatrix::new(
            4,
            4,
            vec![o, o, o, o, o, i, -o, -i, o, -o, o, -o, o, -i, -o, i],
        )
        .unwrap()
        .scale(c(0.5, 0.0));
        assert!(dft_hadamard(4).unwrap().max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn dft3_entry() {
        let h = dft_hadamard(3).unwrap();
        let want = C64::from_polar(1.0, 4.0 * PI / 3.0) / 3f64.sqrt();
        assert!((h[(1, 2)] - want).norm() < 1e-15);
    }

    #[test]
    fn dft_rejects_small_dimension() {
        assert_eq!(dft_hadamard(1), Err(QuditError::DimensionTooSmall(1)));
        assert_eq!(dft_hadamard(0), Err(QuditError::DimensionTooSmall(0)));
    }

    #[test]
    fn dft_is_unitary() {
        for d in 2..=16 {
            assert!(
                is_unitary(&dft_hadamard(d).unwrap(), 1e-12).unwrap(),
                "d = {d}"
            );
        }
    }

    #[test]
    fn dft_squared_fixes_ground_state() {
        for d in 2..=16 {
            let h = dft_hadamard(d).unwrap();
            let out = StateVector::basis(d, 0)
                .evolve(&h)
                .unwrap()
                .evolve(&h)
                .unwrap();
            assert!(
                (out.amplitudes()[0] - c(1.0, 0.0)).norm() < 1e-12,
                "d = {d}"
            );
            // and |1> goes to |d-1>
            let one = StateVector::basis(d, 1)
                .evolve(&h)
                .unwrap()
                .evolve(&h)
                .unwrap();
            assert!((one.amplitudes()[d - 1].norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn controlled_phase_examples() {
        let want =
            ComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)]);
        assert!(controlled_phase(2, PI).unwrap().max_abs_diff(&want) < 1e-15);

        let cr = controlled_phase(3, 2.0 * PI / 3.0).unwrap();
        let want22 = C64::from_polar(1.0, -2.0 * PI / 3.0);
        assert!((cr[(8, 8)] - want22).norm() < 1e-12);

        for d in 2..=6 {
            let cr = controlled_phase(d, 0.7).unwrap();
            for k in 0..d {
                assert_eq!(cr[(k, k)], c(1.0, 0.0));
            }
            assert!(is_unitary(&cr, 1e-12).unwrap());
        }
        assert!(controlled_phase(1, 0.3).is_err());
    }

    #[test]
    fn alice_first_setting_is_the_dft_exactly() {
        for d in 2..=16 {
            for conv in [
                PhaseConvention::PaperLiteral,
                PhaseConvention::FourierScaled,
            ] {
                let u =
                    measurement_unitary(d, MeasurementSetting::alice(Choice::One), conv).unwrap();
                assert_eq!(u, dft_hadamard(d).unwrap());
            }
        }
    }

    #[test]
    fn bob_first_setting_entry_at_d2() {
        let u = measurement_unitary(
            2,
            MeasurementSetting::bob(Choice::One),
            PhaseConvention::FourierScaled,
        )
        .unwrap();
        let want = -C64::from_polar(1.0, PI / 4.0) / 2f64.sqrt();
        assert!((u[(1, 1)] - want).norm() < 1e-15);
    }

    #[test]
    fn measurement_unitaries_are_unitary() {
        for d in 2..=16 {
            for conv in [
                PhaseConvention::PaperLiteral,
                PhaseConvention::FourierScaled,
            ] {
                for choice in Choice::BOTH {
                    for setting in [
                        MeasurementSetting::alice(choice),
                        MeasurementSetting::bob(choice),
                    ] {
                        let u = measurement_unitary(d, setting, conv).unwrap();
                        assert!(is_unitary(&u, 1e-12).unwrap(), "d={d} {setting:?} {conv}");
                    }
                }
            }
        }
    }

    #[test]
    fn setting_phases() {
        assert_eq!(MeasurementSetting::alice(Choice::One).phase(), 0.0);
        assert_eq!(MeasurementSetting::alice(Choice::Two).phase(), 0.5);
        assert_eq!(MeasurementSetting::bob(Choice::One).phase(), 0.25);
        assert_eq!(MeasurementSetting::bob(Choice::Two).phase(), -0.25);
    }

    #[test]
    fn reversals_are_involutions() {
        for d in 2..=9 {
            for r in [Reversal::InRange, Reversal::Wrapped] {
                for k in 0..d {
                    assert_eq!(r.image(r.image(k, d), d), k);
                }
                let m = r.matrix(d);
                assert!(m.matmul(&m).max_abs_diff(&ComplexMatrix::identity(d)) == 0.0);
            }
        }
        assert_eq!(Reversal::Wrapped.image(0, 5), 0);
        assert_eq!(Reversal::InRange.image(0, 5), 4);
    }

    #[test]
    fn convention_parsing() {
        assert_eq!("fourier-scaled".parse(), Ok(PhaseConvention::FourierScaled));
        assert_eq!("paper-literal".parse(), Ok(PhaseConvention::PaperLiteral));
        assert!("fourier".parse::<PhaseConvention>().is_err());
        assert_eq!(PhaseConvention::default().to_string(), "fourier-scaled");
    }
}
