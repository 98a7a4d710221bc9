//! The four subcommands. Each builds a [`Table`] and reports whether the
//! run counts as a success for the exit status.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use qudit_bell::circuit::{self, GateCounts};
use qudit_bell::thresholds::{self, ThresholdQuery};
use qudit_bell::{run_experiment, NoiseSpec};

use crate::config::{SweepConfig, VerifyConfig};
use crate::output::{Cell, Table};
use crate::CliError;

/// Deviation allowed by `verify-measurement`.
pub const MAPPING_TOLERANCE: f64 = 1e-9;

pub const BELL_COLUMNS: [&str; 8] = [
    "d",
    "noise",
    "p",
    "n_applied",
    "I_d",
    "zg_value",
    "cglmp_violated",
    "zg_violated",
];

pub const THRESHOLD_COLUMNS: [&str; 8] = [
    "d",
    "noise",
    "policy",
    "inequality",
    "p_min",
    "converged",
    "evaluations",
    "status",
];

pub const FIT_COLUMNS: [&str; 5] = ["d", "computed", "fit", "relative_error", "within_tolerance"];

pub const VERIFY_COLUMNS: [&str; 8] = [
    "qubits",
    "trials",
    "max_overlap_deviation",
    "max_readout_deviation",
    "hadamards",
    "qubit_resonator",
    "qubit_qubit",
    "passed",
];

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub table: Table,
    pub success: bool,
}

/// Maps `f` over `cells`, on a pool of `jobs` workers when `jobs > 1`.
/// Results come back in input order either way.
fn evaluate<T, R, F>(cells: &[T], jobs: usize, f: F) -> Result<Vec<R>, CliError>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    if jobs <= 1 {
        return Ok(cells.iter().map(f).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Compute(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| cells.par_iter().map(f).collect()))
}

/// Cells in output order: d outer, then noise, p, and policy innermost.
pub fn bell_cells(config: &SweepConfig) -> Result<Vec<(usize, NoiseSpec)>, CliError> {
    let mut cells = Vec::new();
    for d in config.dimensions() {
        for &kind in &config.noise {
            for &p in &config.p {
                for &policy in &config.iterations {
                    let spec = NoiseSpec::new(kind, p, policy)
                        .map_err(|e| CliError::Compute(e.to_string()))?;
                    cells.push((d, spec));
                }
            }
        }
    }
    Ok(cells)
}

pub fn cmd_bell_sweep(config: &SweepConfig) -> Result<Outcome, CliError> {
    let cells = bell_cells(config)?;
    let protocol = config.protocol;
    let results = evaluate(&cells, config.jobs, |(d, spec)| {
        run_experiment(*d, spec, &protocol)
    })?;
    let mut table = Table::new(BELL_COLUMNS.to_vec());
    for result in results {
        let r = result.map_err(|e| CliError::Compute(e.to_string()))?;
        table.push(vec![
            r.d.into(),
            r.noise.kind.to_string().into(),
            r.noise.p.into(),
            r.n_applied.into(),
            r.i_d.into(),
            r.zg_value.into(),
            r.cglmp_violated.into(),
            r.zg_violated.into(),
        ]);
    }
    Ok(Outcome {
        table,
        success: true,
    })
}

pub fn threshold_queries(config: &SweepConfig) -> Vec<ThresholdQuery> {
    let mut queries = Vec::new();
    for d in config.dimensions() {
        for &kind in &config.noise {
            for &policy in &config.iterations {
                for &inequality in config.inequality.inequalities() {
                    queries.push(ThresholdQuery {
                        d,
                        kind,
                        policy,
                        inequality,
                        protocol: config.protocol,
                        tolerance: config.tolerance,
                    });
                }
            }
        }
    }
    queries
}

pub fn cmd_threshold_sweep(config: &SweepConfig) -> Result<Outcome, CliError> {
    let queries = threshold_queries(config);
    let results = evaluate(&queries, config.jobs, thresholds::find_threshold)?;
    let mut table = Table::new(THRESHOLD_COLUMNS.to_vec());
    let mut any_ok = false;
    for (q, result) in queries.iter().zip(results) {
        let mut row: Vec<Cell> = vec![
            q.d.into(),
            q.kind.to_string().into(),
            q.policy.to_string().into(),
            q.inequality.to_string().into(),
        ];
        match result {
            Ok(r) => {
                any_ok = true;
                row.extend([
                    r.p_min.into(),
                    r.converged.into(),
                    r.evaluations.into(),
                    "ok".to_string().into(),
                ]);
            }
            Err(e) => row.extend([
                Cell::Missing,
                false.into(),
                Cell::Missing,
                e.to_string().into(),
            ]),
        }
        table.push(row);
    }
    Ok(Outcome {
        table,
        success: any_ok,
    })
}

pub fn cmd_fit_check(d_max: usize) -> Result<Outcome, CliError> {
    let rows = thresholds::fit_check(2..=d_max).map_err(|e| CliError::Compute(e.to_string()))?;
    let mut table = Table::new(FIT_COLUMNS.to_vec());
    for r in &rows {
        table.push(vec![
            r.d.into(),
            r.computed.into(),
            r.fit.into(),
            r.relative_error.into(),
            r.within_tolerance.into(),
        ]);
    }
    Ok(Outcome {
        table,
        success: rows.iter().all(|r| r.within_tolerance),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MappingReport {
    pub max_overlap_deviation: f64,
    pub max_readout_deviation: f64,
    pub counts: GateCounts,
}

/// Seeded random resonator states pushed through the readout circuit.
pub fn verify_mapping(config: &VerifyConfig) -> Result<MappingReport, CliError> {
    let compute = |e: qudit_bell::CircuitError| CliError::Compute(e.to_string());
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut max_overlap_deviation: f64 = 0.0;
    let mut max_readout_deviation: f64 = 0.0;
    for _ in 0..config.trials {
        let c = circuit::random_resonator_state(config.qubits, &mut rng).map_err(compute)?;
        let got = circuit::map_resonator_to_qubits(&c).map_err(compute)?;
        let want = circuit::ideal_mapping(&c).map_err(compute)?;
        max_overlap_deviation = max_overlap_deviation.max(1.0 - got.overlap(&want).norm());
        for (p, amp) in circuit::readout_distribution(&got)
            .iter()
            .zip(c.amplitudes())
        {
            max_readout_deviation = max_readout_deviation.max((p - amp.norm_sqr()).abs());
        }
    }
    let counts = GateCounts::of(&circuit::build_circuit(config.qubits).map_err(compute)?);
    Ok(MappingReport {
        max_overlap_deviation,
        max_readout_deviation,
        counts,
    })
}

pub fn cmd_verify_measurement(config: &VerifyConfig) -> Result<Outcome, CliError> {
    let report = verify_mapping(config)?;
    let passed = report.max_overlap_deviation <= MAPPING_TOLERANCE
        && report.max_readout_deviation <= MAPPING_TOLERANCE
        && report.counts == GateCounts::expected(config.qubits);
    let mut table = Table::new(VERIFY_COLUMNS.to_vec());
    table.push(vec![
        config.qubits.into(),
        config.trials.into(),
        report.max_overlap_deviation.into(),
        report.max_readout_deviation.into(),
        report.counts.hadamards.into(),
        report.counts.qubit_resonator.into(),
        report.counts.qubit_qubit.into(),
        passed.into(),
    ]);
    Ok(Outcome {
        table,
        success: passed,
    })
}
