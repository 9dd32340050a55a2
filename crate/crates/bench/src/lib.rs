//! Shared workloads for the benchmarks.

use ptlab_core::floquet::{build_effective_hamiltonian, effective_coupling_monochromatic};
use ptlab_core::scan::{parse_config, RunConfig};
use ptlab_core::{ComplexMatrix, LatticeSpec};

/// Effective Hamiltonian of an `n`-site alternating chain at `κ`.
pub fn alternating_chain(n: usize, kappa: f64, gamma: f64) -> ComplexMatrix {
    let lattice = LatticeSpec::alternating(n, 1.0, gamma).expect("even site count");
    let coupling = effective_coupling_monochromatic(1, kappa, 0.0).expect("finite kappa");
    build_effective_hamiltonian(&lattice, coupling)
}

/// 16-site κ scan with `points` grid points.
pub fn kappa_scan(points: usize) -> RunConfig {
    parse_config(&format!(
        r#"{{
            "scenario": "scan_kappa",
            "lattice": {{"n_sites": 16, "tunnelings": 1.0, "gammas": {{"alternating": 0.1}}}},
            "modulation": {{"l": 1, "omega0": 1.0, "tones": [{{"kappa": 0.0, "beta": {{"rational": [1, 1]}}}}]}},
            "scan": {{"kappa": {{"min": 0.0, "max": 4.0, "points": {points}}}}}
        }}"#
    ))
    .expect("valid scan config")
}

/// Dimer phase diagram on a `points × points` grid.
pub fn dimer_phase_diagram(points: usize) -> RunConfig {
    parse_config(&format!(
        r#"{{
            "scenario": "phase_diagram",
            "lattice": {{"n_sites": 2, "tunnelings": [1.0], "gammas": [1.0, -1.0]}},
            "modulation": {{"l": 1, "omega0": 1.0, "tones": [{{"kappa": 0.0, "beta": {{"rational": [1, 1]}}}}]}},
            "scan": {{
                "kappa": {{"min": 0.0, "max": 4.0, "points": {points}}},
                "gamma_sq": {{"min": 0.0, "max": 0.4, "points": {points}}}
            }}
        }}"#
    ))
    .expect("valid phase diagram config")
}
