//! Configuration-driven scenario runs.
//!
//! A run is described by one JSON document ([`RunConfig`]) and produces one
//! or two CSV tables ([`RunOutput`]). Grid points are evaluated in parallel
//! and collected in grid order, so output is independent of thread count.

mod config;
mod run;

pub use config::{
    parse_config, BetaConfig, CouplingConfig, CouplingMethod, Gammas, InitialState, LatticeConfig,
    ModulationConfig, PropagateConfig, Range, RunConfig, ScanConfig, Scenario, ThresholdConfig,
    ToneConfig, Tolerances, Tunnelings,
};
pub use run::{
    format_f64, run, run_effective_coupling, run_phase_diagram, run_propagate, run_scan_kappa,
    run_spectrum, run_threshold, scan_kappa, PhaseCell, PhaseDiagram, RunOutput, Table,
};
