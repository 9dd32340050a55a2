use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::floquet::{self, Beta, EffectiveCoupling};
use crate::lattice::{LatticeSpec, ModulationSpec};
use crate::propagation::{self, Propagated, StateVector};
use crate::spectra::{self, eigen, SpectrumResult, ThresholdStatus};

use super::config::{gain_loss_reference, RunConfig, Scenario};

/// Shortest round-trip decimal form.
pub fn format_f64(x: f64) -> String {
    ryu::Buffer::new().format(x).to_owned()
}

/// A CSV table held in memory until written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn header(&self) -> &[&'static str] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    /// Index of a header column.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| *h == name)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row).map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }
}

/// Tables produced by one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub table: Table,
    /// Per-point summary, written next to the main table.
    pub summary: Option<Table>,
    /// Propagation stopped on runaway growth.
    pub overflow: bool,
}

impl RunOutput {
    fn single(table: Table) -> Self {
        RunOutput {
            table,
            summary: None,
            overflow: false,
        }
    }
}

/// Runs the configured scenario.
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    match config.scenario {
        Scenario::Spectrum => run_spectrum(config),
        Scenario::ScanKappa => run_scan_kappa(config),
        Scenario::PhaseDiagram => Ok(RunOutput::single(run_phase_diagram(config)?.to_table())),
        Scenario::Threshold => run_threshold(config),
        Scenario::Propagate => run_propagate(config),
        Scenario::EffectiveCoupling => run_effective_coupling(config),
    }
}

fn spectrum_of(config: &RunConfig, lattice: &LatticeSpec, coupling: EffectiveCoupling) -> Result<SpectrumResult> {
    let h = floquet::build_effective_hamiltonian(lattice, coupling);
    Ok(SpectrumResult::new(eigen::eigenvalues(&h)?, config.tolerances.tol_im))
}

fn bool_str(b: bool) -> String {
    b.to_string()
}

pub fn run_spectrum(config: &RunConfig) -> Result<RunOutput> {
    let lattice = config.lattice_spec()?;
    let coupling = config.coupling_for(&config.modulation_spec()?)?;
    let s = spectrum_of(config, &lattice, coupling)?;

    let mut table = Table::new(&["eig_index", "re_E", "im_E"]);
    for (i, e) in s.eigenvalues().iter().enumerate() {
        table.push(vec![i.to_string(), format_f64(e.re), format_f64(e.im)]);
    }
    let mut summary = Table::new(&["coupling_re", "coupling_im", "max_abs_imag", "tol_im", "is_real"]);
    summary.push(vec![
        format_f64(coupling.value().re),
        format_f64(coupling.value().im),
        format_f64(s.max_abs_imag()),
        format_f64(s.tol_im()),
        bool_str(s.is_real()),
    ]);
    Ok(RunOutput {
        table,
        summary: Some(summary),
        overflow: false,
    })
}

/// One spectrum per `κ` on the scan grid, in grid order.
pub fn scan_kappa(config: &RunConfig) -> Result<Vec<(f64, SpectrumResult)>> {
    config.validate()?;
    let scan = config.scan.as_ref().expect("validated");
    let axis = scan.kappa.expect("validated").axis();
    let lattice = config.lattice_spec()?;
    let base = config.modulation_spec()?;
    axis.into_par_iter()
        .map(|kappa| {
            let spec = base.with_tone_kappa(scan.tone, kappa)?;
            let coupling = config.coupling_for(&spec)?;
            Ok((kappa, spectrum_of(config, &lattice, coupling)?))
        })
        .collect()
}

pub fn run_scan_kappa(config: &RunConfig) -> Result<RunOutput> {
    let points = scan_kappa(config)?;
    let mut table = Table::new(&["kappa", "eig_index", "re_E", "im_E"]);
    let mut summary = Table::new(&["kappa", "max_abs_imag", "is_real"]);
    for (kappa, s) in &points {
        let k = format_f64(*kappa);
        for (i, e) in s.eigenvalues().iter().enumerate() {
            table.push(vec![k.clone(), i.to_string(), format_f64(e.re), format_f64(e.im)]);
        }
        summary.push(vec![k, format_f64(s.max_abs_imag()), bool_str(s.is_real())]);
    }
    Ok(RunOutput {
        table,
        summary: Some(summary),
        overflow: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseCell {
    pub max_abs_imag: f64,
    pub is_real: bool,
}

/// Reality classification on a `κ × γ²/T²` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDiagram {
    pub kappa_axis: Vec<f64>,
    pub gamma_sq_axis: Vec<f64>,
    /// `cells[i][j]` is at `(kappa_axis[i], gamma_sq_axis[j])`.
    pub cells: Vec<Vec<PhaseCell>>,
}

impl PhaseDiagram {
    /// Long-format rows `(kappa, gamma_sq_over_T_sq, max_abs_imag, is_real)`.
    pub fn to_table(&self) -> Table {
        let mut table = Table::new(&["kappa", "gamma_sq_over_T_sq", "max_abs_imag", "is_real"]);
        for (kappa, column) in self.kappa_axis.iter().zip(&self.cells) {
            let k = format_f64(*kappa);
            for (g, cell) in self.gamma_sq_axis.iter().zip(column) {
                table.push(vec![
                    k.clone(),
                    format_f64(*g),
                    format_f64(cell.max_abs_imag),
                    bool_str(cell.is_real),
                ]);
            }
        }
        table
    }

    /// Largest real `γ²/T²` before the first complex cell of column `i`,
    /// with the first complex one; `None` for the latter if the column is
    /// real throughout.
    pub fn boundary(&self, i: usize) -> (Option<f64>, Option<f64>) {
        let column = &self.cells[i];
        match column.iter().position(|c| !c.is_real) {
            None => (self.gamma_sq_axis.last().copied(), None),
            Some(0) => (None, Some(self.gamma_sq_axis[0])),
            Some(j) => (Some(self.gamma_sq_axis[j - 1]), Some(self.gamma_sq_axis[j])),
        }
    }
}

pub fn run_phase_diagram(config: &RunConfig) -> Result<PhaseDiagram> {
    config.validate()?;
    let scan = config.scan.as_ref().expect("validated");
    let kappa_axis = scan.kappa.expect("validated").axis();
    let gamma_sq_axis = scan.gamma_sq.expect("validated").axis();
    let lattice = config.lattice_spec()?;
    let profile = lattice.scaled_gammas(1.0 / gain_loss_reference(&lattice)?);
    let t = lattice.tunnelings()[0];
    let base = config.modulation_spec()?;

    let cells = kappa_axis
        .par_iter()
        .map(|&kappa| {
            let coupling = config.coupling_for(&base.with_tone_kappa(scan.tone, kappa)?)?;
            gamma_sq_axis
                .iter()
                .map(|&g2| {
                    let s = spectrum_of(config, &profile.scaled_gammas(g2.sqrt() * t), coupling)?;
                    Ok(PhaseCell {
                        max_abs_imag: s.max_abs_imag(),
                        is_real: s.is_real(),
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PhaseDiagram {
        kappa_axis,
        gamma_sq_axis,
        cells,
    })
}

fn join_tones<F: Fn(&crate::ModulationTone) -> String>(spec: &ModulationSpec, f: F) -> String {
    spec.tones().iter().map(f).collect::<Vec<_>>().join(";")
}

fn beta_str(beta: Beta) -> String {
    match beta {
        Beta::Rational(r) => format!("{}/{}", r.p(), r.q()),
        Beta::Irrational(v) => format_f64(v),
    }
}

pub fn run_threshold(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let t = config.threshold.as_ref().expect("validated");
    let lattice = config.lattice_spec()?;
    let profile = lattice.scaled_gammas(1.0 / gain_loss_reference(&lattice)?);
    let spec = config.modulation_spec()?;
    let coupling = config.coupling_for(&spec)?;
    let family = |g: f64| Ok(floquet::build_effective_hamiltonian(&profile.scaled_gammas(g), coupling));
    let r = spectra::pt_threshold(family, t.gamma_max, t.tol)?;

    let mut table = Table::new(&[
        "n_sites",
        "boundary",
        "l",
        "omega0",
        "kappas",
        "betas",
        "phis",
        "coupling_re",
        "coupling_im",
        "gamma_max",
        "tol",
        "gamma_star",
        "status",
        "reentrant",
    ]);
    let (gamma_star, status) = match r.status {
        ThresholdStatus::Broken => (format_f64(r.gamma_star), "broken"),
        ThresholdStatus::BrokenAtZero => (format_f64(r.gamma_star), "broken_at_zero"),
        ThresholdStatus::Unbroken => ("unbroken".to_owned(), "unbroken"),
    };
    table.push(vec![
        lattice.n_sites().to_string(),
        format!("{:?}", lattice.boundary()).to_lowercase(),
        spec.l().to_string(),
        format_f64(spec.omega0()),
        join_tones(&spec, |t| format_f64(t.kappa())),
        join_tones(&spec, |t| beta_str(t.beta())),
        join_tones(&spec, |t| format_f64(t.phi())),
        format_f64(coupling.value().re),
        format_f64(coupling.value().im),
        format_f64(t.gamma_max),
        format_f64(t.tol),
        gamma_star,
        status.to_owned(),
        bool_str(r.reentrant),
    ]);
    Ok(RunOutput::single(table))
}

pub fn run_propagate(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let p = config.propagate.as_ref().expect("validated");
    let lattice = config.lattice_spec()?;
    let spec = config.modulation_spec()?;
    let psi0 = p.initial_state(lattice.n_sites())?;
    let z_end = p.z_end(&spec)?;
    let steps = p.steps(&spec)?;

    let mut trace: Vec<StateVector> = Vec::new();
    let outcome = propagation::propagate_observed(&lattice, &spec, &psi0, z_end, steps, p.stride(), |s| {
        trace.push(s.clone())
    })?;

    let mut table = Table::new(&["z", "site", "re_psi", "im_psi", "power", "status"]);
    let mut push = |s: &StateVector, status: &str| {
        let z = format_f64(s.z);
        let power = format_f64(s.power());
        for (i, a) in s.amplitudes.iter().enumerate() {
            table.push(vec![
                z.clone(),
                (i + 1).to_string(),
                format_f64(a.re),
                format_f64(a.im),
                power.clone(),
                status.to_owned(),
            ]);
        }
    };
    let overflow = outcome.is_overflow();
    let completed_len = if overflow { trace.len() } else { trace.len() - 1 };
    for s in &trace[..completed_len] {
        push(s, "trace");
    }
    match &outcome {
        Propagated::Completed(s) => push(s, "final"),
        Propagated::Overflow(s) => push(s, "overflow"),
    }
    Ok(RunOutput {
        table,
        summary: None,
        overflow,
    })
}

pub fn run_effective_coupling(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let spec = config.modulation_spec()?;
    let mut table = Table::new(&["method", "re_T", "im_T", "magnitude", "peierls_phase", "window"]);
    let mut push = |method: &str, c: EffectiveCoupling, window: String| {
        table.push(vec![
            method.to_owned(),
            format_f64(c.value().re),
            format_f64(c.value().im),
            format_f64(c.magnitude()),
            format_f64(c.peierls_phase()),
            window,
        ]);
    };
    if let Ok(c) = floquet::analytic_coupling(&spec) {
        push("analytic", c, String::new());
    }
    let c = &config.coupling;
    if spec.is_periodic() || c.window_periods.is_some() {
        let n = floquet::effective_coupling_numeric(&spec, c.window_periods.unwrap_or(1), c.steps_per_period)?;
        push("numeric", n.normalized, format_f64(n.window));
        push("numeric_raw", n.raw, format_f64(n.window));
    }
    Ok(RunOutput::single(table))
}
