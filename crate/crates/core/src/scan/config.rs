use std::path::PathBuf;

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::floquet::{self, Beta, EffectiveCoupling};
use crate::lattice::{Boundary, LatticeSpec, ModulationSpec, ModulationTone};
use crate::propagation::{self, StateVector};
use crate::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Spectrum,
    ScanKappa,
    PhaseDiagram,
    Threshold,
    Propagate,
    EffectiveCoupling,
}

/// A complete run description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub lattice: LatticeConfig,
    pub modulation: ModulationConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<ThresholdConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub propagate: Option<PropagateConfig>,
    #[serde(default)]
    pub coupling: CouplingConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub n_sites: usize,
    /// One value per bond, or a single value for every bond.
    pub tunnelings: Tunnelings,
    pub gammas: Gammas,
    #[serde(default = "default_boundary")]
    pub boundary: Boundary,
}

fn default_boundary() -> Boundary {
    Boundary::Open
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Tunnelings {
    Uniform(f64),
    PerBond(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Gammas {
    PerSite(Vec<f64>),
    /// `γ_n = (-1)^n γ`.
    Alternating { alternating: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulationConfig {
    pub l: i64,
    pub omega0: f64,
    #[serde(default)]
    pub tones: Vec<ToneConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToneConfig {
    pub kappa: f64,
    pub beta: BetaConfig,
    #[serde(default)]
    pub phi: f64,
}

/// `{"rational": [p, q]}` or `{"irrational": value}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaConfig {
    Rational([u64; 2]),
    Irrational(f64),
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum TaggedBeta {
    Rational([u64; 2]),
    Irrational(f64),
}

impl<'de> Deserialize<'de> for BetaConfig {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let value = serde_json::Value::deserialize(deserializer)?;
        if value.is_number() {
            return Err(D::Error::custom(format!(
                "missing rationality tag on beta {value}; write {{\"rational\": [p, q]}} or {{\"irrational\": {value}}}"
            )));
        }
        match TaggedBeta::deserialize(value).map_err(D::Error::custom)? {
            TaggedBeta::Rational(pq) => Ok(BetaConfig::Rational(pq)),
            TaggedBeta::Irrational(v) => Ok(BetaConfig::Irrational(v)),
        }
    }
}

impl BetaConfig {
    pub fn to_beta(self) -> Result<Beta> {
        match self {
            BetaConfig::Rational([p, q]) => Beta::rational(p, q),
            BetaConfig::Irrational(v) => Beta::irrational(v),
        }
    }
}

/// Evenly spaced grid with both endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Range {
    pub fn axis(&self) -> Vec<f64> {
        let last = self.points - 1;
        (0..self.points)
            .map(|i| {
                if i == last {
                    self.max
                } else {
                    self.min + (self.max - self.min) * i as f64 / last as f64
                }
            })
            .collect()
    }

    fn validate(&self, path: &str) -> Result<()> {
        if self.points < 2 {
            return Err(config_err(path, format!("needs at least 2 points, got {}", self.points)));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(config_err(
                path,
                format!("needs finite min < max, got [{}, {}]", self.min, self.max),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<Range>,
    /// `γ²/T²` with `T` the first tunneling.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_sq: Option<Range>,
    /// Index of the tone whose `κ` is swept.
    #[serde(default)]
    pub tone: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdConfig {
    pub gamma_max: f64,
    #[serde(default = "default_threshold_tol")]
    pub tol: f64,
}

fn default_threshold_tol() -> f64 {
    1e-9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagateConfig {
    /// Length in base periods `2π/ω0`; exclusive with `z_end`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periods: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_end: Option<f64>,
    #[serde(default = "default_propagation_steps")]
    pub steps_per_period: usize,
    /// Steps between trace rows; one row block per base period by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stride: Option<usize>,
    pub initial: InitialState,
}

fn default_propagation_steps() -> usize {
    propagation::DEFAULT_STEPS_PER_PERIOD
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// One-based site index.
    Site(usize),
    /// `[re, im]` per site.
    Amplitudes(Vec<[f64; 2]>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingMethod {
    /// Closed form where one exists, otherwise the averaging oracle.
    #[default]
    Auto,
    Analytic,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingConfig {
    #[serde(default)]
    pub method: CouplingMethod,
    /// Averaging window in common periods (base periods for irrational
    /// tones, where it is required).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_periods: Option<usize>,
    #[serde(default = "default_coupling_steps")]
    pub steps_per_period: usize,
}

fn default_coupling_steps() -> usize {
    floquet::DEFAULT_STEPS_PER_PERIOD
}

impl Default for CouplingConfig {
    fn default() -> Self {
        CouplingConfig {
            method: CouplingMethod::Auto,
            window_periods: None,
            steps_per_period: default_coupling_steps(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Absolute reality tolerance; the relative default applies when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_im: Option<f64>,
}

fn config_err(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{path}: {msg}"))
}

fn prefixed(path: &str) -> impl Fn(Error) -> Error + '_ {
    move |err| match err {
        Error::Domain(m) | Error::InvalidModel(m) | Error::Config(m) => config_err(path, m),
        other => other,
    }
}

/// Parses and validates a JSON run description.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut de = serde_json::Deserializer::from_str(text);
    let config: RunConfig = serde_path_to_error::deserialize(&mut de).map_err(|err| {
        let path = err.path().to_string();
        let inner = err.into_inner();
        if path == "." {
            Error::Config(inner.to_string())
        } else {
            Error::Config(format!("{path}: {inner}"))
        }
    })?;
    de.end().map_err(|err| Error::Config(err.to_string()))?;
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    /// Pretty JSON that [`parse_config`] reads back to an equal config.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<()> {
        let lattice = self.lattice_spec()?;
        let modulation = self.modulation_spec()?;

        if let Some(tol) = self.tolerances.tol_im {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(config_err("tolerances.tol_im", format!("must be positive, got {tol}")));
            }
        }
        self.validate_coupling(&modulation)?;

        let needs_scan = |field: &str| config_err("scan", format!("scenario needs scan.{field}"));
        match self.scenario {
            Scenario::Spectrum | Scenario::EffectiveCoupling => {}
            Scenario::ScanKappa => {
                let scan = self.scan.as_ref().ok_or_else(|| needs_scan("kappa"))?;
                scan.kappa.ok_or_else(|| needs_scan("kappa"))?.validate("scan.kappa")?;
                self.check_tone_index(scan.tone)?;
            }
            Scenario::PhaseDiagram => {
                let scan = self.scan.as_ref().ok_or_else(|| needs_scan("kappa"))?;
                scan.kappa.ok_or_else(|| needs_scan("kappa"))?.validate("scan.kappa")?;
                let gamma_sq = scan.gamma_sq.ok_or_else(|| needs_scan("gamma_sq"))?;
                gamma_sq.validate("scan.gamma_sq")?;
                if gamma_sq.min < 0.0 {
                    return Err(config_err("scan.gamma_sq", "min must be non-negative"));
                }
                self.check_tone_index(scan.tone)?;
                gain_loss_reference(&lattice)?;
            }
            Scenario::Threshold => {
                let t = self
                    .threshold
                    .as_ref()
                    .ok_or_else(|| config_err("threshold", "scenario needs a threshold section"))?;
                if !(t.gamma_max.is_finite() && t.gamma_max > 0.0) {
                    return Err(config_err("threshold.gamma_max", "must be positive"));
                }
                if !(t.tol.is_finite() && t.tol > 0.0) {
                    return Err(config_err("threshold.tol", "must be positive"));
                }
                gain_loss_reference(&lattice)?;
            }
            Scenario::Propagate => {
                let p = self
                    .propagate
                    .as_ref()
                    .ok_or_else(|| config_err("propagate", "scenario needs a propagate section"))?;
                p.z_end(&modulation)?;
                p.steps(&modulation)?;
                p.initial_state(lattice.n_sites())?;
                if p.stride == Some(0) {
                    return Err(config_err("propagate.stride", "must be at least 1"));
                }
            }
        }
        Ok(())
    }

    fn check_tone_index(&self, tone: usize) -> Result<()> {
        let n = self.modulation.tones.len();
        if tone >= n {
            return Err(config_err(
                "scan.tone",
                format!("index {tone} out of range for {n} modulation tone(s)"),
            ));
        }
        Ok(())
    }

    fn validate_coupling(&self, modulation: &ModulationSpec) -> Result<()> {
        let c = &self.coupling;
        if c.window_periods == Some(0) {
            return Err(config_err("coupling.window_periods", "must be at least 1"));
        }
        if c.steps_per_period < 2 {
            return Err(config_err("coupling.steps_per_period", "must be at least 2"));
        }
        let analytic = floquet::analytic_coupling(modulation).is_ok();
        let numeric = modulation.is_periodic() || c.window_periods.is_some();
        match c.method {
            CouplingMethod::Analytic if !analytic => Err(config_err(
                "coupling.method",
                "no closed-form coupling for this tone list; use \"numeric\"",
            )),
            CouplingMethod::Numeric | CouplingMethod::Auto if !numeric && !analytic => Err(config_err(
                "coupling.window_periods",
                "required for averaging a quasi-periodic gradient",
            )),
            CouplingMethod::Numeric if !numeric => Err(config_err(
                "coupling.window_periods",
                "required for averaging a quasi-periodic gradient",
            )),
            _ => Ok(()),
        }
    }

    pub fn lattice_spec(&self) -> Result<LatticeSpec> {
        let l = &self.lattice;
        let n = l.n_sites;
        if n < 2 {
            return Err(config_err("lattice.n_sites", format!("needs at least 2 sites, got {n}")));
        }
        let bonds = match l.boundary {
            Boundary::Open => n - 1,
            Boundary::Periodic => n,
        };
        let tunnelings = match &l.tunnelings {
            Tunnelings::Uniform(t) => vec![*t; bonds],
            Tunnelings::PerBond(ts) if ts.len() == bonds => ts.clone(),
            Tunnelings::PerBond(ts) => {
                return Err(config_err(
                    "lattice.tunnelings",
                    format!("{} values for {bonds} bonds", ts.len()),
                ))
            }
        };
        let gammas = match &l.gammas {
            Gammas::PerSite(gs) if gs.len() == n => gs.clone(),
            Gammas::PerSite(gs) => {
                return Err(config_err(
                    "lattice.gammas",
                    format!("{} values for n_sites = {n}", gs.len()),
                ))
            }
            Gammas::Alternating { alternating } => {
                if n % 2 == 1 {
                    return Err(config_err(
                        "lattice.gammas",
                        "an alternating profile needs an even number of sites to be balanced",
                    ));
                }
                (1..=n)
                    .map(|i| if i % 2 == 0 { *alternating } else { -alternating })
                    .collect()
            }
        };
        if let Some((i, t)) = tunnelings.iter().enumerate().find(|(_, t)| !(t.is_finite() && **t > 0.0)) {
            return Err(config_err(
                &format!("lattice.tunnelings[{i}]"),
                format!("must be positive, got {t}"),
            ));
        }
        LatticeSpec::new(tunnelings, gammas, l.boundary).map_err(prefixed("lattice.gammas"))
    }

    pub fn modulation_spec(&self) -> Result<ModulationSpec> {
        let m = &self.modulation;
        let tones = m
            .tones
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let path = format!("modulation.tones[{i}]");
                let beta = t.beta.to_beta().map_err(prefixed(&format!("{path}.beta")))?;
                ModulationTone::new(t.kappa, beta, t.phi).map_err(prefixed(&path))
            })
            .collect::<Result<Vec<_>>>()?;
        ModulationSpec::new(m.l, m.omega0, tones).map_err(prefixed("modulation"))
    }

    /// Effective coupling for `spec` according to the `coupling` section.
    pub fn coupling_for(&self, spec: &ModulationSpec) -> Result<EffectiveCoupling> {
        let c = &self.coupling;
        let numeric = || -> Result<EffectiveCoupling> {
            let window = c.window_periods.unwrap_or(1);
            Ok(floquet::effective_coupling_numeric(spec, window, c.steps_per_period)?.normalized)
        };
        match c.method {
            CouplingMethod::Analytic => floquet::analytic_coupling(spec),
            CouplingMethod::Numeric => numeric(),
            CouplingMethod::Auto => floquet::analytic_coupling(spec).or_else(|_| numeric()),
        }
    }
}

impl PropagateConfig {
    pub fn z_end(&self, spec: &ModulationSpec) -> Result<f64> {
        let z = match (self.periods, self.z_end) {
            (Some(p), None) => p * spec.base_period(),
            (None, Some(z)) => z,
            _ => return Err(config_err("propagate", "set exactly one of periods and z_end")),
        };
        if !(z.is_finite() && z > 0.0) {
            return Err(config_err("propagate", format!("propagation length must be positive, got {z}")));
        }
        Ok(z)
    }

    pub fn steps(&self, spec: &ModulationSpec) -> Result<usize> {
        if self.steps_per_period < propagation::MIN_STEPS_PER_PERIOD {
            return Err(config_err(
                "propagate.steps_per_period",
                format!("must be at least {}", propagation::MIN_STEPS_PER_PERIOD),
            ));
        }
        let periods = self.z_end(spec)? / spec.base_period();
        Ok(((periods * self.steps_per_period as f64).ceil() as usize).max(1))
    }

    pub fn stride(&self) -> usize {
        self.stride.unwrap_or(self.steps_per_period)
    }

    pub fn initial_state(&self, n_sites: usize) -> Result<StateVector> {
        match &self.initial {
            InitialState::Site(site) => {
                if *site == 0 || *site > n_sites {
                    return Err(config_err(
                        "propagate.initial.site",
                        format!("site {site} outside 1..={n_sites}"),
                    ));
                }
                StateVector::localized(n_sites, site - 1)
            }
            InitialState::Amplitudes(a) => {
                if a.len() != n_sites {
                    return Err(config_err(
                        "propagate.initial.amplitudes",
                        format!("{} values for n_sites = {n_sites}", a.len()),
                    ));
                }
                let amplitudes = a.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
                StateVector::new(amplitudes, 0.0).map_err(prefixed("propagate.initial.amplitudes"))
            }
        }
    }
}

/// Magnitude of the first nonzero gain/loss entry; swept `γ` values scale
/// the profile so that this entry has magnitude `γ`.
pub(crate) fn gain_loss_reference(lattice: &LatticeSpec) -> Result<f64> {
    lattice
        .gammas()
        .iter()
        .map(|g| g.abs())
        .find(|g| *g > 0.0)
        .ok_or_else(|| config_err("lattice.gammas", "all zero; a gain/loss sweep needs a nonzero profile"))
}
