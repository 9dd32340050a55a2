//! The driven lattice
//!
//! ```text
//! H(z) = -Σ_n T_n (|n⟩⟨n+1| + |n+1⟩⟨n|) + Σ_n (f(z) n + iγ_n) |n⟩⟨n|
//! f(z) = ω0 (l + Σ_i κ_i cos(β_i ω0 z + φ_i))
//! ```
//!
//! Sites are indexed `1..=N` in the gradient term. An open chain carries the
//! bonds `(n, n+1)` for `n < N`; a periodic ring adds the bond `(N, 1)`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::floquet::Beta;
use crate::matrix::ComplexMatrix;

/// One cosine component `κ cos(β ω0 z + φ)` of the gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationTone {
    kappa: f64,
    beta: Beta,
    phi: f64,
}

impl ModulationTone {
    /// A negative amplitude is folded into the phase (`φ → φ + π`).
    pub fn new(kappa: f64, beta: Beta, phi: f64) -> Result<Self> {
        if !kappa.is_finite() || !phi.is_finite() {
            return Err(Error::model("tone amplitude and phase must be finite"));
        }
        let (kappa, phi) = if kappa < 0.0 {
            (-kappa, phi + PI)
        } else {
            (kappa, phi)
        };
        Ok(ModulationTone { kappa, beta, phi })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn beta(&self) -> Beta {
        self.beta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Same tone with a different amplitude.
    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        ModulationTone::new(kappa, self.beta, self.phi)
    }

    /// Amplitude of the tone's contribution to `η`, i.e. `κ/β`.
    pub fn eta_amplitude(&self) -> f64 {
        self.kappa / self.beta.value()
    }
}

/// dc index `l`, base frequency `ω0` and an ordered list of tones.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulationSpec {
    l: i64,
    omega0: f64,
    tones: Vec<ModulationTone>,
}

impl ModulationSpec {
    pub fn new(l: i64, omega0: f64, tones: Vec<ModulationTone>) -> Result<Self> {
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(Error::model(format!("omega0 must be positive and finite, got {omega0}")));
        }
        Ok(ModulationSpec { l, omega0, tones })
    }

    /// `f(z) = ω0 (l + κ cos(ω0 z + φ))`.
    pub fn monochromatic(l: i64, omega0: f64, kappa: f64, phi: f64) -> Result<Self> {
        Self::new(l, omega0, vec![ModulationTone::new(kappa, Beta::unit(), phi)?])
    }

    /// `f(z) = ω0 (l + κ1 cos(ω0 z + φ1) + κ2 cos(β ω0 z + φ2))`.
    pub fn bichromatic(
        l: i64,
        omega0: f64,
        (kappa1, phi1): (f64, f64),
        beta: Beta,
        (kappa2, phi2): (f64, f64),
    ) -> Result<Self> {
        Self::new(
            l,
            omega0,
            vec![
                ModulationTone::new(kappa1, Beta::unit(), phi1)?,
                ModulationTone::new(kappa2, beta, phi2)?,
            ],
        )
    }

    pub fn l(&self) -> i64 {
        self.l
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn tones(&self) -> &[ModulationTone] {
        &self.tones
    }

    /// Copy with the amplitude of tone `index` replaced.
    pub fn with_tone_kappa(&self, index: usize, kappa: f64) -> Result<Self> {
        let mut out = self.clone();
        let tone = out
            .tones
            .get_mut(index)
            .ok_or_else(|| Error::model(format!("modulation has no tone #{index}")))?;
        *tone = tone.with_kappa(kappa)?;
        Ok(out)
    }

    /// Copy with a different base frequency.
    pub fn with_omega0(&self, omega0: f64) -> Result<Self> {
        Self::new(self.l, omega0, self.tones.clone())
    }

    /// `f(z)`.
    pub fn potential_gradient(&self, z: f64) -> f64 {
        let w = self.omega0;
        let ac: f64 = self
            .tones
            .iter()
            .map(|t| t.kappa * (t.beta.value() * w * z + t.phi).cos())
            .sum();
        w * (self.l as f64 + ac)
    }

    /// `η(z) = ∫_0^z f`, in closed form.
    pub fn eta(&self, z: f64) -> f64 {
        let w = self.omega0;
        let ac: f64 = self
            .tones
            .iter()
            .map(|t| t.eta_amplitude() * ((t.beta.value() * w * z + t.phi).sin() - t.phi.sin()))
            .sum();
        self.l as f64 * w * z + ac
    }

    /// Constant `-Σ_i (κ_i/β_i) sin φ_i` contributed to `η` by its lower
    /// integration limit.
    pub fn eta_offset(&self) -> f64 {
        -self.tones.iter().map(|t| t.eta_amplitude() * t.phi.sin()).sum::<f64>()
    }

    /// `2π/ω0`.
    pub fn base_period(&self) -> f64 {
        TAU / self.omega0
    }

    /// Number of base periods in the shortest common period of the dc term
    /// and every tone, or `None` when an irrational tone is present.
    pub fn common_period_multiple(&self) -> Option<u64> {
        let mut lcm = 1u64;
        for tone in &self.tones {
            match tone.beta {
                Beta::Rational(r) => lcm = lcm_u64(lcm, r.q()),
                Beta::Irrational(_) => return None,
            }
        }
        Some(lcm)
    }

    /// Length of the common period, if one exists.
    pub fn common_period(&self) -> Option<f64> {
        self.common_period_multiple()
            .map(|m| m as f64 * self.base_period())
    }

    pub fn is_periodic(&self) -> bool {
        self.common_period_multiple().is_some()
    }
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn lcm_u64(a: u64, b: u64) -> u64 {
    a / gcd_u64(a, b) * b
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    gcd_u64(a, b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

/// Site count, bond tunnelings and balanced gain/loss profile.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSpec {
    tunnelings: Vec<f64>,
    gammas: Vec<f64>,
    boundary: Boundary,
}

impl LatticeSpec {
    /// Validates bond count against the boundary and the gain/loss balance
    /// `|Σγ_n| < 1e-12 · max(1, max|γ_n|)`.
    pub fn new(tunnelings: Vec<f64>, gammas: Vec<f64>, boundary: Boundary) -> Result<Self> {
        let n = gammas.len();
        if n < 2 {
            return Err(Error::model(format!("a lattice needs at least 2 sites, got {n}")));
        }
        let bonds = match boundary {
            Boundary::Open => n - 1,
            Boundary::Periodic => n,
        };
        if tunnelings.len() != bonds {
            return Err(Error::model(format!(
                "{n} sites with {boundary:?} boundary need {bonds} tunnelings, got {}",
                tunnelings.len()
            )));
        }
        if let Some((i, t)) = tunnelings
            .iter()
            .enumerate()
            .find(|(_, t)| !(t.is_finite() && **t > 0.0))
        {
            return Err(Error::model(format!("tunneling T_{} = {t} must be positive", i + 1)));
        }
        if gammas.iter().any(|g| !g.is_finite()) {
            return Err(Error::model("gain/loss values must be finite"));
        }
        let sum: f64 = gammas.iter().sum();
        let scale = gammas.iter().fold(1.0f64, |m, g| m.max(g.abs()));
        if sum.abs() >= 1e-12 * scale {
            return Err(Error::model(format!(
                "gain/loss must be balanced: sum of gammas is {sum:e}, expected 0"
            )));
        }
        Ok(LatticeSpec {
            tunnelings,
            gammas,
            boundary,
        })
    }

    /// Two sites, `γ = (γ, -γ)`.
    pub fn dimer(t: f64, gamma: f64) -> Result<Self> {
        Self::new(vec![t], vec![gamma, -gamma], Boundary::Open)
    }

    /// Three sites with profile `(γ, sγ, -(1+s)γ)`.
    pub fn trimer(t1: f64, t2: f64, s: f64, gamma: f64) -> Result<Self> {
        Self::new(
            vec![t1, t2],
            vec![gamma, s * gamma, -(1.0 + s) * gamma],
            Boundary::Open,
        )
    }

    /// Open chain with uniform `T` and `γ_n = (-1)^n γ`, `n = 1..=N`.
    pub fn alternating(n_sites: usize, t: f64, gamma: f64) -> Result<Self> {
        if n_sites % 2 == 1 {
            return Err(Error::model("alternating gain/loss needs an even number of sites"));
        }
        Self::new(
            vec![t; n_sites.saturating_sub(1)],
            alternating_profile(n_sites, gamma),
            Boundary::Open,
        )
    }

    /// Periodic ring of `2·cells` sites with `T_n = T` (n odd), `cT` (n even)
    /// and `γ_n = (-1)^n γ`.
    pub fn dimerized_ring(cells: usize, t: f64, c: f64, gamma: f64) -> Result<Self> {
        let n = 2 * cells;
        let tunnelings = (1..=n)
            .map(|bond| if bond % 2 == 1 { t } else { c * t })
            .collect();
        Self::new(tunnelings, alternating_profile(n, gamma), Boundary::Periodic)
    }

    pub fn n_sites(&self) -> usize {
        self.gammas.len()
    }

    pub fn tunnelings(&self) -> &[f64] {
        &self.tunnelings
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Copy with every `γ_n` multiplied by `scale`.
    pub fn scaled_gammas(&self, scale: f64) -> Self {
        LatticeSpec {
            tunnelings: self.tunnelings.clone(),
            gammas: self.gammas.iter().map(|g| g * scale).collect(),
            boundary: self.boundary,
        }
    }

    /// Bonds as `(from, to, T)` with zero-based site indices.
    pub fn bonds(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.n_sites();
        self.tunnelings
            .iter()
            .enumerate()
            .map(move |(i, &t)| (i, (i + 1) % n, t))
    }

    /// `H(z)` as a dense matrix.
    pub fn hamiltonian_at(&self, spec: &ModulationSpec, z: f64) -> ComplexMatrix {
        self.hamiltonian_with_gradient(spec.potential_gradient(z))
    }

    /// `H` for a given instantaneous gradient value `f`.
    pub fn hamiltonian_with_gradient(&self, f: f64) -> ComplexMatrix {
        let n = self.n_sites();
        let mut h = ComplexMatrix::zeros(n);
        for (i, &g) in self.gammas.iter().enumerate() {
            h[(i, i)] = Complex64::new(f * (i + 1) as f64, g);
        }
        for (a, b, t) in self.bonds() {
            h[(a, b)] -= t;
            h[(b, a)] -= t;
        }
        h
    }

    /// `out = H ψ` for gradient value `f`, without forming the matrix.
    pub fn apply_hamiltonian(&self, f: f64, psi: &[Complex64], out: &mut [Complex64]) {
        for (i, (o, (&p, &g))) in out.iter_mut().zip(psi.iter().zip(&self.gammas)).enumerate() {
            *o = Complex64::new(f * (i + 1) as f64, g) * p;
        }
        for (a, b, t) in self.bonds() {
            out[a] -= t * psi[b];
            out[b] -= t * psi[a];
        }
    }
}

fn alternating_profile(n: usize, gamma: f64) -> Vec<f64> {
    (1..=n)
        .map(|site| if site % 2 == 0 { gamma } else { -gamma })
        .collect()
}
