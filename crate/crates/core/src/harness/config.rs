//! Suite configuration, read from strict JSON (unknown keys are rejected).

use crate::action::ActionConfig;
use crate::algebra::{FourVector, LorentzIndex};
use crate::chain::{ChainSpec, VertexKind, VertexSpec};
use crate::current::{LoopPath, PhotonModeGrid};
use crate::error::{Error, Result};
use crate::fock::FockConfig;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Where `--out` writes when not given on the command line.
    pub output_path: Option<String>,
    /// Per-check tolerance overrides, keyed by check name.
    pub tolerances: BTreeMap<String, f64>,
    pub kinematics: KinematicsConfig,
    pub samples: SampleCounts,
    /// Grid for pairings and photon-number sweeps.
    pub grid: GridConfig,
    /// Grid tabulated by the `current` command.
    pub current_grid: GridConfig,
    /// Loop for currents and photon numbers.
    #[serde(rename = "loop")]
    pub loop_vertices: Vec<[f64; 4]>,
    /// Loop for the classical action; the main loop when absent.
    pub action_loop: Option<Vec<[f64; 4]>>,
    /// Coupling e; only the classical action depends on it (as e²).
    pub charge: f64,
    pub eta_factors: Vec<f64>,
    pub k_min_ladder: Vec<f64>,
    pub fock: FockSettings,
    pub chain: ChainConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KinematicsConfig {
    pub mass: f64,
    /// Range of p⁰ for random charged momenta.
    pub p_energy: [f64; 2],
    /// Bound on each spatial component of p.
    pub p_spatial: f64,
    /// Range of k⁰ for random photon momenta.
    pub k_energy: [f64; 2],
    /// |k⃗| ≤ this·k⁰, so random photons are future-timelike for values < 1.
    pub k_velocity: f64,
    /// Random p are resampled while |p² − m²| < this·m².
    pub min_shell_distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleCounts {
    pub ward: usize,
    pub derivative: usize,
    pub telescoping: usize,
    pub commutativity: usize,
    pub decomposition: usize,
    pub gauge_pairs: usize,
    pub segments: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub k_min: f64,
    pub k_max: f64,
    pub n_radial: usize,
    pub n_angular: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FockSettings {
    pub n_max: usize,
    pub max_dimension: usize,
    pub tolerance: f64,
    /// Indices into the coherent-state amplitude list.
    pub modes: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexKindConfig {
    Quantum,
    Classical,
    PlainGamma,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexConfig {
    pub kind: VertexKindConfig,
    pub momentum: [f64; 4],
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhotonConfig {
    pub momentum: [f64; 4],
    pub index: usize,
}

/// Line used by the `decompose` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChainConfig {
    pub mass: f64,
    pub epsilon: f64,
    pub p: [f64; 4],
    pub vertices: Vec<VertexConfig>,
    /// Classical photons expanded into the Θ-sum.
    pub classical: Vec<PhotonConfig>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            output_path: None,
            tolerances: BTreeMap::new(),
            kinematics: KinematicsConfig::default(),
            samples: SampleCounts::default(),
            grid: GridConfig::default(),
            current_grid: GridConfig {
                k_min: 1e-2,
                k_max: 1.0,
                n_radial: 4,
                n_angular: 4,
            },
            loop_vertices: vec![
                [0.0, 0.0, 0.0, 0.0],
                [1e6, 5e5, 2e5, 0.0],
                [2e6, 1e5, -3e5, 2e5],
            ],
            action_loop: Some(vec![
                [0.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [0.1, 0.3, 0.8, 0.0],
            ]),
            charge: ActionConfig::default().charge,
            eta_factors: ActionConfig::default().eta_factors,
            k_min_ladder: vec![1e-1, 1e-2, 1e-3, 1e-4],
            fock: FockSettings::default(),
            chain: ChainConfig::default(),
        }
    }
}

impl Default for KinematicsConfig {
    fn default() -> Self {
        Self {
            mass: 1.0,
            p_energy: [1.3, 2.5],
            p_spatial: 0.3,
            k_energy: [0.05, 0.5],
            k_velocity: 0.9,
            min_shell_distance: 0.05,
        }
    }
}

impl Default for SampleCounts {
    fn default() -> Self {
        Self {
            ward: 100,
            derivative: 20,
            telescoping: 50,
            commutativity: 20,
            decomposition: 50,
            gauge_pairs: 1000,
            segments: 20,
        }
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            k_min: 1e-3,
            k_max: 1.0,
            n_radial: 32,
            n_angular: 32,
        }
    }
}

impl Default for FockSettings {
    fn default() -> Self {
        let f = FockConfig::default();
        Self {
            n_max: f.n_max,
            max_dimension: f.max_dimension,
            tolerance: f.tolerance,
            modes: vec![0, 1],
        }
    }
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            mass: 1.0,
            epsilon: 0.0,
            p: [1.3, 0.2, -0.1, 0.15],
            vertices: vec![VertexConfig {
                kind: VertexKindConfig::Quantum,
                momentum: [0.3, 0.1, 0.05, -0.1],
                index: 1,
            }],
            classical: Vec::new(),
        }
    }
}

impl SuiteConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SuiteConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Structural checks that do not need any numerics.
    pub fn validate(&self) -> Result<()> {
        for name in self.tolerances.keys() {
            if !super::checks::check_names().contains(&name.as_str()) {
                return Err(Error::Config(format!("unknown check name in tolerances: {name}")));
            }
        }
        if let Some((name, tol)) = self.tolerances.iter().find(|(_, t)| !(t.is_finite() && **t >= 0.0)) {
            return Err(Error::Config(format!("tolerance for {name} must be finite and ≥ 0, got {tol}")));
        }
        let k = &self.kinematics;
        if !(k.mass > 0.0) || !(k.p_energy[0] <= k.p_energy[1]) || !(k.k_energy[0] <= k.k_energy[1]) {
            return Err(Error::Config("kinematic ranges must be ordered and the mass positive".into()));
        }
        if self.k_min_ladder.iter().any(|x| !(*x > 0.0)) {
            return Err(Error::Config("k_min ladder entries must be positive".into()));
        }
        if self.eta_factors.len() < 2 || self.eta_factors.iter().any(|x| !(*x > 0.0)) {
            return Err(Error::Config("need at least two positive eta factors".into()));
        }
        if !self.charge.is_finite() {
            return Err(Error::Config("charge must be finite".into()));
        }
        Ok(())
    }

    pub fn tolerance(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }

    pub fn main_loop(&self) -> Result<LoopPath> {
        LoopPath::new(self.loop_vertices.clone())
    }

    pub fn action_path(&self) -> Result<LoopPath> {
        match &self.action_loop {
            Some(v) => LoopPath::new(v.clone()),
            None => self.main_loop(),
        }
    }

    pub fn action_config(&self) -> ActionConfig {
        ActionConfig {
            charge: self.charge,
            eta_factors: self.eta_factors.clone(),
            ..ActionConfig::default()
        }
    }

    pub fn fock_config(&self) -> FockConfig {
        FockConfig {
            n_max: self.fock.n_max,
            max_dimension: self.fock.max_dimension,
            tolerance: self.fock.tolerance,
        }
    }
}

impl GridConfig {
    pub fn build(&self) -> Result<PhotonModeGrid> {
        PhotonModeGrid::new(self.k_min, self.k_max, self.n_radial, self.n_angular)
    }
}

impl ChainConfig {
    pub fn build(&self) -> Result<ChainSpec> {
        let vertices = self
            .vertices
            .iter()
            .map(|v| {
                let kind = match v.kind {
                    VertexKindConfig::Quantum => VertexKind::Quantum,
                    VertexKindConfig::Classical => VertexKind::Classical,
                    VertexKindConfig::PlainGamma => VertexKind::PlainGamma,
                };
                Ok(VertexSpec::new(kind, FourVector::real(v.momentum), LorentzIndex::new(v.index)?))
            })
            .collect::<Result<Vec<_>>>()?;
        ChainSpec::new(self.mass, self.epsilon, vertices)
    }

    pub fn photons(&self) -> Result<Vec<(FourVector, LorentzIndex)>> {
        self.classical
            .iter()
            .map(|c| Ok((FourVector::real(c.momentum), LorentzIndex::new(c.index)?)))
            .collect()
    }
}
