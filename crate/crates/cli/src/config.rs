//! Experiment configuration: JSON schema, defaults and load-time validation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use wfl_core::io::ProfileSpec;
use wfl_core::{
    BristleModel, FrictionCoefficients, IntegratorConfig, LimitSystem, LoadingProgram,
    SurfaceProfile, SweepSetup,
};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_profile")]
    pub profile: ProfileSpec,
    #[serde(default = "default_model")]
    pub model: BristleModel,
    #[serde(default)]
    pub loading: LoadingSpec,
    #[serde(default)]
    pub simulation: SimulationSpec,
    #[serde(default)]
    pub angles: Option<AngleGrid>,
    #[serde(default)]
    pub nap: NapSpec,
    #[serde(default)]
    pub k_table: KTableSpec,
    #[serde(default)]
    pub perceived: PerceivedSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty config uses defaults")
    }
}

fn default_profile() -> ProfileSpec {
    ProfileSpec::Sinusoid {
        amplitude: None,
        slope: Some(0.1),
    }
}

fn default_model() -> BristleModel {
    BristleModel::Vertical {
        k: 1.0,
        rest_length: 2.0,
        height: 1.0,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadingSpec {
    pub k_h: f64,
    #[serde(rename = "L_h_rest", default)]
    pub rest_length: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub program: LoadingProgram,
}

impl Default for LoadingSpec {
    fn default() -> Self {
        LoadingSpec {
            k_h: 1.0,
            rest_length: 0.0,
            horizon: 2.0,
            program: LoadingProgram::Ramp {
                offset: 0.0,
                rate: 1.0,
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationSpec {
    pub gamma: f64,
    pub epsilons: Vec<f64>,
    pub z0: f64,
    pub tolerances: Tolerances,
    pub grid_intervals: usize,
    /// Dissipation windows `[t1, t2]`; the whole horizon when absent.
    pub windows: Option<Vec<[f64; 2]>>,
}

impl Default for SimulationSpec {
    fn default() -> Self {
        SimulationSpec {
            gamma: 1.0,
            epsilons: vec![0.1, 0.05, 0.02, 0.01, 0.005],
            z0: 0.0,
            tolerances: Tolerances::default(),
            grid_intervals: wfl_core::limit::DEFAULT_GRID_INTERVALS,
            windows: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
    pub max_step: Option<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        let d = IntegratorConfig::default();
        Tolerances {
            rel: d.rtol,
            abs: d.atol,
            max_step: d.max_step,
        }
    }
}

/// `count` equispaced angles on the closed interval `[from, to]`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AngleGrid {
    pub from: f64,
    pub to: f64,
    pub count: usize,
}

impl AngleGrid {
    pub fn points(&self) -> Vec<f64> {
        linspace(self.from, self.to, self.count)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NapSpec {
    /// Rest angles for motion with the nap; `count` points on `[0, θ_lim)` when absent.
    pub theta_with: Option<Vec<f64>>,
    pub count: usize,
}

impl Default for NapSpec {
    fn default() -> Self {
        NapSpec {
            theta_with: None,
            count: 8,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KTableSpec {
    /// ξ range; `[2ρ-, 2ρ+]` when absent.
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub count: usize,
}

impl Default for KTableSpec {
    fn default() -> Self {
        KTableSpec {
            from: None,
            to: None,
            count: 201,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PerceivedSpec {
    pub points: usize,
}

impl Default for PerceivedSpec {
    fn default() -> Self {
        PerceivedSpec { points: 512 }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
    pub svg: bool,
}

pub fn linspace(from: f64, to: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![from],
        n => (0..n)
            .map(|i| {
                if i == n - 1 {
                    to
                } else {
                    from + (to - from) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// A configuration that passed every load-time check.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub profile: SurfaceProfile,
    pub coefficients: FrictionCoefficients,
    pub base: LimitSystem,
}

impl Experiment {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let config = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
            None => ExperimentConfig::default(),
        };
        Self::from_config(config)
    }

    pub fn from_config(config: ExperimentConfig) -> Result<Self, CliError> {
        let profile = config.profile.build().map_err(CliError::config)?;
        let coefficients = config
            .model
            .coefficients(&profile)
            .map_err(CliError::config)?;
        let l = &config.loading;
        let base = LimitSystem::spring(
            l.k_h,
            l.rest_length,
            l.program.clone(),
            l.horizon,
            coefficients.rho_plus,
            coefficients.rho_minus,
        )
        .map_err(CliError::config)?;
        let s = &config.simulation;
        if !(s.gamma > 0.0) {
            return Err(CliError::Config(format!(
                "gamma must be positive, got {}",
                s.gamma
            )));
        }
        if s.grid_intervals == 0 {
            return Err(CliError::Config("grid_intervals must be positive".into()));
        }
        let exp = Experiment {
            config,
            profile,
            coefficients,
            base,
        };
        exp.sweep_setup(None)
            .check(&exp.config.simulation.epsilons)
            .map_err(CliError::config)?;
        Ok(exp)
    }

    pub fn integrator(&self) -> IntegratorConfig {
        let s = &self.config.simulation;
        IntegratorConfig {
            rtol: s.tolerances.rel,
            atol: s.tolerances.abs,
            max_step: s.tolerances.max_step,
            dense_output: true,
            grid_intervals: s.grid_intervals,
        }
    }

    pub fn sweep_setup(&self, threads: Option<usize>) -> SweepSetup {
        let s = &self.config.simulation;
        let mut setup = SweepSetup::new(self.base.clone(), self.config.model, self.profile.clone());
        setup.gamma = s.gamma;
        setup.z0 = s.z0;
        setup.grid_intervals = s.grid_intervals;
        setup.integrator = self.integrator();
        if let Some(w) = &s.windows {
            setup.windows = w.iter().map(|&[a, b]| (a, b)).collect();
        }
        setup.threads = threads;
        setup
    }
}
