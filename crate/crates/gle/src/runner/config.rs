//! Experiment configuration: a TOML schema shared by every subcommand, with total
//! validation that names the modelling condition an invalid combination breaks.

use crate::kernel::{validate_regime, KernelParams, Regime, RegimeReport};
use crate::model::{validate_growth, Potential};
use crate::runner::RunError;
use serde::{Deserialize, Serialize};
use std::path::Path;

fn default_tail_tol() -> f64 {
    1e-8
}
fn default_max_modes() -> usize {
    10_000
}
fn default_unit_mass() -> f64 {
    1.0
}
fn default_convergence_n() -> usize {
    100
}
fn default_msd_n() -> usize {
    200
}
fn default_fdt_n() -> usize {
    10_000
}
fn default_record_every() -> usize {
    1
}
fn default_window() -> [f64; 2] {
    [1e2, 1e3]
}
fn default_lags() -> Vec<f64> {
    vec![0.0, 0.5, 1.0, 2.0]
}

/// One experiment file. The study sections are all optional; a subcommand requires its
/// own section and ignores the others, so one file can drive several subcommands.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    /// Mode-weight exponent of the state norm.
    pub s: f64,
    pub gamma: f64,
    /// When set, every simulated system applies the smooth force cutoff at this radius.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff_radius: Option<f64>,
    pub kernel: KernelSection,
    pub potential: PotentialSection,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub small_mass: Option<SmallMassSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub white_noise: Option<WhiteNoiseSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub msd: Option<MsdSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fdt: Option<FdtSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub single: Option<SingleSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSection {
    pub alpha: f64,
    pub beta: f64,
    /// Absent: pick the smallest count whose truncation bound beats `tail_tol`.
    /// Zero: the degenerate memoryless system with no modes at all.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_modes: Option<usize>,
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
    #[serde(default = "default_max_modes")]
    pub max_modes: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSection {
    pub name: String,
    /// Ascending power-basis coefficients; required for `name = "polynomial"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModesInit {
    /// Independent standard normals, the invariant law of the mode ladder.
    Stationary,
    Zero,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    #[serde(default)]
    pub x: f64,
    #[serde(default)]
    pub v: f64,
    #[serde(default = "default_modes_init")]
    pub modes: ModesInit,
}

fn default_modes_init() -> ModesInit {
    ModesInit::Stationary
}

impl Default for InitialSection {
    fn default() -> Self {
        Self { x: 0.0, v: 0.0, modes: ModesInit::Stationary }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmallMassSection {
    pub masses: Vec<f64>,
    pub t_final: f64,
    pub base_dt: f64,
    #[serde(default = "default_convergence_n")]
    pub n_trajectories: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WhiteNoiseSection {
    pub epsilons: Vec<f64>,
    #[serde(default = "default_unit_mass")]
    pub mass: f64,
    pub t_final: f64,
    pub base_dt: f64,
    #[serde(default = "default_convergence_n")]
    pub n_trajectories: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MsdSection {
    #[serde(default = "default_unit_mass")]
    pub mass: f64,
    pub dt: f64,
    pub t_final: f64,
    #[serde(default = "default_msd_n")]
    pub n_trajectories: usize,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    /// Time window of the log-log slope fit.
    #[serde(default = "default_window")]
    pub window: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FdtSection {
    #[serde(default = "default_unit_mass")]
    pub mass: f64,
    pub dt: f64,
    pub t_final: f64,
    #[serde(default = "default_fdt_n")]
    pub n_trajectories: usize,
    #[serde(default = "default_lags")]
    pub lags: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemName {
    Full,
    SmallMass,
    Scaled,
    WhiteNoise,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingleSection {
    pub system: SystemName,
    #[serde(default = "default_unit_mass")]
    pub mass: f64,
    /// Kernel acceleration; only meaningful for `system = "scaled"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub t_final: f64,
    pub base_dt: f64,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
}

fn config_err(msg: impl Into<String>) -> RunError {
    RunError::Config(msg.into())
}

fn check_positive(name: &str, value: f64) -> Result<(), RunError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(config_err(format!("{name} must be positive ({name} = {value})")))
    }
}

impl Config {
    pub fn from_path(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
            .map_err(|e| config_err(format!("{}: {e}", path.display())))
    }

    pub fn from_toml(text: &str) -> Result<Self, RunError> {
        let cfg: Config = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        cfg.validate_common()?;
        Ok(cfg)
    }

    /// Checks every field that does not depend on the chosen experiment.
    fn validate_common(&self) -> Result<(), RunError> {
        check_positive("s", self.s)?;
        check_positive("gamma", self.gamma)?;
        if let Some(r) = self.cutoff_radius {
            check_positive("cutoff_radius", r)?;
        }
        check_positive("kernel.alpha", self.kernel.alpha)?;
        check_positive("kernel.beta", self.kernel.beta)?;
        check_positive("kernel.tail_tol", self.kernel.tail_tol)?;
        if self.kernel.max_modes == 0 {
            return Err(config_err("kernel.max_modes must be at least 1"));
        }
        self.potential()?;
        if let Some(sm) = &self.small_mass {
            require_nonempty("small_mass.masses", &sm.masses)?;
            for &m in &sm.masses {
                check_positive("small_mass.masses entry", m)?;
            }
            check_nonnegative_time("small_mass.t_final", sm.t_final)?;
            check_positive("small_mass.base_dt", sm.base_dt)?;
            require_nonzero_count("small_mass.n_trajectories", sm.n_trajectories)?;
        }
        if let Some(wn) = &self.white_noise {
            require_nonempty("white_noise.epsilons", &wn.epsilons)?;
            for &e in &wn.epsilons {
                check_positive("white_noise.epsilons entry", e)?;
            }
            check_positive("white_noise.mass", wn.mass)?;
            check_nonnegative_time("white_noise.t_final", wn.t_final)?;
            check_positive("white_noise.base_dt", wn.base_dt)?;
            require_nonzero_count("white_noise.n_trajectories", wn.n_trajectories)?;
        }
        if let Some(msd) = &self.msd {
            check_positive("msd.mass", msd.mass)?;
            check_positive("msd.dt", msd.dt)?;
            check_positive("msd.t_final", msd.t_final)?;
            require_nonzero_count("msd.n_trajectories", msd.n_trajectories)?;
            require_nonzero_count("msd.record_every", msd.record_every)?;
            if !(msd.window[0] > 0.0 && msd.window[0] < msd.window[1]) {
                return Err(config_err(format!(
                    "msd.window must be an increasing positive pair (got [{}, {}])",
                    msd.window[0], msd.window[1]
                )));
            }
        }
        if let Some(fdt) = &self.fdt {
            check_positive("fdt.mass", fdt.mass)?;
            check_positive("fdt.dt", fdt.dt)?;
            check_positive("fdt.t_final", fdt.t_final)?;
            require_nonzero_count("fdt.n_trajectories", fdt.n_trajectories)?;
            require_nonempty("fdt.lags", &fdt.lags)?;
            for &lag in &fdt.lags {
                if !(lag >= 0.0 && lag <= fdt.t_final) {
                    return Err(config_err(format!(
                        "fdt.lags entry {lag} lies outside [0, t_final = {}]",
                        fdt.t_final
                    )));
                }
                let steps = lag / fdt.dt;
                if (steps - steps.round()).abs() > 1e-9 {
                    return Err(config_err(format!(
                        "fdt.lags entry {lag} is not a multiple of fdt.dt = {}",
                        fdt.dt
                    )));
                }
            }
        }
        if let Some(single) = &self.single {
            check_positive("single.mass", single.mass)?;
            check_nonnegative_time("single.t_final", single.t_final)?;
            check_positive("single.base_dt", single.base_dt)?;
            require_nonzero_count("single.record_every", single.record_every)?;
            match (single.system, single.epsilon) {
                (SystemName::Scaled, None) => {
                    return Err(config_err("single.system = \"scaled\" needs single.epsilon"));
                }
                (SystemName::Scaled, Some(e)) => check_positive("single.epsilon", e)?,
                (_, Some(_)) => {
                    return Err(config_err(
                        "single.epsilon only applies to single.system = \"scaled\"",
                    ));
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn kernel_params(&self) -> Result<KernelParams, RunError> {
        let k = &self.kernel;
        let params = match k.n_modes {
            None => KernelParams::with_auto_modes(k.alpha, k.beta, k.tail_tol, k.max_modes)?,
            Some(0) => KernelParams::markovian(k.alpha, k.beta)?,
            Some(n) => KernelParams::new(k.alpha, k.beta, n)?,
        };
        Ok(params)
    }

    pub fn potential(&self) -> Result<Potential, RunError> {
        Potential::by_name(&self.potential.name, self.potential.coefficients.as_deref()).ok_or_else(
            || {
                config_err(format!(
                    "unknown potential \"{}\" (expected one of free, quadratic, double_well, \
                     quartic, gaussian_growth, polynomial; polynomial needs coefficients)",
                    self.potential.name
                ))
            },
        )
    }

    pub fn regime_report(&self) -> RegimeReport {
        validate_regime(self.kernel.alpha, self.kernel.beta, self.s)
    }

    /// Rejects parameter combinations outside the stationarity class, and outside the
    /// diffusive class when the experiment needs one.
    pub fn require_regime(&self, want_diffusive: bool) -> Result<RegimeReport, RunError> {
        let report = self.regime_report();
        if report.regime == Regime::Invalid {
            return Err(config_err(format!(
                "regime conditions violated: {}",
                report.violations.join("; ")
            )));
        }
        if want_diffusive && report.regime != Regime::Diffusive {
            return Err(config_err(format!(
                "this experiment needs the diffusive regime (alpha > 1), got regime {} for \
                 alpha = {}, beta = {}, s = {}",
                report.regime, self.kernel.alpha, self.kernel.beta, self.s
            )));
        }
        Ok(report)
    }

    /// Rejects potentials that fail the quadratic-domination growth condition the
    /// convergence statements assume.
    pub fn require_growth(&self) -> Result<(), RunError> {
        let phi = self.potential()?;
        let report = validate_growth(|x| phi.value(x), 10.0, 401);
        if report.constant.is_none() || !report.nonnegative {
            return Err(config_err(format!(
                "potential \"{}\" fails the growth condition (x^2 <= c (Phi(x) + 1) with \
                 Phi >= 0)",
                phi.name()
            )));
        }
        Ok(())
    }
}

fn require_nonempty(name: &str, list: &[f64]) -> Result<(), RunError> {
    if list.is_empty() {
        Err(config_err(format!("{name} must not be empty")))
    } else {
        Ok(())
    }
}

fn require_nonzero_count(name: &str, n: usize) -> Result<(), RunError> {
    if n == 0 {
        Err(config_err(format!("{name} must be at least 1")))
    } else {
        Ok(())
    }
}

fn check_nonnegative_time(name: &str, value: f64) -> Result<(), RunError> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(config_err(format!("{name} must be a finite nonnegative time ({name} = {value})")))
    }
}
