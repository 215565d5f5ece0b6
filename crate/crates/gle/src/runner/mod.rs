//! Ensemble orchestration: deterministic per-trajectory noise streams, step-size policy,
//! and the canned experiments (coupled small-mass and white-noise convergence studies,
//! mean-square displacement scaling, and the force-autocovariance check).

pub mod config;
pub mod report;

pub use config::{Config, ModesInit, SystemName};

use crate::analysis::{self, AnalysisError, EnsembleStats, MsdPoint, SlopeFit, StateView};
use crate::dynamics::{
    ou_pair_weights, simulate_observe, CoupledNoiseGrid, GleStepper, SimError, System,
    SystemKind, SystemSpec, WhiteNoiseStepper, ZeroMassStepper,
};
use crate::kernel::{KernelError, KernelParams};
use crate::model::{
    shift_initial, validate_dissipativity, LangevinState, PhaseState, Potential,
};
use crate::par;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config: {0}")]
    Config(String),
    #[error("{aborted} of {total} trajectories aborted; more than 1% invalidates the ensemble")]
    ExcessiveAborts { aborted: usize, total: usize },
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

/// Lane index reserved for initial-condition draws, outside the grid lanes `0..=N`.
const INIT_LANE: u64 = u64::MAX;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes `(master, trajectory, lane)` into one stream key. Each coordinate passes
/// through its own mixing round, so structured inputs (consecutive trajectories,
/// consecutive lanes) cannot collide by pattern.
pub fn lane_key(master: u64, traj: u64, lane: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ traj) ^ lane)
}

/// The generator a given `(trajectory, lane)` pair always receives, no matter which
/// worker runs it or in what order.
pub fn lane_rng(master: u64, traj: u64, lane: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(lane_key(master, traj, lane))
}

/// Step size: the configured base capped by every explicit rate bound.
fn em_step(base: f64, caps: &[f64]) -> f64 {
    caps.iter().fold(base, |acc, &c| acc.min(c))
}

fn steps_for(t_final: f64, dt: f64) -> usize {
    (t_final / dt).round() as usize
}

/// Cap keeping the fastest exponentially-integrated mode resolved by the Euler steps of
/// the coordinates it feeds: a tenth of the shortest mode timescale `eps / lambda_1`.
fn mode_rate_cap(params: &KernelParams, eps: f64) -> Option<f64> {
    if params.n_modes() == 0 {
        return None;
    }
    let (_, lambda_1) = params.mode_coefficients(1).expect("mode 1 exists when n_modes >= 1");
    Some(eps / (10.0 * lambda_1))
}

fn initial_phase(cfg: &Config, params: &KernelParams, traj: u64) -> PhaseState {
    match cfg.initial.modes {
        ModesInit::Stationary => {
            let mut rng = lane_rng(cfg.seed, traj, INIT_LANE);
            crate::dynamics::stationary_init(cfg.initial.x, cfg.initial.v, params, &mut rng)
        }
        ModesInit::Zero => PhaseState {
            x: cfg.initial.x,
            v: cfg.initial.v,
            modes: vec![0.0; params.n_modes()],
        },
    }
}

fn spec_for(cfg: &Config, kind: SystemKind, phi: &Potential, params: &KernelParams) -> SystemSpec {
    SystemSpec {
        kind,
        gamma: cfg.gamma,
        phi: phi.clone(),
        params: params.clone(),
        cutoff_radius: cfg.cutoff_radius,
    }
}

/// One row of a convergence study: sup-error statistics at a fixed mass or epsilon.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceRow {
    pub parameter: f64,
    pub dt: f64,
    pub stats: EnsembleStats,
}

#[derive(Debug, Clone)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    pub n_modes: usize,
    pub aborted_total: usize,
    pub notes: Vec<String>,
}

fn summarize(parameter: f64, dt: f64, outcomes: Vec<Option<f64>>) -> Result<ConvergenceRow, RunError> {
    let total = outcomes.len();
    let samples: Vec<f64> = outcomes.into_iter().flatten().collect();
    let aborted = total - samples.len();
    if aborted * 100 > total {
        return Err(RunError::ExcessiveAborts { aborted, total });
    }
    let stats = EnsembleStats::from_samples(&samples, aborted)?;
    Ok(ConvergenceRow { parameter, dt, stats })
}

/// For each mass, couples the inertial system to its zero-mass limit on shared noise
/// (same Brownian lane, same mode integrals, shifted initial condition) and reports the
/// distribution of `sup_t |x_m(t) - u(t)|`.
pub fn run_small_mass_study(cfg: &Config) -> Result<ConvergenceTable, RunError> {
    let section = cfg
        .small_mass
        .as_ref()
        .ok_or_else(|| RunError::Config("missing [small_mass] section".into()))?;
    let report = cfg.require_regime(false)?;
    cfg.require_growth()?;
    let params = cfg.kernel_params()?;
    let phi = cfg.potential()?;

    let mut rows = Vec::with_capacity(section.masses.len());
    let mut aborted_total = 0;
    for &mass in &section.masses {
        let dt = em_step(section.base_dt, &[mass / 10.0]);
        let n_steps = steps_for(section.t_final, dt);
        let full_spec = spec_for(cfg, SystemKind::FullGle { mass }, &phi, &params);
        let limit_spec = spec_for(cfg, SystemKind::SmallMassLimit, &phi, &params);
        full_spec.validate()?;
        limit_spec.validate()?;
        let full = GleStepper::new(&full_spec, dt)?;
        let limit = ZeroMassStepper::new(&limit_spec, dt)?;
        let rates = full.ou_rates().expect("mode ladder always carries OU rates").to_vec();

        let outcomes = par::map_indexed(section.n_trajectories, |traj| {
            let phase = initial_phase(cfg, &params, traj as u64);
            let shifted = shift_initial(&phase, &params);
            let grid = CoupledNoiseGrid::generate_with_ou(dt, n_steps, &rates, |lane| {
                lane_rng(cfg.seed, traj as u64, lane as u64)
            });
            let mut xs = Vec::with_capacity(n_steps + 1);
            if simulate_observe(&full, &phase, &grid, |_, s| xs.push(s.x)).is_err() {
                return None;
            }
            let mut sup = 0.0f64;
            let run = simulate_observe(&limit, &shifted, &grid, |i, s| {
                sup = sup.max((xs[i] - s.u).abs());
            });
            run.ok().map(|_| sup)
        });
        let row = summarize(mass, dt, outcomes)?;
        aborted_total += row.stats.aborted;
        rows.push(row);
    }
    Ok(ConvergenceTable {
        rows,
        n_modes: params.n_modes(),
        aborted_total,
        notes: vec![format!("regime {}", report.regime)],
    })
}

/// For each epsilon, couples the kernel-accelerated system to the white-noise limit on
/// shared noise (identical Brownian lanes, the limit folding the mode lanes into its
/// noise with the matching sign) and reports `sup_t (|x_eps - u| + |v_eps - p|)`.
pub fn run_white_noise_study(cfg: &Config) -> Result<ConvergenceTable, RunError> {
    let section = cfg
        .white_noise
        .as_ref()
        .ok_or_else(|| RunError::Config("missing [white_noise] section".into()))?;
    let report = cfg.require_regime(true)?;
    cfg.require_growth()?;
    let params = cfg.kernel_params()?;
    let phi = cfg.potential()?;
    let mass = section.mass;

    let mut notes = vec![format!("regime {}", report.regime)];
    let dissipativity =
        validate_dissipativity(|x| phi.value(x), |x| phi.derivative(x), 4.0, 5.0, 201);
    if report.strong_summability && dissipativity.constant.is_some() {
        notes.push(
            "mean column reads as moment convergence (dissipativity and strong mode-sum \
             conditions hold)"
                .into(),
        );
    } else {
        notes.push(
            "mean column is descriptive only (dissipativity or strong mode-sum condition \
             fails)"
                .into(),
        );
    }

    let mut rows = Vec::with_capacity(section.epsilons.len());
    let mut aborted_total = 0;
    for &epsilon in &section.epsilons {
        let caps = [mass / 10.0, mode_rate_cap(&params, epsilon).unwrap_or(f64::INFINITY)];
        let dt = em_step(section.base_dt, &caps);
        let n_steps = steps_for(section.t_final, dt);
        let scaled_spec = spec_for(cfg, SystemKind::ScaledGle { mass, epsilon }, &phi, &params);
        let limit_spec = spec_for(cfg, SystemKind::WhiteNoiseLimit { mass }, &phi, &params);
        scaled_spec.validate()?;
        limit_spec.validate()?;
        let scaled = GleStepper::new(&scaled_spec, dt)?;
        let limit = WhiteNoiseStepper::new(&limit_spec, dt)?;
        let rates = scaled.ou_rates().expect("mode ladder always carries OU rates").to_vec();

        let outcomes = par::map_indexed(section.n_trajectories, |traj| {
            let phase = initial_phase(cfg, &params, traj as u64);
            let start = LangevinState { u: phase.x, p: phase.v };
            let grid = CoupledNoiseGrid::generate_with_ou(dt, n_steps, &rates, |lane| {
                lane_rng(cfg.seed, traj as u64, lane as u64)
            });
            let mut xs = Vec::with_capacity(n_steps + 1);
            let mut vs = Vec::with_capacity(n_steps + 1);
            let run = simulate_observe(&scaled, &phase, &grid, |_, s| {
                xs.push(s.x);
                vs.push(s.v);
            });
            if run.is_err() {
                return None;
            }
            let mut sup = 0.0f64;
            let run = simulate_observe(&limit, &start, &grid, |i, s| {
                sup = sup.max((xs[i] - s.u).abs() + (vs[i] - s.p).abs());
            });
            run.ok().map(|_| sup)
        });
        let row = summarize(epsilon, dt, outcomes)?;
        aborted_total += row.stats.aborted;
        rows.push(row);
    }
    Ok(ConvergenceTable { rows, n_modes: params.n_modes(), aborted_total, notes })
}

#[derive(Debug, Clone)]
pub struct MsdStudyResult {
    pub points: Vec<MsdPoint>,
    pub fit: SlopeFit,
    pub window: [f64; 2],
    pub n_modes: usize,
    pub aborted: usize,
    pub notes: Vec<String>,
}

/// Mean-square displacement of the potential-free dynamics started at the origin with
/// stationary modes, plus the log-log slope over the configured window. Trajectories run
/// in bounded-memory segments; the per-lane generators persist across segments, so the
/// path is identical to a single unsegmented run.
pub fn run_msd_study(cfg: &Config) -> Result<MsdStudyResult, RunError> {
    let section =
        cfg.msd.as_ref().ok_or_else(|| RunError::Config("missing [msd] section".into()))?;
    let report = cfg.require_regime(false)?;
    let params = cfg.kernel_params()?;
    let phi = cfg.potential()?;
    if !matches!(phi, Potential::Free) {
        return Err(RunError::Config(format!(
            "the displacement scaling is stated for the potential-free dynamics \
             (potential = \"{}\")",
            phi.name()
        )));
    }
    if cfg.initial.x != 0.0 {
        return Err(RunError::Config(format!(
            "displacement scaling needs trajectories started at the origin \
             (initial.x = {})",
            cfg.initial.x
        )));
    }
    if cfg.initial.modes != ModesInit::Stationary {
        return Err(RunError::Config(
            "displacement scaling needs stationary mode initialization".into(),
        ));
    }

    let dt = em_step(section.dt, &[section.mass / 10.0]);
    let n_steps = steps_for(section.t_final, dt);
    let record_every = section.record_every;
    let spec = spec_for(cfg, SystemKind::FullGle { mass: section.mass }, &phi, &params);
    spec.validate()?;
    let system = GleStepper::new(&spec, dt)?;
    let rates = system.ou_rates().expect("mode ladder always carries OU rates").to_vec();
    // Segment boundaries land on record points, so only segment-final states need
    // carrying over.
    let segment = record_every * (2048 / record_every + 1);

    let outcomes: Vec<Option<Vec<f64>>> = par::map_indexed(section.n_trajectories, |traj| {
        let mut lanes: Vec<ChaCha8Rng> =
            (0..=rates.len()).map(|lane| lane_rng(cfg.seed, traj as u64, lane as u64)).collect();
        let mut state = initial_phase(cfg, &params, traj as u64);
        let mut positions = Vec::with_capacity(n_steps / record_every + 1);
        let mut done = 0;
        while done <= n_steps {
            let seg = segment.min(n_steps - done);
            let grid = CoupledNoiseGrid::fill_with_ou(dt, seg, &rates, &mut lanes);
            let mut last: Option<PhaseState> = None;
            let run = simulate_observe(&system, &state, &grid, |i, s| {
                if (done + i) % record_every == 0 && (i > 0 || done == 0) {
                    positions.push(s.x);
                }
                if i == seg {
                    last = Some(s.clone());
                }
            });
            if run.is_err() {
                return None;
            }
            state = last.expect("the final step is always observed");
            if seg == 0 {
                break;
            }
            done += seg;
        }
        Some(positions)
    });

    let total = outcomes.len();
    let ensemble: Vec<Vec<f64>> = outcomes.into_iter().flatten().collect();
    let aborted = total - ensemble.len();
    if aborted * 100 > total {
        return Err(RunError::ExcessiveAborts { aborted, total });
    }
    let times: Vec<f64> =
        (0..=n_steps / record_every).map(|r| (r * record_every) as f64 * dt).collect();
    let points = analysis::msd(&times, &ensemble)?;
    let curve: Vec<(f64, f64)> = points.iter().map(|p| (p.t, p.mean_square)).collect();
    let fit = analysis::loglog_slope(&curve, (section.window[0], section.window[1]))?;
    Ok(MsdStudyResult {
        points,
        fit,
        window: section.window,
        n_modes: params.n_modes(),
        aborted,
        notes: vec![
            format!("regime {}", report.regime),
            "potential-free run sits outside the growth condition backing well-posedness"
                .into(),
        ],
    })
}

#[derive(Debug, Clone, Copy)]
pub struct FdtRow {
    pub lag: f64,
    pub covariance: f64,
    pub std_error: f64,
    pub kernel: f64,
    pub z_score: f64,
}

#[derive(Debug, Clone)]
pub struct FdtResult {
    pub rows: Vec<FdtRow>,
    pub n_modes: usize,
    pub aborted: usize,
    pub notes: Vec<String>,
}

/// Compares the empirical autocovariance of the random force against the kernel. The
/// force is the noise-driven mode sum `F(t) = -sum_k sqrt(c_k) zeta_k(t)` with each
/// `zeta_k` integrated exactly from its stationary start, while the full inertial system
/// advances on the same grid so the run also exercises the coupled dynamics.
pub fn run_fdt_check(cfg: &Config) -> Result<FdtResult, RunError> {
    let section =
        cfg.fdt.as_ref().ok_or_else(|| RunError::Config("missing [fdt] section".into()))?;
    let report = cfg.require_regime(false)?;
    if cfg.initial.modes != ModesInit::Stationary {
        return Err(RunError::Config(
            "the force-kernel identity needs stationary mode initialization".into(),
        ));
    }
    let params = cfg.kernel_params()?;
    let phi = cfg.potential()?;
    let dt = em_step(section.dt, &[section.mass / 10.0]);
    let n_steps = steps_for(section.t_final, dt);
    let spec = spec_for(cfg, SystemKind::FullGle { mass: section.mass }, &phi, &params);
    spec.validate()?;
    let system = GleStepper::new(&spec, dt)?;
    let rates = system.ou_rates().expect("mode ladder always carries OU rates").to_vec();
    let (weights, _) = params.coefficient_table();
    let sqrt_c: Vec<f64> = weights.iter().map(|c| c.sqrt()).collect();
    let decays: Vec<f64> = rates.iter().map(|&r| ou_pair_weights(r, dt).decay).collect();

    let force_of = |zeta: &[f64]| -> f64 {
        let mut sum = 0.0;
        for k in (0..zeta.len()).rev() {
            sum += sqrt_c[k] * zeta[k];
        }
        -sum
    };

    let outcomes: Vec<Option<Vec<f64>>> = par::map_indexed(section.n_trajectories, |traj| {
        let phase = initial_phase(cfg, &params, traj as u64);
        let grid = CoupledNoiseGrid::generate_with_ou(dt, n_steps, &rates, |lane| {
            lane_rng(cfg.seed, traj as u64, lane as u64)
        });
        if simulate_observe(&system, &phase, &grid, |_, _| {}).is_err() {
            return None;
        }
        let mut zeta = phase.modes.clone();
        let mut series = Vec::with_capacity(n_steps + 1);
        series.push(force_of(&zeta));
        for step in 0..n_steps {
            for (k, z) in zeta.iter_mut().enumerate() {
                *z = decays[k] * *z + grid.ou_integral(step, k);
            }
            series.push(force_of(&zeta));
        }
        Some(series)
    });

    let total = outcomes.len();
    let ensemble: Vec<Vec<f64>> = outcomes.into_iter().flatten().collect();
    let aborted = total - ensemble.len();
    if aborted * 100 > total {
        return Err(RunError::ExcessiveAborts { aborted, total });
    }
    // The force has mean zero by construction, so the raw second moment is the estimator.
    let cov = analysis::autocov(&ensemble, dt, &section.lags, false)?;
    let mut rows = Vec::with_capacity(cov.len());
    for point in cov {
        let kernel = params.kernel_eval(point.lag)?;
        let diff = point.cov - kernel;
        let z_score = if point.std_error > 0.0 {
            diff / point.std_error
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(diff)
        };
        rows.push(FdtRow {
            lag: point.lag,
            covariance: point.cov,
            std_error: point.std_error,
            kernel,
            z_score,
        });
    }
    Ok(FdtResult {
        rows,
        n_modes: params.n_modes(),
        aborted,
        notes: vec![format!("regime {}", report.regime)],
    })
}

#[derive(Debug, Clone)]
pub struct SingleResult {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
    pub n_modes: usize,
    pub notes: Vec<String>,
}

fn collect_rows<S: System>(
    system: &S,
    init: &S::State,
    grid: &CoupledNoiseGrid,
    record_every: usize,
    s: f64,
) -> Result<Vec<Vec<f64>>, SimError>
where
    S::State: StateView,
{
    let mut rows = Vec::new();
    simulate_observe(system, init, grid, |i, state| {
        if i % record_every == 0 {
            let mut row = vec![i as f64 * grid.dt(), state.position()];
            if let Some(v) = state.velocity() {
                row.push(v);
            }
            row.push(state.weighted_norm(s));
            rows.push(row);
        }
    })?;
    Ok(rows)
}

/// One trajectory of the configured system, recorded every `record_every` steps.
/// A blow-up is a hard error here; there is no ensemble to absorb it.
pub fn run_single(cfg: &Config) -> Result<SingleResult, RunError> {
    let section =
        cfg.single.as_ref().ok_or_else(|| RunError::Config("missing [single] section".into()))?;
    let report = cfg.require_regime(false)?;
    let params = cfg.kernel_params()?;
    let phi = cfg.potential()?;
    let mass = section.mass;
    let traj = 0u64;

    let (kind, caps) = match section.system {
        SystemName::Full => (SystemKind::FullGle { mass }, vec![mass / 10.0]),
        SystemName::SmallMass => (SystemKind::SmallMassLimit, vec![]),
        SystemName::Scaled => {
            let epsilon = section.epsilon.expect("validated at load");
            (
                SystemKind::ScaledGle { mass, epsilon },
                vec![mass / 10.0, mode_rate_cap(&params, epsilon).unwrap_or(f64::INFINITY)],
            )
        }
        SystemName::WhiteNoise => (SystemKind::WhiteNoiseLimit { mass }, vec![mass / 10.0]),
    };
    let dt = em_step(section.base_dt, &caps);
    let n_steps = steps_for(section.t_final, dt);
    let spec = spec_for(cfg, kind, &phi, &params);
    spec.validate()?;
    let phase = initial_phase(cfg, &params, traj);

    let (header, rows): (Vec<&'static str>, Vec<Vec<f64>>) = match section.system {
        SystemName::Full => {
            let system = GleStepper::new(&spec, dt)?;
            let rates = system.ou_rates().expect("mode ladder").to_vec();
            let grid = CoupledNoiseGrid::generate_with_ou(dt, n_steps, &rates, |lane| {
                lane_rng(cfg.seed, traj, lane as u64)
            });
            (
                vec!["time", "position", "velocity", "norm"],
                collect_rows(&system, &phase, &grid, section.record_every, cfg.s)?,
            )
        }
        SystemName::Scaled => {
            let system = GleStepper::new(&spec, dt)?;
            let rates = system.ou_rates().expect("mode ladder").to_vec();
            let grid = CoupledNoiseGrid::generate_with_ou(dt, n_steps, &rates, |lane| {
                lane_rng(cfg.seed, traj, lane as u64)
            });
            (
                vec!["time", "position", "velocity", "norm"],
                collect_rows(&system, &phase, &grid, section.record_every, cfg.s)?,
            )
        }
        SystemName::SmallMass => {
            let system = ZeroMassStepper::new(&spec, dt)?;
            let rates = system.ou_rates().expect("mode ladder").to_vec();
            let grid = CoupledNoiseGrid::generate_with_ou(dt, n_steps, &rates, |lane| {
                lane_rng(cfg.seed, traj, lane as u64)
            });
            let shifted = shift_initial(&phase, &params);
            (
                vec!["time", "position", "norm"],
                collect_rows(&system, &shifted, &grid, section.record_every, cfg.s)?,
            )
        }
        SystemName::WhiteNoise => {
            let system = WhiteNoiseStepper::new(&spec, dt)?;
            let grid = CoupledNoiseGrid::generate(dt, n_steps, params.n_modes(), |lane| {
                lane_rng(cfg.seed, traj, lane as u64)
            });
            let start = LangevinState { u: phase.x, p: phase.v };
            (
                vec!["time", "position", "velocity", "norm"],
                collect_rows(&system, &start, &grid, section.record_every, cfg.s)?,
            )
        }
    };
    Ok(SingleResult {
        header,
        rows,
        n_modes: params.n_modes(),
        notes: vec![format!("regime {}", report.regime)],
    })
}

/// `(t, K(t), t^alpha K(t))` rows for a given time grid.
pub fn kernel_table(
    params: &KernelParams,
    times: &[f64],
) -> Result<Vec<(f64, f64, f64)>, KernelError> {
    times
        .iter()
        .map(|&t| {
            let k = params.kernel_eval(t)?;
            Ok((t, k, t.powf(params.alpha()) * k))
        })
        .collect()
}

/// Log-spaced grid from `t_min` to `t_max` inclusive.
pub fn log_grid(t_min: f64, t_max: f64, points: usize) -> Vec<f64> {
    if points <= 1 || t_min == t_max {
        return vec![t_min];
    }
    let (lo, hi) = (t_min.ln(), t_max.ln());
    (0..points)
        .map(|i| match i {
            0 => t_min,
            i if i == points - 1 => t_max,
            i => (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp(),
        })
        .collect()
}
