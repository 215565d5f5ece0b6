//! Time integrators for the four systems and the shared simulation loop.
//!
//! All four steppers advance the slow coordinates (position, velocity/momentum) by
//! explicit Euler-Maruyama. The memory modes are advanced exactly: each mode is an OU
//! process with a source that is frozen over the step, so its decay factor, source ramp,
//! and noise integral all have closed forms (see [`noise`]). That removes the stiffness
//! of the mode rates entirely; only the slow coordinates constrain the step size.
//!
//! Coupled experiments integrate two systems against one [`CoupledNoiseGrid`], which is
//! what makes pathwise differences between a system and its limit meaningful.

pub mod noise;

pub use noise::{ou_pair_weights, CoupledNoiseGrid, OuPairWeights};

use crate::kernel::{KernelError, KernelParams};
use crate::model::{cutoff_theta, LangevinState, PhaseState, Potential, ZeroMassState};
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

/// Coordinates beyond this magnitude count as blown up even while still finite, so a
/// runaway trajectory is reported at a meaningful step index instead of at the overflow.
const RUNAWAY: f64 = 1e12;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("trajectory blew up at step {step} (t = {time})")]
    BlowUp { step: usize, time: f64 },
    #[error("invalid system: {0}")]
    BadSpec(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("noise grid does not match the system: {0}")]
    GridMismatch(String),
}

/// Which of the four systems to integrate, with the parameters specific to each.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SystemKind {
    /// Memory Langevin dynamics with inertia: `(x, v, z_1..z_N)`.
    FullGle { mass: f64 },
    /// Zero-mass limit in shifted coordinates: `(u, f_1..f_N)`, first-order in `u`.
    SmallMassLimit,
    /// [`SystemKind::FullGle`] with the kernel accelerated by `1/epsilon`.
    ScaledGle { mass: f64, epsilon: f64 },
    /// Underdamped Langevin with the memory collapsed into extra drag and extra noise.
    WhiteNoiseLimit { mass: f64 },
}

/// Everything that defines a system apart from its initial condition and step size.
#[derive(Debug, Clone)]
pub struct SystemSpec {
    pub kind: SystemKind,
    pub gamma: f64,
    pub phi: Potential,
    pub params: KernelParams,
    /// When set, the potential force is multiplied by the smooth cutoff at this radius.
    /// Inside the plateau that multiplies by exactly 1.0, so a cutoff run is bitwise
    /// identical to the uncut run until the position first leaves the plateau.
    pub cutoff_radius: Option<f64>,
}

impl SystemSpec {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(SimError::BadSpec(format!("gamma must be positive (gamma = {})", self.gamma)));
        }
        match self.kind {
            SystemKind::FullGle { mass } | SystemKind::WhiteNoiseLimit { mass } => {
                check_positive("mass", mass)?;
            }
            SystemKind::ScaledGle { mass, epsilon } => {
                check_positive("mass", mass)?;
                check_positive("epsilon", epsilon)?;
            }
            SystemKind::SmallMassLimit => {}
        }
        if let Some(r) = self.cutoff_radius {
            check_positive("cutoff radius", r)?;
        }
        if let SystemKind::WhiteNoiseLimit { .. } = self.kind {
            // The collapsed drag and noise amplitude must be finite sums.
            self.params.effective_drag(self.gamma)?;
        }
        Ok(())
    }
}

fn check_positive(name: &str, value: f64) -> Result<(), SimError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(SimError::BadSpec(format!("{name} must be positive ({name} = {value})")))
    }
}

/// Per-mode constants of the (possibly accelerated) ladder at a fixed step size.
/// Both the plain and the scaled system go through this one builder with their own
/// `eps`; at `eps = 1` every division is by 1.0 and the plain weights come out bit for
/// bit, which is what makes the scaled stepper degenerate to the full one exactly.
struct ModeWeights {
    sqrt_c: Vec<f64>,
    rates: Vec<f64>,
    ou: Vec<OuPairWeights>,
}

fn mode_weights(params: &KernelParams, eps: f64, dt: f64) -> ModeWeights {
    let (c, lambda) = params.coefficient_table();
    let sqrt_c: Vec<f64> = c.iter().map(|&ck| (ck / eps).sqrt()).collect();
    let rates: Vec<f64> = lambda.iter().map(|&lk| lk / eps).collect();
    let ou = rates.iter().map(|&eta| ou_pair_weights(eta, dt)).collect();
    ModeWeights { sqrt_c, rates, ou }
}

/// One system bound to a step size, ready to advance states against a matching grid.
pub trait System {
    type State: Clone;

    fn dt(&self) -> f64;
    /// Advance one step using the grid's row `step`. Pure: same inputs, same output.
    fn step(&self, state: &Self::State, grid: &CoupledNoiseGrid, step: usize) -> Self::State;
    /// Scalar coordinates finite and inside the runaway guard.
    fn in_bounds(&self, state: &Self::State) -> bool;
    /// Mode lanes the driving grid must carry.
    fn grid_modes(&self) -> usize;
    /// OU rates the grid must have been built with; `None` when only raw increments
    /// are consumed.
    fn ou_rates(&self) -> Option<&[f64]>;
}

fn scalar_ok(v: f64) -> bool {
    v.is_finite() && v.abs() <= RUNAWAY
}

/// Stepper for [`SystemKind::FullGle`] and [`SystemKind::ScaledGle`].
pub struct GleStepper {
    dt: f64,
    gamma: f64,
    mass: f64,
    phi: Potential,
    cutoff: Option<f64>,
    w: ModeWeights,
    v_noise: f64,
}

impl GleStepper {
    pub fn new(spec: &SystemSpec, dt: f64) -> Result<Self, SimError> {
        spec.validate()?;
        check_positive("dt", dt)?;
        let (mass, eps) = match spec.kind {
            SystemKind::FullGle { mass } => (mass, 1.0),
            SystemKind::ScaledGle { mass, epsilon } => (mass, epsilon),
            _ => return Err(SimError::BadSpec("not a full or scaled system".into())),
        };
        Ok(Self {
            dt,
            gamma: spec.gamma,
            mass,
            phi: spec.phi.clone(),
            cutoff: spec.cutoff_radius,
            w: mode_weights(&spec.params, eps, dt),
            v_noise: (2.0 * spec.gamma).sqrt(),
        })
    }

    fn theta(&self, x: f64) -> f64 {
        match self.cutoff {
            Some(r) => cutoff_theta(r, x),
            None => 1.0,
        }
    }
}

impl System for GleStepper {
    type State = PhaseState;

    fn dt(&self) -> f64 {
        self.dt
    }

    fn step(&self, s: &PhaseState, grid: &CoupledNoiseGrid, step: usize) -> PhaseState {
        let n = self.w.sqrt_c.len();
        // Mode force, small terms first.
        let mut mode_force = 0.0;
        for k in (0..n).rev() {
            mode_force += self.w.sqrt_c[k] * s.modes[k];
        }
        let drift_v = -self.gamma * s.v - self.phi.derivative(s.x) * self.theta(s.x) - mode_force;
        let x = s.x + s.v * self.dt;
        let v = s.v + (drift_v * self.dt + self.v_noise * grid.dw0(step)) / self.mass;
        let mut modes = Vec::with_capacity(n);
        for k in 0..n {
            let ou = &self.w.ou[k];
            modes.push(
                ou.decay * s.modes[k]
                    + self.w.sqrt_c[k] * s.v * ou.ramp
                    + grid.ou_integral(step, k),
            );
        }
        PhaseState { x, v, modes }
    }

    fn in_bounds(&self, s: &PhaseState) -> bool {
        scalar_ok(s.x) && scalar_ok(s.v)
    }

    fn grid_modes(&self) -> usize {
        self.w.sqrt_c.len()
    }

    fn ou_rates(&self) -> Option<&[f64]> {
        Some(&self.w.rates)
    }
}

/// Stepper for [`SystemKind::SmallMassLimit`].
pub struct ZeroMassStepper {
    dt: f64,
    gamma: f64,
    phi: Potential,
    cutoff: Option<f64>,
    w: ModeWeights,
    mode_sum: f64,
    u_noise: f64,
}

impl ZeroMassStepper {
    pub fn new(spec: &SystemSpec, dt: f64) -> Result<Self, SimError> {
        spec.validate()?;
        check_positive("dt", dt)?;
        if !matches!(spec.kind, SystemKind::SmallMassLimit) {
            return Err(SimError::BadSpec("not a small-mass limit system".into()));
        }
        Ok(Self {
            dt,
            gamma: spec.gamma,
            phi: spec.phi.clone(),
            cutoff: spec.cutoff_radius,
            w: mode_weights(&spec.params, 1.0, dt),
            mode_sum: spec.params.mode_sum(),
            u_noise: (2.0 * spec.gamma).sqrt(),
        })
    }

    fn theta(&self, u: f64) -> f64 {
        match self.cutoff {
            Some(r) => cutoff_theta(r, u),
            None => 1.0,
        }
    }
}

impl System for ZeroMassStepper {
    type State = ZeroMassState;

    fn dt(&self) -> f64 {
        self.dt
    }

    fn step(&self, s: &ZeroMassState, grid: &CoupledNoiseGrid, step: usize) -> ZeroMassState {
        let n = self.w.sqrt_c.len();
        let mut mode_force = 0.0;
        for k in (0..n).rev() {
            mode_force += self.w.sqrt_c[k] * s.modes[k];
        }
        let drift_u =
            -self.phi.derivative(s.u) * self.theta(s.u) - self.mode_sum * s.u - mode_force;
        let u = s.u + (drift_u * self.dt + self.u_noise * grid.dw0(step)) / self.gamma;
        let mut modes = Vec::with_capacity(n);
        for k in 0..n {
            let ou = &self.w.ou[k];
            // Source is -lambda_k sqrt(c_k) u, frozen over the step.
            modes.push(
                ou.decay * s.modes[k]
                    - self.w.rates[k] * self.w.sqrt_c[k] * s.u * ou.ramp
                    + grid.ou_integral(step, k),
            );
        }
        ZeroMassState { u, modes }
    }

    fn in_bounds(&self, s: &ZeroMassState) -> bool {
        scalar_ok(s.u)
    }

    fn grid_modes(&self) -> usize {
        self.w.sqrt_c.len()
    }

    fn ou_rates(&self) -> Option<&[f64]> {
        Some(&self.w.rates)
    }
}

/// Stepper for [`SystemKind::WhiteNoiseLimit`].
pub struct WhiteNoiseStepper {
    dt: f64,
    mass: f64,
    phi: Potential,
    cutoff: Option<f64>,
    drag: f64,
    /// `sqrt(2 c_k / lambda_k)`: per-mode noise amplitudes, entering with a minus sign.
    mode_noise: Vec<f64>,
    v_noise: f64,
}

impl WhiteNoiseStepper {
    pub fn new(spec: &SystemSpec, dt: f64) -> Result<Self, SimError> {
        spec.validate()?;
        check_positive("dt", dt)?;
        let SystemKind::WhiteNoiseLimit { mass } = spec.kind else {
            return Err(SimError::BadSpec("not a white-noise limit system".into()));
        };
        let drag = spec.params.effective_drag(spec.gamma)?.value;
        let (c, lambda) = spec.params.coefficient_table();
        let mode_noise = c
            .iter()
            .zip(&lambda)
            .map(|(&ck, &lk)| (2.0 * ck / lk).sqrt())
            .collect();
        Ok(Self {
            dt,
            mass,
            phi: spec.phi.clone(),
            cutoff: spec.cutoff_radius,
            drag,
            mode_noise,
            v_noise: (2.0 * spec.gamma).sqrt(),
        })
    }

    fn theta(&self, u: f64) -> f64 {
        match self.cutoff {
            Some(r) => cutoff_theta(r, u),
            None => 1.0,
        }
    }
}

impl System for WhiteNoiseStepper {
    type State = LangevinState;

    fn dt(&self) -> f64 {
        self.dt
    }

    fn step(&self, s: &LangevinState, grid: &CoupledNoiseGrid, step: usize) -> LangevinState {
        let n = self.mode_noise.len();
        // The mode increments enter negated; the sign is what lets this system track the
        // scaled one pathwise on a shared grid.
        let mut mode_noise = 0.0;
        for k in (0..n).rev() {
            mode_noise += self.mode_noise[k] * grid.dw_mode(step, k);
        }
        let drift_p = -self.drag * s.p - self.phi.derivative(s.u) * self.theta(s.u);
        let u = s.u + s.p * self.dt;
        let p = s.p + (drift_p * self.dt + self.v_noise * grid.dw0(step) - mode_noise) / self.mass;
        LangevinState { u, p }
    }

    fn in_bounds(&self, s: &LangevinState) -> bool {
        scalar_ok(s.u) && scalar_ok(s.p)
    }

    fn grid_modes(&self) -> usize {
        self.mode_noise.len()
    }

    fn ou_rates(&self) -> Option<&[f64]> {
        None
    }
}

fn check_grid<S: System>(sys: &S, grid: &CoupledNoiseGrid) -> Result<(), SimError> {
    if grid.dt() != sys.dt() {
        return Err(SimError::GridMismatch(format!(
            "grid dt {} differs from system dt {}",
            grid.dt(),
            sys.dt()
        )));
    }
    if grid.n_modes() != sys.grid_modes() {
        return Err(SimError::GridMismatch(format!(
            "grid carries {} mode lanes, system needs {}",
            grid.n_modes(),
            sys.grid_modes()
        )));
    }
    if let Some(rates) = sys.ou_rates() {
        match grid.ou_rates() {
            None => {
                return Err(SimError::GridMismatch(
                    "system needs OU integrals but the grid has none".into(),
                ))
            }
            Some(g) if g != rates => {
                return Err(SimError::GridMismatch(
                    "grid OU rates differ from the system's mode rates".into(),
                ))
            }
            _ => {}
        }
    }
    Ok(())
}

/// Drive `sys` across the whole grid, handing every state (the initial one included) to
/// `observe` as `(step_index, state)`. Deterministic given `(sys, init, grid)`.
pub fn simulate_observe<S: System>(
    sys: &S,
    init: &S::State,
    grid: &CoupledNoiseGrid,
    mut observe: impl FnMut(usize, &S::State),
) -> Result<(), SimError> {
    check_grid(sys, grid)?;
    if !sys.in_bounds(init) {
        return Err(SimError::BlowUp { step: 0, time: 0.0 });
    }
    observe(0, init);
    let mut state = init.clone();
    for i in 0..grid.n_steps() {
        state = sys.step(&state, grid, i);
        if !sys.in_bounds(&state) {
            return Err(SimError::BlowUp { step: i + 1, time: (i + 1) as f64 * grid.dt() });
        }
        observe(i + 1, &state);
    }
    Ok(())
}

/// [`simulate_observe`] collecting all states; index `i` is time `i * dt`.
pub fn simulate<S: System>(
    sys: &S,
    init: &S::State,
    grid: &CoupledNoiseGrid,
) -> Result<Vec<S::State>, SimError> {
    let mut out = Vec::with_capacity(grid.n_steps() + 1);
    simulate_observe(sys, init, grid, |_, s| out.push(s.clone()))?;
    Ok(out)
}

/// One step of the full system; `spec.kind` must be [`SystemKind::FullGle`].
pub fn step_full(
    state: &PhaseState,
    spec: &SystemSpec,
    grid: &CoupledNoiseGrid,
    step: usize,
) -> Result<PhaseState, SimError> {
    if !matches!(spec.kind, SystemKind::FullGle { .. }) {
        return Err(SimError::BadSpec("step_full needs a FullGle system".into()));
    }
    one_step(&GleStepper::new(spec, grid.dt())?, state, grid, step)
}

/// One step of the accelerated system; `spec.kind` must be [`SystemKind::ScaledGle`].
pub fn step_scaled(
    state: &PhaseState,
    spec: &SystemSpec,
    grid: &CoupledNoiseGrid,
    step: usize,
) -> Result<PhaseState, SimError> {
    if !matches!(spec.kind, SystemKind::ScaledGle { .. }) {
        return Err(SimError::BadSpec("step_scaled needs a ScaledGle system".into()));
    }
    one_step(&GleStepper::new(spec, grid.dt())?, state, grid, step)
}

/// One step of the zero-mass system; `spec.kind` must be [`SystemKind::SmallMassLimit`].
pub fn step_small_mass_limit(
    state: &ZeroMassState,
    spec: &SystemSpec,
    grid: &CoupledNoiseGrid,
    step: usize,
) -> Result<ZeroMassState, SimError> {
    one_step(&ZeroMassStepper::new(spec, grid.dt())?, state, grid, step)
}

/// One step of the collapsed-memory system; `spec.kind` must be
/// [`SystemKind::WhiteNoiseLimit`].
pub fn step_white_noise_limit(
    state: &LangevinState,
    spec: &SystemSpec,
    grid: &CoupledNoiseGrid,
    step: usize,
) -> Result<LangevinState, SimError> {
    one_step(&WhiteNoiseStepper::new(spec, grid.dt())?, state, grid, step)
}

fn one_step<S: System>(
    sys: &S,
    state: &S::State,
    grid: &CoupledNoiseGrid,
    step: usize,
) -> Result<S::State, SimError> {
    check_grid(sys, grid)?;
    let next = sys.step(state, grid, step);
    if !sys.in_bounds(&next) {
        return Err(SimError::BlowUp { step, time: (step + 1) as f64 * grid.dt() });
    }
    Ok(next)
}

/// Full-system initial condition with every mode drawn from its stationary law: the modes
/// are independent standard normals, which makes the random force
/// `F(t) = -sum_k sqrt(c_k) z_k(t)` a stationary Gaussian whose autocovariance is the
/// memory kernel.
pub fn stationary_init<R: Rng>(x: f64, v: f64, params: &KernelParams, rng: &mut R) -> PhaseState {
    let modes = (0..params.n_modes()).map(|_| rng.sample(StandardNormal)).collect();
    PhaseState { x, v, modes }
}
