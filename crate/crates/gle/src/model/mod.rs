//! State types, weighted norms, and the model-level constructions shared by all four
//! systems: the shifted initial condition, the smooth cutoff, the Lyapunov function of the
//! zero-mass system, and empirical validators for the growth and dissipativity bounds the
//! potential has to satisfy.

pub mod potential;

pub use potential::Potential;

use crate::kernel::KernelParams;

/// Full phase point `(x, v, z_1..z_N)`: position, velocity, auxiliary memory modes.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    pub x: f64,
    pub v: f64,
    pub modes: Vec<f64>,
}

/// Zero-mass phase point `(u, f_1..f_N)` in shifted mode coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroMassState {
    pub u: f64,
    pub modes: Vec<f64>,
}

/// White-noise-limit phase point `(u, p)`: plain underdamped Langevin, no modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LangevinState {
    pub u: f64,
    pub p: f64,
}

/// `sqrt(sum_k k^-2s z_k^2)`: the mode part of every weighted norm below.
fn weighted_mode_sum_sq(modes: &[f64], s: f64) -> f64 {
    let mut sum = 0.0;
    for k in (0..modes.len()).rev() {
        sum += ((k + 1) as f64).powf(-2.0 * s) * modes[k] * modes[k];
    }
    sum
}

impl PhaseState {
    /// `sqrt(x^2 + v^2 + sum_k k^-2s z_k^2)`; the decaying weights make the norm finite
    /// even for mode sequences that only grow polynomially.
    pub fn norm_minus_s(&self, s: f64) -> f64 {
        (self.x * self.x + self.v * self.v + weighted_mode_sum_sq(&self.modes, s)).sqrt()
    }
}

impl ZeroMassState {
    /// `sqrt(u^2 + sum_k k^-2s f_k^2)`.
    pub fn norm_minus_s(&self, s: f64) -> f64 {
        (self.u * self.u + weighted_mode_sum_sq(&self.modes, s)).sqrt()
    }
}

impl LangevinState {
    pub fn norm(&self) -> f64 {
        (self.u * self.u + self.p * self.p).sqrt()
    }
}

/// Change to the mode coordinates in which the zero-mass system is autonomous:
/// `u = x`, `f_k = z_k - sqrt(c_k) x`. The velocity does not survive the limit and is
/// dropped here.
pub fn shift_initial(state: &PhaseState, params: &KernelParams) -> ZeroMassState {
    let (c, _) = params.coefficient_table();
    let modes = state
        .modes
        .iter()
        .zip(&c)
        .map(|(&z, &ck)| z - ck.sqrt() * state.x)
        .collect();
    ZeroMassState { u: state.x, modes }
}

/// Inverse of [`shift_initial`]: `x = u`, `z_k = f_k + sqrt(c_k) u`, with the velocity
/// supplied by the caller.
pub fn unshift_initial(state: &ZeroMassState, v: f64, params: &KernelParams) -> PhaseState {
    let (c, _) = params.coefficient_table();
    let modes = state
        .modes
        .iter()
        .zip(&c)
        .map(|(&f, &ck)| f + ck.sqrt() * state.u)
        .collect();
    PhaseState { x: state.u, v, modes }
}

/// `exp(-1/t)` continued by zero: the building block of the smooth cutoff.
fn bump(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Smooth cutoff: exactly 1 on `|x| <= r`, exactly 0 on `|x| >= r + 1`, and the standard
/// `exp(-1/t)` partition-of-unity ramp in between. Infinitely differentiable, even in x,
/// nonincreasing in `|x|`.
pub fn cutoff_theta(r: f64, x: f64) -> f64 {
    debug_assert!(r > 0.0);
    let xi = x.abs() - r;
    if xi <= 0.0 {
        1.0
    } else if xi >= 1.0 {
        0.0
    } else {
        let up = bump(1.0 - xi);
        up / (up + bump(xi))
    }
}

/// Lyapunov function of the zero-mass system:
/// `(Phi(u) + (sum_k c_k) u^2/2) / gamma + (1/2) sum_k k^-2s f_k^2`.
///
/// Nonnegative whenever `Phi >= 0`, and always at least the weighted mode energy.
pub fn lyapunov_zm(
    state: &ZeroMassState,
    phi: &Potential,
    gamma: f64,
    params: &KernelParams,
    s: f64,
) -> f64 {
    let well = phi.value(state.u) + 0.5 * params.mode_sum() * state.u * state.u;
    well / gamma + 0.5 * weighted_mode_sum_sq(&state.modes, s)
}

/// Empirical check of `c (Phi(x) + 1) >= x^2` on a symmetric grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    /// Smallest constant that works on the base grid, or `None` when the ratio keeps
    /// growing on the widened grid (no finite constant is plausible).
    pub constant: Option<f64>,
    /// `Phi >= 0` everywhere on the base grid.
    pub nonnegative: bool,
    pub base_max: f64,
    pub extended_max: f64,
}

/// Ratio maximum of `ratio` over a symmetric grid, ignoring non-finite values (overflowed
/// potentials produce NaN ratios at the far ends).
fn grid_max(ratio: impl Fn(f64) -> f64, span: f64, n_points: usize) -> f64 {
    let mut max = f64::NEG_INFINITY;
    for i in 0..n_points {
        let x = -span + 2.0 * span * i as f64 / (n_points - 1) as f64;
        let r = ratio(x);
        if r.is_finite() && r > max {
            max = r;
        }
    }
    max
}

/// Verdict rule shared by both validators: a bound is plausible when widening the grid
/// four-fold moves the maximum by less than 5%. Ratios that are genuinely bounded flatten
/// out; unbounded ones keep climbing well past that.
fn looks_bounded(base_max: f64, extended_max: f64) -> bool {
    extended_max <= (base_max * 1.05).max(1e-12)
}

pub fn validate_growth(phi: impl Fn(f64) -> f64, span: f64, n_points: usize) -> GrowthReport {
    let ratio = |x: f64| x * x / (phi(x) + 1.0);
    let base_max = grid_max(&ratio, span, n_points);
    let extended_max = grid_max(&ratio, 4.0 * span, 4 * n_points);
    let mut nonnegative = true;
    for i in 0..n_points {
        let x = -span + 2.0 * span * i as f64 / (n_points - 1) as f64;
        if !(phi(x) >= 0.0) {
            nonnegative = false;
            break;
        }
    }
    let constant = looks_bounded(base_max, extended_max).then_some(base_max.max(0.0));
    GrowthReport { constant, nonnegative, base_max, extended_max }
}

/// Empirical check of `Phi'(x) y <= c (Phi(x) + |y|^n + 1)` on a symmetric 2-d grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DissipativityReport {
    /// Smallest constant that works on the base grid, or `None` when the ratio keeps
    /// growing on the widened grid.
    pub constant: Option<f64>,
    pub exponent: f64,
    pub base_max: f64,
    pub extended_max: f64,
}

pub fn validate_dissipativity(
    phi: impl Fn(f64) -> f64,
    dphi: impl Fn(f64) -> f64,
    n: f64,
    span: f64,
    n_points: usize,
) -> DissipativityReport {
    let sweep = |sp: f64, np: usize| -> f64 {
        let mut max = f64::NEG_INFINITY;
        for i in 0..np {
            let x = -sp + 2.0 * sp * i as f64 / (np - 1) as f64;
            for j in 0..np {
                let y = -sp + 2.0 * sp * j as f64 / (np - 1) as f64;
                let r = dphi(x) * y / (phi(x) + y.abs().powf(n) + 1.0);
                if r.is_finite() && r > max {
                    max = r;
                }
            }
        }
        max
    };
    let base_max = sweep(span, n_points);
    let extended_max = sweep(4.0 * span, 4 * n_points);
    // c >= 0 by convention; a ratio that is negative everywhere needs no constant at all.
    let constant = looks_bounded(base_max, extended_max).then_some(base_max.max(0.0));
    DissipativityReport { constant, exponent: n, base_max, extended_max }
}
