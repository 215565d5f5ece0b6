//! Brownian increments and exactly-sampled Ornstein-Uhlenbeck integrals, laid out so that
//! two systems integrated against the same grid see the same driving path.
//!
//! For a mode with rate `eta` over a step of length `h`, the exact update needs the pair
//!
//! ```text
//! dW = W(t+h) - W(t),   I = sqrt(2 eta) * int_t^{t+h} exp(-eta (t+h-r)) dW(r)
//! ```
//!
//! which is jointly Gaussian with `Var(dW) = h`, `Var(I) = 1 - exp(-2 eta h)` and
//! `Cov(dW, I) = sqrt(2 eta) (1 - exp(-eta h)) / eta`. Sampling `dW` first and then
//! `I = (Cov/h) dW + cond_std * xi` with an independent standard normal `xi` reproduces
//! that joint law, so the raw increments stay usable by a second, structurally different
//! system while the OU side remains consistent with them.

use rand::Rng;
use rand_distr::StandardNormal;

/// Precomputed one-step weights for the `(dW, I)` pair at rate `eta` and step `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuPairWeights {
    /// `exp(-eta h)`: deterministic decay of the mode over one step.
    pub decay: f64,
    /// `(1 - decay) / eta`: integral of the decay against a frozen source.
    pub ramp: f64,
    /// `Var(I) = 1 - exp(-2 eta h)`.
    pub var_integral: f64,
    /// `Cov(dW, I) = sqrt(2 eta) (1 - exp(-eta h)) / eta`.
    pub cov: f64,
    /// `Cov / h`: regression coefficient of `I` on `dW`.
    pub gain: f64,
    /// Standard deviation of `I` conditional on `dW`.
    pub cond_std: f64,
}

/// Conditional variance `Var(I) - Cov^2/h` as a function of `x = eta h`.
///
/// The direct expression cancels catastrophically for small `x` (both terms are
/// `2x + O(x^2)` while the difference is `x^3/6`), so below `x = 5e-3` it switches to the
/// series `x^3/6 - x^4/6 + 17 x^5/180`, whose next term is O(x^6) and already invisible
/// at the crossover.
fn conditional_variance(x: f64) -> f64 {
    if x < 5e-3 {
        let x3 = x * x * x;
        x3 / 6.0 - x3 * x / 6.0 + 17.0 / 180.0 * x3 * x * x
    } else {
        let em = -(-x).exp_m1();
        let em2 = -(-2.0 * x).exp_m1();
        em2 - 2.0 * em * em / x
    }
}

pub fn ou_pair_weights(eta: f64, h: f64) -> OuPairWeights {
    debug_assert!(eta > 0.0 && h > 0.0);
    let x = eta * h;
    let decay = (-x).exp();
    let one_minus = -(-x).exp_m1();
    let ramp = one_minus / eta;
    let var_integral = -(-2.0 * x).exp_m1();
    let cov = (2.0 * eta).sqrt() * one_minus / eta;
    OuPairWeights {
        decay,
        ramp,
        var_integral,
        cov,
        gain: cov / h,
        cond_std: conditional_variance(x).sqrt(),
    }
}

/// One realization of the driving noise on a time grid: raw Brownian increments for lanes
/// `0..=N` (lane 0 is the velocity noise `W_0`), plus, when built for an OU system, the
/// jointly sampled exponential integrals for lanes `1..=N`.
///
/// Lane `k` is filled from its own RNG stream, so a trajectory's noise does not depend on
/// how many other trajectories run or in what order.
#[derive(Debug, Clone)]
pub struct CoupledNoiseGrid {
    dt: f64,
    n_steps: usize,
    n_modes: usize,
    /// Step-major, width `n_modes + 1`.
    dw: Vec<f64>,
    ou: Option<OuIntegrals>,
}

#[derive(Debug, Clone)]
struct OuIntegrals {
    rates: Vec<f64>,
    /// Step-major, width `n_modes`.
    values: Vec<f64>,
}

impl CoupledNoiseGrid {
    /// Raw increments only; enough for systems whose noise enters linearly per step.
    pub fn generate<R: Rng>(
        dt: f64,
        n_steps: usize,
        n_modes: usize,
        mut lane_rng: impl FnMut(usize) -> R,
    ) -> Self {
        let width = n_modes + 1;
        let mut dw = vec![0.0; n_steps * width];
        let sqrt_dt = dt.sqrt();
        for lane in 0..width {
            let mut rng = lane_rng(lane);
            for step in 0..n_steps {
                let g: f64 = rng.sample(StandardNormal);
                dw[step * width + lane] = sqrt_dt * g;
            }
        }
        Self { dt, n_steps, n_modes, dw, ou: None }
    }

    /// Increments plus OU integrals for the given per-mode rates (`rates[k]` drives lane
    /// `k + 1`). Each mode lane consumes two normals per step, increment first.
    pub fn generate_with_ou<R: Rng>(
        dt: f64,
        n_steps: usize,
        rates: &[f64],
        mut lane_rng: impl FnMut(usize) -> R,
    ) -> Self {
        let mut lanes: Vec<R> = (0..=rates.len()).map(&mut lane_rng).collect();
        Self::fill_with_ou(dt, n_steps, rates, &mut lanes)
    }

    /// Same as [`Self::generate_with_ou`] but continuing existing lane streams, so a long
    /// trajectory can be driven in bounded-memory segments.
    pub fn fill_with_ou<R: Rng>(
        dt: f64,
        n_steps: usize,
        rates: &[f64],
        lanes: &mut [R],
    ) -> Self {
        let n_modes = rates.len();
        assert_eq!(lanes.len(), n_modes + 1);
        let width = n_modes + 1;
        let mut dw = vec![0.0; n_steps * width];
        let mut values = vec![0.0; n_steps * n_modes];
        let sqrt_dt = dt.sqrt();
        {
            let rng = &mut lanes[0];
            for step in 0..n_steps {
                let g: f64 = rng.sample(StandardNormal);
                dw[step * width] = sqrt_dt * g;
            }
        }
        for (k, &eta) in rates.iter().enumerate() {
            let w = ou_pair_weights(eta, dt);
            let rng = &mut lanes[k + 1];
            for step in 0..n_steps {
                let g: f64 = rng.sample(StandardNormal);
                let xi: f64 = rng.sample(StandardNormal);
                let incr = sqrt_dt * g;
                dw[step * width + k + 1] = incr;
                values[step * n_modes + k] = w.gain * incr + w.cond_std * xi;
            }
        }
        Self { dt, n_steps, n_modes, dw, ou: Some(OuIntegrals { rates: rates.to_vec(), values }) }
    }

    /// All-zero increments, no OU block: deterministic drift-only runs.
    pub fn zeros(dt: f64, n_steps: usize, n_modes: usize) -> Self {
        let width = n_modes + 1;
        Self { dt, n_steps, n_modes, dw: vec![0.0; n_steps * width], ou: None }
    }

    /// All-zero increments and integrals with the OU block present, for drift-only runs
    /// of the mode systems.
    pub fn zeros_with_rates(dt: f64, n_steps: usize, rates: &[f64]) -> Self {
        let n_modes = rates.len();
        Self {
            dt,
            n_steps,
            n_modes,
            dw: vec![0.0; n_steps * (n_modes + 1)],
            ou: Some(OuIntegrals { rates: rates.to_vec(), values: vec![0.0; n_steps * n_modes] }),
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Velocity-lane increment for one step.
    pub fn dw0(&self, step: usize) -> f64 {
        self.dw[step * (self.n_modes + 1)]
    }

    /// Mode-lane increment, `mode` 0-based.
    pub fn dw_mode(&self, step: usize, mode: usize) -> f64 {
        self.dw[step * (self.n_modes + 1) + mode + 1]
    }

    /// Jointly sampled OU integral, `mode` 0-based. Only valid when the grid was built
    /// with an OU block.
    pub fn ou_integral(&self, step: usize, mode: usize) -> f64 {
        let ou = self.ou.as_ref().expect("grid has no OU block");
        ou.values[step * self.n_modes + mode]
    }

    pub fn ou_rates(&self) -> Option<&[f64]> {
        self.ou.as_ref().map(|ou| ou.rates.as_slice())
    }
}
