//! Estimators over trajectories and ensembles: pathwise sup errors between coupled
//! systems, mean-square displacement and its log-log scaling exponent, force
//! autocovariance, exit times, ensemble summaries, and the sup-moment of a driven OU mode.

use crate::dynamics::ou_pair_weights;
use crate::model::{LangevinState, PhaseState, ZeroMassState};
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("trajectories have different lengths ({a} vs {b})")]
    LengthMismatch { a: usize, b: usize },
    #[error("empty ensemble")]
    EmptyEnsemble,
    #[error("projection needs a velocity component on both trajectories")]
    NoVelocity,
    #[error("log-log fit needs at least 3 points in the window, found {found}")]
    WindowTooSmall { found: usize },
    #[error("log-log fit needs positive coordinates (t = {t}, y = {y})")]
    NonPositive { t: f64, y: f64 },
    #[error("lag {lag} lies outside the trajectory span {span}")]
    LagOutOfRange { lag: f64, span: f64 },
    #[error("lag {lag} is not a grid multiple of dt = {dt}")]
    OffGridLag { lag: f64, dt: f64 },
}

/// Read-only view of any system state, so estimators can mix state types.
pub trait StateView {
    fn position(&self) -> f64;
    fn velocity(&self) -> Option<f64>;
    /// The norm the system's own phase space carries; `s` weights the modes where modes
    /// exist and is ignored otherwise.
    fn weighted_norm(&self, s: f64) -> f64;
}

impl StateView for PhaseState {
    fn position(&self) -> f64 {
        self.x
    }
    fn velocity(&self) -> Option<f64> {
        Some(self.v)
    }
    fn weighted_norm(&self, s: f64) -> f64 {
        self.norm_minus_s(s)
    }
}

impl StateView for ZeroMassState {
    fn position(&self) -> f64 {
        self.u
    }
    fn velocity(&self) -> Option<f64> {
        None
    }
    fn weighted_norm(&self, s: f64) -> f64 {
        self.norm_minus_s(s)
    }
}

impl StateView for LangevinState {
    fn position(&self) -> f64 {
        self.u
    }
    fn velocity(&self) -> Option<f64> {
        Some(self.p)
    }
    fn weighted_norm(&self, _s: f64) -> f64 {
        self.norm()
    }
}

/// Which coordinates a pairwise comparison runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projection {
    /// `|x_a - x_b|`.
    Position,
    /// `|x_a - x_b| + |v_a - v_b|`: the distance the momentum-resolved limit controls.
    PositionVelocity,
}

/// `max_i` of the projected distance between two same-grid trajectories.
pub fn sup_error<A: StateView, B: StateView>(
    a: &[A],
    b: &[B],
    projection: Projection,
) -> Result<f64, AnalysisError> {
    if a.len() != b.len() {
        return Err(AnalysisError::LengthMismatch { a: a.len(), b: b.len() });
    }
    let mut sup = 0.0f64;
    for (sa, sb) in a.iter().zip(b) {
        let d = match projection {
            Projection::Position => (sa.position() - sb.position()).abs(),
            Projection::PositionVelocity => {
                let (va, vb) = match (sa.velocity(), sb.velocity()) {
                    (Some(va), Some(vb)) => (va, vb),
                    _ => return Err(AnalysisError::NoVelocity),
                };
                (sa.position() - sb.position()).abs() + (va - vb).abs()
            }
        };
        sup = sup.max(d);
    }
    Ok(sup)
}

/// Mean-square displacement at one recorded time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MsdPoint {
    pub t: f64,
    pub mean_square: f64,
    pub std_error: f64,
}

/// Ensemble `E[x(t)^2]` at every recorded time. `positions[j]` is trajectory `j` sampled
/// at `times`; all trajectories must share that grid.
pub fn msd(times: &[f64], positions: &[Vec<f64>]) -> Result<Vec<MsdPoint>, AnalysisError> {
    if positions.is_empty() {
        return Err(AnalysisError::EmptyEnsemble);
    }
    for p in positions {
        if p.len() != times.len() {
            return Err(AnalysisError::LengthMismatch { a: times.len(), b: p.len() });
        }
    }
    let n = positions.len() as f64;
    let mut out = Vec::with_capacity(times.len());
    for (i, &t) in times.iter().enumerate() {
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for p in positions {
            let sq = p[i] * p[i];
            sum += sq;
            sum_sq += sq * sq;
        }
        let mean = sum / n;
        let var = (sum_sq / n - mean * mean).max(0.0);
        // A single trajectory cannot estimate the spread; NaN says "unknown", not "zero".
        let std_error = if positions.len() > 1 { (var / (n - 1.0)).sqrt() } else { f64::NAN };
        out.push(MsdPoint { t, mean_square: mean, std_error });
    }
    Ok(out)
}

/// Ordinary least squares of `log y` against `log t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub std_error: f64,
    pub intercept: f64,
    pub n_points: usize,
}

/// Fit over the points with `t` inside `[window.0, window.1]` (inclusive).
pub fn loglog_slope(points: &[(f64, f64)], window: (f64, f64)) -> Result<SlopeFit, AnalysisError> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(t, y) in points {
        if t < window.0 || t > window.1 {
            continue;
        }
        if t <= 0.0 || y <= 0.0 {
            return Err(AnalysisError::NonPositive { t, y });
        }
        xs.push(t.ln());
        ys.push(y.ln());
    }
    let n = xs.len();
    if n < 3 {
        return Err(AnalysisError::WindowTooSmall { found: n });
    }
    let nf = n as f64;
    let x_mean = xs.iter().sum::<f64>() / nf;
    let y_mean = ys.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..n {
        let dx = xs[i] - x_mean;
        sxx += dx * dx;
        sxy += dx * (ys[i] - y_mean);
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let mut ss_res = 0.0;
    for i in 0..n {
        let r = ys[i] - intercept - slope * xs[i];
        ss_res += r * r;
    }
    let std_error = (ss_res / (nf - 2.0) / sxx).sqrt();
    Ok(SlopeFit { slope, std_error, intercept, n_points: n })
}

/// Autocovariance estimate at one lag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutocovPoint {
    pub lag: f64,
    pub cov: f64,
    pub std_error: f64,
}

/// Fixed-origin ensemble autocovariance: for each requested lag, the mean over
/// trajectories of `F(0) * F(lag)`. `centered` subtracts the ensemble means first
/// (yielding a covariance); otherwise this is the raw second moment, the right estimator
/// for series known to have mean zero.
pub fn autocov(
    ensemble: &[Vec<f64>],
    dt: f64,
    lags: &[f64],
    centered: bool,
) -> Result<Vec<AutocovPoint>, AnalysisError> {
    if ensemble.is_empty() {
        return Err(AnalysisError::EmptyEnsemble);
    }
    let len = ensemble[0].len();
    for series in ensemble {
        if series.len() != len {
            return Err(AnalysisError::LengthMismatch { a: len, b: series.len() });
        }
    }
    let span = (len.saturating_sub(1)) as f64 * dt;
    let n = ensemble.len() as f64;
    let mut out = Vec::with_capacity(lags.len());
    for &lag in lags {
        if lag < 0.0 || lag > span {
            return Err(AnalysisError::LagOutOfRange { lag, span });
        }
        let steps = lag / dt;
        let idx = steps.round() as usize;
        if (steps - steps.round()).abs() > 1e-9 {
            return Err(AnalysisError::OffGridLag { lag, dt });
        }
        let (mut m0, mut ml) = (0.0, 0.0);
        if centered {
            for series in ensemble {
                m0 += series[0];
                ml += series[idx];
            }
            m0 /= n;
            ml /= n;
        }
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for series in ensemble {
            let prod = (series[0] - m0) * (series[idx] - ml);
            sum += prod;
            sum_sq += prod * prod;
        }
        let mean = sum / n;
        let var = (sum_sq / n - mean * mean).max(0.0);
        let std_error = if ensemble.len() > 1 { (var / (n - 1.0)).sqrt() } else { 0.0 };
        out.push(AutocovPoint { lag, cov: mean, std_error });
    }
    Ok(out)
}

/// What trips the exit clock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExitCriterion {
    /// `|x(t)| >= R`.
    Position,
    /// Weighted state norm `>= R`, with mode weight exponent `s`.
    Norm { s: f64 },
}

/// First grid time at which the criterion is met, or `None` if it never is.
pub fn exit_time<S: StateView>(
    states: &[S],
    dt: f64,
    radius: f64,
    criterion: ExitCriterion,
) -> Option<f64> {
    for (i, state) in states.iter().enumerate() {
        let value = match criterion {
            ExitCriterion::Position => state.position().abs(),
            ExitCriterion::Norm { s } => state.weighted_norm(s),
        };
        if value >= radius {
            return Some(i as f64 * dt);
        }
    }
    None
}

/// Monte Carlo estimate of `E sup_{t <= T} f(t)^{2q}` for the driven mode
/// `f(t) = sqrt(2 kappa) int_0^t exp(-eta (t-r)) dW(r)`, integrated by exact OU updates
/// from `f(0) = 0`. The estimate scales exactly as `kappa^q` for a fixed RNG stream,
/// and `eta^{q-1} / kappa^q` times it stays bounded as `eta` grows.
pub fn ou_sup_moment(
    eta: f64,
    kappa: f64,
    q: f64,
    t_final: f64,
    dt: f64,
    n_traj: usize,
    rng: &mut impl Rng,
) -> f64 {
    let n_steps = (t_final / dt).round() as usize;
    let w = ou_pair_weights(eta, dt);
    // sqrt(2 kappa) = sqrt(kappa/eta) * sqrt(2 eta): rescale the unit-amplitude integral.
    let noise_std = (kappa / eta * w.var_integral).sqrt();
    let mut total = 0.0;
    for _ in 0..n_traj {
        let mut f = 0.0f64;
        let mut sup = 0.0f64;
        for _ in 0..n_steps {
            let g: f64 = rng.sample(StandardNormal);
            f = w.decay * f + noise_std * g;
            sup = sup.max(f.abs());
        }
        total += sup.powf(2.0 * q);
    }
    total / n_traj as f64
}

/// Summary of one scalar per trajectory across an ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleStats {
    pub n: usize,
    /// Trajectories that blew up and were excluded from the samples.
    pub aborted: usize,
    pub mean: f64,
    pub std_error: f64,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
}

/// Linear-interpolation quantile on sorted data (the common "type 7" rule).
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

impl EnsembleStats {
    pub fn from_samples(samples: &[f64], aborted: usize) -> Result<Self, AnalysisError> {
        if samples.is_empty() {
            return Err(AnalysisError::EmptyEnsemble);
        }
        let n = samples.len();
        let nf = n as f64;
        let mean = samples.iter().sum::<f64>() / nf;
        let std_error = if n > 1 {
            let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (nf - 1.0);
            (var / nf).sqrt()
        } else {
            0.0
        };
        let mut sorted = samples.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("samples must not contain NaN"));
        Ok(Self {
            n,
            aborted,
            mean,
            std_error,
            median: quantile_sorted(&sorted, 0.5),
            q25: quantile_sorted(&sorted, 0.25),
            q75: quantile_sorted(&sorted, 0.75),
        })
    }
}
