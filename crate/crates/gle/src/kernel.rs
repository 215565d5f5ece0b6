//! Power-law memory kernels as truncated sums of exponentials.
//!
//! The mode ladder `c_k = k^-(1+alpha*beta)`, `lambda_k = k^-beta` gives
//!
//! ```text
//! K(t) = sum_{k=1}^{N} c_k exp(-lambda_k t)
//! ```
//!
//! whose infinite-N tail behaves like `Gamma(alpha)/beta * t^-alpha`. Everything downstream
//! (integrators, limit studies) works with a finite truncation `N`, so this module also
//! quantifies what the truncation forgets: the dropped mass `sum_{k>N} c_k` is bounded by
//! `N^-(alpha*beta) / (alpha*beta)` by integral comparison, and the dropped part of the
//! integrated kernel `sum_{k>N} c_k/lambda_k` by `N^-((alpha-1)*beta) / ((alpha-1)*beta)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("mode index must be at least 1")]
    ZeroMode,
    #[error("alpha and beta must be positive and finite (alpha = {alpha}, beta = {beta})")]
    BadExponents { alpha: f64, beta: f64 },
    #[error("mode count must be at least 1")]
    NoModes,
    #[error("mode weight k^-(1+alpha*beta) underflows at k = {k}")]
    WeightUnderflow { k: usize },
    #[error("kernel time must be nonnegative (t = {t})")]
    NegativeTime { t: f64 },
    #[error("scale must be positive and finite (eps = {eps})")]
    BadScale { eps: f64 },
    #[error("mode mass sum_k c_k diverges: alpha*beta = {product} <= 1")]
    DivergentTail { product: f64 },
    #[error("integrated kernel sum_k c_k/lambda_k diverges: (alpha-1)*beta = {product} <= 1")]
    DivergentDrag { product: f64 },
}

/// Exponent pair and truncation level of one kernel.
///
/// `alpha` sets the tail decay `K(t) ~ t^-alpha`, `beta` the mode-rate spacing. Constructed
/// values always satisfy `alpha > 0`, `beta > 0` and have representable mode weights; the
/// standard constructor also requires `n_modes >= 1` (see [`KernelParams::markovian`] for the
/// deliberate memory-free exception).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    alpha: f64,
    beta: f64,
    n_modes: usize,
}

impl KernelParams {
    pub fn new(alpha: f64, beta: f64, n_modes: usize) -> Result<Self, KernelError> {
        if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(KernelError::BadExponents { alpha, beta });
        }
        if n_modes == 0 {
            return Err(KernelError::NoModes);
        }
        let params = Self { alpha, beta, n_modes };
        // The weights decrease in k, so checking the last mode covers the whole ladder.
        params.mode_coefficients(n_modes)?;
        Ok(params)
    }

    /// Degenerate kernel with no modes at all: `K === 0`, plain Langevin friction only.
    ///
    /// Useful as a control case (memory-free diffusion, zero random force). Mode-indexed
    /// operations and tail bounds are not meaningful on it and keep returning errors.
    pub fn markovian(alpha: f64, beta: f64) -> Result<Self, KernelError> {
        if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(KernelError::BadExponents { alpha, beta });
        }
        Ok(Self { alpha, beta, n_modes: 0 })
    }

    /// Smallest truncation whose dropped mode mass stays below `tol`, capped at `max_modes`.
    pub fn with_auto_modes(
        alpha: f64,
        beta: f64,
        tol: f64,
        max_modes: usize,
    ) -> Result<Self, KernelError> {
        let probe = Self::new(alpha, beta, 1)?;
        let product = alpha * beta;
        if product <= 1.0 {
            return Err(KernelError::DivergentTail { product });
        }
        if !(tol > 0.0) || max_modes == 0 {
            return Err(KernelError::NoModes);
        }
        // tail_bound(n) = n^-(alpha*beta) / (alpha*beta) < tol  <=>  n > (tol*alpha*beta)^(-1/(alpha*beta))
        let raw = (tol * product).powf(-1.0 / product);
        let mut n = raw.ceil() as usize;
        if raw.ceil() == raw {
            // The bound is strict; an exact hit needs one more mode.
            n += 1;
        }
        Self::new(probe.alpha, probe.beta, n.clamp(1, max_modes))
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// `(c_k, lambda_k)` for one mode index `k >= 1`.
    pub fn mode_coefficients(&self, k: usize) -> Result<(f64, f64), KernelError> {
        if k == 0 {
            return Err(KernelError::ZeroMode);
        }
        let kf = k as f64;
        let c = kf.powf(-(1.0 + self.alpha * self.beta));
        let lambda = kf.powf(-self.beta);
        // Both are positive for every representable input; only underflow to zero can break that.
        if !(c > 0.0 && lambda > 0.0) {
            return Err(KernelError::WeightUnderflow { k });
        }
        Ok((c, lambda))
    }

    /// All mode weights `(c_1..c_N, lambda_1..lambda_N)`.
    pub fn coefficient_table(&self) -> (Vec<f64>, Vec<f64>) {
        let mut c = Vec::with_capacity(self.n_modes);
        let mut lambda = Vec::with_capacity(self.n_modes);
        for k in 1..=self.n_modes {
            // Representability was checked at construction time.
            let (ck, lk) = self.mode_coefficients(k).expect("validated at construction");
            c.push(ck);
            lambda.push(lk);
        }
        (c, lambda)
    }

    /// Truncated mode mass `sum_{k<=N} c_k = K(0)`.
    pub fn mode_sum(&self) -> f64 {
        let (c, _) = self.coefficient_table();
        // Ascending-magnitude order keeps the summation error at a few ulps.
        c.iter().rev().sum()
    }

    /// `K(t) = sum_{k<=N} c_k exp(-lambda_k t)` for `t >= 0`.
    pub fn kernel_eval(&self, t: f64) -> Result<f64, KernelError> {
        if !(t >= 0.0) {
            return Err(KernelError::NegativeTime { t });
        }
        let (c, lambda) = self.coefficient_table();
        let mut sum = 0.0;
        for k in (0..self.n_modes).rev() {
            sum += c[k] * (-lambda[k] * t).exp();
        }
        Ok(sum)
    }

    /// Accelerated kernel `K_eps(t) = (1/eps) K(t/eps)`; same mode ladder, rates
    /// `lambda_k/eps`, weights `c_k/eps`.
    pub fn kernel_scaled_eval(&self, eps: f64, t: f64) -> Result<f64, KernelError> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(KernelError::BadScale { eps });
        }
        Ok(self.kernel_eval(t / eps)? / eps)
    }

    /// Integral-comparison bound on the dropped mode mass `sum_{k>N} c_k`.
    ///
    /// Requires a summable ladder, `alpha*beta > 1`.
    pub fn tail_bound(&self) -> Result<f64, KernelError> {
        if self.n_modes == 0 {
            return Err(KernelError::NoModes);
        }
        let product = self.alpha * self.beta;
        if product <= 1.0 {
            return Err(KernelError::DivergentTail { product });
        }
        Ok((self.n_modes as f64).powf(-product) / product)
    }

    /// Total drag of the white-noise limit, `gamma + sum_{k<=N} c_k/lambda_k`, with the
    /// integral-comparison bound on the dropped part of the sum.
    ///
    /// `c_k/lambda_k = k^-(1+(alpha-1)*beta)` is summable only for `(alpha-1)*beta > 1`.
    pub fn effective_drag(&self, gamma: f64) -> Result<EffectiveDrag, KernelError> {
        let product = (self.alpha - 1.0) * self.beta;
        if product <= 1.0 {
            return Err(KernelError::DivergentDrag { product });
        }
        let (c, lambda) = self.coefficient_table();
        let mut sum = 0.0;
        for k in (0..self.n_modes).rev() {
            sum += c[k] / lambda[k];
        }
        let n = self.n_modes.max(1) as f64;
        Ok(EffectiveDrag {
            value: gamma + sum,
            truncation_bound: n.powf(-product) / product,
        })
    }
}

/// Drag coefficient of the white-noise limit plus the truncation error bound of its memory part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveDrag {
    pub value: f64,
    pub truncation_bound: f64,
}

/// Long-time behavior class selected by the exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// `alpha > 1`: integrable kernel, ordinary diffusion.
    Diffusive,
    /// `0 < alpha < 1`: heavy tail, subdiffusion.
    Subdiffusive,
    /// `alpha = 1`: the marginal case.
    Critical,
    /// Some strict inequality fails (ties included).
    Invalid,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Regime::Diffusive => "D",
            Regime::Subdiffusive => "SD",
            Regime::Critical => "C",
            Regime::Invalid => "invalid",
        };
        f.write_str(s)
    }
}

/// Outcome of the exponent/regularity check behind every study configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    pub regime: Regime,
    /// `alpha > 2` and `(alpha-2)*beta > 1`: the stronger summability needed by the
    /// white-noise limit's moment estimates. Reported, never required, by classification.
    pub strong_summability: bool,
    /// One entry per violated strict inequality; empty exactly when the regime is valid.
    pub violations: Vec<String>,
}

/// Classifies `(alpha, beta, s)` into a kernel regime.
///
/// All inequalities are strict; any tie lands in [`Regime::Invalid`] with the tied
/// inequality reported verbatim in `violations`. `s` is the mode-norm weight exponent used
/// by the state spaces (see `model`), constrained jointly with the exponents:
///
/// - D  (`alpha > 1`):     `beta > 1/(alpha-1)` and `1 < 2s < (alpha-1)*beta`
/// - SD (`0 < alpha < 1`): `beta > 1/alpha`     and `1 < 2s < alpha*beta`
/// - C  (`alpha = 1`):     `beta > 1`           and `1 < 2s < beta`
pub fn validate_regime(alpha: f64, beta: f64, s: f64) -> RegimeReport {
    let mut violations = Vec::new();
    if !(alpha > 0.0 && alpha.is_finite()) {
        violations.push(format!("alpha > 0 violated (alpha = {alpha})"));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        violations.push(format!("beta > 0 violated (beta = {beta})"));
    }
    if !violations.is_empty() {
        return RegimeReport { regime: Regime::Invalid, strong_summability: false, violations };
    }

    let two_s = 2.0 * s;
    let (candidate, upper, upper_name) = if alpha > 1.0 {
        let floor = 1.0 / (alpha - 1.0);
        if !(beta > floor) {
            violations
                .push(format!("beta > 1/(alpha-1) violated (beta = {beta}, 1/(alpha-1) = {floor})"));
        }
        (Regime::Diffusive, (alpha - 1.0) * beta, "(alpha-1)*beta")
    } else if alpha < 1.0 {
        let floor = 1.0 / alpha;
        if !(beta > floor) {
            violations.push(format!("beta > 1/alpha violated (beta = {beta}, 1/alpha = {floor})"));
        }
        (Regime::Subdiffusive, alpha * beta, "alpha*beta")
    } else {
        if !(beta > 1.0) {
            violations.push(format!("beta > 1 violated (beta = {beta})"));
        }
        (Regime::Critical, beta, "beta")
    };
    if !(two_s > 1.0) {
        violations.push(format!("1 < 2s violated (2s = {two_s})"));
    }
    if !(two_s < upper) {
        violations.push(format!("2s < {upper_name} violated (2s = {two_s}, {upper_name} = {upper})"));
    }

    let strong_summability = alpha > 2.0 && (alpha - 2.0) * beta > 1.0;
    let regime = if violations.is_empty() { candidate } else { Regime::Invalid };
    RegimeReport { regime, strong_summability, violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Partial sum plus Euler-Maclaurin tail; accurate far beyond the f64 comparisons below.
    fn zeta_oracle(p: f64) -> f64 {
        let n = 20_000u64;
        let mut sum = 0.0;
        for k in (1..=n).rev() {
            sum += (k as f64).powf(-p);
        }
        let nf = n as f64;
        sum + nf.powf(1.0 - p) / (p - 1.0) - 0.5 * nf.powf(-p) + p / 12.0 * nf.powf(-p - 1.0)
    }

    const ZETA3: f64 = 1.202_056_903_159_594_3;
    const ZETA5: f64 = 1.036_927_755_143_369_9;

    #[test]
    fn zeta_oracle_matches_reference_values() {
        assert!((zeta_oracle(3.0) - ZETA3).abs() < 1e-13);
        assert!((zeta_oracle(5.0) - ZETA5).abs() < 1e-13);
    }

    #[test]
    fn mode_coefficients_match_closed_forms() {
        let p = KernelParams::new(2.0, 2.0, 10).unwrap();
        assert_eq!(p.mode_coefficients(1).unwrap(), (1.0, 1.0));
        let (c2, l2) = p.mode_coefficients(2).unwrap();
        assert!((c2 - 0.03125).abs() < 1e-15);
        assert!((l2 - 0.25).abs() < 1e-15);

        let q = KernelParams::new(0.5, 4.0, 10).unwrap();
        let (c3, l3) = q.mode_coefficients(3).unwrap();
        assert!((c3 - 1.0 / 27.0).abs() < 1e-15);
        assert!((l3 - 1.0 / 81.0).abs() < 1e-15);
    }

    #[test]
    fn mode_coefficients_reject_index_zero() {
        let p = KernelParams::new(2.0, 2.0, 4).unwrap();
        assert_eq!(p.mode_coefficients(0), Err(KernelError::ZeroMode));
    }

    #[test]
    fn mode_weights_decrease_with_k() {
        let p = KernelParams::new(1.5, 3.0, 200).unwrap();
        let (c, lambda) = p.coefficient_table();
        for k in 1..c.len() {
            assert!(c[k] < c[k - 1]);
            assert!(lambda[k] < lambda[k - 1]);
            assert!(c[k] > 0.0 && lambda[k] > 0.0);
        }
    }

    #[test]
    fn constructor_rejects_bad_exponents_and_counts() {
        assert!(matches!(
            KernelParams::new(0.0, 2.0, 3),
            Err(KernelError::BadExponents { .. })
        ));
        assert!(matches!(
            KernelParams::new(2.0, -1.0, 3),
            Err(KernelError::BadExponents { .. })
        ));
        assert_eq!(KernelParams::new(2.0, 2.0, 0), Err(KernelError::NoModes));
        assert!(KernelParams::markovian(2.0, 2.0).unwrap().n_modes() == 0);
    }

    #[test]
    fn kernel_at_zero_approaches_zeta() {
        // K(0) = sum c_k with alpha*beta = 4 converges to zeta(5).
        let p = KernelParams::new(2.0, 2.0, 2000).unwrap();
        assert!((p.kernel_eval(0.0).unwrap() - ZETA5).abs() < 1e-12);

        // At modest N the dropped mass is far above rounding noise and brackets tightly:
        // integral comparison overestimates sum_{k>N} k^-5 by a factor under 1/0.9 at N = 50.
        let q = KernelParams::new(2.0, 2.0, 50).unwrap();
        let gap = zeta_oracle(5.0) - q.kernel_eval(0.0).unwrap();
        let bound = q.tail_bound().unwrap();
        assert!(gap > 0.9 * bound);
        assert!(gap <= bound);
    }

    #[test]
    fn single_mode_kernel_is_one_exponential() {
        let p = KernelParams::new(2.0, 2.0, 1).unwrap();
        let t = 7.25;
        assert!((p.kernel_eval(t).unwrap() - (-t).exp()).abs() < 1e-16);
    }

    #[test]
    fn kernel_rejects_negative_time() {
        let p = KernelParams::new(2.0, 2.0, 4).unwrap();
        assert!(matches!(p.kernel_eval(-0.5), Err(KernelError::NegativeTime { .. })));
        assert!(matches!(p.kernel_eval(f64::NAN), Err(KernelError::NegativeTime { .. })));
    }

    #[test]
    fn kernel_is_decreasing_and_log_convex() {
        // Completely monotone tails: K' < 0 and log K convex, checked on a geometric grid.
        let p = KernelParams::new(0.5, 4.0, 500).unwrap();
        let ts: Vec<f64> = (0..100).map(|i| 0.01 * 1.12f64.powi(i)).collect();
        let logk: Vec<f64> = ts.iter().map(|&t| p.kernel_eval(t).unwrap().ln()).collect();
        for i in 1..ts.len() {
            assert!(logk[i] < logk[i - 1]);
        }
        for i in 1..ts.len() - 1 {
            // Convexity of log K in t on an uneven grid: compare chord slopes.
            let left = (logk[i] - logk[i - 1]) / (ts[i] - ts[i - 1]);
            let right = (logk[i + 1] - logk[i]) / (ts[i + 1] - ts[i]);
            assert!(right >= left - 1e-12);
        }
    }

    #[test]
    fn truncation_gap_is_bounded_by_tail_bound() {
        for n in [5usize, 50, 400] {
            let small = KernelParams::new(1.25, 2.5, n).unwrap();
            let big = KernelParams::new(1.25, 2.5, 8 * n).unwrap();
            let gap = big.kernel_eval(0.0).unwrap() - small.kernel_eval(0.0).unwrap();
            assert!(gap >= 0.0);
            assert!(gap <= small.tail_bound().unwrap());
        }
    }

    #[test]
    fn scaled_kernel_identities() {
        let p = KernelParams::new(2.0, 2.0, 300).unwrap();
        // eps = 1 is the kernel itself, bit for bit.
        for t in [0.0, 0.3, 2.0, 50.0] {
            assert_eq!(p.kernel_scaled_eval(1.0, t).unwrap(), p.kernel_eval(t).unwrap());
        }
        // At t = 0 the scaling is a pure 1/eps factor.
        let k0 = p.kernel_eval(0.0).unwrap();
        assert!((p.kernel_scaled_eval(0.5, 0.0).unwrap() - 2.0 * k0).abs() < 1e-12);
        // One mode: K_eps(t) = (c_1/eps) exp(-lambda_1 t/eps) in closed form.
        let one = KernelParams::new(2.0, 2.0, 1).unwrap();
        let got = one.kernel_scaled_eval(0.1, 0.1).unwrap();
        assert!((got - 10.0 * (-1.0f64).exp()).abs() < 1e-13);
        assert!(matches!(p.kernel_scaled_eval(0.0, 1.0), Err(KernelError::BadScale { .. })));
        assert!(matches!(p.kernel_scaled_eval(-2.0, 1.0), Err(KernelError::BadScale { .. })));
    }

    #[test]
    fn scaling_identity_holds_exactly() {
        // eps * K_eps(t) == K(t/eps) is how the scaled evaluation is defined; dividing the
        // result back out reproduces it exactly.
        let p = KernelParams::new(0.75, 3.0, 64).unwrap();
        for &(eps, t) in &[(0.25, 1.0), (0.03125, 0.7), (4.0, 9.0)] {
            let lhs = eps * p.kernel_scaled_eval(eps, t).unwrap();
            let rhs = p.kernel_eval(t / eps).unwrap();
            assert_eq!(lhs.to_bits(), rhs.to_bits());
        }
    }

    #[test]
    fn tail_bound_values_and_divergence() {
        let p = KernelParams::new(2.0, 2.0, 100).unwrap();
        assert!((p.tail_bound().unwrap() - 2.5e-9).abs() < 1e-16);

        // N = 1 bound dominates the true dropped mass sum_{k>=2} k^-5.
        let one = KernelParams::new(2.0, 2.0, 1).unwrap();
        let true_tail = zeta_oracle(5.0) - 1.0;
        let bound = one.tail_bound().unwrap();
        assert!(bound >= true_tail);
        assert!((bound - 0.25).abs() < 1e-15);

        // alpha*beta <= 1 is rejected outright.
        let div = KernelParams::new(0.5, 2.0, 10).unwrap();
        assert!(matches!(div.tail_bound(), Err(KernelError::DivergentTail { .. })));
        // Approaching that boundary from above, the bound grows monotonically.
        let mut last = 0.0;
        for delta in [1.0, 0.5, 0.1, 0.01] {
            let near = KernelParams::new((1.0 + delta) / 2.0, 2.0, 10).unwrap();
            let b = near.tail_bound().unwrap();
            assert!(b > last);
            last = b;
        }
    }

    #[test]
    fn effective_drag_matches_zeta_oracle() {
        let p = KernelParams::new(2.0, 2.0, 20_000).unwrap();
        let d = p.effective_drag(1.0).unwrap();
        assert!((d.value - (1.0 + ZETA3)).abs() < 2e-9);
        assert!(d.truncation_bound < 2e-9);

        let q = KernelParams::new(3.0, 2.0, 20_000).unwrap();
        let d2 = q.effective_drag(1.0).unwrap();
        assert!((d2.value - (1.0 + ZETA5)).abs() < 1e-12);

        let div = KernelParams::new(1.5, 2.0, 100).unwrap();
        assert!(matches!(div.effective_drag(1.0), Err(KernelError::DivergentDrag { .. })));
    }

    #[test]
    fn auto_mode_selection_crosses_the_tolerance() {
        // alpha*beta = 4: N^-4/4 < 1e-8 first at N = 71.
        let p = KernelParams::with_auto_modes(2.0, 2.0, 1e-8, 10_000).unwrap();
        assert_eq!(p.n_modes(), 71);
        assert!(p.tail_bound().unwrap() < 1e-8);
        let prev = KernelParams::new(2.0, 2.0, 70).unwrap();
        assert!(prev.tail_bound().unwrap() >= 1e-8);

        // alpha*beta = 6: N^-6/6 crosses 1e-8 between 15 (1.46e-8) and 16 (9.93e-9).
        let q = KernelParams::with_auto_modes(3.0, 2.0, 1e-8, 10_000).unwrap();
        assert_eq!(q.n_modes(), 16);
        assert!(q.tail_bound().unwrap() < 1e-8);
        assert!(KernelParams::new(3.0, 2.0, 15).unwrap().tail_bound().unwrap() >= 1e-8);

        // alpha*beta = 2 wants 7072 modes; the cap wins.
        let capped = KernelParams::with_auto_modes(0.5, 4.0, 1e-8, 10_000).unwrap();
        assert_eq!(capped.n_modes(), 7072.min(10_000));
        let hard_cap = KernelParams::with_auto_modes(0.5, 4.0, 1e-8, 500).unwrap();
        assert_eq!(hard_cap.n_modes(), 500);
    }

    #[test]
    fn regime_classification_matches_the_strict_inequalities() {
        let d = validate_regime(2.0, 2.0, 0.75);
        assert_eq!(d.regime, Regime::Diffusive);
        assert!(d.violations.is_empty());
        assert!(!d.strong_summability);

        let sd = validate_regime(0.5, 4.0, 0.9);
        assert_eq!(sd.regime, Regime::Subdiffusive);
        assert!(sd.violations.is_empty());

        let c = validate_regime(1.0, 3.0, 0.9);
        assert_eq!(c.regime, Regime::Critical);
        assert!(c.violations.is_empty());

        let strong = validate_regime(3.0, 2.0, 0.75);
        assert_eq!(strong.regime, Regime::Diffusive);
        assert!(strong.strong_summability);
    }

    #[test]
    fn regime_ties_and_violations_are_invalid_with_reasons() {
        // beta at its floor for the subdiffusive family.
        let r = validate_regime(0.5, 1.0, 0.75);
        assert_eq!(r.regime, Regime::Invalid);
        assert!(r.violations.iter().any(|v| v.contains("beta > 1/alpha violated")));

        // 2s tie with the upper bound: (alpha-1)*beta = 2 = 2s.
        let tie = validate_regime(2.0, 2.0, 1.0);
        assert_eq!(tie.regime, Regime::Invalid);
        assert!(tie.violations.iter().any(|v| v.contains("2s < (alpha-1)*beta violated")));

        // s too small.
        let low = validate_regime(2.0, 2.0, 0.5);
        assert_eq!(low.regime, Regime::Invalid);
        assert!(low.violations.iter().any(|v| v.contains("1 < 2s violated")));

        // Critical family needs beta > 1.
        let crit = validate_regime(1.0, 1.0, 0.75);
        assert_eq!(crit.regime, Regime::Invalid);
        assert!(crit.violations.iter().any(|v| v.contains("beta > 1 violated")));
    }
}
