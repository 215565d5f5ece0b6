//! End-to-end checks of the quantitative claims the crate is built around. One test per
//! claim; each prints a `[PASS]` line with the measured numbers, so running with
//! `--nocapture` doubles as a verification report.

mod common;

use gle::analysis::{ou_sup_moment, StateView};
use gle::dynamics::{
    ou_pair_weights, simulate_observe, step_scaled, CoupledNoiseGrid, GleStepper, System,
    SystemKind, SystemSpec, WhiteNoiseStepper, ZeroMassStepper,
};
use gle::kernel::KernelParams;
use gle::model::{shift_initial, LangevinState, PhaseState, Potential};
use gle::runner::report::convergence_csv;
use gle::runner::{
    run_fdt_check, run_msd_study, run_small_mass_study, run_white_noise_study, Config,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::process::Command;

fn load(name: &str) -> Config {
    Config::from_path(&common::config_path(name)).unwrap()
}

/// With `alpha = 1/2` the prefactor of the kernel tail is `Gamma(1/2) / beta`.
#[test]
fn kernel_tail_tracks_the_power_law_constant() {
    let params = KernelParams::new(0.5, 4.0, 2000).unwrap();
    let target = std::f64::consts::PI.sqrt() / 4.0;
    let times = [1e2f64, 1e3, 1e4];
    let scaled: Vec<f64> =
        times.iter().map(|&t| t.sqrt() * params.kernel_eval(t).unwrap()).collect();
    for (&t, &s) in times.iter().zip(&scaled) {
        let rel = (s / target - 1.0).abs();
        assert!(rel <= 0.10, "t = {t}: t^alpha K = {s:.6} is {:.1}% off {target:.6}", 100.0 * rel);
    }
    let hi = scaled.iter().cloned().fold(f64::MIN, f64::max);
    let lo = scaled.iter().cloned().fold(f64::MAX, f64::min);
    let spread = hi / lo - 1.0;
    assert!(spread <= 0.05, "plateau wobbles by {:.1}% across two decades", 100.0 * spread);
    println!(
        "[PASS] t^alpha K(t) = {:.5} / {:.5} / {:.5} against {:.5} (spread {:.2}%)",
        scaled[0],
        scaled[1],
        scaled[2],
        target,
        100.0 * spread
    );
}

#[test]
fn force_autocovariance_matches_the_kernel() {
    let result = run_fdt_check(&load("fdt.toml")).unwrap();
    let mut worst = 0.0f64;
    for row in &result.rows {
        worst = worst.max(row.z_score.abs());
        assert!(
            row.z_score.abs() <= 3.0,
            "lag {}: cov {:.5} vs kernel {:.5} is {:.2} standard errors out",
            row.lag,
            row.covariance,
            row.kernel,
            row.z_score
        );
    }
    println!("[PASS] {} lags, max |z| = {:.3}", result.rows.len(), worst);
}

/// With the velocity pinned at zero the modes are decoupled OU processes, so the exact
/// update must hold their stationary unit variance for any step size and any epsilon.
/// The tolerance is three standard errors of an AR(1) sample variance,
/// `Var = (2/n) (1 + rho^2) / (1 - rho^2)` with `rho` the one-step decay.
#[test]
fn mode_variances_stay_stationary_under_the_scaled_step() {
    let params = KernelParams::new(2.0, 2.0, 5).unwrap();
    let (_, lambdas) = params.coefficient_table();
    let dt = 1.0;
    let n_steps = 100_000usize;
    let mut worst = 0.0f64;
    for (run, &epsilon) in [1.0, 1e-2].iter().enumerate() {
        let spec = SystemSpec {
            kind: SystemKind::ScaledGle { mass: 1.0, epsilon },
            gamma: 1.0,
            phi: Potential::Quadratic,
            params: params.clone(),
            cutoff_radius: None,
        };
        let rates = GleStepper::new(&spec, dt).unwrap().ou_rates().unwrap().to_vec();
        let grid = CoupledNoiseGrid::generate_with_ou(dt, n_steps, &rates, |lane| {
            ChaCha8Rng::seed_from_u64(31_000 + 100 * run as u64 + lane as u64)
        });
        let mut init_rng = ChaCha8Rng::seed_from_u64(77 + run as u64);
        let modes = (0..params.n_modes()).map(|_| init_rng.sample(StandardNormal)).collect();
        let mut state = PhaseState { x: 0.0, v: 0.0, modes };
        let mut sum = vec![0.0f64; params.n_modes()];
        let mut sum_sq = vec![0.0f64; params.n_modes()];
        for step in 0..n_steps {
            state.v = 0.0;
            state = step_scaled(&state, &spec, &grid, step).unwrap();
            for (k, &z) in state.modes.iter().enumerate() {
                sum[k] += z;
                sum_sq[k] += z * z;
            }
        }
        let n = n_steps as f64;
        for k in 0..params.n_modes() {
            let mean = sum[k] / n;
            let var = sum_sq[k] / n - mean * mean;
            let rho = (-(lambdas[k] / epsilon) * dt).exp();
            let se = (2.0 * (1.0 + rho * rho) / ((1.0 - rho * rho) * n)).sqrt();
            worst = worst.max((var - 1.0).abs() / se);
            assert!(
                (var - 1.0).abs() <= 3.0 * se,
                "eps {epsilon}, mode {}: variance {var:.4} outside 1 +- {:.4}",
                k + 1,
                3.0 * se
            );
        }
    }
    println!("[PASS] 2 epsilons x 5 modes stationary, worst deviation {worst:.2} SE");
}

#[test]
fn position_coupling_error_vanishes_with_the_mass() {
    let table = run_small_mass_study(&load("small_mass.toml")).unwrap();
    let medians: Vec<f64> = table.rows.iter().map(|r| r.stats.median).collect();
    for pair in medians.windows(2) {
        assert!(pair[1] < pair[0], "medians {medians:?} are not decreasing");
    }
    let ratio = medians[0] / medians[medians.len() - 1];
    assert!(ratio >= 3.0, "two decades of mass only bought a {ratio:.2}x drop");
    println!(
        "[PASS] sup-error medians {:.4} / {:.4} / {:.4}, overall drop {ratio:.1}x",
        medians[0], medians[1], medians[2]
    );
}

#[test]
fn phase_coupling_error_vanishes_with_epsilon() {
    let table = run_white_noise_study(&load("white_noise.toml")).unwrap();
    let medians: Vec<f64> = table.rows.iter().map(|r| r.stats.median).collect();
    for pair in medians.windows(2) {
        assert!(pair[1] < pair[0], "medians {medians:?} are not decreasing");
    }
    let n = medians.len();
    let last = medians[n - 2] / medians[n - 1];
    assert!(last >= 2.0, "last decade of epsilon only bought a {last:.2}x drop");
    println!(
        "[PASS] sup-error medians {:.4} / {:.4} / {:.4}, last-decade drop {last:.1}x",
        medians[0], medians[1], medians[2]
    );
}

#[test]
fn mean_coupling_error_separates_cleanly_across_epsilon() {
    let table = run_white_noise_study(&load("white_noise.toml")).unwrap();
    let first = &table.rows.first().unwrap().stats;
    let last = &table.rows.last().unwrap().stats;
    assert!(
        2.0 * last.mean <= first.mean,
        "means {:.4} -> {:.4} did not halve",
        first.mean,
        last.mean
    );
    let first_lo = first.mean - 1.96 * first.std_error;
    let last_hi = last.mean + 1.96 * last.std_error;
    assert!(
        last_hi < first_lo,
        "confidence intervals overlap: [{last_hi:.4} ..] vs [.. {first_lo:.4}]"
    );
    println!(
        "[PASS] means {:.4} -> {:.4} ({:.1}x), 95% intervals disjoint ({:.4} < {:.4})",
        first.mean,
        last.mean,
        first.mean / last.mean,
        last_hi,
        first_lo
    );
}

#[test]
fn displacement_exponents_match_both_memory_regimes() {
    let mut seen = Vec::new();
    for (name, want) in [("msd_diffusive.toml", 1.0), ("msd_subdiffusive.toml", 0.5)] {
        let result = run_msd_study(&load(name)).unwrap();
        let slope = result.fit.slope;
        assert!(
            (slope - want).abs() <= 0.15,
            "{name}: slope {slope:.4} outside {want} +- 0.15"
        );
        seen.push(slope);
    }
    println!("[PASS] slopes {:.4} (want 1) and {:.4} (want 1/2)", seen[0], seen[1]);
}

fn trace<S: System>(sys: &S, init: &S::State, grid: &CoupledNoiseGrid) -> Vec<f64>
where
    S::State: StateView,
{
    let mut out = Vec::with_capacity(grid.n_steps() + 1);
    simulate_observe(sys, init, grid, |_, state| out.push(state.position())).unwrap();
    out
}

/// The cutoff multiplies the potential force by exactly 1.0 inside its plateau, so on a
/// shared noise grid a clipped run and an open run must agree to the last bit until the
/// position first leaves the plateau. Checked for all four systems.
#[test]
fn cutoff_runs_match_open_runs_until_first_exit() {
    let params = KernelParams::new(2.0, 2.0, 8).unwrap();
    let radius = 1.1;
    let dt = 1e-2;
    let n_steps = 200usize;
    let kinds = [
        SystemKind::FullGle { mass: 0.5 },
        SystemKind::ScaledGle { mass: 0.5, epsilon: 0.5 },
        SystemKind::SmallMassLimit,
        SystemKind::WhiteNoiseLimit { mass: 0.5 },
    ];
    let mut runs = 0usize;
    let mut exits = 0usize;
    for seed in 0..25u64 {
        for (which, kind) in kinds.iter().enumerate() {
            let salt = (1 + seed * 8 + which as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
            let lane_rng = |lane: usize| ChaCha8Rng::seed_from_u64(salt ^ lane as u64);
            let open = SystemSpec {
                kind: kind.clone(),
                gamma: 1.0,
                phi: Potential::Quadratic,
                params: params.clone(),
                cutoff_radius: None,
            };
            let clipped = SystemSpec { cutoff_radius: Some(radius), ..open.clone() };
            let mut init_rng = ChaCha8Rng::seed_from_u64(7000 + seed);
            let modes = (0..params.n_modes()).map(|_| init_rng.sample(StandardNormal)).collect();
            let start = PhaseState { x: 1.0, v: 0.0, modes };
            let (a, b) = match kind {
                SystemKind::FullGle { .. } | SystemKind::ScaledGle { .. } => {
                    let sys_a = GleStepper::new(&open, dt).unwrap();
                    let sys_b = GleStepper::new(&clipped, dt).unwrap();
                    let grid = CoupledNoiseGrid::generate_with_ou(
                        dt,
                        n_steps,
                        sys_a.ou_rates().unwrap(),
                        lane_rng,
                    );
                    (trace(&sys_a, &start, &grid), trace(&sys_b, &start, &grid))
                }
                SystemKind::SmallMassLimit => {
                    let sys_a = ZeroMassStepper::new(&open, dt).unwrap();
                    let sys_b = ZeroMassStepper::new(&clipped, dt).unwrap();
                    let shifted = shift_initial(&start, &params);
                    let grid = CoupledNoiseGrid::generate_with_ou(
                        dt,
                        n_steps,
                        sys_a.ou_rates().unwrap(),
                        lane_rng,
                    );
                    (trace(&sys_a, &shifted, &grid), trace(&sys_b, &shifted, &grid))
                }
                SystemKind::WhiteNoiseLimit { .. } => {
                    let sys_a = WhiteNoiseStepper::new(&open, dt).unwrap();
                    let sys_b = WhiteNoiseStepper::new(&clipped, dt).unwrap();
                    let init = LangevinState { u: start.x, p: 0.0 };
                    let grid =
                        CoupledNoiseGrid::generate(dt, n_steps, params.n_modes(), lane_rng);
                    (trace(&sys_a, &init, &grid), trace(&sys_b, &init, &grid))
                }
            };
            let exit = a.iter().position(|p| p.abs() > radius);
            let last = exit.unwrap_or(a.len() - 1);
            for j in 0..=last {
                assert!(
                    (a[j] - b[j]).abs() <= 1e-12,
                    "seed {seed}, {kind:?}, step {j}: open {} vs clipped {}",
                    a[j],
                    b[j]
                );
            }
            runs += 1;
            exits += usize::from(exit.is_some());
        }
    }
    assert_eq!(runs, 100);
    assert!(exits >= 10, "only {exits} of {runs} runs left the plateau; the check is hollow");
    println!("[PASS] {runs} runs, {exits} crossed the plateau edge, agreement to 1e-12 before exit");
}

/// `E sup |f|^{2q}` for a mode with rate `eta` and stationary variance `kappa / eta`:
/// multiplying `eta` by 10 must not raise `eta * E sup^4`, and quadrupling `kappa` must
/// multiply the estimate by exactly 16 on a shared stream.
#[test]
fn driven_mode_sup_moments_respect_the_rate_envelope() {
    let mut bounds = Vec::new();
    for (i, &eta) in [1.0, 10.0, 100.0].iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(400 + i as u64);
        let est = ou_sup_moment(eta, 1.0, 2.0, 1.0, 1e-3, 10_000, &mut rng);
        bounds.push(eta * est);
    }
    assert!(bounds[1] <= 1.05 * bounds[0], "eta 1 -> 10 raised the bound: {bounds:?}");
    assert!(bounds[2] <= 1.05 * bounds[1], "eta 10 -> 100 raised the bound: {bounds:?}");
    let mut rng_a = ChaCha8Rng::seed_from_u64(8);
    let mut rng_b = ChaCha8Rng::seed_from_u64(8);
    let base = ou_sup_moment(1.0, 1.0, 2.0, 1.0, 1e-3, 2_000, &mut rng_a);
    let quad = ou_sup_moment(1.0, 4.0, 2.0, 1.0, 1e-3, 2_000, &mut rng_b);
    assert!((quad / (16.0 * base) - 1.0).abs() < 1e-12, "kappa scaling broke: {quad} vs {base}");
    println!(
        "[PASS] eta * E sup^4 = {:.4} / {:.4} / {:.4} nonincreasing, kappa^2 scaling exact",
        bounds[0], bounds[1], bounds[2]
    );
}

/// The one-step pair `(dW, I)` drawn from the closed-form joint law must match a
/// brute-force Riemann discretization of `I = sqrt(2 eta) int_0^h exp(-eta (h-r)) dW(r)`
/// with 100 substeps, in all three second moments, within three combined standard errors.
#[test]
fn exact_mode_integrals_match_a_brute_force_discretization() {
    let h = 0.01;
    let substeps = 100usize;
    let n = 20_000usize;
    for (i, &eta) in [0.1, 1.0, 10.0].iter().enumerate() {
        let w = ou_pair_weights(eta, h);
        let mut rng_exact = ChaCha8Rng::seed_from_u64(600 + i as u64);
        let mut rng_em = ChaCha8Rng::seed_from_u64(900 + i as u64);
        let mut sums = [[0.0f64; 2]; 3];
        let mut sums_sq = [[0.0f64; 2]; 3];
        for _ in 0..n {
            let dw = h.sqrt() * rng_exact.sample::<f64, _>(StandardNormal);
            let xi: f64 = rng_exact.sample(StandardNormal);
            let integral = w.gain * dw + w.cond_std * xi;

            let delta = h / substeps as f64;
            let mut dw_em = 0.0;
            let mut integral_em = 0.0;
            for j in 0..substeps {
                let dwj = delta.sqrt() * rng_em.sample::<f64, _>(StandardNormal);
                dw_em += dwj;
                let r = j as f64 * delta;
                integral_em += (2.0 * eta).sqrt() * (-eta * (h - r)).exp() * dwj;
            }

            let products = [
                [dw * dw, dw_em * dw_em],
                [integral * integral, integral_em * integral_em],
                [dw * integral, dw_em * integral_em],
            ];
            for (m, pair) in products.iter().enumerate() {
                for side in 0..2 {
                    sums[m][side] += pair[side];
                    sums_sq[m][side] += pair[side] * pair[side];
                }
            }
        }
        let nf = n as f64;
        for (m, label) in ["E[dW^2]", "E[I^2]", "E[dW I]"].iter().enumerate() {
            let mean_a = sums[m][0] / nf;
            let mean_b = sums[m][1] / nf;
            let var_a = sums_sq[m][0] / nf - mean_a * mean_a;
            let var_b = sums_sq[m][1] / nf - mean_b * mean_b;
            let se = ((var_a + var_b) / nf).sqrt();
            assert!(
                (mean_a - mean_b).abs() <= 3.0 * se,
                "eta {eta}, {label}: exact {mean_a:.6e} vs oracle {mean_b:.6e}, band {:.2e}",
                3.0 * se
            );
        }
    }
    println!("[PASS] 3 rates x 3 moments inside 3 combined SE of the 100-substep oracle");
}

const WORKER_CONFIG: &str = r#"
seed = 7
s = 0.75
gamma = 1.0

[kernel]
alpha = 2.0
beta = 2.0
n_modes = 8

[potential]
name = "quadratic"

[initial]
x = 1.0
v = 0.0
modes = "stationary"

[small_mass]
masses = [1e-1, 1e-2]
t_final = 0.2
base_dt = 1e-3
n_trajectories = 10
"#;

#[test]
fn tables_are_bitwise_identical_across_worker_counts() {
    let cfg = Config::from_toml(WORKER_CONFIG).unwrap();
    #[cfg(feature = "parallel")]
    {
        let pool = |threads| {
            rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap()
        };
        let one = pool(1).install(|| run_small_mass_study(&cfg)).unwrap();
        let four = pool(4).install(|| run_small_mass_study(&cfg)).unwrap();
        assert_eq!(
            convergence_csv("mass", &one),
            convergence_csv("mass", &four),
            "thread count leaked into the table"
        );
    }
    #[cfg(not(feature = "parallel"))]
    let _ = &cfg;

    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("study.toml");
    std::fs::write(&cfg_path, WORKER_CONFIG).unwrap();
    let mut tables = Vec::new();
    for (out, threads) in [("one", "1"), ("three", "3"), ("again", "1")] {
        let out_dir = dir.path().join(out);
        let status = Command::new(env!("CARGO_BIN_EXE_gle"))
            .arg("small-mass")
            .arg("--config")
            .arg(&cfg_path)
            .arg("--out")
            .arg(&out_dir)
            .arg("--threads")
            .arg(threads)
            .status()
            .unwrap();
        assert!(status.success(), "CLI run with --threads {threads} failed");
        tables.push(std::fs::read(out_dir.join("small_mass.csv")).unwrap());
    }
    assert_eq!(tables[0], tables[1], "1 vs 3 workers changed the bytes");
    assert_eq!(tables[0], tables[2], "a rerun changed the bytes");
    println!("[PASS] in-process pools and CLI runs (1, 3 workers, rerun) byte-identical");
}
