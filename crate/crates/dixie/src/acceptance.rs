//! The acceptance suite: twelve numbered verification criteria spanning
//! every component, shared by the `acceptance` integration test target and
//! the command-line `verify-all` subcommand.
//!
//! Each criterion runs standalone, never panics on numerical failure, and
//! reports a pass flag plus a human-readable detail line. Randomized
//! criteria draw their models from the counter-based generator with fixed
//! seeds, so every run of the suite is bit-identical.
//!
//! Criterion 10 checks a 0.15 relative band on the power-law defect count
//! against `e^{-x}` at three decay exponents. Convergence at `alpha = 2`,
//! `m = 1` is logarithmic and the `x = -1` cell still sits near a 0.20
//! deviation at `N = 10^6`, so that single cell fails the band while the
//! companion direction check (deviations shrink as `N` grows) passes. The
//! criterion is reported honestly rather than widening the band.

use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

use crate::asymptotics::{
    case1_limit, case2_powerlaw, equal_moment_asymptotics, gumbel_fit_equal,
    default_x_grid, SequenceFamily,
};
use crate::centering::quantile_inequality_report;
use crate::exact_moments::{
    mean_variance, rising_moment_exact, rising_moment_quadrature, CollectorModel,
    ProbabilityVector,
};
use crate::extremality::{
    hessian_constant, hessian_radial_fd, radial_variance_scan, reverse_hazard_suite,
};
use crate::gamma_kernel::ShapeParam;
use crate::montecarlo::{
    rng, simulate_active_clock, simulate_discrete, SimConfig,
};
use crate::numeric::{harmonic, harmonic2};
use crate::poissonized::{
    radial_derivative_w, radial_derivative_w_with_slack, size_bias_ratio,
    weighted_mean_m, RadialDirection,
};

/// Number of criteria in the suite.
pub const CRITERIA: u32 = 12;

/// Suite-wide master seed for randomized criteria.
const SUITE_SEED: u64 = 0x0D17_1E5E_ED00_2026;

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct AcceptanceConfig {
    /// Shrinks the power-law study of criterion 10 to `N = 10^5`
    /// (recorded in the detail line); all other criteria are unchanged.
    pub quick: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: u128,
}

impl CriterionOutcome {
    /// One-line rendering used by both the test target and the CLI.
    pub fn line(&self) -> String {
        format!(
            "criterion {:02} {} {}: {} [{} ms]",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.elapsed_ms
        )
    }
}

fn shape(m: u32) -> ShapeParam {
    ShapeParam::new(m).expect("positive shape")
}

/// Deterministic model draw: `N in 2..=n_max`, `m in 1..=m_max`, entries
/// `0.2 + U[0,1)` normalized (bounds the probability ratio by 6).
fn draw_model(stream: &mut rng::TrialStream, n_max: u64, m_max: u64) -> CollectorModel {
    let n = 2 + (stream.next_u64() % (n_max - 1)) as usize;
    let m = 1 + (stream.next_u64() % m_max) as u32;
    let entries: Vec<f64> = (0..n).map(|_| 0.2 + stream.next_unit()).collect();
    CollectorModel::new(
        ProbabilityVector::from_weights(entries).expect("positive entries"),
        shape(m),
    )
}

fn criterion_1() -> (bool, String) {
    let mut stream = rng::TrialStream::new(SUITE_SEED, 1);
    let mut max_rel = 0.0f64;
    let mut max_z = 0.0f64;
    for k in 0..50u64 {
        let model = draw_model(&mut stream, 8, 4);
        let (e1, e2) = match (rising_moment_exact(&model, 1), rising_moment_exact(&model, 2)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => {
                return (false, format!("model {k}: exact failed: {e}"))
            }
        };
        let q1 = match rising_moment_quadrature(&model, 1) {
            Ok(v) => v,
            Err(e) => return (false, format!("model {k}: quadrature failed: {e}")),
        };
        let q2 = match rising_moment_quadrature(&model, 2) {
            Ok(v) => v,
            Err(e) => return (false, format!("model {k}: quadrature failed: {e}")),
        };
        let rel1 = (q1.value / e1.value - 1.0).abs();
        let rel2 = (q2.value / e2.value - 1.0).abs();
        max_rel = max_rel.max(rel1).max(rel2);
        if rel1 > 1e-7 || rel2 > 1e-7 {
            return (
                false,
                format!("model {k}: exact/quadrature rel dev {:.3e}", rel1.max(rel2)),
            );
        }
        let mean = e1.value;
        let var_t = e2.value - mean - mean * mean;
        let cfg = SimConfig {
            model: model.clone(),
            trials: 100_000,
            seed: rng::mix64(SUITE_SEED ^ (k + 1)),
        };
        let mc = match simulate_discrete(&cfg) {
            Ok(s) => s,
            Err(e) => return (false, format!("model {k}: simulation failed: {e}")),
        };
        let z_mean = (mc.mean - mean) / mc.std_error_mean;
        let z_var = (mc.variance - var_t) / mc.std_error_variance;
        max_z = max_z.max(z_mean.abs()).max(z_var.abs());
        if z_mean.abs() > 3.0 || z_var.abs() > 3.0 {
            return (
                false,
                format!(
                    "model {k} (N={}, m={}): |z| = {:.2} exceeds 3",
                    model.n(),
                    model.m,
                    z_mean.abs().max(z_var.abs())
                ),
            );
        }
    }
    (
        true,
        format!(
            "50 models, exact vs quadrature rel dev <= {max_rel:.2e}, MC |z| <= {max_z:.2} at 1e5 trials"
        ),
    )
}

fn criterion_2() -> (bool, String) {
    let mut max_rel = 0.0f64;
    for n in 2..=12usize {
        let model = CollectorModel::new(
            ProbabilityVector::uniform(n).expect("n >= 2"),
            shape(1),
        );
        let report = match mean_variance(&model) {
            Ok(r) => r,
            Err(e) => return (false, format!("N={n}: {e}")),
        };
        let nf = n as f64;
        let mean = nf * harmonic(n as u64);
        let var = nf * nf * harmonic2(n as u64) - mean;
        let rel = (report.mean / mean - 1.0)
            .abs()
            .max((report.var_t / var - 1.0).abs());
        max_rel = max_rel.max(rel);
        if rel > 1e-10 {
            return (false, format!("N={n}: rel dev {rel:.3e} > 1e-10"));
        }
        if n == 2 && ((report.mean - 3.0).abs() > 1e-12 || (report.var_t - 2.0).abs() > 1e-12)
        {
            return (
                false,
                format!("N=2 anchor: mean {} var {}", report.mean, report.var_t),
            );
        }
    }
    (
        true,
        format!("uniform m=1, N=2..12 vs harmonic closed form, rel dev <= {max_rel:.2e}"),
    )
}

fn criterion_3() -> (bool, String) {
    let grid = default_x_grid();
    let sizes = [1e3, 1e4, 1e5, 1e6];
    let mut detail = String::new();
    for m in 1..=3u32 {
        let mut prev = f64::INFINITY;
        let mut last = f64::NAN;
        for &n in &sizes {
            let rep = match gumbel_fit_equal(n, shape(m), &grid) {
                Ok(r) => r,
                Err(e) => return (false, format!("m={m} n={n}: {e}")),
            };
            if rep.sup_distance >= prev {
                return (
                    false,
                    format!("m={m}: sup distance not decreasing at n={n}"),
                );
            }
            prev = rep.sup_distance;
            last = rep.sup_distance;
        }
        if !(last < 0.01) {
            return (false, format!("m={m}: sup at n=1e6 is {last:.3e}"));
        }
        let _ = write!(detail, "m={m}: sup(1e6)={last:.2e}; ");
    }
    (true, format!("{detail}all decreasing over n=1e3..1e6"))
}

fn criterion_4() -> (bool, String) {
    let row = match equal_moment_asymptotics(shape(1), &[1e3]) {
        Ok(r) => r[0],
        Err(e) => return (false, format!("m=1: {e}")),
    };
    if !(row.var_residual < 0.01) {
        return (
            false,
            format!("m=1 n=1e3: var residual {:.4} >= 0.01", row.var_residual),
        );
    }
    let mut detail = format!("m=1: var residual {:.4} at n=1e3; ", row.var_residual);
    for m in 2..=3u32 {
        let rows = match equal_moment_asymptotics(shape(m), &[1e3, 1e4, 1e5]) {
            Ok(r) => r,
            Err(e) => return (false, format!("m={m}: {e}")),
        };
        for w in rows.windows(2) {
            if !(w[1].var_residual < w[0].var_residual)
                || !(w[1].mean_residual < w[0].mean_residual)
            {
                return (
                    false,
                    format!("m={m}: residuals not decreasing at n={}", w[1].n),
                );
            }
        }
        let _ = write!(
            detail,
            "m={m}: var residuals {:.4} -> {:.4} -> {:.4}; ",
            rows[0].var_residual, rows[1].var_residual, rows[2].var_residual
        );
    }
    (true, detail)
}

fn criterion_5() -> (bool, String) {
    let mut stream = rng::TrialStream::new(SUITE_SEED, 5);
    for k in 0..50u64 {
        let n = 2 + (stream.next_u64() % 5) as usize;
        let m = 1 + (stream.next_u64() % 4) as u32;
        let mut raw: Vec<f64> = (0..n).map(|_| 2.0 * stream.next_unit() - 1.0).collect();
        if raw.iter().all(|v| v.abs() < 0.1) {
            raw[0] += 1.0;
        }
        let direction = match RadialDirection::centered(raw) {
            Ok(d) => d,
            Err(e) => return (false, format!("ray {k}: {e}")),
        };
        let scan = match radial_variance_scan(&direction, shape(m), None, 16) {
            Ok(s) => s,
            Err(e) => return (false, format!("ray {k}: {e}")),
        };
        if !scan.strictly_increasing {
            return (
                false,
                format!("ray {k} (N={n}, m={m}): variance not strictly increasing"),
            );
        }
        if !scan.w_checks_ok {
            return (
                false,
                format!("ray {k} (N={n}, m={m}): w-integral cross-check failed"),
            );
        }
    }
    (
        true,
        "50 random rays (N<=6, m<=4): Var T strictly increasing, w-integral matches mean slope"
            .to_string(),
    )
}

fn criterion_6() -> (bool, String) {
    let mut min_margin = f64::INFINITY;
    for m in 1..=5u32 {
        for n in 2..=8usize {
            let rep = match hessian_constant(shape(m), n) {
                Ok(r) => r,
                Err(e) => return (false, format!("C({m},{n}): {e}")),
            };
            let margin = rep.constant / rep.abs_err.max(f64::MIN_POSITIVE);
            min_margin = min_margin.min(margin);
            if !(rep.constant > 0.0) || margin < 10.0 {
                return (
                    false,
                    format!("C({m},{n}) = {:.6e} not positive beyond error", rep.constant),
                );
            }
        }
    }
    let anchor = match hessian_constant(shape(1), 2) {
        Ok(r) => r,
        Err(e) => return (false, format!("C(1,2): {e}")),
    };
    let rel = (anchor.constant - 80.0).abs() / 80.0;
    if rel > 1e-3 {
        return (false, format!("C(1,2) = {} off closed form 80", anchor.constant));
    }
    let fd = match hessian_radial_fd(shape(1), 2, 0.1) {
        Ok(v) => v,
        Err(e) => return (false, format!("C(1,2) FD: {e}")),
    };
    let fd_rel = (fd - 80.0).abs() / 80.0;
    if fd_rel > 0.01 {
        return (false, format!("C(1,2) FD = {fd} off 80 by {fd_rel:.3}"));
    }
    (
        true,
        format!(
            "C(m,N) > 0 for m<=5, N<=8 (min margin {min_margin:.1e}x err); C(1,2): quadrature rel {rel:.1e}, FD rel {fd_rel:.1e}"
        ),
    )
}

fn criterion_7() -> (bool, String) {
    // Exact two-coupon decomposition first.
    let exact_cfg = SimConfig {
        model: CollectorModel::new(
            ProbabilityVector::uniform(2).expect("n = 2"),
            shape(1),
        ),
        trials: 2_000,
        seed: SUITE_SEED,
    };
    match simulate_active_clock(&exact_cfg) {
        Ok(rep) => {
            if (rep.var_estimate - 2.0).abs() > 1e-12
                || rep.clock_mean.variance != 0.0
                || (rep.sum_psi.mean - 2.0).abs() > 1e-12
            {
                return (
                    false,
                    format!(
                        "N=2 m=1 decomposition not exact: estimate {}",
                        rep.var_estimate
                    ),
                );
            }
        }
        Err(e) => return (false, format!("two-coupon decomposition: {e}")),
    }
    let mut stream = rng::TrialStream::new(SUITE_SEED, 7);
    let mut max_z = 0.0f64;
    for k in 0..20u64 {
        let model = draw_model(&mut stream, 8, 4);
        let cfg = SimConfig {
            model: model.clone(),
            trials: 100_000,
            seed: rng::mix64(SUITE_SEED ^ (0x7000 + k)),
        };
        let rep = match simulate_active_clock(&cfg) {
            Ok(r) => r,
            Err(e) => return (false, format!("model {k}: {e}")),
        };
        max_z = max_z.max(rep.z_var.abs());
        if !rep.within_3_sigma {
            return (
                false,
                format!(
                    "model {k} (N={}, m={}): z = {:.2}",
                    model.n(),
                    model.m,
                    rep.z_var
                ),
            );
        }
    }
    (
        true,
        format!(
            "exact N=2 decomposition plus 20 models at 1e5 trials, max |z| = {max_z:.2}"
        ),
    )
}

fn criterion_8() -> (bool, String) {
    let mut stream = rng::TrialStream::new(SUITE_SEED, 8);
    for k in 0..20u64 {
        let n = 2 + (stream.next_u64() % 5) as usize;
        let m = 1 + (stream.next_u64() % 4) as u32;
        let entries: Vec<f64> = (0..n).map(|_| 0.2 + stream.next_unit()).collect();
        let q = ProbabilityVector::from_weights(entries).expect("positive");
        let h: Vec<f64> = q
            .as_slice()
            .iter()
            .map(|&v| v - 1.0 / n as f64)
            .collect();
        // q sits at theta = 1 on the ray from the uniform vector.
        let direction = match RadialDirection::new(h) {
            Ok(d) => d,
            Err(e) => return (false, format!("vector {k}: {e}")),
        };
        let mf = f64::from(m);
        let grid: Vec<f64> = crate::numeric::log_grid(0.02 * mf, 20.0 * mf, 3);
        let mut prev_m = f64::INFINITY;
        let mut prev_r = f64::NEG_INFINITY;
        for &t in &grid {
            let mm = weighted_mean_m(q.as_slice(), shape(m), t);
            let r = match size_bias_ratio(&direction, shape(m), 1.0, t) {
                Ok(v) => v,
                Err(e) => return (false, format!("vector {k}: {e}")),
            };
            if !(mm < prev_m) {
                return (
                    false,
                    format!("vector {k} (N={n}, m={m}): M not strictly decreasing at t={t:.3}"),
                );
            }
            if !(r > prev_r) {
                return (
                    false,
                    format!(
                        "vector {k} (N={n}, m={m}): size-bias ratio not strictly increasing at t={t:.3}"
                    ),
                );
            }
            prev_m = mm;
            prev_r = r;
            let (w, slack) =
                match radial_derivative_w_with_slack(&direction, shape(m), 1.0, t) {
                    Ok(v) => v,
                    Err(e) => return (false, format!("vector {k}: {e}")),
                };
            if w < -slack {
                return (
                    false,
                    format!("vector {k} (N={n}, m={m}): w({t:.3}) = {w:e} < -{slack:e}"),
                );
            }
        }
        // Centroid inequality: int t w / int w >= E X^2 / E X.
        match centroid_vs_size_bias(&q, shape(m), &direction) {
            Ok((centroid, floor)) => {
                if centroid < floor - 1e-8 * floor.abs() {
                    return (
                        false,
                        format!(
                            "vector {k} (N={n}, m={m}): centroid {centroid} < E X^2 / E X = {floor}"
                        ),
                    );
                }
            }
            Err(msg) => return (false, format!("vector {k}: {msg}")),
        }
    }
    (
        true,
        "20 random weight vectors (N<=6, m<=4): M strictly decreasing, size-bias ratio strictly increasing, w >= 0 on grid, centroid >= E X^2 / E X"
            .to_string(),
    )
}

/// Helper for criterion 8: integrates `w` and `t w` over the completion
/// window and returns `(centroid, E X^2 / E X)`.
fn centroid_vs_size_bias(
    q: &ProbabilityVector,
    m: ShapeParam,
    direction: &RadialDirection,
) -> Result<(f64, f64), String> {
    use crate::quadrature::integrate_segmented;
    let model = CollectorModel::new(q.clone(), m);
    let report = mean_variance(&model).map_err(|e| e.to_string())?;
    let second_moment = report.var_x + report.mean * report.mean;
    let floor = second_moment / report.mean;
    // Integration window: out to where every survival factor is negligible.
    let pivot = report.mean;
    let mut t_hi = 4.0 * pivot;
    loop {
        let total: f64 = q
            .as_slice()
            .iter()
            .map(|&qi| crate::gamma_kernel::survival_q(m, qi * t_hi).value)
            .sum();
        if total < 1e-18 || t_hi > 1e6 * pivot {
            break;
        }
        t_hi *= 1.5;
    }
    let pts = [0.0, 0.25 * pivot, pivot, 2.0 * pivot, t_hi];
    let w_of = |t: f64| {
        radial_derivative_w(direction, m, 1.0, t).expect("interior ray point")
    };
    let w_int = integrate_segmented(&w_of, &pts, 1e-13, 1e-9, 8000);
    let tw_int = integrate_segmented(&|t: f64| t * w_of(t), &pts, 1e-13, 1e-9, 8000);
    if !w_int.converged || !tw_int.converged {
        return Err("w integrals did not converge".to_string());
    }
    if w_int.value <= 0.0 {
        return Err(format!("nonpositive w mass {}", w_int.value));
    }
    Ok((tw_int.value / w_int.value, floor))
}

fn criterion_9() -> (bool, String) {
    let checks = reverse_hazard_suite(10, 8);
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.ok)
        .map(|c| c.name.as_str())
        .collect();
    if failed.is_empty() {
        (
            true,
            format!(
                "{} monotonicity checks over m=1..10 on log grid [1e-3, 1e3]",
                checks.len()
            ),
        )
    } else {
        (false, format!("failed: {}", failed.join("; ")))
    }
}

fn criterion_10(cfg: &AcceptanceConfig) -> (bool, String) {
    let n_full: u64 = if cfg.quick { 100_000 } else { 1_000_000 };
    let scales: Vec<u64> = if cfg.quick {
        vec![10_000, 100_000]
    } else {
        vec![10_000, 100_000, 1_000_000]
    };
    let x_grid = [-1.0, 0.0, 1.0, 2.0];
    let mut band_pass = 0u32;
    let mut band_total = 0u32;
    let mut violations: Vec<String> = Vec::new();
    let mut atomless_ok = true;
    let mut direction_ok = true;
    for &alpha in &[0.5, 1.0, 2.0] {
        for m in 1..=2u32 {
            let rep = match case2_powerlaw(n_full, alpha, shape(m), &x_grid) {
                Ok(r) => r,
                Err(e) => return (false, format!("alpha={alpha} m={m}: {e}")),
            };
            for row in &rep.rows {
                band_total += 1;
                if row.within_band {
                    band_pass += 1;
                } else {
                    violations.push(format!(
                        "(alpha={alpha}, m={m}, x={}): rel dev {:.3}",
                        row.x, row.rel_dev
                    ));
                }
                if !(row.sum_sq < 1e-3) || !row.atomless_ok {
                    atomless_ok = false;
                }
            }
            // Direction property: sup deviation decreases with N.
            let mut prev = f64::INFINITY;
            for &nv in &scales {
                let r = match case2_powerlaw(nv, alpha, shape(m), &x_grid) {
                    Ok(r) => r,
                    Err(e) => return (false, format!("alpha={alpha} m={m}: {e}")),
                };
                let sup = r.rows.iter().map(|r| r.rel_dev).fold(0.0f64, f64::max);
                if !(sup < prev) {
                    direction_ok = false;
                }
                prev = sup;
            }
        }
    }
    let passed = violations.is_empty() && atomless_ok && direction_ok;
    let mut detail = format!(
        "{band_pass}/{band_total} band cells within 0.15 at N={n_full}{}",
        if cfg.quick { " (quick)" } else { "" }
    );
    if !violations.is_empty() {
        let _ = write!(
            detail,
            "; violations: {} (convergence there is logarithmic; deviations do shrink with N: direction check {})",
            violations.join(", "),
            if direction_ok { "passes" } else { "fails" }
        );
    }
    let _ = write!(
        detail,
        "; atomless sum of squares < 1e-3 {}",
        if atomless_ok { "holds" } else { "fails" }
    );
    (passed, detail)
}

fn criterion_11() -> (bool, String) {
    let report = match case1_limit(
        &SequenceFamily::Linear,
        shape(1),
        &[100, 200, 400],
        2000,
    ) {
        Ok(r) => r,
        Err(e) => return (false, format!("case-1 study: {e}")),
    };
    for w in report.rows.windows(2) {
        if !(w[1].gap_mean < w[0].gap_mean && w[1].gap_mean > 0.0) {
            return (
                false,
                format!("mean gaps not strictly decreasing at N={}", w[1].n),
            );
        }
        if !(w[1].gap_second < w[0].gap_second && w[1].gap_second > 0.0) {
            return (
                false,
                format!("second-moment gaps not strictly decreasing at N={}", w[1].n),
            );
        }
        if !(w[1].kolmogorov < w[0].kolmogorov && w[1].kolmogorov > 0.0) {
            return (
                false,
                format!("Kolmogorov distances not strictly decreasing at N={}", w[1].n),
            );
        }
    }
    let gaps: Vec<String> = report
        .rows
        .iter()
        .map(|r| format!("N={}: {:.2e}", r.n, r.gap_mean))
        .collect();
    (
        true,
        format!(
            "limit mean {:.12} (tail bound {:.1e}); gaps {}",
            report.limit_mean,
            report.truncation_bound,
            gaps.join(", ")
        ),
    )
}

fn criterion_12() -> (bool, String) {
    let x_grid: Vec<f64> = (0..=40).map(|i| 0.25 * i as f64).collect();
    let mut worst = 0.0f64;
    for m in 1..=10u32 {
        for &n in &[1e3, 1e6] {
            let rep = match quantile_inequality_report(n, shape(m), &x_grid) {
                Ok(r) => r,
                Err(e) => return (false, format!("m={m} n={n}: {e}")),
            };
            if !rep.right_tail_ok {
                let bad = rep
                    .rows
                    .iter()
                    .find(|r| r.ratio > 1.0 + 1e-10)
                    .map(|r| format!("x={}: ratio {}", r.x, r.ratio))
                    .unwrap_or_default();
                return (false, format!("m={m} n={n}: n Q(b+ax) e^x > 1: {bad}"));
            }
            worst = worst.max(
                rep.rows
                    .iter()
                    .map(|r| r.ratio)
                    .fold(0.0f64, f64::max),
            );
        }
        // Clock ratio n a^2 / b increases with n.
        let mut prev = f64::NEG_INFINITY;
        for &n in &[1e3, 1e4, 1e5, 1e6] {
            let pair = match crate::centering::solve_centering(n, shape(m)) {
                Ok(p) => p,
                Err(e) => return (false, format!("m={m} n={n}: {e}")),
            };
            let clock = pair.clock_scale();
            if !(clock > prev) {
                return (false, format!("m={m}: clock scale not increasing at n={n}"));
            }
            prev = clock;
        }
    }
    (
        true,
        format!(
            "n Q_m(b+ax) <= e^-x on x in [0,10] for m<=10, n in {{1e3,1e6}} (max ratio {worst:.12}); clock scale increasing"
        ),
    )
}

/// Run one criterion by id (1-based).
pub fn run_criterion(id: u32, cfg: &AcceptanceConfig) -> CriterionOutcome {
    let (name, budget_ms): (&'static str, u128) = match id {
        1 => ("exact-vs-quadrature-vs-mc", 60_000),
        2 => ("uniform-single-copy-closed-form", 60_000),
        3 => ("gumbel-distribution-fit", 120_000),
        4 => ("gumbel-moment-predictions", 120_000),
        5 => ("radial-variance-monotonicity", 300_000),
        6 => ("hessian-constant-positivity", 300_000),
        7 => ("active-clock-decomposition", 300_000),
        8 => ("size-bias-monotonicity", 300_000),
        9 => ("reverse-hazard-suite", 60_000),
        10 => ("powerlaw-defect-band", 300_000),
        11 => ("fixed-sequence-limit", 300_000),
        12 => ("quantile-inequality-clock", 120_000),
        _ => ("unknown", 0),
    };
    let start = Instant::now();
    let (mut passed, mut detail) = match id {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(),
        7 => criterion_7(),
        8 => criterion_8(),
        9 => criterion_9(),
        10 => criterion_10(cfg),
        11 => criterion_11(),
        12 => criterion_12(),
        _ => (false, format!("no criterion with id {id}")),
    };
    let elapsed_ms = start.elapsed().as_millis();
    if passed && budget_ms > 0 && elapsed_ms > budget_ms {
        passed = false;
        let _ = write!(detail, "; exceeded time budget {budget_ms} ms");
    }
    CriterionOutcome {
        id,
        name,
        passed,
        detail,
        elapsed_ms,
    }
}

/// Run the full suite in order.
pub fn run_all(cfg: &AcceptanceConfig) -> Vec<CriterionOutcome> {
    (1..=CRITERIA).map(|id| run_criterion(id, cfg)).collect()
}
