//! Variance extremality of the uniform probability vector.
//!
//! Three instruments probe the claim that the uniform vector minimizes
//! `Var T` (equivalently `Var X`) among probability vectors:
//!
//! * `radial_variance_scan` walks a ray `q(theta) = u + theta h` and
//!   verifies that the variance increases strictly with `theta`,
//!   cross-checking the poissonized weight `w` against finite differences
//!   of the mean.
//! * `hessian_constant` computes the quadratic coefficient `C(m, N)` of
//!   `Var T` along pair-difference directions at the uniform vector via a
//!   covariance identity for `Y_N = max` of `N` iid Erlang(m, 1)
//!   variables. `C > 0` certifies strict local extremality.
//! * `reverse_hazard_suite` and `monotone_bm_report` check the kernel
//!   monotonicity facts (increasing hazard, decreasing reverse hazard,
//!   negative decreasing elasticity, `b_m > 1` increasing) the extremality
//!   argument rests on; `cauchy_mass_decay_check` bounds the Cauchy-Schwarz
//!   mass-decay chain `E R_r <= r/N` by simulation.

use serde::Serialize;
use thiserror::Error;

use crate::centering::solve_centering;
use crate::exact_moments::{
    mean_variance, CollectorModel, MomentError, ProbabilityVector,
};
use crate::gamma_kernel::{
    cdf_f, density_f, log_elasticity_e, reverse_hazard_phi, survival_q, upper_hazard_h,
    KernelError, ShapeParam,
};
use crate::montecarlo::{simulate_mass_decay, SimError};
use crate::numeric::log_grid;
use crate::poissonized::{radial_derivative_w, DirectionError, RadialDirection};
use crate::quadrature::integrate_segmented;

/// Largest shape for the Hessian quadrature.
const HESSIAN_MAX_M: u32 = 10;
/// Largest coupon count for the Hessian quadrature.
const HESSIAN_MAX_N: usize = 50;

#[derive(Debug, Error)]
pub enum ExtremalityError {
    #[error(transparent)]
    Direction(#[from] DirectionError),
    #[error(transparent)]
    Moment(#[from] MomentError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("hessian quadrature supports m <= {HESSIAN_MAX_M}, N <= {HESSIAN_MAX_N}; got m = {m}, n = {n}")]
    HessianOutOfRange { m: u32, n: usize },
    #[error("{context} quadrature did not converge (value {value:e}, error {abs_err:e})")]
    QuadratureFailed {
        context: &'static str,
        value: f64,
        abs_err: f64,
    },
    #[error("invalid parameter: {0}")]
    Invalid(&'static str),
}

/// One cross-check of `int w dt` against a finite difference of the mean.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct WCheckRow {
    pub theta: f64,
    pub w_integral: f64,
    pub mean_slope_fd: f64,
    pub abs_gap: f64,
    pub ok: bool,
}

/// Result of a radial variance scan.
#[derive(Clone, Debug, Serialize)]
pub struct RadialScanReport {
    pub direction: Vec<f64>,
    pub m: u32,
    pub thetas: Vec<f64>,
    pub var_t: Vec<f64>,
    pub abs_err: Vec<f64>,
    /// Strictly increasing beyond combined numerical tolerance.
    pub strictly_increasing: bool,
    pub w_checks: Vec<WCheckRow>,
    pub w_checks_ok: bool,
}

/// Breakpoints spanning the completion-time scale of a model, ending at a
/// horizon where `sum_j Q_m(q_j t)` has dropped below `1e-18`.
fn completion_breakpoints(q: &[f64], m: ShapeParam) -> Vec<f64> {
    let n = q.len() as f64;
    let q_min = q.iter().cloned().fold(f64::INFINITY, f64::min);
    let n_heur = (n / q_min).max(core::f64::consts::E * 1.000_001);
    let pair = solve_centering(n_heur, m).expect("n_heur > 1");
    let t_star = pair.b / q_min;
    let mut t_hi = 2.0 * t_star;
    for _ in 0..400 {
        let sum: f64 = q.iter().map(|&qj| survival_q(m, qj * t_hi).value).sum();
        if sum < 1e-18 {
            break;
        }
        t_hi *= 1.4;
    }
    let mut pts = vec![
        0.0,
        t_star / 8.0,
        t_star / 2.0,
        t_star,
        (2.0 * t_star).min(t_hi),
        t_hi,
    ];
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup();
    pts
}

/// Integrate the radial weight `w_theta` over `t`.
fn w_integral(
    direction: &RadialDirection,
    m: ShapeParam,
    theta: f64,
) -> Result<f64, ExtremalityError> {
    let q = direction.q_at(theta)?;
    let pts = completion_breakpoints(&q, m);
    let f = |t: f64| radial_derivative_w(direction, m, theta, t).unwrap_or(0.0);
    let r = integrate_segmented(&f, &pts, 1e-13, 1e-10, 8000);
    if !r.converged {
        return Err(ExtremalityError::QuadratureFailed {
            context: "radial weight",
            value: r.value,
            abs_err: r.abs_err,
        });
    }
    Ok(r.value)
}

/// Scan `Var T` along the ray `q(theta) = u + theta h`.
///
/// `theta_max` defaults to 45% of the simplex exit; `steps` points are
/// placed linearly from 0 (the uniform vector) to `theta_max`. The verdict
/// requires each successive variance difference to exceed
/// `max(1e-10, 10 (err_i + err_{i+1}))`. Three interior thetas get a
/// `w`-integral cross-check against a central difference of the mean.
pub fn radial_variance_scan(
    direction: &RadialDirection,
    m: ShapeParam,
    theta_max: Option<f64>,
    steps: usize,
) -> Result<RadialScanReport, ExtremalityError> {
    if steps < 4 {
        return Err(ExtremalityError::Invalid("need at least 4 scan steps"));
    }
    let exit = direction.exit_theta();
    let theta_max = theta_max.unwrap_or(0.45 * exit);
    if !(theta_max > 0.0) || theta_max >= exit {
        return Err(ExtremalityError::Invalid(
            "theta_max must be positive and inside the simplex",
        ));
    }

    let mut thetas = Vec::with_capacity(steps);
    let mut var_t = Vec::with_capacity(steps);
    let mut abs_err = Vec::with_capacity(steps);
    let mut means = Vec::with_capacity(steps);
    for i in 0..steps {
        let theta = theta_max * i as f64 / (steps - 1) as f64;
        let q = if i == 0 {
            ProbabilityVector::uniform(direction.len()).expect("n >= 2")
        } else {
            ProbabilityVector::normalized(direction.q_at(theta)?)
                .expect("interior point")
        };
        let report = mean_variance(&CollectorModel::new(q, m))?;
        thetas.push(theta);
        var_t.push(report.var_t);
        abs_err.push(report.abs_err_estimate);
        means.push(report.mean);
    }

    let mut strictly_increasing = true;
    for i in 0..steps - 1 {
        let gap = var_t[i + 1] - var_t[i];
        let tol = (10.0 * (abs_err[i] + abs_err[i + 1])).max(1e-10);
        if gap <= tol {
            strictly_increasing = false;
        }
    }

    // Cross-check the w representation of the mean slope at 3 interior
    // points.
    let mut w_checks = Vec::new();
    let mut w_checks_ok = true;
    for &idx in &[steps / 4, steps / 2, (3 * steps) / 4] {
        let idx = idx.clamp(1, steps - 2);
        let theta = thetas[idx];
        let integral = w_integral(direction, m, theta)?;
        let delta = (1e-3 * (1.0 + theta)).min(0.45 * (exit - theta)).min(
            0.45 * theta,
        );
        let mean_at = |th: f64| -> Result<f64, ExtremalityError> {
            let q = ProbabilityVector::normalized(direction.q_at(th)?)
                .expect("interior point");
            Ok(mean_variance(&CollectorModel::new(q, m))?.mean)
        };
        // Richardson-extrapolated central difference: the plain stencil's
        // delta^2 truncation term is visible against the w integral on
        // strongly skewed rays, where the third derivative of the mean is
        // large.
        let wide =
            (mean_at(theta + delta)? - mean_at(theta - delta)?) / (2.0 * delta);
        let half = (mean_at(theta + 0.5 * delta)? - mean_at(theta - 0.5 * delta)?)
            / delta;
        let slope = (4.0 * half - wide) / 3.0;
        let abs_gap = (integral - slope).abs();
        let ok = abs_gap <= 1e-4 * (slope.abs() + 1e-2 * means[idx].abs());
        if !ok {
            w_checks_ok = false;
        }
        w_checks.push(WCheckRow {
            theta,
            w_integral: integral,
            mean_slope_fd: slope,
            abs_gap,
            ok,
        });
    }

    Ok(RadialScanReport {
        direction: direction.as_slice().to_vec(),
        m: m.get(),
        thetas,
        var_t,
        abs_err,
        strictly_increasing,
        w_checks,
        w_checks_ok,
    })
}

/// The Hessian constant of `Var T` at the uniform vector.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct HessianReport {
    pub m: u32,
    pub n: usize,
    /// Quadratic coefficient: `Var T(u + theta (e_i - e_j)) - Var T(u)
    /// ~ C theta^2`.
    pub constant: f64,
    pub abs_err: f64,
    /// `E a_m(Y_N)` with `a_m(y) = y (y phi_m(y) + y - (m-1))`.
    pub mean_a: f64,
    /// `Cov(Y_N, a_m(Y_N))`.
    pub cov: f64,
    pub mean_y: f64,
}

fn a_kernel(m: ShapeParam, y: f64) -> f64 {
    let phi = reverse_hazard_phi(m, y).value;
    y * (y * phi + y - (m.get() as f64 - 1.0))
}

/// Log-density of `Y_N = max` of `N` iid Erlang(m, 1): `N F^{N-1} f`.
fn log_max_density(m: ShapeParam, n: usize, y: f64) -> f64 {
    let lf = cdf_f(m, y).log_value;
    let lden = density_f(m, y).log_value;
    (n as f64).ln() + (n as f64 - 1.0) * lf + lden
}

/// Computes `C(m, N) = N^2 (2 N Cov(Y_N, a_m(Y_N)) - E a_m(Y_N))` by
/// quadrature against the max density, with certified tail bounds folded
/// into `abs_err`.
pub fn hessian_constant(m: ShapeParam, n: usize) -> Result<HessianReport, ExtremalityError> {
    if m.get() > HESSIAN_MAX_M || n > HESSIAN_MAX_N || n < 2 {
        return Err(ExtremalityError::HessianOutOfRange { m: m.get(), n });
    }
    let nf = n as f64;
    let mf = m.mf();

    // Horizon: n Q_m(Y) < 1e-22 keeps every tail certificate tiny.
    let mut y_hi = mf + 5.0;
    for _ in 0..400 {
        if nf * survival_q(m, y_hi).value < 1e-22 {
            break;
        }
        y_hi *= 1.3;
    }

    let pts = [0.0, 0.5 * mf, mf, mf + mf.sqrt() * 3.0, y_hi];
    let pts: Vec<f64> = {
        let mut v = pts.to_vec();
        v.sort_by(|a, b| a.total_cmp(b));
        v.dedup();
        v
    };
    let run = |g: &dyn Fn(f64) -> f64, context: &'static str| -> Result<(f64, f64), ExtremalityError> {
        let f = |y: f64| {
            if y <= 0.0 {
                return 0.0;
            }
            let ld = log_max_density(m, n, y);
            if ld == f64::NEG_INFINITY {
                return 0.0;
            }
            ld.exp() * g(y)
        };
        let r = integrate_segmented(&f, &pts, 1e-14, 3e-12, 8000);
        if !r.converged {
            return Err(ExtremalityError::QuadratureFailed {
                context,
                value: r.value,
                abs_err: r.abs_err,
            });
        }
        Ok((r.value, r.abs_err))
    };

    let (e_y, err_y_quad) = run(&|y| y, "hessian E[Y]")?;
    let (e_a, err_a_quad) = run(&|y| a_kernel(m, y), "hessian E[a]")?;
    let (e_ya, err_ya_quad) = run(&|y| y * a_kernel(m, y), "hessian E[Ya]")?;

    // Certified tails: density <= N f_m, a(y) <= y^2 (phi(Y) + 1) for
    // y >= Y (phi decreasing, y >= m - 1 there), and
    // int_Y^inf y^k f_m dy = ((m+k-1)!/(m-1)!) Q_{m+k}(Y).
    let c_phi = reverse_hazard_phi(m, y_hi).value + 1.0;
    let upper_moment = |k: u32| -> f64 {
        let mut coef = 1.0;
        for j in 0..k {
            coef *= mf + j as f64;
        }
        coef * survival_q(ShapeParam::new(m.get() + k).expect("small"), y_hi).value
    };
    let tail_y = nf * upper_moment(1);
    let tail_a = nf * c_phi * upper_moment(2);
    let tail_ya = nf * c_phi * upper_moment(3);

    let err_y = err_y_quad + tail_y;
    let err_a = err_a_quad + tail_a;
    let err_ya = err_ya_quad + tail_ya;

    let cov = e_ya - e_y * e_a;
    let constant = nf * nf * (2.0 * nf * cov - e_a);
    let err_cov = err_ya + e_y.abs() * err_a + e_a.abs() * err_y;
    let abs_err = nf * nf * (2.0 * nf * err_cov + err_a);
    Ok(HessianReport {
        m: m.get(),
        n,
        constant,
        abs_err,
        mean_a: e_a,
        cov,
        mean_y: e_y,
    })
}

/// Finite-difference estimate of the Hessian constant along the pair
/// direction `e_1 - e_2`, Richardson-extrapolated:
/// `C ~ (4 S(theta/2) - S(theta)) / 3` with `S(t) = (V(t) - V(0)) / t^2`.
pub fn hessian_radial_fd(
    m: ShapeParam,
    n: usize,
    theta: f64,
) -> Result<f64, ExtremalityError> {
    if n < 2 {
        return Err(ExtremalityError::Invalid("need at least two coupons"));
    }
    if !(theta > 0.0) || theta >= 1.0 / n as f64 {
        return Err(ExtremalityError::Invalid(
            "theta must be positive and inside the simplex",
        ));
    }
    let var_at = |th: f64| -> Result<f64, ExtremalityError> {
        let mut q = vec![1.0 / n as f64; n];
        q[0] += th;
        q[1] -= th;
        let pv = ProbabilityVector::normalized(q).expect("interior");
        Ok(mean_variance(&CollectorModel::new(pv, m))?.var_t)
    };
    let v0 = var_at(0.0)?;
    let s = |th: f64| -> Result<f64, ExtremalityError> {
        Ok((var_at(th)? - v0) / (th * th))
    };
    Ok((4.0 * s(theta / 2.0)? - s(theta)?) / 3.0)
}

/// Monotonicity report for `b_m(y) = y phi_m(y) + y - (m - 1)`.
#[derive(Clone, Debug, Serialize)]
pub struct BmReport {
    pub m: u32,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub min_value: f64,
    pub min_forward_difference: f64,
    /// `b_m > 1` everywhere on the grid.
    pub above_one: bool,
    /// Strictly increasing along the grid.
    pub increasing: bool,
}

/// Evaluate `b_m` on `grid` (default log grid `[1e-3, 1e3]` when empty).
pub fn monotone_bm_report(m: ShapeParam, grid: &[f64]) -> BmReport {
    let grid: Vec<f64> = if grid.is_empty() {
        log_grid(1e-3, 1e3, 8)
    } else {
        grid.to_vec()
    };
    let values: Vec<f64> = grid
        .iter()
        .map(|&y| y * reverse_hazard_phi(m, y).value + y - (m.get() as f64 - 1.0))
        .collect();
    let mut min_value = f64::INFINITY;
    let mut min_diff = f64::INFINITY;
    for (i, &v) in values.iter().enumerate() {
        min_value = min_value.min(v);
        if i > 0 {
            min_diff = min_diff.min(v - values[i - 1]);
        }
    }
    BmReport {
        m: m.get(),
        grid,
        values: values.clone(),
        min_value,
        min_forward_difference: min_diff,
        above_one: min_value > 1.0,
        increasing: min_diff > 0.0,
    }
}

/// One named monotonicity check of the reverse-hazard suite.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteCheck {
    pub name: String,
    pub ok: bool,
}

/// Kernel monotonicity suite over `m = 1..=m_max` on a log grid
/// `[1e-3, 1e3]`: hazard `h` increasing, reverse hazard `phi` decreasing,
/// elasticity `e < 0` decreasing with `e(0+) = -1`, and `b_m > 1`
/// increasing.
pub fn reverse_hazard_suite(m_max: u32, points_per_decade: usize) -> Vec<SuiteCheck> {
    let grid = log_grid(1e-3, 1e3, points_per_decade.max(2));
    let mut checks = Vec::new();
    for mv in 1..=m_max {
        let m = ShapeParam::new(mv).expect("positive");
        let h: Vec<f64> = grid.iter().map(|&y| upper_hazard_h(m, y).value).collect();
        let phi: Vec<f64> = grid
            .iter()
            .map(|&y| reverse_hazard_phi(m, y).log_value)
            .collect();
        let e: Vec<f64> = grid.iter().map(|&y| log_elasticity_e(m, y)).collect();
        let b: Vec<f64> = grid
            .iter()
            .zip(phi.iter())
            .map(|(&y, &lp)| y * lp.exp() + y - (mv as f64 - 1.0))
            .collect();
        let h_ok = if mv == 1 {
            h.iter().all(|&v| (v - 1.0).abs() <= 1e-12)
        } else {
            h.windows(2).all(|w| w[1] > w[0])
        };
        checks.push(SuiteCheck {
            name: format!("m={mv}: hazard increasing"),
            ok: h_ok,
        });
        checks.push(SuiteCheck {
            name: format!("m={mv}: reverse hazard decreasing"),
            ok: phi.windows(2).all(|w| w[1] < w[0]),
        });
        checks.push(SuiteCheck {
            name: format!("m={mv}: elasticity negative decreasing"),
            ok: e.iter().all(|&v| v < 0.0) && e.windows(2).all(|w| w[1] < w[0]),
        });
        checks.push(SuiteCheck {
            name: format!("m={mv}: elasticity -> -1 at 0"),
            ok: (log_elasticity_e(m, 1e-9) + 1.0).abs() < 1e-6,
        });
        checks.push(SuiteCheck {
            name: format!("m={mv}: b_m > 1 increasing"),
            ok: b.iter().all(|&v| v > 1.0) && b.windows(2).all(|w| w[1] > w[0]),
        });
        // Log-scale concavity: phi(cy)/phi(y) strictly decreasing in y.
        // Compared in log space so the deep right tail cannot tie at an
        // underflowed zero.
        for c in [1.5f64, 2.0, 5.0] {
            let log_ratio: Vec<f64> = grid
                .iter()
                .map(|&y| {
                    reverse_hazard_phi(m, c * y).log_value
                        - reverse_hazard_phi(m, y).log_value
                })
                .collect();
            checks.push(SuiteCheck {
                name: format!("m={mv}: phi({c}y)/phi(y) decreasing"),
                ok: log_ratio.windows(2).all(|w| w[1] < w[0]),
            });
        }
    }
    checks
}

/// One row of the mass-decay check: simulated `E R_r` against `r/N`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DecayRow {
    pub r: usize,
    pub mean: f64,
    pub std_error: f64,
    pub bound: f64,
    pub within: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CauchyDecayReport {
    pub trials: u64,
    pub rows: Vec<DecayRow>,
    pub all_within: bool,
}

/// Simulates the single-copy collection chain and checks the
/// Cauchy-Schwarz bound `E R_r <= r/N` on the uncollected mass when `r`
/// coupons remain, within three standard errors (equality holds for
/// uniform probabilities, where the chain is deterministic).
pub fn cauchy_mass_decay_check(
    p: &ProbabilityVector,
    trials: u64,
    seed: u64,
) -> Result<CauchyDecayReport, ExtremalityError> {
    let stats = simulate_mass_decay(p, trials, seed)?;
    let n = p.len();
    let mut rows = Vec::with_capacity(n);
    let mut all_within = true;
    for (k, s) in stats.iter().enumerate() {
        let r = n - k;
        let bound = r as f64 / n as f64;
        let within = s.mean <= bound + 3.0 * s.std_error_mean + 1e-12;
        if !within {
            all_within = false;
        }
        rows.push(DecayRow {
            r,
            mean: s.mean,
            std_error: s.std_error_mean,
            bound,
            within,
        });
    }
    Ok(CauchyDecayReport {
        trials,
        rows,
        all_within,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(m: u32) -> ShapeParam {
        ShapeParam::new(m).unwrap()
    }

    #[test]
    fn two_coupon_hessian_has_closed_form() {
        // m = 1, N = 2: Y is the max of two exponentials; with
        // a(y) = y^2 / (e^y - 1) + y^2 one gets E Y = 3/2, E a = 4,
        // E[Ya] = 12, Cov = 6, and C = 4 (2*2*6 - 4) = 80.
        let rep = hessian_constant(shape(1), 2).unwrap();
        assert!((rep.mean_y - 1.5).abs() < 1e-9, "E Y = {}", rep.mean_y);
        assert!((rep.mean_a - 4.0).abs() < 1e-8, "E a = {}", rep.mean_a);
        assert!((rep.cov - 6.0).abs() < 1e-8, "cov = {}", rep.cov);
        assert!(
            (rep.constant - 80.0).abs() < 1e-6,
            "C = {}",
            rep.constant
        );
        assert!(rep.abs_err < 1e-6);
    }

    #[test]
    fn hessian_reference_values() {
        // Frozen against an independent high-precision quadrature of the
        // covariance identity.
        let cases = [
            (2u32, 2usize, 180.000000f64),
            (5, 2, 604.614258),
            (3, 4, 3110.126496),
            (1, 8, 10160.601474),
            (5, 8, 54188.836799),
        ];
        for &(m, n, expect) in &cases {
            let rep = hessian_constant(shape(m), n).unwrap();
            let rel = (rep.constant - expect).abs() / expect;
            assert!(rel < 1e-6, "C({m},{n}) = {} vs {expect}", rep.constant);
        }
    }

    #[test]
    fn hessian_rejects_out_of_range() {
        assert!(matches!(
            hessian_constant(shape(11), 4),
            Err(ExtremalityError::HessianOutOfRange { .. })
        ));
        assert!(matches!(
            hessian_constant(shape(2), 51),
            Err(ExtremalityError::HessianOutOfRange { .. })
        ));
    }

    #[test]
    fn finite_difference_agrees_with_quadrature() {
        let fd = hessian_radial_fd(shape(1), 2, 0.1).unwrap();
        assert!((fd - 80.0).abs() / 80.0 < 0.01, "fd = {fd}");
        let m2 = hessian_constant(shape(2), 2).unwrap().constant;
        let fd2 = hessian_radial_fd(shape(2), 2, 0.08).unwrap();
        assert!((fd2 - m2).abs() / m2 < 0.01, "fd2 = {fd2} vs {m2}");
    }

    #[test]
    fn radial_scan_two_coupons() {
        let d = RadialDirection::new(vec![1.0, -1.0]).unwrap();
        let rep = radial_variance_scan(&d, shape(1), Some(0.2), 5).unwrap();
        assert!(rep.strictly_increasing);
        assert!(rep.w_checks_ok, "{:?}", rep.w_checks);
        // Anchor: var at theta = 0 is 2, at theta = 0.1 it is 103/36.
        assert!((rep.var_t[0] - 2.0).abs() < 1e-10);
        let at = rep
            .thetas
            .iter()
            .position(|&t| (t - 0.1).abs() < 1e-12)
            .expect("grid hits 0.1");
        assert!((rep.var_t[at] - 103.0 / 36.0).abs() < 1e-9);
    }

    #[test]
    fn radial_scan_three_coupons_m2() {
        let d = RadialDirection::new(vec![0.5, 0.25, -0.75]).unwrap();
        let rep = radial_variance_scan(&d, shape(2), None, 10).unwrap();
        assert!(rep.strictly_increasing);
        assert!(rep.w_checks_ok, "{:?}", rep.w_checks);
    }

    #[test]
    fn scan_validates_parameters() {
        let d = RadialDirection::new(vec![1.0, -1.0]).unwrap();
        assert!(radial_variance_scan(&d, shape(1), Some(0.6), 8).is_err());
        assert!(radial_variance_scan(&d, shape(1), Some(0.1), 2).is_err());
    }

    #[test]
    fn bm_monotone_and_anchored() {
        let rep = monotone_bm_report(shape(1), &[]);
        assert!(rep.above_one && rep.increasing);
        // b_1(1) = 1/(e - 1) + 1.
        let b1 = 1.0 * reverse_hazard_phi(shape(1), 1.0).value + 1.0;
        assert!((b1 - 1.581_976_706_9).abs() < 1e-9, "b_1(1) = {b1}");
        for m in 2..=10u32 {
            let rep = monotone_bm_report(shape(m), &[]);
            assert!(rep.above_one, "m={m}: min {}", rep.min_value);
            assert!(rep.increasing, "m={m}");
        }
    }

    #[test]
    fn hazard_suite_passes() {
        let checks = reverse_hazard_suite(10, 8);
        for c in &checks {
            assert!(c.ok, "{}", c.name);
        }
    }

    #[test]
    fn mass_decay_uniform_is_tight() {
        let p = ProbabilityVector::uniform(5).unwrap();
        let rep = cauchy_mass_decay_check(&p, 400, 11).unwrap();
        assert!(rep.all_within);
        for row in &rep.rows {
            // Uniform: equality R_r = r/N.
            assert!((row.mean - row.bound).abs() < 1e-12);
        }
    }

    #[test]
    fn mass_decay_skewed_is_strict() {
        let p = ProbabilityVector::normalized(vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let rep = cauchy_mass_decay_check(&p, 30_000, 19).unwrap();
        assert!(rep.all_within);
        // Strict slack for interior r.
        let interior = rep.rows.iter().find(|r| r.r == 2).unwrap();
        assert!(interior.mean < interior.bound, "{:?}", interior);
    }
}
