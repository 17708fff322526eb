//! The poissonized completion time and its radial calculus.
//!
//! Under poissonization the completion time is `X = max_j X_j` with
//! independent `X_j ~ Erlang(m, p_j)`, so the CDF factorizes:
//! `G(t) = prod_j F_m(p_j t)`. This module evaluates `G`, its density,
//! and the derivative of the law along radial perturbations
//! `q(theta) = u + theta h` of the uniform vector `u`, where `h` sums to
//! zero. The weight
//!
//! `w_theta(t) = G(t) (t/theta) [ (1/N) sum_j phi_m(q_j t) - sum_j q_j phi_m(q_j t) ]`
//!
//! integrates to `d E X / d theta` and encodes the size-bias structure
//! that drives variance extremality of the uniform vector.
//!
//! All products of `F` values and sums of `phi` values are assembled in
//! log space (with a max shift for the `phi` sums), so the functions stay
//! meaningful far into the tails where the natural-scale factors underflow.

use serde::Serialize;
use thiserror::Error;

use crate::exact_moments::CollectorModel;
use crate::gamma_kernel::{reverse_hazard_phi, ShapeParam};
use crate::numeric::CompensatedSum;

/// Relative slack granted to sign checks on the radial weight; the bracket
/// is a difference of `phi` sums evaluated to roundoff.
const W_SIGN_SLACK: f64 = 1e-13;

/// Errors from radial-direction handling.
#[derive(Debug, Error)]
pub enum DirectionError {
    #[error("direction must have at least two coordinates")]
    TooShort,
    #[error("direction sums to {sum:e}, not zero")]
    NotCentered { sum: f64 },
    #[error("direction is identically zero")]
    Zero,
    #[error("coordinate {index} leaves the simplex at theta = {theta}")]
    DomainExit { theta: f64, index: usize },
}

/// A zero-sum perturbation direction of the uniform probability vector.
#[derive(Clone, Debug, Serialize)]
pub struct RadialDirection {
    h: Vec<f64>,
}

impl RadialDirection {
    /// Requires `sum h = 0` within `1e-14` (absolute) and `h != 0`.
    pub fn new(h: Vec<f64>) -> Result<Self, DirectionError> {
        if h.len() < 2 {
            return Err(DirectionError::TooShort);
        }
        let mut sum = CompensatedSum::new();
        for &v in &h {
            sum.add(v);
        }
        if sum.value().abs() > 1e-14 {
            return Err(DirectionError::NotCentered { sum: sum.value() });
        }
        if h.iter().all(|&v| v == 0.0) {
            return Err(DirectionError::Zero);
        }
        Ok(Self { h })
    }

    /// Centers an arbitrary vector by subtracting its mean.
    pub fn centered(raw: Vec<f64>) -> Result<Self, DirectionError> {
        if raw.len() < 2 {
            return Err(DirectionError::TooShort);
        }
        let mut sum = CompensatedSum::new();
        for &v in &raw {
            sum.add(v);
        }
        let mean = sum.value() / raw.len() as f64;
        Self::new(raw.into_iter().map(|v| v - mean).collect())
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.h
    }

    /// Largest `theta` keeping every coordinate of `u + theta h` positive.
    pub fn exit_theta(&self) -> f64 {
        let n = self.h.len() as f64;
        self.h
            .iter()
            .filter(|&&v| v < 0.0)
            .map(|&v| (1.0 / n) / (-v))
            .fold(f64::INFINITY, f64::min)
    }

    /// The perturbed vector `u + theta h`; errors if any coordinate is
    /// non-positive.
    pub fn q_at(&self, theta: f64) -> Result<Vec<f64>, DirectionError> {
        let n = self.h.len() as f64;
        let q: Vec<f64> = self.h.iter().map(|&v| 1.0 / n + theta * v).collect();
        if let Some(index) = q.iter().position(|&v| v <= 0.0) {
            return Err(DirectionError::DomainExit { theta, index });
        }
        Ok(q)
    }
}

/// `G(t) = prod_j F_m(p_j t)`, the CDF of the poissonized completion time.
pub fn completion_cdf(model: &CollectorModel, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    log_completion_cdf(model.p.as_slice(), model.shape(), t).exp()
}

fn log_completion_cdf(p: &[f64], m: ShapeParam, t: f64) -> f64 {
    let mut acc = CompensatedSum::new();
    for &pj in p {
        let lf = crate::gamma_kernel::cdf_f(m, pj * t).log_value;
        if lf == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        acc.add(lf);
    }
    acc.value()
}

/// Log-shifted reverse-hazard sum: returns `(L, sum_j c_j exp(lphi_j - L))`
/// where `L = max_j lphi_j` and `lphi_j = log phi_m(q_j t)`, along with the
/// sum of absolute summands for slack estimates.
fn shifted_phi_sums(
    q: &[f64],
    coeffs: impl Fn(usize, f64) -> f64,
    m: ShapeParam,
    t: f64,
) -> (f64, f64, f64) {
    let lphi: Vec<f64> = q
        .iter()
        .map(|&qj| reverse_hazard_phi(m, qj * t).log_value)
        .collect();
    let shift = lphi.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut acc = CompensatedSum::new();
    for (j, (&qj, &l)) in q.iter().zip(lphi.iter()).enumerate() {
        acc.add(coeffs(j, qj) * (l - shift).exp());
    }
    (shift, acc.value(), acc.abs_total())
}

/// Density of `X`: `g(t) = G(t) sum_j p_j phi_m(p_j t)`.
pub fn completion_density(model: &CollectorModel, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let p = model.p.as_slice();
    let m = model.shape();
    let log_g = log_completion_cdf(p, m, t);
    if log_g == f64::NEG_INFINITY {
        // F_m(p_j t) > 0 for t > 0, so this only happens on underflow of
        // the log itself; the density underflows with it.
        return 0.0;
    }
    let (shift, sum, _) = shifted_phi_sums(p, |_, qj| qj, m, t);
    if sum <= 0.0 {
        return 0.0;
    }
    (log_g + shift + sum.ln()).exp()
}

/// The radial derivative weight `w_theta(t)` together with an absolute
/// roundoff slack, for sign checks.
pub fn radial_derivative_w_with_slack(
    direction: &RadialDirection,
    m: ShapeParam,
    theta: f64,
    t: f64,
) -> Result<(f64, f64), DirectionError> {
    assert!(theta > 0.0, "theta must be positive");
    let q = direction.q_at(theta)?;
    if t <= 0.0 {
        return Ok((0.0, 0.0));
    }
    let n = q.len() as f64;
    let log_g = log_completion_cdf(&q, m, t);
    if log_g == f64::NEG_INFINITY {
        return Ok((0.0, 0.0));
    }
    // Bracket: (1/N) sum phi - sum q_j phi, assembled under one shift.
    let (shift, bracket, abs_sum) = shifted_phi_sums(&q, |_, qj| 1.0 / n - qj, m, t);
    let scale = (log_g + shift).exp() * (t / theta);
    let w = scale * bracket;
    let slack = W_SIGN_SLACK * scale.abs() * abs_sum;
    Ok((w, slack))
}

/// The radial derivative weight `w_theta(t)`; integrates over `t` to
/// `d E X / d theta` at `q(theta)`.
pub fn radial_derivative_w(
    direction: &RadialDirection,
    m: ShapeParam,
    theta: f64,
    t: f64,
) -> Result<f64, DirectionError> {
    radial_derivative_w_with_slack(direction, m, theta, t).map(|(w, _)| w)
}

/// The `phi`-weighted mean `M(t) = sum_j q_j phi(q_j t) / sum_j phi(q_j t)`.
///
/// `M` is strictly decreasing in `t` for non-uniform `q`, equals `1/N`
/// identically for uniform `q`, and tends to the harmonic-mean form
/// `N / sum_j (1/q_j)` as `t -> 0`.
pub fn weighted_mean_m(q: &[f64], m: ShapeParam, t: f64) -> f64 {
    assert!(t > 0.0, "t must be positive");
    assert!(!q.is_empty() && q.iter().all(|&v| v > 0.0));
    let (_, numer, _) = shifted_phi_sums(q, |_, qj| qj, m, t);
    let (_, denom, _) = shifted_phi_sums(q, |_, _| 1.0, m, t);
    numer / denom
}

/// Size-bias ratio `(1/theta) (1/(N M(t)) - 1)` along a radial ray;
/// strictly increasing in `t` for non-uniform `q(theta)`.
pub fn size_bias_ratio(
    direction: &RadialDirection,
    m: ShapeParam,
    theta: f64,
    t: f64,
) -> Result<f64, DirectionError> {
    assert!(theta > 0.0, "theta must be positive");
    let q = direction.q_at(theta)?;
    let n = q.len() as f64;
    let mm = weighted_mean_m(&q, m, t);
    Ok((1.0 / theta) * (1.0 / (n * mm) - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_moments::{mean_variance, ProbabilityVector};
    use crate::quadrature::integrate_segmented;

    fn shape(m: u32) -> ShapeParam {
        ShapeParam::new(m).unwrap()
    }

    fn model(p: Vec<f64>, m: u32) -> CollectorModel {
        CollectorModel::new(
            ProbabilityVector::normalized(p).unwrap(),
            shape(m),
        )
    }

    #[test]
    fn direction_validation() {
        assert!(matches!(
            RadialDirection::new(vec![1.0]),
            Err(DirectionError::TooShort)
        ));
        assert!(matches!(
            RadialDirection::new(vec![1.0, -0.5]),
            Err(DirectionError::NotCentered { .. })
        ));
        assert!(matches!(
            RadialDirection::new(vec![0.0, 0.0]),
            Err(DirectionError::Zero)
        ));
        let d = RadialDirection::new(vec![1.0, -1.0]).unwrap();
        assert_eq!(d.len(), 2);
        // Exit where 0.5 - theta = 0.
        assert!((d.exit_theta() - 0.5).abs() < 1e-15);
        assert!(matches!(
            d.q_at(0.5),
            Err(DirectionError::DomainExit { index: 1, .. })
        ));
        let q = d.q_at(0.1).unwrap();
        assert!((q[0] - 0.6).abs() < 1e-15 && (q[1] - 0.4).abs() < 1e-15);

        let c = RadialDirection::centered(vec![3.0, 1.0, 2.0]).unwrap();
        let s: f64 = c.as_slice().iter().sum();
        assert!(s.abs() <= 1e-14);
    }

    #[test]
    fn cdf_against_closed_form_two_exponentials() {
        // N = 2, m = 1: G(t) = (1 - e^{-p1 t})(1 - e^{-p2 t}).
        let mdl = model(vec![0.6, 0.4], 1);
        for &t in &[0.3, 1.0, 4.0, 20.0] {
            let g = completion_cdf(&mdl, t);
            let expect =
                (-(-0.6f64 * t).exp_m1()) * (-(-0.4f64 * t).exp_m1());
            assert!((g - expect).abs() <= 1e-14 * expect.max(1e-300), "t={t}");
        }
        assert_eq!(completion_cdf(&mdl, 0.0), 0.0);
        assert_eq!(completion_cdf(&mdl, -1.0), 0.0);
    }

    #[test]
    fn density_single_coupon_is_erlang() {
        // N = 1: g = f_m(t) exactly (p_1 = 1).
        let mdl = model(vec![1.0], 3);
        for &t in &[0.5, 2.0, 7.0] {
            let g = completion_density(&mdl, t);
            let f = crate::gamma_kernel::density_f(shape(3), t).value;
            assert!((g - f).abs() <= 1e-13 * f, "t={t}");
        }
        // At t = 1 with m = 1: g = e^{-1}.
        let e1 = model(vec![1.0], 1);
        let g = completion_density(&e1, 1.0);
        assert!((g - (-1.0f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn density_integrates_to_one() {
        let mdl = model(vec![0.5, 0.3, 0.2], 2);
        // Horizon where the remaining mass is analytically 1 - G(T).
        let t_hi = 400.0;
        let r = integrate_segmented(
            &|t| completion_density(&mdl, t),
            &[0.0, 2.0, 10.0, 40.0, t_hi],
            1e-12,
            1e-11,
            4000,
        );
        assert!(r.converged);
        let total = r.value + (1.0 - completion_cdf(&mdl, t_hi));
        assert!((total - 1.0).abs() < 1e-8, "total = {total}");
    }

    #[test]
    fn density_survives_deep_tails() {
        let mdl = model(vec![0.5, 0.5], 2);
        let g = completion_density(&mdl, 4000.0);
        assert!(g >= 0.0 && g < 1e-300, "g = {g}");
        assert!(g.is_finite());
    }

    #[test]
    fn weighted_mean_limits_and_uniformity() {
        // t -> 0 limit is N / sum(1/q_j): for q = (0.6, 0.4) this is
        // 2 / (1/0.6 + 1/0.4) = 0.48.
        let q = [0.6, 0.4];
        let harmonic_form: f64 = 2.0 / (1.0 / 0.6 + 1.0 / 0.4);
        assert!((harmonic_form - 0.48).abs() < 1e-15);
        for m in [1u32, 2, 3] {
            let m0 = weighted_mean_m(&q, shape(m), 1e-6);
            assert!(
                (m0 - harmonic_form).abs() < 1e-5,
                "m={m}: M(0+) = {m0}"
            );
        }
        // Uniform q: M = 1/N at every t.
        let u = [0.25; 4];
        for &t in &[0.01, 1.0, 30.0] {
            assert!((weighted_mean_m(&u, shape(2), t) - 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn weighted_mean_is_strictly_decreasing() {
        let q = [0.5, 0.3, 0.2];
        for m in [1u32, 2, 5] {
            let mut prev = f64::INFINITY;
            for &t in &[0.01, 0.1, 1.0, 5.0, 20.0, 100.0, 400.0] {
                let v = weighted_mean_m(&q, shape(m), t);
                assert!(v < prev, "m={m} t={t}: {v} !< {prev}");
                prev = v;
            }
            // Large t: dominated by the smallest q_j.
            let deep = weighted_mean_m(&q, shape(m), 2000.0);
            assert!((deep - 0.2).abs() < 0.01, "m={m}: {deep}");
        }
    }

    #[test]
    fn size_bias_ratio_increases_along_t() {
        let d = RadialDirection::new(vec![0.5, -0.25, -0.25]).unwrap();
        for m in [1u32, 3] {
            let mut prev = f64::NEG_INFINITY;
            for &t in &[0.05, 0.5, 2.0, 10.0, 50.0] {
                let r = size_bias_ratio(&d, shape(m), 0.2, t).unwrap();
                assert!(r > prev, "m={m} t={t}");
                prev = r;
            }
        }
    }

    #[test]
    fn w_is_nonnegative_and_integrates_to_mean_slope() {
        let d = RadialDirection::new(vec![1.0, -1.0]).unwrap();
        let m = shape(2);
        let theta = 0.1;
        // Pointwise sign: w >= 0 up to roundoff slack.
        for &t in &[0.05, 0.5, 1.0, 3.0, 8.0, 20.0, 60.0] {
            let (w, slack) =
                radial_derivative_w_with_slack(&d, m, theta, t).unwrap();
            assert!(w >= -slack, "t={t}: w={w} slack={slack}");
        }
        // Integral equals d E X / d theta by central difference.
        let r = integrate_segmented(
            &|t| radial_derivative_w(&d, m, theta, t).unwrap(),
            &[0.0, 1.0, 5.0, 20.0, 120.0, 400.0],
            1e-12,
            1e-11,
            4000,
        );
        assert!(r.converged);
        // E X = E T, so the mean slope can come from the moment engine.
        let delta = 1e-3;
        let mean_at = |th: f64| {
            let mdl = model(d.q_at(th).unwrap(), 2);
            mean_variance(&mdl).unwrap().mean
        };
        let slope = (mean_at(theta + delta) - mean_at(theta - delta)) / (2.0 * delta);
        assert!(
            (r.value - slope).abs() <= 1e-5 * slope.abs().max(1.0),
            "integral {} vs slope {}",
            r.value,
            slope
        );
    }

    #[test]
    fn w_cross_checks_against_density_ratio() {
        // The bracket is S (1/N - M) with S = sum phi, and the density is
        // g = G S M, so w = g (t/theta) (1/(N M) - 1). Verify the two
        // assemblies agree.
        let d = RadialDirection::new(vec![0.5, 0.0, -0.5]).unwrap();
        let m = shape(3);
        let theta = 0.15;
        let q = d.q_at(theta).unwrap();
        let mdl = model(q.clone(), 3);
        for &t in &[0.5, 2.0, 9.0, 30.0] {
            let w = radial_derivative_w(&d, m, theta, t).unwrap();
            let g = completion_density(&mdl, t);
            let mm = weighted_mean_m(&q, m, t);
            let direct = g * (t / theta) * (1.0 / (3.0 * mm) - 1.0);
            let rel = if w == 0.0 && direct == 0.0 {
                0.0
            } else {
                (w - direct).abs() / direct.abs().max(1e-300)
            };
            assert!(rel < 1e-9, "t={t}: w={w} direct={direct}");
        }
    }

    #[test]
    fn w_centroid_dominates_mean_ratio() {
        // int t w dt / int w dt >= E X^2 / E X for the perturbed model: the
        // weight w tilts mass to the right of the size-biased density.
        let d = RadialDirection::new(vec![1.0, -1.0]).unwrap();
        let m = shape(1);
        let theta = 0.15;
        let pts = [0.0, 1.0, 5.0, 20.0, 120.0, 400.0];
        let w0 = integrate_segmented(
            &|t| radial_derivative_w(&d, m, theta, t).unwrap(),
            &pts,
            1e-13,
            1e-11,
            4000,
        );
        let w1 = integrate_segmented(
            &|t| t * radial_derivative_w(&d, m, theta, t).unwrap(),
            &pts,
            1e-13,
            1e-11,
            4000,
        );
        assert!(w0.converged && w1.converged);
        let q = d.q_at(theta).unwrap();
        let mdl = model(q, 1);
        let report = mean_variance(&mdl).unwrap();
        let ex = report.mean;
        let ex2 = report.var_x + ex * ex;
        assert!(
            w1.value / w0.value >= ex2 / ex - 1e-8,
            "centroid {} vs ratio {}",
            w1.value / w0.value,
            ex2 / ex
        );
    }
}
