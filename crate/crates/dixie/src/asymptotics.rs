//! Gumbel asymptotics for equal probabilities and the two unequal-weight
//! case studies.
//!
//! For equal weights `p_j = 1/n`, the centered variable `(X - n b)/(n a)`
//! converges to the Gumbel law; `gumbel_fit_equal` tabulates the exact
//! finite-`n` CDF against `exp(-e^{-x})` and `equal_moment_asymptotics`
//! compares exact moments against the predictions `E T ~ n(b + gamma a)`
//! and `Var T ~ (pi^2/6) n^2 a^2`.
//!
//! `case1_limit` treats fixed rate sequences `a_1 < a_2 < ...` (the
//! completion law converges, after scaling by `A_N = sum_{j<=N} a_j`, to
//! the law with CDF `prod_j F_m(a_j s)`), with certified truncation of the
//! infinite product. `case2_powerlaw` treats the power-law family
//! `p_j ~ j^{-alpha}`, where the expected-defect count at the
//! Gumbel-centered clock converges to `e^{-x}` at a logarithmic rate.
//!
//! All CDFs are assembled as `exp(sum log F)` and all defect sums in the
//! natural scale with compensated accumulation; no formula here subtracts
//! nearly equal quantities.

use serde::Serialize;
use thiserror::Error;

use crate::centering::{solve_centering, CenteringError, CenteringPair};
use crate::exact_moments::{
    rising_moment_quadrature, CollectorModel, ModelError, MomentError, ProbabilityVector,
};
use crate::gamma_kernel::{cdf_f, survival_q, ShapeParam};
use crate::numeric::{harmonic, harmonic2, ln_factorial, CompensatedSum, EULER_GAMMA};
use crate::quadrature::integrate_segmented;

/// Beyond this argument `Q_m` underflows and a product factor is exactly 1.
const Q_UNDERFLOW_ARG: f64 = 745.0;
/// Certified truncation bound required of case-1 product truncations.
const TRUNCATION_GATE: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum AsymptoticsError {
    #[error(transparent)]
    Centering(#[from] CenteringError),
    #[error(transparent)]
    Moment(#[from] MomentError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("truncated product tail bound {bound:e} exceeds {TRUNCATION_GATE:e}; raise truncation_j")]
    TruncationInsufficient { bound: f64 },
    #[error("{context} quadrature did not converge (value {value:e}, error {abs_err:e})")]
    QuadratureFailed {
        context: &'static str,
        value: f64,
        abs_err: f64,
    },
    #[error("invalid parameter: {0}")]
    Invalid(&'static str),
}

/// One abscissa of a Gumbel fit table.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GumbelRow {
    pub x: f64,
    pub exact: f64,
    pub gumbel: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GumbelFitReport {
    pub n: f64,
    pub m: u32,
    pub b: f64,
    pub a: f64,
    pub sup_distance: f64,
    pub rows: Vec<GumbelRow>,
}

/// Default abscissa grid for distribution tables: `[-3, 8]` in steps of
/// 0.05.
pub fn default_x_grid() -> Vec<f64> {
    (0..=220).map(|i| -3.0 + 0.05 * i as f64).collect()
}

/// Exact equal-weights CDF of `(X - n b)/(n a)` at `x` against the Gumbel
/// limit. The exact value is `F_m(b + a x)^n`, assembled in log scale.
pub fn gumbel_fit_equal(
    n: f64,
    m: ShapeParam,
    x_grid: &[f64],
) -> Result<GumbelFitReport, AsymptoticsError> {
    let pair = solve_centering(n, m)?;
    let mut rows = Vec::with_capacity(x_grid.len());
    let mut sup = 0.0f64;
    for &x in x_grid {
        let t = (pair.b + pair.a * x).max(0.0);
        let exact = (n * cdf_f(m, t).log_value).exp();
        let gumbel = crate::numeric::gumbel_cdf(x);
        let d = (exact - gumbel).abs();
        if d > sup {
            sup = d;
        }
        rows.push(GumbelRow { x, exact, gumbel });
    }
    Ok(GumbelFitReport {
        n,
        m: m.get(),
        b: pair.b,
        a: pair.a,
        sup_distance: sup,
        rows,
    })
}

/// Exact equal-weights moments against their Gumbel predictions.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EqualMomentRow {
    pub n: f64,
    pub b: f64,
    pub a: f64,
    pub mean: f64,
    pub var_t: f64,
    /// `n (b + gamma a)`.
    pub predicted_mean: f64,
    /// `(pi^2 / 6) n^2 a^2`.
    pub predicted_var: f64,
    pub mean_residual: f64,
    pub var_residual: f64,
    /// `(mean - [n ln n + (m-1) n ln ln n + n (gamma - ln (m-1)!)]) / n`.
    pub three_term_residual: f64,
}

fn equal_tail_bound(n: f64, m: ShapeParam, r: u32, s_hi: f64) -> f64 {
    // n * int_S^inf s^{r-1} Q_m(s) ds = n * sum_{a<m} ((a+r-1)!/a!) Q_{a+r}(S).
    let mut acc = 0.0;
    for a in 0..m.get() {
        let coef =
            (ln_factorial(u64::from(a + r) - 1) - ln_factorial(u64::from(a))).exp();
        let q = survival_q(ShapeParam::new(a + r).expect("positive"), s_hi).value;
        acc += coef * q;
    }
    n * acc
}

/// Moments of the equal-weights model in completion-scale units.
///
/// Uses the exact harmonic closed form for `m = 1` at integral `n`, and a
/// one-dimensional quadrature of `r s^{r-1} (1 - F_m(s)^n)` otherwise.
fn equal_mean_var(n: f64, m: ShapeParam, pair: &CenteringPair) -> Result<(f64, f64), AsymptoticsError> {
    if m.get() == 1 && n.fract() == 0.0 && n <= 1e7 {
        let k = n as u64;
        let mean = n * harmonic(k);
        let var_t = n * n * harmonic2(k) - mean;
        return Ok((mean, var_t));
    }
    // Horizon: n Q_m(S) < 1e-20.
    let mut s_hi = pair.b + 10.0 * pair.a.max(1.0);
    for _ in 0..200 {
        if n * survival_q(m, s_hi).value < 1e-20 {
            break;
        }
        s_hi *= 1.3;
    }
    let mut pts = vec![
        0.0,
        (pair.b - 8.0 * pair.a).max(0.0),
        (pair.b - 3.0 * pair.a).max(0.0),
        pair.b,
        (pair.b + 5.0 * pair.a).min(s_hi),
        s_hi,
    ];
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup();
    let survivor = |s: f64| -> f64 {
        if s <= 0.0 {
            return 1.0;
        }
        let lf = cdf_f(m, s).log_value;
        if lf == f64::NEG_INFINITY {
            return 1.0;
        }
        -(n * lf).exp_m1()
    };
    let mut tau = [0.0f64; 2];
    for r in 1..=2u32 {
        let rf = f64::from(r);
        let f = |s: f64| rf * s.powi(r as i32 - 1) * survivor(s);
        let out = integrate_segmented(&f, &pts, 1e-300, 3e-12, 20_000);
        let tail = equal_tail_bound(n, m, r, s_hi);
        let value = out.value + 0.5 * tail;
        let abs_err = out.abs_err + 0.5 * tail;
        if !out.converged || abs_err > 1e-9 * value.abs() {
            return Err(AsymptoticsError::QuadratureFailed {
                context: "equal-weights moment",
                value,
                abs_err,
            });
        }
        tau[(r - 1) as usize] = value;
    }
    let mean = n * tau[0];
    let var_x = n * n * (tau[1] - tau[0] * tau[0]);
    Ok((mean, var_x - mean))
}

/// Exact moments and Gumbel predictions for a list of equal-weight sizes;
/// requires every `n >= 10`.
pub fn equal_moment_asymptotics(
    m: ShapeParam,
    n_list: &[f64],
) -> Result<Vec<EqualMomentRow>, AsymptoticsError> {
    if n_list.iter().any(|&n| !(n >= 10.0)) {
        return Err(AsymptoticsError::Invalid("equal-weights sizes must be >= 10"));
    }
    let mf = f64::from(m.get());
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let pair = solve_centering(n, m)?;
        let (mean, var_t) = equal_mean_var(n, m, &pair)?;
        let predicted_mean = n * (pair.b + EULER_GAMMA * pair.a);
        let predicted_var =
            core::f64::consts::PI.powi(2) / 6.0 * n * n * pair.a * pair.a;
        let three_term = n * n.ln()
            + (mf - 1.0) * n * n.ln().ln()
            + n * (EULER_GAMMA - ln_factorial(u64::from(m.get()) - 1));
        rows.push(EqualMomentRow {
            n,
            b: pair.b,
            a: pair.a,
            mean,
            var_t,
            predicted_mean,
            predicted_var,
            mean_residual: (mean / predicted_mean - 1.0).abs(),
            var_residual: (var_t / predicted_var - 1.0).abs(),
            three_term_residual: (mean - three_term) / n,
        });
    }
    Ok(rows)
}

/// Terminal defect mass of a general model at clock time `t`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DefectMass {
    /// `sum_j Q_m(p_j t)`, the expected number of unfinished coupons.
    pub expected_defects: f64,
    /// `sum_j Q_m(p_j t)^2`; small values certify an asymptotically
    /// atomless defect process.
    pub sum_sq: f64,
    pub max_q: f64,
}

pub fn terminal_defect_mass(p: &[f64], m: ShapeParam, t: f64) -> DefectMass {
    let mut s1 = CompensatedSum::new();
    let mut s2 = CompensatedSum::new();
    let mut max_q = 0.0f64;
    for &pj in p {
        let q = survival_q(m, pj * t).value;
        s1.add(q);
        s2.add(q * q);
        if q > max_q {
            max_q = q;
        }
    }
    DefectMass {
        expected_defects: s1.value(),
        sum_sq: s2.value(),
        max_q,
    }
}

/// Fixed rate sequence for the case-1 limit law.
#[derive(Clone, Debug, Serialize)]
pub enum SequenceFamily {
    /// `a_j = j`.
    Linear,
    /// `a_j = j^2`.
    Quadratic,
    /// Explicit terms `a_1 < a_2 < ...` with non-decreasing gaps (the gap
    /// condition keeps the geometric tail certificate valid when the list
    /// is extended).
    Custom { name: String, values: Vec<f64> },
}

impl SequenceFamily {
    /// The `j`-th term, 1-based.
    pub fn term(&self, j: usize) -> f64 {
        match self {
            SequenceFamily::Linear => j as f64,
            SequenceFamily::Quadratic => (j as f64) * (j as f64),
            SequenceFamily::Custom { values, .. } => values[j - 1],
        }
    }

    pub fn label(&self) -> String {
        match self {
            SequenceFamily::Linear => "linear".to_string(),
            SequenceFamily::Quadratic => "quadratic".to_string(),
            SequenceFamily::Custom { name, .. } => format!("custom:{name}"),
        }
    }

    fn validate(&self, needed: usize) -> Result<(), AsymptoticsError> {
        if let SequenceFamily::Custom { values, .. } = self {
            if values.len() < needed {
                return Err(AsymptoticsError::Invalid(
                    "custom sequence shorter than truncation_j",
                ));
            }
            if values.iter().any(|&v| !(v > 0.0)) {
                return Err(AsymptoticsError::Invalid(
                    "custom sequence terms must be positive",
                ));
            }
            for w in values.windows(3) {
                if !(w[1] > w[0]) || w[2] - w[1] < w[1] - w[0] - 1e-12 * w[1].abs() {
                    return Err(AsymptoticsError::Invalid(
                        "custom sequence needs increasing terms with non-decreasing gaps",
                    ));
                }
            }
            if values.len() >= 2 && !(values[1] > values[0]) {
                return Err(AsymptoticsError::Invalid(
                    "custom sequence needs increasing terms with non-decreasing gaps",
                ));
            }
        }
        Ok(())
    }
}

/// `sum_{j<=n} log F_m(a_j s)`; `-inf` when any factor vanishes.
fn prefix_log_cdf(family: &SequenceFamily, m: ShapeParam, n: usize, s: f64) -> f64 {
    if s <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let mut acc = CompensatedSum::new();
    for j in 1..=n {
        let y = family.term(j) * s;
        if y > Q_UNDERFLOW_ARG {
            break; // remaining factors are 1 to machine precision
        }
        let lf = cdf_f(m, y).log_value;
        if lf == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        acc.add(lf);
    }
    acc.value()
}

/// `1 - prod_{lo < j <= hi} F_m(a_j s)` as `-expm1(sum log1p(-Q))`.
fn one_minus_partial_product(
    family: &SequenceFamily,
    m: ShapeParam,
    lo: usize,
    hi: usize,
    s: f64,
) -> f64 {
    let mut acc = CompensatedSum::new();
    for j in lo + 1..=hi {
        let y = family.term(j) * s;
        if y > Q_UNDERFLOW_ARG {
            break;
        }
        let q = survival_q(m, y).value;
        if q >= 1.0 {
            return 1.0;
        }
        acc.add((-q).ln_1p());
    }
    -acc.value().exp_m1()
}

/// Median of the truncated limit CDF, by bisection.
fn truncated_median(family: &SequenceFamily, m: ShapeParam, j: usize) -> f64 {
    let mut hi = 1.0f64;
    for _ in 0..200 {
        if prefix_log_cdf(family, m, j, hi) > (0.5f64).ln() {
            break;
        }
        hi *= 1.5;
    }
    let mut lo = 0.0f64;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if prefix_log_cdf(family, m, j, mid) > (0.5f64).ln() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sequence term used by the tail certificate: custom sequences extend
/// past their listed values linearly with their final gap, the slowest
/// continuation the non-decreasing-gap condition admits (so the
/// certificate upper-bounds every admissible continuation).
fn certificate_term(family: &SequenceFamily, j: usize) -> f64 {
    match family {
        SequenceFamily::Custom { values, .. } => {
            let len = values.len();
            if j <= len {
                values[j - 1]
            } else {
                let gap = if len >= 2 {
                    values[len - 1] - values[len - 2]
                } else {
                    values[0]
                };
                values[len - 1] + (j - len) as f64 * gap
            }
        }
        _ => family.term(j),
    }
}

/// Certified bound on `sum_{j>J} Q_m(a_j s_min)`.
///
/// The hazard of the Erlang kernel increases, so with non-decreasing gaps
/// the term ratios `Q(a_{j+1}s)/Q(a_j s)` decrease in `j`; summing terms
/// until they are negligible and closing with the geometric remainder at
/// the last observed ratio is then a true upper bound.
fn truncation_bound(
    family: &SequenceFamily,
    m: ShapeParam,
    j_max: usize,
    s_min: f64,
    extend_limit: usize,
) -> f64 {
    let mut total = 0.0f64;
    let mut prev = f64::INFINITY;
    for j in j_max + 1..=j_max + extend_limit {
        let term = survival_q(m, certificate_term(family, j) * s_min).value;
        if term <= 0.0 {
            return total;
        }
        let ratio = term / prev;
        total += term;
        if ratio < 1.0 && term * ratio / (1.0 - ratio) < 1e-3 * TRUNCATION_GATE {
            return total + term * ratio / (1.0 - ratio);
        }
        prev = term;
    }
    f64::INFINITY
}

/// `r`-th moment of the truncated limit law `prod_{j<=J} F_m(a_j s)`,
/// with quadrature error estimate. No truncation gate is applied here.
pub fn truncated_limit_moment(
    family: &SequenceFamily,
    m: ShapeParam,
    truncation_j: usize,
    r: u32,
) -> Result<(f64, f64), AsymptoticsError> {
    family.validate(truncation_j)?;
    if truncation_j == 0 || r == 0 || r > 6 {
        return Err(AsymptoticsError::Invalid(
            "need truncation_j >= 1 and 1 <= r <= 6",
        ));
    }
    let s_med = truncated_median(family, m, truncation_j);
    let mut s_hi = 4.0 * s_med;
    for _ in 0..200 {
        let mut sum = 0.0;
        for j in 1..=truncation_j {
            let y = family.term(j) * s_hi;
            if y > Q_UNDERFLOW_ARG {
                break;
            }
            sum += survival_q(m, y).value;
        }
        if sum < 1e-18 {
            break;
        }
        s_hi *= 1.4;
    }
    let mut pts = vec![
        0.0,
        s_med / 8.0,
        s_med / 2.0,
        s_med,
        (2.0 * s_med).min(s_hi),
        s_hi,
    ];
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup();
    let rf = f64::from(r);
    let f = |s: f64| {
        rf * s.powi(r as i32 - 1)
            * one_minus_partial_product(family, m, 0, truncation_j, s)
    };
    let out = integrate_segmented(&f, &pts, 1e-300, 3e-12, 20_000);
    if !out.converged || out.abs_err > 1e-9 * out.value.abs() {
        return Err(AsymptoticsError::QuadratureFailed {
            context: "case-1 limit moment",
            value: out.value,
            abs_err: out.abs_err,
        });
    }
    Ok((out.value, out.abs_err))
}

/// One finite-`N` row of a case-1 study.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Case1Row {
    pub n: usize,
    /// `E[X/A_N]` through the general-model quadrature pipeline.
    pub scaled_mean: f64,
    /// `E[(X/A_N)^2]`.
    pub scaled_second: f64,
    /// `E Y - E Y_N >= 0`, computed from its positive integral form.
    pub gap_mean: f64,
    pub gap_second: f64,
    /// `sup_s |CDF_N(s) - CDF_limit(s)|` on a fixed grid.
    pub kolmogorov: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Case1Report {
    pub family: String,
    pub m: u32,
    pub truncation_j: usize,
    /// Certified bound on the truncated product tail at `s_min`.
    pub truncation_bound: f64,
    pub s_min: f64,
    pub limit_mean: f64,
    pub limit_second: f64,
    pub limit_variance: f64,
    pub limit_abs_err: f64,
    pub rows: Vec<Case1Row>,
}

/// Case-1 study: limit moments of `Y = lim X_N / A_N` under a fixed rate
/// sequence, finite-`N` scaled moments, their gaps, and Kolmogorov
/// distances. The infinite product is truncated at `truncation_j` with a
/// certified tail bound; `TruncationInsufficient` is returned if the bound
/// exceeds `1e-10`.
pub fn case1_limit(
    family: &SequenceFamily,
    m: ShapeParam,
    n_list: &[usize],
    truncation_j: usize,
) -> Result<Case1Report, AsymptoticsError> {
    family.validate(truncation_j)?;
    if let Some(&max_n) = n_list.iter().max() {
        if truncation_j < 2 * max_n {
            return Err(AsymptoticsError::Invalid(
                "truncation_j must be at least twice the largest N",
            ));
        }
    }
    let s_med = truncated_median(family, m, truncation_j);
    let s_min = s_med / 8.0;
    let bound = truncation_bound(family, m, truncation_j, s_min, 200_000);
    if !(bound <= TRUNCATION_GATE) {
        return Err(AsymptoticsError::TruncationInsufficient { bound });
    }

    let (limit_mean, err1) = truncated_limit_moment(family, m, truncation_j, 1)?;
    let (limit_second, err2) = truncated_limit_moment(family, m, truncation_j, 2)?;
    // The truncation changes the integrand by at most `bound` on
    // [s_min, inf) and by even less below it, so its moment contribution
    // is bounded by `bound * s_hi^r`; fold a generous version in.
    let limit_abs_err = err1 + err2 + bound * (1.0 + 8.0 * s_med).powi(2);

    let mut rows = Vec::with_capacity(n_list.len());
    // Fixed comparison grid for Kolmogorov distances.
    let kolmo_grid: Vec<f64> = crate::numeric::log_grid(s_med / 30.0, 10.0 * s_med, 60);
    for &n in n_list {
        if n < 2 {
            return Err(AsymptoticsError::Invalid("case-1 sizes must be >= 2"));
        }
        // Finite-N scaled moments through the real model pipeline.
        let mut a_sum = CompensatedSum::new();
        let mut entries = Vec::with_capacity(n);
        for j in 1..=n {
            let a = family.term(j);
            entries.push(a);
            a_sum.add(a);
        }
        let a_n = a_sum.value();
        let p = ProbabilityVector::from_weights(entries)?;
        let model = CollectorModel::new(p, m);
        let e1 = rising_moment_quadrature(&model, 1)?;
        let e2 = rising_moment_quadrature(&model, 2)?;
        let scaled_mean = e1.value / a_n;
        let scaled_second = e2.value / (a_n * a_n);

        // Gaps from the positive integral form: the integrand
        // s^{r-1} CDF_N(s) (1 - prod_{N<j<=J} F) is pointwise decreasing
        // in N, so these gaps decrease strictly even far below the
        // floating-point resolution of the moments themselves.
        let gap_integrand = |r: u32, s: f64| -> f64 {
            let lp = prefix_log_cdf(family, m, n, s);
            if lp == f64::NEG_INFINITY {
                return 0.0;
            }
            let bracket = one_minus_partial_product(family, m, n, truncation_j, s);
            f64::from(r) * s.powi(r as i32 - 1) * lp.exp() * bracket
        };
        let gap_pts = [
            0.0,
            s_min / 4.0,
            s_min,
            s_med / 2.0,
            s_med,
            2.0 * s_med,
            4.0 * s_med,
        ];
        let gap = |r: u32| -> Result<f64, AsymptoticsError> {
            let f = |s: f64| gap_integrand(r, s);
            let out = integrate_segmented(&f, &gap_pts, 1e-280, 1e-8, 8000);
            if !out.converged {
                return Err(AsymptoticsError::QuadratureFailed {
                    context: "case-1 moment gap",
                    value: out.value,
                    abs_err: out.abs_err,
                });
            }
            Ok(out.value)
        };
        let gap_mean = gap(1)?;
        let gap_second = gap(2)?;
        let kolmogorov = kolmo_grid
            .iter()
            .map(|&s| {
                let lp = prefix_log_cdf(family, m, n, s);
                if lp == f64::NEG_INFINITY {
                    0.0
                } else {
                    lp.exp() * one_minus_partial_product(family, m, n, truncation_j, s)
                }
            })
            .fold(0.0f64, f64::max);
        rows.push(Case1Row {
            n,
            scaled_mean,
            scaled_second,
            gap_mean,
            gap_second,
            kolmogorov,
        });
    }

    Ok(Case1Report {
        family: family.label(),
        m: m.get(),
        truncation_j,
        truncation_bound: bound,
        s_min,
        limit_mean,
        limit_second,
        limit_variance: limit_second - limit_mean * limit_mean,
        limit_abs_err,
        rows,
    })
}

/// One abscissa of a case-2 power-law study.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Case2Row {
    pub x: f64,
    /// `sum_j Q_m((N/j)^alpha L)` with `L = shift + x`: the expected
    /// defect count at the centered clock.
    pub expected_defects: f64,
    /// `|expected_defects / e^{-x} - 1|`.
    pub rel_dev: f64,
    pub within_band: bool,
    /// `sum_j Q^2`; atomless when small.
    pub sum_sq: f64,
    pub max_q: f64,
    /// `sum_sq <= max_q * expected_defects` (exact inequality).
    pub atomless_ok: bool,
    /// `prod_j F_m` at the centered clock.
    pub cdf_exact: f64,
    pub gumbel: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Case2Report {
    pub n: u64,
    pub alpha: f64,
    pub m: u32,
    /// `A_N = sum_{j<=N} j^{-alpha}`.
    pub a_n: f64,
    /// `C_N = A_N N^alpha`.
    pub c_n: f64,
    /// `rho_N = ln(N / alpha)`.
    pub rho: f64,
    /// `rho + (m-2) ln rho - ln (m-1)!`; the centered clock is
    /// `t = C_N (shift + x)`.
    pub shift: f64,
    pub b_n: f64,
    /// Width of the relative band applied to `expected_defects` vs
    /// `e^{-x}`.
    pub band: f64,
    pub band_note: String,
    pub rows: Vec<Case2Row>,
}

/// Case-2 power-law study at `p_j` proportional to `j^{-alpha}`.
pub fn case2_powerlaw(
    n: u64,
    alpha: f64,
    m: ShapeParam,
    x_grid: &[f64],
) -> Result<Case2Report, AsymptoticsError> {
    if n < 10 {
        return Err(AsymptoticsError::Invalid("case-2 needs N >= 10"));
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(AsymptoticsError::Invalid("alpha must be positive"));
    }
    if x_grid.is_empty() {
        return Err(AsymptoticsError::Invalid("x grid must be non-empty"));
    }
    let nf = n as f64;
    let mut a_sum = CompensatedSum::new();
    for j in 1..=n {
        a_sum.add((j as f64).powf(-alpha));
    }
    let a_n = a_sum.value();
    let c_n = a_n * nf.powf(alpha);
    let rho = (nf / alpha).ln();
    let mf = f64::from(m.get());
    let shift = rho + (mf - 2.0) * rho.ln() - ln_factorial(u64::from(m.get()) - 1);
    let b_n = c_n * shift;

    let mut rows = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        let l = shift + x;
        if !(l > 0.0) {
            return Err(AsymptoticsError::Invalid(
                "shift + x must stay positive on the grid",
            ));
        }
        let mut s1 = CompensatedSum::new();
        let mut s2 = CompensatedSum::new();
        let mut log_cdf = CompensatedSum::new();
        let mut max_q = 0.0f64;
        let mut degenerate = false;
        for j in (1..=n).rev() {
            let arg = (nf / j as f64).powf(alpha) * l;
            if arg > Q_UNDERFLOW_ARG {
                break;
            }
            let q = survival_q(m, arg).value;
            s1.add(q);
            s2.add(q * q);
            if q > max_q {
                max_q = q;
            }
            if q >= 1.0 {
                degenerate = true;
            } else {
                log_cdf.add((-q).ln_1p());
            }
        }
        let expected_defects = s1.value();
        let target = (-x).exp();
        let rel_dev = (expected_defects / target - 1.0).abs();
        let sum_sq = s2.value();
        rows.push(Case2Row {
            x,
            expected_defects,
            rel_dev,
            within_band: rel_dev <= 0.15,
            sum_sq,
            max_q,
            atomless_ok: sum_sq <= max_q * expected_defects * (1.0 + 1e-12),
            cdf_exact: if degenerate { 0.0 } else { log_cdf.value().exp() },
            gumbel: crate::numeric::gumbel_cdf(x),
        });
    }
    Ok(Case2Report {
        n,
        alpha,
        m: m.get(),
        a_n,
        c_n,
        rho,
        shift,
        b_n,
        band: 0.15,
        band_note: "the 0.15 relative band is an engineering tolerance for finite N, \
                    not a theorem constant; convergence of the defect count to e^{-x} \
                    is logarithmic in N"
            .to_string(),
        rows,
    })
}

/// Regime reference for `A_N = sum j^{-alpha}`: `N^{1-alpha}/(1-alpha)`
/// for `alpha < 1`, `ln N + gamma` at `alpha = 1`, `zeta(alpha)` beyond.
pub fn reference_a_n(alpha: f64, n: u64) -> f64 {
    let nf = n as f64;
    if (alpha - 1.0).abs() < 1e-12 {
        nf.ln() + EULER_GAMMA
    } else if alpha < 1.0 {
        nf.powf(1.0 - alpha) / (1.0 - alpha)
    } else {
        // zeta(alpha) by direct sum plus an Euler-Maclaurin tail.
        let k = 100_000u64;
        let mut acc = CompensatedSum::new();
        for j in 1..=k {
            acc.add((j as f64).powf(-alpha));
        }
        let kf = k as f64;
        acc.value() + kf.powf(1.0 - alpha) / (alpha - 1.0) - 0.5 * kf.powf(-alpha)
    }
}
