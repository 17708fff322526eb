//! Scalar gamma/Poisson kernels underlying every other module.
//!
//! For integer shape `m >= 1` and rate-1 Erlang variables these are
//!
//! * `Q_m(x) = e^{-x} sum_{j<m} x^j/j!` - the Poisson left tail, equally
//!   the Erlang survival function;
//! * `f_m(x) = e^{-x} x^{m-1}/(m-1)!` - the Erlang density;
//! * `F_m(x) = 1 - Q_m(x)` - the Erlang CDF;
//! * `h_m = f_m/Q_m` (increasing) and `phi_m = f_m/F_m` (decreasing);
//! * `e_m(y) = m - 1 - y D_{m-1}(y)/D_m(y)`, the logarithmic elasticity of
//!   `phi_m`, where `D_m(y) = sum_{n>=m} y^n/n!` is the tail of the
//!   exponential series (so `D_m = e^y F_m` and `D_m' = D_{m-1}`).
//!
//! Every kernel is returned as a [`KernelValue`] carrying both the natural
//! value and its logarithm; the natural value is always `exp(log_value)`
//! (possibly underflowing to zero) so the two scales never disagree.
//!
//! Evaluation strategy: `Q_m` uses the scaled finite sum anchored at its
//! largest term for `x <= m + 10 sqrt(m)` and a Lentz continued fraction in
//! log form beyond; `F_m` uses the lower-tail series in log form for
//! `y < m` and `log1p(-Q_m)` otherwise; `phi_m` uses its small-argument
//! Kummer series below `y = 1e-4` and the log ratio `f_m/F_m` elsewhere;
//! `e_m` evaluates the `D` ratio through the scaled tail series so the
//! subtraction never sees cancellation.

use thiserror::Error;

use crate::numeric::{ln_factorial, CompensatedSum};

/// Crossover multiplier: the finite sum is used for `x <= m + 10 sqrt(m)`.
const SERIES_CF_CROSSOVER_SIGMAS: f64 = 10.0;

/// Below this argument `phi_m` switches to its Kummer series.
const PHI_SERIES_CUTOFF: f64 = 1e-4;

/// Integer shape parameter `m >= 1` (copies required per coupon).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ShapeParam(u32);

/// Errors from kernel construction.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum KernelError {
    /// The shape parameter must be a positive integer.
    #[error("shape parameter must be at least 1 (got {0})")]
    InvalidShape(u32),
}

impl ShapeParam {
    pub fn new(m: u32) -> Result<Self, KernelError> {
        if m == 0 {
            Err(KernelError::InvalidShape(m))
        } else {
            Ok(Self(m))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub(crate) fn mf(self) -> f64 {
        f64::from(self.0)
    }
}

impl std::fmt::Display for ShapeParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A kernel evaluation in both natural and log scale.
///
/// `value == exp(log_value)` by construction; when the natural scale
/// underflows, `value` is `0.0` while `log_value` stays finite.
#[derive(Clone, Copy, Debug)]
pub struct KernelValue {
    pub value: f64,
    pub log_value: f64,
}

impl KernelValue {
    fn from_log(log_value: f64) -> Self {
        Self {
            value: log_value.exp(),
            log_value,
        }
    }
}

/// Survival function `Q_m(x) = P(Erlang(m) > x) = P(Poisson(x) < m)`.
///
/// Requires `x >= 0`. The natural value may underflow to `0.0` for large
/// `x`; `log_value` remains finite.
pub fn survival_q(m: ShapeParam, x: f64) -> KernelValue {
    assert!(x >= 0.0 && x.is_finite(), "survival_q requires finite x >= 0");
    if x == 0.0 {
        return KernelValue {
            value: 1.0,
            log_value: 0.0,
        };
    }
    if m.get() == 1 {
        // Q_1(x) = e^{-x} exactly.
        return KernelValue::from_log(-x);
    }
    if m.get() == 2 {
        // Q_2(x) = e^{-x} (1 + x) exactly.
        return KernelValue::from_log((-x + x.ln_1p()).min(0.0));
    }
    let mf = m.mf();
    if x <= mf + SERIES_CF_CROSSOVER_SIGMAS * mf.sqrt() {
        KernelValue::from_log(log_q_series(m, x))
    } else {
        KernelValue::from_log(log_q_continued_fraction(m, x))
    }
}

/// Finite sum `e^{-x} sum_{j<m} x^j/j!` scaled by its largest term so the
/// accumulation never overflows; returns `log Q_m(x)`.
fn log_q_series(m: ShapeParam, x: f64) -> f64 {
    let mm = m.get() as u64;
    let jmax = (x.floor() as u64).min(mm - 1);
    let ln_peak = jmax as f64 * x.ln() - ln_factorial(jmax);

    let mut s = 1.0f64; // scaled peak term
    let mut t = 1.0f64;
    let mut j = jmax;
    while j > 0 {
        // t_{j-1} = t_j * j / x
        t *= j as f64 / x;
        s += t;
        if t < 1e-20 * s {
            break;
        }
        j -= 1;
    }
    t = 1.0;
    for j in jmax + 1..mm {
        t *= x / j as f64;
        s += t;
        if t < 1e-20 * s {
            break;
        }
    }
    let log_q = -x + ln_peak + s.ln();
    // Q < 1 mathematically; clamp the last-ulp case near x -> 0.
    log_q.min(0.0)
}

/// Lentz continued fraction for the upper incomplete gamma ratio,
/// `log Q_m(x) = -x + m ln x - ln (m-1)! + ln CF`, valid for `x > m`.
fn log_q_continued_fraction(m: ShapeParam, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mf = m.mf();
    let mut b = x + 1.0 - mf;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=400u32 {
        let an = -(i as f64) * (i as f64 - mf);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 3.0 * f64::EPSILON {
            break;
        }
    }
    -x + mf * x.ln() - ln_factorial(u64::from(m.get()) - 1) + h.ln()
}

/// Erlang density `f_m(x) = e^{-x} x^{m-1}/(m-1)!`.
///
/// Requires `x >= 0`. At `x = 0` the density is `1` for `m = 1` and `0`
/// (with `log_value = -inf`) for `m >= 2`.
pub fn density_f(m: ShapeParam, x: f64) -> KernelValue {
    assert!(x >= 0.0 && x.is_finite(), "density_f requires finite x >= 0");
    if x == 0.0 {
        return if m.get() == 1 {
            KernelValue {
                value: 1.0,
                log_value: 0.0,
            }
        } else {
            KernelValue {
                value: 0.0,
                log_value: f64::NEG_INFINITY,
            }
        };
    }
    let mf = m.mf();
    KernelValue::from_log(-x + (mf - 1.0) * x.ln() - ln_factorial(u64::from(m.get()) - 1))
}

/// CDF `F_m(y) = 1 - Q_m(y)`.
///
/// Requires `y >= 0`. Uses the lower-tail series for `y < m` so the log
/// value stays accurate deep into the left tail.
pub fn cdf_f(m: ShapeParam, y: f64) -> KernelValue {
    assert!(y >= 0.0 && y.is_finite(), "cdf_f requires finite y >= 0");
    if y == 0.0 {
        return KernelValue {
            value: 0.0,
            log_value: f64::NEG_INFINITY,
        };
    }
    let mf = m.mf();
    if y < mf {
        // F_m(y) = y^m e^{-y}/m! * sum_{k>=0} y^k / prod_{i<=k}(m+i),
        // all terms positive with ratio y/(m+k) < 1.
        let mut sum = 1.0f64;
        let mut term = 1.0f64;
        let mut k = 1.0f64;
        loop {
            term *= y / (mf + k);
            sum += term;
            if term < 1e-18 * sum || k > 1e7 {
                break;
            }
            k += 1.0;
        }
        let log_f = mf * y.ln() - y - ln_factorial(u64::from(m.get())) + sum.ln();
        KernelValue::from_log(log_f.min(0.0))
    } else {
        let q = survival_q(m, y);
        let value = (1.0 - q.value).max(0.0);
        KernelValue {
            value,
            log_value: (-q.value).ln_1p(),
        }
    }
}

/// Upper hazard `h_m(t) = f_m(t)/Q_m(t)`, strictly increasing in `t`.
///
/// Requires `t >= 0`; `h_1 = 1` identically.
pub fn upper_hazard_h(m: ShapeParam, t: f64) -> KernelValue {
    assert!(t >= 0.0 && t.is_finite(), "upper_hazard_h requires finite t >= 0");
    if t == 0.0 {
        return if m.get() == 1 {
            KernelValue {
                value: 1.0,
                log_value: 0.0,
            }
        } else {
            KernelValue {
                value: 0.0,
                log_value: f64::NEG_INFINITY,
            }
        };
    }
    let log_h = density_f(m, t).log_value - survival_q(m, t).log_value;
    KernelValue::from_log(log_h)
}

/// Reverse hazard `phi_m(y) = f_m(y)/F_m(y)`, strictly decreasing in `y`,
/// with `phi_m(y) = m/y - m/(m+1) + O(y)` as `y -> 0`.
///
/// Requires `y > 0`. The natural value underflows for very large `y`;
/// `log_value` remains finite and is what ratio diagnostics should use.
pub fn reverse_hazard_phi(m: ShapeParam, y: f64) -> KernelValue {
    assert!(y > 0.0 && y.is_finite(), "reverse_hazard_phi requires finite y > 0");
    let mf = m.mf();
    if y < PHI_SERIES_CUTOFF {
        // phi_m(y) = m e^{-y} / (y S(y)), S(y) = sum_k (-y)^k m/(k!(m+k)).
        // Five terms leave a relative error below 1e-17 at y < 1e-4.
        let mut s = 0.0f64;
        let mut pow = 1.0f64; // (-y)^k / k!
        for k in 0..=5u32 {
            s += pow * mf / (mf + f64::from(k));
            pow *= -y / f64::from(k + 1);
        }
        let log_phi = mf.ln() - y - y.ln() - s.ln();
        KernelValue::from_log(log_phi)
    } else {
        KernelValue::from_log(density_f(m, y).log_value - cdf_f(m, y).log_value)
    }
}

/// Logarithmic elasticity `e_m(y) = y d/dy log phi_m(y)`, equal to
/// `m - 1 - y D_{m-1}(y)/D_m(y)` with `D_m(y) = sum_{n>=m} y^n/n!`.
///
/// Strictly negative and strictly decreasing on `y > 0`, with limit `-1`
/// as `y -> 0+`. Requires `y > 0`.
pub fn log_elasticity_e(m: ShapeParam, y: f64) -> f64 {
    assert!(y > 0.0 && y.is_finite(), "log_elasticity_e requires finite y > 0");
    let mm = u64::from(m.get());
    let ratio_log = y.ln() + log_d_tail(mm - 1, y) - log_d_tail(mm, y);
    (m.mf() - 1.0) - ratio_log.exp()
}

/// `log D_k(y)` for the exponential tail series `D_k(y) = sum_{n>=k} y^n/n!`.
///
/// `D_0 = e^y`; for `y < k` the scaled tail series is summed directly, and
/// for `y >= k` the identity `D_k = e^y (1 - Q_k)` is used through
/// `log1p(-Q_k)`, so no cancelling subtraction ever occurs.
fn log_d_tail(k: u64, y: f64) -> f64 {
    if k == 0 {
        return y;
    }
    let kf = k as f64;
    if y < kf {
        let mut sum = 1.0f64;
        let mut term = 1.0f64;
        let mut i = 1.0f64;
        loop {
            term *= y / (kf + i);
            sum += term;
            if term < 1e-18 * sum || i > 1e7 {
                break;
            }
            i += 1.0;
        }
        kf * y.ln() - ln_factorial(k) + sum.ln()
    } else {
        let shape = ShapeParam::new(k as u32).expect("k >= 1 here");
        y + (-survival_q(shape, y).value).ln_1p()
    }
}

/// Log-scale defect sum `sum_j log1p(-Q_m(args[j]))` used by completion
/// CDFs; kept here so callers share one compensated implementation.
pub fn log_product_one_minus_q(m: ShapeParam, args: impl Iterator<Item = f64>) -> f64 {
    let mut acc = CompensatedSum::new();
    for x in args {
        let q = survival_q(m, x).value;
        if q >= 1.0 {
            return f64::NEG_INFINITY;
        }
        acc.add((-q).ln_1p());
    }
    acc.value()
}
