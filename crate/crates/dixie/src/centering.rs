//! The centering pair `(b_n, a_n)`: `b_n` solves `n Q_m(b) = 1` and
//! `a_n = Q_m(b_n)/f_m(b_n) = 1/h_m(b_n)` is the local clock scale.
//!
//! Under equal coupon probabilities, `P(T <= n b_n + n a_n x)` converges to
//! the Gumbel law `exp(-e^{-x})`; the quantile diagnostics here check the
//! non-asymptotic inequality `n Q_m(b_n + a_n x) <= e^{-x}`, which hazard
//! monotonicity gives for every real `x` (with equality exactly at `m = 1`).

use serde::Serialize;
use thiserror::Error;

use crate::gamma_kernel::{density_f, survival_q, ShapeParam};

/// Root tolerance: the bracket is shrunk to width `1e-13 * (1 + b)`.
const BRACKET_TOL: f64 = 1e-13;

/// Centering solution for one `(n, m)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CenteringPair {
    pub n: f64,
    pub m: u32,
    /// Root of `n Q_m(b) = 1`.
    pub b: f64,
    /// Scale `a = 1/h_m(b)`.
    pub a: f64,
}

impl CenteringPair {
    /// The clock-separation scale `n a^2 / b`, strictly increasing in `n`
    /// for fixed `m`.
    pub fn clock_scale(&self) -> f64 {
        self.n * self.a * self.a / self.b
    }
}

/// Errors from the centering solver.
#[derive(Debug, Error, PartialEq)]
pub enum CenteringError {
    /// `n Q_m(b) = 1` has no root for `n <= 1` (`Q_m < 1` on `b > 0`).
    #[error("centering equation n Q_m(b) = 1 requires n > 1 (got n = {n})")]
    NonBracketable { n: f64 },
}

/// Solve `n Q_m(b) = 1` for `b > 0` and return the pair `(b, a)`.
///
/// The root is bracketed starting from `[max(m-1, 1e-8), m + 2 ln n + ...]`
/// and refined by bisection on `g(b) = log Q_m(b) + ln n`, which is strictly
/// decreasing; the final `b` satisfies `|n Q_m(b) - 1| <= 1e-10`.
pub fn solve_centering(n: f64, m: ShapeParam) -> Result<CenteringPair, CenteringError> {
    if !(n > 1.0) || !n.is_finite() {
        return Err(CenteringError::NonBracketable { n });
    }
    let ln_n = n.ln();
    let mf = f64::from(m.get());
    let g = |b: f64| survival_q(m, b).log_value + ln_n;

    let mut lo = (mf - 1.0).max(1e-8);
    let mut hi = mf + 2.0 * ln_n + 10.0 * (mf * ln_n + 1.0).sqrt();
    if g(lo) <= 0.0 {
        // Root sits below the usual lower anchor (n barely above 1);
        // g(0+) = ln n > 0, so geometric shrinking must bracket it.
        hi = lo;
        loop {
            lo *= 0.25;
            if g(lo) > 0.0 {
                break;
            }
            if lo < 1e-300 {
                return Err(CenteringError::NonBracketable { n });
            }
        }
    } else {
        let mut grow = 0;
        while g(hi) >= 0.0 {
            hi *= 1.5;
            grow += 1;
            assert!(grow < 500, "centering bracket failed to expand");
        }
    }

    let mut b = 0.5 * (lo + hi);
    for _ in 0..200 {
        if hi - lo <= BRACKET_TOL * (1.0 + b) {
            break;
        }
        b = 0.5 * (lo + hi);
        if g(b) > 0.0 {
            lo = b;
        } else {
            hi = b;
        }
    }
    b = 0.5 * (lo + hi);
    let a = (survival_q(m, b).log_value - density_f(m, b).log_value).exp();
    Ok(CenteringPair {
        n,
        m: m.get(),
        b,
        a,
    })
}

/// One row of the quantile-inequality table.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct QuantileRatioRow {
    pub x: f64,
    /// `n Q_m(b + a x) / e^{-x}`; at most 1 for every `x`, equal to 1
    /// identically when `m = 1`.
    pub ratio: f64,
}

/// Quantile-inequality diagnostics for one `(n, m)`.
#[derive(Clone, Debug, Serialize)]
pub struct QuantileInequalityReport {
    pub pair: CenteringPair,
    pub rows: Vec<QuantileRatioRow>,
    /// True if every grid point with `x >= 0` satisfies `ratio <= 1 + 1e-10`.
    pub right_tail_ok: bool,
    /// Clock-separation scale `n a^2 / b`.
    pub clock_scale: f64,
}

/// Evaluate `n Q_m(b + a x) e^{x}` on `x_grid`.
///
/// Arguments `b + a x` falling below zero (possible for very negative `x`)
/// are clamped to zero, where `Q_m = 1`.
pub fn quantile_inequality_report(
    n: f64,
    m: ShapeParam,
    x_grid: &[f64],
) -> Result<QuantileInequalityReport, CenteringError> {
    let pair = solve_centering(n, m)?;
    let ln_n = n.ln();
    let rows: Vec<QuantileRatioRow> = x_grid
        .iter()
        .map(|&x| {
            let t = (pair.b + pair.a * x).max(0.0);
            let ratio = (survival_q(m, t).log_value + ln_n + x).exp();
            QuantileRatioRow { x, ratio }
        })
        .collect();
    let right_tail_ok = rows
        .iter()
        .filter(|r| r.x >= 0.0)
        .all(|r| r.ratio <= 1.0 + 1e-10);
    Ok(QuantileInequalityReport {
        clock_scale: pair.clock_scale(),
        pair,
        rows,
        right_tail_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{linear_grid, strictly_monotone};

    fn sp(m: u32) -> ShapeParam {
        ShapeParam::new(m).unwrap()
    }

    #[test]
    fn m1_centering_is_logarithmic() {
        // For m = 1, Q_1 = e^{-b}, so b = ln n and a = 1 exactly.
        let pair = solve_centering(100.0, sp(1)).unwrap();
        assert!((pair.b - 100.0f64.ln()).abs() < 1e-12);
        assert!((pair.a - 1.0).abs() < 1e-12);
        let pair_e = solve_centering(std::f64::consts::E, sp(1)).unwrap();
        assert!((pair_e.b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn m2_centering_matches_independent_bisection() {
        // Independent oracle inside the test: bisection on the closed form
        // e^{-b}(1+b) = 1/100 with direct arithmetic.
        let (mut lo, mut hi) = (1.0f64, 30.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (-mid).exp() * (1.0 + mid) > 0.01 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let oracle = 0.5 * (lo + hi);
        let pair = solve_centering(100.0, sp(2)).unwrap();
        assert!((pair.b - oracle).abs() < 1e-10, "{} vs {}", pair.b, oracle);
        assert!((pair.b - 6.638_352_068_0).abs() < 1e-9);
        // a = Q/f = (1+b)/b for m = 2.
        assert!((pair.a - (1.0 + pair.b) / pair.b).abs() < 1e-12);
        assert!((pair.a - 1.150_639_795_8).abs() < 1e-9);
    }

    #[test]
    fn residual_is_tiny_across_regimes() {
        for &n in &[1.5, 2.0, 10.0, 1e4, 1e8] {
            for m in [1u32, 2, 3, 5, 17] {
                let pair = solve_centering(n, sp(m)).unwrap();
                let resid = n * survival_q(sp(m), pair.b).value - 1.0;
                assert!(
                    resid.abs() <= 1e-10,
                    "n={n} m={m}: residual {resid:.3e}"
                );
                // a agrees with 1/h_m(b) to relative 1e-12.
                let h = crate::gamma_kernel::upper_hazard_h(sp(m), pair.b).value;
                assert!((pair.a * h - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn near_unit_n_shrinks_bracket_below_anchor() {
        // n barely above 1 pushes the root far left of b = m - 1.
        let pair = solve_centering(1.0 + 1e-6, sp(3)).unwrap();
        assert!(pair.b < 2.0);
        let resid = (1.0 + 1e-6) * survival_q(sp(3), pair.b).value - 1.0;
        assert!(resid.abs() <= 1e-10);
    }

    #[test]
    fn rejects_non_bracketable_n() {
        assert!(matches!(
            solve_centering(1.0, sp(2)),
            Err(CenteringError::NonBracketable { .. })
        ));
        assert!(matches!(
            solve_centering(0.5, sp(1)),
            Err(CenteringError::NonBracketable { .. })
        ));
    }

    #[test]
    fn solution_is_stable_under_input_perturbation() {
        let base = solve_centering(1e6, sp(4)).unwrap();
        let pert = solve_centering(1e6 * (1.0 + 4.0 * f64::EPSILON), sp(4)).unwrap();
        assert!((base.b - pert.b).abs() <= 1e-10 * (1.0 + base.b));
    }

    #[test]
    fn quantile_ratio_examples() {
        // m = 1: the inequality is an identity, ratio = 1 for all x.
        let rep = quantile_inequality_report(1e3, sp(1), &linear_grid(-3.0, 10.0, 27)).unwrap();
        for row in &rep.rows {
            assert!((row.ratio - 1.0).abs() < 1e-12, "x={}: {}", row.x, row.ratio);
        }
        assert!(rep.right_tail_ok);

        // m >= 2: ratio < 1 strictly, on BOTH sides of x = 0; at
        // (n=1e6, m=2, x=-1) the ratio sits just below 1.
        let rep2 = quantile_inequality_report(1e6, sp(2), &[-1.0]).unwrap();
        let r = rep2.rows[0].ratio;
        assert!(r <= 1.0 + 1e-10 && r > 0.99, "ratio {r}");
        let rep3 = quantile_inequality_report(1e6, sp(3), &[1.0]).unwrap();
        let r3 = rep3.rows[0].ratio;
        assert!(r3 <= 1.0 && r3 > 0.99, "ratio {r3}");
    }

    #[test]
    fn ratio_converges_to_one_with_n() {
        for m in [1u32, 2, 3, 5] {
            for &x in &[-3.0, -1.0, 0.0, 1.0, 3.0] {
                let r4 = quantile_inequality_report(1e4, sp(m), &[x]).unwrap().rows[0].ratio;
                let r8 = quantile_inequality_report(1e8, sp(m), &[x]).unwrap().rows[0].ratio;
                assert!(
                    (r8 - 1.0).abs() <= (r4 - 1.0).abs() + 1e-12,
                    "m={m} x={x}: r4={r4} r8={r8}"
                );
            }
        }
    }

    #[test]
    fn clock_scale_separates_with_n() {
        for m in [1u32, 2, 3, 4, 5] {
            let scales: Vec<f64> = [1e3, 1e4, 1e5, 1e6]
                .iter()
                .map(|&n| solve_centering(n, sp(m)).unwrap().clock_scale())
                .collect();
            assert!(strictly_monotone(&scales, true), "m={m}: {scales:?}");
        }
    }
}
