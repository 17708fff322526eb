//! Shared numeric plumbing: compensated summation, log-factorials, grids,
//! and monotonicity checks used across the lab.

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Neumaier-compensated accumulator.
///
/// Tracks the running compensation term and the sum of absolute values so
/// callers can turn the accumulated total into a cancellation estimate
/// (`EPSILON * abs_total / |total|`).
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
    abs_sum: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs_sum += x.abs();
    }

    /// Compensated total.
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    /// Sum of absolute values of everything added so far.
    pub fn abs_total(&self) -> f64 {
        self.abs_sum
    }
}

/// `ln(n!)`.
///
/// Exact (one-ulp) for `n < 20` via the integer factorial; for larger `n`
/// the Stirling series through the `n^-11` term, whose truncation error is
/// below 1e-15 absolute for `n >= 20`.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 20 {
        let mut f: u64 = 1;
        for k in 2..=n {
            f *= k;
        }
        (f as f64).ln()
    } else {
        stirling_ln_gamma(n as f64 + 1.0)
    }
}

/// Stirling series for `ln Gamma(z)`, accurate to ~1e-15 absolute for
/// `z >= 20`. Coefficients are B_{2k} / (2k (2k-1)).
fn stirling_ln_gamma(z: f64) -> f64 {
    const C: [f64; 6] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
    ];
    let zinv2 = 1.0 / (z * z);
    let mut series = 0.0;
    let mut power = 1.0 / z;
    for c in C {
        series += c * power;
        power *= zinv2;
    }
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln() + series
}

/// Harmonic number `H_n = sum_{k<=n} 1/k`, compensated.
pub fn harmonic(n: u64) -> f64 {
    let mut s = CompensatedSum::new();
    for k in 1..=n {
        s.add(1.0 / k as f64);
    }
    s.value()
}

/// Generalized harmonic number `H_n^(2) = sum_{k<=n} 1/k^2`, compensated.
pub fn harmonic2(n: u64) -> f64 {
    let mut s = CompensatedSum::new();
    for k in 1..=n {
        let kf = k as f64;
        s.add(1.0 / (kf * kf));
    }
    s.value()
}

/// Standard Gumbel CDF `exp(-e^{-x})`.
pub fn gumbel_cdf(x: f64) -> f64 {
    (-(-x).exp()).exp()
}

/// Logarithmically spaced grid from `lo` to `hi` (both positive, `lo < hi`)
/// with `points_per_decade` points per factor of ten. Endpoints included.
pub fn log_grid(lo: f64, hi: f64, points_per_decade: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && points_per_decade > 0);
    let decades = (hi / lo).log10();
    let steps = ((decades * points_per_decade as f64).ceil() as usize).max(1);
    let l0 = lo.ln();
    let l1 = hi.ln();
    (0..=steps)
        .map(|i| (l0 + (l1 - l0) * i as f64 / steps as f64).exp())
        .collect()
}

/// Evenly spaced grid with `n >= 2` points, endpoints included.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// True if `vals` is strictly monotone in the given direction, with the
/// lab-wide comparison slack `1e-12 * (1 + |v|)` absorbing roundoff on
/// plateau-free data.
pub fn strictly_monotone(vals: &[f64], increasing: bool) -> bool {
    first_monotonicity_violation(vals, increasing).is_none()
}

/// Index `i` of the first adjacent pair `(i, i+1)` violating strict
/// monotonicity beyond slack `1e-12 * (1 + |v|)`, if any.
pub fn first_monotonicity_violation(vals: &[f64], increasing: bool) -> Option<usize> {
    for i in 0..vals.len().saturating_sub(1) {
        let slack = 1e-12 * (1.0 + vals[i].abs().max(vals[i + 1].abs()));
        let ok = if increasing {
            vals[i + 1] > vals[i] - slack
        } else {
            vals[i + 1] < vals[i] + slack
        };
        if !ok {
            return Some(i);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_factorial_matches_exact_values() {
        assert_eq!(ln_factorial(0), 0.0);
        assert_eq!(ln_factorial(1), 0.0);
        assert!((ln_factorial(2) - 2.0f64.ln()).abs() < 1e-15);
        assert!((ln_factorial(10) - 3_628_800.0f64.ln()).abs() < 1e-12);
        // 25! = 15511210043330985984000000; compare in log scale.
        let ln25 = 15_511_210_043_330_985_984_000_000.0f64.ln();
        assert!((ln_factorial(25) - ln25).abs() < 1e-12 * ln25);
        // Continuity across the table/Stirling boundary.
        let lhs = ln_factorial(19) + 20.0f64.ln();
        assert!((ln_factorial(20) - lhs).abs() < 1e-13 * lhs);
    }

    #[test]
    fn compensated_sum_beats_naive_on_ill_ordered_data() {
        let mut s = CompensatedSum::new();
        s.add(1.0);
        s.add(1e100);
        s.add(1.0);
        s.add(-1e100);
        assert_eq!(s.value(), 2.0);
        assert!(s.abs_total() > 1e100);
    }

    #[test]
    fn harmonic_numbers() {
        assert!((harmonic(1) - 1.0).abs() < 1e-15);
        assert!((harmonic(4) - (1.0 + 0.5 + 1.0 / 3.0 + 0.25)).abs() < 1e-15);
        // H_2^(2) = 1.25
        assert!((harmonic2(2) - 1.25).abs() < 1e-15);
    }

    #[test]
    fn grids_hit_endpoints() {
        let g = log_grid(1e-3, 1e3, 200);
        assert!((g[0] - 1e-3).abs() < 1e-18);
        assert!((g[g.len() - 1] - 1e3).abs() < 1e-12);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        let l = linear_grid(0.0, 1.0, 5);
        assert_eq!(l, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn monotonicity_slack_absorbs_roundoff() {
        assert!(strictly_monotone(&[1.0, 2.0, 3.0], true));
        assert!(!strictly_monotone(&[1.0, 2.0, 1.5], true));
        // An exactly flat pair is accepted only within the slack.
        assert!(strictly_monotone(&[1.0, 1.0 + 1e-13], true));
        assert_eq!(first_monotonicity_violation(&[3.0, 2.0, 2.5], false), Some(1));
    }
}
