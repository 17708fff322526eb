//! Counter-based Monte Carlo simulation of the collector process.
//!
//! Randomness comes from a pure function of `(seed, trial, index)` built
//! from three applications of the splitmix64 finalizer, so any draw can be
//! generated at any time on any thread: results are bit-identical for a
//! given seed regardless of thread count or scheduling. Aggregation
//! collects per-trial values into a trial-indexed vector (rayon preserves
//! index order) and reduces sequentially.
//!
//! Index layouts per simulator:
//!
//! * `simulate_discrete`: draw `d` consumes the two words at `2d` and
//!   `2d + 1` (selector and alias coin), whether or not the sampler needs
//!   both.
//! * `simulate_poissonized`: the `k`-th Erlang stage of coupon `j`
//!   consumes the word at `j*m + k`.
//! * `simulate_active_clock`: useful hit `h` consumes the word at `h`.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::exact_moments::{mean_variance, CollectorModel, MomentError, ProbabilityVector};
use crate::numeric::CompensatedSum;

pub mod rng {
    //! The counter-based generator: `stream_u64(seed, trial, index)` is
    //! `mix64(mix64(mix64(seed) ^ trial*K1) ^ index*K2)` with fixed odd
    //! constants, where `mix64` is the splitmix64 finalizer.

    const K1: u64 = 0x9E37_79B9_7F4A_7C15;
    const K2: u64 = 0xD1B5_4A32_D192_ED03;

    /// splitmix64 finalizer.
    #[inline]
    pub fn mix64(mut z: u64) -> u64 {
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// The word at position `index` of trial `trial`.
    #[inline]
    pub fn stream_u64(seed: u64, trial: u64, index: u64) -> u64 {
        mix64(mix64(mix64(seed) ^ trial.wrapping_mul(K1)) ^ index.wrapping_mul(K2))
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn stream_unit(seed: u64, trial: u64, index: u64) -> f64 {
        (stream_u64(seed, trial, index) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard exponential via inversion, `-ln(1 - u)`.
    #[inline]
    pub fn stream_exp(seed: u64, trial: u64, index: u64) -> f64 {
        -(-stream_unit(seed, trial, index)).ln_1p()
    }

    /// Sequential view over one trial's stream; precomputes the trial hash.
    #[derive(Clone, Copy, Debug)]
    pub struct TrialStream {
        premix: u64,
        index: u64,
    }

    impl TrialStream {
        pub fn new(seed: u64, trial: u64) -> Self {
            Self {
                premix: mix64(mix64(seed) ^ trial.wrapping_mul(K1)),
                index: 0,
            }
        }

        /// Position the next call will consume.
        pub fn position(&self) -> u64 {
            self.index
        }

        pub fn next_u64(&mut self) -> u64 {
            let x = mix64(self.premix ^ self.index.wrapping_mul(K2));
            self.index += 1;
            x
        }

        pub fn next_unit(&mut self) -> f64 {
            (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
        }

        pub fn next_exp(&mut self) -> f64 {
            -(-self.next_unit()).ln_1p()
        }

        /// Skip to an absolute stream position.
        pub fn seek(&mut self, index: u64) {
            self.index = index;
        }
    }
}

/// Simulation parameters.
#[derive(Clone, Debug)]
pub struct SimConfig {
    pub model: CollectorModel,
    pub trials: u64,
    pub seed: u64,
}

/// Simulation errors.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("at least one trial is required")]
    NoTrials,
    #[error(transparent)]
    Moment(#[from] MomentError),
}

/// Summary statistics over per-trial values.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SampleStats {
    pub trials: u64,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    /// Standard error of the mean, `s / sqrt(n)`.
    pub std_error_mean: f64,
    /// Standard error of the sample variance,
    /// `sqrt((m4 - s^4 (n-3)/(n-1)) / n)` with `m4` the fourth central moment.
    pub std_error_variance: f64,
}

/// Two-pass moments with compensated accumulation.
pub fn stats_from(values: &[f64]) -> SampleStats {
    let n = values.len() as u64;
    assert!(n >= 2, "need at least two trials for variance estimates");
    let nf = n as f64;
    let mut sum = CompensatedSum::new();
    for &v in values {
        sum.add(v);
    }
    let mean = sum.value() / nf;
    let mut m2 = CompensatedSum::new();
    let mut m4 = CompensatedSum::new();
    for &v in values {
        let d = v - mean;
        let d2 = d * d;
        m2.add(d2);
        m4.add(d2 * d2);
    }
    let variance = m2.value() / (nf - 1.0);
    let mu4 = m4.value() / nf;
    let var_of_var = (mu4 - variance * variance * (nf - 3.0) / (nf - 1.0)) / nf;
    SampleStats {
        trials: n,
        mean,
        variance,
        std_error_mean: (variance / nf).sqrt(),
        std_error_variance: var_of_var.max(0.0).sqrt(),
    }
}

enum Sampler {
    /// Linear inverse-CDF scan over cumulative probabilities (N <= 16).
    Scan(Vec<f64>),
    /// Vose alias table (N > 16).
    Alias { prob: Vec<f64>, alias: Vec<u32> },
}

impl Sampler {
    fn build(p: &ProbabilityVector) -> Self {
        let n = p.len();
        if n <= 16 {
            let mut cum = Vec::with_capacity(n);
            let mut acc = 0.0;
            for &v in p.as_slice() {
                acc += v;
                cum.push(acc);
            }
            Sampler::Scan(cum)
        } else {
            let nf = n as f64;
            let mut prob: Vec<f64> = p.as_slice().iter().map(|&v| v * nf).collect();
            let mut alias = vec![0u32; n];
            let mut small: Vec<u32> = Vec::with_capacity(n);
            let mut large: Vec<u32> = Vec::with_capacity(n);
            for (i, &w) in prob.iter().enumerate() {
                if w < 1.0 {
                    small.push(i as u32);
                } else {
                    large.push(i as u32);
                }
            }
            while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
                small.pop();
                alias[s as usize] = l;
                prob[l as usize] -= 1.0 - prob[s as usize];
                if prob[l as usize] < 1.0 {
                    large.pop();
                    small.push(l);
                }
            }
            // Leftovers (roundoff) keep probability 1: alias never taken.
            for &s in small.iter().chain(large.iter()) {
                prob[s as usize] = 1.0;
            }
            Sampler::Alias { prob, alias }
        }
    }

    /// Draw one index from the two uniforms of a draw slot.
    #[inline]
    fn draw(&self, u_select: f64, u_coin: f64) -> usize {
        match self {
            Sampler::Scan(cum) => {
                let mut i = 0;
                while i + 1 < cum.len() && u_select >= cum[i] {
                    i += 1;
                }
                i
            }
            Sampler::Alias { prob, alias } => {
                let n = prob.len();
                let col = ((u_select * n as f64) as usize).min(n - 1);
                if u_coin < prob[col] {
                    col
                } else {
                    alias[col] as usize
                }
            }
        }
    }
}

fn run_trials<F: Fn(u64) -> f64 + Sync + Send>(trials: u64, f: F) -> Vec<f64> {
    (0..trials).into_par_iter().map(f).collect()
}

/// Simulate the discrete drawing process until every coupon has `m` copies;
/// returns statistics of the stopping time `T`.
pub fn simulate_discrete(cfg: &SimConfig) -> Result<SampleStats, SimError> {
    if cfg.trials < 2 {
        return Err(SimError::NoTrials);
    }
    let sampler = Sampler::build(&cfg.model.p);
    let n = cfg.model.n();
    let m = cfg.model.m;
    let seed = cfg.seed;
    let values = run_trials(cfg.trials, |trial| {
        let mut counts = vec![0u32; n];
        let mut missing = n;
        let mut draw: u64 = 0;
        loop {
            let u1 = rng::stream_unit(seed, trial, 2 * draw);
            let u2 = rng::stream_unit(seed, trial, 2 * draw + 1);
            draw += 1;
            let i = sampler.draw(u1, u2);
            counts[i] += 1;
            if counts[i] == m {
                missing -= 1;
                if missing == 0 {
                    return draw as f64;
                }
            }
        }
    });
    Ok(stats_from(&values))
}

/// Simulate the poissonized completion time `X = max_j Erlang_j(m, p_j)`;
/// returns statistics of `X`.
pub fn simulate_poissonized(cfg: &SimConfig) -> Result<SampleStats, SimError> {
    if cfg.trials < 2 {
        return Err(SimError::NoTrials);
    }
    let p = cfg.model.p.as_slice().to_vec();
    let m = cfg.model.m as u64;
    let seed = cfg.seed;
    let values = run_trials(cfg.trials, |trial| {
        let mut x_max = 0.0f64;
        for (j, &pj) in p.iter().enumerate() {
            let mut s = 0.0;
            for k in 0..m {
                s += rng::stream_exp(seed, trial, j as u64 * m + k);
            }
            let x = s / pj;
            if x > x_max {
                x_max = x;
            }
        }
        x_max
    });
    Ok(stats_from(&values))
}

/// Active-clock variance decomposition report.
///
/// Along the embedded jump chain (which active coupon receives each of the
/// `mN` useful hits), `T` decomposes into independent geometric waits with
/// success probability `rho_h` (the active mass at hit `h`), giving
/// `E T = E H` and `Var T = E[sum_h psi(rho_h)] + Var H`, where
/// `H = sum_h 1/rho_h` and `psi(rho) = (1-rho)/rho^2`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ActiveClockReport {
    /// Per-trial `sum_h psi(rho_h)` (conditional-variance leg).
    pub sum_psi: SampleStats,
    /// Per-trial `H` (conditional-mean leg).
    pub clock_mean: SampleStats,
    /// `mean(sum_psi) + var(H)`.
    pub var_estimate: f64,
    /// Combined standard error of `var_estimate`.
    pub var_std_error: f64,
    /// Exact `Var T` from the moment engine.
    pub exact_var_t: f64,
    /// `(var_estimate - exact_var_t) / var_std_error`; 0 when both legs are
    /// deterministic and exact.
    pub z_var: f64,
    pub within_3_sigma: bool,
}

/// Simulate the active-clock chain and compare its variance decomposition
/// against the exact `Var T`.
pub fn simulate_active_clock(cfg: &SimConfig) -> Result<ActiveClockReport, SimError> {
    if cfg.trials < 2 {
        return Err(SimError::NoTrials);
    }
    let p = cfg.model.p.as_slice().to_vec();
    let n = cfg.model.n();
    let m = cfg.model.m;
    let seed = cfg.seed;

    let legs: Vec<(f64, f64)> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut counts = vec![0u32; n];
            let mut active_mass = CompensatedSum::new();
            for &pj in &p {
                active_mass.add(pj);
            }
            let mut rho = active_mass.value();
            let mut h_sum = 0.0f64;
            let mut psi_sum = 0.0f64;
            let total_hits = (n as u64) * u64::from(m);
            for hit in 0..total_hits {
                h_sum += 1.0 / rho;
                psi_sum += (1.0 - rho) / (rho * rho);
                // Select the active coupon receiving this hit, weight p_i.
                let u = rng::stream_unit(seed, trial, hit) * rho;
                let mut acc = 0.0;
                let mut chosen = usize::MAX;
                for (i, &pi) in p.iter().enumerate() {
                    if counts[i] >= m {
                        continue;
                    }
                    acc += pi;
                    if u < acc {
                        chosen = i;
                        break;
                    }
                }
                if chosen == usize::MAX {
                    // Roundoff pushed u past the last active block.
                    chosen = (0..n).rev().find(|&i| counts[i] < m).expect("active coupon");
                }
                counts[chosen] += 1;
                if counts[chosen] == m {
                    rho -= p[chosen];
                }
            }
            (psi_sum, h_sum)
        })
        .collect();

    let psi: Vec<f64> = legs.iter().map(|&(s, _)| s).collect();
    let h: Vec<f64> = legs.iter().map(|&(_, v)| v).collect();
    let sum_psi = stats_from(&psi);
    let clock_mean = stats_from(&h);

    let var_estimate = sum_psi.mean + clock_mean.variance;
    let var_std_error = (sum_psi.std_error_mean.powi(2) + clock_mean.std_error_variance.powi(2))
        .sqrt();
    let exact_var_t = mean_variance(&cfg.model)?.var_t;
    let diff = var_estimate - exact_var_t;
    let z_var = if diff == 0.0 {
        0.0
    } else {
        diff / var_std_error.max(f64::MIN_POSITIVE)
    };
    Ok(ActiveClockReport {
        sum_psi,
        clock_mean,
        var_estimate,
        var_std_error,
        exact_var_t,
        z_var,
        within_3_sigma: z_var.abs() <= 3.0 || diff.abs() <= 1e-10 * (1.0 + exact_var_t),
    })
}

/// Rising-moment transfer check: simulate `X` (poissonized) and `T`
/// (discrete) on domain-separated streams and compare `E X = E T` and
/// `Var T = Var X - E X` within Monte Carlo error.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TransferReport {
    pub x: SampleStats,
    pub t: SampleStats,
    /// `Var X_hat - E X_hat`, the transfer prediction for `Var T`.
    pub implied_var_t: f64,
    pub z_mean: f64,
    pub z_var: f64,
    pub within_3_sigma: bool,
}

/// Runs both simulators; the discrete leg's stream is domain-separated by
/// hashing the seed so the two legs are independent.
pub fn transfer_check(cfg: &SimConfig) -> Result<TransferReport, SimError> {
    let x = simulate_poissonized(cfg)?;
    let discrete_cfg = SimConfig {
        model: cfg.model.clone(),
        trials: cfg.trials,
        seed: rng::mix64(cfg.seed ^ 0xA5A5_A5A5_5A5A_5A5A),
    };
    let t = simulate_discrete(&discrete_cfg)?;
    let implied_var_t = x.variance - x.mean;
    let se_mean = (x.std_error_mean.powi(2) + t.std_error_mean.powi(2)).sqrt();
    let z_mean = (x.mean - t.mean) / se_mean;
    let se_var = (x.std_error_variance.powi(2)
        + x.std_error_mean.powi(2)
        + t.std_error_variance.powi(2))
    .sqrt();
    let z_var = (implied_var_t - t.variance) / se_var;
    Ok(TransferReport {
        x,
        t,
        implied_var_t,
        z_mean,
        z_var,
        within_3_sigma: z_mean.abs() <= 3.0 && z_var.abs() <= 3.0,
    })
}

/// Mass-decay chain for the single-copy collector: per trial, record the
/// uncollected mass `R_r` each time exactly `r` coupons remain unseen
/// (`R_N = 1` down to `R_1`). Entry `k` of the result holds statistics of
/// `R_{N-k}`.
pub fn simulate_mass_decay(
    p: &ProbabilityVector,
    trials: u64,
    seed: u64,
) -> Result<Vec<SampleStats>, SimError> {
    if trials < 2 {
        return Err(SimError::NoTrials);
    }
    let n = p.len();
    let probs = p.as_slice().to_vec();
    let rows: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut seen = vec![false; n];
            let mut mass = 1.0f64;
            let mut record = Vec::with_capacity(n);
            for step in 0..n as u64 {
                record.push(mass);
                // First hit among unseen coupons, weight p_i / mass.
                let u = rng::stream_unit(seed, trial, step) * mass;
                let mut acc = 0.0;
                let mut chosen = usize::MAX;
                for (i, &pi) in probs.iter().enumerate() {
                    if seen[i] {
                        continue;
                    }
                    acc += pi;
                    if u < acc {
                        chosen = i;
                        break;
                    }
                }
                if chosen == usize::MAX {
                    chosen = (0..n).rev().find(|&i| !seen[i]).expect("unseen coupon");
                }
                seen[chosen] = true;
                mass -= probs[chosen];
            }
            record
        })
        .collect();

    let mut out = Vec::with_capacity(n);
    let mut column = vec![0.0f64; trials as usize];
    for k in 0..n {
        for (t, row) in rows.iter().enumerate() {
            column[t] = row[k];
        }
        out.push(stats_from(&column));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma_kernel::ShapeParam;

    fn model(p: Vec<f64>, m: u32) -> CollectorModel {
        CollectorModel::new(
            ProbabilityVector::normalized(p).unwrap(),
            ShapeParam::new(m).unwrap(),
        )
    }

    fn uniform(n: usize, m: u32) -> CollectorModel {
        CollectorModel::new(
            ProbabilityVector::uniform(n).unwrap(),
            ShapeParam::new(m).unwrap(),
        )
    }

    #[test]
    fn stream_is_a_pure_function() {
        let a = rng::stream_u64(7, 11, 13);
        let b = rng::stream_u64(7, 11, 13);
        assert_eq!(a, b);
        // TrialStream agrees with the random-access form.
        let mut ts = rng::TrialStream::new(7, 11);
        ts.seek(13);
        assert_eq!(ts.next_u64(), a);
        // Distinct coordinates decorrelate.
        assert_ne!(rng::stream_u64(7, 11, 14), a);
        assert_ne!(rng::stream_u64(7, 12, 13), a);
        assert_ne!(rng::stream_u64(8, 11, 13), a);
    }

    #[test]
    fn units_are_in_range_and_roughly_uniform() {
        let mut sum = 0.0;
        let n = 20_000u64;
        for i in 0..n {
            let u = rng::stream_unit(42, 0, i);
            assert!((0.0..1.0).contains(&u));
            sum += u;
        }
        let mean = sum / n as f64;
        assert!((mean - 0.5).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn stats_on_known_values() {
        let s = stats_from(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.variance - 5.0 / 3.0).abs() < 1e-15);
        assert!((s.std_error_mean - (s.variance / 4.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn deterministic_regardless_of_thread_count() {
        let cfg = SimConfig {
            model: model(vec![0.5, 0.3, 0.2], 2),
            trials: 2_000,
            seed: 9,
        };
        let default_pool = simulate_discrete(&cfg).unwrap();
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| simulate_discrete(&cfg).unwrap());
        assert_eq!(default_pool.mean.to_bits(), single.mean.to_bits());
        assert_eq!(default_pool.variance.to_bits(), single.variance.to_bits());
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| simulate_poissonized(&cfg).unwrap());
        let again = simulate_poissonized(&cfg).unwrap();
        assert_eq!(four.mean.to_bits(), again.mean.to_bits());
    }

    #[test]
    fn single_coupon_is_exact() {
        let cfg = SimConfig {
            model: uniform(1, 3),
            trials: 100,
            seed: 1,
        };
        let s = simulate_discrete(&cfg).unwrap();
        assert_eq!(s.mean, 3.0);
        assert_eq!(s.variance, 0.0);
    }

    #[test]
    fn discrete_matches_exact_mean_within_3_sigma() {
        let cfg = SimConfig {
            model: model(vec![0.6, 0.4], 1),
            trials: 40_000,
            seed: 2026,
        };
        let s = simulate_discrete(&cfg).unwrap();
        let exact = mean_variance(&cfg.model).unwrap();
        let z = (s.mean - exact.mean) / s.std_error_mean;
        assert!(z.abs() < 3.0, "z = {z}");
        let zv = (s.variance - exact.var_t) / s.std_error_variance;
        assert!(zv.abs() < 3.0, "zv = {zv}");
    }

    #[test]
    fn alias_sampler_matches_closed_form_mean() {
        // N = 20 > 16 exercises the alias table; uniform m = 1 has the
        // harmonic closed form.
        let cfg = SimConfig {
            model: uniform(20, 1),
            trials: 20_000,
            seed: 7,
        };
        let s = simulate_discrete(&cfg).unwrap();
        let mean = 20.0 * crate::numeric::harmonic(20);
        let z = (s.mean - mean) / s.std_error_mean;
        assert!(z.abs() < 3.0, "z = {z}");
    }

    #[test]
    fn poissonized_matches_exact_variance() {
        let cfg = SimConfig {
            model: uniform(3, 2),
            trials: 40_000,
            seed: 5,
        };
        let s = simulate_poissonized(&cfg).unwrap();
        let exact = mean_variance(&cfg.model).unwrap();
        let z_mean = (s.mean - exact.mean) / s.std_error_mean;
        let z_var = (s.variance - exact.var_x) / s.std_error_variance;
        assert!(z_mean.abs() < 3.0, "z_mean = {z_mean}");
        assert!(z_var.abs() < 3.0, "z_var = {z_var}");
    }

    #[test]
    fn transfer_holds_between_simulators() {
        let cfg = SimConfig {
            model: model(vec![0.6, 0.4], 2),
            trials: 30_000,
            seed: 11,
        };
        let rep = transfer_check(&cfg).unwrap();
        assert!(rep.within_3_sigma, "z_mean={} z_var={}", rep.z_mean, rep.z_var);
    }

    #[test]
    fn active_clock_two_uniform_coupons_is_deterministic() {
        // N = 2, m = 1 uniform: every path gives H = 3 and sum_psi = 2,
        // so the decomposition reproduces Var T = 2 with zero error.
        let cfg = SimConfig {
            model: uniform(2, 1),
            trials: 500,
            seed: 3,
        };
        let rep = simulate_active_clock(&cfg).unwrap();
        assert_eq!(rep.clock_mean.mean, 3.0);
        assert_eq!(rep.clock_mean.variance, 0.0);
        assert_eq!(rep.sum_psi.mean, 2.0);
        assert_eq!(rep.var_estimate, 2.0);
        assert_eq!(rep.exact_var_t, 2.0);
        assert!(rep.within_3_sigma);
    }

    #[test]
    fn active_clock_matches_exact_variance() {
        let cfg = SimConfig {
            model: model(vec![0.5, 0.3, 0.2], 2),
            trials: 40_000,
            seed: 17,
        };
        let rep = simulate_active_clock(&cfg).unwrap();
        assert!(rep.within_3_sigma, "z = {}", rep.z_var);
        // The clock-mean leg also estimates E T.
        let exact = mean_variance(&cfg.model).unwrap();
        let z = (rep.clock_mean.mean - exact.mean) / rep.clock_mean.std_error_mean;
        assert!(z.abs() < 3.0, "z = {z}");
    }

    #[test]
    fn mass_decay_uniform_is_exact() {
        let p = ProbabilityVector::uniform(4).unwrap();
        let rows = simulate_mass_decay(&p, 200, 9).unwrap();
        // R_r = r/N deterministically under uniform probabilities.
        for (k, stats) in rows.iter().enumerate() {
            let r = 4 - k;
            assert!(
                (stats.mean - r as f64 / 4.0).abs() < 1e-12,
                "r={r}: {}",
                stats.mean
            );
            assert!(stats.variance < 1e-24);
        }
    }
}
