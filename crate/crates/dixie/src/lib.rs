//! Numerical laboratory for the double Dixie cup coupon-collector problem:
//! collect at least `m` copies of each of `N` coupon types under unequal
//! coupon probabilities.
//!
//! The crate is organized bottom-up:
//!
//! * [`numeric`] / [`quadrature`]: compensated sums, log-factorials, grids,
//!   and an adaptive Gauss-Kronrod integrator with certified analytic tails.
//! * [`gamma_kernel`]: the scalar kernels `Q_m`, `f_m`, `F_m`, the hazards
//!   `h_m` and `phi_m`, and the log-elasticity `e_m`, each returned in both
//!   natural and log scale.
//! * [`centering`]: the centering pair `(b_n, a_n)` solving `n Q_m(b) = 1`,
//!   plus quantile-inequality diagnostics.
//! * [`exact_moments`]: finite-`N` rising moments `E T^(r)` by subset
//!   inclusion-exclusion and by certified quadrature, with a combined
//!   mean/variance report.
//! * [`poissonized`]: the poissonized completion time `X = max_j X_j`, its
//!   density, and the radial derivative machinery (`w_theta`, size-bias
//!   ratio, likelihood-ratio weighted mean).
//! * [`extremality`]: variance extremality of the uniform vector (radial
//!   scans, the Hessian constant via the covariance identity, `b_m`
//!   monotonicity, and the mass-decay Monte Carlo check).
//! * [`asymptotics`]: Gumbel limits under equal probabilities, the
//!   infinite-product limit for fixed sequences, and the power-law
//!   endpoint family with defect-mass profiles.
//! * [`montecarlo`]: counter-based, thread-count-independent simulation of
//!   the discrete chain, the poissonized race, and the active-clock
//!   decomposition.
//! * [`acceptance`]: the end-to-end verification gates behind both the
//!   `acceptance` integration test and `dixie verify-all`.

pub mod acceptance;
pub mod asymptotics;
pub mod centering;
pub mod exact_moments;
pub mod extremality;
pub mod gamma_kernel;
pub mod montecarlo;
pub mod numeric;
pub mod poissonized;
pub mod quadrature;

pub use centering::{solve_centering, CenteringPair};
pub use exact_moments::{CollectorModel, MomentReport, ProbabilityVector};
pub use gamma_kernel::ShapeParam;
