//! Numerical laboratory for the log-constrained fractional Sobolev inequality
//! on discretized intervals and rectangles.
//!
//! The library computes, at desk scale:
//!
//! * the best constant `Lambda_p` and its positive extremal `u_p` for the
//!   inequality `Lambda_p * k(u)^p <= [u]_{s,p}^p`, where `[.]_{s,p}` is the
//!   Gagliardo seminorm with zero extension outside the domain and
//!   `k(u) = exp(int (log|u|) omega dx)` is the weighted geometric mean;
//! * the large-`p` limit objects: the Hölder-quotient minimum `mu_s`, its
//!   nonnegative normalized minimizer `v_s`, and nodewise residuals of the
//!   limit equations driven by the operators `L_inf^+`, `L_inf^-`;
//! * sweep diagnostics tracking `Lambda_p^{1/p} -> |u_inf|_s` together with
//!   inequality audits (minimality, Jensen, the `k <= int u/v <= |u|_s/mu`
//!   chain) on seeded random fields.
//!
//! Everything is double precision; all `p`-power sums run in log domain with
//! max shifting so that `p` up to a few hundred is safe. See the `oracle`
//! module for the independent brute-force implementations used to validate
//! the fast paths.

pub mod audit;
pub mod config;
pub mod descent;
pub mod error;
pub mod extremal;
pub mod field;
pub mod geometry;
pub mod kernel;
pub mod limit;
pub mod math;
pub mod nonlocal;
pub mod oracle;
pub mod report;
pub mod sweep;
pub mod weight;
pub mod xi;

pub use config::{ExperimentConfig, Prepared};
pub use error::{Error, Result};
pub use extremal::{solve_extremal, ExtremalSolution, SolveOptions};
pub use field::ScalarField;
pub use geometry::{build_domain, distance_field, Domain, DomainShape};
pub use kernel::{KernelTable, SeminormParams};
pub use limit::{minimize_holder_quotient, LimitOptions, LimitSolution};
pub use nonlocal::{
    frac_p_laplacian, gagliardo_seminorm_log, holder_seminorm, linf_minus, linf_plus,
    weak_pairing, HolderWitness,
};
pub use sweep::{run_p_sweep, SweepRecord, SweepResult};
pub use weight::{
    coarea_check_1d, dyadic_levels, geometric_mean_k, k_eps, normalize_weight, DyadicLevels,
    GeometricMean, Weight,
};
pub use xi::{build_xi, XiConstruction};
