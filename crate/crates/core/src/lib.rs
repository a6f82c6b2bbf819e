//! Explicit inverses, norm bounds and `O(n)` solvers for two families of
//! seven-diagonal (near) Toeplitz matrices, plus the fixed-point solver for
//! the clamped-beam boundary-value problem they discretize.
//!
//! The two families (`toeplitz`: `a0 = 56, a1 = −39`; `near`:
//! `a0 = 68, a1 = −40`) share the exact decomposition `A = B·C + σUVᵀ` into a
//! pentadiagonal and a tridiagonal factor plus a rank-2 corner update. Each
//! family's closed-form machinery lives behind the [`kernel::FamilyKernel`]
//! trait and is selected at runtime by name through the kernel registry.
//!
//! Modules:
//! - [`seq`] — exact/stable evaluation of the `γ_k`, `α_k` sequences.
//! - [`matrix`] — matrix construction and symmetric banded storage.
//! - [`kernel`] — per-family closed-form kernels and the registry.
//! - [`inverse`] — inverse-entry operations and full-inverse assembly.
//! - [`bounds`] — exact norms, closed-form bounds and their decomposition.
//! - [`solver`] — `O(n)` solve and the beam fixed-point iteration.
//! - [`oracle`] — dense-elimination references and the verification suite.

pub mod bounds;
pub mod error;
pub mod inverse;
pub mod kernel;
pub mod matrix;
pub mod oracle;
pub mod seq;
pub mod solver;

pub use bounds::{bound_breakdown, bound_value, exact_inverse_norm, BoundBreakdown, PNorm};
pub use error::{Error, Result};
pub use inverse::{a_inv_entry, assemble_inverse, b_inv_entry, c_inv_entry, d_inv_entry, schur_m};
pub use kernel::{kernel_by_name, kernel_for, FamilyKernel, KernelRegistry, SchurMatrix};
pub use matrix::{
    build_a, build_b, build_c, rank_two_factors, BandedMatrix, RankTwoFactors, SystemSpec, Variant,
};
pub use oracle::{dense_invert, full_suite, leading_minors, stencil_constants_check,
    VerificationReport};
pub use seq::{gamma_ratio, GammaRatios, GammaTable};
pub use solver::{
    beam_fixed_point, contraction_predictor, contraction_rate_exact, solve, BeamProblem,
    FixedPointTrace, ShermanMorrisonSolver,
};

/// Environment variable capping the worker-thread count for parallel sweeps.
pub const THREADS_ENV: &str = "HEPTAINV_THREADS";

/// Configure the global worker pool from `HEPTAINV_THREADS` (no-op when the
/// variable is unset, unparsable, or a pool already exists).
pub fn configure_threads_from_env() {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        if let Ok(t) = v.parse::<usize>() {
            if t >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
            }
        }
    }
}
