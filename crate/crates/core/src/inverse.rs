//! Closed-form inverse entries for `C_n`, the pentadiagonal factors, the
//! products `D = B·C`, the 2×2 Schur matrix, and the full explicit inverses
//! of both families.
//!
//! These free functions build a fresh family kernel per call; batch work
//! should instantiate one kernel via [`kernel_for`] and reuse it.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{kernel_for, FamilyKernel, SchurMatrix};
use crate::matrix::SystemSpec;
use crate::seq::r2;

/// `c⁻¹_{ij} = γ_j γ_{n+1−i} / γ_{n+1}` for `i ≥ j` (symmetric otherwise),
/// evaluated through ratio composition so no `γ` is ever formed. Valid for
/// any `n ≥ 1`; indices are 1-based.
pub fn c_inv_entry(n: usize, i: usize, j: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::DimensionTooSmall { n, min: 1 });
    }
    for (name, v) in [("i", i), ("j", j)] {
        if v < 1 || v > n {
            return Err(Error::IndexOutOfRange {
                name,
                value: v,
                max: n,
            });
        }
    }
    let (i, j) = if i < j { (j, i) } else { (i, j) };
    // γ_j γ_{n+1−i} / γ_{n+1} = r1^{j−i} (1−q^j)(1−q^{n+1−i}) / ((1−q^{n+1}) 2√15)
    let q = r2() * r2();
    let e = i - j; // ≥ 0
    let scale = r2().powi(i32::try_from(e).unwrap_or(i32::MAX));
    let num = (1.0 - q.powi(j as i32)) * (1.0 - q.powi((n + 1 - i) as i32));
    let den = (1.0 - q.powi((n + 1) as i32)) * 2.0 * 15f64.sqrt();
    Ok(scale * num / den)
}

/// `b⁻¹_{ij}` of the family's pentadiagonal factor. 1-based indices.
pub fn b_inv_entry(spec: SystemSpec, i: usize, j: usize) -> Result<f64> {
    kernel_for(spec).b_inv_entry(i, j)
}

/// `d⁻¹_{ij}` of `D = B·C`. 1-based indices.
pub fn d_inv_entry(spec: SystemSpec, i: usize, j: usize) -> Result<f64> {
    kernel_for(spec).d_inv_entry(i, j)
}

/// The family's 2×2 Schur matrix from its closed `γ`/`α` expressions.
pub fn schur_m(spec: SystemSpec) -> SchurMatrix {
    kernel_for(spec).schur()
}

/// `a⁻¹_{ij}` of the full explicit inverse. 1-based indices.
pub fn a_inv_entry(spec: SystemSpec, i: usize, j: usize) -> Result<f64> {
    kernel_for(spec).a_inv_entry(i, j)
}

/// Largest dimension for which a dense inverse is materialized.
pub const ASSEMBLE_GUARD: usize = 10_000;

/// Full `n×n` inverse, rows computed independently (and in parallel) from the
/// shared kernel tables. Row-major, 0-based storage.
pub fn assemble_inverse(spec: SystemSpec) -> Result<Vec<Vec<f64>>> {
    if spec.n > ASSEMBLE_GUARD {
        return Err(Error::GuardExceeded {
            what: "dense inverse assembly",
            limit: ASSEMBLE_GUARD,
            got: spec.n,
        });
    }
    let kernel = kernel_for(spec);
    Ok(assemble_inverse_with(kernel.as_ref()))
}

/// [`assemble_inverse`] against an existing kernel.
pub fn assemble_inverse_with(kernel: &dyn FamilyKernel) -> Vec<Vec<f64>> {
    let n = kernel.spec().n;
    (1..=n)
        .into_par_iter()
        .map(|i| (1..=n).map(|j| kernel.a_inv(i, j)).collect())
        .collect()
}
