//! Family kernels: the per-variant closed-form machinery behind a common
//! trait, registered by name and selected at runtime.
//!
//! Each matrix family contributes its own inverse-entry formulas, its own
//! 2×2 Schur closure and its own norm-bound closed forms; everything built on
//! top of those (full Sherman–Morrison inverse entries, row sums, norms) is
//! family-independent and lives here as provided methods.

mod near;
mod segsum;
mod toeplitz;

pub use near::{NearKernelCoefficients, NearToeplitzKernel};
pub use toeplitz::{ToeplitzKernel, ToeplitzKernelCoefficients};

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::matrix::{SystemSpec, Variant};
use crate::seq::GammaRatios;

/// The symmetric 2×2 matrix `M = I₂ + σ VᵀD⁻¹U` closing the rank-2 update.
/// Its diagonal entries are equal by centrosymmetry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchurMatrix {
    pub m11: f64,
    pub m12: f64,
}

impl SchurMatrix {
    pub fn det(&self) -> f64 {
        self.m11 * self.m11 - self.m12 * self.m12
    }

    pub fn sum(&self) -> f64 {
        self.m11 + self.m12
    }

    /// `m11 > m12 > 0`, which also forces `det > 0`.
    pub fn is_positive_dominant(&self) -> bool {
        self.m11 > self.m12 && self.m12 > 0.0
    }
}

/// Closed-form kernel of one matrix family at a fixed dimension.
///
/// Indices are 1-based throughout, matching the entry formulas. The
/// entry-level required methods (`b_inv`, `d_inv`) assume valid indices;
/// the `*_entry` wrappers validate and should be preferred by callers.
pub trait FamilyKernel: Send + Sync {
    fn spec(&self) -> SystemSpec;

    /// Scaled `γ` tables shared by every formula of this kernel.
    fn ratios(&self) -> &GammaRatios;

    /// `b⁻¹_{ij}` of the family's pentadiagonal factor (valid indices).
    fn b_inv(&self, i: usize, j: usize) -> f64;

    /// `d⁻¹_{ij}` of `D = B·C` (valid indices).
    fn d_inv(&self, i: usize, j: usize) -> f64;

    /// `M` evaluated by the family's closed `γ`/`α` expressions.
    fn schur(&self) -> SchurMatrix;

    /// Closed form of the row-`n` sum `Σ_j d⁻¹_{nj}` (the `π₂` term).
    fn d_row_n_sum_closed(&self) -> f64;

    /// Exact row sums of `B⁻¹` (index 0 ↦ row 1).
    fn b_inv_row_sums(&self) -> Vec<f64>;

    /// The row-sum functional `g` at real argument `x` (continuous `γ`
    /// extension; its real maximizer is `x = (n+1)/2`).
    fn g_closed(&self, x: f64) -> f64;

    /// Family bound on `max g` (the `π₃` term).
    fn pi3_bound(&self) -> f64;

    /// Cited bound on `‖B⁻¹‖_∞`.
    fn b_inv_norm_bound(&self) -> f64;

    /// The family's closed-form upper bound on `‖A⁻¹‖_p`, `p ∈ {1,2,∞}`.
    fn norm_bound(&self) -> f64;

    // ---- provided, family-independent ----

    fn b_inv_entry(&self, i: usize, j: usize) -> Result<f64> {
        self.check_indices(i, j)?;
        Ok(self.b_inv(i, j))
    }

    fn d_inv_entry(&self, i: usize, j: usize) -> Result<f64> {
        self.check_indices(i, j)?;
        Ok(self.d_inv(i, j))
    }

    /// `a⁻¹_{ij}`: `d⁻¹_{ij}` plus the σ-scaled rank-2 correction assembled
    /// from `d⁻¹` values at columns `{1, 2, n−1, n}` and the Schur matrix.
    fn a_inv(&self, i: usize, j: usize) -> f64 {
        let n = self.spec().n;
        let sigma = self.spec().variant.sigma() as f64;
        let m = self.schur();
        let det = m.det();
        let d1j = self.d_inv(1, j);
        let dnj = self.d_inv(n, j);
        let right = 4.0 * self.d_inv(i, n) - self.d_inv(i, n - 1);
        let left = 4.0 * self.d_inv(i, 1) - self.d_inv(i, 2);
        self.d_inv(i, j)
            + sigma / det * ((m.m12 * d1j - m.m11 * dnj) * right + (m.m12 * dnj - m.m11 * d1j) * left)
    }

    fn a_inv_entry(&self, i: usize, j: usize) -> Result<f64> {
        self.check_indices(i, j)?;
        Ok(self.a_inv(i, j))
    }

    /// Exact `g(i) = 4(d⁻¹_{i,n} + d⁻¹_{i,1}) − (d⁻¹_{i,n−1} + d⁻¹_{i,2})`
    /// from entry values (the quantity `g_closed` reproduces analytically).
    fn g_exact(&self, i: usize) -> f64 {
        let n = self.spec().n;
        4.0 * (self.d_inv(i, n) + self.d_inv(i, 1))
            - (self.d_inv(i, n - 1) + self.d_inv(i, 2))
    }

    /// Row sums of `D⁻¹` for all rows, `O(n)` total (index 0 ↦ row 1).
    fn d_inv_row_sums(&self) -> Vec<f64> {
        let w = self.b_inv_row_sums();
        segsum::d_inv_row_sums(self.ratios(), &w)
    }

    /// Row sums of `A⁻¹` for all rows (index 0 ↦ row 1), via the exact
    /// rank-2 row-sum identity
    /// `Σ_j a⁻¹_{ij} = Σ_j d⁻¹_{ij} − σ (Σ_j d⁻¹_{nj}) g(i) / (m11 + m12)`.
    fn a_inv_row_sums(&self) -> Vec<f64> {
        let n = self.spec().n;
        let sigma = self.spec().variant.sigma() as f64;
        let d_sums = self.d_inv_row_sums();
        let s_n = d_sums[n - 1];
        let m_sum = self.schur().sum();
        (1..=n)
            .map(|i| d_sums[i - 1] - sigma * s_n * self.g_exact(i) / m_sum)
            .collect()
    }

    fn check_indices(&self, i: usize, j: usize) -> Result<()> {
        let n = self.spec().n;
        for (name, v) in [("i", i), ("j", j)] {
            if v < 1 || v > n {
                return Err(Error::IndexOutOfRange {
                    name,
                    value: v,
                    max: n,
                });
            }
        }
        Ok(())
    }
}

/// Constructor for one registered family kernel.
pub type KernelFactory = fn(usize) -> Result<Box<dyn FamilyKernel>>;

/// Name-keyed registry of the available family kernels.
pub struct KernelRegistry {
    entries: Vec<(&'static str, Variant, KernelFactory)>,
}

impl KernelRegistry {
    /// The global registry holding both built-in families.
    pub fn global() -> &'static KernelRegistry {
        static REGISTRY: OnceLock<KernelRegistry> = OnceLock::new();
        REGISTRY.get_or_init(|| KernelRegistry {
            entries: vec![
                ("toeplitz", Variant::Toeplitz, |n| {
                    Ok(Box::new(ToeplitzKernel::new(SystemSpec::toeplitz(n)?)))
                }),
                ("near", Variant::NearToeplitz, |n| {
                    Ok(Box::new(NearToeplitzKernel::new(SystemSpec::near_toeplitz(n)?)))
                }),
            ],
        })
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.iter().map(|(name, _, _)| *name)
    }

    /// Instantiate a kernel by registered name.
    pub fn create(&self, name: &str, n: usize) -> Result<Box<dyn FamilyKernel>> {
        let wanted = name.to_ascii_lowercase();
        self.entries
            .iter()
            .find(|(name, _, _)| *name == wanted)
            .ok_or_else(|| Error::UnknownVariant(name.to_string()))
            .and_then(|(_, _, factory)| factory(n))
    }

    /// Instantiate the kernel registered for the spec's variant.
    pub fn create_for(&self, spec: SystemSpec) -> Box<dyn FamilyKernel> {
        let (_, _, factory) = self
            .entries
            .iter()
            .find(|(_, variant, _)| *variant == spec.variant)
            .expect("every variant has a registered kernel");
        factory(spec.n).expect("spec was validated at construction")
    }
}

/// Kernel for a validated spec.
pub fn kernel_for(spec: SystemSpec) -> Box<dyn FamilyKernel> {
    KernelRegistry::global().create_for(spec)
}

/// Kernel by registered name (`toeplitz` | `near`).
pub fn kernel_by_name(name: &str, n: usize) -> Result<Box<dyn FamilyKernel>> {
    KernelRegistry::global().create(name, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_lists_both_families() {
        let names: Vec<_> = KernelRegistry::global().names().collect();
        assert_eq!(names, vec!["toeplitz", "near"]);
    }

    #[test]
    fn registry_selects_by_name() {
        let k = kernel_by_name("toeplitz", 9).unwrap();
        assert_eq!(k.spec().variant, Variant::Toeplitz);
        let k = kernel_by_name("NEAR", 9).unwrap();
        assert_eq!(k.spec().variant, Variant::NearToeplitz);
        assert!(kernel_by_name("hankel", 9).is_err());
        assert!(kernel_by_name("near", 3).is_err());
    }

    #[test]
    fn kernel_for_matches_spec() {
        for variant in Variant::ALL {
            let spec = SystemSpec::new(variant, 12).unwrap();
            assert_eq!(kernel_for(spec).spec(), spec);
        }
    }
}
