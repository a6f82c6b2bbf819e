//! Closed-form kernel of the Toeplitz family (`a0 = 56`, `a1 = −39`, `σ = 1`).
//!
//! `B⁻¹` entries come from the classical closed form for the constant
//! pentadiagonal `(1, −4, 6, −4, 1)` matrix with corner 6. `D⁻¹ = C⁻¹B⁻¹` has
//! a fully explicit form driven by the coefficient bundle `(η, ζ₁, ζ₂, ζ₃)`;
//! the three-segment summation path is kept alongside as an independent
//! cross-check of that long polynomial.

use crate::matrix::SystemSpec;
use crate::seq::GammaRatios;

use super::segsum::{self, poly_mul, BInvCubic, Poly3};
use super::{FamilyKernel, SchurMatrix};

/// The `(η, ζ₁, ζ₂, ζ₃)` coefficient bundle of the explicit `D⁻¹` entry at
/// `(i, j)`. Entries with `i < j` are mapped through centrosymmetry first.
#[derive(Debug, Clone, Copy)]
pub struct ToeplitzKernelCoefficients {
    pub eta: f64,
    pub zeta1: f64,
    pub zeta2: f64,
    pub zeta3: f64,
}

impl ToeplitzKernelCoefficients {
    pub fn for_entry(n: usize, i: usize, j: usize) -> Self {
        let (i, j) = if i < j { (n + 1 - i, n + 1 - j) } else { (i, j) };
        let (z1, z2, z3) = zeta_numerators(n, i, j);
        Self {
            eta: eta(n),
            zeta1: z1 as f64 / 6.0,
            zeta2: z2 as f64 / 6.0,
            zeta3: z3 as f64 / 6.0,
        }
    }
}

fn eta(n: usize) -> f64 {
    let nf = n as f64;
    -1.0 / (6.0 * (nf + 1.0) * (nf + 2.0) * (nf + 3.0))
}

/// `(6ζ₁, 6ζ₂, 6ζ₃)` assembled exactly in `i128` (valid for `i ≥ j`).
///
/// The inner polynomial of `ζ₁` mixes `(j − 3i − 1)n³`-size terms of both
/// signs; integer assembly keeps a single rounding at the final division.
fn zeta_numerators(n: usize, i: usize, j: usize) -> (i128, i128, i128) {
    let (n, i, j) = (n as i128, i as i128, j as i128);
    let inner = (j - 3 * i - 1) * n * n * n
        + (6 * j + 6 * i * i - 12 * i - 4) * n * n
        + ((-3 * i * i - 3 * i + 10) * j - 3 * i * i * i + 18 * i * i - 15 * i - 5) * n
        + (2 * i * i * i - 3 * i * i - 3 * i + 5) * j
        - 5 * i * i * i
        + 12 * i * i
        - 6 * i
        - 2;
    let z1 = j * (j + 1) * inner;
    let z2 = (n + 1) * j * (n + 1 - j) * (n + 2 - j);
    let z3 = (n + 1) * j * (j + 1) * (n + 1 - j);
    (z1, z2, z3)
}

pub struct ToeplitzKernel {
    spec: SystemSpec,
    ratios: GammaRatios,
    /// `1 / (36 (n+1)(n+2)(n+3))`, the single final division of the entry form.
    inv_denom36: f64,
}

impl ToeplitzKernel {
    pub fn new(spec: SystemSpec) -> Self {
        debug_assert_eq!(spec.variant, crate::matrix::Variant::Toeplitz);
        let nf = spec.n as f64;
        Self {
            spec,
            ratios: GammaRatios::new(spec.n),
            inv_denom36: 1.0 / (36.0 * (nf + 1.0) * (nf + 2.0) * (nf + 3.0)),
        }
    }

    /// `d⁻¹_{ij}` by the three-segment summation path — the independent
    /// cross-check of the explicit entry form (valid indices).
    pub fn d_inv_segments(&self, i: usize, j: usize) -> f64 {
        segsum::d_inv_segments(&self.ratios, self, i, j)
    }
}

impl BInvCubic for ToeplitzKernel {
    fn n(&self) -> usize {
        self.spec.n
    }

    fn denom(&self) -> f64 {
        let nf = self.spec.n as f64;
        6.0 * (nf + 1.0) * (nf + 2.0) * (nf + 3.0)
    }

    fn row_poly(&self, r: usize) -> Poly3 {
        let (n, r) = (self.spec.n as i128, r as i128);
        let scale = -(n + 1 - r) * (n + 2 - r);
        let bracket = [-(3 * r * n + 5 * r + n + 3), 2 * r + n + 3, 0, 0];
        let p = poly_mul([0, 1, 1, 0], bracket);
        p.map(|c| scale * c)
    }

    fn col_poly(&self, c: usize) -> Poly3 {
        let (n, c) = (self.spec.n as i128, c as i128);
        let quad = [(n + 1) * (n + 2), -(2 * n + 3), 1, 0];
        let lin = [(c - 1) * (n + 3), 2 * c - 3 * n - 5, 0, 0];
        let p = poly_mul(quad, lin);
        p.map(|v| -c * (c + 1) * v)
    }

    fn flip_col_poly(&self, c: usize) -> Poly3 {
        let (n, c) = (self.spec.n as i128, c as i128);
        let lin = [
            (c - 1) * (n + 2) * (n + 3) - (c + 2) * (n + 1) * (n + 1),
            3 * n - 2 * c + 5,
            0,
            0,
        ];
        let p = poly_mul([0, 1, 1, 0], lin);
        p.map(|v| -c * (c + 1) * v)
    }
}

impl FamilyKernel for ToeplitzKernel {
    fn spec(&self) -> SystemSpec {
        self.spec
    }

    fn ratios(&self) -> &GammaRatios {
        &self.ratios
    }

    fn b_inv(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i < j { (j, i) } else { (i, j) };
        let (n, i, j) = (self.spec.n as i128, i as i128, j as i128);
        let num = -(n + 1 - i)
            * (n + 2 - i)
            * j
            * (j + 1)
            * ((i + 1) * (j - 1) * (n + 3) - i * (j + 2) * (n + 1));
        num as f64 / <Self as BInvCubic>::denom(self)
    }

    fn d_inv(&self, i: usize, j: usize) -> f64 {
        let n = self.spec.n;
        let (i, j) = if i < j { (n + 1 - i, n + 1 - j) } else { (i, j) };
        let rt = &self.ratios;
        let (z1, z2, z3) = zeta_numerators(n, i, j);
        let head = rt.pair(j, n + 1 - i) / 36.0;
        // (γ_{n+1−i} γ_{i+1} − γ_{n−i} γ_i)/γ_{n+1}; identically 1, kept in
        // the written form of the entry formula.
        let bracket = rt.pair(n + 1 - i, i + 1) - rt.pair(n - i, i);
        head
            - (z1 as f64 * bracket + z2 as f64 * rt.ratio(n + 1 - i) + z3 as f64 * rt.ratio(i))
                * self.inv_denom36
    }

    fn schur(&self) -> SchurMatrix {
        let n = self.spec.n;
        let nf = n as f64;
        let rt = &self.ratios;
        // α_n/γ_{n+1} = 4 γ_n/γ_{n+1} − γ_{n−1}/γ_{n+1}; 1/γ_{n+1} = γ_1/γ_{n+1}.
        let alpha_ratio = 4.0 * rt.ratio(n) - rt.ratio(n - 1);
        let inv_top = rt.ratio(1);
        let m11 = 1.0
            + (11.0 * nf * nf + 5.0 * nf) / (36.0 * (nf + 1.0) * (nf + 2.0))
            + (alpha_ratio - (2.0 * inv_top + 2.0 * nf * rt.ratio(n)) / (nf + 2.0)) / 36.0;
        let m12 = (7.0 * nf + 4.0) / (18.0 * (nf + 1.0) * (nf + 2.0))
            - (2.0 * inv_top + (nf * inv_top + rt.ratio(n)) / (nf + 2.0)) / 18.0;
        SchurMatrix { m11, m12 }
    }

    fn d_row_n_sum_closed(&self) -> f64 {
        let n = self.spec.n;
        let nf = n as f64;
        let rt = &self.ratios;
        1.0 / 216.0 + nf * (7.0 * nf + 1.0) / 432.0
            - (nf * nf + nf + 2.0) * (rt.ratio(n) + rt.ratio(1)) / 432.0
    }

    fn b_inv_row_sums(&self) -> Vec<f64> {
        segsum::b_inv_row_sums(self)
    }

    fn g_closed(&self, x: f64) -> f64 {
        let nf = self.spec.n as f64;
        let rt = &self.ratios;
        (6.0 * nf + 10.0) * (1.0 - rt.ratio_real(x) - rt.ratio_real(nf + 1.0 - x))
            / (36.0 * (nf + 2.0))
            + x * (nf + 1.0 - x) / (6.0 * (nf + 2.0))
    }

    fn pi3_bound(&self) -> f64 {
        (self.spec.n as f64 + 4.0) / 24.0
    }

    fn b_inv_norm_bound(&self) -> f64 {
        let nf = self.spec.n as f64;
        (nf + 1.0) * (nf + 1.0) * (nf + 3.0) * (nf + 3.0) / 384.0
    }

    fn norm_bound(&self) -> f64 {
        let nf = self.spec.n as f64;
        (nf + 1.0) * (nf + 1.0) * (nf + 3.0) * (nf + 3.0) / 2304.0
            + (nf + 1.0) * (nf + 1.0) / 432.0
            + (nf + 4.0) / 24.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::FamilyKernel;

    fn kernel(n: usize) -> ToeplitzKernel {
        ToeplitzKernel::new(SystemSpec::toeplitz(n).unwrap())
    }

    #[test]
    fn b_inv_corner_value() {
        let k = kernel(7);
        let v = k.b_inv(1, 1);
        assert!((v - 28.0 / 45.0).abs() < 1e-15);
        // symmetry
        assert_eq!(k.b_inv(2, 5), k.b_inv(5, 2));
    }

    #[test]
    fn coefficient_invariants() {
        for n in [7usize, 16, 33] {
            for i in 1..=n {
                for j in 1..=i {
                    let c = ToeplitzKernelCoefficients::for_entry(n, i, j);
                    assert!(c.eta < 0.0);
                    assert!(c.zeta2 >= 0.0 && c.zeta3 >= 0.0, "n={n} i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn closed_form_matches_segment_path() {
        for n in [7usize, 8, 16, 33] {
            let k = kernel(n);
            for i in 1..=n {
                for j in 1..=n {
                    let closed = k.d_inv(i, j);
                    let seg = k.d_inv_segments(i, j);
                    let denom = closed.abs().max(1e-300);
                    assert!(
                        (closed - seg).abs() / denom < 1e-11,
                        "n={n} ({i},{j}): {closed} vs {seg}"
                    );
                }
            }
        }
    }

    #[test]
    fn d_inv_is_centrosymmetric() {
        let n = 9;
        let k = kernel(n);
        for i in 1..=n {
            for j in 1..=n {
                let a = k.d_inv(i, j);
                let b = k.d_inv(n + 1 - i, n + 1 - j);
                assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0));
            }
        }
    }

    #[test]
    fn schur_values_at_n7() {
        // frozen from assembling M = I + VᵀD⁻¹U with a dense-elimination D⁻¹
        let m = kernel(7).schur();
        assert!((m.m11 - 1.2296270563606544).abs() < 1e-12);
        assert!((m.m12 - 0.04011092732839639).abs() < 1e-12);
        assert!(m.is_positive_dominant());
    }

    #[test]
    fn row_n_sum_closed_matches_direct_entries() {
        for n in [7usize, 16, 64] {
            let k = kernel(n);
            let direct: f64 = (1..=n).map(|j| k.d_inv(n, j)).sum();
            let closed = k.d_row_n_sum_closed();
            assert!(
                (closed - direct).abs() <= 1e-12 * direct.abs(),
                "n={n}: {closed} vs {direct}"
            );
        }
    }

    #[test]
    fn g_closed_matches_entry_functional() {
        for n in [7usize, 10, 33] {
            let k = kernel(n);
            for i in 1..=n {
                let closed = k.g_closed(i as f64);
                let exact = k.g_exact(i);
                assert!(
                    (closed - exact).abs() < 1e-12 * exact.abs().max(1.0),
                    "n={n} i={i}"
                );
            }
        }
    }
}
