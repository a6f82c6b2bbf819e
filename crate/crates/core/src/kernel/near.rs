//! Closed-form kernel of the near-Toeplitz family (`a0 = 68`, `a1 = −40`,
//! `σ = 2`) — the clamped-beam system matrix.
//!
//! `B̃⁻¹` has the explicit form `β[ε + (j²−1)(2δ²+1)]`. No closed form for a
//! general `D̃⁻¹` entry is available, so entries are evaluated by the
//! three-segment summation in `O(1)` per entry via `γ`-moment prefix closed
//! forms; row `n` additionally has the explicit `μ(ν₃j³ + ν₂j² + ν₁j + ν₀γ_j)`
//! form used by the Schur and `π₂` expressions.

use crate::matrix::SystemSpec;
use crate::seq::GammaRatios;

use super::segsum::{self, poly_compose_affine, poly_mul, BInvCubic, Poly3};
use super::{FamilyKernel, SchurMatrix};

/// Coefficient bundle of the near-family closed forms at `(i, j)`:
/// `(δ, β, ε)` drive the `B̃⁻¹` entry, `(μ, ν₀..ν₃)` drive the row-`n`
/// `D̃⁻¹` entry.
///
/// The raw `ν` values carry `γ_n`, `γ_{n+1}` factors and overflow `f64` past
/// `n ≈ 340`; they are inspection values. The kernel itself only ever
/// evaluates the `γ`-ratio-scaled combinations.
#[derive(Debug, Clone, Copy)]
pub struct NearKernelCoefficients {
    pub delta: i64,
    pub beta: f64,
    pub epsilon: f64,
    pub mu: f64,
    pub nu0: f64,
    pub nu1: f64,
    pub nu2: f64,
    pub nu3: f64,
}

impl NearKernelCoefficients {
    pub fn for_entry(n: usize, i: usize, j: usize) -> Self {
        let (i, j) = if i < j { (j, i) } else { (i, j) };
        let delta = (n + 1 - i) as i64;
        let nf = n as f64;
        let beta =
            (delta as f64) * j as f64 / (6.0 * (nf + 1.0) * (nf * nf + 2.0 * nf + 3.0));
        let epsilon =
            3.0 * (1.0 + delta as f64 * (nf + 1.0)) * (1.0 + (i as f64 - j as f64) * j as f64);

        let mut g_n = 0.0f64; // γ_n
        let mut g_n1 = 1.0f64; // γ_{n+1}
        for _ in 1..=n {
            let next = 8.0 * g_n1 - g_n;
            g_n = g_n1;
            g_n1 = next;
        }
        let mu = 1.0 / (36.0 * g_n1 * (nf + 1.0) * (nf * nf + 2.0 * nf + 3.0));
        let nu0 = nf * nf * nf + 3.0 * nf * nf + 5.0 * nf + 3.0;
        let nu1 = 2.0 * (2.0 * nf + 1.0) * g_n1
            - (nf + 1.0) * g_n
            - (nf * nf * nf + 3.0 * nf * nf + 4.0 * nf + 2.0);
        let nu2 = (4.0 * nf * nf + 5.0 * nf - 3.0) * g_n1 - nf * (nf + 2.0) * g_n
            + 2.0 * nf * nf
            + 4.0 * nf
            + 3.0;
        let nu3 = -2.0 * (2.0 * nf + 1.0) * g_n1 + (nf + 1.0) * g_n - (nf + 1.0);
        Self {
            delta,
            beta,
            epsilon,
            mu,
            nu0,
            nu1,
            nu2,
            nu3,
        }
    }
}

pub struct NearToeplitzKernel {
    spec: SystemSpec,
    ratios: GammaRatios,
}

impl NearToeplitzKernel {
    pub fn new(spec: SystemSpec) -> Self {
        debug_assert_eq!(spec.variant, crate::matrix::Variant::NearToeplitz);
        Self {
            spec,
            ratios: GammaRatios::new(spec.n),
        }
    }

    /// Explicit row-`n` entry `d̃⁻¹_{nj} = μ(ν₃j³ + ν₂j² + ν₁j + ν₀γ_j)`,
    /// evaluated with every `ν` pre-divided by `γ_{n+1}` so nothing overflows.
    pub fn d_inv_row_n(&self, j: usize) -> f64 {
        let n = self.spec.n;
        let nf = n as f64;
        let rt = &self.ratios;
        let scale = 1.0 / (36.0 * (nf + 1.0) * (nf * nf + 2.0 * nf + 3.0));
        let rn = rt.ratio(n);
        let r1 = rt.ratio(1); // 1/γ_{n+1}
        let nu3 = -2.0 * (2.0 * nf + 1.0) + (nf + 1.0) * rn - (nf + 1.0) * r1;
        let nu2 = (4.0 * nf * nf + 5.0 * nf - 3.0) - nf * (nf + 2.0) * rn
            + (2.0 * nf * nf + 4.0 * nf + 3.0) * r1;
        let nu1 = 2.0 * (2.0 * nf + 1.0)
            - (nf + 1.0) * rn
            - (nf * nf * nf + 3.0 * nf * nf + 4.0 * nf + 2.0) * r1;
        let nu0 = nf * nf * nf + 3.0 * nf * nf + 5.0 * nf + 3.0;
        let jf = j as f64;
        scale * (nu3 * jf * jf * jf + nu2 * jf * jf + nu1 * jf + nu0 * rt.ratio(j))
    }
}

impl BInvCubic for NearToeplitzKernel {
    fn n(&self) -> usize {
        self.spec.n
    }

    fn denom(&self) -> f64 {
        let nf = self.spec.n as f64;
        6.0 * (nf + 1.0) * (nf * nf + 2.0 * nf + 3.0)
    }

    fn row_poly(&self, r: usize) -> Poly3 {
        let (n, r) = (self.spec.n as i128, r as i128);
        let d = n + 1 - r;
        let e = 3 * (1 + d * (n + 1));
        let f = 2 * d * d + 1;
        poly_mul([0, d, 0, 0], [e - f, e * r, f - e, 0])
    }

    fn col_poly(&self, c: usize) -> Poly3 {
        let (n, c) = (self.spec.n as i128, c as i128);
        // in terms of δ = n+1−k:  c·δ·[3(1+(n+1)δ)(1+(n+1−c)c − cδ) + (c²−1)(2δ²+1)]
        let a = 1 + (n + 1 - c) * c;
        let inner_d = [
            3 * a + (c * c - 1),
            3 * ((n + 1) * a - c),
            -3 * c * (n + 1) + 2 * (c * c - 1),
            0,
        ];
        let in_d = poly_mul([0, c, 0, 0], inner_d);
        poly_compose_affine(in_d, n + 1, -1)
    }

    fn flip_col_poly(&self, c: usize) -> Poly3 {
        let (n, c) = (self.spec.n as i128, c as i128);
        // row n+1−k has δ = k
        let a = 1 + (n + 1 - c) * c;
        let inner = [
            3 * a + (c * c - 1),
            3 * ((n + 1) * a - c),
            -3 * c * (n + 1) + 2 * (c * c - 1),
            0,
        ];
        poly_mul([0, c, 0, 0], inner)
    }
}

impl FamilyKernel for NearToeplitzKernel {
    fn spec(&self) -> SystemSpec {
        self.spec
    }

    fn ratios(&self) -> &GammaRatios {
        &self.ratios
    }

    fn b_inv(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i < j { (j, i) } else { (i, j) };
        let (n, i, j) = (self.spec.n as i128, i as i128, j as i128);
        let d = n + 1 - i;
        let num =
            d * j * (3 * (1 + d * (n + 1)) * (1 + (i - j) * j) + (j * j - 1) * (2 * d * d + 1));
        num as f64 / <Self as BInvCubic>::denom(self)
    }

    fn d_inv(&self, i: usize, j: usize) -> f64 {
        segsum::d_inv_segments(&self.ratios, self, i, j)
    }

    fn schur(&self) -> SchurMatrix {
        let n = self.spec.n;
        let nf = n as f64;
        let rt = &self.ratios;
        let den = 9.0 * (nf + 1.0) * (nf * nf + 2.0 * nf + 3.0);
        let rn = rt.ratio(n);
        let r1 = rt.ratio(1);
        let m11 = 1.0
            + (3.0 * (nf * nf * nf + 3.0 * nf * nf + nf + 1.0)
                - 3.0 * (nf * nf * nf + 3.0 * nf * nf + 4.0 * nf + 2.0) * rn
                - 3.0 * (nf + 1.0) * r1)
                / den;
        let m12 = (6.0 * (2.0 * nf + 1.0)
            - 3.0 * (nf + 1.0) * rn
            - 3.0 * (nf + 1.0) * ((nf + 1.0) * (nf + 1.0) + 1.0) * r1)
            / den;
        SchurMatrix { m11, m12 }
    }

    fn d_row_n_sum_closed(&self) -> f64 {
        // Exact reduction of κ(ν₃ Σj³ + ν₂ Σj² + ν₁ Σj + ν₀ Σγ_j):
        //   [2(2n² + n + 1) γ_{n+1} − (n² + 2n + 2)(γ_n + 1)] / (432 γ_{n+1})
        let n = self.spec.n;
        let nf = n as f64;
        let rt = &self.ratios;
        (2.0 * (2.0 * nf * nf + nf + 1.0)
            - (nf * nf + 2.0 * nf + 2.0) * (rt.ratio(n) + rt.ratio(1)))
            / 432.0
    }

    fn b_inv_row_sums(&self) -> Vec<f64> {
        segsum::b_inv_row_sums(self)
    }

    fn g_closed(&self, x: f64) -> f64 {
        let nf = self.spec.n as f64;
        let rt = &self.ratios;
        4.0 / 3.0 * rt.pair_real(x, nf + 1.0 - x) - rt.pair_real(x, nf - x) / 6.0
            - rt.pair_real(x - 1.0, nf + 1.0 - x) / 6.0
            - (rt.ratio_real(x) + rt.ratio_real(nf + 1.0 - x)) / 6.0
    }

    fn pi3_bound(&self) -> f64 {
        31.0 / (48.0 * 15f64.sqrt())
    }

    fn b_inv_norm_bound(&self) -> f64 {
        let s = (self.spec.n as f64 + 1.0) * (self.spec.n as f64 + 1.0);
        s * (s + 8.0) / 384.0
    }

    fn norm_bound(&self) -> f64 {
        let s = (self.spec.n as f64 + 1.0) * (self.spec.n as f64 + 1.0);
        s * (s + 14.0) / 2304.0
    }
}
