//! Segmented-sum evaluation of `D⁻¹ = C⁻¹B⁻¹` entries.
//!
//! For a fixed row or column, the closed-form `B⁻¹` entries of both families
//! are cubic polynomials in the running index. Each of the three segments of
//! `d⁻¹_{ij} = Σ_k c⁻¹_{ik} b⁻¹_{kj}` therefore reduces to weighted
//! `γ`-moment sums `Σ k^m γ_k`, which have closed forms in `γ_{p+1}`, `γ_p`.
//! Every `γ` product is evaluated against `γ_{n+1}` through [`GammaRatios`],
//! so nothing overflows; polynomial coefficients are assembled exactly in
//! `i128` and rounded once.

use crate::seq::{r2, GammaRatios};

/// Cubic polynomial `c[0] + c[1]k + c[2]k² + c[3]k³` with exact coefficients.
pub(crate) type Poly3 = [i128; 4];

/// Product of two polynomials whose degrees sum to at most 3.
pub(crate) fn poly_mul(p: Poly3, q: Poly3) -> Poly3 {
    let mut out = [0i128; 4];
    for (a, &pa) in p.iter().enumerate() {
        if pa == 0 {
            continue;
        }
        for (b, &qb) in q.iter().enumerate() {
            if qb == 0 {
                continue;
            }
            debug_assert!(a + b < 4, "polynomial product exceeds degree 3");
            out[a + b] += pa * qb;
        }
    }
    out
}

/// Substitute `k → a + b·k` into the polynomial.
pub(crate) fn poly_compose_affine(p: Poly3, a: i128, b: i128) -> Poly3 {
    // (a + b k)^m expansions for m = 0..3
    let pows = [
        [1, 0, 0, 0],
        [a, b, 0, 0],
        [a * a, 2 * a * b, b * b, 0],
        [a * a * a, 3 * a * a * b, 3 * a * b * b, b * b * b],
    ];
    let mut out = [0i128; 4];
    for (m, &coef) in p.iter().enumerate() {
        if coef == 0 {
            continue;
        }
        for t in 0..4 {
            out[t] += coef * pows[m][t];
        }
    }
    out
}

/// `Σ_{j=1}^p j^m` for `m ∈ {0..3}`, exact.
pub(crate) fn power_prefix(p: i128, m: usize) -> i128 {
    match m {
        0 => p,
        1 => p * (p + 1) / 2,
        2 => p * (p + 1) * (2 * p + 1) / 6,
        3 => {
            let t = p * (p + 1) / 2;
            t * t
        }
        _ => unreachable!(),
    }
}

/// Closed-form coefficients of `Σ_{k=1}^p k^m γ_k = (A γ_{p+1} + B γ_p + C)/d`.
fn moment_coefficients(p: i128, m: usize) -> (i128, i128, i128, f64) {
    match m {
        0 => (1, -1, -1, 6.0),
        1 => (p, -(p + 1), 0, 6.0),
        2 => (3 * p * p + 1, -(3 * p * p + 6 * p + 4), -1, 18.0),
        3 => {
            let p3 = p * p * p;
            (p3 + p, -(p3 + 3 * p * p + 4 * p + 2), 0, 6.0)
        }
        _ => unreachable!(),
    }
}

/// `(γ_a/γ_{n+1}) Σ_{k=1}^p k^m γ_k` via the closed form (exactly 0 at `p = 0`).
#[inline]
fn weighted_moment(rt: &GammaRatios, a: usize, p: usize, m: usize) -> f64 {
    let (ca, cb, cc, d) = moment_coefficients(p as i128, m);
    (ca as f64 * rt.pair(a, p + 1) + cb as f64 * rt.pair(a, p) + cc as f64 * rt.ratio(a)) / d
}

/// Per-family access to `B⁻¹` as cubic polynomials of the running index.
/// All polynomials are numerators over the family's common [`denom`](Self::denom).
pub(crate) trait BInvCubic {
    fn n(&self) -> usize;
    /// Common denominator of the closed-form entries.
    fn denom(&self) -> f64;
    /// `k ↦ denom · b⁻¹_{r,k}` valid for `k ≤ r`.
    fn row_poly(&self, r: usize) -> Poly3;
    /// `k ↦ denom · b⁻¹_{k,c}` valid for `k ≥ c`.
    fn col_poly(&self, c: usize) -> Poly3;
    /// `k ↦ denom · b⁻¹_{n+1−k,c}` valid for `1 ≤ k ≤ n+1−c`.
    fn flip_col_poly(&self, c: usize) -> Poly3;
}

/// `d⁻¹_{ij}` by the three-segment sum, `O(1)` per entry after `O(n)` setup.
pub(crate) fn d_inv_segments<B: BInvCubic + ?Sized>(
    rt: &GammaRatios,
    bp: &B,
    i: usize,
    j: usize,
) -> f64 {
    let n = bp.n();
    // D⁻¹ is centrosymmetric (not symmetric): map the upper triangle down.
    let (i, j) = if i < j { (n + 1 - i, n + 1 - j) } else { (i, j) };
    let rp = bp.row_poly(j);
    let cp = bp.col_poly(j);
    let fp = bp.flip_col_poly(j);
    let a1 = n + 1 - i;
    let mut s = 0.0;
    for m in 0..4 {
        if rp[m] != 0 {
            s += rp[m] as f64 * weighted_moment(rt, a1, j, m);
        }
        if cp[m] != 0 {
            s += cp[m] as f64 * (weighted_moment(rt, a1, i, m) - weighted_moment(rt, a1, j, m));
        }
        if fp[m] != 0 {
            s += fp[m] as f64 * weighted_moment(rt, i, n - i, m);
        }
    }
    s / bp.denom()
}

/// Exact row sums of `B⁻¹` (index 0 ↦ row 1), each assembled in `i128`.
pub(crate) fn b_inv_row_sums<B: BInvCubic + ?Sized>(bp: &B) -> Vec<f64> {
    let n = bp.n();
    let denom = bp.denom();
    (1..=n)
        .map(|k| {
            let rp = bp.row_poly(k);
            let cp = bp.col_poly(k);
            let mut total = 0i128;
            for m in 0..4 {
                if rp[m] != 0 {
                    total += rp[m] * power_prefix(k as i128, m);
                }
                if cp[m] != 0 {
                    total += cp[m] * (power_prefix(n as i128, m) - power_prefix(k as i128, m));
                }
            }
            total as f64 / denom
        })
        .collect()
}

/// Row sums of `D⁻¹ = C⁻¹B⁻¹` for all rows in `O(n)` total (index 0 ↦ row 1).
///
/// Applies the explicit `C⁻¹` entries to the exact `B⁻¹` row sums through two
/// scaled prefix recurrences; all accumulated terms are positive.
pub(crate) fn d_inv_row_sums(rt: &GammaRatios, w: &[f64]) -> Vec<f64> {
    let n = w.len();
    let r2 = r2();
    // t[i] = Σ_{k=1}^i r2^{i−k} (1 − q^k) w_k
    let mut t = vec![0.0; n + 1];
    for i in 1..=n {
        t[i] = r2 * t[i - 1] + rt.one_minus_q(i) * w[i - 1];
    }
    // u[s] = Σ_{k=1}^s r2^{s−k} (1 − q^k) w_{n+1−k}
    let mut u = vec![0.0; n + 1];
    for s in 1..=n {
        u[s] = r2 * u[s - 1] + rt.one_minus_q(s) * w[n - s];
    }
    let scale = rt.scale();
    (1..=n)
        .map(|i| scale * (rt.one_minus_q(n + 1 - i) * t[i] + r2 * rt.one_minus_q(i) * u[n - i]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_helpers() {
        let p = [1, 2, 0, 0]; // 1 + 2k
        let q = [0, 0, 1, 0]; // k²
        assert_eq!(poly_mul(p, q), [0, 0, 1, 2]);
        // substitute k → 5 − k into (1 + 2k): 11 − 2k
        assert_eq!(poly_compose_affine(p, 5, -1), [11, -2, 0, 0]);
        // cubic composition sanity: (k³) at k → 2 + k
        assert_eq!(poly_compose_affine([0, 0, 0, 1], 2, 1), [8, 12, 6, 1]);
    }

    #[test]
    fn power_prefix_values() {
        assert_eq!(power_prefix(4, 0), 4);
        assert_eq!(power_prefix(4, 1), 10);
        assert_eq!(power_prefix(4, 2), 30);
        assert_eq!(power_prefix(4, 3), 100);
    }

    #[test]
    fn weighted_moment_matches_direct() {
        let n = 40;
        let rt = GammaRatios::new(n);
        let table = crate::seq::GammaTable::new(n + 2);
        use num_traits::ToPrimitive;
        let g = |k: usize| table.gamma(k).unwrap().to_f64().unwrap();
        for m in 0..4 {
            for p in [0usize, 1, 5, 17, n] {
                for a in [1usize, 9, n] {
                    let direct: f64 =
                        (1..=p).map(|k| (k as f64).powi(m as i32) * g(k)).sum::<f64>() * g(a)
                            / g(n + 1);
                    let got = weighted_moment(&rt, a, p, m);
                    let denom = direct.abs().max(1e-300);
                    assert!(
                        (got - direct).abs() / denom < 1e-11,
                        "m={m} p={p} a={a}: {got} vs {direct}"
                    );
                }
            }
        }
    }
}
