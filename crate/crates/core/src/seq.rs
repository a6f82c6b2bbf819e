//! Exact and floating-point evaluation of the integer sequences `γ_k`, `α_k`
//! attached to the roots `r1 = 4 + √15`, `r2 = 4 − √15` of `x² − 8x + 1`.
//!
//! `γ_k = (r1^k − r2^k)/(2√15)` satisfies `γ_k = 8γ_{k−1} − γ_{k−2}` with
//! `γ_0 = 0`, `γ_1 = 1`; `α_k = 4γ_k − γ_{k−1}` with `α_0 = 1`. Every inverse
//! entry of the matrix families is an expression in ratios of these numbers.
//!
//! `γ_k` grows like `7.873^k` and leaves `f64` range near `k ≈ 350`, so all
//! floating-point consumers work with ratios `γ_a/γ_b` and scaled pairs
//! `γ_a γ_b / γ_{n+1}`; the exact integer path ([`GammaTable`]) exists for
//! validation and is capped only by memory.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `r1 = 4 + √15`, the dominant root.
#[inline]
pub fn r1() -> f64 {
    4.0 + 15f64.sqrt()
}

/// `r2 = 4 − √15 = 1/r1`, computed as a reciprocal to avoid the cancellation
/// in the direct subtraction.
#[inline]
pub fn r2() -> f64 {
    1.0 / r1()
}

#[inline]
fn two_sqrt15() -> f64 {
    2.0 * 15f64.sqrt()
}

/// Exact integer table of `γ_k`, `α_k` and the prefix moment sums
/// `Σ_{k=1}^p k^m γ_k` for `m ∈ {0,1,2,3}`.
///
/// Immutable after construction; all reads are pure.
#[derive(Debug, Clone)]
pub struct GammaTable {
    max_index: usize,
    gamma: Vec<BigInt>,
    alpha: Vec<BigInt>,
    moment_prefix: [Vec<BigInt>; 4],
}

impl GammaTable {
    /// Build the table for indices `0..=max_index`.
    pub fn new(max_index: usize) -> Self {
        let len = max_index + 1;
        let mut gamma = Vec::with_capacity(len);
        gamma.push(BigInt::from(0));
        if max_index >= 1 {
            gamma.push(BigInt::from(1));
        }
        for k in 2..len {
            let next = 8 * &gamma[k - 1] - &gamma[k - 2];
            gamma.push(next);
        }

        let mut alpha = Vec::with_capacity(len);
        alpha.push(BigInt::from(1));
        for k in 1..len {
            alpha.push(4 * &gamma[k] - &gamma[k - 1]);
        }

        let mut moment_prefix: [Vec<BigInt>; 4] = Default::default();
        for (m, prefix) in moment_prefix.iter_mut().enumerate() {
            prefix.reserve(len);
            prefix.push(BigInt::from(0));
            for p in 1..len {
                let term = BigInt::from(p).pow(m as u32) * &gamma[p];
                let sum = &prefix[p - 1] + term;
                prefix.push(sum);
            }
        }

        Self {
            max_index,
            gamma,
            alpha,
            moment_prefix,
        }
    }

    pub fn max_index(&self) -> usize {
        self.max_index
    }

    /// `γ_k`, computed by the integer recurrence (never by floating powers).
    pub fn gamma(&self, k: usize) -> Result<&BigInt> {
        self.gamma.get(k).ok_or(Error::IndexOutOfRange {
            name: "k",
            value: k,
            max: self.max_index,
        })
    }

    /// `α_k = 4γ_k − γ_{k−1}` (`α_0 = 1`).
    pub fn alpha(&self, k: usize) -> Result<&BigInt> {
        self.alpha.get(k).ok_or(Error::IndexOutOfRange {
            name: "k",
            value: k,
            max: self.max_index,
        })
    }

    /// Direct prefix sum `Σ_{k=1}^p k^m γ_k`.
    pub fn moment_prefix(&self, p: usize, m: usize) -> Result<&BigInt> {
        if m > 3 {
            return Err(Error::IndexOutOfRange {
                name: "m",
                value: m,
                max: 3,
            });
        }
        self.moment_prefix[m]
            .get(p)
            .ok_or(Error::IndexOutOfRange {
                name: "p",
                value: p,
                max: self.max_index,
            })
    }

    /// `Σ_{k=1}^p k^m γ_k` by the closed form in `γ_{p+1}`, `γ_p`.
    ///
    /// The division in the closed form is exact; the result is checked against
    /// the stored direct prefix sum and the two must agree exactly.
    pub fn gamma_moment_sum(&self, p: usize, m: usize) -> Result<BigInt> {
        if m > 3 {
            return Err(Error::IndexOutOfRange {
                name: "m",
                value: m,
                max: 3,
            });
        }
        if p < 1 || p + 1 > self.max_index {
            return Err(Error::IndexOutOfRange {
                name: "p",
                value: p,
                max: self.max_index.saturating_sub(1),
            });
        }
        let gp1 = &self.gamma[p + 1];
        let gp = &self.gamma[p];
        let pb = BigInt::from(p);
        let (numerator, denom): (BigInt, u32) = match m {
            0 => (gp1 - gp - 1, 6),
            1 => (&pb * gp1 - (&pb + 1) * gp, 6),
            2 => {
                let p2 = &pb * &pb;
                ((3 * &p2 + 1) * gp1 - (3 * &p2 + 6 * &pb + 4) * gp - 1, 18)
            }
            3 => {
                let p2 = &pb * &pb;
                let p3 = &p2 * &pb;
                ((&p3 + &pb) * gp1 - (&p3 + 3 * &p2 + 4 * &pb + 2) * gp, 6)
            }
            _ => unreachable!(),
        };
        let (q, r) = numerator.div_rem(&BigInt::from(denom));
        debug_assert!(r.is_zero(), "moment closed form division must be exact");
        if !r.is_zero() {
            return Err(Error::InvalidArgument(format!(
                "inexact division in moment closed form (p = {p}, m = {m})"
            )));
        }
        debug_assert_eq!(&q, &self.moment_prefix[m][p]);
        Ok(q)
    }

    /// `γ_k` as `f64` (infinite beyond `k ≈ 350`).
    pub fn gamma_f64(&self, k: usize) -> Result<f64> {
        Ok(self.gamma(k)?.to_f64().unwrap_or(f64::INFINITY))
    }

    /// Exact quotient `γ_a/γ_b` rounded to `f64`, for cross-checking the
    /// overflow-free evaluation. Requires both values to fit in `f64`.
    pub fn exact_ratio_f64(&self, a: usize, b: usize) -> Result<f64> {
        let ga = self.gamma(a)?.to_f64().unwrap_or(f64::INFINITY);
        let gb = self.gamma(b)?.to_f64().unwrap_or(f64::INFINITY);
        Ok(ga / gb)
    }
}

/// `γ_a/γ_b` in overflow-free form `r1^(a−b) (1 − r2^{2a})/(1 − r2^{2b})`.
///
/// Valid for any `a ≥ 0`, `b ≥ 1`; returns exactly 0 when `a = 0`.
pub fn gamma_ratio(a: usize, b: usize) -> Result<f64> {
    if b == 0 {
        return Err(Error::IndexOutOfRange {
            name: "b",
            value: 0,
            max: usize::MAX,
        });
    }
    let q = r2() * r2();
    let num = 1.0 - pow_saturating(q, a);
    let den = 1.0 - pow_saturating(q, b);
    let scale = if a >= b {
        pow_saturating(r1(), a - b)
    } else {
        pow_saturating(r2(), b - a)
    };
    Ok(scale * num / den)
}

#[inline]
fn pow_saturating(base: f64, exp: usize) -> f64 {
    base.powi(i32::try_from(exp).unwrap_or(i32::MAX))
}

/// Precomputed scaled-ratio tables for a fixed dimension `n`.
///
/// Everything is normalized against `γ_{n+1}`: [`ratio`](Self::ratio) gives
/// `γ_a/γ_{n+1}` and [`pair`](Self::pair) gives `γ_a γ_b/γ_{n+1}`, both as
/// table lookups plus a few multiplications. All quantities stay `O(r1)`
/// whenever `a + b ≤ n + 2`, which every consumer formula guarantees.
#[derive(Debug, Clone)]
pub struct GammaRatios {
    n: usize,
    /// `q^k = r2^{2k}`
    q_pow: Vec<f64>,
    /// `r2^k`
    r2_pow: Vec<f64>,
    /// `1 / (2√15 (1 − q^{n+1}))`
    scale: f64,
}

impl GammaRatios {
    pub fn new(n: usize) -> Self {
        let top = n + 3;
        let r2 = r2();
        let q = r2 * r2;
        let q_pow: Vec<f64> = (0..top).map(|k| pow_saturating(q, k)).collect();
        let r2_pow: Vec<f64> = (0..top).map(|k| pow_saturating(r2, k)).collect();
        let scale = 1.0 / (two_sqrt15() * (1.0 - q_pow[n + 1]));
        Self {
            n,
            q_pow,
            r2_pow,
            scale,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `γ_a / γ_{n+1}` for integer `a ≤ n + 2`.
    #[inline]
    pub fn ratio(&self, a: usize) -> f64 {
        let e = self.n as i64 + 1 - a as i64;
        let p = if e >= 0 {
            self.r2_pow[e as usize]
        } else {
            r1().powi(-e as i32)
        };
        p * (1.0 - self.q_pow[a]) / (1.0 - self.q_pow[self.n + 1])
    }

    /// `γ_a γ_b / γ_{n+1}` for integer `a, b ≤ n + 2`.
    #[inline]
    pub fn pair(&self, a: usize, b: usize) -> f64 {
        let e = self.n as i64 + 1 - a as i64 - b as i64;
        let p = if e >= 0 {
            self.r2_pow[e as usize]
        } else {
            r1().powi(-e as i32)
        };
        p * (1.0 - self.q_pow[a]) * (1.0 - self.q_pow[b]) * self.scale
    }

    /// `1 − q^k` (internal building block for scaled prefix recurrences).
    #[inline]
    pub(crate) fn one_minus_q(&self, k: usize) -> f64 {
        1.0 - self.q_pow[k]
    }

    /// `1 / (2√15 (1 − q^{n+1}))`.
    #[inline]
    pub(crate) fn scale(&self) -> f64 {
        self.scale
    }

    /// Continuous extension `γ_x / γ_{n+1}` for real `x ≥ 0` (used at the
    /// half-integer row-sum maximizer when `n` is even).
    pub fn ratio_real(&self, x: f64) -> f64 {
        let r2 = r2();
        let e = self.n as f64 + 1.0 - x;
        r2.powf(e) * (1.0 - r2.powf(2.0 * x)) / (1.0 - self.q_pow[self.n + 1])
    }

    /// Continuous extension `γ_a γ_b / γ_{n+1}` for real `a, b ≥ 0`.
    pub fn pair_real(&self, a: f64, b: f64) -> f64 {
        let r2 = r2();
        let e = self.n as f64 + 1.0 - a - b;
        r2.powf(e) * (1.0 - r2.powf(2.0 * a)) * (1.0 - r2.powf(2.0 * b)) * self.scale
    }
}

/// Signum of a [`BigInt`] as `i8`.
pub(crate) fn bigint_sign(v: &BigInt) -> i8 {
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_values() {
        let t = GammaTable::new(10);
        assert_eq!(t.gamma(0).unwrap(), &BigInt::from(0));
        assert_eq!(t.gamma(1).unwrap(), &BigInt::from(1));
        assert_eq!(t.gamma(5).unwrap(), &BigInt::from(3905));
        assert_eq!(t.gamma(7).unwrap(), &BigInt::from(242047));
        assert_eq!(t.gamma(8).unwrap(), &BigInt::from(1905632));
        assert!(t.gamma(11).is_err());
    }

    #[test]
    fn alpha_values() {
        let t = GammaTable::new(10);
        assert_eq!(t.alpha(0).unwrap(), &BigInt::from(1));
        assert_eq!(t.alpha(1).unwrap(), &BigInt::from(4));
        assert_eq!(t.alpha(4).unwrap(), &BigInt::from(1921));
        assert!(t.alpha(11).is_err());
    }

    #[test]
    fn recurrence_identities_hold_exactly() {
        let t = GammaTable::new(200);
        for k in 2..=200usize {
            let lhs = t.gamma(k).unwrap() + t.gamma(k - 2).unwrap();
            assert_eq!(lhs, 8 * t.gamma(k - 1).unwrap());
            let ad = t.alpha(k).unwrap() - t.alpha(k - 2).unwrap();
            assert_eq!(ad, 30 * t.gamma(k - 1).unwrap());
        }
        for k in 1..=200usize {
            // 4 ≤ γ_{k+1}/γ_k ≤ 8 as integer inequalities
            if k + 1 <= 200 {
                let g = t.gamma(k).unwrap();
                let g1 = t.gamma(k + 1).unwrap();
                assert!(g1 >= &(4 * g) && g1 <= &(8 * g));
            }
            assert_eq!(
                t.alpha(k).unwrap(),
                &(4 * t.alpha(k - 1).unwrap() + 15 * t.gamma(k - 1).unwrap())
            );
        }
    }

    #[test]
    fn moment_sums_match_direct_prefix() {
        let t = GammaTable::new(201);
        assert_eq!(t.gamma_moment_sum(3, 0).unwrap(), BigInt::from(72));
        assert_eq!(t.gamma_moment_sum(3, 1).unwrap(), BigInt::from(206));
        assert_eq!(t.gamma_moment_sum(3, 2).unwrap(), BigInt::from(600));
        assert_eq!(t.gamma_moment_sum(3, 3).unwrap(), BigInt::from(1766));
        for p in 1..=200 {
            for m in 0..4 {
                assert_eq!(
                    &t.gamma_moment_sum(p, m).unwrap(),
                    t.moment_prefix(p, m).unwrap()
                );
            }
        }
        assert!(t.gamma_moment_sum(0, 0).is_err());
        assert!(t.gamma_moment_sum(201, 0).is_err());
        assert!(t.gamma_moment_sum(5, 4).is_err());
    }

    #[test]
    fn ratio_edge_cases() {
        assert_eq!(gamma_ratio(0, 5).unwrap(), 0.0);
        assert_eq!(gamma_ratio(7, 7).unwrap(), 1.0);
        assert!(gamma_ratio(1, 0).is_err());
        let v = gamma_ratio(7, 8).unwrap();
        let exact = 242047.0 / 1905632.0;
        assert!((v - exact).abs() <= 1e-15 * exact);
    }

    #[test]
    fn ratio_matches_exact_quotient_up_to_300() {
        let t = GammaTable::new(300);
        for b in 1..=300usize {
            for a in (0..=b).step_by(7) {
                let approx = gamma_ratio(a, b).unwrap();
                let exact = t.exact_ratio_f64(a, b).unwrap();
                let denom = exact.abs().max(1e-300);
                assert!(
                    (approx - exact).abs() / denom <= 1e-13,
                    "a={a} b={b}: {approx} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn consecutive_ratio_monotone_toward_r1() {
        let mut prev = 8.0; // γ_2/γ_1
        for k in 1..60usize {
            let q = gamma_ratio(k + 1, k).unwrap();
            assert!((4.0..=8.0).contains(&q));
            assert!(q <= prev + 1e-12);
            prev = q;
        }
        assert!((prev - r1()).abs() < 1e-12);
    }

    #[test]
    fn scaled_tables_match_free_ratio() {
        let n = 57;
        let rt = GammaRatios::new(n);
        for a in 0..=n + 1 {
            let want = gamma_ratio(a, n + 1).unwrap();
            assert!((rt.ratio(a) - want).abs() <= 1e-14 * want.max(1e-300));
        }
        // pair(a, b) * γ_{n+1} = γ_a γ_b: check against exact integers
        let t = GammaTable::new(n + 2);
        for (a, b) in [(1, 1), (3, 10), (20, 38), (n, 2), (n + 1, 1)] {
            let exact = (t.gamma(a).unwrap() * t.gamma(b).unwrap()).to_f64().unwrap()
                / t.gamma(n + 1).unwrap().to_f64().unwrap();
            let got = rt.pair(a, b);
            assert!(
                (got - exact).abs() <= 1e-12 * exact.abs().max(1e-300),
                "pair({a},{b})"
            );
        }
        // real extension agrees at integer arguments
        assert!((rt.ratio_real(13.0) - rt.ratio(13)).abs() < 1e-14);
        assert!((rt.pair_real(5.0, 9.0) - rt.pair(5, 9)).abs() < 1e-14);
    }
}
