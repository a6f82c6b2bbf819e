//! Construction and banded storage of the matrix families.
//!
//! Five matrices appear throughout: the seven-diagonal `A_n` (interior
//! stencil `(−1, 12, −39, 56, −39, 12, −1)`, corners set by the variant), the
//! pentadiagonal factor `B_n` (stencil `(1, −4, 6, −4, 1)`, corner 6 or 7),
//! the tridiagonal factor `C_n` (`(−1, 8, −1)`), and the rank-2 update
//! `σ U Vᵀ` closing the exact decomposition `A = B·C + σ U Vᵀ`.
//!
//! All entries are integers and are stored as such; conversion to `f64`
//! happens at the arithmetic boundary, so decomposition checks can be run in
//! exact integer arithmetic.

use crate::error::{Error, Result};

/// The two matrix families with closed-form inverses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// `a0 = 56`, `a1 = −39`, `σ = 1`, `B` corner 6.
    Toeplitz,
    /// `a0 = 68`, `a1 = −40`, `σ = 2`, `B` corner 7. This is the clamped-beam
    /// system matrix.
    NearToeplitz,
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::Toeplitz, Variant::NearToeplitz];

    /// Registry / CLI name.
    pub fn name(self) -> &'static str {
        match self {
            Variant::Toeplitz => "toeplitz",
            Variant::NearToeplitz => "near",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "toeplitz" => Ok(Variant::Toeplitz),
            "near" | "near-toeplitz" | "neartoeplitz" => Ok(Variant::NearToeplitz),
            other => Err(Error::UnknownVariant(other.to_string())),
        }
    }

    /// Corner diagonal value `a0` of `A`.
    pub fn corner_a0(self) -> i64 {
        match self {
            Variant::Toeplitz => 56,
            Variant::NearToeplitz => 68,
        }
    }

    /// Corner off-diagonal value `a1` of `A`.
    pub fn corner_a1(self) -> i64 {
        match self {
            Variant::Toeplitz => -39,
            Variant::NearToeplitz => -40,
        }
    }

    /// Rank-2 update weight `σ`.
    pub fn sigma(self) -> i64 {
        match self {
            Variant::Toeplitz => 1,
            Variant::NearToeplitz => 2,
        }
    }

    /// Corner value of the pentadiagonal factor `B`.
    pub fn b_corner(self) -> i64 {
        match self {
            Variant::Toeplitz => 6,
            Variant::NearToeplitz => 7,
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Descriptor of one concrete system: family variant plus dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SystemSpec {
    pub variant: Variant,
    pub n: usize,
}

impl SystemSpec {
    /// Both families are defined for `n ≥ 7`.
    pub const MIN_DIMENSION: usize = 7;

    pub fn new(variant: Variant, n: usize) -> Result<Self> {
        if n < Self::MIN_DIMENSION {
            return Err(Error::DimensionTooSmall {
                n,
                min: Self::MIN_DIMENSION,
            });
        }
        Ok(Self { variant, n })
    }

    pub fn toeplitz(n: usize) -> Result<Self> {
        Self::new(Variant::Toeplitz, n)
    }

    pub fn near_toeplitz(n: usize) -> Result<Self> {
        Self::new(Variant::NearToeplitz, n)
    }
}

/// Symmetric banded matrix with integer entries, stored by diagonal offset.
///
/// `diagonals[d]` holds the entries of offset `d` (main diagonal is `d = 0`)
/// with `diagonals[d][k] = entry(k+1, k+1+d)`; offsets below the main
/// diagonal are implied by symmetry. Row/column indices in the public API are
/// 1-based, matching the closed-form inverse formulas this crate implements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandedMatrix {
    n: usize,
    half_bandwidth: usize,
    diagonals: Vec<Vec<i64>>,
}

impl BandedMatrix {
    fn from_diagonals(n: usize, diagonals: Vec<Vec<i64>>) -> Self {
        let half_bandwidth = diagonals.len() - 1;
        for (d, diag) in diagonals.iter().enumerate() {
            assert_eq!(diag.len(), n - d, "diagonal {d} has wrong length");
        }
        Self {
            n,
            half_bandwidth,
            diagonals,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_bandwidth(&self) -> usize {
        self.half_bandwidth
    }

    /// Stored diagonals, offsets `0..=half_bandwidth`.
    pub fn diagonals(&self) -> &[Vec<i64>] {
        &self.diagonals
    }

    /// Entry at 1-based `(i, j)`; zero outside the band.
    ///
    /// Panics when an index is outside `1..=n`.
    pub fn entry(&self, i: usize, j: usize) -> i64 {
        assert!(
            (1..=self.n).contains(&i) && (1..=self.n).contains(&j),
            "entry index ({i}, {j}) outside 1..={}",
            self.n
        );
        let d = i.abs_diff(j);
        if d > self.half_bandwidth {
            return 0;
        }
        self.diagonals[d][i.min(j) - 1]
    }

    /// Banded matrix–vector product in `O(n · bandwidth)`.
    pub fn multiply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let mut y = vec![0.0; self.n];
        for (d, diag) in self.diagonals.iter().enumerate() {
            if d == 0 {
                for (k, &v) in diag.iter().enumerate() {
                    y[k] += v as f64 * x[k];
                }
            } else {
                for (k, &v) in diag.iter().enumerate() {
                    y[k] += v as f64 * x[k + d];
                    y[k + d] += v as f64 * x[k];
                }
            }
        }
        Ok(y)
    }

    /// Maximum absolute row sum.
    pub fn infinity_norm(&self) -> f64 {
        (1..=self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.half_bandwidth).max(1);
                let hi = (i + self.half_bandwidth).min(self.n);
                (lo..=hi).map(|j| (self.entry(i, j) as f64).abs()).sum()
            })
            .fold(0.0, f64::max)
    }
}

/// Seven-diagonal system matrix `A_n` for the given variant.
pub fn build_a(spec: SystemSpec) -> BandedMatrix {
    let n = spec.n;
    let mut diagonals = vec![
        vec![56i64; n],
        vec![-39i64; n - 1],
        vec![12i64; n - 2],
        vec![-1i64; n - 3],
    ];
    diagonals[0][0] = spec.variant.corner_a0();
    diagonals[0][n - 1] = spec.variant.corner_a0();
    diagonals[1][0] = spec.variant.corner_a1();
    diagonals[1][n - 2] = spec.variant.corner_a1();
    BandedMatrix::from_diagonals(n, diagonals)
}

/// Pentadiagonal factor `B_n` (corners 6 for Toeplitz, 7 for near-Toeplitz).
pub fn build_b(spec: SystemSpec) -> BandedMatrix {
    let n = spec.n;
    let mut diagonals = vec![vec![6i64; n], vec![-4i64; n - 1], vec![1i64; n - 2]];
    diagonals[0][0] = spec.variant.b_corner();
    diagonals[0][n - 1] = spec.variant.b_corner();
    BandedMatrix::from_diagonals(n, diagonals)
}

/// Tridiagonal factor `C_n = tridiag(−1, 8, −1)`; defined for any `n ≥ 1`.
pub fn build_c(n: usize) -> Result<BandedMatrix> {
    if n == 0 {
        return Err(Error::DimensionTooSmall { n, min: 1 });
    }
    if n == 1 {
        return Ok(BandedMatrix::from_diagonals(1, vec![vec![8]]));
    }
    Ok(BandedMatrix::from_diagonals(
        n,
        vec![vec![8i64; n], vec![-1i64; n - 1]],
    ))
}

/// The sparse factors `(σ, U, V)` of the rank-2 correction `σ U Vᵀ`.
///
/// `U` has nonzeros `U_{1,1} = 4`, `U_{2,1} = −1`, `U_{n−1,2} = −1`,
/// `U_{n,2} = 4`; `V` has `V_{1,1} = 1`, `V_{n,2} = 1`.
#[derive(Debug, Clone, Copy)]
pub struct RankTwoFactors {
    pub sigma: i64,
    n: usize,
}

impl RankTwoFactors {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `U` entry at 1-based `(i, col)`, `col ∈ {1, 2}`.
    pub fn u_entry(&self, i: usize, col: usize) -> i64 {
        match (i, col) {
            (1, 1) => 4,
            (2, 1) => -1,
            (i, 2) if i == self.n - 1 => -1,
            (i, 2) if i == self.n => 4,
            _ => 0,
        }
    }

    /// `V` entry at 1-based `(i, col)`, `col ∈ {1, 2}`.
    pub fn v_entry(&self, i: usize, col: usize) -> i64 {
        match (i, col) {
            (1, 1) => 1,
            (i, 2) if i == self.n => 1,
            _ => 0,
        }
    }

    /// `(U Vᵀ)_{i,j}`, 1-based.
    pub fn uvt_entry(&self, i: usize, j: usize) -> i64 {
        self.u_entry(i, 1) * self.v_entry(j, 1) + self.u_entry(i, 2) * self.v_entry(j, 2)
    }

    /// Columns of `U` as dense vectors (for the solver's correction solves).
    pub fn u_dense(&self) -> (Vec<f64>, Vec<f64>) {
        let mut u1 = vec![0.0; self.n];
        let mut u2 = vec![0.0; self.n];
        u1[0] = 4.0;
        u1[1] = -1.0;
        u2[self.n - 2] = -1.0;
        u2[self.n - 1] = 4.0;
        (u1, u2)
    }
}

/// Factors `(σ, U, V)` with `A = B·C + σ U Vᵀ` exactly.
pub fn rank_two_factors(spec: SystemSpec) -> RankTwoFactors {
    RankTwoFactors {
        sigma: spec.variant.sigma(),
        n: spec.n,
    }
}

/// `max |A − (B·C + σ U Vᵀ)|` over all entries, in exact integer arithmetic.
///
/// Both `B·C` and the correction live inside bandwidth 3, so only banded
/// cells need checking.
pub fn decomposition_max_residual(spec: SystemSpec) -> i64 {
    let n = spec.n;
    let a = build_a(spec);
    let b = build_b(spec);
    let c = build_c(n).expect("n >= 7");
    let f = rank_two_factors(spec);
    let mut worst = 0i64;
    for i in 1..=n {
        let lo = i.saturating_sub(3).max(1);
        let hi = (i + 3).min(n);
        for j in lo..=hi {
            let mut bc = 0i64;
            let klo = i.saturating_sub(2).max(j.saturating_sub(1)).max(1);
            let khi = (i + 2).min(j + 1).min(n);
            for k in klo..=khi {
                bc += b.entry(i, k) * c.entry(k, j);
            }
            let r = (a.entry(i, j) - bc - f.sigma * f.uvt_entry(i, j)).abs();
            worst = worst.max(r);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_rejects_small_n() {
        assert!(SystemSpec::toeplitz(6).is_err());
        assert!(SystemSpec::near_toeplitz(7).is_ok());
    }

    #[test]
    fn variant_parsing() {
        assert_eq!(Variant::parse("toeplitz").unwrap(), Variant::Toeplitz);
        assert_eq!(Variant::parse("near").unwrap(), Variant::NearToeplitz);
        assert!(Variant::parse("circulant").is_err());
    }

    #[test]
    fn a_corner_and_interior_entries() {
        let t = build_a(SystemSpec::toeplitz(7).unwrap());
        assert_eq!(t.entry(1, 1), 56);
        assert_eq!(t.entry(4, 1), -1);
        assert_eq!(t.entry(4, 4), 56);
        assert_eq!(t.entry(1, 5), 0); // outside bandwidth 3
        let nt = build_a(SystemSpec::near_toeplitz(7).unwrap());
        assert_eq!(nt.entry(1, 2), -40);
        assert_eq!(nt.entry(2, 2), 56);
        assert_eq!(nt.entry(7, 6), -40);
        assert_eq!(nt.entry(7, 7), 68);
    }

    #[test]
    fn b_corners_and_band() {
        let t = build_b(SystemSpec::toeplitz(7).unwrap());
        assert_eq!(t.entry(1, 1), 6);
        assert_eq!(t.entry(2, 4), 1);
        let nt = build_b(SystemSpec::near_toeplitz(7).unwrap());
        assert_eq!(nt.entry(1, 1), 7);
        assert_eq!(nt.entry(7, 7), 7);
        assert_eq!(nt.entry(2, 2), 6);
    }

    #[test]
    fn c_shape() {
        let c = build_c(3).unwrap();
        assert_eq!(
            (c.entry(1, 1), c.entry(2, 2), c.entry(3, 3)),
            (8, 8, 8)
        );
        assert_eq!(c.entry(1, 3), 0);
        let c1 = build_c(1).unwrap();
        assert_eq!(c1.entry(1, 1), 8);
        assert!(build_c(0).is_err());
    }

    #[test]
    fn multiply_examples() {
        let c = build_c(3).unwrap();
        assert_eq!(c.multiply(&[1.0, 1.0, 1.0]).unwrap(), vec![7.0, 6.0, 7.0]);

        let b = build_b(SystemSpec::toeplitz(7).unwrap());
        let mut e1 = vec![0.0; 7];
        e1[0] = 1.0;
        assert_eq!(
            b.multiply(&e1).unwrap(),
            vec![6.0, -4.0, 1.0, 0.0, 0.0, 0.0, 0.0]
        );

        let a = build_a(SystemSpec::toeplitz(7).unwrap());
        let y = a.multiply(&vec![1.0; 7]).unwrap();
        // interior stencil coefficients sum to zero
        assert_eq!(y[3], 0.0);

        assert!(c.multiply(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn symmetry_and_centrosymmetry() {
        for variant in Variant::ALL {
            let spec = SystemSpec::new(variant, 11).unwrap();
            for m in [build_a(spec), build_b(spec), build_c(11).unwrap()] {
                let n = m.n();
                for i in 1..=n {
                    for j in 1..=n {
                        assert_eq!(m.entry(i, j), m.entry(j, i));
                        assert_eq!(m.entry(i, j), m.entry(n + 1 - i, n + 1 - j));
                    }
                }
            }
        }
    }

    #[test]
    fn rank_two_factor_layout() {
        let f = rank_two_factors(SystemSpec::toeplitz(7).unwrap());
        assert_eq!(f.sigma, 1);
        let col1: Vec<i64> = (1..=7).map(|i| f.u_entry(i, 1)).collect();
        assert_eq!(col1, vec![4, -1, 0, 0, 0, 0, 0]);
        let f2 = rank_two_factors(SystemSpec::near_toeplitz(9).unwrap());
        assert_eq!(f2.sigma, 2);
        assert_eq!(f2.u_entry(8, 2), -1);
        assert_eq!(f2.v_entry(9, 2), 1);
        assert_eq!(f2.uvt_entry(9, 9), 4);
    }

    #[test]
    fn decomposition_exact_for_desk_sizes() {
        for variant in Variant::ALL {
            for n in [7usize, 8, 9, 16, 33] {
                let spec = SystemSpec::new(variant, n).unwrap();
                assert_eq!(decomposition_max_residual(spec), 0, "{variant} n={n}");
            }
        }
    }
}
