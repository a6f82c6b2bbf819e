//! `O(n)` linear solves through the decomposition (pentadiagonal solve +
//! tridiagonal solve + 2×2 Sherman–Morrison correction) and the fixed-point
//! iteration for the nonlinear clamped-beam problem.
//!
//! Both banded factors are positive definite, so `LDLᵀ` factorization without
//! pivoting applies; each factorization asserts positive pivots and fails
//! loudly otherwise. Solves finish with two residual-correction passes using
//! compensated (error-free transformation) residuals, which keeps solutions
//! near the representable floor at desk scales.

use crate::bounds::{exact_inverse_norm, PNorm};
use crate::error::{Error, Result};
use crate::matrix::{build_a, build_b, build_c, rank_two_factors, BandedMatrix, SystemSpec};

/// `LDLᵀ` of a symmetric positive-definite tridiagonal matrix.
struct TridiagonalLdlt {
    d: Vec<f64>,
    l1: Vec<f64>,
}

impl TridiagonalLdlt {
    fn factor(diag: &[f64], off1: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut d = vec![0.0; n];
        let mut l1 = vec![0.0; n.saturating_sub(1)];
        d[0] = diag[0];
        check_pivot(0, d[0])?;
        for i in 1..n {
            l1[i - 1] = off1[i - 1] / d[i - 1];
            d[i] = diag[i] - l1[i - 1] * l1[i - 1] * d[i - 1];
            check_pivot(i, d[i])?;
        }
        Ok(Self { d, l1 })
    }

    fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.d.len();
        for i in 1..n {
            x[i] -= self.l1[i - 1] * x[i - 1];
        }
        for i in 0..n {
            x[i] /= self.d[i];
        }
        for i in (0..n - 1).rev() {
            x[i] -= self.l1[i] * x[i + 1];
        }
    }
}

/// `LDLᵀ` of a symmetric positive-definite pentadiagonal matrix.
struct PentadiagonalLdlt {
    d: Vec<f64>,
    l1: Vec<f64>,
    l2: Vec<f64>,
}

impl PentadiagonalLdlt {
    fn factor(diag: &[f64], off1: &[f64], off2: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut d = vec![0.0; n];
        let mut l1 = vec![0.0; n.saturating_sub(1)];
        let mut l2 = vec![0.0; n.saturating_sub(2)];
        d[0] = diag[0];
        check_pivot(0, d[0])?;
        if n >= 2 {
            l1[0] = off1[0] / d[0];
            d[1] = diag[1] - l1[0] * l1[0] * d[0];
            check_pivot(1, d[1])?;
        }
        for i in 2..n {
            l2[i - 2] = off2[i - 2] / d[i - 2];
            l1[i - 1] = (off1[i - 1] - l2[i - 2] * d[i - 2] * l1[i - 2]) / d[i - 1];
            d[i] = diag[i] - l1[i - 1] * l1[i - 1] * d[i - 1] - l2[i - 2] * l2[i - 2] * d[i - 2];
            check_pivot(i, d[i])?;
        }
        Ok(Self { d, l1, l2 })
    }

    fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.d.len();
        if n >= 2 {
            x[1] -= self.l1[0] * x[0];
        }
        for i in 2..n {
            x[i] = x[i] - self.l1[i - 1] * x[i - 1] - self.l2[i - 2] * x[i - 2];
        }
        for i in 0..n {
            x[i] /= self.d[i];
        }
        if n >= 2 {
            x[n - 2] -= self.l1[n - 2] * x[n - 1];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = x[i] - self.l1[i] * x[i + 1] - self.l2[i] * x[i + 2];
        }
    }
}

fn check_pivot(index: usize, pivot: f64) -> Result<()> {
    if !(pivot.is_finite() && pivot > 0.0) {
        return Err(Error::NotPositiveDefinite { index, pivot });
    }
    Ok(())
}

fn banded_to_f64(diag: &[i64]) -> Vec<f64> {
    diag.iter().map(|&v| v as f64).collect()
}

/// Residual `b − A·x` with compensated dot products (`mul_add`-based
/// error-free transformations), so refinement sees the true residual.
fn compensated_residual(a: &BandedMatrix, b: &[f64], x: &[f64]) -> Vec<f64> {
    let n = a.n();
    let hb = a.half_bandwidth();
    let mut r = vec![0.0; n];
    for i in 1..=n {
        let lo = i.saturating_sub(hb).max(1);
        let hi = (i + hb).min(n);
        let mut s = b[i - 1];
        let mut c = 0.0;
        for j in lo..=hi {
            let aij = -(a.entry(i, j) as f64);
            let p = aij * x[j - 1];
            let ep = aij.mul_add(x[j - 1], -p);
            let t = s + p;
            let bb = t - s;
            let e = (s - (t - bb)) + (p - bb);
            s = t;
            c += e + ep;
        }
        r[i - 1] = s + c;
    }
    r
}

/// `O(n)` direct solver for `A x = rhs` through `A = B·C + σUVᵀ`.
///
/// Holds the two banded factorizations, the correction columns
/// `w = D⁻¹U`, and the 2×2 Schur closure; solves reuse all of them.
pub struct ShermanMorrisonSolver {
    spec: SystemSpec,
    a: BandedMatrix,
    b_fact: PentadiagonalLdlt,
    c_fact: TridiagonalLdlt,
    sigma: f64,
    w1: Vec<f64>,
    w2: Vec<f64>,
    m: [[f64; 2]; 2],
    det_m: f64,
}

impl ShermanMorrisonSolver {
    pub fn new(spec: SystemSpec) -> Result<Self> {
        let n = spec.n;
        let a = build_a(spec);
        let b = build_b(spec);
        let c = build_c(n)?;
        let b_fact = PentadiagonalLdlt::factor(
            &banded_to_f64(&b.diagonals()[0]),
            &banded_to_f64(&b.diagonals()[1]),
            &banded_to_f64(&b.diagonals()[2]),
        )?;
        let c_fact = TridiagonalLdlt::factor(
            &banded_to_f64(&c.diagonals()[0]),
            &banded_to_f64(&c.diagonals()[1]),
        )?;
        let factors = rank_two_factors(spec);
        let sigma = factors.sigma as f64;
        let (mut w1, mut w2) = factors.u_dense();
        apply_d_inverse(&b_fact, &c_fact, &mut w1);
        apply_d_inverse(&b_fact, &c_fact, &mut w2);
        let m = [
            [1.0 + sigma * w1[0], sigma * w2[0]],
            [sigma * w1[n - 1], 1.0 + sigma * w2[n - 1]],
        ];
        let det_m = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if !(det_m.is_finite() && det_m > 0.0) {
            return Err(Error::Singular { index: 0 });
        }
        Ok(Self {
            spec,
            a,
            b_fact,
            c_fact,
            sigma,
            w1,
            w2,
            m,
            det_m,
        })
    }

    pub fn spec(&self) -> SystemSpec {
        self.spec
    }

    /// Solve `A x = rhs`; `O(n)` time including the refinement passes.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.spec.n;
        if rhs.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: rhs.len(),
            });
        }
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "right-hand side",
            });
        }
        let mut x = self.sm_solve(rhs.to_vec());
        for _ in 0..2 {
            let r = compensated_residual(&self.a, rhs, &x);
            let dx = self.sm_solve(r);
            for (xi, di) in x.iter_mut().zip(dx) {
                *xi += di;
            }
        }
        Ok(x)
    }

    fn sm_solve(&self, mut v: Vec<f64>) -> Vec<f64> {
        let n = self.spec.n;
        apply_d_inverse(&self.b_fact, &self.c_fact, &mut v);
        // t = M⁻¹ (v_1, v_n)ᵀ
        let (z1, zn) = (v[0], v[n - 1]);
        let t0 = (self.m[1][1] * z1 - self.m[0][1] * zn) / self.det_m;
        let t1 = (-self.m[1][0] * z1 + self.m[0][0] * zn) / self.det_m;
        for i in 0..n {
            v[i] -= self.sigma * (self.w1[i] * t0 + self.w2[i] * t1);
        }
        v
    }
}

/// `v ← C⁻¹ B⁻¹ v` (the `D⁻¹` application; `D = B·C`).
fn apply_d_inverse(b: &PentadiagonalLdlt, c: &TridiagonalLdlt, v: &mut [f64]) {
    b.solve_in_place(v);
    c.solve_in_place(v);
}

/// One-shot convenience for [`ShermanMorrisonSolver`].
pub fn solve(spec: SystemSpec, rhs: &[f64]) -> Result<Vec<f64>> {
    ShermanMorrisonSolver::new(spec)?.solve(rhs)
}

/// Forcing term of the beam problem, `f(x, u)`.
pub type Forcing = Box<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// The discretized clamped-beam boundary-value problem
/// `A u = h⁴ C_EI f(x, u)` on the interior grid `x_i = i·h`, `h = 1/(n+1)`.
pub struct BeamProblem {
    pub spec: SystemSpec,
    pub c_ei: f64,
    pub forcing: Forcing,
    pub lipschitz: Option<f64>,
}

impl BeamProblem {
    /// Clamped-clamped problem on `n` interior points (near-Toeplitz matrix).
    pub fn new(n: usize, c_ei: f64, forcing: Forcing) -> Result<Self> {
        if !(c_ei.is_finite() && c_ei > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "c_ei must be positive, got {c_ei}"
            )));
        }
        Ok(Self {
            spec: SystemSpec::near_toeplitz(n)?,
            c_ei,
            forcing,
            lipschitz: None,
        })
    }

    pub fn with_lipschitz(mut self, l: f64) -> Self {
        self.lipschitz = Some(l);
        self
    }

    /// Mesh size `h = 1/(n+1)`.
    pub fn h(&self) -> f64 {
        1.0 / (self.spec.n as f64 + 1.0)
    }

    /// Interior grid points `x_i = i·h`, `i = 1..n`.
    pub fn grid(&self) -> Vec<f64> {
        let h = self.h();
        (1..=self.spec.n).map(|i| i as f64 * h).collect()
    }
}

/// Record of one fixed-point run.
#[derive(Debug, Clone)]
pub struct FixedPointTrace {
    /// `u⁰, u¹, …` in order; the last entry is the returned solution.
    pub iterates: Vec<Vec<f64>>,
    /// `‖uˡ − uˡ⁻¹‖_∞` per iteration.
    pub residuals: Vec<f64>,
    pub converged: bool,
    /// `h⁴ C_EI L ‖A⁻¹‖_∞` when a Lipschitz constant is available, else NaN.
    pub predicted_rate: f64,
}

impl FixedPointTrace {
    pub fn final_iterate(&self) -> &[f64] {
        self.iterates.last().expect("trace always holds u0")
    }

    pub fn iterations(&self) -> usize {
        self.residuals.len()
    }

    /// Successive residual quotients `‖uˡ⁺¹−uˡ‖ / ‖uˡ−uˡ⁻¹‖`.
    pub fn residual_quotients(&self) -> Vec<f64> {
        self.residuals
            .windows(2)
            .filter(|w| w[0] > 0.0)
            .map(|w| w[1] / w[0])
            .collect()
    }
}

/// Fixed-point iteration `A uˡ = h⁴ C_EI f(x, uˡ⁻¹)` until
/// `‖uˡ − uˡ⁻¹‖_∞ ≤ tol` or `max_iter`.
///
/// Non-convergence is a reported outcome (flag unset, full trace kept), not
/// an error.
pub fn beam_fixed_point(
    problem: &BeamProblem,
    u0: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<FixedPointTrace> {
    let n = problem.spec.n;
    if u0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: u0.len(),
        });
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if max_iter == 0 {
        return Err(Error::InvalidArgument(
            "max_iter must be at least 1".to_string(),
        ));
    }
    let solver = ShermanMorrisonSolver::new(problem.spec)?;
    let grid = problem.grid();
    let scale = problem.h().powi(4) * problem.c_ei;

    let mut iterates = vec![u0.to_vec()];
    let mut residuals = Vec::new();
    let mut converged = false;
    let mut u = u0.to_vec();
    for _ in 0..max_iter {
        let mut rhs = vec![0.0; n];
        for i in 0..n {
            rhs[i] = scale * (problem.forcing)(grid[i], u[i]);
            if !rhs[i].is_finite() {
                return Err(Error::NonFinite {
                    what: "forcing evaluation",
                });
            }
        }
        let next = solver.solve(&rhs)?;
        let res = u
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        residuals.push(res);
        iterates.push(next.clone());
        u = next;
        if res <= tol {
            converged = true;
            break;
        }
    }

    let predicted_rate = match problem.lipschitz {
        Some(l) => contraction_factor(problem, l, exact_inverse_norm(problem.spec, PNorm::Infinity)?),
        None => f64::NAN,
    };
    Ok(FixedPointTrace {
        iterates,
        residuals,
        converged,
        predicted_rate,
    })
}

fn contraction_factor(problem: &BeamProblem, l: f64, norm: f64) -> f64 {
    problem.h().powi(4) * problem.c_ei * l * norm
}

/// Bound-based contraction predictor `ρ = h⁴ C_EI L · bound(‖A⁻¹‖)`.
/// `ρ < 1` predicts convergence of the fixed-point iteration.
pub fn contraction_predictor(problem: &BeamProblem) -> Result<f64> {
    let l = problem.lipschitz.ok_or(Error::MissingLipschitz)?;
    Ok(contraction_factor(
        problem,
        l,
        crate::bounds::bound_value(problem.spec),
    ))
}

/// Sharper predictor using the exactly computed `‖A⁻¹‖_∞`.
pub fn contraction_rate_exact(problem: &BeamProblem) -> Result<f64> {
    let l = problem.lipschitz.ok_or(Error::MissingLipschitz)?;
    Ok(contraction_factor(
        problem,
        l,
        exact_inverse_norm(problem.spec, PNorm::Infinity)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Variant;

    #[test]
    fn factorizations_reject_indefinite_input() {
        assert!(TridiagonalLdlt::factor(&[1.0, -5.0, 1.0], &[2.0, 2.0]).is_err());
        assert!(PentadiagonalLdlt::factor(&[1.0, 1.0, 1.0], &[4.0, 4.0], &[0.0]).is_err());
        assert!(TridiagonalLdlt::factor(&[8.0, 8.0], &[-1.0]).is_ok());
    }

    #[test]
    fn solve_recovers_constructed_solution() {
        for variant in Variant::ALL {
            for n in [7usize, 33, 200] {
                let spec = SystemSpec::new(variant, n).unwrap();
                let a = build_a(spec);
                let ones = vec![1.0; n];
                let rhs = a.multiply(&ones).unwrap();
                let x = solve(spec, &rhs).unwrap();
                for v in &x {
                    assert!((v - 1.0).abs() < 1e-9, "{variant} n={n}: {v}");
                }
            }
        }
    }

    #[test]
    fn solve_validates_input() {
        let spec = SystemSpec::toeplitz(7).unwrap();
        assert!(solve(spec, &[1.0; 6]).is_err());
        assert!(solve(spec, &[f64::NAN, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn residual_stays_tight_at_desk_scale() {
        for variant in Variant::ALL {
            for n in [16usize, 128] {
                let spec = SystemSpec::new(variant, n).unwrap();
                let a = build_a(spec);
                let rhs = vec![1.0; n];
                let x = solve(spec, &rhs).unwrap();
                let r = compensated_residual(&a, &rhs, &x);
                let rmax = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                assert!(rmax <= 1e-8, "{variant} n={n}: residual {rmax}");
            }
        }
    }

    #[test]
    fn beam_zero_forcing_fixed_point_is_zero() {
        let problem = BeamProblem::new(31, 6.0, Box::new(|_, _| 0.0)).unwrap();
        // from u0 = 0: converged after a single iteration
        let trace = beam_fixed_point(&problem, &vec![0.0; 31], 1e-12, 10).unwrap();
        assert!(trace.converged);
        assert_eq!(trace.iterations(), 1);
        // from any u0: u¹ is already exactly the zero fixed point
        let u0: Vec<f64> = (0..31).map(|i| (i as f64).sin()).collect();
        let trace = beam_fixed_point(&problem, &u0, 1e-12, 10).unwrap();
        assert!(trace.converged);
        assert!(trace.iterates[1].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn beam_constant_forcing_converges_in_two() {
        let n = 31;
        let problem = BeamProblem::new(n, 6.0, Box::new(|_, _| 1.0)).unwrap();
        let trace = beam_fixed_point(&problem, &vec![0.0; n], 1e-12, 10).unwrap();
        assert!(trace.converged);
        assert!(trace.iterations() <= 2);
        // u = h⁴ C_EI A⁻¹ 1
        let h4c = problem.h().powi(4) * 6.0;
        let direct = solve(problem.spec, &vec![h4c; n]).unwrap();
        for (a, b) in trace.final_iterate().iter().zip(&direct) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn beam_invalid_arguments() {
        let problem = BeamProblem::new(31, 6.0, Box::new(|_, _| 0.0)).unwrap();
        assert!(beam_fixed_point(&problem, &vec![0.0; 31], 0.0, 10).is_err());
        assert!(beam_fixed_point(&problem, &vec![0.0; 31], 1e-10, 0).is_err());
        assert!(beam_fixed_point(&problem, &vec![0.0; 30], 1e-10, 5).is_err());
        assert!(BeamProblem::new(31, 0.0, Box::new(|_, _| 0.0)).is_err());
        let nan = BeamProblem::new(31, 6.0, Box::new(|_, _| f64::NAN)).unwrap();
        assert!(beam_fixed_point(&nan, &vec![0.0; 31], 1e-10, 5).is_err());
    }

    #[test]
    fn predictor_examples() {
        let zero_l = BeamProblem::new(31, 6.0, Box::new(|x, _| x))
            .unwrap()
            .with_lipschitz(0.0);
        assert_eq!(contraction_predictor(&zero_l).unwrap(), 0.0);

        let problem = BeamProblem::new(31, 6.0, Box::new(|x, u| u.sin() + x))
            .unwrap()
            .with_lipschitz(1.0);
        let rho = contraction_predictor(&problem).unwrap();
        let expect = (1.0f64 / 32.0).powi(4) * 6.0 * (1024.0 * (1024.0 + 14.0) / 2304.0);
        assert!((rho - expect).abs() < 1e-15);
        let rho_exact = contraction_rate_exact(&problem).unwrap();
        assert!(rho_exact <= rho);

        let no_l = BeamProblem::new(31, 6.0, Box::new(|_, _| 0.0)).unwrap();
        assert!(contraction_predictor(&no_l).is_err());
    }

    #[test]
    fn predictor_mesh_refinement_ratio_approaches_one() {
        let mut prev: Option<f64> = None;
        for n in [31usize, 63, 127, 255, 511] {
            let p = BeamProblem::new(n, 6.0, Box::new(|x, u| u.sin() + x))
                .unwrap()
                .with_lipschitz(1.0);
            let rho = contraction_predictor(&p).unwrap();
            if let Some(prev) = prev {
                let ratio: f64 = rho / prev;
                assert!(
                    (ratio - 1.0).abs() < 0.10,
                    "n={n}: rho ratio {ratio} not within 10% of 1"
                );
            }
            prev = Some(rho);
        }
    }
}
