//! Two-use outputs parametrized by Schmidt coefficients.
//!
//! A bipartite pure input `sum_a sqrt(l_a) |a;1>|a;2>` fed through `Phi (x) Phi`
//! yields `sigma_12 = sum_ab sqrt(l_a l_b) Phi(|a;1><b;1|) (x) Phi(|a;2><b;2|)`.
//! For the spin-1/2 isotropic channel this has the closed-form spectrum
//! `{2/9, 2/9, 5/18 +- sqrt(9 - 32 l1 l2) / 18}`, whose entropy is concave in
//! `l1` and therefore minimal at the vertices of the simplex.

use std::io::{self, Write};

use crate::channels::{build_isotropic, Basis, DensityMatrix, KrausChannel, PureState, Spin};
use crate::entropy::entropy_of_spectrum;
use crate::error::{Error, Result};
use crate::numerics::{c, eigenvalues, kron, svd, ComplexMatrix, ZERO};
use crate::report::{fmt_f64, Units};
use crate::tolerance;

/// Probability vector of Schmidt coefficients, in the order of the basis columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtVector(Vec<f64>);

impl SchmidtVector {
    pub fn new(lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.is_empty() || lambdas.iter().any(|&l| !(l >= 0.0)) {
            return Err(Error::InvalidState(
                "Schmidt coefficients must be nonnegative".into(),
            ));
        }
        let total: f64 = lambdas.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!(
                "Schmidt coefficients sum to {total}"
            )));
        }
        Ok(Self(lambdas))
    }

    /// `(l1, 1 - l1)` for a qubit pair.
    pub fn qubit(lambda1: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda1) {
            return Err(Error::OutOfRange(lambda1));
        }
        Self::new(vec![lambda1, 1.0 - lambda1])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// Schmidt coefficients with the two local bases (columns are `|a;1>`, `|a;2>`).
#[derive(Debug, Clone)]
pub struct SchmidtForm {
    pub lambdas: SchmidtVector,
    pub basis1: ComplexMatrix,
    pub basis2: ComplexMatrix,
}

impl SchmidtForm {
    pub fn new(lambdas: SchmidtVector, basis1: ComplexMatrix, basis2: ComplexMatrix) -> Result<Self> {
        let d = lambdas.dim();
        for b in [&basis1, &basis2] {
            if b.rows() != d || b.cols() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: b.rows(),
                });
            }
            if !b.is_unitary(tolerance::UNITARY) {
                return Err(Error::InvalidState("Schmidt basis is not unitary".into()));
            }
        }
        Ok(Self {
            lambdas,
            basis1,
            basis2,
        })
    }

    /// Canonical bases on both sides.
    pub fn canonical(lambdas: SchmidtVector) -> Self {
        let d = lambdas.dim();
        Self {
            lambdas,
            basis1: ComplexMatrix::identity(d),
            basis2: ComplexMatrix::identity(d),
        }
    }

    pub fn dim(&self) -> usize {
        self.lambdas.dim()
    }
}

/// Schmidt decomposition of a pure state on `C^d (x) C^d`.
///
/// The amplitude of `|i>|k>` sits at index `i d + k`.
pub fn schmidt_decompose(psi: &PureState) -> Result<SchmidtForm> {
    let n = psi.dim();
    let d = (n as f64).sqrt().round() as usize;
    if d * d != n {
        return Err(Error::NotBipartiteSquare(n));
    }
    let amps = psi.amplitudes();
    let coeff = ComplexMatrix::from_fn(d, d, |i, k| amps[i * d + k]);
    // C = U S V^dag  =>  psi = sum_a s_a (U e_a) (x) (conj(V) e_a).
    let (u, s, v) = svd(&coeff)?;
    let mut lambdas: Vec<f64> = s.iter().map(|x| x * x).collect();
    let total: f64 = lambdas.iter().sum();
    for l in &mut lambdas {
        *l /= total;
    }
    Ok(SchmidtForm {
        lambdas: SchmidtVector::new(lambdas)?,
        basis1: u,
        basis2: v.conj(),
    })
}

/// `sum_a sqrt(l_a) |a;1> (x) |a;2>`.
pub fn assemble_schmidt_state(form: &SchmidtForm) -> PureState {
    let d = form.dim();
    let mut amps = vec![ZERO; d * d];
    for (a, &l) in form.lambdas.values().iter().enumerate() {
        let w = l.sqrt();
        for i in 0..d {
            for k in 0..d {
                amps[i * d + k] += form.basis1[(i, a)] * form.basis2[(k, a)] * w;
            }
        }
    }
    PureState::normalize(&amps).expect("Schmidt weights sum to one")
}

/// `sigma_12 = sum_ab sqrt(l_a l_b) Phi(|a;1><b;1|) (x) Phi(|a;2><b;2|)`.
pub fn product_output(ch: &KrausChannel, form: &SchmidtForm) -> Result<DensityMatrix> {
    let d = form.dim();
    if ch.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: ch.dim(),
            found: d,
        });
    }
    let lam = form.lambdas.values();
    let mut out = ComplexMatrix::zeros(d * d, d * d);
    for a in 0..d {
        for b in 0..d {
            let w = (lam[a] * lam[b]).sqrt();
            if w == 0.0 {
                continue;
            }
            let left = ch.apply_to_operator(&ComplexMatrix::outer(
                &form.basis1.column(a),
                &form.basis1.column(b),
            ))?;
            let right = ch.apply_to_operator(&ComplexMatrix::outer(
                &form.basis2.column(a),
                &form.basis2.column(b),
            ))?;
            out += &kron(&left, &right)?.scale_real(w);
        }
    }
    DensityMatrix::new(out)
}

/// Closed-form two-use output of the spin-1/2 channel in canonical bases:
/// `(1/9) [ sum_ab (4 - 2 l_a - 2 l_b) |ab><ab| + sum_ab sqrt(l_a l_b) |aa><bb| ]`.
pub fn qubit_output_closed_form(lambda1: f64) -> Result<ComplexMatrix> {
    if !(0.0..=1.0).contains(&lambda1) {
        return Err(Error::OutOfRange(lambda1));
    }
    let lam = [lambda1, 1.0 - lambda1];
    let mut m = ComplexMatrix::zeros(4, 4);
    for a in 0..2 {
        for b in 0..2 {
            let idx = 2 * a + b;
            m[(idx, idx)] += c(4.0 - 2.0 * lam[a] - 2.0 * lam[b], 0.0);
            m[(3 * a, 3 * b)] += c((lam[a] * lam[b]).sqrt(), 0.0);
        }
    }
    Ok(m.scale_real(1.0 / 9.0))
}

/// `sqrt(9 - 32 l1 (1 - l1))`.
fn discriminant_root(lambda1: f64) -> f64 {
    (9.0 - 32.0 * lambda1 * (1.0 - lambda1)).sqrt()
}

/// Larger non-degenerate eigenvalue `5/18 + sqrt(9 - 32 l1 (1 - l1)) / 18`.
pub fn f1(lambda1: f64) -> f64 {
    5.0 / 18.0 + discriminant_root(lambda1) / 18.0
}

/// Smaller non-degenerate eigenvalue `5/18 - sqrt(9 - 32 l1 (1 - l1)) / 18`.
pub fn f2(lambda1: f64) -> f64 {
    5.0 / 18.0 - discriminant_root(lambda1) / 18.0
}

/// `f1'(l1) = 8 (2 l1 - 1) / (9 sqrt(9 - 32 l1 (1 - l1)))`.
pub fn f1_prime(lambda1: f64) -> f64 {
    8.0 * (2.0 * lambda1 - 1.0) / (9.0 * discriminant_root(lambda1))
}

/// `f1''(l1) = (16/9) (9 - 32 l1 (1 - l1))^(-3/2)`.
pub fn f1_second(lambda1: f64) -> f64 {
    16.0 / 9.0 * (9.0 - 32.0 * lambda1 * (1.0 - lambda1)).powf(-1.5)
}

/// Closed-form second derivative of the two-use output entropy:
/// `f1'' ln(f2/f1) - (5/9) f1'^2 / (f1 f2)`.
pub fn entropy_second_derivative(lambda1: f64) -> f64 {
    let (a, b) = (f1(lambda1), f2(lambda1));
    f1_second(lambda1) * (b / a).ln() - 5.0 / 9.0 * f1_prime(lambda1).powi(2) / (a * b)
}

/// `{2/9, 2/9, f1, f2}` for `0 <= l1 <= 1`.
pub fn analytic_qubit_spectrum(lambda1: f64) -> Result<[f64; 4]> {
    if !(0.0..=1.0).contains(&lambda1) {
        return Err(Error::OutOfRange(lambda1));
    }
    Ok([2.0 / 9.0, 2.0 / 9.0, f1(lambda1), f2(lambda1)])
}

/// Constant part `-(4/9) ln(2/9)` of the two-use entropy.
pub fn constant_entropy_term() -> f64 {
    -(4.0 / 9.0) * (2.0f64 / 9.0).ln()
}

/// Two-use output entropy from the closed-form spectrum.
pub fn analytic_entropy(lambda1: f64) -> Result<f64> {
    entropy_of_spectrum(&analytic_qubit_spectrum(lambda1)?)
}

/// One sample of the entropy curve over `l1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub lambda1: f64,
    pub eigenvalues: [f64; 4],
    pub entropy_nats: f64,
}

/// Bases used by [`entropy_curve`].
#[derive(Debug, Clone)]
pub enum CurveBases {
    /// Canonical bases; uses the closed-form spectrum `{2/9, 2/9, f1, f2}`.
    Canonical,
    /// Arbitrary local bases; diagonalizes `sigma_12` numerically and
    /// reports eigenvalues ascending.
    General {
        basis1: ComplexMatrix,
        basis2: ComplexMatrix,
    },
}

/// Grid `{0, 1/(n-1), ..., 1}` with exact endpoints.
pub fn lambda_grid(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                1.0
            } else {
                i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// Two-use output entropy of the spin-1/2 channel along `l1`.
pub fn entropy_curve(grid: usize, bases: &CurveBases) -> Result<Vec<CurvePoint>> {
    if grid < 3 {
        return Err(Error::InvalidState(format!("grid must have at least 3 points, got {grid}")));
    }
    let ch = match bases {
        CurveBases::Canonical => None,
        CurveBases::General { .. } => Some(build_isotropic(Spin::Half, Basis::Magnetic)?),
    };
    lambda_grid(grid)
        .into_iter()
        .map(|l1| {
            let eigenvalues = match (bases, &ch) {
                (CurveBases::General { basis1, basis2 }, Some(ch)) => {
                    let form = SchmidtForm::new(SchmidtVector::qubit(l1)?, basis1.clone(), basis2.clone())?;
                    let ev = eigenvalues(product_output(ch, &form)?.matrix())?;
                    [ev[0], ev[1], ev[2], ev[3]]
                }
                _ => analytic_qubit_spectrum(l1)?,
            };
            Ok(CurvePoint {
                lambda1: l1,
                eigenvalues,
                entropy_nats: entropy_of_spectrum(&eigenvalues)?,
            })
        })
        .collect()
}

/// Output entropy of `Phi (x) Phi` along the edge `(l1, 1 - l1, 0, ...)` of
/// the Schmidt simplex, for arbitrary local bases.
pub fn edge_entropy_profile(
    ch: &KrausChannel,
    grid: usize,
    basis1: &ComplexMatrix,
    basis2: &ComplexMatrix,
) -> Result<Vec<(f64, f64)>> {
    let d = ch.dim();
    lambda_grid(grid)
        .into_iter()
        .map(|l1| {
            let mut lam = vec![0.0; d];
            lam[0] = l1;
            lam[1] = 1.0 - l1;
            let form = SchmidtForm {
                lambdas: SchmidtVector::new(lam)?,
                basis1: basis1.clone(),
                basis2: basis2.clone(),
            };
            let out = product_output(ch, &form)?;
            Ok((l1, entropy_of_spectrum(&eigenvalues(out.matrix())?)?))
        })
        .collect()
}

/// Writes `lambda1,r1,r2,r3,r4,entropy_<unit>` rows with 17 significant digits.
pub fn write_curve_csv<W: Write>(points: &[CurvePoint], units: Units, mut out: W) -> io::Result<()> {
    writeln!(out, "lambda1,r1,r2,r3,r4,{}", units.field("entropy"))?;
    for p in points {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_f64(p.lambda1),
            fmt_f64(p.eigenvalues[0]),
            fmt_f64(p.eigenvalues[1]),
            fmt_f64(p.eigenvalues[2]),
            fmt_f64(p.eigenvalues[3]),
            fmt_f64(units.convert(p.entropy_nats)),
        )?;
    }
    Ok(())
}

/// Finite-difference concavity scan of the closed-form entropy curve.
#[derive(Debug, Clone)]
pub struct ConcavityReport {
    pub min_second_derivative: f64,
    pub max_second_derivative: f64,
    pub all_negative: bool,
    /// Interior points examined.
    pub points: usize,
    /// `max |f1 + f2 - 10/18|` over the grid.
    pub sum_residual: f64,
    /// `max |f1 f2 - (16 + 32 l1 (1 - l1)) / 324|` over the grid.
    pub product_residual: f64,
    /// `max |S''_fd - S''_closed|` over the examined points.
    pub formula_residual: f64,
}

/// Central second differences of the closed-form entropy at the grid points
/// in `[fd_step, 1 - fd_step]`.
pub fn concavity_check(grid: usize, fd_step: f64) -> Result<ConcavityReport> {
    if grid < 11 {
        return Err(Error::InvalidState(format!("grid must have at least 11 points, got {grid}")));
    }
    if !(fd_step > 0.0 && fd_step < 0.5) {
        return Err(Error::OutOfRange(fd_step));
    }
    let mut report = ConcavityReport {
        min_second_derivative: f64::INFINITY,
        max_second_derivative: f64::NEG_INFINITY,
        all_negative: true,
        points: 0,
        sum_residual: 0.0,
        product_residual: 0.0,
        formula_residual: 0.0,
    };
    for l1 in lambda_grid(grid) {
        let (a, b) = (f1(l1), f2(l1));
        report.sum_residual = report.sum_residual.max((a + b - 10.0 / 18.0).abs());
        let expected = (16.0 + 32.0 * l1 * (1.0 - l1)) / 324.0;
        report.product_residual = report.product_residual.max((a * b - expected).abs());

        if l1 < fd_step || l1 > 1.0 - fd_step {
            continue;
        }
        let s = |x: f64| analytic_entropy(x);
        let second = (s(l1 + fd_step)? - 2.0 * s(l1)? + s(l1 - fd_step)?) / (fd_step * fd_step);
        report.points += 1;
        report.min_second_derivative = report.min_second_derivative.min(second);
        report.max_second_derivative = report.max_second_derivative.max(second);
        report.all_negative &= second < 0.0;
        report.formula_residual = report
            .formula_residual
            .max((second - entropy_second_derivative(l1)).abs());
    }
    report.all_negative &= report.points > 0;
    Ok(report)
}
