//! Quantum states and channels in Kraus form.
//!
//! Builders cover the isotropic spin-1/2 and spin-1 channels
//! `rho -> (1 / s(s+1)) sum_k S_k rho S_k` and the transpose-depolarizing
//! family `mu -> (I tr mu - mu^T) / (d - 1)`. Basis vectors are the canonical
//! columns, 0-indexed; for spin one the magnetic ordering is `m = +1, 0, -1`.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    c, expi_hermitian, hermitian_eigen, kron, Complex, ComplexMatrix, I, ONE, ZERO,
};
use crate::random::{haar_vector, stream_rng, unit_direction};
use crate::tolerance;

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::NotSquare {
                rows: mat.rows(),
                cols: mat.cols(),
            });
        }
        let herm = mat.hermitian_residual();
        if herm > tolerance::DENSITY {
            return Err(Error::InvalidState(format!(
                "not Hermitian (residual {herm:e})"
            )));
        }
        let tr = mat.trace();
        if (tr - ONE).norm() > tolerance::DENSITY {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let floor = hermitian_eigen(&mat, false)?.eigenvalues[0];
        if floor < -tolerance::DENSITY {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {floor:e}"
            )));
        }
        Ok(Self(mat))
    }

    /// Wraps a matrix the caller already knows to be a state.
    pub(crate) fn from_trusted(mat: ComplexMatrix) -> Self {
        Self(mat)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self(ComplexMatrix::outer(&psi.0, &psi.0))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// `rho (x) tau`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Ok(Self(kron(&self.0, &other.0)?))
    }

    /// `U rho U^dag`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Self {
        Self(u.sandwich(&self.0))
    }
}

/// Unit vector of amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState(Vec<Complex>);

impl PureState {
    pub fn new(amplitudes: Vec<Complex>) -> Result<Self> {
        let n = norm(&amplitudes);
        if amplitudes.is_empty() || (n - 1.0).abs() > tolerance::PURE_NORM {
            return Err(Error::InvalidState(format!("amplitude norm {n} is not 1")));
        }
        Ok(Self(amplitudes))
    }

    /// Normalizes `amplitudes`; fails on a zero or non-finite vector.
    pub fn normalize(amplitudes: &[Complex]) -> Result<Self> {
        crate::random::normalized(amplitudes)
            .map(Self)
            .ok_or_else(|| Error::InvalidState("cannot normalize a zero vector".into()))
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = vec![ZERO; dim];
        v[index] = ONE;
        Self(v)
    }

    pub fn haar<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Self {
        Self(haar_vector(rng, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &[Complex] {
        &self.0
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex>()
            .norm_sqr()
    }

    /// `|self> (x) |other>`.
    pub fn tensor(&self, other: &Self) -> Self {
        Self(crate::numerics::kron_vec(&self.0, &other.0))
    }
}

fn norm(v: &[Complex]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Spin quantum number of an isotropic channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    Half,
    One,
}

impl Spin {
    /// `s (s + 1)`, the Casimir eigenvalue.
    pub fn casimir(self) -> f64 {
        match self {
            Spin::Half => 0.75,
            Spin::One => 2.0,
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Spin::Half => 2,
            Spin::One => 3,
        }
    }
}

/// Matrix representation of the spin operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// Eigenbasis of `S_3` (`|s, m>`, `m` descending).
    Magnetic,
    /// Vector representation: generators of rotations of a real 3-vector.
    Cartesian,
}

fn m3(rows: [[Complex; 3]; 3]) -> ComplexMatrix {
    ComplexMatrix::from_rows(&rows)
}

/// Pauli matrices `sigma_x, sigma_y, sigma_z` with `sigma_z |0> = |0>`.
pub fn pauli() -> [ComplexMatrix; 3] {
    [
        ComplexMatrix::from_rows(&[[ZERO, ONE], [ONE, ZERO]]),
        ComplexMatrix::from_rows(&[[ZERO, -I], [I, ZERO]]),
        ComplexMatrix::from_rows(&[[ONE, ZERO], [ZERO, -ONE]]),
    ]
}

/// Spin operators `S_1, S_2, S_3` in the requested representation.
pub fn spin_generators(spin: Spin, basis: Basis) -> Result<[ComplexMatrix; 3]> {
    match (spin, basis) {
        (Spin::Half, Basis::Magnetic) => Ok(pauli().map(|s| s.scale_real(0.5))),
        (Spin::Half, Basis::Cartesian) => Err(Error::InvalidBasis),
        (Spin::One, Basis::Magnetic) => {
            let r = c(FRAC_1_SQRT_2, 0.0);
            let ir = c(0.0, FRAC_1_SQRT_2);
            Ok([
                m3([[ZERO, r, ZERO], [r, ZERO, r], [ZERO, r, ZERO]]),
                m3([[ZERO, -ir, ZERO], [ir, ZERO, -ir], [ZERO, ir, ZERO]]),
                m3([[ONE, ZERO, ZERO], [ZERO, ZERO, ZERO], [ZERO, ZERO, -ONE]]),
            ])
        }
        (Spin::One, Basis::Cartesian) => Ok([
            m3([[ZERO, ZERO, ZERO], [ZERO, ZERO, -I], [ZERO, I, ZERO]]),
            m3([[ZERO, ZERO, I], [ZERO, ZERO, ZERO], [-I, ZERO, ZERO]]),
            m3([[ZERO, -I, ZERO], [I, ZERO, ZERO], [ZERO, ZERO, ZERO]]),
        ]),
    }
}

/// Spin-`(dim - 1)/2` operators in the magnetic basis (`m` descending).
pub fn spin_matrices(dim: usize) -> [ComplexMatrix; 3] {
    let j = (dim as f64 - 1.0) / 2.0;
    let m = |i: usize| j - i as f64;
    let mut raise = ComplexMatrix::zeros(dim, dim);
    for i in 1..dim {
        // S_+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>, and |m+1> sits one row up.
        let mi = m(i);
        raise[(i - 1, i)] = c((j * (j + 1.0) - mi * (mi + 1.0)).sqrt(), 0.0);
    }
    let lower = raise.adjoint();
    let sx = (&raise + &lower).scale_real(0.5);
    let sy = (&raise - &lower).scale(c(0.0, -0.5));
    let sz = ComplexMatrix::diag(&(0..dim).map(m).collect::<Vec<_>>());
    [sx, sy, sz]
}

/// `B_(ij) = |j><i| - |i><j|` on `C^dim`, 0-indexed.
pub fn antisymmetric_unit(dim: usize, i: usize, j: usize) -> ComplexMatrix {
    &ComplexMatrix::unit(dim, j, i) - &ComplexMatrix::unit(dim, i, j)
}

/// Hermitian generators `i B_(ij)`, `i < j`, of real rotations on `C^dim`.
pub fn rotation_generators(dim: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::new();
    for i in 0..dim {
        for j in (i + 1)..dim {
            out.push(antisymmetric_unit(dim, i, j).scale(I));
        }
    }
    out
}

/// A channel `rho -> sum_i K_i rho K_i^dag` on `C^dim`.
///
/// `symmetry` optionally lists Hermitian generators `G_k` of a group under
/// which the channel is covariant, `Phi(U rho U^dag) = U Phi(rho) U^dag` for
/// `U = exp(i theta n.G)`.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
    label: String,
    symmetry: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Builds a channel, checking shapes and trace preservation.
    pub fn new(label: impl Into<String>, dim: usize, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let ch = Self::new_unchecked(label, dim, kraus)?;
        let r = ch.trace_preservation_residual();
        if !(r <= tolerance::TRACE_PRESERVING) {
            return Err(Error::InvalidChannel(format!(
                "sum K^dag K deviates from identity by {r:e}"
            )));
        }
        Ok(ch)
    }

    /// Builds a channel checking only shapes; the Kraus set may be
    /// non-trace-preserving.
    pub fn new_unchecked(
        label: impl Into<String>,
        dim: usize,
        kraus: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        if dim == 0 || dim > tolerance::MAX_DIM {
            return Err(Error::SizeCap {
                dim,
                cap: tolerance::MAX_DIM,
            });
        }
        if kraus.is_empty() {
            return Err(Error::InvalidChannel("empty Kraus set".into()));
        }
        for k in &kraus {
            if k.rows() != dim || k.cols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: k.rows().max(k.cols()),
                });
            }
        }
        Ok(Self {
            dim,
            kraus,
            label: label.into(),
            symmetry: Vec::new(),
        })
    }

    pub fn with_symmetry(mut self, generators: Vec<ComplexMatrix>) -> Self {
        self.symmetry = generators;
        self
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            kraus: vec![ComplexMatrix::identity(dim)],
            label: format!("identity-{dim}"),
            symmetry: spin_matrices(dim).to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn symmetry(&self) -> &[ComplexMatrix] {
        &self.symmetry
    }

    /// `max |sum K^dag K - I|`.
    pub fn trace_preservation_residual(&self) -> f64 {
        let mut acc = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            acc += &(&k.adjoint() * k);
        }
        acc.max_abs_diff(&ComplexMatrix::identity(self.dim))
    }

    /// `max |sum K K^dag - I|`.
    pub fn unitality_residual(&self) -> f64 {
        let mut acc = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            acc += &(k * &k.adjoint());
        }
        acc.max_abs_diff(&ComplexMatrix::identity(self.dim))
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found,
            });
        }
        Ok(())
    }

    /// Linear action on an arbitrary operator.
    pub fn apply_to_operator(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        self.check_dim(m.rows())?;
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            out += &k.sandwich(m);
        }
        Ok(out)
    }

    /// Action on a state; the output is validated as a state.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(self.apply_to_operator(rho.matrix())?)
    }

    /// `sum_i (K_i psi)(K_i psi)^dag`, without forming `|psi><psi|`.
    pub fn apply_pure(&self, psi: &[Complex]) -> Result<ComplexMatrix> {
        self.check_dim(psi.len())?;
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            let v = k.mul_vec(psi);
            out += &ComplexMatrix::outer(&v, &v);
        }
        Ok(out)
    }

    /// Output state for a pure input.
    pub fn apply_to_pure(&self, psi: &PureState) -> Result<DensityMatrix> {
        Ok(DensityMatrix::from_trusted(self.apply_pure(&psi.0)?))
    }

    /// `Phi (x) Psi` with Kraus set `{K_i (x) L_j}`.
    ///
    /// When both factors carry the same number of symmetry generators the
    /// product carries `G (x) I + I (x) G'`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let dim = self.dim * other.dim;
        if dim > tolerance::MAX_DIM {
            return Err(Error::SizeCap {
                dim,
                cap: tolerance::MAX_DIM,
            });
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(kron(a, b)?);
            }
        }
        let symmetry = if !self.symmetry.is_empty() && self.symmetry.len() == other.symmetry.len()
        {
            let ia = ComplexMatrix::identity(self.dim);
            let ib = ComplexMatrix::identity(other.dim);
            self.symmetry
                .iter()
                .zip(&other.symmetry)
                .map(|(g, h)| Ok(&kron(g, &ib)? + &kron(&ia, h)?))
                .collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        Ok(Self {
            dim,
            kraus,
            label: format!("{} x {}", self.label, other.label),
            symmetry,
        })
    }

    /// Choi matrix `sum_ij |i><j| (x) Phi(|i><j|)`.
    pub fn choi_matrix(&self) -> Result<ComplexMatrix> {
        let d = self.dim;
        if d * d > tolerance::MAX_DIM {
            return Err(Error::SizeCap {
                dim: d * d,
                cap: tolerance::MAX_DIM,
            });
        }
        let mut out = ComplexMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                let block = self.apply_to_operator(&ComplexMatrix::unit(d, i, j))?;
                out += &kron(&ComplexMatrix::unit(d, i, j), &block)?;
            }
        }
        Ok(out)
    }

    /// Smallest eigenvalue of the Choi matrix.
    pub fn choi_min_eigenvalue(&self) -> Result<f64> {
        Ok(hermitian_eigen(&self.choi_matrix()?, false)?.eigenvalues[0])
    }

    pub fn to_spec(&self) -> ChannelSpec {
        ChannelSpec {
            label: self.label.clone(),
            dim: self.dim,
            kraus: self
                .kraus
                .iter()
                .map(|k| k.as_slice().iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }

    pub fn from_spec(spec: &ChannelSpec) -> Result<Self> {
        if spec.kraus.iter().flatten().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidChannel("non-finite Kraus entry".into()));
        }
        let kraus = spec
            .kraus
            .iter()
            .map(|entries| {
                ComplexMatrix::new(
                    spec.dim,
                    spec.dim,
                    entries.iter().map(|&[re, im]| c(re, im)).collect(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(spec.label.clone(), spec.dim, kraus)
    }

    pub fn to_json(&self) -> Result<String> {
        crate::report::to_json(&self.to_spec())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_spec(&serde_json::from_str(text)?)
    }
}

/// On-disk channel description: row-major `[re, im]` pairs per Kraus operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub label: String,
    pub dim: usize,
    pub kraus: Vec<Vec<[f64; 2]>>,
}

/// The isotropic spin channel `(1 / s(s+1)) sum_k S_k rho S_k`.
pub fn build_isotropic(spin: Spin, basis: Basis) -> Result<KrausChannel> {
    let gens = spin_generators(spin, basis)?;
    let w = 1.0 / spin.casimir().sqrt();
    let label = match (spin, basis) {
        (Spin::Half, _) => "phi-half",
        (Spin::One, Basis::Cartesian) => "phi-one",
        (Spin::One, Basis::Magnetic) => "phi-one-magnetic",
    };
    let kraus = gens.iter().map(|s| s.scale_real(w)).collect();
    Ok(KrausChannel::new(label, spin.dim(), kraus)?.with_symmetry(gens.to_vec()))
}

/// Transpose-depolarizing channel `(I tr mu - mu^T) / (d - 1)`, `2 <= d <= 8`.
///
/// Kraus operators are `B_(ij) / sqrt(d - 1)` for `i < j`.
pub fn build_transpose_depolarizing(d: usize) -> Result<KrausChannel> {
    if !(2..=8).contains(&d) {
        return Err(Error::DimensionOutOfRange(d));
    }
    let w = 1.0 / ((d - 1) as f64).sqrt();
    let mut kraus = Vec::with_capacity(d * (d - 1) / 2);
    for i in 0..d {
        for j in (i + 1)..d {
            kraus.push(antisymmetric_unit(d, i, j).scale_real(w));
        }
    }
    Ok(KrausChannel::new(format!("transpose-depolarizing-{d}"), d, kraus)?
        .with_symmetry(rotation_generators(d)))
}

/// Random `U = exp(i theta n.G)` with `n` uniform on the sphere and
/// `theta` uniform on `[0, 2 pi)`.
pub fn random_group_element<R: Rng + ?Sized>(
    rng: &mut R,
    generators: &[ComplexMatrix],
) -> Result<ComplexMatrix> {
    let dim = generators[0].rows();
    let n = unit_direction(rng, generators.len());
    let theta = rng.random_range(0.0..TAU);
    let mut h = ComplexMatrix::zeros(dim, dim);
    for (g, &w) in generators.iter().zip(&n) {
        h += &g.scale_real(w);
    }
    expi_hermitian(&h, theta)
}

/// `max ||Phi(U rho U^dag) - U Phi(rho) U^dag||_max` over random group
/// elements built from `generators` and random pure `rho`.
pub fn check_covariance_with(
    ch: &KrausChannel,
    generators: &[ComplexMatrix],
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if generators.is_empty() {
        return Err(Error::InvalidChannel(format!(
            "channel {} has no symmetry generators",
            ch.label
        )));
    }
    for g in generators {
        ch.check_dim(g.rows())?;
    }
    let mut worst: f64 = 0.0;
    for s in 0..samples {
        let mut rng = stream_rng(seed, s as u64);
        let u = random_group_element(&mut rng, generators)?;
        let psi = haar_vector(&mut rng, ch.dim);
        let rho = ComplexMatrix::outer(&psi, &psi);
        let lhs = ch.apply_to_operator(&u.sandwich(&rho))?;
        let rhs = u.sandwich(&ch.apply_to_operator(&rho)?);
        worst = worst.max(lhs.max_abs_diff(&rhs));
    }
    Ok(worst)
}

/// Covariance residual under the channel's own symmetry generators.
pub fn check_covariance(ch: &KrausChannel, samples: usize, seed: u64) -> Result<f64> {
    check_covariance_with(ch, &ch.symmetry, samples, seed)
}

/// Real Bloch vector of a qubit state `(I + s.sigma) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl BlochVector {
    pub fn new(s1: f64, s2: f64, s3: f64) -> Result<Self> {
        let b = Self { s1, s2, s3 };
        let n = b.norm();
        if !(n <= 1.0 + 1e-12) {
            return Err(Error::NormExceeded(n));
        }
        Ok(b)
    }

    pub fn norm(&self) -> f64 {
        (self.s1 * self.s1 + self.s2 * self.s2 + self.s3 * self.s3).sqrt()
    }

    pub fn components(&self) -> [f64; 3] {
        [self.s1, self.s2, self.s3]
    }
}

pub fn bloch_to_state(b: &BlochVector) -> Result<DensityMatrix> {
    let n = b.norm();
    if !(n <= 1.0 + 1e-12) {
        return Err(Error::NormExceeded(n));
    }
    let m = ComplexMatrix::from_rows(&[
        [c(0.5 * (1.0 + b.s3), 0.0), c(0.5 * b.s1, -0.5 * b.s2)],
        [c(0.5 * b.s1, 0.5 * b.s2), c(0.5 * (1.0 - b.s3), 0.0)],
    ]);
    Ok(DensityMatrix::from_trusted(m))
}

/// `s_k = tr(rho sigma_k)`.
pub fn state_to_bloch(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: rho.dim(),
        });
    }
    let [s1, s2, s3] = pauli().map(|s| (rho.matrix() * &s).trace().re);
    Ok(BlochVector { s1, s2, s3 })
}
