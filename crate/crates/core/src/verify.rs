//! Executable checks for the closed-form identities, channel equivalences and
//! additivity statements.
//!
//! Every check returns a [`CheckResult`] whose `passed` flag is exactly
//! `residual <= tolerance`. [`run_all`] is the aggregate used by the CLI's
//! `verify` command; its exit code gates CI.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2};

use serde::{Deserialize, Serialize};

use crate::bipartite::{
    analytic_qubit_spectrum, concavity_check, edge_entropy_profile, lambda_grid, product_output,
    qubit_output_closed_form, SchmidtForm, SchmidtVector,
};
use crate::channels::{
    antisymmetric_unit, bloch_to_state, build_isotropic, build_transpose_depolarizing,
    check_covariance, pauli, spin_generators, state_to_bloch, Basis, BlochVector, KrausChannel,
    PureState, Spin,
};
use crate::entropy::{
    holevo_covariant, holevo_ensemble_value, min_output_entropy, min_output_entropy_with,
    output_entropy, CovarianceCertificate, Ensemble, EntropyReport, MinEntropyOptions,
};
use crate::error::{Error, Result};
use crate::numerics::{c, commutator, eigenvalues, ComplexMatrix, I, ONE, ZERO};
use crate::random::{ball_point, haar_unitary, stream_rng};
use crate::report;
use crate::tolerance;

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
    pub details: String,
}

impl CheckResult {
    pub fn new(
        name: impl Into<String>,
        residual: f64,
        tolerance: f64,
        details: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            passed: residual <= tolerance,
            residual,
            tolerance,
            details: details.into(),
        }
    }
}

/// `sum_k sigma_k X sigma_k`.
fn pauli_twirl(x: &ComplexMatrix) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(2, 2);
    for s in pauli() {
        acc += &s.sandwich(x);
    }
    acc
}

/// `sum_k sigma_k sigma_i sigma_k = -sigma_i` and the four matrix-unit
/// identities `sum_k sigma_k |i><j| sigma_k = 2 I delta_ij - |i><j|`.
pub fn pauli_identities() -> Vec<CheckResult> {
    let mut out = Vec::new();
    for (i, s) in pauli().iter().enumerate() {
        let r = pauli_twirl(s).max_abs_diff(&-s);
        out.push(CheckResult::new(
            format!("pauli_twirl_sigma_{}", i + 1),
            r,
            tolerance::EXACT_IDENTITY,
            format!("sum_k s_k s_{} s_k = -s_{}", i + 1, i + 1),
        ));
    }
    for i in 0..2 {
        for j in 0..2 {
            let unit = ComplexMatrix::unit(2, i, j);
            let delta = if i == j { 2.0 } else { 0.0 };
            let expected = &ComplexMatrix::identity(2).scale_real(delta) - &unit;
            out.push(CheckResult::new(
                format!("pauli_twirl_unit_{i}{j}"),
                pauli_twirl(&unit).max_abs_diff(&expected),
                tolerance::EXACT_IDENTITY,
                format!("sum_k s_k |{i}><{j}| s_k = {delta} I - |{i}><{j}|"),
            ));
        }
    }
    out
}

/// Largest residual of two channels over all `d^2` matrix units.
pub fn pointwise_residual(a: &KrausChannel, b: &KrausChannel) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let d = a.dim();
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let e = ComplexMatrix::unit(d, i, j);
            worst = worst.max(a.apply_to_operator(&e)?.max_abs_diff(&b.apply_to_operator(&e)?));
        }
    }
    Ok(worst)
}

/// Pointwise equality on matrix units, which suffices by linearity.
pub fn pointwise_equivalence(a: &KrausChannel, b: &KrausChannel) -> Result<CheckResult> {
    let r = pointwise_residual(a, b)?;
    Ok(CheckResult::new(
        format!("pointwise_{}_vs_{}", a.label(), b.label()),
        r,
        tolerance::POINTWISE,
        "max over matrix units of ||a(E_ij) - b(E_ij)||_max",
    ))
}

/// Basis change taking the magnetic spin-1 operators to the cartesian ones,
/// `S'_k = V S_k V^dag`.
pub fn magnetic_to_cartesian() -> ComplexMatrix {
    let r = c(FRAC_1_SQRT_2, 0.0);
    let ir = c(0.0, FRAC_1_SQRT_2);
    ComplexMatrix::from_rows(&[[-r, ZERO, r], [-ir, ZERO, -ir], [ZERO, ONE, ZERO]])
}

/// `V V^dag = I`, `V S_k V^dag = S'_k`, and the diagnostic `V V^T = diag(1, -1, 1)`.
pub fn unitary_relation_check() -> Vec<CheckResult> {
    let v = magnetic_to_cartesian();
    let vd = v.adjoint();
    let mut out = vec![CheckResult::new(
        "v_unitary",
        (&v * &vd).max_abs_diff(&ComplexMatrix::identity(3)),
        tolerance::EXACT_IDENTITY,
        "V V^dag = I",
    )];
    let s = spin_generators(Spin::One, Basis::Magnetic).expect("spin one magnetic");
    let sp = spin_generators(Spin::One, Basis::Cartesian).expect("spin one cartesian");
    for k in 0..3 {
        out.push(CheckResult::new(
            format!("v_maps_s{}", k + 1),
            (&(&v * &s[k]) * &vd).max_abs_diff(&sp[k]),
            tolerance::EXACT_IDENTITY,
            format!("V S_{} V^dag = S'_{}", k + 1, k + 1),
        ));
    }
    let vvt = &v * &v.transpose();
    out.push(CheckResult::new(
        "v_vt_diagonal",
        vvt.max_abs_diff(&ComplexMatrix::diag(&[1.0, -1.0, 1.0])),
        tolerance::EXACT_IDENTITY,
        "V V^T = diag(1, -1, 1); V is not real, so the magnetic and cartesian \
         channels agree only up to conjugation by V",
    ));
    out
}

/// Largest residual of `[S_i, S_j] = i eps_ijk S_k` over the three cyclic pairs.
pub fn commutation_residual(ops: &[ComplexMatrix]) -> Result<f64> {
    if ops.len() != 3 {
        return Err(Error::InvalidState(format!("expected 3 operators, got {}", ops.len())));
    }
    let d = ops[0].rows();
    for op in ops {
        if !op.is_square() || op.rows() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: op.rows(),
            });
        }
    }
    Ok((0..3)
        .map(|i| {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            commutator(&ops[i], &ops[j]).max_abs_diff(&ops[k].scale(I))
        })
        .fold(0.0, f64::max))
}

pub fn commutation_check(name: &str, ops: &[ComplexMatrix]) -> Result<CheckResult> {
    Ok(CheckResult::new(
        format!("commutation_{name}"),
        commutation_residual(ops)?,
        tolerance::EXACT_IDENTITY,
        "[A_i, A_j] = i eps_ijk A_k",
    ))
}

/// Hermitian spin-1 generators built from the antisymmetric units on `C^3`:
/// `A_1 = i B_(12)`, `A_2 = i B_(23)`, `A_3 = i B_(31)`.
///
/// Each `A_k` differs from the corresponding `B` only by a phase, so
/// `(1/2) sum_k A_k rho A_k^dag` is still the transpose-depolarizing channel.
pub fn transpose_depolarizing_generators() -> [ComplexMatrix; 3] {
    [(0, 1), (1, 2), (2, 0)].map(|(i, j)| antisymmetric_unit(3, i, j).scale(I))
}

/// The assignment `A_1 = B_(12)`, `A_2 = B_(23)`, `A_3 = i B_(31)`.
///
/// `A_1` and `A_2` are anti-Hermitian here, and `[A_1, A_2] = B_(31) = -i A_3`
/// has the wrong sign; kept so the discrepancy stays measurable.
pub fn mixed_phase_generators() -> [ComplexMatrix; 3] {
    [
        antisymmetric_unit(3, 0, 1),
        antisymmetric_unit(3, 1, 2),
        antisymmetric_unit(3, 2, 0).scale(I),
    ]
}

/// Channel `(1/2) sum_k A_k rho A_k^dag`.
pub fn channel_from_generators(label: &str, ops: &[ComplexMatrix; 3]) -> Result<KrausChannel> {
    let kraus = ops.iter().map(|a| a.scale_real(FRAC_1_SQRT_2)).collect();
    KrausChannel::new(label, 3, kraus)
}

/// Two-use minimum output entropy probe.
#[derive(Debug, Clone)]
pub struct AdditivityProbe {
    pub check: CheckResult,
    pub single: EntropyReport,
    pub product: EntropyReport,
    /// Lowest output entropy among the Haar-random entangled samples.
    pub entangled_min: f64,
    /// State whose output undercuts `2 h(Phi)`, if any.
    pub certificate: Option<PureState>,
}

/// Lowest two-use output entropy over `samples` Haar-random inputs on
/// `C^d (x) C^d`, with the minimizing state.
///
/// Sample `s` uses stream `ENTANGLED_STREAM + s`, so the minimum over the
/// first `n` samples is a prefix minimum and never increases with `n`.
pub fn entangled_sample_minimum(
    product: &KrausChannel,
    samples: usize,
    seed: u64,
) -> Result<(f64, Option<PureState>)> {
    let mut best = f64::INFINITY;
    let mut arg = None;
    for s in 0..samples {
        let mut rng = stream_rng(seed, ENTANGLED_STREAM + s as u64);
        let psi = PureState::haar(&mut rng, product.dim());
        let e = output_entropy(product, &psi)?;
        if e < best {
            best = e;
            arg = Some(psi);
        }
    }
    Ok((best, arg))
}

const ENTANGLED_STREAM: u64 = 1 << 32;
const PROBE_START_STREAM: u64 = 1 << 33;
const BASIS_STREAM: u64 = 1 << 34;

fn state_json(psi: &PureState) -> serde_json::Value {
    serde_json::json!(psi
        .amplitudes()
        .iter()
        .map(|z| [z.re, z.im])
        .collect::<Vec<_>>())
}

/// Compares `h(Phi (x) Phi)` with `2 h(Phi)`.
///
/// The two-use search starts alternately from random product states and
/// Haar-random entangled states. Passes when the gap is below `1e-6` and no
/// entangled sample beats `2 h(Phi) - 1e-9`; on failure the offending state
/// is serialized into `details`.
pub fn additivity_probe(
    ch: &KrausChannel,
    samples: usize,
    restarts: usize,
    seed: u64,
) -> Result<AdditivityProbe> {
    let d = ch.dim();
    if d * d > crate::entropy::MAX_OPT_DIM {
        return Err(Error::SizeCap {
            dim: d * d,
            cap: crate::entropy::MAX_OPT_DIM,
        });
    }
    let single = min_output_entropy(ch, restarts, tolerance::OPTIMIZER_SPAN, seed)?;
    let two_h = 2.0 * single.min_entropy;
    let pp = ch.tensor(ch)?;

    let initial_states = (0..restarts)
        .map(|r| {
            let mut rng = stream_rng(seed, PROBE_START_STREAM + r as u64);
            if r % 2 == 0 {
                PureState::haar(&mut rng, d).tensor(&PureState::haar(&mut rng, d))
            } else {
                PureState::haar(&mut rng, d * d)
            }
        })
        .collect();
    let product = min_output_entropy_with(
        &pp,
        &MinEntropyOptions {
            restarts,
            seed,
            initial_states,
            ..MinEntropyOptions::default()
        },
    )?;
    let (entangled_min, entangled_arg) = entangled_sample_minimum(&pp, samples, seed)?;

    let gap = (product.min_entropy - two_h).abs();
    let beaten = entangled_min < two_h - tolerance::ENTANGLED_SLACK;
    let certificate = if beaten {
        entangled_arg
    } else if product.min_entropy < two_h - tolerance::ADDITIVITY {
        Some(product.argmin.clone())
    } else {
        None
    };
    let residual = if beaten {
        gap.max(tolerance::ADDITIVITY + (two_h - entangled_min))
    } else {
        gap
    };
    let mut details = serde_json::json!({
        "h_single": single.min_entropy,
        "h_product": product.min_entropy,
        "two_h_single": two_h,
        "entangled_min": entangled_min,
        "entangled_samples": samples,
        "restarts": restarts,
    });
    if let Some(psi) = &certificate {
        details["certificate"] = state_json(psi);
    }
    let check = CheckResult::new(
        format!("additivity_{}", ch.label()),
        residual,
        tolerance::ADDITIVITY,
        report::to_json(&details)?,
    );
    Ok(AdditivityProbe {
        check,
        single,
        product,
        entangled_min,
        certificate,
    })
}

/// Bloch image of the spin-1/2 channel is `-s/3` for random `s` in the ball.
pub fn unot_check(samples: usize, seed: u64) -> Result<CheckResult> {
    let ch = build_isotropic(Spin::Half, Basis::Magnetic)?;
    let mut worst: f64 = 0.0;
    for s in 0..samples {
        let mut rng = stream_rng(seed, s as u64);
        let [s1, s2, s3] = ball_point(&mut rng);
        let b = BlochVector::new(s1, s2, s3)?;
        let out = state_to_bloch(&ch.apply(&bloch_to_state(&b)?)?)?;
        for (x, y) in out.components().iter().zip(b.components()) {
            worst = worst.max((x + y / 3.0).abs());
        }
    }
    Ok(CheckResult::new(
        "unot_bloch_contraction",
        worst,
        tolerance::BLOCH,
        format!("s' = -s/3 over {samples} random Bloch vectors"),
    ))
}

/// For random local bases, the two-use entropy along the Schmidt simplex is
/// smallest at a vertex.
pub fn vertex_minimum_check(
    ch: &KrausChannel,
    basis_pairs: usize,
    grid: usize,
    seed: u64,
) -> Result<CheckResult> {
    let d = ch.dim();
    let mut worst: f64 = 0.0;
    for s in 0..basis_pairs {
        let mut rng = stream_rng(seed, BASIS_STREAM + s as u64);
        let u1 = haar_unitary(&mut rng, d);
        let u2 = haar_unitary(&mut rng, d);
        let profile = edge_entropy_profile(ch, grid, &u1, &u2)?;
        let lowest = profile.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        let vertex = profile[0].1.min(profile[profile.len() - 1].1);
        worst = worst.max(vertex - lowest);
    }
    Ok(CheckResult::new(
        format!("vertex_minimum_{}", ch.label()),
        worst,
        tolerance::SPECTRUM,
        format!("{basis_pairs} random basis pairs, {grid}-point grid; residual = vertex - min"),
    ))
}

/// Settings for [`run_all_with`].
#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub seed: u64,
    pub restarts: usize,
    pub covariance_samples: usize,
    pub entangled_samples: usize,
    pub grid: usize,
    /// Adds the three-use check `h(Phi^{x3}) = 3 h(Phi)` for spin-1/2.
    pub three_fold: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            seed: 42,
            restarts: 64,
            covariance_samples: 100,
            entangled_samples: 10_000,
            grid: 101,
            three_fold: false,
        }
    }
}

/// Runs every check with default settings under `seed`.
pub fn run_all(seed: u64) -> Result<Vec<CheckResult>> {
    run_all_with(&SuiteOptions {
        seed,
        ..SuiteOptions::default()
    })
}

pub fn run_all_with(opts: &SuiteOptions) -> Result<Vec<CheckResult>> {
    let seed = opts.seed;
    let phi_half = build_isotropic(Spin::Half, Basis::Magnetic)?;
    let phi_one = build_isotropic(Spin::One, Basis::Cartesian)?;
    let phi_one_mag = build_isotropic(Spin::One, Basis::Magnetic)?;
    let td3 = build_transpose_depolarizing(3)?;

    let mut out = pauli_identities();
    out.extend(unitary_relation_check());

    out.push(commutation_check(
        "half",
        &spin_generators(Spin::Half, Basis::Magnetic)?,
    )?);
    out.push(commutation_check(
        "one_cartesian",
        &spin_generators(Spin::One, Basis::Cartesian)?,
    )?);
    out.push(commutation_check(
        "one_magnetic",
        &spin_generators(Spin::One, Basis::Magnetic)?,
    )?);
    let a_ops = transpose_depolarizing_generators();
    out.push(commutation_check("antisymmetric_units", &a_ops)?);
    let a_channel = channel_from_generators("antisymmetric-units", &a_ops)?;
    out.push(pointwise_equivalence(&a_channel, &td3)?);

    out.push(pointwise_equivalence(&phi_one, &td3)?);
    let magnetic_gap = pointwise_residual(&phi_one_mag, &td3)?;
    out.push(CheckResult::new(
        "pointwise_phi-one-magnetic_differs",
        (0.4 - magnetic_gap).max(0.0),
        0.0,
        format!("magnetic-basis Kraus set differs from the transpose-depolarizing channel on matrix units by {magnetic_gap}"),
    ));

    for ch in [&phi_half, &phi_one, &phi_one_mag] {
        out.push(CheckResult::new(
            format!("covariance_{}", ch.label()),
            check_covariance(ch, opts.covariance_samples, seed)?,
            tolerance::POINTWISE.max(1e-10),
            format!("{} random group elements", opts.covariance_samples),
        ));
    }

    let mut builders = vec![phi_half.clone(), phi_one.clone(), phi_one_mag.clone()];
    for d in 2..=4 {
        builders.push(build_transpose_depolarizing(d)?);
    }
    for ch in &builders {
        out.push(CheckResult::new(
            format!("bistochastic_{}", ch.label()),
            ch.trace_preservation_residual().max(ch.unitality_residual()),
            tolerance::TRACE_PRESERVING,
            "sum K^dag K = I and sum K K^dag = I",
        ));
        out.push(CheckResult::new(
            format!("choi_psd_{}", ch.label()),
            (-ch.choi_min_eigenvalue()?).max(0.0),
            tolerance::TRACE_PRESERVING,
            "negative part of the smallest Choi eigenvalue",
        ));
    }

    out.push(unot_check(100, seed)?);

    // Single-use minimum output entropies.
    let h_half_exact = 3f64.ln() - 2.0 / 3.0 * LN_2;
    let moe_half = min_output_entropy(&phi_half, opts.restarts, tolerance::OPTIMIZER_SPAN, seed)?;
    out.push(CheckResult::new(
        "min_entropy_phi-half",
        (moe_half.min_entropy - h_half_exact).abs(),
        tolerance::OPTIMIZER,
        format!("h = {} vs ln 3 - (2/3) ln 2", moe_half.min_entropy),
    ));
    let moe_one = min_output_entropy(&phi_one, opts.restarts, tolerance::OPTIMIZER_SPAN, seed)?;
    let moe_one_mag = min_output_entropy(&phi_one_mag, opts.restarts, tolerance::OPTIMIZER_SPAN, seed)?;
    out.push(CheckResult::new(
        "min_entropy_phi-one_basis_independent",
        (moe_one.min_entropy - moe_one_mag.min_entropy).abs(),
        tolerance::OPTIMIZER,
        format!(
            "cartesian {} vs magnetic {}",
            moe_one.min_entropy, moe_one_mag.min_entropy
        ),
    ));
    for d in 2..=4 {
        let ch = build_transpose_depolarizing(d)?;
        let moe = min_output_entropy(&ch, opts.restarts, tolerance::OPTIMIZER_SPAN, seed)?;
        let exact = ((d - 1) as f64).ln();
        out.push(CheckResult::new(
            format!("min_entropy_{}", ch.label()),
            (moe.min_entropy - exact).abs(),
            tolerance::OPTIMIZER,
            format!("h = {} vs ln(d - 1) = {exact}", moe.min_entropy),
        ));
    }

    // Capacities through the covariant shortcut.
    for (ch, moe, exact) in [
        (&phi_half, &moe_half, 5.0 / 3.0 * LN_2 - 3f64.ln()),
        (&phi_one, &moe_one, 3f64.ln() - LN_2),
    ] {
        let cert = CovarianceCertificate::verify(ch, opts.covariance_samples, seed)?;
        let chi = holevo_covariant(ch, moe, &cert)?;
        out.push(CheckResult::new(
            format!("capacity_{}", ch.label()),
            (chi - exact).abs(),
            tolerance::OPTIMIZER,
            format!("chi = {chi} vs {exact}"),
        ));
    }
    let ens = Ensemble::new(
        vec![0.5, 0.5],
        vec![PureState::basis(2, 0).density(), PureState::basis(2, 1).density()],
    )?;
    let ens_value = holevo_ensemble_value(&phi_half, &ens)?;
    out.push(CheckResult::new(
        "ensemble_capacity_phi-half",
        (ens_value - (5.0 / 3.0 * LN_2 - 3f64.ln())).abs(),
        1e-9,
        format!("two-state ensemble value {ens_value}"),
    ));

    // Two-use output of the spin-1/2 channel.
    let mut spectrum_residual: f64 = 0.0;
    let mut closed_form_residual: f64 = 0.0;
    for l1 in lambda_grid(opts.grid) {
        let form = SchmidtForm::canonical(SchmidtVector::qubit(l1)?);
        let sigma = product_output(&phi_half, &form)?;
        closed_form_residual =
            closed_form_residual.max(sigma.matrix().max_abs_diff(&qubit_output_closed_form(l1)?));
        let numeric = eigenvalues(sigma.matrix())?;
        let mut analytic = analytic_qubit_spectrum(l1)?.to_vec();
        analytic.sort_by(f64::total_cmp);
        for (a, b) in numeric.iter().zip(&analytic) {
            spectrum_residual = spectrum_residual.max((a - b).abs());
        }
    }
    out.push(CheckResult::new(
        "two_use_spectrum_phi-half",
        spectrum_residual,
        tolerance::SPECTRUM,
        format!("numerical vs closed-form spectrum on {} points", opts.grid),
    ));
    out.push(CheckResult::new(
        "two_use_closed_form_phi-half",
        closed_form_residual,
        tolerance::CLOSED_FORM,
        "Kraus-path output vs closed-form matrix",
    ));
    let conc = concavity_check(opts.grid, 1e-4)?;
    out.push(CheckResult::new(
        "concavity_phi-half",
        conc.max_second_derivative.max(0.0),
        0.0,
        format!(
            "second differences in [{}, {}] over {} interior points",
            conc.min_second_derivative, conc.max_second_derivative, conc.points
        ),
    ));
    out.push(CheckResult::new(
        "eigenvalue_sum_product_identities",
        conc.sum_residual.max(conc.product_residual),
        tolerance::CLOSED_FORM,
        "f1 + f2 = 10/18 and f1 f2 = (16 + 32 l1 (1 - l1)) / 324",
    ));
    out.push(vertex_minimum_check(&phi_half, 50, 21, seed)?);

    out.push(additivity_probe(&phi_half, opts.entangled_samples, opts.restarts, seed)?.check);
    out.push(additivity_probe(&td3, opts.entangled_samples, opts.restarts, seed)?.check);

    if opts.three_fold {
        out.push(three_fold_check(&phi_half, opts.restarts, seed)?);
    }

    out.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(out)
}

/// `h(Phi (x) Phi (x) Phi) = 3 h(Phi)`.
pub fn three_fold_check(ch: &KrausChannel, restarts: usize, seed: u64) -> Result<CheckResult> {
    let single = min_output_entropy(ch, restarts, tolerance::OPTIMIZER_SPAN, seed)?;
    let triple = ch.tensor(ch)?.tensor(ch)?;
    let moe = min_output_entropy(&triple, restarts, tolerance::OPTIMIZER_SPAN, seed)?;
    Ok(CheckResult::new(
        format!("additivity_three_fold_{}", ch.label()),
        (moe.min_entropy - 3.0 * single.min_entropy).abs(),
        tolerance::ADDITIVITY,
        format!("h3 = {}, 3h = {}", moe.min_entropy, 3.0 * single.min_entropy),
    ))
}

/// Serializes a list of checks as the JSON verification report.
pub fn report_json(checks: &[CheckResult]) -> Result<String> {
    report::to_json(checks)
}
