//! Von Neumann entropy, minimum output entropy and Holevo quantities.
//!
//! All entropies are in nats. The minimum output entropy is searched over
//! pure inputs only: the output entropy is concave in the input, so its
//! minimum sits on an extreme point of the state space.

use serde::Serialize;

use crate::channels::{check_covariance, DensityMatrix, KrausChannel, PureState};
use crate::error::{Error, Result};
use crate::numerics::{c, eigenvalues, Complex, ComplexMatrix};
use crate::optim::{nelder_mead, SimplexOptions};
use crate::random::{gaussian_vector, stream_rng};
use crate::report::Units;
use crate::tolerance;

/// Largest channel dimension accepted by [`min_output_entropy`].
pub const MAX_OPT_DIM: usize = 16;

/// `-sum l ln l` over a spectrum, with `0 ln 0 = 0`.
///
/// Eigenvalues in `[-1e-12, 0)` are clipped to zero; anything more negative
/// is rejected.
pub fn entropy_of_spectrum(eigs: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &l in eigs {
        if l < -tolerance::ENTROPY_CLIP || !l.is_finite() {
            return Err(Error::InvalidState(format!("eigenvalue {l:e} is negative")));
        }
        if l > 0.0 {
            s -= l * l.ln();
        }
    }
    Ok(s.max(0.0))
}

pub(crate) fn entropy_of_matrix(m: &ComplexMatrix) -> Result<f64> {
    entropy_of_spectrum(&eigenvalues(m)?)
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    entropy_of_matrix(rho.matrix())
}

/// `S(Phi(|psi><psi|))`.
pub fn output_entropy(ch: &KrausChannel, psi: &PureState) -> Result<f64> {
    entropy_of_matrix(&ch.apply_pure(psi.amplitudes())?)
}

/// Settings for [`min_output_entropy_with`].
#[derive(Debug, Clone)]
pub struct MinEntropyOptions {
    pub restarts: usize,
    /// Simplex objective span at which a restart counts as converged.
    pub tol: f64,
    pub seed: u64,
    /// Starting points for the first restarts; the rest start Haar-random.
    pub initial_states: Vec<PureState>,
    pub simplex: SimplexOptions,
}

impl Default for MinEntropyOptions {
    fn default() -> Self {
        Self {
            restarts: 64,
            tol: tolerance::OPTIMIZER_SPAN,
            seed: 42,
            initial_states: Vec::new(),
            simplex: SimplexOptions::default(),
        }
    }
}

/// Result of a minimum output entropy search.
#[derive(Debug, Clone)]
pub struct EntropyReport {
    pub min_entropy: f64,
    pub argmin: PureState,
    pub restarts: usize,
    pub converged_restarts: usize,
    pub best_restart_index: usize,
    pub objective_evals: usize,
    pub seed: u64,
    /// Best value reached by each restart, in restart order.
    pub restart_minima: Vec<f64>,
}

impl EntropyReport {
    /// JSON object `{ "min_entropy_<unit>", "argmin", "restarts", "converged", "seed" }`.
    pub fn to_json_value(&self, units: Units) -> serde_json::Value {
        let argmin: Vec<[f64; 2]> = self.argmin.amplitudes().iter().map(|z| [z.re, z.im]).collect();
        let mut obj = serde_json::Map::new();
        obj.insert(
            units.field("min_entropy"),
            serde_json::json!(units.convert(self.min_entropy)),
        );
        obj.insert("argmin".into(), serde_json::json!(argmin));
        obj.insert("restarts".into(), serde_json::json!(self.restarts));
        obj.insert("converged".into(), serde_json::json!(self.converged_restarts));
        obj.insert("seed".into(), serde_json::json!(self.seed));
        serde_json::Value::Object(obj)
    }
}

fn to_coords(psi: &[Complex]) -> Vec<f64> {
    psi.iter().flat_map(|z| [z.re, z.im]).collect()
}

fn from_coords(x: &[f64]) -> Vec<Complex> {
    x.chunks_exact(2).map(|p| c(p[0], p[1])).collect()
}

/// Objective on `2d` real coordinates, normalized on evaluation.
fn objective(ch: &KrausChannel, x: &[f64]) -> f64 {
    let v = from_coords(x);
    let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(nv > 1e-150 && nv.is_finite()) {
        return (ch.dim() as f64).ln() + 1.0;
    }
    let psi: Vec<Complex> = v.into_iter().map(|z| z / nv).collect();
    ch.apply_pure(&psi)
        .and_then(|out| entropy_of_matrix(&out))
        .unwrap_or(f64::INFINITY)
}

/// Output entropy of the pure state with real coordinates `x`, as seen by
/// the optimizer. Exposed for finite-difference optimality checks.
pub fn objective_at(ch: &KrausChannel, x: &[f64]) -> f64 {
    objective(ch, x)
}

/// Real coordinates of a pure state, in the layout used by [`objective_at`].
pub fn state_coordinates(psi: &PureState) -> Vec<f64> {
    to_coords(psi.amplitudes())
}

struct RestartOutcome {
    x: Vec<f64>,
    fx: f64,
    evals: usize,
    converged: bool,
}

fn run_restart(ch: &KrausChannel, opts: &MinEntropyOptions, r: usize) -> RestartOutcome {
    let start = match opts.initial_states.get(r) {
        Some(psi) => to_coords(psi.amplitudes()),
        None => {
            let mut rng = stream_rng(opts.seed, r as u64);
            to_coords(&gaussian_vector(&mut rng, ch.dim()))
        }
    };
    let simplex = SimplexOptions {
        ftol: opts.tol,
        ..opts.simplex.clone()
    };
    let res = nelder_mead(|x| objective(ch, x), &start, &simplex);
    RestartOutcome {
        x: res.x,
        fx: res.fx,
        evals: res.evals,
        converged: res.converged,
    }
}

#[cfg(feature = "parallel")]
fn run_all_restarts(ch: &KrausChannel, opts: &MinEntropyOptions) -> Vec<RestartOutcome> {
    use rayon::prelude::*;
    (0..opts.restarts)
        .into_par_iter()
        .map(|r| run_restart(ch, opts, r))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn run_all_restarts(ch: &KrausChannel, opts: &MinEntropyOptions) -> Vec<RestartOutcome> {
    (0..opts.restarts).map(|r| run_restart(ch, opts, r)).collect()
}

/// Minimum output entropy with default simplex settings.
pub fn min_output_entropy(
    ch: &KrausChannel,
    restarts: usize,
    tol: f64,
    seed: u64,
) -> Result<EntropyReport> {
    min_output_entropy_with(
        ch,
        &MinEntropyOptions {
            restarts,
            tol,
            seed,
            ..MinEntropyOptions::default()
        },
    )
}

/// Multistart simplex search for `min_psi S(Phi(|psi><psi|))`.
///
/// Restart `r` draws its start from the stream `(seed, r)`; the winner is
/// the lowest value, ties going to the lower restart index, so the result
/// does not depend on how restarts are scheduled.
pub fn min_output_entropy_with(ch: &KrausChannel, opts: &MinEntropyOptions) -> Result<EntropyReport> {
    if ch.dim() > MAX_OPT_DIM {
        return Err(Error::SizeCap {
            dim: ch.dim(),
            cap: MAX_OPT_DIM,
        });
    }
    for psi in &opts.initial_states {
        if psi.dim() != ch.dim() {
            return Err(Error::DimensionMismatch {
                expected: ch.dim(),
                found: psi.dim(),
            });
        }
    }
    let outcomes = run_all_restarts(ch, opts);
    let converged_restarts = outcomes.iter().filter(|o| o.converged).count();
    if converged_restarts == 0 {
        return Err(Error::OptimizerStall {
            restarts: opts.restarts,
        });
    }
    let mut best = 0;
    for (i, o) in outcomes.iter().enumerate() {
        if o.fx < outcomes[best].fx {
            best = i;
        }
    }
    let argmin = PureState::normalize(&from_coords(&outcomes[best].x))?;
    let min_entropy = output_entropy(ch, &argmin)?;
    Ok(EntropyReport {
        min_entropy,
        argmin,
        restarts: opts.restarts,
        converged_restarts,
        best_restart_index: best,
        objective_evals: outcomes.iter().map(|o| o.evals).sum(),
        seed: opts.seed,
        restart_minima: outcomes.iter().map(|o| o.fx).collect(),
    })
}

/// Proof that a channel passed the covariance check, required by
/// [`holevo_covariant`].
#[derive(Debug, Clone, Serialize)]
pub struct CovarianceCertificate {
    pub label: String,
    pub dim: usize,
    pub residual: f64,
    pub samples: usize,
    pub seed: u64,
}

impl CovarianceCertificate {
    /// Runs the covariance check and issues a certificate when the residual
    /// is below `1e-8`.
    pub fn verify(ch: &KrausChannel, samples: usize, seed: u64) -> Result<Self> {
        let residual = check_covariance(ch, samples, seed)?;
        if !(residual < tolerance::COVARIANCE) {
            return Err(Error::CovarianceNotVerified { residual });
        }
        Ok(Self {
            label: ch.label().to_string(),
            dim: ch.dim(),
            residual,
            samples,
            seed,
        })
    }
}

/// `chi = ln d - h` for a channel with verified covariance.
pub fn holevo_covariant(
    ch: &KrausChannel,
    moe: &EntropyReport,
    cert: &CovarianceCertificate,
) -> Result<f64> {
    if cert.label != ch.label() || cert.dim != ch.dim() || !(cert.residual < tolerance::COVARIANCE)
    {
        return Err(Error::CovarianceNotVerified {
            residual: cert.residual,
        });
    }
    if moe.argmin.dim() != ch.dim() {
        return Err(Error::DimensionMismatch {
            expected: ch.dim(),
            found: moe.argmin.dim(),
        });
    }
    Ok((ch.dim() as f64).ln() - moe.min_entropy)
}

/// Finite ensemble `{p_j, rho_j}`.
#[derive(Debug, Clone)]
pub struct Ensemble {
    probs: Vec<f64>,
    states: Vec<DensityMatrix>,
}

impl Ensemble {
    pub fn new(probs: Vec<f64>, states: Vec<DensityMatrix>) -> Result<Self> {
        if probs.is_empty() || probs.len() != states.len() {
            return Err(Error::InvalidEnsemble(format!(
                "{} probabilities for {} states",
                probs.len(),
                states.len()
            )));
        }
        if probs.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::InvalidEnsemble("negative probability".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidEnsemble(format!("probabilities sum to {total}")));
        }
        let d = states[0].dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: bad.dim(),
            });
        }
        Ok(Self { probs, states })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    /// `sum_j p_j rho_j`.
    pub fn average(&self) -> DensityMatrix {
        let d = self.dim();
        let mut acc = ComplexMatrix::zeros(d, d);
        for (p, s) in self.probs.iter().zip(&self.states) {
            acc += &s.matrix().scale_real(*p);
        }
        DensityMatrix::from_trusted(acc)
    }
}

/// `S(Phi(sum p_j rho_j)) - sum p_j S(Phi(rho_j))`, a lower bound on `chi`.
pub fn holevo_ensemble_value(ch: &KrausChannel, ens: &Ensemble) -> Result<f64> {
    if ens.dim() != ch.dim() {
        return Err(Error::DimensionMismatch {
            expected: ch.dim(),
            found: ens.dim(),
        });
    }
    let avg = entropy_of_matrix(&ch.apply_to_operator(ens.average().matrix())?)?;
    let mut each = 0.0;
    for (p, s) in ens.probs.iter().zip(&ens.states) {
        each += p * entropy_of_matrix(&ch.apply_to_operator(s.matrix())?)?;
    }
    Ok(avg - each)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{build_isotropic, build_transpose_depolarizing, Basis, Spin};
    use std::f64::consts::LN_2;

    fn h_half() -> f64 {
        3f64.ln() - 2.0 / 3.0 * LN_2
    }

    #[test]
    fn entropy_examples() {
        let rho = DensityMatrix::new(ComplexMatrix::diag(&[2.0 / 3.0, 1.0 / 3.0])).unwrap();
        let s = von_neumann_entropy(&rho).unwrap();
        assert!((s - h_half()).abs() < 1e-15);
        assert!((s - 0.6365142).abs() < 1e-7);
        assert!(von_neumann_entropy(&PureState::basis(3, 1).density()).unwrap().abs() < 1e-15);
        let mixed = von_neumann_entropy(&DensityMatrix::maximally_mixed(2)).unwrap();
        assert!((mixed - LN_2).abs() < 1e-15);
    }

    #[test]
    fn entropy_clipping() {
        assert_eq!(entropy_of_spectrum(&[1.0, -5e-13]).unwrap(), 0.0);
        assert!(matches!(
            entropy_of_spectrum(&[1.0 + 1e-9, -1e-9]),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn min_entropy_of_phi_half() {
        let ch = build_isotropic(Spin::Half, Basis::Magnetic).unwrap();
        let r = min_output_entropy(&ch, 8, 1e-10, 42).unwrap();
        assert!((r.min_entropy - h_half()).abs() < 1e-7);
        assert_eq!(r.restarts, 8);
        assert!(r.converged_restarts > 0);
        assert!((output_entropy(&ch, &r.argmin).unwrap() - r.min_entropy).abs() < 1e-9);
    }

    #[test]
    fn min_entropy_of_transpose_depolarizing_and_identity() {
        let ch = build_transpose_depolarizing(3).unwrap();
        let r = min_output_entropy(&ch, 8, 1e-10, 1).unwrap();
        assert!((r.min_entropy - LN_2).abs() < 1e-7);
        let id = KrausChannel::identity(3);
        let r = min_output_entropy(&id, 8, 1e-10, 1).unwrap();
        assert!(r.min_entropy.abs() < 1e-9, "{}", r.min_entropy);
    }

    #[test]
    fn min_entropy_is_deterministic() {
        let ch = build_isotropic(Spin::One, Basis::Magnetic).unwrap();
        let a = min_output_entropy(&ch, 6, 1e-10, 9).unwrap();
        let b = min_output_entropy(&ch, 6, 1e-10, 9).unwrap();
        assert_eq!(a.min_entropy.to_bits(), b.min_entropy.to_bits());
        assert_eq!(a.argmin, b.argmin);
        assert_eq!(a.best_restart_index, b.best_restart_index);
    }

    #[test]
    fn stall_when_nothing_converges() {
        let ch = build_transpose_depolarizing(3).unwrap();
        let opts = MinEntropyOptions {
            restarts: 2,
            simplex: SimplexOptions {
                max_evals: 5,
                max_reruns: 0,
                ..SimplexOptions::default()
            },
            tol: 0.0,
            ..MinEntropyOptions::default()
        };
        assert!(matches!(
            min_output_entropy_with(&ch, &opts),
            Err(Error::OptimizerStall { restarts: 2 })
        ));
    }

    #[test]
    fn capacity_via_covariance() {
        let ch = build_isotropic(Spin::Half, Basis::Magnetic).unwrap();
        let moe = min_output_entropy(&ch, 4, 1e-10, 3).unwrap();
        let cert = CovarianceCertificate::verify(&ch, 50, 3).unwrap();
        let chi = holevo_covariant(&ch, &moe, &cert).unwrap();
        assert!((chi - (5.0 / 3.0 * LN_2 - 3f64.ln())).abs() < 1e-7);

        let id = KrausChannel::identity(4);
        let moe = min_output_entropy(&id, 4, 1e-10, 3).unwrap();
        let cert = CovarianceCertificate::verify(&id, 20, 3).unwrap();
        assert!((holevo_covariant(&id, &moe, &cert).unwrap() - 4f64.ln()).abs() < 1e-8);

        let other = build_transpose_depolarizing(2).unwrap();
        assert!(matches!(
            holevo_covariant(&other, &moe, &cert),
            Err(Error::CovarianceNotVerified { .. })
        ));
    }

    #[test]
    fn ensemble_values() {
        let ch = build_isotropic(Spin::Half, Basis::Magnetic).unwrap();
        let ens = Ensemble::new(
            vec![0.5, 0.5],
            vec![PureState::basis(2, 0).density(), PureState::basis(2, 1).density()],
        )
        .unwrap();
        let v = holevo_ensemble_value(&ch, &ens).unwrap();
        assert!((v - (5.0 / 3.0 * LN_2 - 3f64.ln())).abs() < 1e-12);
        let single = Ensemble::new(vec![1.0], vec![PureState::basis(2, 0).density()]).unwrap();
        assert!(holevo_ensemble_value(&ch, &single).unwrap().abs() < 1e-15);
        assert!(Ensemble::new(vec![0.5, 0.6], ens.states().to_vec()).is_err());
        assert!(Ensemble::new(vec![1.0], vec![]).is_err());
    }

    #[test]
    fn report_json_schema() {
        let ch = build_isotropic(Spin::Half, Basis::Magnetic).unwrap();
        let r = min_output_entropy(&ch, 2, 1e-10, 5).unwrap();
        let v = r.to_json_value(Units::Nats);
        assert!(v["min_entropy_nats"].as_f64().is_some());
        assert_eq!(v["argmin"].as_array().unwrap().len(), 2);
        assert_eq!(v["restarts"], 2);
        assert_eq!(v["seed"], 5);
        assert!(v["converged"].as_u64().is_some());
        let b = r.to_json_value(Units::Bits);
        let bits = b["min_entropy_bits"].as_f64().unwrap();
        assert!((bits * LN_2 - r.min_entropy).abs() < 1e-15);
    }
}
