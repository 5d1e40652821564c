//! Seeded random sampling of states, unitaries and directions.
//!
//! Every sampler takes an explicit RNG; [`stream_rng`] derives an independent
//! ChaCha stream from a `(seed, stream)` pair so that parallel work items stay
//! reproducible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numerics::{c, Complex, ComplexMatrix};

pub type StreamRng = ChaCha8Rng;

/// RNG for stream `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Complex vector with i.i.d. standard normal real and imaginary parts.
pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex> {
    (0..n)
        .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// Haar-distributed unit vector in `C^n`.
pub fn haar_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex> {
    loop {
        let v = gaussian_vector(rng, n);
        let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nv > 1e-12 {
            return v.into_iter().map(|z| z / nv).collect();
        }
    }
}

/// Haar-distributed `n x n` unitary: Gram-Schmidt on a Gaussian matrix,
/// which fixes the phase convention of a QR factorization with positive
/// diagonal in `R`.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v = gaussian_vector(rng, n);
        for _ in 0..2 {
            for b in &cols {
                let proj: Complex = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vk, bk) in v.iter_mut().zip(b) {
                    *vk -= proj * bk;
                }
            }
        }
        let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nv > 1e-8 {
            cols.push(v.into_iter().map(|z| z / nv).collect());
        }
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// Uniform direction on the unit sphere in `R^k` (normalized Gaussian).
pub fn unit_direction<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nv > 1e-12 {
            return v.into_iter().map(|x| x / nv).collect();
        }
    }
}

/// Uniform point in the closed unit ball of `R^3`.
pub fn ball_point<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let dir = unit_direction(rng, 3);
    let r = rng.random::<f64>().cbrt();
    [r * dir[0], r * dir[1], r * dir[2]]
}

/// Unit vector proportional to `v`, or `None` when `v` vanishes.
pub fn normalized(v: &[Complex]) -> Option<Vec<Complex>> {
    let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    (nv > 0.0 && nv.is_finite()).then(|| v.iter().map(|z| z / nv).collect())
}
