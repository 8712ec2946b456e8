//! Seeded random streams.
//!
//! Every trial draws from ChaCha8 keyed by the campaign seed, with the trial index
//! selecting the stream. Streams are independent, so trials can run in any order
//! (or in parallel) and still see the same numbers.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matalg::AlgebraElement;

pub type TrialRng = ChaCha8Rng;

pub fn trial_rng(seed: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Standard complex normal: `E|z|^2 = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| complex_gaussian(rng)).collect()
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, d: usize) -> AlgebraElement {
    AlgebraElement::from_fn(d, |_, _| complex_gaussian(rng))
}

/// Random Hermitian matrix `(G + G*) / 2`.
pub fn gaussian_hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> AlgebraElement {
    gaussian_matrix(rng, d).re_part()
}

/// Random PSD matrix `G* G`.
pub fn gaussian_psd<R: Rng + ?Sized>(rng: &mut R, d: usize) -> AlgebraElement {
    let g = gaussian_matrix(rng, d);
    g.adjoint().mul(&g).re_part()
}
