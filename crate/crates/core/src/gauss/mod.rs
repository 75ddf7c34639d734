//! Discrete Gaussian sampling.
//!
//! [`Sampler`] owns the random stream; everything that needs randomness takes
//! it by `&mut`. The base integer sampler draws from `D_{Z,s,c}` by rejection
//! from a two-sided geometric envelope centered at `c`, which works for any
//! real width and center without precomputed tables.

mod fft;
mod gadget;
mod perturb;

use std::f64::consts::PI;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::ring::{Ring, RingVector};

pub use fft::NegacyclicFft;
pub use gadget::{sample_g, sample_poly_g, GadgetSampler};
pub(crate) use gadget::sample_poly_g_signed;
pub use perturb::{sample_p, PerturbationBasis};

/// Default tail-cut factor.
pub const DEFAULT_TAIL_CUT: f64 = 12.0;

/// Seeded ChaCha20 stream plus the tail-cut factor shared by every sampler.
#[derive(Clone, Debug)]
pub struct Sampler {
    rng: ChaCha20Rng,
    tail_cut: f64,
    preimage_calls: u64,
}

impl Sampler {
    pub fn from_seed(seed: u64) -> Self {
        Self::from_rng(ChaCha20Rng::seed_from_u64(seed))
    }

    pub fn from_entropy() -> Self {
        Self::from_rng(ChaCha20Rng::from_entropy())
    }

    pub fn from_rng(rng: ChaCha20Rng) -> Self {
        Self {
            rng,
            tail_cut: DEFAULT_TAIL_CUT,
            preimage_calls: 0,
        }
    }

    pub fn with_tail_cut(mut self, t: f64) -> Self {
        self.tail_cut = t;
        self
    }

    pub fn tail_cut(&self) -> f64 {
        self.tail_cut
    }

    pub fn rng(&mut self) -> &mut ChaCha20Rng {
        &mut self.rng
    }

    /// Number of preimage samples drawn through this handle.
    pub fn preimage_calls(&self) -> u64 {
        self.preimage_calls
    }

    pub(crate) fn count_preimage(&mut self) {
        self.preimage_calls += 1;
    }

    /// Uniform in `(0, 1]` with 53 bits of resolution.
    #[inline]
    fn unit_open_closed(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[0, 1)`.
    #[inline]
    fn unit(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    /// Draws `x ~ D_{Z, sigma, center}` restricted to `|x - center| <= t sigma`.
    ///
    /// Envelope: `g(x) ∝ exp(-lambda |x - center|)` with `lambda = sqrt(2 pi) / sigma`,
    /// so the log-ratio `-pi d^2 / sigma^2 + lambda d` peaks at exactly `1/2`.
    pub fn sample_z(&mut self, sigma: f64, center: f64) -> i64 {
        debug_assert!(sigma > 0.0 && center.is_finite());
        let lambda = (2.0 * PI).sqrt() / sigma;
        let inv_s2 = PI / (sigma * sigma);
        let bound = self.tail_cut * sigma;
        let floor = center.floor();
        let frac = center - floor;
        // Right branch covers floor+1, floor+2, ...; left covers floor, floor-1, ...
        let w_right = (-lambda * (1.0 - frac)).exp();
        let w_left = (-lambda * frac).exp();
        let p_right = w_right / (w_right + w_left);
        loop {
            let right = self.unit() < p_right;
            let g = (self.unit_open_closed().ln() / -lambda).floor();
            let (x, d) = if right {
                (floor + 1.0 + g, 1.0 - frac + g)
            } else {
                (floor - g, frac + g)
            };
            if d > bound {
                continue;
            }
            let log_accept = -d * d * inv_s2 + lambda * d - 0.5;
            if self.unit() < log_accept.exp() {
                return x as i64;
            }
        }
    }

    /// `len` ring elements with independent `D_{Z,sigma}` coefficients,
    /// returned as signed integers.
    pub fn sample_ring_vec_signed(&mut self, n: usize, len: usize, sigma: f64) -> Vec<Vec<i64>> {
        (0..len)
            .map(|_| (0..n).map(|_| self.sample_z(sigma, 0.0)).collect())
            .collect()
    }

    /// Coefficientwise spherical sample over `R^len`, reduced into `R_q`.
    pub fn sample_ring_vec(&mut self, ring: &Ring, len: usize, sigma: f64) -> RingVector {
        self.sample_ring_vec_signed(ring.n(), len, sigma)
            .iter()
            .map(|c| ring.from_signed_raw(c))
            .collect()
    }
}

impl RngCore for Sampler {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const N: usize = 1_000_000;

    fn moments(xs: &[i64], center: f64) -> (f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().map(|&x| x as f64 - center).sum::<f64>() / n;
        let var = xs.iter().map(|&x| (x as f64 - center - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, var.sqrt())
    }

    /// Exact moments of D_{Z,s,c} by direct summation over the support.
    fn exact_moments(s: f64, c: f64) -> (f64, f64) {
        let lo = (c - 40.0 * s).floor() as i64;
        let hi = (c + 40.0 * s).ceil() as i64;
        let (mut z, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for x in lo..=hi {
            let d = x as f64 - c;
            let w = (-PI * d * d / (s * s)).exp();
            z += w;
            m1 += w * d;
            m2 += w * d * d;
        }
        let mean = m1 / z;
        (mean, (m2 / z - mean * mean).sqrt())
    }

    #[test]
    fn tiny_width_concentrates_on_center() {
        let mut s = Sampler::from_seed(1);
        assert!((0..10_000).all(|_| s.sample_z(0.1, 0.0) == 0));
        assert!((0..10_000).all(|_| s.sample_z(0.1, 7.0) == 7));
    }

    #[test]
    fn centered_moments_at_sigma_4_5() {
        let sigma = 4.5;
        let mut s = Sampler::from_seed(2);
        let xs: Vec<i64> = (0..N).map(|_| s.sample_z(sigma, 0.0)).collect();
        let (mean, sd) = moments(&xs, 0.0);
        let expected_sd = sigma / (2.0 * PI).sqrt();
        assert!(mean.abs() < 3.0 * expected_sd / (N as f64).sqrt(), "mean {mean}");
        assert!((sd / expected_sd - 1.0).abs() < 0.02, "sd {sd}");
        assert!(xs.iter().all(|&x| (x as f64).abs() <= 12.0 * sigma));
    }

    #[test]
    fn off_center_moments_match_exact_summation() {
        let mut s = Sampler::from_seed(3);
        for &(sigma, c) in &[(1.3, 0.25), (3.0, -2.7), (37.0, 1000.5), (0.8, 0.5)] {
            let xs: Vec<i64> = (0..200_000).map(|_| s.sample_z(sigma, c)).collect();
            let (mean, sd) = moments(&xs, c);
            let (em, esd) = exact_moments(sigma, c);
            let stderr = esd / (200_000f64).sqrt();
            assert!((mean - em).abs() < 4.0 * stderr, "s={sigma} c={c}: {mean} vs {em}");
            assert!((sd / esd - 1.0).abs() < 0.02, "s={sigma} c={c}: {sd} vs {esd}");
        }
    }

    #[test]
    fn histogram_matches_pmf() {
        let (sigma, c) = (2.0, 0.3);
        let mut s = Sampler::from_seed(4);
        let draws = 400_000;
        let mut counts = std::collections::HashMap::new();
        for _ in 0..draws {
            *counts.entry(s.sample_z(sigma, c)).or_insert(0u64) += 1;
        }
        let z: f64 = (-30..=30)
            .map(|x| (-PI * (x as f64 - c).powi(2) / (sigma * sigma)).exp())
            .sum();
        for x in -3..=3 {
            let p = (-PI * (x as f64 - c).powi(2) / (sigma * sigma)).exp() / z;
            let got = *counts.get(&x).unwrap_or(&0) as f64;
            let sd = (draws as f64 * p * (1.0 - p)).sqrt();
            assert!((got - draws as f64 * p).abs() < 5.0 * sd, "x={x}");
        }
    }

    #[test]
    fn tail_cut_respected() {
        let mut s = Sampler::from_seed(5).with_tail_cut(1.0);
        for _ in 0..100_000 {
            let x = s.sample_z(3.0, 0.4);
            assert!((x as f64 - 0.4).abs() <= 3.0);
        }
    }

    #[test]
    fn seeded_streams_repeat() {
        let mut a = Sampler::from_seed(6);
        let mut b = Sampler::from_seed(6);
        let xa: Vec<i64> = (0..1000).map(|_| a.sample_z(5.0, 0.1)).collect();
        let xb: Vec<i64> = (0..1000).map(|_| b.sample_z(5.0, 0.1)).collect();
        assert_eq!(xa, xb);
    }

    #[test]
    fn ring_vec_shapes_and_norm() {
        let ring = Ring::new(1024, crate::params::PAPER62_Q).unwrap();
        let mut s = Sampler::from_seed(7);
        assert!(s.sample_ring_vec(&ring, 0, 4.73).is_empty());
        let sigma = 4.73;
        let bound = 12.0 * sigma * ((2 * 1024) as f64).sqrt();
        for _ in 0..10_000 {
            let v = s.sample_ring_vec(&ring, 2, sigma);
            assert_eq!(v.len(), 2);
            assert!(ring.norm_sq(&v).sqrt() <= bound);
        }
        let a = Sampler::from_seed(8).sample_ring_vec(&ring, 2, sigma);
        let b = Sampler::from_seed(8).sample_ring_vec(&ring, 2, sigma);
        assert_eq!(a, b);
    }
}
