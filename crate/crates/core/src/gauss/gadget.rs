//! Sampling from cosets of the gadget lattice `{z in Z^k : g^T z = 0 mod q}`
//! for arbitrary `q`, base 2.
//!
//! The basis `B_q` factors as `T D` with `T` the basis for modulus `2^k` and
//! `D` the identity except for its last column `d`. A sample is assembled
//! as `t = T y + p`, where `p` is a perturbation with covariance
//! `s^2 I - sigma^2 T T^T` (`sigma = s / 3`) and `y` is a spherical
//! sample over the coset of `L(D)` that makes `t` land in `u + Λ`.

use super::Sampler;
use crate::ring::{Ring, RingElem, RingVector};

const BASE: f64 = 2.0;

/// Precomputed constants for one modulus.
#[derive(Clone, Debug)]
pub struct GadgetSampler {
    q: u64,
    k: usize,
    q_digits: Vec<i64>,
    /// Last column of `D`: `d_0 = q_0 / 2`, `d_i = (d_{i-1} + q_i) / 2`.
    d: Vec<f64>,
    /// Diagonal and subdiagonal of the factor `L` with `L^T L = M`.
    l: Vec<f64>,
    h: Vec<f64>,
}

impl GadgetSampler {
    pub fn new(q: u64) -> Self {
        let k = (64 - (q - 1).leading_zeros()) as usize;
        let q_digits: Vec<i64> = (0..k).map(|i| ((q >> i) & 1) as i64).collect();
        let mut d = vec![0.0; k];
        d[0] = q_digits[0] as f64 / BASE;
        for i in 1..k {
            d[i] = (d[i - 1] + q_digits[i] as f64) / BASE;
        }
        let kf = k as f64;
        let mut l = vec![0.0; k];
        let mut h = vec![0.0; k];
        l[0] = (BASE * (1.0 + 1.0 / kf) + 1.0).sqrt();
        for i in 1..k {
            l[i] = (BASE * (1.0 + 1.0 / (kf - i as f64))).sqrt();
            h[i] = (BASE * (1.0 - 1.0 / (kf - (i - 1) as f64))).sqrt();
        }
        Self {
            q,
            k,
            q_digits,
            d,
            l,
            h,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Perturbation with covariance `sigma^2 M`, `M = 9I - T T^T`.
    fn perturb(&self, sigma: f64, sampler: &mut Sampler) -> Vec<i64> {
        let k = self.k;
        let mut z = vec![0i64; k];
        let mut beta = 0.0;
        for i in 0..k {
            let c = beta / self.l[i];
            z[i] = sampler.sample_z(sigma / self.l[i], c);
            if i + 1 < k {
                beta = -(z[i] as f64) * self.h[i + 1];
            }
        }
        let b = BASE as i64;
        let mut p = vec![0i64; k];
        if k == 1 {
            p[0] = (2 * b + 1) * z[0];
            return p;
        }
        p[0] = (2 * b + 1) * z[0] + b * z[1];
        for i in 1..k - 1 {
            p[i] = b * (z[i - 1] + 2 * z[i] + z[i + 1]);
        }
        p[k - 1] = b * (z[k - 2] + 2 * z[k - 1]);
        p
    }

    /// One sample of `D_{Λ_u, s}` where `Λ_u = {t : g^T t = u mod q}`.
    pub fn sample(&self, s: f64, u: u64, sampler: &mut Sampler) -> Vec<i64> {
        let k = self.k;
        let sigma = s / (BASE + 1.0);
        let u_digits: Vec<i64> = (0..k).map(|i| ((u >> i) & 1) as i64).collect();
        let p = self.perturb(sigma, sampler);

        // c = T^{-1} (u - p)
        let mut c = vec![0.0; k];
        c[0] = (u_digits[0] - p[0]) as f64 / BASE;
        for i in 1..k {
            c[i] = (c[i - 1] + (u_digits[i] - p[i]) as f64) / BASE;
        }

        // y = D z + c spherical around 0.
        let mut z = vec![0i64; k];
        let last = k - 1;
        z[last] = sampler.sample_z(sigma / self.d[last], -c[last] / self.d[last]);
        let zl = z[last] as f64;
        for i in 0..last {
            z[i] = sampler.sample_z(sigma, -(c[i] + self.d[i] * zl));
        }

        // t = u + B_q z
        let b = BASE as i64;
        let mut t = vec![0i64; k];
        for i in 0..k {
            let mut v = u_digits[i] + self.q_digits[i] * z[last];
            if i < last {
                v += b * z[i];
            }
            if i > 0 {
                v -= z[i - 1];
            }
            t[i] = v;
        }
        t
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }
}

/// Samples a single coefficient target; convenience over [`GadgetSampler::sample`].
pub fn sample_g(q: u64, s: f64, u: u64, sampler: &mut Sampler) -> Vec<i64> {
    GadgetSampler::new(q).sample(s, u % q, sampler)
}

/// `z ~ D_{Λ_v, alpha}` over `R^k` with `g^T z = v`, one gadget sample per
/// coefficient of `v`. Returns signed coefficients, `k` ring elements.
pub(crate) fn sample_poly_g_signed(
    gadget: &GadgetSampler,
    n: usize,
    alpha: f64,
    v: &RingElem,
    sampler: &mut Sampler,
) -> Vec<Vec<i64>> {
    let mut z = vec![vec![0i64; n]; gadget.k];
    for (j, &coeff) in v.coeffs().iter().enumerate() {
        let t = gadget.sample(alpha, coeff, sampler);
        for (i, x) in t.into_iter().enumerate() {
            z[i][j] = x;
        }
    }
    z
}

/// Gadget-coset sampler over `R_q`: `alpha = sqrt(5) sigma`.
pub fn sample_poly_g(ring: &Ring, sigma: f64, v: &RingElem, sampler: &mut Sampler) -> RingVector {
    let gadget = GadgetSampler::new(ring.q());
    let alpha = 5f64.sqrt() * sigma;
    sample_poly_g_signed(&gadget, ring.n(), alpha, v, sampler)
        .iter()
        .map(|c| ring.from_signed_raw(c))
        .collect()
}
