//! Perturbation sampling for g-trapdoors.
//!
//! The target covariance is `zeta^2 I - alpha^2 (T; I)(T^T I)`. Its lower-right
//! `k x k` block is the scalar `(zeta^2 - alpha^2) I`, so the last `k` ring
//! coordinates are sampled spherically first. Conditioned on them, the first
//! `m - k` coordinates follow a Gaussian whose covariance is a small matrix of
//! self-adjoint ring elements; that one is sampled in the FFT domain by
//! splitting `f(x) = f0(x^2) + x f1(x^2)` recursively down to integers.

use num_complex::Complex64;

use super::fft::{root, NegacyclicFft};
use super::Sampler;
use crate::error::{Error, Result};
use crate::ring::{Ring, RingVector};
use crate::trapdoor::GTrapdoor;

/// Per-trapdoor precomputation for a fixed `(zeta, alpha)`.
#[derive(Clone, Debug)]
pub struct PerturbationBasis {
    n: usize,
    rows: usize,
    cols: usize,
    zeta: f64,
    alpha: f64,
    fft: NegacyclicFft,
    /// Evaluations of `T[i][j]`.
    t_eval: Vec<Vec<Vec<Complex64>>>,
    /// Width of the spherical lower block, `sqrt(zeta^2 - alpha^2)`.
    lower_width: f64,
    /// Center map for the upper block: `-alpha^2 / (zeta^2 - alpha^2)`.
    center_scale: f64,
    /// Conditional variances, one per upper coordinate (real evaluations).
    pivots: Vec<Vec<f64>>,
    /// `links[l][i]` for `i < l`: regression coefficient of coordinate `i` on `l`.
    links: Vec<Vec<Vec<Complex64>>>,
    /// `roots[s]` holds `w_j` for degree `2^s`, `j < 2^(s-1)`.
    roots: Vec<Vec<Complex64>>,
}

impl PerturbationBasis {
    /// `trapdoor[i][j]` are the signed coefficients of `T`. Fails when the
    /// upper-block covariance is not positive definite.
    pub fn new(n: usize, trapdoor: &[Vec<Vec<i64>>], zeta: f64, alpha: f64) -> Result<Self> {
        let rows = trapdoor.len();
        let cols = trapdoor.first().map_or(0, Vec::len);
        let z2 = zeta * zeta;
        let a2 = alpha * alpha;
        if !(z2 > a2) {
            return Err(Error::NonPositiveDefinite);
        }
        let fft = NegacyclicFft::new(n);
        let t_eval: Vec<Vec<Vec<Complex64>>> = trapdoor
            .iter()
            .map(|row| {
                row.iter()
                    .map(|p| fft.eval(p.iter().map(|&c| c as f64)))
                    .collect()
            })
            .collect();

        // Upper-block Schur complement: zeta^2 I - (alpha^2 zeta^2 / (zeta^2 - alpha^2)) T T^*.
        let scale = a2 * z2 / (z2 - a2);
        let mut cov = vec![vec![vec![Complex64::new(0.0, 0.0); n]; rows]; rows];
        for i in 0..rows {
            for j in 0..rows {
                for s in 0..n {
                    let tt: Complex64 = (0..cols)
                        .map(|l| t_eval[i][l][s] * t_eval[j][l][s].conj())
                        .sum();
                    let diag = if i == j { z2 } else { 0.0 };
                    cov[i][j][s] = Complex64::new(diag, 0.0) - tt * scale;
                }
            }
        }

        let mut pivots = vec![Vec::new(); rows];
        let mut links = vec![Vec::new(); rows];
        for l in (0..rows).rev() {
            let pivot: Vec<f64> = cov[l][l].iter().map(|c| c.re).collect();
            if pivot.iter().any(|&p| !(p > 0.0)) {
                return Err(Error::NonPositiveDefinite);
            }
            let link: Vec<Vec<Complex64>> = (0..l)
                .map(|i| (0..n).map(|s| cov[i][l][s] / pivot[s]).collect())
                .collect();
            for i in 0..l {
                for j in 0..l {
                    for s in 0..n {
                        let update = link[i][s] * cov[j][l][s].conj();
                        cov[i][j][s] -= update;
                    }
                }
            }
            pivots[l] = pivot;
            links[l] = link;
        }

        let roots = (0..=n.trailing_zeros())
            .map(|s| {
                let size = 1usize << s;
                (0..size / 2).map(|j| root(size, j)).collect()
            })
            .collect();

        Ok(Self {
            n,
            rows,
            cols,
            zeta,
            alpha,
            fft,
            t_eval,
            lower_width: (z2 - a2).sqrt(),
            center_scale: -a2 / (z2 - a2),
            pivots,
            links,
            roots,
        })
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Smallest conditional variance over all evaluation points.
    pub fn min_pivot(&self) -> f64 {
        self.pivots
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// One perturbation vector as `m` signed coefficient vectors.
    pub fn sample(&self, sampler: &mut Sampler) -> Vec<Vec<i64>> {
        let lower = sampler.sample_ring_vec_signed(self.n, self.cols, self.lower_width);
        let lower_eval: Vec<Vec<Complex64>> = lower
            .iter()
            .map(|p| self.fft.eval(p.iter().map(|&c| c as f64)))
            .collect();
        let mut centers: Vec<Vec<Complex64>> = (0..self.rows)
            .map(|i| {
                (0..self.n)
                    .map(|s| {
                        let acc: Complex64 = (0..self.cols)
                            .map(|l| self.t_eval[i][l][s] * lower_eval[l][s])
                            .sum();
                        acc * self.center_scale
                    })
                    .collect()
            })
            .collect();

        let mut upper = vec![Vec::new(); self.rows];
        for l in (0..self.rows).rev() {
            let (coeffs, evals) = self.sample_fz(sampler, &self.pivots[l], &centers[l]);
            for i in 0..l {
                for s in 0..self.n {
                    let shift = self.links[l][i][s] * (evals[s] - centers[l][s]);
                    centers[i][s] += shift;
                }
            }
            upper[l] = coeffs;
        }
        upper.extend(lower);
        upper
    }

    /// Samples `D_{Z^n, sqrt(f), c}` where `f` is self-adjoint, given by its
    /// (real) evaluations, and `c` by its evaluations. Returns the sample as
    /// coefficients and as evaluations.
    fn sample_fz(&self, sampler: &mut Sampler, f: &[f64], c: &[Complex64]) -> (Vec<i64>, Vec<Complex64>) {
        let n = f.len();
        if n == 1 {
            let z = sampler.sample_z(f[0].sqrt(), c[0].re);
            return (vec![z], vec![Complex64::new(z as f64, 0.0)]);
        }
        let h = n / 2;
        let w = &self.roots[n.trailing_zeros() as usize];

        let mut f0 = Vec::with_capacity(h);
        let mut b = Vec::with_capacity(h);
        let mut c0 = Vec::with_capacity(h);
        let mut c1 = Vec::with_capacity(h);
        for j in 0..h {
            f0.push(0.5 * (f[j] + f[j + h]));
            // f1 = (f(w) - f(-w)) / 2w; the off-diagonal block is f1^*.
            b.push(((f[j] - f[j + h]) * 0.5 / w[j]).conj());
            c0.push((c[j] + c[j + h]) * 0.5);
            c1.push((c[j] - c[j + h]) * 0.5 / w[j]);
        }

        let (q1, e1) = self.sample_fz(sampler, &f0, &c1);
        let mut schur = Vec::with_capacity(h);
        for j in 0..h {
            c0[j] += b[j] / f0[j] * (e1[j] - c1[j]);
            schur.push(f0[j] - b[j].norm_sqr() / f0[j]);
        }
        let (q0, e0) = self.sample_fz(sampler, &schur, &c0);

        let mut coeffs = vec![0i64; n];
        let mut evals = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..h {
            coeffs[2 * j] = q0[j];
            coeffs[2 * j + 1] = q1[j];
            let odd = w[j] * e1[j];
            evals[j] = e0[j] + odd;
            evals[j + h] = e0[j] - odd;
        }
        (coeffs, evals)
    }
}

/// Draws `p ~ D_{R^m, sqrt(Sigma_p)}` with
/// `Sigma_p = zeta^2 I - alpha^2 (T; I)(T^T I)` for the given trapdoor.
pub fn sample_p(
    ring: &Ring,
    trapdoor: &GTrapdoor,
    zeta: f64,
    alpha: f64,
    sampler: &mut Sampler,
) -> Result<RingVector> {
    let basis = trapdoor.perturbation_basis(zeta, alpha)?;
    Ok(basis
        .sample(sampler)
        .iter()
        .map(|c| ring.from_signed_raw(c))
        .collect())
}
