//! Complex evaluation of real polynomials of `R[x]/(x^n + 1)`.
//!
//! Slot `j` holds `f(w_j)` with `w_j = exp(i pi (2j + 1) / n)`. With this
//! ordering `-w_j = w_{j + n/2}` and `w_j^2` is the `j`-th root for degree
//! `n/2`, which is what the even/odd splitting in the perturbation sampler
//! relies on.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[derive(Clone)]
pub struct NegacyclicFft {
    n: usize,
    twist: Vec<Complex64>,
    untwist: Vec<Complex64>,
    to_eval: Arc<dyn Fft<f64>>,
    to_coeff: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for NegacyclicFft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NegacyclicFft").field("n", &self.n).finish()
    }
}

/// `w_j = exp(i pi (2j + 1) / n)`.
pub fn root(n: usize, j: usize) -> Complex64 {
    Complex64::from_polar(1.0, PI * (2 * j + 1) as f64 / n as f64)
}

impl NegacyclicFft {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let twist = (0..n)
            .map(|i| Complex64::from_polar(1.0, PI * i as f64 / n as f64))
            .collect();
        let untwist = (0..n)
            .map(|i| Complex64::from_polar(1.0 / n as f64, -PI * i as f64 / n as f64))
            .collect();
        Self {
            n,
            twist,
            untwist,
            // f(w_j) = sum_i (f_i psi^i) e^{+2 pi i ij/n}: rustfft's inverse direction.
            to_eval: planner.plan_fft_inverse(n),
            to_coeff: planner.plan_fft_forward(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eval<I>(&self, coeffs: I) -> Vec<Complex64>
    where
        I: IntoIterator<Item = f64>,
    {
        let mut buf: Vec<Complex64> = coeffs
            .into_iter()
            .zip(&self.twist)
            .map(|(c, &w)| w * c)
            .collect();
        debug_assert_eq!(buf.len(), self.n);
        self.to_eval.process(&mut buf);
        buf
    }

    pub fn coeffs(&self, evals: &[Complex64]) -> Vec<f64> {
        let mut buf = evals.to_vec();
        self.to_coeff.process(&mut buf);
        buf.iter().zip(&self.untwist).map(|(x, &w)| (x * w).re).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_matches_direct_evaluation() {
        let n = 16;
        let fft = NegacyclicFft::new(n);
        let f: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin() * 5.0).collect();
        let ev = fft.eval(f.iter().copied());
        for (j, e) in ev.iter().enumerate() {
            let w = root(n, j);
            let direct: Complex64 = f.iter().enumerate().map(|(i, &c)| w.powu(i as u32) * c).sum();
            assert!((direct - e).norm() < 1e-9);
        }
        let back = fft.coeffs(&ev);
        for (a, b) in f.iter().zip(&back) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn products_are_negacyclic() {
        let n = 8;
        let fft = NegacyclicFft::new(n);
        let mut x4 = vec![0.0; n];
        x4[4] = 1.0;
        let e = fft.eval(x4.iter().copied());
        let sq: Vec<Complex64> = e.iter().map(|v| v * v).collect();
        let c = fft.coeffs(&sq);
        assert!((c[0] + 1.0).abs() < 1e-12);
        assert!(c[1..].iter().all(|v| v.abs() < 1e-12));
    }
}
