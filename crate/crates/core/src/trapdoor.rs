//! Gadget vector, g-trapdoor generation and preimage sampling.

use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::gauss::{sample_poly_g_signed, GadgetSampler, PerturbationBasis, Sampler};
use crate::ring::{NttElem, Ring, RingElem, RingVector};

/// The gadget vector `g = (1, 2, ..., 2^(k-1))` with `k = ceil(log2 q)`.
#[derive(Clone, Debug)]
pub struct Gadget {
    k: usize,
    g: RingVector,
    sampler: GadgetSampler,
}

impl Gadget {
    pub fn new(ring: &Ring) -> Self {
        let k = ring.bits() as usize;
        let g = (0..k).map(|i| ring.constant(1u64 << i)).collect();
        Self {
            k,
            g,
            sampler: GadgetSampler::new(ring.q()),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn vector(&self) -> &RingVector {
        &self.g
    }

    pub(crate) fn sampler(&self) -> &GadgetSampler {
        &self.sampler
    }

    /// `g^T z`.
    pub fn recompose(&self, ring: &Ring, z: &RingVector) -> Result<RingElem> {
        if z.len() != self.k {
            return Err(Error::Dimension {
                expected: self.k,
                found: z.len(),
            });
        }
        let md = ring.modulus();
        let mut acc = vec![0u64; ring.n()];
        for (i, zi) in z.iter().enumerate() {
            if zi.len() != ring.n() {
                return Err(Error::Dimension {
                    expected: ring.n(),
                    found: zi.len(),
                });
            }
            let w = (1u64 << i) % ring.q();
            for (a, &c) in acc.iter_mut().zip(zi.coeffs()) {
                *a = md.add(*a, md.mul(c, w));
            }
        }
        ring.from_coeffs(acc)
    }

    /// Deterministic binary decomposition: `g^T decompose(u) = u` with
    /// coefficients in `{0, 1}`.
    pub fn decompose(&self, ring: &Ring, u: &RingElem) -> RingVector {
        (0..self.k)
            .map(|i| {
                let bits = u.coeffs().iter().map(|&c| (c >> i) & 1).collect();
                ring.from_coeffs(bits).expect("length n")
            })
            .collect()
    }
}

#[derive(Debug)]
struct TrapdoorInner {
    /// `(m - k) x k` matrix of signed coefficient vectors.
    matrix: Vec<Vec<Vec<i64>>>,
    tag: RingElem,
    sigma: f64,
    ntt: OnceLock<Vec<Vec<NttElem>>>,
    basis: OnceLock<(f64, f64, Option<Arc<PerturbationBasis>>)>,
}

/// A g-trapdoor `T` with `a^T (T; I_k) = h g^T`. Cloning shares the matrix
/// and its cached precomputation.
#[derive(Clone, Debug)]
pub struct GTrapdoor {
    inner: Arc<TrapdoorInner>,
}

impl PartialEq for GTrapdoor {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.matrix == other.inner.matrix && self.inner.tag == other.inner.tag)
    }
}

impl GTrapdoor {
    pub fn from_matrix(matrix: Vec<Vec<Vec<i64>>>, tag: RingElem, sigma: f64) -> Self {
        Self {
            inner: Arc::new(TrapdoorInner {
                matrix,
                tag,
                sigma,
                ntt: OnceLock::new(),
                basis: OnceLock::new(),
            }),
        }
    }

    pub fn matrix(&self) -> &[Vec<Vec<i64>>] {
        &self.inner.matrix
    }

    pub fn tag(&self) -> &RingElem {
        &self.inner.tag
    }

    pub fn sigma(&self) -> f64 {
        self.inner.sigma
    }

    pub fn rows(&self) -> usize {
        self.inner.matrix.len()
    }

    pub fn cols(&self) -> usize {
        self.inner.matrix.first().map_or(0, Vec::len)
    }

    pub fn shares_storage(&self, other: &GTrapdoor) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
    }

    /// Same matrix, different tag.
    pub fn with_tag(&self, tag: RingElem) -> Self {
        Self::from_matrix(self.inner.matrix.clone(), tag, self.inner.sigma)
    }

    /// Frobenius norm of the coefficient embedding.
    pub fn norm(&self) -> f64 {
        self.inner
            .matrix
            .iter()
            .flatten()
            .flatten()
            .map(|&c| (c as f64) * (c as f64))
            .sum::<f64>()
            .sqrt()
    }

    pub fn entry(&self, ring: &Ring, i: usize, j: usize) -> RingElem {
        ring.from_signed_raw(&self.inner.matrix[i][j])
    }

    pub(crate) fn ntt_matrix(&self, ring: &Ring) -> &[Vec<NttElem>] {
        self.inner.ntt.get_or_init(|| {
            self.inner
                .matrix
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|c| ring.ntt_forward(&ring.from_signed_raw(c)))
                        .collect()
                })
                .collect()
        })
    }

    /// Perturbation precomputation for `(zeta, alpha)`, cached for the first
    /// pair requested.
    pub fn perturbation_basis(&self, zeta: f64, alpha: f64) -> Result<Arc<PerturbationBasis>> {
        let n = self
            .inner
            .matrix
            .first()
            .and_then(|r| r.first())
            .map_or(0, Vec::len);
        let build = || PerturbationBasis::new(n, &self.inner.matrix, zeta, alpha).ok().map(Arc::new);
        let (z, a, cached) = self.inner.basis.get_or_init(|| (zeta, alpha, build()));
        let basis = if *z == zeta && *a == alpha {
            cached.clone()
        } else {
            build()
        };
        basis.ok_or(Error::NonPositiveDefinite)
    }

    /// Whether preimage sampling with `(zeta, alpha)` is possible.
    pub fn supports(&self, zeta: f64, alpha: f64) -> bool {
        self.perturbation_basis(zeta, alpha).is_ok()
    }

    /// `(T; I)^T`-weighted sum: returns `a^T (T; I_k)` as `k` ring elements.
    pub fn apply_left(&self, ring: &Ring, a: &RingVector) -> Result<RingVector> {
        let rows = self.rows();
        let cols = self.cols();
        if a.len() != rows + cols {
            return Err(Error::Dimension {
                expected: rows + cols,
                found: a.len(),
            });
        }
        let t = self.ntt_matrix(ring);
        let a_top: Vec<NttElem> = (0..rows).map(|i| ring.ntt_forward(&a[i])).collect();
        Ok((0..cols)
            .map(|j| {
                let mut acc = ring.ntt_zero();
                for i in 0..rows {
                    ring.pointwise_acc(&mut acc, &a_top[i], &t[i][j]);
                }
                ring.add_raw(&ring.ntt_inverse(&acc), &a[rows + j])
            })
            .collect())
    }

    /// Checks `a^T (T; I_k) = h g^T` exactly.
    pub fn verify(&self, ring: &Ring, gadget: &Gadget, a: &RingVector, h: &RingElem) -> bool {
        match self.apply_left(ring, a) {
            Ok(lhs) => lhs
                .iter()
                .zip(gadget.vector())
                .all(|(l, g)| *l == ring.mul_raw(h, g)),
            Err(_) => false,
        }
    }
}

/// Generates `a = (a' | h g - a'^T T)` with a fresh `T ~ D_{R^{(m-k) x k}, sigma}`.
///
/// Without `a_prime` a uniform one is drawn; without `tag` the tag is 1.
pub fn trap_gen(
    ring: &Ring,
    gadget: &Gadget,
    m: usize,
    sigma: f64,
    a_prime: Option<RingVector>,
    tag: Option<RingElem>,
    sampler: &mut Sampler,
) -> Result<(RingVector, GTrapdoor)> {
    let k = gadget.k();
    if m <= k {
        return Err(Error::Dimension { expected: k + 1, found: m });
    }
    let rows = m - k;
    let a_prime = match a_prime {
        Some(a) if a.len() != rows => {
            return Err(Error::Dimension {
                expected: rows,
                found: a.len(),
            })
        }
        Some(a) => a,
        None => ring.sample_uniform_vec(rows, sampler),
    };
    let tag = tag.unwrap_or_else(|| ring.one());
    let matrix: Vec<Vec<Vec<i64>>> = (0..rows)
        .map(|_| sampler.sample_ring_vec_signed(ring.n(), k, sigma))
        .collect();
    let trapdoor = GTrapdoor::from_matrix(matrix, tag.clone(), sigma);

    let t = trapdoor.ntt_matrix(ring);
    let a_ntt: Vec<NttElem> = a_prime.iter().map(|e| ring.ntt_forward(e)).collect();
    let mut a: Vec<RingElem> = a_prime.into_inner();
    for (j, g) in gadget.vector().iter().enumerate() {
        let mut acc = ring.ntt_zero();
        for i in 0..rows {
            ring.pointwise_acc(&mut acc, &a_ntt[i], &t[i][j]);
        }
        let hg = ring.mul_raw(&tag, g);
        a.push(ring.sub_raw(&hg, &ring.ntt_inverse(&acc)));
    }
    Ok((RingVector::new(a), trapdoor))
}

/// `a_h = a + (0 | h g)`.
pub fn tag_shift(ring: &Ring, gadget: &Gadget, a: &RingVector, h: &RingElem) -> Result<RingVector> {
    let k = gadget.k();
    if a.len() < k {
        return Err(Error::Dimension {
            expected: k,
            found: a.len(),
        });
    }
    let offset = a.len() - k;
    let mut out = a.clone();
    for (j, g) in gadget.vector().iter().enumerate() {
        let hg = ring.mul(h, g)?;
        ring.add_assign_raw(&mut out.as_mut_slice()[offset + j], &hg);
    }
    Ok(out)
}

/// Samples a short `x` with `a^T x = u` using the trapdoor of `a` for the
/// invertible tag `h`.
#[allow(clippy::too_many_arguments)]
pub fn sample_pre(
    ring: &Ring,
    gadget: &Gadget,
    trapdoor: &GTrapdoor,
    a: &RingVector,
    h: &RingElem,
    zeta: f64,
    sigma: f64,
    alpha: f64,
    u: &RingElem,
    sampler: &mut Sampler,
) -> Result<RingVector> {
    let rows = trapdoor.rows();
    let k = gadget.k();
    if a.len() != rows + k || trapdoor.cols() != k {
        return Err(Error::Dimension {
            expected: rows + k,
            found: a.len(),
        });
    }
    debug_assert!((alpha - 5f64.sqrt() * sigma).abs() <= 1e-9 * alpha);
    let h_inv = ring.inverse(h).map_err(|_| Error::TagNotInvertible)?;
    let basis = trapdoor.perturbation_basis(zeta, alpha)?;
    sampler.count_preimage();

    let p: Vec<RingElem> = basis
        .sample(sampler)
        .iter()
        .map(|c| ring.from_signed_raw(c))
        .collect();
    let a_ntt = ring.ntt_vec(a);
    let p_ntt: Vec<NttElem> = p.iter().map(|e| ring.ntt_forward(e)).collect();
    let ap = ring.dot_ntt(&a_ntt, &p_ntt);
    let v = ring.mul_raw(&h_inv, &ring.sub_raw(u, &ap));

    let z = sample_poly_g_signed(gadget.sampler(), ring.n(), alpha, &v, sampler);
    let z: Vec<RingElem> = z.iter().map(|c| ring.from_signed_raw(c)).collect();
    let z_ntt: Vec<NttElem> = z.iter().map(|e| ring.ntt_forward(e)).collect();

    let t = trapdoor.ntt_matrix(ring);
    let mut x = Vec::with_capacity(rows + k);
    let mut x_ntt = Vec::with_capacity(rows + k);
    for i in 0..rows {
        let mut acc = p_ntt[i].clone();
        for j in 0..k {
            ring.pointwise_acc(&mut acc, &t[i][j], &z_ntt[j]);
        }
        x.push(ring.ntt_inverse(&acc));
        x_ntt.push(acc);
    }
    for j in 0..k {
        x.push(ring.add_raw(&p[rows + j], &z[j]));
        let mut slot = p_ntt[rows + j].clone();
        ring.pointwise_acc(&mut slot, &z_ntt[j], &ring.ntt_forward(&ring.one()));
        x_ntt.push(slot);
    }

    if ring.dot_ntt(&a_ntt, &x_ntt) != *u {
        return Err(Error::PreimageCheckFailed);
    }
    Ok(RingVector::new(x))
}
