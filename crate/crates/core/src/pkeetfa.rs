//! Key generation, encryption, decryption and the three authorization types.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gauss::Sampler;
use crate::hashing::{frd_encode, hash_message, IdentityVector};
use crate::params::Params;
use crate::ring::{Ring, RingElem, RingVector};
use crate::trapdoor::{sample_pre, tag_shift, trap_gen, GTrapdoor, Gadget};

/// Trapdoor draws attempted by [`Scheme::setup`] before giving up on a
/// positive-definite perturbation covariance.
pub const MAX_KEYGEN_ATTEMPTS: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct PublicKey {
    pub a: Arc<RingVector>,
    pub b: Arc<RingVector>,
    pub u: RingElem,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SecretKey {
    pub t_a: GTrapdoor,
    pub t_b: GTrapdoor,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ciphertext {
    pub v: IdentityVector,
    pub ct1: RingElem,
    pub ct2: RingElem,
    pub ct3: RingVector,
    pub ct4: RingVector,
}

/// `T_b` together with the public `b` and `u` it samples against.
#[derive(Clone, Debug, PartialEq)]
pub struct UserTrapdoor {
    pub trapdoor: GTrapdoor,
    pub b: Arc<RingVector>,
    pub u: RingElem,
}

/// A preimage `x'` with `b_h^T x' = u` for `h = H(v)` of one ciphertext.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundPreimage {
    pub v: IdentityVector,
    pub x: RingVector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrapdoorKind {
    Type1,
    Type2,
    Type3I,
    Type3J,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AuthTrapdoor {
    Type1(UserTrapdoor),
    Type2(BoundPreimage),
    Type3I(BoundPreimage),
    Type3J(UserTrapdoor),
}

impl AuthTrapdoor {
    pub fn kind(&self) -> TrapdoorKind {
        match self {
            AuthTrapdoor::Type1(_) => TrapdoorKind::Type1,
            AuthTrapdoor::Type2(_) => TrapdoorKind::Type2,
            AuthTrapdoor::Type3I(_) => TrapdoorKind::Type3I,
            AuthTrapdoor::Type3J(_) => TrapdoorKind::Type3J,
        }
    }
}

/// Decryption result with the largest centered error seen while decoding.
#[derive(Clone, Debug, PartialEq)]
pub struct Decryption {
    pub message: RingElem,
    pub max_noise: u64,
}

/// A parameter set bound to its ring and gadget.
#[derive(Clone, Debug)]
pub struct Scheme {
    params: Params,
    ring: Ring,
    gadget: Gadget,
}

impl Scheme {
    /// Builds the scheme without checking the parameter rules.
    pub fn new(params: Params) -> Result<Self> {
        let ring = Ring::new(params.n, params.q)?;
        if ring.bits() as usize != params.k || params.m <= params.k {
            return Err(Error::InvalidParams(params.validate().err().unwrap_or_default()));
        }
        let gadget = Gadget::new(&ring);
        Ok(Self { params, ring, gadget })
    }

    /// Builds the scheme only if every parameter rule holds.
    pub fn validated(params: Params) -> Result<Self> {
        params.validate().map_err(Error::InvalidParams)?;
        Self::new(params)
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn gadget(&self) -> &Gadget {
        &self.gadget
    }

    fn keyed_trapdoor(&self, sampler: &mut Sampler) -> Result<(RingVector, GTrapdoor)> {
        let g = &self.params.gauss;
        for _ in 0..MAX_KEYGEN_ATTEMPTS {
            let (a, t) = trap_gen(
                &self.ring,
                &self.gadget,
                self.params.m,
                g.sigma,
                None,
                Some(self.ring.zero()),
                sampler,
            )?;
            if t.supports(g.zeta, g.alpha) {
                return Ok((a, t));
            }
        }
        Err(Error::NonPositiveDefinite)
    }

    pub fn setup(&self, sampler: &mut Sampler) -> Result<(PublicKey, SecretKey)> {
        let (a, t_a) = self.keyed_trapdoor(sampler)?;
        let (b, t_b) = self.keyed_trapdoor(sampler)?;
        let u = self.ring.sample_uniform(sampler);
        Ok((
            PublicKey {
                a: Arc::new(a),
                b: Arc::new(b),
                u,
            },
            SecretKey { t_a, t_b },
        ))
    }

    fn check_public_key(&self, pk: &PublicKey) -> Result<()> {
        for len in [pk.a.len(), pk.b.len()] {
            if len != self.params.m {
                return Err(Error::Dimension {
                    expected: self.params.m,
                    found: len,
                });
            }
        }
        Ok(())
    }

    fn check_ciphertext(&self, ct: &Ciphertext) -> Result<()> {
        let n = self.ring.n();
        for len in [ct.v.len(), ct.ct1.len(), ct.ct2.len()] {
            if len != n {
                return Err(Error::Dimension { expected: n, found: len });
            }
        }
        for len in [ct.ct3.len(), ct.ct4.len()] {
            if len != self.params.m {
                return Err(Error::Dimension {
                    expected: self.params.m,
                    found: len,
                });
            }
        }
        Ok(())
    }

    /// `a s + (y | z)` with `y ~ D_tau` on the first `m - k` entries and
    /// `z ~ D_gamma` on the last `k`.
    fn mask(&self, a_h: &RingVector, s: &RingElem, sampler: &mut Sampler) -> RingVector {
        let g = &self.params.gauss;
        let ring = &self.ring;
        let rows = self.params.m - self.params.k;
        let s_ntt = ring.ntt_forward(s);
        let y = sampler.sample_ring_vec(ring, rows, g.tau);
        let z = sampler.sample_ring_vec(ring, self.params.k, g.gamma);
        a_h.iter()
            .zip(y.iter().chain(z.iter()))
            .map(|(a, e)| {
                let prod = ring.ntt_inverse(&ring.pointwise(&ring.ntt_forward(a), &s_ntt));
                ring.add_raw(&prod, e)
            })
            .collect()
    }

    /// `u s + e + bits * floor(q/2)` with `e ~ D_tau`.
    fn masked_bits(&self, u: &RingElem, s: &RingElem, bits: &RingElem, sampler: &mut Sampler) -> RingElem {
        let ring = &self.ring;
        let e = sampler.sample_ring_vec(ring, 1, self.params.gauss.tau);
        let shifted = ring.scalar_mul(bits, self.params.half_q());
        ring.add_raw(&ring.add_raw(&ring.mul_raw(u, s), &e[0]), &shifted)
    }

    pub fn encrypt(&self, pk: &PublicKey, message: &RingElem, sampler: &mut Sampler) -> Result<Ciphertext> {
        self.check_public_key(pk)?;
        let ring = &self.ring;
        if message.len() != ring.n() {
            return Err(Error::Dimension {
                expected: ring.n(),
                found: message.len(),
            });
        }
        let digest = hash_message(ring, message)?;
        let s1 = ring.sample_uniform(sampler);
        let s2 = ring.sample_uniform(sampler);
        let ct1 = self.masked_bits(&pk.u, &s1, message, sampler);
        let ct2 = self.masked_bits(&pk.u, &s2, &digest, sampler);
        let v = IdentityVector::random(ring, sampler);
        let h = frd_encode(ring, &v)?;
        let a_h = tag_shift(ring, &self.gadget, &pk.a, &h)?;
        let b_h = tag_shift(ring, &self.gadget, &pk.b, &h)?;
        let ct3 = self.mask(&a_h, &s1, sampler);
        let ct4 = self.mask(&b_h, &s2, sampler);
        Ok(Ciphertext { v, ct1, ct2, ct3, ct4 })
    }

    fn preimage(
        &self,
        trapdoor: &GTrapdoor,
        public: &RingVector,
        u: &RingElem,
        v: &IdentityVector,
        sampler: &mut Sampler,
    ) -> Result<RingVector> {
        let g = &self.params.gauss;
        let h = frd_encode(&self.ring, v)?;
        let shifted = tag_shift(&self.ring, &self.gadget, public, &h)?;
        sample_pre(
            &self.ring,
            &self.gadget,
            trapdoor,
            &shifted,
            &h,
            g.zeta,
            g.sigma,
            g.alpha,
            u,
            sampler,
        )
    }

    /// Threshold decoding of `c - d^T x`: a coefficient decodes to 1 when it
    /// is cyclically closer to `floor(q/2)` than to 0. Also returns the
    /// largest cyclic distance to the chosen target.
    fn decode(&self, c: &RingElem, d: &RingVector, x: &RingVector) -> Result<(RingElem, u64)> {
        let ring = &self.ring;
        let w = ring.sub(c, &ring.dot(d, x)?)?;
        let q = ring.q();
        let half = self.params.half_q();
        let dist = |a: u64, b: u64| {
            let d = if a >= b { a - b } else { b - a };
            d.min(q - d)
        };
        let mut noise = 0;
        let bits = w
            .coeffs()
            .iter()
            .map(|&wi| {
                let (d1, d0) = (dist(wi, half), dist(wi, 0));
                noise = noise.max(d1.min(d0));
                u64::from(d1 < d0)
            })
            .collect();
        Ok((ring.from_coeffs(bits)?, noise))
    }

    /// Decryption that also reports the observed error magnitude.
    pub fn decrypt_with_noise(
        &self,
        sk: &SecretKey,
        pk: &PublicKey,
        ct: &Ciphertext,
        sampler: &mut Sampler,
    ) -> Result<Decryption> {
        self.check_public_key(pk)?;
        self.check_ciphertext(ct)?;
        let x = self.preimage(&sk.t_a, &pk.a, &pk.u, &ct.v, sampler)?;
        let x_prime = self.preimage(&sk.t_b, &pk.b, &pk.u, &ct.v, sampler)?;
        let (message, noise_m) = self.decode(&ct.ct1, &ct.ct3, &x)?;
        let (digest, noise_h) = self.decode(&ct.ct2, &ct.ct4, &x_prime)?;
        if digest != hash_message(&self.ring, &message)? {
            return Err(Error::Reject);
        }
        Ok(Decryption {
            message,
            max_noise: noise_m.max(noise_h),
        })
    }

    pub fn decrypt(&self, sk: &SecretKey, pk: &PublicKey, ct: &Ciphertext, sampler: &mut Sampler) -> Result<RingElem> {
        self.decrypt_with_noise(sk, pk, ct, sampler).map(|d| d.message)
    }

    fn user_trapdoor(sk: &SecretKey, pk: &PublicKey) -> UserTrapdoor {
        UserTrapdoor {
            trapdoor: sk.t_b.clone(),
            b: Arc::clone(&pk.b),
            u: pk.u.clone(),
        }
    }

    fn bound_preimage(&self, sk: &SecretKey, pk: &PublicKey, ct: &Ciphertext, sampler: &mut Sampler) -> Result<BoundPreimage> {
        self.check_public_key(pk)?;
        self.check_ciphertext(ct)?;
        let x = self.preimage(&sk.t_b, &pk.b, &pk.u, &ct.v, sampler)?;
        Ok(BoundPreimage { v: ct.v.clone(), x })
    }

    pub fn td1(&self, sk: &SecretKey, pk: &PublicKey) -> AuthTrapdoor {
        AuthTrapdoor::Type1(Self::user_trapdoor(sk, pk))
    }

    pub fn td2(&self, sk: &SecretKey, pk: &PublicKey, ct: &Ciphertext, sampler: &mut Sampler) -> Result<AuthTrapdoor> {
        self.bound_preimage(sk, pk, ct, sampler).map(AuthTrapdoor::Type2)
    }

    pub fn td3_i(&self, sk: &SecretKey, pk: &PublicKey, ct: &Ciphertext, sampler: &mut Sampler) -> Result<AuthTrapdoor> {
        self.bound_preimage(sk, pk, ct, sampler).map(AuthTrapdoor::Type3I)
    }

    pub fn td3_j(&self, sk: &SecretKey, pk: &PublicKey) -> AuthTrapdoor {
        AuthTrapdoor::Type3J(Self::user_trapdoor(sk, pk))
    }

    fn digest_by_sampling(&self, td: &UserTrapdoor, ct: &Ciphertext, sampler: &mut Sampler) -> Result<RingElem> {
        self.check_ciphertext(ct)?;
        let x = self.preimage(&td.trapdoor, &td.b, &td.u, &ct.v, sampler)?;
        self.decode(&ct.ct2, &ct.ct4, &x).map(|(d, _)| d)
    }

    fn digest_by_preimage(&self, td: &BoundPreimage, ct: &Ciphertext) -> Result<RingElem> {
        self.check_ciphertext(ct)?;
        if td.v != ct.v {
            return Err(Error::BindingMismatch);
        }
        if td.x.len() != self.params.m {
            return Err(Error::Dimension {
                expected: self.params.m,
                found: td.x.len(),
            });
        }
        self.decode(&ct.ct2, &ct.ct4, &td.x).map(|(d, _)| d)
    }

    pub fn test1(
        &self,
        td_i: &AuthTrapdoor,
        td_j: &AuthTrapdoor,
        ct_i: &Ciphertext,
        ct_j: &Ciphertext,
        sampler: &mut Sampler,
    ) -> Result<bool> {
        let (AuthTrapdoor::Type1(ti), AuthTrapdoor::Type1(tj)) = (td_i, td_j) else {
            return Err(Error::VariantMismatch);
        };
        let hi = self.digest_by_sampling(ti, ct_i, sampler)?;
        let hj = self.digest_by_sampling(tj, ct_j, sampler)?;
        Ok(hi == hj)
    }

    /// Uses the stored preimages only; no sampling takes place.
    pub fn test2(&self, td_i: &AuthTrapdoor, td_j: &AuthTrapdoor, ct_i: &Ciphertext, ct_j: &Ciphertext) -> Result<bool> {
        let (AuthTrapdoor::Type2(ti), AuthTrapdoor::Type2(tj)) = (td_i, td_j) else {
            return Err(Error::VariantMismatch);
        };
        let hi = self.digest_by_preimage(ti, ct_i)?;
        let hj = self.digest_by_preimage(tj, ct_j)?;
        Ok(hi == hj)
    }

    /// Accepts one `Type3I` and one `Type3J` trapdoor in either order; each
    /// trapdoor is applied to the ciphertext passed in the same position.
    pub fn test3(
        &self,
        td_i: &AuthTrapdoor,
        td_j: &AuthTrapdoor,
        ct_i: &Ciphertext,
        ct_j: &Ciphertext,
        sampler: &mut Sampler,
    ) -> Result<bool> {
        let (bound, ct_bound, user, ct_user) = match (td_i, td_j) {
            (AuthTrapdoor::Type3I(b), AuthTrapdoor::Type3J(u)) => (b, ct_i, u, ct_j),
            (AuthTrapdoor::Type3J(u), AuthTrapdoor::Type3I(b)) => (b, ct_j, u, ct_i),
            _ => return Err(Error::VariantMismatch),
        };
        let hi = self.digest_by_preimage(bound, ct_bound)?;
        let hj = self.digest_by_sampling(user, ct_user, sampler)?;
        Ok(hi == hj)
    }
}
