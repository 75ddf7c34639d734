//! The identity hash `H: Z_q^n -> R_q` and the message hash `H': R_2 -> R_2`.
//!
//! Both are built on SHAKE256 with distinct domain-separation prefixes.

use rand::RngCore;
use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake256;

use crate::error::{Error, Result};
use crate::ring::{Ring, RingElem};

const IDENTITY_DOMAIN: &[u8] = b"PKEET-FA/H/identity";
const MESSAGE_DOMAIN: &[u8] = b"PKEET-FA/H'/message";

/// Attempts before [`frd_encode`] gives up.
pub const MAX_FRD_ATTEMPTS: u32 = 256;

/// Identity vector `v` in `Z_q^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IdentityVector {
    v: Vec<u64>,
}

impl IdentityVector {
    pub fn new(ring: &Ring, v: Vec<u64>) -> Result<Self> {
        if v.len() != ring.n() {
            return Err(Error::Dimension {
                expected: ring.n(),
                found: v.len(),
            });
        }
        if let Some(&value) = v.iter().find(|&&c| c >= ring.q()) {
            return Err(Error::CoefficientOutOfRange { value, q: ring.q() });
        }
        Ok(Self { v })
    }

    /// Uniform nonzero identity.
    pub fn random<R: RngCore + ?Sized>(ring: &Ring, rng: &mut R) -> Self {
        loop {
            let v: Vec<u64> = (0..ring.n()).map(|_| ring.uniform_coeff(rng)).collect();
            if v.iter().any(|&c| c != 0) {
                return Self { v };
            }
        }
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.v
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.v.iter().all(|&c| c == 0)
    }
}

/// Maps `v` to an invertible ring element. Candidates are read from
/// `SHAKE256(domain || n || q || counter || v)` by masked rejection and the
/// first invertible one is returned.
pub fn frd_encode(ring: &Ring, v: &IdentityVector) -> Result<RingElem> {
    if v.len() != ring.n() {
        return Err(Error::Dimension {
            expected: ring.n(),
            found: v.len(),
        });
    }
    let mask = if ring.bits() == 64 {
        u64::MAX
    } else {
        (1u64 << ring.bits()) - 1
    };
    for counter in 0..MAX_FRD_ATTEMPTS {
        let mut xof = Shake256::default();
        xof.update(IDENTITY_DOMAIN);
        xof.update(&(ring.n() as u32).to_le_bytes());
        xof.update(&ring.q().to_le_bytes());
        xof.update(&counter.to_le_bytes());
        for &c in v.as_slice() {
            xof.update(&c.to_le_bytes());
        }
        let mut reader = xof.finalize_xof();
        let mut word = [0u8; 8];
        let coeffs: Vec<u64> = (0..ring.n())
            .map(|_| loop {
                reader.read(&mut word);
                let c = u64::from_le_bytes(word) & mask;
                if c < ring.q() {
                    break c;
                }
            })
            .collect();
        let candidate = ring.from_coeffs(coeffs)?;
        if ring.is_invertible(&candidate) {
            return Ok(candidate);
        }
    }
    Err(Error::ExhaustedRejection(MAX_FRD_ATTEMPTS as usize))
}

/// Canonical byte encoding of a binary element: `n` bits, little-endian
/// within each byte, zero-padded.
pub fn encode_message(m: &RingElem) -> Result<Vec<u8>> {
    if !m.is_binary() {
        return Err(Error::NonBinaryMessage);
    }
    let mut out = vec![0u8; m.len().div_ceil(8)];
    for (i, &c) in m.coeffs().iter().enumerate() {
        out[i / 8] |= (c as u8) << (i % 8);
    }
    Ok(out)
}

/// Inverse of [`encode_message`]. Padding bits must be zero.
pub fn decode_message(ring: &Ring, bytes: &[u8]) -> Result<RingElem> {
    let n = ring.n();
    if bytes.len() != n.div_ceil(8) {
        return Err(Error::Dimension {
            expected: n.div_ceil(8),
            found: bytes.len(),
        });
    }
    if n % 8 != 0 && bytes[n / 8] >> (n % 8) != 0 {
        return Err(Error::NonBinaryMessage);
    }
    let coeffs = (0..n).map(|i| u64::from((bytes[i / 8] >> (i % 8)) & 1)).collect();
    ring.from_coeffs(coeffs)
}

/// `H'(M)`: `n` output bits of SHAKE256 over the canonical encoding of `M`.
pub fn hash_message(ring: &Ring, m: &RingElem) -> Result<RingElem> {
    if m.len() != ring.n() {
        return Err(Error::Dimension {
            expected: ring.n(),
            found: m.len(),
        });
    }
    let bytes = encode_message(m)?;
    let mut xof = Shake256::default();
    xof.update(MESSAGE_DOMAIN);
    xof.update(&(ring.n() as u32).to_le_bytes());
    xof.update(&bytes);
    let mut digest = vec![0u8; bytes.len()];
    xof.finalize_xof().read(&mut digest);
    if ring.n() % 8 != 0 {
        let last = digest.len() - 1;
        digest[last] &= (1u8 << (ring.n() % 8)) - 1;
    }
    decode_message(ring, &digest)
}

/// Uniform binary message.
pub fn random_message<R: RngCore + ?Sized>(ring: &Ring, rng: &mut R) -> RingElem {
    let mut bytes = vec![0u8; ring.n().div_ceil(8)];
    rng.fill_bytes(&mut bytes);
    let coeffs = (0..ring.n()).map(|i| u64::from((bytes[i / 8] >> (i % 8)) & 1)).collect();
    ring.from_coeffs(coeffs).expect("length n")
}
