//! Binary file format for keys, ciphertexts and trapdoors.
//!
//! Every file starts with a fixed 31-byte little-endian header:
//!
//! | field       | type  |
//! |-------------|-------|
//! | magic       | `PKEF`|
//! | version     | u16   |
//! | kind        | u8    |
//! | n           | u32   |
//! | q           | u64   |
//! | k           | u16   |
//! | m           | u16   |
//! | payload_len | u64   |
//!
//! Ring coefficients are packed as `k`-bit little-endian integers, with the
//! payload zero-padded to a byte boundary. Secret-key and trapdoor payloads
//! start with a [`SENSITIVE`] flag byte.

use std::sync::Arc;

use thiserror::Error;

use crate::hashing::IdentityVector;
use crate::params::Params;
use crate::pkeetfa::{AuthTrapdoor, BoundPreimage, Ciphertext, PublicKey, Scheme, SecretKey, UserTrapdoor};
use crate::ring::{Ring, RingElem, RingVector};
use crate::trapdoor::GTrapdoor;

pub const MAGIC: [u8; 4] = *b"PKEF";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 31;
/// First payload byte of secret-key and trapdoor files.
pub const SENSITIVE: u8 = 0x53;
/// Largest ring degree accepted from a file.
pub const MAX_DEGREE: u32 = 1 << 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("file truncated: need {needed} bytes, have {found}")]
    Truncated { needed: u64, found: u64 },
    #[error("bad magic")]
    BadMagic,
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u16),
    #[error("unknown object kind {0}")]
    UnknownKind(u8),
    #[error("expected a {expected:?} file, found {found:?}")]
    WrongKind { expected: ObjectKind, found: ObjectKind },
    #[error("file parameters do not match the active parameter set")]
    ParamsMismatch,
    #[error("no preset matches n={n}, q={q}, k={k}, m={m}")]
    UnknownParams { n: u32, q: u64, k: u16, m: u16 },
    #[error("payload length {found} does not match the expected {expected}")]
    PayloadLength { expected: u64, found: u64 },
    #[error("{0} trailing bytes after payload")]
    TrailingBytes(u64),
    #[error("coefficient out of range")]
    CoefficientOutOfRange,
    #[error("nonzero padding bits")]
    NonzeroPadding,
    #[error("missing sensitive flag")]
    MissingSensitiveFlag,
    #[error("unknown trapdoor variant {0}")]
    UnknownVariant(u8),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObjectKind {
    PublicKey = 1,
    SecretKey = 2,
    Ciphertext = 3,
    Trapdoor = 4,
}

impl ObjectKind {
    fn from_u8(b: u8) -> Result<Self, CodecError> {
        match b {
            1 => Ok(Self::PublicKey),
            2 => Ok(Self::SecretKey),
            3 => Ok(Self::Ciphertext),
            4 => Ok(Self::Trapdoor),
            other => Err(CodecError::UnknownKind(other)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FileHeader {
    pub version: u16,
    pub kind: ObjectKind,
    pub n: u32,
    pub q: u64,
    pub k: u16,
    pub m: u16,
    pub payload_len: u64,
}

impl FileHeader {
    fn for_params(params: &Params, kind: ObjectKind, payload_len: u64) -> Self {
        Self {
            version: VERSION,
            kind,
            n: params.n as u32,
            q: params.q,
            k: params.k as u16,
            m: params.m as u16,
            payload_len,
        }
    }

    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        out[0..4].copy_from_slice(&MAGIC);
        out[4..6].copy_from_slice(&self.version.to_le_bytes());
        out[6] = self.kind as u8;
        out[7..11].copy_from_slice(&self.n.to_le_bytes());
        out[11..19].copy_from_slice(&self.q.to_le_bytes());
        out[19..21].copy_from_slice(&self.k.to_le_bytes());
        out[21..23].copy_from_slice(&self.m.to_le_bytes());
        out[23..31].copy_from_slice(&self.payload_len.to_le_bytes());
        out
    }

    /// Parses the header and checks that exactly `payload_len` bytes follow.
    pub fn parse(bytes: &[u8]) -> Result<Self, CodecError> {
        if bytes.len() < HEADER_LEN {
            return Err(CodecError::Truncated {
                needed: HEADER_LEN as u64,
                found: bytes.len() as u64,
            });
        }
        if bytes[0..4] != MAGIC {
            return Err(CodecError::BadMagic);
        }
        let u16_at = |i: usize| u16::from_le_bytes([bytes[i], bytes[i + 1]]);
        let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
        let u64_at = |i: usize| u64::from_le_bytes(bytes[i..i + 8].try_into().unwrap());
        let version = u16_at(4);
        if version != VERSION {
            return Err(CodecError::UnsupportedVersion(version));
        }
        let header = Self {
            version,
            kind: ObjectKind::from_u8(bytes[6])?,
            n: u32_at(7),
            q: u64_at(11),
            k: u16_at(19),
            m: u16_at(21),
            payload_len: u64_at(23),
        };
        let available = (bytes.len() - HEADER_LEN) as u64;
        if available < header.payload_len {
            return Err(CodecError::Truncated {
                needed: (HEADER_LEN as u64).saturating_add(header.payload_len),
                found: bytes.len() as u64,
            });
        }
        if available > header.payload_len {
            return Err(CodecError::TrailingBytes(available - header.payload_len));
        }
        Ok(header)
    }

    /// The preset this header was written under.
    pub fn params(&self) -> Result<Params, CodecError> {
        let unknown = CodecError::UnknownParams {
            n: self.n,
            q: self.q,
            k: self.k,
            m: self.m,
        };
        if self.n == 0 || self.n > MAX_DEGREE {
            return Err(unknown);
        }
        Params::preset_by_fingerprint(self.n as usize, self.q, self.k as usize, self.m as usize).ok_or(unknown)
    }
}

/// Reads just the header of an encoded object.
pub fn peek_header(bytes: &[u8]) -> Result<FileHeader, CodecError> {
    FileHeader::parse(bytes)
}

struct BitWriter {
    out: Vec<u8>,
    acc: u128,
    filled: u32,
}

impl BitWriter {
    fn new() -> Self {
        Self {
            out: Vec::new(),
            acc: 0,
            filled: 0,
        }
    }

    fn byte(&mut self, b: u8) {
        debug_assert_eq!(self.filled, 0);
        self.out.push(b);
    }

    fn write(&mut self, value: u64, bits: u32) {
        self.acc |= u128::from(value) << self.filled;
        self.filled += bits;
        while self.filled >= 8 {
            self.out.push(self.acc as u8);
            self.acc >>= 8;
            self.filled -= 8;
        }
    }

    fn elem(&mut self, e: &RingElem, bits: u32) {
        for &c in e.coeffs() {
            self.write(c, bits);
        }
    }

    fn finish(mut self) -> Vec<u8> {
        if self.filled > 0 {
            self.out.push(self.acc as u8);
        }
        self.out
    }
}

struct BitReader<'a> {
    bytes: &'a [u8],
    pos: usize,
    acc: u128,
    filled: u32,
}

impl<'a> BitReader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self {
            bytes,
            pos: 0,
            acc: 0,
            filled: 0,
        }
    }

    fn byte(&mut self) -> Result<u8, CodecError> {
        let b = *self.bytes.get(self.pos).ok_or(CodecError::Truncated {
            needed: self.pos as u64 + 1,
            found: self.bytes.len() as u64,
        })?;
        self.pos += 1;
        Ok(b)
    }

    fn read(&mut self, bits: u32) -> Result<u64, CodecError> {
        while self.filled < bits {
            let b = self.byte()?;
            self.acc |= u128::from(b) << self.filled;
            self.filled += 8;
        }
        let v = (self.acc & ((1u128 << bits) - 1)) as u64;
        self.acc >>= bits;
        self.filled -= bits;
        Ok(v)
    }

    fn coeff(&mut self, q: u64, bits: u32) -> Result<u64, CodecError> {
        let c = self.read(bits)?;
        if c >= q {
            return Err(CodecError::CoefficientOutOfRange);
        }
        Ok(c)
    }

    fn elem(&mut self, ring: &Ring) -> Result<RingElem, CodecError> {
        let coeffs = (0..ring.n())
            .map(|_| self.coeff(ring.q(), ring.bits()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ring.from_coeffs(coeffs).expect("length n"))
    }

    fn vector(&mut self, ring: &Ring, len: usize) -> Result<RingVector, CodecError> {
        (0..len).map(|_| self.elem(ring)).collect::<Result<Vec<_>, _>>().map(RingVector::from)
    }

    fn signed(&mut self, ring: &Ring) -> Result<Vec<i64>, CodecError> {
        Ok(ring.centered(&self.elem(ring)?))
    }

    fn finish(self) -> Result<(), CodecError> {
        if self.pos != self.bytes.len() {
            return Err(CodecError::TrailingBytes((self.bytes.len() - self.pos) as u64));
        }
        if self.acc != 0 {
            return Err(CodecError::NonzeroPadding);
        }
        Ok(())
    }
}

/// Payload bits of a public key: `n (2m + 1) k`.
pub fn public_key_bits(p: &Params) -> u64 {
    (p.n * (2 * p.m + 1) * p.k) as u64
}

/// Payload bits of a ciphertext: `n (2m + 3) k`.
pub fn ciphertext_bits(p: &Params) -> u64 {
    (p.n * (2 * p.m + 3) * p.k) as u64
}

/// Packed trapdoor-matrix bits of a secret key: `2 n k (m - k) k`.
pub fn secret_key_bits(p: &Params) -> u64 {
    (2 * p.n * p.k * (p.m - p.k) * p.k) as u64
}

fn trapdoor_bits(p: &Params, kind: u8) -> u64 {
    let rows = p.m - p.k;
    let elems = match kind {
        1 | 4 => rows * p.k + p.m + 1,
        _ => 1 + p.m,
    };
    (p.n * elems * p.k) as u64
}

fn expected_payload(p: &Params, kind: ObjectKind, variant: Option<u8>) -> u64 {
    let bytes = |bits: u64| bits.div_ceil(8);
    match kind {
        ObjectKind::PublicKey => bytes(public_key_bits(p)),
        ObjectKind::Ciphertext => bytes(ciphertext_bits(p)),
        ObjectKind::SecretKey => 1 + bytes(secret_key_bits(p)),
        ObjectKind::Trapdoor => 2 + bytes(trapdoor_bits(p, variant.unwrap_or(1))),
    }
}

fn frame(params: &Params, kind: ObjectKind, payload: Vec<u8>) -> Vec<u8> {
    let header = FileHeader::for_params(params, kind, payload.len() as u64);
    let mut out = header.to_bytes().to_vec();
    out.extend_from_slice(&payload);
    out
}

/// Parses and checks the header against `scheme` and `kind`, returning the
/// payload.
fn open<'a>(scheme: &Scheme, bytes: &'a [u8], kind: ObjectKind) -> Result<&'a [u8], CodecError> {
    let header = FileHeader::parse(bytes)?;
    if header.kind != kind {
        return Err(CodecError::WrongKind {
            expected: kind,
            found: header.kind,
        });
    }
    let p = scheme.params();
    if (header.n as usize, header.q, header.k as usize, header.m as usize) != (p.n, p.q, p.k, p.m) {
        return Err(CodecError::ParamsMismatch);
    }
    let payload = &bytes[HEADER_LEN..];
    let variant = if kind == ObjectKind::Trapdoor {
        payload.get(1).copied()
    } else {
        None
    };
    let expected = expected_payload(p, kind, variant);
    if header.payload_len != expected {
        return Err(CodecError::PayloadLength {
            expected,
            found: header.payload_len,
        });
    }
    Ok(payload)
}

pub fn encode_public_key(scheme: &Scheme, pk: &PublicKey) -> Vec<u8> {
    let bits = scheme.ring().bits();
    let mut w = BitWriter::new();
    for e in pk.a.iter().chain(pk.b.iter()) {
        w.elem(e, bits);
    }
    w.elem(&pk.u, bits);
    frame(scheme.params(), ObjectKind::PublicKey, w.finish())
}

pub fn decode_public_key(scheme: &Scheme, bytes: &[u8]) -> Result<PublicKey, CodecError> {
    let payload = open(scheme, bytes, ObjectKind::PublicKey)?;
    let ring = scheme.ring();
    let m = scheme.params().m;
    let mut r = BitReader::new(payload);
    let a = r.vector(ring, m)?;
    let b = r.vector(ring, m)?;
    let u = r.elem(ring)?;
    r.finish()?;
    Ok(PublicKey {
        a: Arc::new(a),
        b: Arc::new(b),
        u,
    })
}

fn write_matrix(w: &mut BitWriter, ring: &Ring, t: &GTrapdoor) {
    for row in t.matrix() {
        for entry in row {
            w.elem(&ring.from_signed(entry).expect("length n"), ring.bits());
        }
    }
}

fn read_matrix(r: &mut BitReader<'_>, scheme: &Scheme) -> Result<GTrapdoor, CodecError> {
    let ring = scheme.ring();
    let p = scheme.params();
    let matrix = (0..p.m - p.k)
        .map(|_| (0..p.k).map(|_| r.signed(ring)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GTrapdoor::from_matrix(matrix, ring.zero(), p.gauss.sigma))
}

pub fn encode_secret_key(scheme: &Scheme, sk: &SecretKey) -> Vec<u8> {
    let mut w = BitWriter::new();
    w.byte(SENSITIVE);
    write_matrix(&mut w, scheme.ring(), &sk.t_a);
    write_matrix(&mut w, scheme.ring(), &sk.t_b);
    frame(scheme.params(), ObjectKind::SecretKey, w.finish())
}

pub fn decode_secret_key(scheme: &Scheme, bytes: &[u8]) -> Result<SecretKey, CodecError> {
    let payload = open(scheme, bytes, ObjectKind::SecretKey)?;
    let mut r = BitReader::new(payload);
    if r.byte()? != SENSITIVE {
        return Err(CodecError::MissingSensitiveFlag);
    }
    let t_a = read_matrix(&mut r, scheme)?;
    let t_b = read_matrix(&mut r, scheme)?;
    r.finish()?;
    Ok(SecretKey { t_a, t_b })
}

pub fn encode_ciphertext(scheme: &Scheme, ct: &Ciphertext) -> Vec<u8> {
    let bits = scheme.ring().bits();
    let mut w = BitWriter::new();
    for &c in ct.v.as_slice() {
        w.write(c, bits);
    }
    w.elem(&ct.ct1, bits);
    w.elem(&ct.ct2, bits);
    for e in ct.ct3.iter().chain(ct.ct4.iter()) {
        w.elem(e, bits);
    }
    frame(scheme.params(), ObjectKind::Ciphertext, w.finish())
}

fn read_identity(r: &mut BitReader<'_>, ring: &Ring) -> Result<IdentityVector, CodecError> {
    let v = r.elem(ring)?.into_coeffs();
    Ok(IdentityVector::new(ring, v).expect("validated coefficients"))
}

pub fn decode_ciphertext(scheme: &Scheme, bytes: &[u8]) -> Result<Ciphertext, CodecError> {
    let payload = open(scheme, bytes, ObjectKind::Ciphertext)?;
    let ring = scheme.ring();
    let m = scheme.params().m;
    let mut r = BitReader::new(payload);
    let v = read_identity(&mut r, ring)?;
    let ct1 = r.elem(ring)?;
    let ct2 = r.elem(ring)?;
    let ct3 = r.vector(ring, m)?;
    let ct4 = r.vector(ring, m)?;
    r.finish()?;
    Ok(Ciphertext { v, ct1, ct2, ct3, ct4 })
}

fn variant_byte(td: &AuthTrapdoor) -> u8 {
    match td {
        AuthTrapdoor::Type1(_) => 1,
        AuthTrapdoor::Type2(_) => 2,
        AuthTrapdoor::Type3I(_) => 3,
        AuthTrapdoor::Type3J(_) => 4,
    }
}

pub fn encode_trapdoor(scheme: &Scheme, td: &AuthTrapdoor) -> Vec<u8> {
    let ring = scheme.ring();
    let bits = ring.bits();
    let mut w = BitWriter::new();
    w.byte(SENSITIVE);
    w.byte(variant_byte(td));
    match td {
        AuthTrapdoor::Type1(u) | AuthTrapdoor::Type3J(u) => {
            write_matrix(&mut w, ring, &u.trapdoor);
            for e in u.b.iter() {
                w.elem(e, bits);
            }
            w.elem(&u.u, bits);
        }
        AuthTrapdoor::Type2(b) | AuthTrapdoor::Type3I(b) => {
            for &c in b.v.as_slice() {
                w.write(c, bits);
            }
            for e in b.x.iter() {
                w.elem(e, bits);
            }
        }
    }
    frame(scheme.params(), ObjectKind::Trapdoor, w.finish())
}

pub fn decode_trapdoor(scheme: &Scheme, bytes: &[u8]) -> Result<AuthTrapdoor, CodecError> {
    let payload = open(scheme, bytes, ObjectKind::Trapdoor)?;
    let ring = scheme.ring();
    let m = scheme.params().m;
    let mut r = BitReader::new(payload);
    if r.byte()? != SENSITIVE {
        return Err(CodecError::MissingSensitiveFlag);
    }
    let variant = r.byte()?;
    let td = match variant {
        1 | 4 => {
            let trapdoor = read_matrix(&mut r, scheme)?;
            let b = Arc::new(r.vector(ring, m)?);
            let u = r.elem(ring)?;
            let user = UserTrapdoor { trapdoor, b, u };
            if variant == 1 {
                AuthTrapdoor::Type1(user)
            } else {
                AuthTrapdoor::Type3J(user)
            }
        }
        2 | 3 => {
            let v = read_identity(&mut r, ring)?;
            let x = r.vector(ring, m)?;
            let bound = BoundPreimage { v, x };
            if variant == 2 {
                AuthTrapdoor::Type2(bound)
            } else {
                AuthTrapdoor::Type3I(bound)
            }
        }
        other => return Err(CodecError::UnknownVariant(other)),
    };
    r.finish()?;
    Ok(td)
}
