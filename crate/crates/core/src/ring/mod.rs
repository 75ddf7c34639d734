//! Arithmetic in `R_q = Z_q[x]/(x^n + 1)` for `n` a power of two and prime
//! `q = 1 mod 2n`.

mod modulus;
mod ntt;

use std::ops::Index;

use rand::RngCore;

use crate::error::{Error, Result};

pub use modulus::{is_prime, Modulus};
pub use ntt::NttTables;

/// A polynomial of `R_q` stored as canonical coefficients in `[0, q)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingElem {
    coeffs: Vec<u64>,
}

impl RingElem {
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<u64> {
        self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// True when every coefficient is 0 or 1, i.e. the element lies in `R_2`.
    pub fn is_binary(&self) -> bool {
        self.coeffs.iter().all(|&c| c <= 1)
    }
}

/// A ring element in the NTT (evaluation) domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NttElem {
    slots: Vec<u64>,
}

impl NttElem {
    pub fn slots(&self) -> &[u64] {
        &self.slots
    }
}

/// A vector of ring elements sharing the same `(n, q)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RingVector {
    elems: Vec<RingElem>,
}

impl RingVector {
    pub fn new(elems: Vec<RingElem>) -> Self {
        Self { elems }
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, RingElem> {
        self.elems.iter()
    }

    pub fn as_slice(&self) -> &[RingElem] {
        &self.elems
    }

    pub fn into_inner(self) -> Vec<RingElem> {
        self.elems
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [RingElem] {
        &mut self.elems
    }
}

impl Index<usize> for RingVector {
    type Output = RingElem;

    fn index(&self, i: usize) -> &RingElem {
        &self.elems[i]
    }
}

impl From<Vec<RingElem>> for RingVector {
    fn from(elems: Vec<RingElem>) -> Self {
        Self { elems }
    }
}

impl FromIterator<RingElem> for RingVector {
    fn from_iter<I: IntoIterator<Item = RingElem>>(iter: I) -> Self {
        Self {
            elems: iter.into_iter().collect(),
        }
    }
}

impl<'a> IntoIterator for &'a RingVector {
    type Item = &'a RingElem;
    type IntoIter = std::slice::Iter<'a, RingElem>;

    fn into_iter(self) -> Self::IntoIter {
        self.elems.iter()
    }
}

/// The ring `R_q` together with its NTT tables. Immutable after construction.
#[derive(Clone, Debug)]
pub struct Ring {
    n: usize,
    modulus: Modulus,
    bits: u32,
    ntt: NttTables,
}

impl Ring {
    pub fn new(n: usize, q: u64) -> Result<Self> {
        let unsupported = || Error::UnsupportedRing { n, q };
        if q < 3 || q > 1 << 62 || !is_prime(q) {
            return Err(unsupported());
        }
        let modulus = Modulus::new(q);
        let ntt = NttTables::new(n, modulus).ok_or_else(unsupported)?;
        Ok(Self {
            n,
            modulus,
            bits: 64 - (q - 1).leading_zeros(),
            ntt,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.modulus.value()
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    /// `ceil(log2 q)`.
    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn tables(&self) -> &NttTables {
        &self.ntt
    }

    pub fn zero(&self) -> RingElem {
        RingElem {
            coeffs: vec![0; self.n],
        }
    }

    pub fn one(&self) -> RingElem {
        self.constant(1)
    }

    pub fn constant(&self, c: u64) -> RingElem {
        let mut coeffs = vec![0; self.n];
        coeffs[0] = c % self.q();
        RingElem { coeffs }
    }

    /// The monomial `x^i` for `i < n`.
    pub fn monomial(&self, i: usize) -> RingElem {
        let mut e = self.zero();
        e.coeffs[i % self.n] = 1;
        e
    }

    pub fn from_coeffs(&self, coeffs: Vec<u64>) -> Result<RingElem> {
        self.check_len(coeffs.len())?;
        let q = self.q();
        Ok(RingElem {
            coeffs: coeffs.into_iter().map(|c| c % q).collect(),
        })
    }

    pub fn from_signed(&self, coeffs: &[i64]) -> Result<RingElem> {
        self.check_len(coeffs.len())?;
        Ok(self.from_signed_raw(coeffs))
    }

    pub(crate) fn from_signed_raw(&self, coeffs: &[i64]) -> RingElem {
        RingElem {
            coeffs: coeffs.iter().map(|&c| self.modulus.from_i64(c)).collect(),
        }
    }

    /// Centered view with coefficients in `(-q/2, q/2]`.
    pub fn centered(&self, f: &RingElem) -> Vec<i64> {
        f.coeffs.iter().map(|&c| self.modulus.center(c)).collect()
    }

    fn check_len(&self, found: usize) -> Result<()> {
        if found == self.n {
            Ok(())
        } else {
            Err(Error::Dimension {
                expected: self.n,
                found,
            })
        }
    }

    fn check_pair(&self, f: &RingElem, g: &RingElem) -> Result<()> {
        self.check_len(f.len())?;
        self.check_len(g.len())
    }

    pub fn add(&self, f: &RingElem, g: &RingElem) -> Result<RingElem> {
        self.check_pair(f, g)?;
        Ok(self.add_raw(f, g))
    }

    pub fn sub(&self, f: &RingElem, g: &RingElem) -> Result<RingElem> {
        self.check_pair(f, g)?;
        Ok(self.sub_raw(f, g))
    }

    pub fn neg(&self, f: &RingElem) -> RingElem {
        RingElem {
            coeffs: f.coeffs.iter().map(|&c| self.modulus.neg(c)).collect(),
        }
    }

    pub fn scalar_mul(&self, f: &RingElem, c: u64) -> RingElem {
        let c = c % self.q();
        RingElem {
            coeffs: f.coeffs.iter().map(|&x| self.modulus.mul(x, c)).collect(),
        }
    }

    /// Negacyclic product via the NTT.
    pub fn mul(&self, f: &RingElem, g: &RingElem) -> Result<RingElem> {
        self.check_pair(f, g)?;
        Ok(self.mul_raw(f, g))
    }

    pub(crate) fn add_raw(&self, f: &RingElem, g: &RingElem) -> RingElem {
        RingElem {
            coeffs: f
                .coeffs
                .iter()
                .zip(&g.coeffs)
                .map(|(&a, &b)| self.modulus.add(a, b))
                .collect(),
        }
    }

    pub(crate) fn add_assign_raw(&self, f: &mut RingElem, g: &RingElem) {
        for (a, &b) in f.coeffs.iter_mut().zip(&g.coeffs) {
            *a = self.modulus.add(*a, b);
        }
    }

    pub(crate) fn sub_raw(&self, f: &RingElem, g: &RingElem) -> RingElem {
        RingElem {
            coeffs: f
                .coeffs
                .iter()
                .zip(&g.coeffs)
                .map(|(&a, &b)| self.modulus.sub(a, b))
                .collect(),
        }
    }

    pub(crate) fn mul_raw(&self, f: &RingElem, g: &RingElem) -> RingElem {
        let fh = self.ntt_forward(f);
        let gh = self.ntt_forward(g);
        self.ntt_inverse(&self.pointwise(&fh, &gh))
    }

    pub fn ntt_forward(&self, f: &RingElem) -> NttElem {
        let mut slots = f.coeffs.clone();
        self.ntt.forward(&mut slots);
        NttElem { slots }
    }

    pub fn ntt_inverse(&self, f: &NttElem) -> RingElem {
        let mut coeffs = f.slots.clone();
        self.ntt.inverse(&mut coeffs);
        RingElem { coeffs }
    }

    pub fn ntt_vec(&self, v: &RingVector) -> Vec<NttElem> {
        v.iter().map(|e| self.ntt_forward(e)).collect()
    }

    pub fn pointwise(&self, f: &NttElem, g: &NttElem) -> NttElem {
        NttElem {
            slots: f
                .slots
                .iter()
                .zip(&g.slots)
                .map(|(&a, &b)| self.modulus.mul(a, b))
                .collect(),
        }
    }

    /// `acc += f * g` slotwise.
    pub(crate) fn pointwise_acc(&self, acc: &mut NttElem, f: &NttElem, g: &NttElem) {
        for ((a, &x), &y) in acc.slots.iter_mut().zip(&f.slots).zip(&g.slots) {
            *a = self.modulus.add(*a, self.modulus.mul(x, y));
        }
    }

    pub(crate) fn ntt_zero(&self) -> NttElem {
        NttElem {
            slots: vec![0; self.n],
        }
    }

    /// Inner product of two precomputed NTT vectors, returned in the
    /// coefficient domain.
    pub(crate) fn dot_ntt(&self, f: &[NttElem], g: &[NttElem]) -> RingElem {
        let mut acc = self.ntt_zero();
        for (x, y) in f.iter().zip(g) {
            self.pointwise_acc(&mut acc, x, y);
        }
        self.ntt_inverse(&acc)
    }

    /// `f^T g` for two ring vectors of equal length.
    pub fn dot(&self, f: &RingVector, g: &RingVector) -> Result<RingElem> {
        if f.len() != g.len() {
            return Err(Error::Dimension {
                expected: f.len(),
                found: g.len(),
            });
        }
        for (x, y) in f.iter().zip(g) {
            self.check_pair(x, y)?;
        }
        let mut acc = self.ntt_zero();
        let (mut fx, mut gx) = (vec![0; self.n], vec![0; self.n]);
        for (x, y) in f.iter().zip(g) {
            fx.copy_from_slice(&x.coeffs);
            gx.copy_from_slice(&y.coeffs);
            self.ntt.forward(&mut fx);
            self.ntt.forward(&mut gx);
            for ((a, &u), &v) in acc.slots.iter_mut().zip(&fx).zip(&gx) {
                *a = self.modulus.add(*a, self.modulus.mul(u, v));
            }
        }
        Ok(self.ntt_inverse(&acc))
    }

    /// An element is a unit iff none of its NTT slots vanishes.
    pub fn is_invertible(&self, f: &RingElem) -> bool {
        f.len() == self.n && self.ntt_forward(f).slots.iter().all(|&s| s != 0)
    }

    pub fn inverse(&self, f: &RingElem) -> Result<RingElem> {
        self.check_len(f.len())?;
        let fh = self.ntt_forward(f);
        let slots = fh
            .slots
            .iter()
            .map(|&s| self.modulus.inv(s).ok_or(Error::NotInvertible))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.ntt_inverse(&NttElem { slots }))
    }

    /// Uniform element of `R_q`, coefficientwise rejection on masked words.
    pub fn sample_uniform<R: RngCore + ?Sized>(&self, rng: &mut R) -> RingElem {
        RingElem {
            coeffs: (0..self.n).map(|_| self.uniform_coeff(rng)).collect(),
        }
    }

    pub fn sample_uniform_vec<R: RngCore + ?Sized>(&self, len: usize, rng: &mut R) -> RingVector {
        (0..len).map(|_| self.sample_uniform(rng)).collect()
    }

    pub(crate) fn uniform_coeff<R: RngCore + ?Sized>(&self, rng: &mut R) -> u64 {
        let mask = if self.bits >= 64 {
            u64::MAX
        } else {
            (1u64 << self.bits) - 1
        };
        loop {
            let c = rng.next_u64() & mask;
            if c < self.q() {
                return c;
            }
        }
    }

    pub fn zero_vec(&self, len: usize) -> RingVector {
        (0..len).map(|_| self.zero()).collect()
    }

    /// Elementwise `f + g`.
    pub fn add_vec(&self, f: &RingVector, g: &RingVector) -> Result<RingVector> {
        if f.len() != g.len() {
            return Err(Error::Dimension {
                expected: f.len(),
                found: g.len(),
            });
        }
        f.iter()
            .zip(g)
            .map(|(x, y)| self.add(x, y))
            .collect::<Result<Vec<_>>>()
            .map(RingVector::from)
    }

    /// Squared Euclidean norm of the centered coefficient vector.
    pub fn norm_sq(&self, v: &RingVector) -> f64 {
        v.iter()
            .flat_map(|e| self.centered(e))
            .map(|c| (c as f64) * (c as f64))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    const Q62: u64 = 4611686018427365377;

    /// O(n^2) negacyclic convolution over i128.
    fn schoolbook(f: &[u64], g: &[u64], q: u64) -> Vec<u64> {
        let n = f.len();
        let mut acc = vec![0i128; n];
        for i in 0..n {
            for j in 0..n {
                let p = f[i] as i128 * g[j] as i128 % q as i128;
                if i + j < n {
                    acc[i + j] += p;
                } else {
                    acc[i + j - n] -= p;
                }
            }
        }
        acc.into_iter()
            .map(|c| c.rem_euclid(q as i128) as u64)
            .collect()
    }

    fn toy() -> Ring {
        Ring::new(8, 17).unwrap()
    }

    #[test]
    fn add_identity_and_inverse() {
        let r = toy();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let g = r.sample_uniform(&mut rng);
        assert_eq!(r.add(&r.zero(), &g).unwrap(), g);
        assert!(r.add(&g, &r.neg(&g)).unwrap().is_zero());
        let x = r.monomial(1);
        let y = r.scalar_mul(&r.monomial(1), 16);
        assert!(r.add(&x, &y).unwrap().is_zero());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let r = toy();
        let short = RingElem { coeffs: vec![0; 4] };
        assert!(matches!(
            r.add(&r.one(), &short),
            Err(Error::Dimension { expected: 8, found: 4 })
        ));
        assert!(r.mul(&short, &r.one()).is_err());
        assert!(r.from_coeffs(vec![1; 9]).is_err());
    }

    #[test]
    fn x4_times_x4_is_minus_one() {
        let r = toy();
        let x4 = r.monomial(4);
        assert_eq!(r.mul(&x4, &x4).unwrap(), r.constant(16));
    }

    #[test]
    fn multiplicative_identity() {
        let r = Ring::new(1024, Q62).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let f = r.sample_uniform(&mut rng);
        assert_eq!(r.mul(&f, &r.one()).unwrap(), f);
    }

    #[test]
    fn constant_inverse() {
        let r = toy();
        assert_eq!(r.inverse(&r.one()).unwrap(), r.one());
        assert_eq!(r.inverse(&r.constant(5)).unwrap(), r.constant(7));
        assert!(matches!(r.inverse(&r.zero()), Err(Error::NotInvertible)));
    }

    /// Extended Euclid in Z_17[x]: f is a unit mod x^8+1 iff gcd(f, x^8+1) = 1.
    fn poly_gcd_is_one(f: &[u64], q: u64) -> bool {
        let md = Modulus::new(q);
        let trim = |p: &mut Vec<u64>| {
            while p.last() == Some(&0) {
                p.pop();
            }
        };
        let mut a = vec![0u64; 9];
        a[0] = 1;
        a[8] = 1;
        let mut b = f.to_vec();
        trim(&mut b);
        while !b.is_empty() {
            // a mod b
            while a.len() >= b.len() {
                let shift = a.len() - b.len();
                let lead = md.mul(*a.last().unwrap(), md.inv(*b.last().unwrap()).unwrap());
                for (i, &c) in b.iter().enumerate() {
                    a[i + shift] = md.sub(a[i + shift], md.mul(lead, c));
                }
                trim(&mut a);
                if a.is_empty() {
                    break;
                }
            }
            std::mem::swap(&mut a, &mut b);
        }
        a.len() == 1
    }

    #[test]
    fn invertibility_matches_gcd_oracle() {
        let r = toy();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let mut units = 0;
        for _ in 0..5000 {
            let f = r.sample_uniform(&mut rng);
            let oracle = poly_gcd_is_one(f.coeffs(), 17);
            assert_eq!(r.is_invertible(&f), oracle);
            match r.inverse(&f) {
                Ok(g) => {
                    units += 1;
                    assert_eq!(r.mul(&f, &g).unwrap(), r.one());
                }
                Err(e) => assert!(matches!(e, Error::NotInvertible)),
            }
        }
        // (16/17)^8 of the ring are units.
        let expected = 5000.0 * (16.0f64 / 17.0).powi(8);
        assert!((units as f64 - expected).abs() < 5.0 * expected.sqrt());
    }

    #[test]
    fn ntt_roundtrip_small_cases() {
        let r = toy();
        let z = r.ntt_forward(&r.zero());
        assert!(z.slots().iter().all(|&s| s == 0));
        let one = r.ntt_forward(&r.one());
        assert!(one.slots().iter().all(|&s| s == 1));
        assert_eq!(r.ntt_inverse(&one), r.one());
    }

    #[test]
    fn ntt_roundtrip_n1024() {
        let r = Ring::new(1024, Q62).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        for _ in 0..20 {
            let f = r.sample_uniform(&mut rng);
            assert_eq!(r.ntt_inverse(&r.ntt_forward(&f)), f);
        }
    }

    #[test]
    fn mul_matches_schoolbook_at_n16() {
        let r = Ring::new(16, 97).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            let f = r.sample_uniform(&mut rng);
            let g = r.sample_uniform(&mut rng);
            assert_eq!(r.mul(&f, &g).unwrap().coeffs(), &schoolbook(f.coeffs(), g.coeffs(), 97)[..]);
        }
    }

    #[test]
    fn mul_matches_schoolbook_at_62_bits() {
        let r = Ring::new(64, Q62).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        for _ in 0..200 {
            let f = r.sample_uniform(&mut rng);
            let g = r.sample_uniform(&mut rng);
            assert_eq!(r.mul(&f, &g).unwrap().coeffs(), &schoolbook(f.coeffs(), g.coeffs(), r.q())[..]);
        }
    }

    #[test]
    fn uniform_sampling_is_seeded() {
        let r = Ring::new(1024, Q62).unwrap();
        let a = r.sample_uniform(&mut ChaCha20Rng::seed_from_u64(9));
        let b = r.sample_uniform(&mut ChaCha20Rng::seed_from_u64(9));
        let c = r.sample_uniform(&mut ChaCha20Rng::seed_from_u64(10));
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.coeffs().iter().all(|&x| x < Q62));
    }

    #[test]
    fn uniform_histogram_mod_17() {
        let r = toy();
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let mut counts = [0u64; 17];
        let draws = 1_000_000 / 8;
        for _ in 0..draws {
            for &c in r.sample_uniform(&mut rng).coeffs() {
                counts[c as usize] += 1;
            }
        }
        let total = (draws * 8) as f64;
        let p = 1.0 / 17.0;
        let sd = (total * p * (1.0 - p)).sqrt();
        let mut chi2 = 0.0;
        for &c in &counts {
            assert!((c as f64 - total * p).abs() < 5.0 * sd);
            chi2 += (c as f64 - total * p).powi(2) / (total * p);
        }
        // 16 degrees of freedom; 99.99th percentile is about 42.
        assert!(chi2 < 42.0, "chi2 = {chi2}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ring_laws(seed in any::<u64>()) {
            let r = Ring::new(16, 97).unwrap();
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let f = r.sample_uniform(&mut rng);
            let g = r.sample_uniform(&mut rng);
            let h = r.sample_uniform(&mut rng);
            prop_assert_eq!(r.mul(&f, &g).unwrap(), r.mul(&g, &f).unwrap());
            let lhs = r.mul(&f, &r.add(&g, &h).unwrap()).unwrap();
            let rhs = r.add(&r.mul(&f, &g).unwrap(), &r.mul(&f, &h).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            if let Ok(fi) = r.inverse(&f) {
                prop_assert_eq!(r.mul(&f, &fi).unwrap(), r.one());
            }
            prop_assert_eq!(r.ntt_inverse(&r.ntt_forward(&f)), f);
        }
    }
}
