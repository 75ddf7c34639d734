//! Negacyclic number-theoretic transform over `Z_q[x]/(x^n + 1)`.
//!
//! The forward transform is an in-place Cooley-Tukey butterfly over powers
//! of a primitive `2n`-th root of unity `psi` stored in bit-reversed order,
//! so slot `i` holds the evaluation at `psi^(2 brv(i) + 1)`. The inverse is
//! the matching Gentleman-Sande pass followed by scaling with `n^{-1}`.

use super::modulus::{sign_mask, Modulus};

#[derive(Clone, Debug)]
pub struct NttTables {
    n: usize,
    modulus: Modulus,
    psi: u64,
    /// `psi^brv(i)`.
    fwd: Vec<Twiddle>,
    /// `psi^{-brv(i)}`.
    inv: Vec<Twiddle>,
    n_inv: Twiddle,
}

/// A constant multiplier with its Shoup quotient `floor(w 2^64 / q)`.
#[derive(Clone, Copy, Debug)]
struct Twiddle {
    w: u64,
    w_shoup: u64,
}

impl Twiddle {
    fn new(w: u64, q: u64) -> Self {
        Self {
            w,
            w_shoup: (((w as u128) << 64) / q as u128) as u64,
        }
    }

    /// `a w mod q` for `a < q`.
    #[inline(always)]
    fn mul(self, a: u64, q: u64) -> u64 {
        let hi = ((a as u128 * self.w_shoup as u128) >> 64) as u64;
        let r = a.wrapping_mul(self.w).wrapping_sub(hi.wrapping_mul(q));
        let d = r.wrapping_sub(q);
        d.wrapping_add(q & sign_mask(d))
    }
}

fn bit_reverse(x: usize, bits: u32) -> usize {
    if bits == 0 {
        0
    } else {
        x.reverse_bits() >> (usize::BITS - bits)
    }
}

impl NttTables {
    /// Returns `None` when `q` admits no primitive `2n`-th root of unity
    /// (i.e. `q != 1 mod 2n` or `q` is not prime).
    pub fn new(n: usize, modulus: Modulus) -> Option<Self> {
        let q = modulus.value();
        if !n.is_power_of_two() || (q - 1) % (2 * n as u64) != 0 {
            return None;
        }
        let psi = find_primitive_root(n, &modulus)?;
        let psi_inv = modulus.inv(psi)?;
        let bits = n.trailing_zeros();
        let mut pows = vec![1u64; n];
        let mut pows_inv = vec![1u64; n];
        for i in 1..n {
            pows[i] = modulus.mul(pows[i - 1], psi);
            pows_inv[i] = modulus.mul(pows_inv[i - 1], psi_inv);
        }
        let fwd = (0..n).map(|i| Twiddle::new(pows[bit_reverse(i, bits)], q)).collect();
        let inv = (0..n).map(|i| Twiddle::new(pows_inv[bit_reverse(i, bits)], q)).collect();
        let n_inv = Twiddle::new(modulus.inv(n as u64 % q)?, q);
        Some(Self {
            n,
            modulus,
            psi,
            fwd,
            inv,
            n_inv,
        })
    }

    pub fn psi(&self) -> u64 {
        self.psi
    }

    pub fn forward(&self, a: &mut [u64]) {
        assert_eq!(a.len(), self.n);
        let md = &self.modulus;
        let q = md.value();
        let mut t = self.n;
        let mut m = 1;
        while m < self.n {
            t >>= 1;
            for (block, &s) in a.chunks_exact_mut(2 * t).zip(&self.fwd[m..2 * m]) {
                let (lo, hi) = block.split_at_mut(t);
                for (x, y) in lo.iter_mut().zip(hi) {
                    let u = *x;
                    let v = s.mul(*y, q);
                    *x = md.add(u, v);
                    *y = md.sub(u, v);
                }
            }
            m <<= 1;
        }
    }

    pub fn inverse(&self, a: &mut [u64]) {
        assert_eq!(a.len(), self.n);
        let md = &self.modulus;
        let q = md.value();
        let mut t = 1;
        let mut m = self.n;
        while m > 1 {
            let h = m >> 1;
            for (block, &s) in a.chunks_exact_mut(2 * t).zip(&self.inv[h..m]) {
                let (lo, hi) = block.split_at_mut(t);
                for (x, y) in lo.iter_mut().zip(hi) {
                    let (u, v) = (*x, *y);
                    *x = md.add(u, v);
                    *y = s.mul(md.sub(u, v), q);
                }
            }
            t <<= 1;
            m = h;
        }
        for x in a.iter_mut() {
            *x = self.n_inv.mul(*x, q);
        }
    }
}

/// Smallest-generator search for `psi` with `psi^n = -1`.
fn find_primitive_root(n: usize, modulus: &Modulus) -> Option<u64> {
    let q = modulus.value();
    let exp = (q - 1) / (2 * n as u64);
    (2..q.min(1 << 20)).find_map(|g| {
        let psi = modulus.pow(g, exp);
        (modulus.pow(psi, n as u64) == q - 1).then_some(psi)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_has_order_2n() {
        for (n, q) in [(8usize, 17u64), (1024, 4611686018427365377)] {
            let m = Modulus::new(q);
            let t = NttTables::new(n, m).unwrap();
            assert_eq!(m.pow(t.psi(), n as u64), q - 1);
            assert_eq!(m.pow(t.psi(), 2 * n as u64), 1);
        }
    }

    #[test]
    fn rejects_unsupported_modulus() {
        assert!(NttTables::new(16, Modulus::new(17)).is_none());
        assert!(NttTables::new(6, Modulus::new(13)).is_none());
    }

    #[test]
    fn slots_are_evaluations_at_odd_powers() {
        let m = Modulus::new(17);
        let t = NttTables::new(8, m).unwrap();
        let f: Vec<u64> = vec![3, 1, 4, 1, 5, 9, 2, 6];
        let mut a = f.clone();
        t.forward(&mut a);
        let mut slots: Vec<u64> = (0..8)
            .map(|j| {
                let root = m.pow(t.psi(), 2 * j + 1);
                f.iter()
                    .enumerate()
                    .fold(0, |acc, (i, &c)| m.add(acc, m.mul(c, m.pow(root, i as u64))))
            })
            .collect();
        let mut got = a.clone();
        slots.sort_unstable();
        got.sort_unstable();
        assert_eq!(got, slots);
        t.inverse(&mut a);
        assert_eq!(a, f);
    }
}
