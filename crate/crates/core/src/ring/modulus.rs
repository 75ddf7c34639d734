//! Word-sized prime modulus with Montgomery multiplication.

/// An odd modulus `q < 2^63` together with its Montgomery constants
/// (`R = 2^64`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Modulus {
    q: u64,
    /// `-q^{-1} mod 2^64`
    q_neg_inv: u64,
    /// `R^2 mod q`
    r2: u64,
}

impl Modulus {
    /// Panics if `q` is even or not below `2^63`.
    pub fn new(q: u64) -> Self {
        assert!(q % 2 == 1 && q > 1 && q < (1 << 63), "modulus must be odd and below 2^63");
        // Newton iteration for q^{-1} mod 2^64.
        let mut inv: u64 = 1;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(q.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % q as u128) as u64;
        let r2 = ((r as u128 * r as u128) % q as u128) as u64;
        Self {
            q,
            q_neg_inv: inv.wrapping_neg(),
            r2,
        }
    }

    #[inline(always)]
    pub fn value(&self) -> u64 {
        self.q
    }

    /// Montgomery reduction of `t < q * 2^64`, returning `t * 2^-64 mod q`.
    #[inline(always)]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.q_neg_inv);
        let s = ((t + m as u128 * self.q as u128) >> 64) as u64;
        self.reduce_once(s)
    }

    /// Maps `x < 2q` into `[0, q)` without branching.
    #[inline(always)]
    fn reduce_once(&self, x: u64) -> u64 {
        let d = x.wrapping_sub(self.q);
        d.wrapping_add(self.q & sign_mask(d))
    }

    #[inline(always)]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        self.reduce_once(a + b)
    }

    #[inline(always)]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        let d = a.wrapping_sub(b);
        d.wrapping_add(self.q & sign_mask(d))
    }

    #[inline(always)]
    pub fn neg(&self, a: u64) -> u64 {
        self.sub(0, a)
    }

    /// Converts into Montgomery form `a * R mod q`.
    #[inline(always)]
    pub fn to_mont(&self, a: u64) -> u64 {
        self.redc(a as u128 * self.r2 as u128)
    }

    /// `a * b_mont * R^{-1}`: multiplies by an operand already in Montgomery form.
    #[inline(always)]
    pub fn mul_mont(&self, a: u64, b_mont: u64) -> u64 {
        self.redc(a as u128 * b_mont as u128)
    }

    #[inline(always)]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.mul_mont(self.redc(a as u128 * b as u128), self.r2)
    }

    pub fn pow(&self, base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64 % self.q;
        let mut b = base % self.q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }

    /// Inverse by Fermat; only meaningful for prime `q` and nonzero `a`.
    pub fn inv(&self, a: u64) -> Option<u64> {
        if a % self.q == 0 {
            None
        } else {
            Some(self.pow(a, self.q - 2))
        }
    }

    /// Reduces a signed integer into `[0, q)`.
    #[inline(always)]
    pub fn from_i64(&self, x: i64) -> u64 {
        let r = x.rem_euclid(self.q as i64);
        r as u64
    }

    /// Centered representative in `(-q/2, q/2]`.
    #[inline(always)]
    pub fn center(&self, a: u64) -> i64 {
        if a > self.q / 2 {
            a as i64 - self.q as i64
        } else {
            a as i64
        }
    }
}

/// All ones when `x` is negative as a signed word.
#[inline(always)]
pub(crate) fn sign_mask(x: u64) -> u64 {
    ((x as i64) >> 63) as u64
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n % p == 0 {
            return n == p;
        }
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in SMALL {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
