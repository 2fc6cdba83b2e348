use std::fmt;

use crate::error::{Error, Result};

/// The coefficient ring Z/p^k. Residues are stored as `u64` in `[0, modulus)`;
/// the modulus is capped below 2^32 so products never overflow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Zn {
    modulus: u64,
    prime: u64,
    exponent: u32,
}

impl Zn {
    pub fn new(modulus: u64) -> Result<Self> {
        if modulus < 2 || modulus > u32::MAX as u64 {
            return Err(Error::BadModulus(modulus));
        }
        let prime = smallest_prime_factor(modulus);
        let mut rest = modulus;
        let mut exponent = 0;
        while rest.is_multiple_of(prime) {
            rest /= prime;
            exponent += 1;
        }
        if rest != 1 {
            return Err(Error::BadModulus(modulus));
        }
        Ok(Zn {
            modulus,
            prime,
            exponent,
        })
    }

    /// F_p; rejects prime powers.
    pub fn prime_field(p: u64) -> Result<Self> {
        let ring = Zn::new(p)?;
        if !ring.is_field() {
            return Err(Error::NotPrime(p));
        }
        Ok(ring)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_field(&self) -> bool {
        self.exponent == 1
    }

    pub fn require_field(&self) -> Result<()> {
        if self.is_field() {
            Ok(())
        } else {
            Err(Error::NotPrime(self.modulus))
        }
    }

    #[inline]
    pub fn reduce(&self, x: u64) -> u64 {
        x % self.modulus
    }

    #[inline]
    pub fn reduce_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.modulus as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.modulus - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.modulus
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.modulus;
        base %= self.modulus;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    #[inline]
    pub fn is_unit(&self, a: u64) -> bool {
        !a.is_multiple_of(self.prime)
    }

    /// Multiplicative inverse, or `None` for non-units.
    pub fn inv(&self, a: u64) -> Option<u64> {
        if !self.is_unit(a) {
            return None;
        }
        let (mut old_r, mut r) = (a as i64, self.modulus as i64);
        let (mut old_s, mut s) = (1i64, 0i64);
        while r != 0 {
            let q = old_r / r;
            (old_r, r) = (r, old_r - q * r);
            (old_s, s) = (s, old_s - q * s);
        }
        debug_assert_eq!(old_r, 1);
        Some(self.reduce_i64(old_s))
    }

    /// p-adic valuation of a residue (the exponent for zero).
    pub fn valuation(&self, a: u64) -> u32 {
        if a == 0 {
            return self.exponent;
        }
        let mut v = 0;
        let mut x = a;
        while x.is_multiple_of(self.prime) {
            x /= self.prime;
            v += 1;
        }
        v
    }

    pub fn elements(&self) -> std::ops::Range<u64> {
        0..self.modulus
    }

    // Vector helpers. All vectors are slices of reduced residues.

    pub fn dot(&self, a: &[u64], b: &[u64]) -> u64 {
        debug_assert_eq!(a.len(), b.len());
        a.iter()
            .zip(b)
            .fold(0, |acc, (&x, &y)| (acc + x * y) % self.modulus)
    }

    pub fn add_vec(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| self.add(x, y)).collect()
    }

    pub fn sub_vec(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| self.sub(x, y)).collect()
    }

    pub fn scale_vec(&self, s: u64, a: &[u64]) -> Vec<u64> {
        a.iter().map(|&x| self.mul(s, x)).collect()
    }

    /// `acc += s * x`
    pub fn axpy(&self, acc: &mut [u64], s: u64, x: &[u64]) {
        if s == 0 {
            return;
        }
        for (a, &v) in acc.iter_mut().zip(x) {
            *a = (*a + s * v) % self.modulus;
        }
    }

    pub fn is_reduced(&self, v: &[u64]) -> bool {
        v.iter().all(|&x| x < self.modulus)
    }

    pub fn check_reduced(&self, v: &[u64]) -> Result<()> {
        match v.iter().find(|&&x| x >= self.modulus) {
            Some(&value) => Err(Error::Unreduced {
                value,
                modulus: self.modulus,
            }),
            None => Ok(()),
        }
    }

    /// Decodes `index` as a base-`modulus` numeral of `len` digits, most
    /// significant first. Counting `index` upward walks vectors in
    /// lexicographic order.
    pub fn decode_vec(&self, mut index: u128, len: usize) -> Vec<u64> {
        let m = self.modulus as u128;
        let mut v = vec![0u64; len];
        for slot in v.iter_mut().rev() {
            *slot = (index % m) as u64;
            index /= m;
        }
        v
    }

    pub fn encode_vec(&self, v: &[u64]) -> u128 {
        v.iter()
            .fold(0u128, |acc, &x| acc * self.modulus as u128 + x as u128)
    }

    /// Number of vectors of length `len`, saturating.
    pub fn count_vectors(&self, len: usize) -> u128 {
        (self.modulus as u128)
            .checked_pow(len as u32)
            .unwrap_or(u128::MAX)
    }
}

fn smallest_prime_factor(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut f = 3;
    while f * f <= n {
        if n.is_multiple_of(f) {
            return f;
        }
        f += 2;
    }
    n
}

/// A single residue tagged with its modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Coeff {
    value: u64,
    modulus: u64,
}

impl Coeff {
    pub fn new(value: u64, ring: Zn) -> Self {
        Coeff {
            value: ring.reduce(value),
            modulus: ring.modulus(),
        }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}
