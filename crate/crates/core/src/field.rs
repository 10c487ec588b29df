//! Prime-field arithmetic.
//!
//! Every protocol in the crate works over a [`PrimeField`] with a modulus below
//! 2^64. Elements carry their modulus so that values from different fields are
//! caught instead of silently combined. The default field is GF(2^61 - 1),
//! which gets a dedicated shift-and-add reduction.

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rand::Rng;

use crate::error::{Error, Result};

/// 2^61 - 1.
pub const MERSENNE_61: u64 = (1 << 61) - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    modulus: u64,
}

impl PrimeField {
    /// Builds the field, rejecting composite moduli and moduli below 3.
    pub fn new(modulus: u64) -> Result<Self> {
        if modulus < 3 || !is_prime(modulus) {
            return Err(Error::NotPrime(modulus));
        }
        Ok(PrimeField { modulus })
    }

    pub fn mersenne61() -> Self {
        PrimeField { modulus: MERSENNE_61 }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { value: 0, modulus: self.modulus }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement { value: 1, modulus: self.modulus }
    }

    pub fn elem(&self, value: u64) -> FieldElement {
        FieldElement { value: value % self.modulus, modulus: self.modulus }
    }

    /// Maps a signed integer to its residue.
    pub fn from_i64(&self, value: i64) -> FieldElement {
        let p = self.modulus as i128;
        let v = (value as i128).rem_euclid(p);
        FieldElement { value: v as u64, modulus: self.modulus }
    }

    pub fn from_i128(&self, value: i128) -> FieldElement {
        let v = value.rem_euclid(self.modulus as i128);
        FieldElement { value: v as u64, modulus: self.modulus }
    }

    /// Uniform element of `[0, p)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement { value: rng.gen_range(0..self.modulus), modulus: self.modulus }
    }

    pub fn sample_vec<R: Rng + ?Sized>(&self, rng: &mut R, len: usize) -> Vec<FieldElement> {
        (0..len).map(|_| self.sample(rng)).collect()
    }

    /// Decodes the 8-byte little-endian wire form, rejecting non-canonical values.
    pub fn decode(&self, bytes: &[u8]) -> Result<FieldElement> {
        let arr: [u8; 8] = bytes
            .try_into()
            .map_err(|_| Error::LengthMismatch(bytes.len(), 8))?;
        let value = u64::from_le_bytes(arr);
        if value >= self.modulus {
            return Err(Error::InvalidParam(format!(
                "non-canonical element {value} for modulus {}",
                self.modulus
            )));
        }
        Ok(FieldElement { value, modulus: self.modulus })
    }

    pub fn decode_vec(&self, bytes: &[u8]) -> Result<Vec<FieldElement>> {
        if bytes.len() % 8 != 0 {
            return Err(Error::InvalidParam(format!(
                "payload of {} bytes is not a whole number of elements",
                bytes.len()
            )));
        }
        bytes.chunks_exact(8).map(|c| self.decode(c)).collect()
    }
}

impl Default for PrimeField {
    fn default() -> Self {
        Self::mersenne61()
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.modulus)
    }
}

/// Canonical residue `0 <= value < modulus`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    modulus: u64,
}

impl FieldElement {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn field(&self) -> PrimeField {
        PrimeField { modulus: self.modulus }
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    /// Signed representative in `(-p/2, p/2]`.
    pub fn to_signed(&self) -> i128 {
        if self.value > self.modulus / 2 {
            self.value as i128 - self.modulus as i128
        } else {
            self.value as i128
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::FieldMismatch(self.modulus, other.modulus));
        }
        Ok(())
    }

    pub fn try_add(self, rhs: Self) -> Result<Self> {
        self.check(&rhs)?;
        Ok(self.add_unchecked(rhs))
    }

    pub fn try_sub(self, rhs: Self) -> Result<Self> {
        self.check(&rhs)?;
        Ok(self.sub_unchecked(rhs))
    }

    pub fn try_mul(self, rhs: Self) -> Result<Self> {
        self.check(&rhs)?;
        Ok(self.mul_unchecked(rhs))
    }

    #[inline]
    fn add_unchecked(self, rhs: Self) -> Self {
        let (sum, carry) = self.value.overflowing_add(rhs.value);
        let value = if carry || sum >= self.modulus { sum.wrapping_sub(self.modulus) } else { sum };
        FieldElement { value, modulus: self.modulus }
    }

    #[inline]
    fn sub_unchecked(self, rhs: Self) -> Self {
        let value = if self.value >= rhs.value {
            self.value - rhs.value
        } else {
            self.modulus - (rhs.value - self.value)
        };
        FieldElement { value, modulus: self.modulus }
    }

    #[inline]
    fn mul_unchecked(self, rhs: Self) -> Self {
        let prod = self.value as u128 * rhs.value as u128;
        let value = if self.modulus == MERSENNE_61 {
            let lo = (prod as u64) & MERSENNE_61;
            let hi = (prod >> 61) as u64;
            let s = lo + hi;
            if s >= MERSENNE_61 { s - MERSENNE_61 } else { s }
        } else {
            (prod % self.modulus as u128) as u64
        };
        FieldElement { value, modulus: self.modulus }
    }

    pub fn pow(self, mut exp: u64) -> Self {
        let mut base = self;
        let mut acc = self.field().one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul_unchecked(base);
            }
            base = base.mul_unchecked(base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat's little theorem.
    pub fn inverse(self) -> Result<Self> {
        if self.value == 0 {
            return Err(Error::NonInvertible);
        }
        Ok(self.pow(self.modulus - 2))
    }

    pub fn to_le_bytes(&self) -> [u8; 8] {
        self.value.to_le_bytes()
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

// Operator forms panic on a field mismatch; the `try_*` methods report it.
impl Add for FieldElement {
    type Output = FieldElement;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.modulus, rhs.modulus, "field mismatch");
        self.add_unchecked(rhs)
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        assert_eq!(self.modulus, rhs.modulus, "field mismatch");
        self.sub_unchecked(rhs)
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        assert_eq!(self.modulus, rhs.modulus, "field mismatch");
        self.mul_unchecked(rhs)
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> Self {
        self.field().zero().sub_unchecked(self)
    }
}

impl AddAssign for FieldElement {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for FieldElement {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl MulAssign for FieldElement {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

/// Sums a non-empty iterator; an empty one has no field to name, so it panics.
impl Sum for FieldElement {
    fn sum<I: Iterator<Item = Self>>(mut iter: I) -> Self {
        let first = iter.next().expect("sum of empty iterator has no field");
        iter.fold(first, |acc, x| acc + x)
    }
}

impl Product for FieldElement {
    fn product<I: Iterator<Item = Self>>(mut iter: I) -> Self {
        let first = iter.next().expect("product of empty iterator has no field");
        iter.fold(first, |acc, x| acc * x)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin; the first twelve prime bases cover all of u64.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
