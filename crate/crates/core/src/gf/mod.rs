//! Finite field arithmetic.
//!
//! Prime fields `F_p` with `7 < p < 256` store elements in one byte. Extension
//! fields `F_{p^m}` are built on demand from the lexicographically smallest
//! monic irreducible modulus of the requested degree, so every run picks the
//! same representation.

mod ext;
mod factor;
mod mat3;
pub mod poly;

pub use ext::{ExtElement, ExtField};
pub use factor::factor_u128;
pub use mat3::Mat3;

use std::fmt;
use std::hash::Hash;

use crate::error::{Error, Result};

/// Operations shared by prime and extension fields.
///
/// Elements do not carry their field; every operation goes through the field
/// context, which is cheap to clone and safe to share across threads.
pub trait Field: Clone + Send + Sync + fmt::Debug {
    type Elem: Clone + PartialEq + Eq + Ord + Hash + fmt::Debug + Send + Sync;

    fn characteristic(&self) -> u32;
    /// Degree over the prime field.
    fn degree(&self) -> usize;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_int(&self, v: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// `a^(p^k)`.
    fn frobenius_pow(&self, a: &Self::Elem, k: usize) -> Self::Elem;
    /// Lifts a prime-field residue.
    fn from_prime(&self, a: FieldElement) -> Self::Elem {
        self.from_int(a.value() as i64)
    }
    /// Returns the residue if `a` lies in the prime subfield.
    fn to_prime(&self, a: &Self::Elem) -> Option<FieldElement>;
    /// All field elements, in lexicographic coefficient order.
    fn elements(&self) -> Vec<Self::Elem>;

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn pow(&self, a: &Self::Elem, mut e: u128) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }
}

/// A residue modulo the prime of its field, stored in one byte.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElement(u8);

impl FieldElement {
    pub const fn new_unchecked(v: u8) -> Self {
        FieldElement(v)
    }

    pub const fn value(self) -> u8 {
        self.0
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The prime field `F_p` for a prime `7 < p < 256`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u8,
}

impl fmt::Debug for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if !(8..256).contains(&p) || !is_prime(p as u64) {
            return Err(Error::UnsupportedCharacteristic(p));
        }
        Ok(PrimeField { p: p as u8 })
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn modulus(&self) -> u32 {
        self.p as u32
    }

    pub fn elem(&self, v: i64) -> FieldElement {
        FieldElement(v.rem_euclid(self.p as i64) as u8)
    }

    pub fn fp_inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(FieldElement(inv_mod(a.0 as u32, self.p as u32) as u8))
    }

    pub fn is_square(&self, a: FieldElement) -> bool {
        a.0 == 0 || pow_mod(a.0 as u32, (self.p as u32 - 1) / 2, self.p as u32) == 1
    }

    /// Least positive quadratic non-residue.
    pub fn smallest_nonsquare(&self) -> FieldElement {
        (2..self.p)
            .map(FieldElement)
            .find(|&a| !self.is_square(a))
            .expect("odd prime fields have non-squares")
    }

    /// Least positive generator of `F_p^*`.
    pub fn primitive_element(&self) -> FieldElement {
        let p = self.p as u32;
        let factors: Vec<u32> = factor_u128((p - 1) as u128).into_iter().map(|(q, _)| q as u32).collect();
        (2..self.p)
            .map(FieldElement)
            .find(|&g| factors.iter().all(|&q| pow_mod(g.0 as u32, (p - 1) / q, p) != 1))
            .expect("cyclic group has a generator")
    }
}

pub(crate) fn pow_mod(mut a: u32, mut e: u32, p: u32) -> u32 {
    let mut acc = 1u32;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    acc
}

pub(crate) fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

impl Field for PrimeField {
    type Elem = FieldElement;

    fn characteristic(&self) -> u32 {
        self.p as u32
    }

    fn degree(&self) -> usize {
        1
    }

    fn zero(&self) -> FieldElement {
        FieldElement(0)
    }

    fn one(&self) -> FieldElement {
        FieldElement(1)
    }

    fn from_int(&self, v: i64) -> FieldElement {
        self.elem(v)
    }

    fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement(((a.0 as u16 + b.0 as u16) % self.p as u16) as u8)
    }

    fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement(((a.0 as u16 + self.p as u16 - b.0 as u16) % self.p as u16) as u8)
    }

    fn neg(&self, a: &FieldElement) -> FieldElement {
        if a.0 == 0 {
            *a
        } else {
            FieldElement(self.p - a.0)
        }
    }

    fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement(((a.0 as u32 * b.0 as u32) % self.p as u32) as u8)
    }

    fn inv(&self, a: &FieldElement) -> Option<FieldElement> {
        self.fp_inv(*a).ok()
    }

    fn is_zero(&self, a: &FieldElement) -> bool {
        a.0 == 0
    }

    fn frobenius_pow(&self, a: &FieldElement, _k: usize) -> FieldElement {
        *a
    }

    fn to_prime(&self, a: &FieldElement) -> Option<FieldElement> {
        Some(*a)
    }

    fn elements(&self) -> Vec<FieldElement> {
        (0..self.p).map(FieldElement).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_examples() {
        let f11 = PrimeField::new(11).unwrap();
        let f13 = PrimeField::new(13).unwrap();
        assert_eq!(f11.fp_inv(f11.elem(3)).unwrap().value(), 4);
        assert_eq!(f13.fp_inv(f13.elem(1)).unwrap().value(), 1);
        assert_eq!(f11.fp_inv(f11.elem(10)).unwrap().value(), 10);
        assert!(matches!(f11.fp_inv(f11.elem(0)), Err(Error::DivisionByZero)));
    }

    fn squares_by_enumeration(p: u32) -> Vec<u32> {
        let mut s: Vec<u32> = (1..p).map(|x| x * x % p).collect();
        s.sort();
        s.dedup();
        s
    }

    #[test]
    fn smallest_nonsquare_matches_enumeration() {
        assert_eq!(squares_by_enumeration(11), vec![1, 3, 4, 5, 9]);
        for (p, expected) in [(11, 2), (13, 2), (17, 3)] {
            let f = PrimeField::new(p).unwrap();
            let sq = squares_by_enumeration(p);
            let brute = (1..p).find(|a| !sq.contains(a)).unwrap();
            assert_eq!(brute, expected);
            assert_eq!(f.smallest_nonsquare().value() as u32, expected);
        }
    }

    #[test]
    fn rejects_small_and_composite_moduli() {
        for p in [2, 3, 5, 7, 9, 15, 256, 1000] {
            assert!(PrimeField::new(p).is_err(), "p = {p}");
        }
        assert!(PrimeField::new(251).is_ok());
    }

    #[test]
    fn primitive_elements() {
        assert_eq!(PrimeField::new(11).unwrap().primitive_element().value(), 2);
        assert_eq!(PrimeField::new(13).unwrap().primitive_element().value(), 2);
        assert_eq!(PrimeField::new(17).unwrap().primitive_element().value(), 3);
    }
}
