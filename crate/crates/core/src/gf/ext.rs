//! Extension fields `F_{p^m}` in polynomial representation.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use smallvec::SmallVec;

use super::poly::{self, FpPoly};
use super::{factor_u128, inv_mod, Field, FieldElement, PrimeField};
use crate::error::{Error, Result};

/// An element of `F_{p^m}`: exactly `m` coefficients, constant term first.
///
/// The derived ordering compares coefficient tuples from the constant term
/// up, which is the "lexicographic" order used for every deterministic
/// choice (roots, generators, embeddings).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExtElement {
    c: SmallVec<[u8; 16]>,
}

impl ExtElement {
    pub fn coeffs(&self) -> &[u8] {
        &self.c
    }
}

impl fmt::Debug for ExtElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.c.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

struct ExtInner {
    base: PrimeField,
    m: usize,
    modulus: FpPoly,
    /// Column `i` holds `(x^i)^p` reduced modulo the modulus.
    frob: Vec<Vec<u8>>,
    generator: OnceLock<ExtElement>,
}

/// The field `F_p[x]/(g)` for the smallest monic irreducible `g` of degree `m`.
#[derive(Clone)]
pub struct ExtField {
    inner: Arc<ExtInner>,
}

impl fmt::Debug for ExtField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}", self.inner.base.p(), self.inner.m)
    }
}

impl PartialEq for ExtField {
    fn eq(&self, other: &Self) -> bool {
        self.inner.base == other.inner.base && self.inner.m == other.inner.m
    }
}

impl Eq for ExtField {}

type FieldCache = Mutex<HashMap<(u8, usize), ExtField>>;
type EmbedCache = Mutex<HashMap<(u8, usize, usize), Arc<Vec<ExtElement>>>>;

fn field_cache() -> &'static FieldCache {
    static CACHE: OnceLock<FieldCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn embed_cache() -> &'static EmbedCache {
    static CACHE: OnceLock<EmbedCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl ExtField {
    /// Builds (or fetches) `F_{p^m}`.
    pub fn new(base: PrimeField, m: usize) -> ExtField {
        assert!(m >= 1, "extension degree must be positive");
        let key = (base.p(), m);
        if let Some(f) = field_cache().lock().unwrap().get(&key) {
            return f.clone();
        }
        let built = Self::build(base, m);
        field_cache().lock().unwrap().entry(key).or_insert(built).clone()
    }

    fn build(base: PrimeField, m: usize) -> ExtField {
        let p = base.modulus();
        let modulus = if m == 1 { vec![0, 1] } else { poly::smallest_irreducible(m, p) };
        let frob = (0..m)
            .map(|i| {
                let mut xi = vec![0u8; i + 1];
                xi[i] = 1;
                let mut img = poly::powmod(&xi, p as u128, &modulus, p);
                img.resize(m, 0);
                img
            })
            .collect();
        ExtField {
            inner: Arc::new(ExtInner { base, m, modulus, frob, generator: OnceLock::new() }),
        }
    }

    pub fn base(&self) -> PrimeField {
        self.inner.base
    }

    pub fn m(&self) -> usize {
        self.inner.m
    }

    pub fn p(&self) -> u32 {
        self.inner.base.modulus()
    }

    /// The defining modulus, low degree first, monic.
    pub fn modulus(&self) -> &[u8] {
        &self.inner.modulus
    }

    /// `p^m` when it fits in 128 bits.
    pub fn order_u128(&self) -> Option<u128> {
        (self.p() as u128).checked_pow(self.m() as u32)
    }

    pub fn order(&self) -> BigUint {
        BigUint::from(self.p()).pow(self.m() as u32)
    }

    pub fn elem_from_coeffs(&self, coeffs: &[u8]) -> ExtElement {
        let p = self.p();
        let mut c: SmallVec<[u8; 16]> = SmallVec::from_elem(0, self.m());
        let r = poly::rem(coeffs, &self.inner.modulus, p);
        for (i, v) in r.into_iter().enumerate() {
            c[i] = (v as u32 % p) as u8;
        }
        ExtElement { c }
    }

    /// The class of `x`.
    pub fn gen(&self) -> ExtElement {
        self.elem_from_coeffs(&[0, 1])
    }

    fn to_poly(&self, a: &ExtElement) -> FpPoly {
        let mut v = a.c.to_vec();
        poly::trim(&mut v);
        v
    }

    /// `a^(p^k)` via the precomputed Frobenius matrix.
    pub fn frobenius(&self, a: &ExtElement, k: usize) -> ExtElement {
        let m = self.m();
        let p = self.p() as u64;
        let mut cur = a.clone();
        for _ in 0..(k % m) {
            let mut acc = [0u64; 64];
            let mut big: Vec<u64>;
            let acc: &mut [u64] = if m <= 64 {
                &mut acc[..m]
            } else {
                big = vec![0u64; m];
                &mut big
            };
            for (i, &ci) in cur.c.iter().enumerate() {
                if ci == 0 {
                    continue;
                }
                for (j, &fj) in self.inner.frob[i].iter().enumerate() {
                    acc[j] += ci as u64 * fj as u64;
                }
            }
            for (j, v) in acc.iter().enumerate() {
                cur.c[j] = (v % p) as u8;
            }
        }
        cur
    }

    /// `a^e` for a big exponent.
    pub fn pow_big(&self, a: &ExtElement, e: &BigUint) -> ExtElement {
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.mul(&acc, &acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    /// Generator of the multiplicative group: the least element, in
    /// lexicographic coefficient order, whose order is `p^m - 1`.
    pub fn primitive_element(&self) -> Result<ExtElement> {
        if let Some(g) = self.inner.generator.get() {
            return Ok(g.clone());
        }
        let q = self.order_u128().ok_or(Error::FieldTooLarge(self.p(), self.m()))?;
        let primes: Vec<u128> = factor_u128(q - 1).into_iter().map(|(r, _)| r).collect();
        let m = self.m();
        let p = self.p();
        let mut coeffs = vec![0u8; m];
        let g = loop {
            // odometer in lexicographic order (last coefficient fastest)
            let mut i = m;
            loop {
                i -= 1;
                coeffs[i] += 1;
                if (coeffs[i] as u32) < p {
                    break;
                }
                coeffs[i] = 0;
                assert!(i > 0, "exhausted field without finding a generator");
            }
            let cand = ExtElement { c: SmallVec::from_slice(&coeffs) };
            if primes.iter().all(|&r| !self.is_one(&self.pow(&cand, (q - 1) / r))) {
                break cand;
            }
        };
        Ok(self.inner.generator.get_or_init(|| g).clone())
    }

    /// `zeta_n = g^((p^m - 1)/n)` for the canonical generator `g`, so that
    /// `zeta_{ab}^a = zeta_b` inside this field.
    pub fn root_of_unity(&self, n: u128) -> Result<ExtElement> {
        let q = self.order_u128().ok_or(Error::FieldTooLarge(self.p(), self.m()))?;
        if n == 0 || (q - 1) % n != 0 {
            return Err(Error::OrderNotDividing { n, order: q - 1 });
        }
        if n == 1 {
            return Ok(self.one());
        }
        let g = self.primitive_element()?;
        Ok(self.pow(&g, (q - 1) / n))
    }

    /// Distinct roots in this field of a polynomial over it (sorted).
    pub fn roots(&self, f: &[ExtElement]) -> Vec<ExtElement> {
        let f = self.poly_monic(f);
        if f.len() <= 1 {
            return Vec::new();
        }
        let x = vec![self.zero(), self.one()];
        let xq = self.poly_pow_frobenius(&x, self.m(), &f);
        let g = self.poly_gcd(&f, &self.poly_sub(&xq, &x));
        let mut out = Vec::new();
        self.split_linear(g, &mut out);
        out.sort();
        out.dedup();
        out
    }

    /// Degree of the smallest irreducible factor of `f` over this field.
    pub fn smallest_factor_degree(&self, f: &[ExtElement]) -> usize {
        let f = self.poly_monic(f);
        let deg = f.len() - 1;
        let x = vec![self.zero(), self.one()];
        let mut h = x.clone();
        for d in 1..=deg {
            h = self.poly_pow_frobenius(&h, self.m(), &f);
            let g = self.poly_gcd(&f, &self.poly_sub(&h, &x));
            if g.len() > 1 {
                return d;
            }
        }
        deg
    }

    /// Raises to the power `p^k` modulo `f` (k applications of the p-power map).
    fn poly_pow_frobenius(&self, a: &[ExtElement], k: usize, f: &[ExtElement]) -> Vec<ExtElement> {
        let p = BigUint::from(self.p());
        let mut h = a.to_vec();
        for _ in 0..k {
            h = self.poly_powmod(&h, &p, f);
        }
        h
    }

    fn split_linear(&self, g: Vec<ExtElement>, out: &mut Vec<ExtElement>) {
        let d = g.len() - 1;
        if d == 0 {
            return;
        }
        if d == 1 {
            // monic x + c
            out.push(self.neg(&g[0]));
            return;
        }
        let e = (self.order() - 1u32) / 2u32;
        let mut seed = 0u64;
        loop {
            let delta = self.sequence_element(seed);
            seed += 1;
            let base = vec![delta, self.one()];
            let h = self.poly_powmod(&base, &e, &g);
            let h1 = self.poly_sub(&h, &[self.one()]);
            let d1 = self.poly_gcd(&g, &h1);
            let k = d1.len() - 1;
            if k > 0 && k < d {
                let (q, _) = self.poly_divrem(&g, &d1);
                self.split_linear(d1, out);
                self.split_linear(self.poly_monic(&q), out);
                return;
            }
        }
    }

    /// Deterministic walk through field elements for splitting attempts.
    fn sequence_element(&self, i: u64) -> ExtElement {
        let p = self.p() as u64;
        let mut c: SmallVec<[u8; 16]> = SmallVec::from_elem(0, self.m());
        let mut v = i;
        for slot in c.iter_mut() {
            *slot = (v % p) as u8;
            v /= p;
            if v == 0 {
                break;
            }
        }
        ExtElement { c }
    }

    // -- polynomials over the extension field (low degree first) --

    fn poly_trim(&self, a: &mut Vec<ExtElement>) {
        while a.last().is_some_and(|c| self.is_zero(c)) {
            a.pop();
        }
    }

    pub(crate) fn poly_monic(&self, a: &[ExtElement]) -> Vec<ExtElement> {
        let mut v = a.to_vec();
        self.poly_trim(&mut v);
        if let Some(l) = v.last() {
            let li = self.inv(l).expect("nonzero leading coefficient");
            v.iter_mut().for_each(|c| *c = self.mul(c, &li));
        }
        v
    }

    fn poly_sub(&self, a: &[ExtElement], b: &[ExtElement]) -> Vec<ExtElement> {
        let n = a.len().max(b.len());
        let z = self.zero();
        let mut v: Vec<ExtElement> =
            (0..n).map(|i| self.sub(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z))).collect();
        self.poly_trim(&mut v);
        v
    }

    fn poly_mul(&self, a: &[ExtElement], b: &[ExtElement]) -> Vec<ExtElement> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![self.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if self.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] = self.add(&out[i + j], &self.mul(x, y));
            }
        }
        self.poly_trim(&mut out);
        out
    }

    fn poly_divrem(&self, a: &[ExtElement], m: &[ExtElement]) -> (Vec<ExtElement>, Vec<ExtElement>) {
        let mut r = a.to_vec();
        self.poly_trim(&mut r);
        let dm = m.len() - 1;
        if r.len() <= dm {
            return (Vec::new(), r);
        }
        let li = self.inv(&m[dm]).expect("nonzero leading coefficient");
        let mut q = vec![self.zero(); r.len() - dm];
        for i in (dm..r.len()).rev() {
            let c = self.mul(&r[i], &li);
            if self.is_zero(&c) {
                continue;
            }
            for j in 0..=dm {
                r[i - dm + j] = self.sub(&r[i - dm + j], &self.mul(&c, &m[j]));
            }
            q[i - dm] = c;
        }
        r.truncate(dm);
        self.poly_trim(&mut r);
        self.poly_trim(&mut q);
        (q, r)
    }

    fn poly_gcd(&self, a: &[ExtElement], b: &[ExtElement]) -> Vec<ExtElement> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        self.poly_trim(&mut x);
        self.poly_trim(&mut y);
        while !y.is_empty() {
            let (_, r) = self.poly_divrem(&x, &y);
            x = y;
            y = r;
        }
        self.poly_monic(&x)
    }

    fn poly_powmod(&self, a: &[ExtElement], e: &BigUint, m: &[ExtElement]) -> Vec<ExtElement> {
        let (_, base) = self.poly_divrem(a, m);
        let mut acc = vec![self.one()];
        for i in (0..e.bits()).rev() {
            acc = self.poly_divrem(&self.poly_mul(&acc, &acc), m).1;
            if e.bit(i) {
                acc = self.poly_divrem(&self.poly_mul(&acc, &base), m).1;
            }
        }
        acc
    }

    /// Images of `1, theta, theta^2, ...` where theta is the lexicographically
    /// smallest root of `self`'s modulus inside `into`.
    fn embedding_powers(&self, into: &ExtField) -> Result<Arc<Vec<ExtElement>>> {
        let key = (self.inner.base.p(), self.m(), into.m());
        if let Some(v) = embed_cache().lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        if into.m() % self.m() != 0 || into.p() != self.p() {
            return Err(Error::NoEmbedding { from: self.m(), into: into.m() });
        }
        let theta = if self.m() == 1 {
            into.zero()
        } else {
            let f: Vec<ExtElement> = self.inner.modulus.iter().map(|&c| into.from_int(c as i64)).collect();
            into.roots(&f).into_iter().next().ok_or(Error::NoEmbedding { from: self.m(), into: into.m() })?
        };
        let mut powers = Vec::with_capacity(self.m());
        let mut cur = into.one();
        for _ in 0..self.m() {
            powers.push(cur.clone());
            cur = into.mul(&cur, &theta);
        }
        let powers = Arc::new(powers);
        embed_cache().lock().unwrap().insert(key, powers.clone());
        Ok(powers)
    }

    /// Ring embedding of `x` into a field whose degree is a multiple of ours.
    pub fn embed(&self, x: &ExtElement, into: &ExtField) -> Result<ExtElement> {
        if self == into {
            return Ok(x.clone());
        }
        let powers = self.embedding_powers(into)?;
        let mut acc = into.zero();
        for (c, pw) in x.c.iter().zip(powers.iter()) {
            if *c != 0 {
                acc = into.add(&acc, &into.mul(&into.from_int(*c as i64), pw));
            }
        }
        Ok(acc)
    }

    /// Lexicographically smallest `r` with `r^n = a`, enlarging the field by
    /// the degree of the smallest irreducible factor of `X^n - a` when no
    /// root exists here.
    pub fn nth_root(&self, a: &ExtElement, n: usize) -> Result<(ExtElement, ExtField)> {
        if self.is_zero(a) {
            return Err(Error::DivisionByZero);
        }
        let mut f = vec![self.zero(); n + 1];
        f[0] = self.neg(a);
        f[n] = self.one();
        if let Some(r) = self.roots(&f).into_iter().next() {
            return Ok((r, self.clone()));
        }
        let d = self.smallest_factor_degree(&f);
        let big = ExtField::new(self.base(), self.m() * d);
        let a_big = self.embed(a, &big)?;
        let mut g = vec![big.zero(); n + 1];
        g[0] = big.neg(&a_big);
        g[n] = big.one();
        let r = big.roots(&g).into_iter().next().ok_or(Error::Internal("root missing after enlarging field"))?;
        Ok((r, big))
    }

    /// Norm down to the prime field.
    pub fn norm(&self, a: &ExtElement) -> ExtElement {
        let mut acc = a.clone();
        let mut cur = a.clone();
        for _ in 1..self.m() {
            cur = self.frobenius(&cur, 1);
            acc = self.mul(&acc, &cur);
        }
        acc
    }
}

impl Field for ExtField {
    type Elem = ExtElement;

    fn characteristic(&self) -> u32 {
        self.p()
    }

    fn degree(&self) -> usize {
        self.inner.m
    }

    fn zero(&self) -> ExtElement {
        ExtElement { c: SmallVec::from_elem(0, self.m()) }
    }

    fn one(&self) -> ExtElement {
        let mut z = self.zero();
        z.c[0] = 1;
        z
    }

    fn from_int(&self, v: i64) -> ExtElement {
        let mut z = self.zero();
        z.c[0] = v.rem_euclid(self.p() as i64) as u8;
        z
    }

    fn add(&self, a: &ExtElement, b: &ExtElement) -> ExtElement {
        let p = self.p() as u16;
        let c = a.c.iter().zip(b.c.iter()).map(|(&x, &y)| ((x as u16 + y as u16) % p) as u8).collect();
        ExtElement { c }
    }

    fn sub(&self, a: &ExtElement, b: &ExtElement) -> ExtElement {
        let p = self.p() as u16;
        let c = a.c.iter().zip(b.c.iter()).map(|(&x, &y)| ((x as u16 + p - y as u16) % p) as u8).collect();
        ExtElement { c }
    }

    fn neg(&self, a: &ExtElement) -> ExtElement {
        let p = self.p() as u16;
        let c = a.c.iter().map(|&x| ((p - x as u16) % p) as u8).collect();
        ExtElement { c }
    }

    fn mul(&self, a: &ExtElement, b: &ExtElement) -> ExtElement {
        let m = self.m();
        let p = self.p();
        if m == 1 {
            let mut z = self.zero();
            z.c[0] = ((a.c[0] as u32 * b.c[0] as u32) % p) as u8;
            return z;
        }
        let mut prod = [0u32; 128];
        let mut big: Vec<u32>;
        let prod: &mut [u32] = if 2 * m <= 128 {
            &mut prod[..2 * m - 1]
        } else {
            big = vec![0u32; 2 * m - 1];
            &mut big
        };
        for (i, &x) in a.c.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.c.iter().enumerate() {
                prod[i + j] += x as u32 * y as u32;
            }
            if i % 64 == 63 {
                prod.iter_mut().for_each(|v| *v %= p);
            }
        }
        prod.iter_mut().for_each(|v| *v %= p);
        let md = &self.inner.modulus;
        for i in (m..2 * m - 1).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            for j in 0..m {
                prod[i - m + j] = (prod[i - m + j] + (p - c) * md[j] as u32) % p;
            }
        }
        ExtElement { c: prod[..m].iter().map(|&v| v as u8).collect() }
    }

    fn inv(&self, a: &ExtElement) -> Option<ExtElement> {
        if self.is_zero(a) {
            return None;
        }
        let p = self.p();
        // extended Euclid on (modulus, a)
        let (mut r0, mut r1) = (self.inner.modulus.clone(), self.to_poly(a));
        let (mut s0, mut s1): (FpPoly, FpPoly) = (Vec::new(), vec![1]);
        while !r1.is_empty() {
            let (q, r) = poly::divrem(&r0, &r1, p);
            let s = poly::sub(&s0, &poly::mul(&q, &s1, p), p);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        // r0 is a nonzero constant
        let c = inv_mod(r0[0] as u32, p);
        let s: FpPoly = s0.iter().map(|&v| (v as u32 * c % p) as u8).collect();
        Some(self.elem_from_coeffs(&s))
    }

    fn is_zero(&self, a: &ExtElement) -> bool {
        a.c.iter().all(|&c| c == 0)
    }

    fn frobenius_pow(&self, a: &ExtElement, k: usize) -> ExtElement {
        self.frobenius(a, k)
    }

    fn to_prime(&self, a: &ExtElement) -> Option<FieldElement> {
        if a.c[1..].iter().all(|&c| c == 0) {
            Some(FieldElement::new_unchecked(a.c[0]))
        } else {
            None
        }
    }

    fn elements(&self) -> Vec<ExtElement> {
        let q = self.order_u128().expect("field too large to enumerate") as usize;
        let m = self.m();
        let p = self.p() as usize;
        (0..q)
            .map(|mut idx| {
                let mut c: SmallVec<[u8; 16]> = SmallVec::from_elem(0, m);
                for slot in c.iter_mut().rev() {
                    *slot = (idx % p) as u8;
                    idx /= p;
                }
                ExtElement { c }
            })
            .collect()
    }
}
