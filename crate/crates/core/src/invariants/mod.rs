//! Invariants of ternary quartics and their canonical weighted-projective form.

mod disc;
mod engine;
mod symbolic;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub use engine::{Covariants, Engine, Zp};

use crate::gf::{FieldElement, Mat3, PrimeField};
use crate::quartic::{FpQuartic, TernaryQuartic};
use crate::{Error, Result};

/// Degrees of `I3, I6, I9, J9, I12, J12, I15, J15, I18, J18, I21, J21, I27`.
pub const WEIGHTS: [u32; 13] = [3, 6, 9, 9, 12, 12, 15, 15, 18, 18, 21, 21, 27];

pub const NAMES: [&str; 13] =
    ["I3", "I6", "I9", "J9", "I12", "J12", "I15", "J15", "I18", "J18", "I21", "J21", "I27"];

/// The thirteen Dixmier–Ohno invariants of a quartic over `F_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DOInvariants {
    pub values: [FieldElement; 13],
}

impl DOInvariants {
    pub fn raw(&self) -> [u8; 13] {
        self.values.map(|v| v.value())
    }

    pub fn discriminant(&self) -> FieldElement {
        self.values[12]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.value() == 0)
    }
}

/// Discriminant of raw coefficients modulo `p`, up to a fixed nonzero constant.
pub fn discriminant_raw(engine: &Engine, c: &[u64; 15]) -> u64 {
    let zp = engine.zp;
    if let Some(d) = engine.macaulay.resultant(c, zp) {
        return d;
    }
    // the extraneous factor vanished: move to another model of the same
    // SL3 orbit, which has the same discriminant
    let q = TernaryQuartic::new(*c);
    for k in 1..=64i64 {
        let g = retry_matrix(&zp, k);
        let c2 = q.transform(&zp, &g).expect("unimodular").coeffs;
        if let Some(d) = engine.macaulay.resultant(&c2, zp) {
            return d;
        }
    }
    0
}

/// Deterministic determinant-one matrices `L(k)·U(k)`.
fn retry_matrix(zp: &Zp, k: i64) -> Mat3<u64> {
    let l = Mat3::from_ints(zp, [[1, 0, 0], [k, 1, 0], [k * k + 1, 2 * k + 3, 1]]);
    let u = Mat3::from_ints(zp, [[1, k + 1, 2], [0, 1, k * 3 + 1], [0, 0, 1]]);
    l.mul(zp, &u)
}

/// All thirteen invariants of raw coefficients modulo any prime `p > 7`.
pub fn invariants_raw(engine: &Engine, c: &[u64; 15]) -> [u64; 13] {
    let low = engine.invariants12(c);
    let mut out = [0u64; 13];
    out[..12].copy_from_slice(&low);
    out[12] = discriminant_raw(engine, c);
    out
}

fn widen(f: &FpQuartic) -> [u64; 15] {
    f.values().map(u64::from)
}

pub fn dixmier_ohno(f: &FpQuartic, field: &PrimeField) -> DOInvariants {
    let e = Engine::get(field.modulus() as u64);
    let v = invariants_raw(&e, &widen(f));
    DOInvariants { values: v.map(|x| FieldElement::new_unchecked(x as u8)) }
}

pub fn discriminant(f: &FpQuartic, field: &PrimeField) -> FieldElement {
    let e = Engine::get(field.modulus() as u64);
    FieldElement::new_unchecked(discriminant_raw(&e, &widen(f)) as u8)
}

/// Point of weighted projective space `P(3,6,...,27)` over `F_p`, in its
/// orbit-minimal representative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(pub [u8; 13]);

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ":")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for CanonicalKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("expected (v1:...:v13), got {s:?}")))?;
        let parts: Vec<&str> = inner.split(':').collect();
        if parts.len() != 13 {
            return Err(Error::Parse(format!("expected 13 entries, got {}", parts.len())));
        }
        let mut out = [0u8; 13];
        for (o, t) in out.iter_mut().zip(parts) {
            *o = t.trim().parse().map_err(|_| Error::Parse(format!("bad entry {t:?}")))?;
        }
        Ok(CanonicalKey(out))
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Per-prime normalizer: a table of `λ^e` for `λ ∈ F_p^*`, `e ≤ 9`.
#[derive(Clone)]
pub struct Normalizer {
    p: u32,
    powers: Vec<[u8; 10]>,
}

impl Normalizer {
    pub fn new(p: u32) -> Normalizer {
        let powers = (1..p)
            .map(|l| {
                let mut row = [1u8; 10];
                for e in 1..10 {
                    row[e] = (row[e - 1] as u32 * l % p) as u8;
                }
                row
            })
            .collect();
        Normalizer { p, powers }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Lexicographically least `(λ^{w_i/g} v_i)` over `λ ∈ F_p^*`, where `g`
    /// is the gcd of the weights of the nonzero entries.
    pub fn normalize(&self, v: &[u8; 13]) -> Result<CanonicalKey> {
        let g = v.iter().zip(WEIGHTS).filter(|(x, _)| **x != 0).fold(0, |g, (_, w)| gcd(g, w));
        if g == 0 {
            return Err(Error::AllZeroInvariants);
        }
        let support: Vec<(usize, usize)> = (0..13).filter(|&i| v[i] != 0).map(|i| (i, (WEIGHTS[i] / g) as usize)).collect();
        let p = self.p;
        let mut best = *v;
        for row in &self.powers[1..] {
            let mut better = false;
            for &(i, e) in &support {
                let t = (row[e] as u32 * v[i] as u32 % p) as u8;
                if better {
                    best[i] = t;
                } else if t < best[i] {
                    better = true;
                    best[i] = t;
                } else if t > best[i] {
                    break;
                }
            }
        }
        Ok(CanonicalKey(best))
    }
}

pub fn normalize(inv: &DOInvariants, field: &PrimeField) -> Result<CanonicalKey> {
    Normalizer::new(field.modulus()).normalize(&inv.raw())
}

/// Fast path used by the census: canonical key of a raw quartic, or `None`
/// when it is singular.
pub struct Keyer {
    engine: Arc<Engine>,
    norm: Normalizer,
}

impl Keyer {
    pub fn new(field: &PrimeField) -> Keyer {
        Keyer { engine: Engine::get(field.modulus() as u64), norm: Normalizer::new(field.modulus()) }
    }

    pub fn invariants(&self, c: &[u8; 15]) -> Option<[u8; 13]> {
        let c = c.map(u64::from);
        let d = discriminant_raw(&self.engine, &c);
        if d == 0 {
            return None;
        }
        let low = self.engine.invariants12(&c);
        let mut out = [0u8; 13];
        for i in 0..12 {
            out[i] = low[i] as u8;
        }
        out[12] = d as u8;
        Some(out)
    }

    pub fn key(&self, c: &[u8; 15]) -> Option<CanonicalKey> {
        self.invariants(c).map(|v| self.norm.normalize(&v).expect("discriminant is nonzero"))
    }
}
