//! Symbolic (umbral) expansion of the basic covariants.
//!
//! A quartic is written `f = (a·x)^4 = (b·x)^4 = (c·x)^4` with independent
//! umbral vectors `a, b, c`. Expanding a bracket expression and replacing
//! `a^α` by `m_α · α!/4!` gives the covariant as a polynomial in the 15
//! coefficients. We keep integer tables by multiplying through by `4!` per
//! umbral factor; constant factors do not matter for invariants.

use std::collections::HashMap;

use crate::quartic::mono_index;

/// Packed exponent vector: 12 variables, 5 bits each.
type Mono = u64;
type Poly = HashMap<Mono, i128>;

const A: usize = 0;
const B: usize = 3;
const C: usize = 6;
const U: usize = 9;

fn var(i: usize) -> Mono {
    1 << (5 * i)
}

fn exp(m: Mono, i: usize) -> usize {
    ((m >> (5 * i)) & 31) as usize
}

fn mul(p: &Poly, q: &Poly) -> Poly {
    let mut out = Poly::with_capacity(p.len() * 4);
    for (&mp, &cp) in p {
        for (&mq, &cq) in q {
            *out.entry(mp + mq).or_insert(0) += cp * cq;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

fn pow(p: &Poly, k: u32) -> Poly {
    let mut acc: Poly = HashMap::from([(0, 1)]);
    for _ in 0..k {
        acc = mul(&acc, p);
    }
    acc
}

/// `det[v1, v2, v3]` for umbral vectors starting at the given offsets.
fn bracket(v1: usize, v2: usize, v3: usize) -> Poly {
    let mut p = Poly::new();
    for (perm, sign) in [([0, 1, 2], 1), ([1, 2, 0], 1), ([2, 0, 1], 1), ([0, 2, 1], -1), ([2, 1, 0], -1), ([1, 0, 2], -1)] {
        let m = var(v1 + perm[0]) + var(v2 + perm[1]) + var(v3 + perm[2]);
        *p.entry(m).or_insert(0) += sign;
    }
    p
}

/// `(v·u)` for an umbral vector and the form variables.
fn linear(v: usize) -> Poly {
    (0..3).map(|i| (var(v + i) + var(U + i), 1)).collect()
}

fn factorial(n: usize) -> i128 {
    (1..=n as i128).product()
}

/// A covariant whose coefficients are homogeneous polynomials of degree
/// `degree` (2 or 3) in the quartic coefficients.
#[derive(Clone, Debug)]
pub struct CovariantTable {
    pub degree: usize,
    pub order: usize,
    /// `(output monomial, coefficient indices (sorted), integer factor)`.
    pub terms: Vec<(usize, [usize; 3], i128)>,
}

fn to_table(p: &Poly, umbrals: &[usize], order: usize) -> CovariantTable {
    let mut acc: HashMap<(usize, [usize; 3]), i128> = HashMap::new();
    for (&m, &c) in p {
        let mut idx = [usize::MAX; 3];
        let mut factor = c;
        for (slot, &u) in umbrals.iter().enumerate() {
            let e = [exp(m, u), exp(m, u + 1), exp(m, u + 2)];
            debug_assert_eq!(e.iter().sum::<usize>(), 4);
            factor *= factorial(e[0]) * factorial(e[1]) * factorial(e[2]);
            idx[slot] = mono_index(4, e[0], e[1]);
        }
        idx[..umbrals.len()].sort();
        let out = mono_index(order, exp(m, U), exp(m, U + 1));
        *acc.entry((out, idx)).or_insert(0) += factor;
    }
    let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| *c != 0).map(|((o, i), c)| (o, i, c)).collect();
    terms.sort();
    CovariantTable { degree: umbrals.len(), order, terms }
}

/// `σ(u) = (abu)^4`: contravariant of degree 2 and order 4.
pub fn sigma() -> CovariantTable {
    to_table(&pow(&bracket(A, B, U), 4), &[A, B], 4)
}

/// `ψ(u) = (abu)^2 (bcu)^2 (cau)^2`: contravariant of degree 3 and order 6.
pub fn psi() -> CovariantTable {
    let p = mul(&mul(&pow(&bracket(A, B, U), 2), &pow(&bracket(B, C, U), 2)), &pow(&bracket(C, A, U), 2));
    to_table(&p, &[A, B, C], 6)
}

/// Hessian `(abc)^2 (ax)^2 (bx)^2 (cx)^2`: covariant of degree 3 and order 6.
pub fn hessian() -> CovariantTable {
    let lin = mul(&mul(&pow(&linear(A), 2), &pow(&linear(B), 2)), &pow(&linear(C), 2));
    let p = mul(&pow(&bracket(A, B, C), 2), &lin);
    to_table(&p, &[A, B, C], 6)
}
