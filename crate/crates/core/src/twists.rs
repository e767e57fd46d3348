//! Twists of a quartic from its automorphism group: Frobenius conjugacy
//! classes, an explicit Hilbert 90 coboundary, and the twisted models.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::families::{scaling_factor, AutDescriptor};
use crate::gf::{ExtElement, ExtField, Field, Mat3, PrimeField};
use crate::quartic::{FpQuartic, TernaryQuartic};
use crate::{Error, Result};

type M = Mat3<ExtElement>;

pub const MAX_GROUP: usize = 168;
const MAX_RETRIES: usize = 64;

/// A finite subgroup of `PGL₃(F_{p^n})`, one normalized matrix per element,
/// identity first.
#[derive(Clone, Debug)]
pub struct AutGroup {
    pub field: ExtField,
    pub elements: Vec<M>,
}

impl AutGroup {
    pub fn n(&self) -> usize {
        self.field.m()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn from_descriptor(d: &AutDescriptor) -> Result<AutGroup> {
        group_closure(&d.field, &d.generators)
    }

    fn index(&self) -> HashMap<&M, usize> {
        self.elements.iter().enumerate().map(|(i, g)| (g, i)).collect()
    }

    /// Exponent of the group (lcm of element orders).
    pub fn exponent(&self) -> usize {
        let k = &self.field;
        let id = &self.elements[0];
        self.elements
            .iter()
            .map(|g| {
                let mut h = g.clone();
                let mut n = 1;
                while &h != id {
                    h = h.mul(k, g).normalize_projective(k);
                    n += 1;
                }
                n
            })
            .fold(1, |a, b| a / gcd(a, b) * b)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Breadth-first closure of the generators under multiplication, modulo scalars.
pub fn group_closure(k: &ExtField, gens: &[M]) -> Result<AutGroup> {
    let id = M::identity(k);
    let gens: Vec<M> = gens.iter().map(|g| g.normalize_projective(k)).collect();
    let mut elements = vec![id.clone()];
    let mut seen: HashMap<M, usize> = HashMap::from([(id, 0)]);
    let mut i = 0;
    while i < elements.len() {
        for g in &gens {
            let h = elements[i].mul(k, g).normalize_projective(k);
            if !seen.contains_key(&h) {
                if elements.len() == MAX_GROUP {
                    return Err(Error::ClosureOverflow(MAX_GROUP));
                }
                seen.insert(h.clone(), elements.len());
                elements.push(h);
            }
        }
        i += 1;
    }
    Ok(AutGroup { field: k.clone(), elements })
}

fn frob(k: &ExtField, a: &M) -> M {
    a.frobenius(k, 1)
}

/// Representatives (smallest index) of the classes of `g ~ (α^φ)⁻¹ g α`.
pub fn frobenius_classes(g: &AutGroup) -> Vec<usize> {
    let k = &g.field;
    let index = g.index();
    let inv_frob: Vec<M> = g.elements.iter().map(|a| frob(k, a).adjugate(k)).collect();
    let mut class = vec![usize::MAX; g.len()];
    let mut reps = Vec::new();
    for start in 0..g.len() {
        if class[start] != usize::MAX {
            continue;
        }
        reps.push(start);
        for (a, af) in g.elements.iter().zip(&inv_frob) {
            let h = af.mul(k, &g.elements[start]).mul(k, a).normalize_projective(k);
            class[index[&h]] = start;
        }
    }
    reps
}

/// Number of `β` with `β^φ A = A β`, i.e. the automorphisms of the twist by
/// `A` that are defined over the prime field.
pub fn rational_aut_order(g: &AutGroup, a: &M) -> usize {
    let k = &g.field;
    g.elements
        .iter()
        .filter(|b| frob(k, b).mul(k, a).normalize_projective(k) == a.mul(k, b).normalize_projective(k))
        .count()
}

/// The lift of `A` through the action on differentials: `(det A / λ) A`
/// where `F ∘ A = λF`. It does not depend on the scalar representing `A`.
pub fn canonical_lift(k: &ExtField, curve: &TernaryQuartic<ExtElement>, a: &M) -> Result<M> {
    let lambda = scaling_factor(k, curve, a).ok_or(Error::Internal("matrix does not fix the curve"))?;
    let c = k.div(&a.det(k), &lambda).ok_or(Error::SingularMatrix)?;
    Ok(a.scale(k, &c))
}

/// Result of the explicit Hilbert 90 construction.
#[derive(Clone, Debug)]
pub struct Coboundary {
    /// `F_{p^m}` with `m` the length of the cocycle.
    pub field: ExtField,
    pub b: M,
    /// The cocycle value `A`, embedded in `field`.
    pub a: M,
    pub retries: usize,
}

impl Coboundary {
    pub fn m(&self) -> usize {
        self.field.m()
    }
}

/// Smallest `m`, a multiple of the degree of `k`, with
/// `A^{φ^{m−1}} ⋯ A^φ A = Id`.
pub fn cocycle_length(k: &ExtField, a: &M, limit: usize) -> Option<usize> {
    let id = M::identity(k);
    let mut prod = a.clone();
    for m in 1..=limit {
        if m % k.m() == 0 && prod == id {
            return Some(m);
        }
        prod = frob(k, &prod).mul(k, a);
    }
    None
}

pub fn embed_matrix(k: &ExtField, a: &M, into: &ExtField) -> Result<M> {
    let mut e = a.e.clone();
    for row in e.iter_mut() {
        for x in row.iter_mut() {
            *x = k.embed(x, into)?;
        }
    }
    Ok(Mat3::new(e))
}

/// `B = Σ P^{φ^i} A^{φ^{i−1}} ⋯ A` over `F_{p^m}` for random `P`, which
/// satisfies `B^φ = B A⁻¹`. `A` must be an exact (non-projective) cocycle.
pub fn hilbert90(k: &ExtField, a: &M, rng: &mut impl Rng) -> Result<Coboundary> {
    let m = cocycle_length(k, a, MAX_GROUP * k.m()).ok_or(Error::Internal("cocycle does not close"))?;
    let big = ExtField::new(k.base(), m);
    let a = embed_matrix(k, a, &big)?;
    let mut partial = Vec::with_capacity(m);
    let mut cur = M::identity(&big);
    for _ in 0..m {
        partial.push(cur.clone());
        cur = frob(&big, &cur).mul(&big, &a);
    }
    let p = big.p();
    for retries in 0..MAX_RETRIES {
        let pm = Mat3::from_fn(|_, _| {
            let c: Vec<u8> = (0..m).map(|_| rng.gen_range(0..p) as u8).collect();
            big.elem_from_coeffs(&c)
        });
        let mut b = Mat3::zero(&big);
        let mut pi = pm;
        for ai in &partial {
            b = b.add(&big, &pi.mul(&big, ai));
            pi = frob(&big, &pi);
        }
        if !big.is_zero(&b.det(&big)) {
            return Ok(Coboundary { field: big, b, a, retries });
        }
    }
    Err(Error::Internal("no invertible coboundary after many draws"))
}

/// `F ∘ B⁻¹` rescaled to have first nonzero coefficient 1; its coefficients
/// must lie in the prime field.
pub fn twisted_model(curve: &FpQuartic, cob: &Coboundary) -> Result<FpQuartic> {
    let big = &cob.field;
    let lifted = TernaryQuartic::new(curve.coeffs.map(|c| big.from_prime(c)));
    let binv = cob.b.inv(big)?;
    let g = lifted.transform(big, &binv)?.monic(big);
    let mut out = [0u8; 15];
    for (o, c) in out.iter_mut().zip(&g.coeffs) {
        *o = big.to_prime(c).ok_or(Error::CoefficientsNotRational)?.value();
    }
    Ok(FpQuartic::from_values(out))
}

/// One twist and the order of its automorphism group over the prime field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Twist {
    pub quartic: FpQuartic,
    pub rational_aut: usize,
}

/// One model per Frobenius class, the class of the identity giving the curve
/// itself.
pub fn twists_of(curve: &FpQuartic, group: &AutGroup, seed: u64) -> Result<Vec<Twist>> {
    let k = &group.field;
    let base = k.base();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lifted = TernaryQuartic::new(curve.coeffs.map(|c| k.from_prime(c)));
    let mut out = Vec::new();
    for rep in frobenius_classes(group) {
        let alpha = &group.elements[rep];
        let quartic = if rep == 0 {
            curve.monic(&base)
        } else {
            let a = canonical_lift(k, &lifted, alpha)?;
            let cob = hilbert90(k, &a, &mut rng)?;
            twisted_model(curve, &cob)?
        };
        out.push(Twist { quartic, rational_aut: rational_aut_order(group, alpha) });
    }
    Ok(out)
}

/// Twists of a curve whose automorphisms are described by `d`.
pub fn twists_from_descriptor(curve: &FpQuartic, d: &AutDescriptor, seed: u64) -> Result<Vec<Twist>> {
    if d.generators.is_empty() {
        let base: PrimeField = d.field.base();
        return Ok(vec![Twist { quartic: curve.monic(&base), rational_aut: 1 }]);
    }
    twists_of(curve, &AutGroup::from_descriptor(d)?, seed)
}
