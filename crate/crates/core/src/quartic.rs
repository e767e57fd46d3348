//! Ternary quartic forms: representation, substitution, point counting.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gf::{Field, FieldElement, Mat3, PrimeField};

/// Exponents `(a, b, c)` of `x^a y^b z^c` for the 15 quartic monomials, in
/// the order x⁴, x³y, x³z, x²y², x²yz, x²z², xy³, xy²z, xyz², xz³, y⁴, y³z,
/// y²z², yz³, z⁴.
pub const MONOMIALS: [[u8; 3]; 15] = monomials4();

const fn monomials4() -> [[u8; 3]; 15] {
    let mut out = [[0u8; 3]; 15];
    let mut k = 0;
    let mut a = 4;
    loop {
        let mut b = 4 - a;
        loop {
            out[k] = [a as u8, b as u8, (4 - a - b) as u8];
            k += 1;
            if b == 0 {
                break;
            }
            b -= 1;
        }
        if a == 0 {
            break;
        }
        a -= 1;
    }
    out
}

/// Number of monomials of degree `d` in three variables.
pub const fn form_len(d: usize) -> usize {
    (d + 1) * (d + 2) / 2
}

/// Position of `x^a y^b z^(d-a-b)` among degree-`d` monomials ordered by
/// descending x exponent, then descending y exponent.
pub const fn mono_index(d: usize, a: usize, b: usize) -> usize {
    // monomials with x exponent > a: sum_{k=a+1}^{d} (d-k+1)
    let before = (d - a) * (d - a + 1) / 2;
    before + (d - a - b)
}

/// Exponent triples of all degree-`d` monomials in index order.
pub fn monomials(d: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::with_capacity(form_len(d));
    for a in (0..=d).rev() {
        for b in (0..=d - a).rev() {
            out.push([a, b, d - a - b]);
        }
    }
    out
}

/// A homogeneous ternary form of arbitrary degree over a field.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TernaryForm<E> {
    pub degree: usize,
    pub coeffs: Vec<E>,
}

impl<E: Clone + Eq> TernaryForm<E> {
    pub fn zero<F: Field<Elem = E>>(f: &F, degree: usize) -> Self {
        TernaryForm { degree, coeffs: vec![f.zero(); form_len(degree)] }
    }

    pub fn constant<F: Field<Elem = E>>(f: &F, c: E) -> Self {
        let _ = f;
        TernaryForm { degree: 0, coeffs: vec![c] }
    }

    pub fn linear(l: [E; 3]) -> Self {
        TernaryForm { degree: 1, coeffs: l.to_vec() }
    }

    pub fn add<F: Field<Elem = E>>(&self, f: &F, o: &Self) -> Self {
        assert_eq!(self.degree, o.degree);
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| f.add(a, b)).collect();
        TernaryForm { degree: self.degree, coeffs }
    }

    pub fn scale<F: Field<Elem = E>>(&self, f: &F, c: &E) -> Self {
        TernaryForm { degree: self.degree, coeffs: self.coeffs.iter().map(|a| f.mul(a, c)).collect() }
    }

    pub fn mul<F: Field<Elem = E>>(&self, f: &F, o: &Self) -> Self {
        let d = self.degree + o.degree;
        let mut out = Self::zero(f, d);
        let ma = monomials(self.degree);
        let mb = monomials(o.degree);
        for (i, ea) in ma.iter().enumerate() {
            if f.is_zero(&self.coeffs[i]) {
                continue;
            }
            for (j, eb) in mb.iter().enumerate() {
                if f.is_zero(&o.coeffs[j]) {
                    continue;
                }
                let k = mono_index(d, ea[0] + eb[0], ea[1] + eb[1]);
                out.coeffs[k] = f.add(&out.coeffs[k], &f.mul(&self.coeffs[i], &o.coeffs[j]));
            }
        }
        out
    }

    pub fn evaluate<F: Field<Elem = E>>(&self, f: &F, v: &[E; 3]) -> E {
        let mut acc = f.zero();
        for (c, e) in self.coeffs.iter().zip(monomials(self.degree)) {
            if f.is_zero(c) {
                continue;
            }
            let mut t = c.clone();
            for (var, &k) in v.iter().zip(e.iter()) {
                for _ in 0..k {
                    t = f.mul(&t, var);
                }
            }
            acc = f.add(&acc, &t);
        }
        acc
    }

    /// Formal partial derivative with respect to variable `var` (0, 1, 2).
    pub fn derivative<F: Field<Elem = E>>(&self, f: &F, var: usize) -> Self {
        assert!(self.degree > 0);
        let d = self.degree - 1;
        let mut out = Self::zero(f, d);
        for (c, e) in self.coeffs.iter().zip(monomials(self.degree)) {
            if e[var] == 0 {
                continue;
            }
            let mut e2 = e;
            e2[var] -= 1;
            let k = mono_index(d, e2[0], e2[1]);
            out.coeffs[k] = f.mul(c, &f.from_int(e[var] as i64));
        }
        out
    }

    /// The form `F(B·v)`.
    pub fn transform<F: Field<Elem = E>>(&self, f: &F, b: &Mat3<E>) -> Self {
        let lin: [TernaryForm<E>; 3] = std::array::from_fn(|i| TernaryForm::linear(b.e[i].clone()));
        let mut powers: [Vec<TernaryForm<E>>; 3] = std::array::from_fn(|_| Vec::new());
        for (i, l) in lin.iter().enumerate() {
            let mut cur = TernaryForm::constant(f, f.one());
            powers[i].push(cur.clone());
            for _ in 0..self.degree {
                cur = cur.mul(f, l);
                powers[i].push(cur.clone());
            }
        }
        let mut out = Self::zero(f, self.degree);
        for (c, e) in self.coeffs.iter().zip(monomials(self.degree)) {
            if f.is_zero(c) {
                continue;
            }
            let t = powers[0][e[0]].mul(f, &powers[1][e[1]]).mul(f, &powers[2][e[2]]).scale(f, c);
            out = out.add(f, &t);
        }
        out
    }
}

/// A plane quartic given by its 15 coefficients in the order of [`MONOMIALS`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct TernaryQuartic<E> {
    pub coeffs: [E; 15],
}

/// Quartic over a prime field.
pub type FpQuartic = TernaryQuartic<FieldElement>;

impl<E: Clone + Eq> TernaryQuartic<E> {
    pub fn new(coeffs: [E; 15]) -> Self {
        TernaryQuartic { coeffs }
    }

    pub fn from_ints<F: Field<Elem = E>>(f: &F, c: [i64; 15]) -> Self {
        TernaryQuartic { coeffs: std::array::from_fn(|i| f.from_int(c[i])) }
    }

    pub fn as_form(&self) -> TernaryForm<E> {
        TernaryForm { degree: 4, coeffs: self.coeffs.to_vec() }
    }

    pub fn from_form(g: TernaryForm<E>) -> Self {
        assert_eq!(g.degree, 4);
        let coeffs: [E; 15] = g.coeffs.try_into().ok().expect("15 coefficients");
        TernaryQuartic { coeffs }
    }

    pub fn is_zero<F: Field<Elem = E>>(&self, f: &F) -> bool {
        self.coeffs.iter().all(|c| f.is_zero(c))
    }

    pub fn evaluate<F: Field<Elem = E>>(&self, f: &F, v: &[E; 3]) -> E {
        let mut acc = f.zero();
        for (c, e) in self.coeffs.iter().zip(MONOMIALS.iter()) {
            if f.is_zero(c) {
                continue;
            }
            let mut t = c.clone();
            for (var, &k) in v.iter().zip(e.iter()) {
                for _ in 0..k {
                    t = f.mul(&t, var);
                }
            }
            acc = f.add(&acc, &t);
        }
        acc
    }

    pub fn transform<F: Field<Elem = E>>(&self, f: &F, b: &Mat3<E>) -> Result<Self> {
        if f.is_zero(&b.det(f)) {
            return Err(Error::SingularMatrix);
        }
        Ok(Self::from_form(self.as_form().transform(f, b)))
    }

    pub fn scale<F: Field<Elem = E>>(&self, f: &F, c: &E) -> Self {
        TernaryQuartic { coeffs: std::array::from_fn(|i| f.mul(&self.coeffs[i], c)) }
    }

    pub fn partials<F: Field<Elem = E>>(&self, f: &F) -> [TernaryForm<E>; 3] {
        let g = self.as_form();
        std::array::from_fn(|v| g.derivative(f, v))
    }

    /// Multiplies by the inverse of the first nonzero coefficient.
    pub fn monic<F: Field<Elem = E>>(&self, f: &F) -> Self {
        match self.coeffs.iter().find(|c| !f.is_zero(c)) {
            Some(lead) => self.scale(f, &f.inv(lead).unwrap()),
            None => self.clone(),
        }
    }

    /// Number of zeros in `P²(F_q)` for the field `f`, iterating normalized
    /// points `(1:y:z)`, `(0:1:z)`, `(0:0:1)`.
    pub fn count_points<F: Field<Elem = E>>(&self, f: &F) -> u64 {
        let mut n = 0;
        for_each_point(f, |v| {
            if f.is_zero(&self.evaluate(f, v)) {
                n += 1;
            }
        });
        n
    }

    pub fn has_rational_singularity<F: Field<Elem = E>>(&self, f: &F) -> bool {
        let d = self.partials(f);
        let mut found = false;
        for_each_point(f, |v| {
            if !found && f.is_zero(&self.evaluate(f, v)) && d.iter().all(|g| f.is_zero(&g.evaluate(f, v))) {
                found = true;
            }
        });
        found
    }
}

/// Calls `visit` on every normalized point of `P²` over `f`, in the order
/// `(1:y:z)`, `(0:1:z)`, `(0:0:1)` with coordinates in element order.
pub fn for_each_point<F: Field>(f: &F, mut visit: impl FnMut(&[F::Elem; 3])) {
    let elems = f.elements();
    for y in &elems {
        for z in &elems {
            visit(&[f.one(), y.clone(), z.clone()]);
        }
    }
    for z in &elems {
        visit(&[f.zero(), f.one(), z.clone()]);
    }
    visit(&[f.zero(), f.zero(), f.one()]);
}

impl FpQuartic {
    pub fn values(&self) -> [u8; 15] {
        std::array::from_fn(|i| self.coeffs[i].value())
    }

    pub fn from_values(v: [u8; 15]) -> Self {
        TernaryQuartic { coeffs: v.map(FieldElement::new_unchecked) }
    }

    /// Point count over `F_p` using a per-`z` univariate reduction.
    pub fn count_points_fp(&self, f: &PrimeField) -> u64 {
        count_points_raw(&self.values(), f.modulus())
    }

    /// `p + 1 - #C(F_p)`.
    pub fn trace(&self, f: &PrimeField) -> i64 {
        f.modulus() as i64 + 1 - self.count_points_fp(f) as i64
    }

    pub fn to_text(&self, f: &PrimeField) -> String {
        let body: Vec<String> = self.coeffs.iter().map(|c| c.value().to_string()).collect();
        format!("p={};{}", f.p(), body.join(","))
    }
}

/// Fast projective point count over `F_p` for raw coefficients.
pub fn count_points_raw(c: &[u8; 15], p: u32) -> u64 {
    let p64 = p as u64;
    let c: [u64; 15] = c.map(|v| v as u64);
    let mut count = 0u64;
    // affine chart x = 1: F(1, y, z) = sum_b y^b g_b(z)
    let mut zpow = [1u64; 5];
    for z in 0..p64 {
        for k in 1..5 {
            zpow[k] = zpow[k - 1] * z % p64;
        }
        // g_b(z) collects monomials x^(4-b-c) y^b z^c
        let mut g = [0u64; 5];
        for (i, e) in MONOMIALS.iter().enumerate() {
            g[e[1] as usize] += c[i] * zpow[e[2] as usize];
        }
        let g = g.map(|v| v % p64);
        for y in 0..p64 {
            let v = (((g[4] * y + g[3]) % p64 * y + g[2]) % p64 * y + g[1]) % p64 * y + g[0];
            if v % p64 == 0 {
                count += 1;
            }
        }
    }
    // x = 0, y = 1: y^4 + ... in z, coefficients of monomials with a = 0
    for z in 0..p64 {
        let v = (((c[14] * z + c[13]) % p64 * z + c[12]) % p64 * z + c[11]) % p64 * z + c[10];
        if v % p64 == 0 {
            count += 1;
        }
    }
    if c[14] == 0 {
        count += 1;
    }
    count
}

/// Parses `p=<p>;c1,...,c15`.
pub fn parse_quartic(s: &str) -> Result<(PrimeField, FpQuartic)> {
    let s = s.trim();
    let (head, body) = s.split_once(';').ok_or_else(|| Error::Parse(format!("missing ';' in {s:?}")))?;
    let p: u32 = head
        .trim()
        .strip_prefix("p=")
        .ok_or_else(|| Error::Parse(format!("expected p=<prime>, got {head:?}")))?
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("bad prime: {e}")))?;
    let f = PrimeField::new(p)?;
    let vals: Vec<i64> = body
        .split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|e| Error::Parse(format!("bad coefficient {t:?}: {e}"))))
        .collect::<Result<_>>()?;
    if vals.len() != 15 {
        return Err(Error::Parse(format!("expected 15 coefficients, got {}", vals.len())));
    }
    let q = TernaryQuartic::from_ints(&f, std::array::from_fn(|i| vals[i]));
    if q.is_zero(&f) {
        return Err(Error::Parse("all coefficients are zero".into()));
    }
    Ok((f, q))
}

/// A quartic together with its prime field, in the `p=<p>;c1,...,c15` form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuarticText {
    pub field: PrimeField,
    pub quartic: FpQuartic,
}

impl FromStr for QuarticText {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (field, quartic) = parse_quartic(s)?;
        Ok(QuarticText { field, quartic })
    }
}

impl fmt::Display for QuarticText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.quartic.to_text(&self.field))
    }
}

/// Well-known models used throughout.
pub mod models {
    pub const FERMAT: [i64; 15] = [1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 1];
    pub const KLEIN: [i64; 15] = [0, 1, 0, 0, 0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0];
    /// x³y + y³z + z⁴
    pub const C9: [i64; 15] = [0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1];
    /// x⁴ + y³z - z⁴
    pub const G48: [i64; 15] = [1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, -1];
    /// The pointless quartic over F_11 with trivial automorphism group.
    pub const POINTLESS_F11: [i64; 15] = [7, 3, 10, 10, 10, 6, 0, 7, 1, 4, 9, 5, 8, 9, 9];
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::ExtField;

    #[test]
    fn monomial_table_matches_listed_order() {
        let expected: [[u8; 3]; 15] = [
            [4, 0, 0], [3, 1, 0], [3, 0, 1], [2, 2, 0], [2, 1, 1], [2, 0, 2], [1, 3, 0], [1, 2, 1],
            [1, 1, 2], [1, 0, 3], [0, 4, 0], [0, 3, 1], [0, 2, 2], [0, 1, 3], [0, 0, 4],
        ];
        assert_eq!(MONOMIALS, expected);
        for (i, e) in MONOMIALS.iter().enumerate() {
            assert_eq!(mono_index(4, e[0] as usize, e[1] as usize), i);
        }
    }

    #[test]
    fn fast_count_agrees_with_generic() {
        let f = PrimeField::new(13).unwrap();
        for seed in 0..20u64 {
            let c: [i64; 15] = std::array::from_fn(|i| ((seed * 31 + i as u64 * 7) * (i as u64 + 3) % 13) as i64);
            let q = TernaryQuartic::from_ints(&f, c);
            assert_eq!(q.count_points(&f), q.count_points_fp(&f));
        }
    }

    #[test]
    fn text_round_trip() {
        let t: QuarticText = "p=11;7,3,10,10,10,6,0,7,1,4,9,5,8,9,9".parse().unwrap();
        assert_eq!(t.to_string(), "p=11;7,3,10,10,10,6,0,7,1,4,9,5,8,9,9");
        assert!("p=11;1,2".parse::<QuarticText>().is_err());
        assert!("p=9;1,0,0,0,0,0,0,0,0,0,1,0,0,0,1".parse::<QuarticText>().is_err());
        assert!("11;1".parse::<QuarticText>().is_err());
    }

    #[test]
    fn points_over_extension_are_enumerated_once() {
        let e = ExtField::new(PrimeField::new(11).unwrap(), 2);
        let mut n = 0u64;
        for_each_point(&e, |_| n += 1);
        assert_eq!(n, 121 * 121 + 121 + 1);
    }
}
