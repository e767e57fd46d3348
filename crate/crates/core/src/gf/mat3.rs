//! 3×3 matrices over a field.

use super::Field;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Mat3<E> {
    pub e: [[E; 3]; 3],
}

impl<E: Clone> Mat3<E> {
    pub fn new(e: [[E; 3]; 3]) -> Self {
        Mat3 { e }
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> E) -> Self {
        Mat3 { e: std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))) }
    }

    pub fn map<G: Clone>(&self, mut f: impl FnMut(&E) -> G) -> Mat3<G> {
        Mat3::from_fn(|i, j| f(&self.e[i][j]))
    }

    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.e[i][j]
    }
}

impl<E: Clone + Eq> Mat3<E> {
    pub fn identity<F: Field<Elem = E>>(f: &F) -> Self {
        Self::diag(f, [f.one(), f.one(), f.one()])
    }

    pub fn zero<F: Field<Elem = E>>(f: &F) -> Self {
        Mat3::from_fn(|_, _| f.zero())
    }

    pub fn diag<F: Field<Elem = E>>(f: &F, d: [E; 3]) -> Self {
        Mat3::from_fn(|i, j| if i == j { d[i].clone() } else { f.zero() })
    }

    /// Matrix with integer entries reduced into the field.
    pub fn from_ints<F: Field<Elem = E>>(f: &F, v: [[i64; 3]; 3]) -> Self {
        Mat3::from_fn(|i, j| f.from_int(v[i][j]))
    }

    pub fn mul<F: Field<Elem = E>>(&self, f: &F, o: &Self) -> Self {
        Mat3::from_fn(|i, j| {
            let mut acc = f.mul(&self.e[i][0], &o.e[0][j]);
            for k in 1..3 {
                acc = f.add(&acc, &f.mul(&self.e[i][k], &o.e[k][j]));
            }
            acc
        })
    }

    pub fn add<F: Field<Elem = E>>(&self, f: &F, o: &Self) -> Self {
        Mat3::from_fn(|i, j| f.add(&self.e[i][j], &o.e[i][j]))
    }

    pub fn scale<F: Field<Elem = E>>(&self, f: &F, c: &E) -> Self {
        Mat3::from_fn(|i, j| f.mul(&self.e[i][j], c))
    }

    pub fn transpose(&self) -> Self {
        Mat3::from_fn(|i, j| self.e[j][i].clone())
    }

    fn cofactor<F: Field<Elem = E>>(&self, f: &F, i: usize, j: usize) -> E {
        let (r0, r1) = ((i + 1) % 3, (i + 2) % 3);
        let (c0, c1) = ((j + 1) % 3, (j + 2) % 3);
        f.sub(
            &f.mul(&self.e[r0][c0], &self.e[r1][c1]),
            &f.mul(&self.e[r0][c1], &self.e[r1][c0]),
        )
    }

    pub fn det<F: Field<Elem = E>>(&self, f: &F) -> E {
        let mut acc = f.zero();
        for j in 0..3 {
            acc = f.add(&acc, &f.mul(&self.e[0][j], &self.cofactor(f, 0, j)));
        }
        acc
    }

    /// Adjugate, so that `M · adj(M) = det(M) · I`.
    pub fn adjugate<F: Field<Elem = E>>(&self, f: &F) -> Self {
        Mat3::from_fn(|i, j| self.cofactor(f, j, i))
    }

    pub fn inv<F: Field<Elem = E>>(&self, f: &F) -> Result<Self> {
        let d = self.det(f);
        let di = f.inv(&d).ok_or(Error::SingularMatrix)?;
        Ok(self.adjugate(f).scale(f, &di))
    }

    /// Entrywise `x ↦ x^(p^k)`.
    pub fn frobenius<F: Field<Elem = E>>(&self, f: &F, k: usize) -> Self {
        Mat3::from_fn(|i, j| f.frobenius_pow(&self.e[i][j], k))
    }

    pub fn is_scalar<F: Field<Elem = E>>(&self, f: &F) -> bool {
        (0..3).all(|i| (0..3).all(|j| if i == j { self.e[i][i] == self.e[0][0] } else { f.is_zero(&self.e[i][j]) }))
            && !f.is_zero(&self.e[0][0])
    }

    /// Representative of the projective class whose first nonzero entry
    /// (row-major) is 1.
    pub fn normalize_projective<F: Field<Elem = E>>(&self, f: &F) -> Self {
        let lead = self.e.iter().flatten().find(|x| !f.is_zero(x)).expect("zero matrix");
        let li = f.inv(lead).unwrap();
        self.scale(f, &li)
    }

    pub fn apply<F: Field<Elem = E>>(&self, f: &F, v: &[E; 3]) -> [E; 3] {
        std::array::from_fn(|i| {
            let mut acc = f.zero();
            for k in 0..3 {
                acc = f.add(&acc, &f.mul(&self.e[i][k], &v[k]));
            }
            acc
        })
    }
}
