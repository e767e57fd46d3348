//! Discriminant of a quartic as the resultant of its three partials,
//! via Macaulay's quotient formula in degree 7.

use super::engine::Zp;
use crate::quartic::{mono_index, monomials};

const N: usize = 36;
const NR: usize = 9;

/// Sparse description of the Macaulay matrix: each entry is a multiple of
/// one quartic coefficient.
pub(crate) struct Macaulay {
    /// `(row, col, coefficient index, integer factor)`
    entries: Vec<(u8, u8, u8, u8)>,
    /// Entries of the submatrix on monomials divisible by two distinct cubes.
    minor: Vec<(u8, u8, u8, u8)>,
    /// Coefficient index maps for the six permutations of the variables.
    perms: Vec<[usize; 15]>,
}

impl Macaulay {
    pub(crate) fn new() -> Macaulay {
        let mons7 = monomials(7);
        let cubics = monomials(3);
        let mut entries = Vec::new();
        let extraneous: Vec<usize> =
            (0..N).filter(|&r| (0..3).filter(|&v| mons7[r][v] >= 3).count() >= 2).collect();
        assert_eq!(extraneous.len(), NR);
        for (row, m) in mons7.iter().enumerate() {
            let i = (0..3).find(|&v| m[v] >= 3).expect("degree 7 forces a cube");
            let mut shift = *m;
            shift[i] -= 3;
            for mu in &cubics {
                // coefficient of mu in ∂f/∂x_i is (mu_i + 1) * c[mu + e_i]
                let mut up = *mu;
                up[i] += 1;
                let cidx = mono_index(4, up[0], up[1]);
                let col = mono_index(7, shift[0] + mu[0], shift[1] + mu[1]);
                entries.push((row as u8, col as u8, cidx as u8, up[i] as u8));
            }
        }
        let minor = entries
            .iter()
            .filter_map(|&(r, c, ci, w)| {
                let a = extraneous.iter().position(|&x| x == r as usize)?;
                let b = extraneous.iter().position(|&x| x == c as usize)?;
                Some((a as u8, b as u8, ci, w))
            })
            .collect();
        let mons4 = monomials(4);
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]]
            .iter()
            .map(|s| {
                // coefficient of x^e in f∘π is the coefficient of the permuted monomial
                std::array::from_fn(|k| {
                    let e = mons4[k];
                    let mut g = [0usize; 3];
                    for v in 0..3 {
                        g[s[v]] = e[v];
                    }
                    mono_index(4, g[0], g[1])
                })
            })
            .collect();
        Macaulay { entries, minor, perms }
    }

    /// `det M / det M'` over the first variable ordering whose extraneous
    /// minor is invertible; `None` if none is.
    pub(crate) fn resultant(&self, c: &[u64; 15], zp: Zp) -> Option<u64> {
        for perm in &self.perms {
            let cp: [u64; 15] = std::array::from_fn(|k| c[perm[k]] % zp.p);
            let mut sub: Vec<Vec<u64>> = vec![vec![0; NR]; NR];
            for &(a, b, ci, w) in &self.minor {
                sub[a as usize][b as usize] = zp.mul(cp[ci as usize], w as u64);
            }
            let d_sub = det_strict(&mut sub, zp);
            if d_sub == 0 {
                continue;
            }
            let d = if zp.small() {
                let mut m = [[0u32; N]; N];
                for &(r, col, ci, w) in &self.entries {
                    m[r as usize][col as usize] = (cp[ci as usize] * w as u64 % zp.p) as u32;
                }
                det_lazy(&mut m, zp)
            } else {
                let mut m = vec![vec![0u64; N]; N];
                for &(r, col, ci, w) in &self.entries {
                    m[r as usize][col as usize] = zp.mul(cp[ci as usize], w as u64);
                }
                det_strict(&mut m, zp)
            };
            return Some(zp.mul(d, zp.inv(d_sub)));
        }
        None
    }
}

fn det_strict(m: &mut Vec<Vec<u64>>, zp: Zp) -> u64 {
    let n = m.len();
    let mut det = 1u64;
    for k in 0..n {
        let Some(piv) = (k..n).find(|&r| m[r][k] != 0) else { return 0 };
        if piv != k {
            m.swap(piv, k);
            det = zp.sub(0, det);
        }
        det = zp.mul(det, m[k][k]);
        let inv = zp.inv(m[k][k]);
        for i in k + 1..n {
            if m[i][k] == 0 {
                continue;
            }
            let f = zp.mul(m[i][k], inv);
            for j in k..n {
                let t = zp.mul(f, m[k][j]);
                m[i][j] = zp.sub(m[i][j], t);
            }
        }
    }
    det
}

/// Elimination for primes below 2^16 with deferred reduction: non-pivot
/// rows accumulate at most `N` updates of size below `p^2`.
fn det_lazy(m: &mut [[u32; N]; N], zp: Zp) -> u64 {
    let p = zp.p as u32;
    let mut det = 1u64;
    for k in 0..N {
        let mut piv = None;
        for r in k..N {
            m[r][k] = zp.reduce32(m[r][k]);
            if piv.is_none() && m[r][k] != 0 {
                piv = Some(r);
            }
        }
        let Some(piv) = piv else { return 0 };
        if piv != k {
            m.swap(piv, k);
            det = zp.sub(0, det);
        }
        for j in k..N {
            m[k][j] = zp.reduce32(m[k][j]);
        }
        let pk = m[k][k] as u64;
        det = zp.mul(det, pk);
        let inv = zp.inv(pk) as u32;
        let (top, rest) = m.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in rest.iter_mut() {
            let a = row[k];
            if a == 0 {
                continue;
            }
            let f = p - zp.reduce32(a * inv);
            for j in k + 1..N {
                row[j] += f * pivot_row[j];
            }
            row[k] = 0;
        }
    }
    det
}
