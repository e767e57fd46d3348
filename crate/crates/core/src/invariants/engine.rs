//! Modular evaluation of covariants and candidate invariants.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::disc::Macaulay;
use super::symbolic::{self, CovariantTable};
use crate::quartic::{form_len, mono_index, monomials};

/// Arithmetic modulo a prime below 2^31. Primes below 2^16 take lazy
/// accumulation paths where sums of products fit in 64 bits.
#[derive(Clone, Copy, Debug)]
pub struct Zp {
    pub p: u64,
    /// `u64::MAX / p + 1`, for division-free reduction of 32-bit values
    magic: u64,
    /// inverses modulo small primes
    inverses: &'static [u32],
}

impl Zp {
    pub fn new(p: u64) -> Zp {
        assert!(p > 2 && p < 1 << 31, "modulus out of range");
        let inverses: &'static [u32] = if p < 1 << 16 { inverse_table(p) } else { &[] };
        Zp { p, magic: u64::MAX / p + 1, inverses }
    }

    pub fn small(&self) -> bool {
        self.p < 1 << 16
    }

    /// `a mod p` for `a < 2^32`.
    #[inline]
    pub fn reduce32(&self, a: u32) -> u32 {
        let low = self.magic.wrapping_mul(a as u64);
        ((low as u128 * self.p as u128) >> 64) as u32
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.p;
        a %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(a % self.p != 0);
        if self.small() {
            self.inverses[(a % self.p) as usize] as u64
        } else {
            self.pow(a, self.p - 2)
        }
    }

    pub fn from_i128(&self, v: i128) -> u64 {
        v.rem_euclid(self.p as i128) as u64
    }
}

fn inverse_table(p: u64) -> &'static [u32] {
    static CACHE: OnceLock<Mutex<HashMap<u64, &'static [u32]>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard.entry(p).or_insert_with(|| {
        let mut t = vec![0u32; p as usize];
        for a in 1..p {
            let mut acc = 1u64;
            let (mut b, mut e) = (a, p - 2);
            while e > 0 {
                if e & 1 == 1 {
                    acc = acc * b % p;
                }
                b = b * b % p;
                e >>= 1;
            }
            t[a as usize] = acc as u32;
        }
        Box::leak(t.into_boxed_slice())
    })
}

/// A covariant table reduced modulo p, grouped by output coefficient.
struct Compiled {
    order: usize,
    /// terms for output `o` are `terms[starts[o]..starts[o + 1]]`
    starts: Vec<usize>,
    terms: Vec<([u8; 3], u64)>,
}

impl Compiled {
    fn new(t: &CovariantTable, zp: Zp) -> Compiled {
        let n = form_len(t.order);
        let mut starts = vec![0usize; n + 1];
        let mut terms = Vec::with_capacity(t.terms.len());
        for o in 0..n {
            starts[o] = terms.len();
            for (out, idx, c) in &t.terms {
                if *out != o {
                    continue;
                }
                let c = zp.from_i128(*c);
                if c == 0 {
                    continue;
                }
                // degree-2 tables use the constant slot 15 as third factor
                let k = if t.degree == 2 { 15 } else { idx[2] };
                terms.push(([idx[0] as u8, idx[1] as u8, k as u8], c));
            }
        }
        starts[n] = terms.len();
        Compiled { order: t.order, starts, terms }
    }

    fn eval(&self, c: &[u64; 16], zp: Zp) -> Vec<u64> {
        let n = form_len(self.order);
        let mut out = vec![0u64; n];
        for (o, slot) in out.iter_mut().enumerate() {
            let ts = &self.terms[self.starts[o]..self.starts[o + 1]];
            if zp.small() {
                let mut acc = 0u64;
                for &([i, j, k], w) in ts {
                    acc += w * c[i as usize] * c[j as usize] * c[k as usize];
                }
                *slot = acc % zp.p;
            } else {
                let mut acc = 0u64;
                for &([i, j, k], w) in ts {
                    let t = zp.mul(zp.mul(w, c[i as usize]), zp.mul(c[j as usize], c[k as usize]));
                    acc = zp.add(acc, t);
                }
                *slot = acc;
            }
        }
        out
    }
}

/// Precomputed pairs for `φ(∂)G` with `φ` of order `k` and `G` of order `n`.
struct DiffOp {
    out_len: usize,
    terms: Vec<(u8, u8, u8, u64)>,
}

impl DiffOp {
    fn new(k: usize, n: usize, zp: Zp) -> DiffOp {
        let mut terms = Vec::new();
        for (di, d) in monomials(k).iter().enumerate() {
            for (ei, e) in monomials(n).iter().enumerate() {
                if (0..3).any(|v| e[v] < d[v]) {
                    let _ = ei;
                    continue;
                }
                let mut factor: u64 = 1;
                for v in 0..3 {
                    for t in (e[v] - d[v] + 1)..=e[v] {
                        factor *= t as u64;
                    }
                }
                let o = mono_index(n - k, e[0] - d[0], e[1] - d[1]);
                terms.push((di as u8, ei as u8, o as u8, factor % zp.p));
            }
        }
        DiffOp { out_len: form_len(n - k), terms }
    }

    fn apply(&self, phi: &[u64], g: &[u64], zp: Zp) -> Vec<u64> {
        if zp.small() {
            let mut acc = vec![0u64; self.out_len];
            for &(d, e, o, w) in &self.terms {
                acc[o as usize] += w * phi[d as usize] * g[e as usize];
            }
            acc.iter_mut().for_each(|v| *v %= zp.p);
            acc
        } else {
            let mut acc = vec![0u64; self.out_len];
            for &(d, e, o, w) in &self.terms {
                let t = zp.mul(zp.mul(w, phi[d as usize]), g[e as usize]);
                acc[o as usize] = zp.add(acc[o as usize], t);
            }
            acc
        }
    }
}

/// Symmetric matrix `[∂²q/∂x_i∂x_j]` of a quadratic form.
type Sym3 = [[u64; 3]; 3];

fn quad_matrix(q: &[u64], zp: Zp) -> Sym3 {
    let t = |v| zp.add(v, v);
    [[t(q[0]), q[1], q[2]], [q[1], t(q[3]), q[4]], [q[2], q[4], t(q[5])]]
}

fn matrix_quad(m: &Sym3, zp: Zp) -> Vec<u64> {
    let t = |v| zp.add(v, v);
    vec![m[0][0], t(m[0][1]), t(m[0][2]), m[1][1], t(m[1][2]), m[2][2]]
}

fn det3(m: &Sym3, zp: Zp) -> u64 {
    let mut acc = 0;
    for j in 0..3 {
        let (a, b) = ((j + 1) % 3, (j + 2) % 3);
        let cof = zp.sub(zp.mul(m[1][a], m[2][b]), zp.mul(m[1][b], m[2][a]));
        acc = zp.add(acc, zp.mul(m[0][j], cof));
    }
    acc
}

/// Coefficient of `t` in `det(A + tB)`.
fn det3_mixed(a: &Sym3, b: &Sym3, zp: Zp) -> u64 {
    let mut acc = 0;
    for col in 0..3 {
        let m: Sym3 = std::array::from_fn(|i| std::array::from_fn(|j| if j == col { b[i][j] } else { a[i][j] }));
        acc = zp.add(acc, det3(&m, zp));
    }
    acc
}

fn adj3(m: &Sym3, zp: Zp) -> Sym3 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            zp.sub(zp.mul(m[r0][c0], m[r1][c1]), zp.mul(m[r0][c1], m[r1][c0]))
        })
    })
}

/// Coefficient of `t` in `adj(A + tB)`.
fn adj3_mixed(a: &Sym3, b: &Sym3, zp: Zp) -> Sym3 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            let pos = zp.add(zp.mul(a[r0][c0], b[r1][c1]), zp.mul(b[r0][c0], a[r1][c1]));
            let neg = zp.add(zp.mul(a[r0][c1], b[r1][c0]), zp.mul(b[r0][c1], a[r1][c0]));
            zp.sub(pos, neg)
        })
    })
}

/// `⟨A, B⟩ = A(∂)B` for two quadratic forms.
fn pair2(a: &[u64], b: &[u64], zp: Zp) -> u64 {
    // x^2 and the other squares contribute a factor 2
    let w = [2, 1, 1, 2, 1, 2];
    let mut acc = 0;
    for i in 0..6 {
        acc = zp.add(acc, zp.mul(zp.mul(a[i], b[i]), w[i]));
    }
    acc
}

/// All basic covariants of one quartic, reduced modulo p.
pub struct Covariants {
    pub f: Vec<u64>,
    pub sigma: Vec<u64>,
    pub psi: Vec<u64>,
    pub hess: Vec<u64>,
    pub rho: Vec<u64>,
    pub tau: Vec<u64>,
    pub xi: Vec<u64>,
    pub eta: Vec<u64>,
    pub nu: Vec<u64>,
}

/// Per-modulus evaluation context.
pub struct Engine {
    pub zp: Zp,
    sigma: Compiled,
    psi: Compiled,
    hess: Compiled,
    op_4_6: DiffOp,
    op_2_4: DiffOp,
    op_6_6: DiffOp,
    op_4_4: DiffOp,
    pub(crate) macaulay: Macaulay,
}

struct Tables {
    sigma: CovariantTable,
    psi: CovariantTable,
    hess: CovariantTable,
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| Tables { sigma: symbolic::sigma(), psi: symbolic::psi(), hess: symbolic::hessian() })
}

impl Engine {
    fn build(p: u64) -> Engine {
        let zp = Zp::new(p);
        let t = tables();
        Engine {
            zp,
            sigma: Compiled::new(&t.sigma, zp),
            psi: Compiled::new(&t.psi, zp),
            hess: Compiled::new(&t.hess, zp),
            op_4_6: DiffOp::new(4, 6, zp),
            op_2_4: DiffOp::new(2, 4, zp),
            op_6_6: DiffOp::new(6, 6, zp),
            op_4_4: DiffOp::new(4, 4, zp),
            macaulay: Macaulay::new(),
        }
    }

    /// Shared engine for the modulus `p` (built once per process).
    pub fn get(p: u64) -> Arc<Engine> {
        static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Engine>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(e) = cache.lock().unwrap().get(&p) {
            return e.clone();
        }
        let e = Arc::new(Engine::build(p));
        cache.lock().unwrap().entry(p).or_insert(e).clone()
    }

    fn padded(&self, c: &[u64; 15]) -> [u64; 16] {
        let mut x = [1u64; 16];
        for i in 0..15 {
            x[i] = c[i] % self.zp.p;
        }
        x
    }

    pub fn covariants(&self, c: &[u64; 15]) -> Covariants {
        let zp = self.zp;
        let x = self.padded(c);
        let f = x[..15].to_vec();
        let sigma = self.sigma.eval(&x, zp);
        let psi = self.psi.eval(&x, zp);
        let hess = self.hess.eval(&x, zp);
        let rho = self.op_4_6.apply(&f, &psi, zp);
        let tau = self.op_2_4.apply(&rho, &f, zp);
        let xi = self.op_4_6.apply(&sigma, &hess, zp);
        let eta = self.op_2_4.apply(&xi, &sigma, zp);
        let nu = self.op_2_4.apply(&tau, &sigma, zp);
        Covariants { f, sigma, psi, hess, rho, tau, xi, eta, nu }
    }

    /// The twelve invariants of degree below 27, in the order
    /// `I3, I6, I9, J9, I12, J12, I15, J15, I18, J18, I21, J21`.
    pub fn invariants12(&self, c: &[u64; 15]) -> [u64; 12] {
        let zp = self.zp;
        let k = self.covariants(c);
        let (mr, mt, mx) = (quad_matrix(&k.rho, zp), quad_matrix(&k.tau, zp), quad_matrix(&k.xi, zp));
        let (me, mn) = (quad_matrix(&k.eta, zp), quad_matrix(&k.nu, zp));
        let adj_r = matrix_quad(&adj3(&mr, zp), zp);
        let adj_t = matrix_quad(&adj3(&mt, zp), zp);
        let adj_x = matrix_quad(&adj3(&mx, zp), zp);
        [
            self.op_4_4.apply(&k.sigma, &k.f, zp)[0],
            self.op_6_6.apply(&k.psi, &k.hess, zp)[0],
            pair2(&k.rho, &k.tau, zp),
            pair2(&k.rho, &k.xi, zp),
            det3(&mr, zp),
            pair2(&k.eta, &k.tau, zp),
            det3(&mt, zp),
            det3(&mx, zp),
            pair2(&adj_t, &adj_r, zp),
            pair2(&adj_x, &adj_r, zp),
            det3(&me, zp),
            det3(&mn, zp),
        ]
    }

    /// Further invariants built the same way, used to cross-check that the
    /// chosen twelve already determine everything below degree 27.
    pub fn extra_invariants(&self, c: &[u64; 15]) -> Vec<(usize, u64)> {
        let zp = self.zp;
        let k = self.covariants(c);
        let (mr, mt, mx) = (quad_matrix(&k.rho, zp), quad_matrix(&k.tau, zp), quad_matrix(&k.xi, zp));
        let me = quad_matrix(&k.eta, zp);
        let adj_r = matrix_quad(&adj3(&mr, zp), zp);
        let adj_tx = matrix_quad(&adj3_mixed(&mt, &mx, zp), zp);
        let adj_e = matrix_quad(&adj3(&me, zp), zp);
        vec![
            (12, pair2(&k.eta, &k.xi, zp)),
            (12, pair2(&k.nu, &k.xi, zp)),
            (15, det3_mixed(&mt, &mx, zp)),
            (15, det3_mixed(&mx, &mt, zp)),
            (18, pair2(&adj_tx, &adj_r, zp)),
            (21, pair2(&adj_e, &k.nu, zp)),
        ]
    }
}

impl crate::gf::Field for Zp {
    type Elem = u64;

    fn characteristic(&self) -> u32 {
        self.p as u32
    }

    fn degree(&self) -> usize {
        1
    }

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1
    }

    fn from_int(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        Zp::add(self, *a, *b)
    }

    fn sub(&self, a: &u64, b: &u64) -> u64 {
        Zp::sub(self, *a, *b)
    }

    fn neg(&self, a: &u64) -> u64 {
        Zp::sub(self, 0, *a)
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        Zp::mul(self, *a, *b)
    }

    fn inv(&self, a: &u64) -> Option<u64> {
        (*a % self.p != 0).then(|| Zp::inv(self, *a))
    }

    fn is_zero(&self, a: &u64) -> bool {
        *a % self.p == 0
    }

    fn frobenius_pow(&self, a: &u64, _k: usize) -> u64 {
        *a
    }

    fn to_prime(&self, a: &u64) -> Option<crate::gf::FieldElement> {
        u8::try_from(*a).ok().map(crate::gf::FieldElement::new_unchecked)
    }

    fn elements(&self) -> Vec<u64> {
        (0..self.p).collect()
    }
}
