//! Dense univariate polynomials over `F_p`, coefficients low degree first.

use super::{factor_u128, inv_mod};

pub type FpPoly = Vec<u8>;

pub fn trim(a: &mut FpPoly) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

/// Degree, or `None` for the zero polynomial.
pub fn degree(a: &[u8]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

pub fn sub(a: &[u8], b: &[u8], p: u32) -> FpPoly {
    let n = a.len().max(b.len());
    let mut out: FpPoly = (0..n)
        .map(|i| {
            let x = *a.get(i).unwrap_or(&0) as u32;
            let y = *b.get(i).unwrap_or(&0) as u32;
            ((x + p - y) % p) as u8
        })
        .collect();
    trim(&mut out);
    out
}

pub fn mul(a: &[u8], b: &[u8], p: u32) -> FpPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut acc = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            acc[i + j] += x as u64 * y as u64;
        }
    }
    let mut out: FpPoly = acc.into_iter().map(|c| (c % p as u64) as u8).collect();
    trim(&mut out);
    out
}

/// Remainder of `a` modulo a nonzero `m`.
pub fn rem(a: &[u8], m: &[u8], p: u32) -> FpPoly {
    divrem(a, m, p).1
}

pub fn divrem(a: &[u8], m: &[u8], p: u32) -> (FpPoly, FpPoly) {
    let dm = degree(m).expect("division by the zero polynomial");
    let mut r: Vec<u32> = a.iter().map(|&c| c as u32).collect();
    while r.last() == Some(&0) {
        r.pop();
    }
    if r.len() <= dm {
        return (Vec::new(), r.into_iter().map(|c| c as u8).collect());
    }
    let lead_inv = inv_mod(m[dm] as u32, p);
    let mut q = vec![0u8; r.len() - dm];
    for i in (dm..r.len()).rev() {
        let c = r[i] % p * lead_inv % p;
        if c == 0 {
            continue;
        }
        q[i - dm] = c as u8;
        for j in 0..=dm {
            let t = c * m[j] as u32 % p;
            r[i - dm + j] = (r[i - dm + j] + p - t) % p;
        }
    }
    let mut rr: FpPoly = r.into_iter().take(dm).map(|c| (c % p) as u8).collect();
    trim(&mut rr);
    trim(&mut q);
    (q, rr)
}

pub fn monic(a: &[u8], p: u32) -> FpPoly {
    match degree(a) {
        None => Vec::new(),
        Some(d) => {
            let li = inv_mod(a[d] as u32, p);
            a[..=d].iter().map(|&c| (c as u32 * li % p) as u8).collect()
        }
    }
}

pub fn gcd(a: &[u8], b: &[u8], p: u32) -> FpPoly {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    monic(&x, p)
}

pub fn mulmod(a: &[u8], b: &[u8], m: &[u8], p: u32) -> FpPoly {
    rem(&mul(a, b, p), m, p)
}

pub fn powmod(a: &[u8], mut e: u128, m: &[u8], p: u32) -> FpPoly {
    let mut base = rem(a, m, p);
    let mut acc: FpPoly = vec![1];
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(&acc, &base, m, p);
        }
        base = mulmod(&base, &base, m, p);
        e >>= 1;
    }
    acc
}

/// Rabin's irreducibility test.
pub fn is_irreducible(f: &[u8], p: u32) -> bool {
    let n = match degree(f) {
        None | Some(0) => return false,
        Some(n) => n,
    };
    if n == 1 {
        return true;
    }
    let x: FpPoly = vec![0, 1];
    let mut frob = Vec::with_capacity(n + 1);
    let mut h = x.clone();
    frob.push(h.clone());
    for _ in 0..n {
        h = powmod(&h, p as u128, f, p);
        frob.push(h.clone());
    }
    if frob[n] != rem(&x, f, p) {
        return false;
    }
    factor_u128(n as u128).into_iter().all(|(r, _)| {
        let k = n / r as usize;
        let g = gcd(&sub(&frob[k], &x, p), f, p);
        g.len() == 1
    })
}

/// Lexicographically smallest monic irreducible polynomial of degree `m`,
/// comparing coefficient tuples from the constant term up.
pub fn smallest_irreducible(m: usize, p: u32) -> FpPoly {
    assert!(m >= 1);
    let mut coeffs = vec![0u8; m];
    // anything with zero constant term is divisible by x
    if m > 1 {
        coeffs[0] = 1;
    }
    loop {
        let mut f = coeffs.clone();
        f.push(1);
        if is_irreducible(&f, p) {
            return f;
        }
        // odometer with the highest-degree coefficient turning fastest
        let mut i = m;
        loop {
            if i == 0 {
                panic!("no irreducible polynomial of degree {m} over F_{p}");
            }
            i -= 1;
            coeffs[i] += 1;
            if (coeffs[i] as u32) < p {
                break;
            }
            coeffs[i] = 0;
        }
    }
}
