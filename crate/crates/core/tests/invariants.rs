use proptest::prelude::*;
use qdb::gf::{ExtField, Field, FieldElement, Mat3, PrimeField};
use qdb::invariants::{
    discriminant, discriminant_raw, dixmier_ohno, invariants_raw, normalize, CanonicalKey, DOInvariants, Engine, Keyer,
    Normalizer, Zp, WEIGHTS,
};
use qdb::quartic::{models, FpQuartic, TernaryQuartic, MONOMIALS};
use qdb::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BIG: u64 = 2147483647;

fn random_gl3(rng: &mut impl Rng, zp: &Zp) -> (Mat3<u64>, u64) {
    loop {
        let m = Mat3::from_fn(|_, _| rng.gen_range(0..zp.p));
        let d = m.det(zp);
        if d != 0 {
            return (m, d);
        }
    }
}

fn fp_quartic(c: [u64; 15]) -> FpQuartic {
    FpQuartic::from_values(c.map(|x| x as u8))
}

#[test]
fn invariants_transform_with_determinant_powers() {
    for p in [BIG, 11, 13, 31] {
        let zp = Zp::new(p);
        let e = Engine::get(p);
        let mut rng = ChaCha8Rng::seed_from_u64(p);
        for _ in 0..8 {
            let c: [u64; 15] = std::array::from_fn(|_| rng.gen_range(0..p));
            let (m, det) = random_gl3(&mut rng, &zp);
            let c2 = TernaryQuartic::new(c).transform(&zp, &m).unwrap().coeffs;
            let (a, b) = (invariants_raw(&e, &c), invariants_raw(&e, &c2));
            for i in 0..13 {
                let s = zp.pow(det, (4 * WEIGHTS[i] / 3) as u64);
                assert_eq!(zp.mul(a[i], s), b[i], "p={p} slot {i}");
            }
            for (w, x) in e.extra_invariants(&c).into_iter().zip(e.extra_invariants(&c2)) {
                assert_eq!(zp.mul(w.1, zp.pow(det, (4 * w.0 / 3) as u64)), x.1, "p={p} extra of degree {}", w.0);
            }
        }
    }
}

#[test]
fn large_prime_invariants_are_generically_nonzero() {
    let e = Engine::get(BIG);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let c: [u64; 15] = std::array::from_fn(|_| rng.gen_range(0..BIG));
    assert!(invariants_raw(&e, &c).iter().all(|&v| v != 0));
}

/// Dimensions of the degree-`d` invariants of ternary quartics, from the
/// multiplicity of the trivial representation in `Sym^d(Sym^4)` computed by
/// the Weyl character formula.
fn invariant_dims(max_d: usize) -> Vec<u64> {
    let w = 4 * max_d + 1;
    let mut dp = vec![vec![vec![0u64; w]; w]; max_d + 1];
    dp[0][0][0] = 1;
    for e in MONOMIALS.iter() {
        let (e0, e1) = (e[0] as usize, e[1] as usize);
        for n in 1..=max_d {
            for a in e0..w {
                for b in e1..w {
                    let v = dp[n - 1][a - e0][b - e1];
                    dp[n][a][b] += v;
                }
            }
        }
    }
    let perms: [([usize; 3], i64); 6] =
        [([0, 1, 2], 1), ([1, 2, 0], 1), ([2, 0, 1], 1), ([0, 2, 1], -1), ([2, 1, 0], -1), ([1, 0, 2], -1)];
    let rho = [2i64, 1, 0];
    (0..=max_d)
        .map(|d| {
            if d % 3 != 0 {
                return 0;
            }
            let k = (4 * d / 3) as i64;
            let mut s = 0i64;
            for (perm, sign) in perms {
                let a = k + rho[0] - rho[perm[0]];
                let b = k + rho[1] - rho[perm[1]];
                if a >= 0 && b >= 0 {
                    s += sign * dp[d][a as usize][b as usize] as i64;
                }
            }
            s as u64
        })
        .collect()
}

fn rank_mod(rows: &mut [Vec<u64>], zp: &Zp) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..ncols {
        let Some(piv) = (r..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(r, piv);
        let inv = zp.inv(rows[r][c]);
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let f = zp.mul(rows[i][c], inv);
                for j in c..ncols {
                    let t = zp.mul(f, rows[r][j]);
                    rows[i][j] = zp.sub(rows[i][j], t);
                }
            }
        }
        r += 1;
    }
    r
}

fn exponent_vectors(degs: &[u32], d: u32) -> Vec<Vec<usize>> {
    fn rec(degs: &[u32], start: usize, left: u32, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..degs.len() {
            if degs[i] <= left {
                cur.push(i);
                rec(degs, i, left - degs[i], cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(degs, 0, d, &mut Vec::new(), &mut out);
    out
}

#[test]
fn invariant_ring_dimensions() {
    let dims = invariant_dims(27);
    let by_degree: Vec<u64> = (0..=27).step_by(3).map(|d| dims[d]).collect();
    assert_eq!(by_degree, [1, 1, 2, 4, 7, 11, 19, 29, 44, 67]);
}

/// Monomials in the thirteen invariants span every graded piece up to degree 27.
#[test]
fn thirteen_invariants_span_the_ring_up_to_degree_27() {
    let dims = invariant_dims(27);
    for p in [BIG, 13] {
        let zp = Zp::new(p);
        let e = Engine::get(p);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let samples: Vec<[u64; 13]> = (0..160)
            .map(|_| invariants_raw(&e, &std::array::from_fn(|_| rng.gen_range(0..p))))
            .collect();
        for d in (3..=27).step_by(3) {
            let mons = exponent_vectors(&WEIGHTS, d);
            let mut rows: Vec<Vec<u64>> = samples
                .iter()
                .map(|s| mons.iter().map(|m| m.iter().fold(1, |acc, &j| zp.mul(acc, s[j]))).collect())
                .collect();
            assert_eq!(rank_mod(&mut rows, &zp) as u64, dims[d as usize], "p={p} degree {d}");
        }
    }
}

fn field(p: u32) -> PrimeField {
    PrimeField::new(p).unwrap()
}

fn pow_fe(f: &PrimeField, a: FieldElement, e: u32) -> FieldElement {
    f.pow(&a, e as u128)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn entries_are_homogeneous(p in prop::sample::select(vec![11u32, 13, 17, 251]), c in prop::array::uniform15(0u8..=255), l in 1u8..=255) {
        let f = field(p);
        let q = FpQuartic::from_values(c.map(|x| (x as u32 % p) as u8));
        let lam = f.elem(l as i64);
        prop_assume!(lam.value() != 0);
        let a = dixmier_ohno(&q, &f);
        let b = dixmier_ohno(&q.scale(&f, &lam), &f);
        for i in 0..13 {
            prop_assert_eq!(f.mul(&a.values[i], &pow_fe(&f, lam, WEIGHTS[i])), b.values[i]);
        }
        prop_assert_eq!(discriminant(&q.scale(&f, &lam), &f), f.mul(&discriminant(&q, &f), &pow_fe(&f, lam, 27)));
    }

    #[test]
    fn key_is_invariant_under_gl3(p in prop::sample::select(vec![11u32, 13, 17]), seed in any::<u64>()) {
        let f = field(p);
        let zp = Zp::new(p as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c: [u64; 15] = std::array::from_fn(|_| rng.gen_range(0..p as u64));
        let (m, _) = random_gl3(&mut rng, &zp);
        let c2 = TernaryQuartic::new(c).transform(&zp, &m).unwrap().coeffs;
        let (a, b) = (dixmier_ohno(&fp_quartic(c), &f), dixmier_ohno(&fp_quartic(c2), &f));
        prop_assume!(a.discriminant().value() != 0);
        prop_assert_eq!(normalize(&a, &f).unwrap(), normalize(&b, &f).unwrap());
    }

    #[test]
    fn key_is_orbit_minimal(p in prop::sample::select(vec![11u32, 13, 31]), v in prop::array::uniform13(0u8..=255)) {
        let f = field(p);
        let vals = v.map(|x| f.elem(x as i64));
        prop_assume!(vals.iter().any(|x| x.value() != 0));
        let inv = DOInvariants { values: vals };
        let key = normalize(&inv, &f).unwrap();
        prop_assert!(key.0 <= inv.raw());
        // every weighted rescaling by a unit has the same key
        for l in 1..p as i64 {
            let lam = f.elem(l);
            let scaled = DOInvariants { values: std::array::from_fn(|i| f.mul(&vals[i], &pow_fe(&f, lam, WEIGHTS[i]))) };
            prop_assert!(key.0 <= scaled.raw());
            prop_assert_eq!(normalize(&scaled, &f).unwrap(), key);
        }
    }

    #[test]
    fn key_text_round_trips(v in prop::array::uniform13(any::<u8>())) {
        let k = CanonicalKey(v);
        prop_assert_eq!(k.to_string().parse::<CanonicalKey>().unwrap(), k);
    }
}

#[test]
fn single_discriminant_slot_normalizes_to_one() {
    for p in [11u32, 13] {
        let f = field(p);
        for c in 1..p as i64 {
            let mut values = [f.elem(0); 13];
            values[12] = f.elem(c);
            let key = normalize(&DOInvariants { values }, &f).unwrap();
            let mut expected = [0u8; 13];
            expected[12] = 1;
            assert_eq!(key.0, expected);
        }
    }
}

#[test]
fn all_zero_invariants_are_rejected() {
    let f = field(11);
    let zero = DOInvariants { values: [f.elem(0); 13] };
    assert!(matches!(normalize(&zero, &f), Err(Error::AllZeroInvariants)));
    assert!(Normalizer::new(11).normalize(&[0; 13]).is_err());
}

#[test]
fn malformed_key_text_is_rejected() {
    for s in ["", "(1:2)", "1:2:3:4:5:6:7:8:9:10:11:12:13", "(1:2:3:4:5:6:7:8:9:10:11:12:x)"] {
        assert!(s.parse::<CanonicalKey>().is_err(), "{s:?}");
    }
}

#[test]
fn special_curves_are_smooth() {
    for p in [11u32, 13, 17, 19, 23] {
        let f = field(p);
        for c in [models::FERMAT, models::KLEIN, models::C9, models::G48] {
            let q = FpQuartic::from_ints(&f, c);
            assert_ne!(discriminant(&q, &f).value(), 0, "p={p} {c:?}");
            assert!(normalize(&dixmier_ohno(&q, &f), &f).is_ok());
        }
    }
}

/// Quartic through `(0:0:1)` with vanishing gradient there, moved by a random
/// invertible matrix.
fn singular_at_rational_point(rng: &mut impl Rng, p: u64) -> [u64; 15] {
    let zp = Zp::new(p);
    let mut c: [u64; 15] = std::array::from_fn(|_| rng.gen_range(0..p));
    for (i, m) in MONOMIALS.iter().enumerate() {
        if m[2] >= 3 {
            c[i] = 0;
        }
    }
    let (m, _) = random_gl3(rng, &zp);
    TernaryQuartic::new(c).transform(&zp, &m).unwrap().coeffs
}

#[test]
fn quartics_with_rational_singular_points_have_zero_discriminant() {
    for p in [11u64, 13, 101, BIG] {
        let e = Engine::get(p);
        let mut rng = ChaCha8Rng::seed_from_u64(p + 5);
        for _ in 0..100 {
            let c = singular_at_rational_point(&mut rng, p);
            assert_eq!(discriminant_raw(&e, &c), 0, "p={p} {c:?}");
        }
    }
}

/// Quartics singular at a conjugate pair of `F_{p^2}`-points, found as the
/// kernel of the six `F_p`-linear conditions on the coefficients.
#[test]
fn quartics_singular_at_conjugate_points_have_zero_discriminant() {
    let p = 11u32;
    let f = field(p);
    let k = ExtField::new(f, 2);
    let zp = Zp::new(p as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut tested = 0;
    while tested < 30 {
        let pt = [k.one(), k.elem_from_coeffs(&[rng.gen_range(0..11), rng.gen_range(0..11)]), k.elem_from_coeffs(&[rng.gen_range(0..11), rng.gen_range(0..11)])];
        if k.to_prime(&pt[1]).is_some() && k.to_prime(&pt[2]).is_some() {
            continue;
        }
        // rows: real and "imaginary" parts of each partial derivative at pt
        let mut rows = vec![vec![0u64; 15]; 6];
        for (i, m) in MONOMIALS.iter().enumerate() {
            for v in 0..3 {
                if m[v] == 0 {
                    continue;
                }
                let mut val = k.from_int(m[v] as i64);
                for w in 0..3 {
                    let e = m[w] as u128 - (w == v) as u128;
                    val = k.mul(&val, &k.pow(&pt[w], e));
                }
                let cs = val.coeffs();
                rows[2 * v][i] = *cs.first().unwrap_or(&0) as u64;
                rows[2 * v + 1][i] = *cs.get(1).unwrap_or(&0) as u64;
            }
        }
        let kernel = kernel_mod(rows, &zp);
        let weights: Vec<u64> = kernel.iter().map(|_| rng.gen_range(0..p as u64)).collect();
        let c: [u64; 15] = std::array::from_fn(|j| {
            kernel.iter().zip(&weights).fold(0, |acc, (b, w)| zp.add(acc, zp.mul(b[j], *w)))
        });
        let q = fp_quartic(c);
        if q.is_zero(&f) || q.has_rational_singularity(&f) {
            continue;
        }
        let lifted = TernaryQuartic::new(q.coeffs.map(|x| k.from_prime(x)));
        for g in lifted.partials(&k) {
            assert!(k.is_zero(&g.evaluate(&k, &pt)), "gradient at {pt:?}");
        }
        assert_eq!(discriminant(&q, &f).value(), 0, "{c:?}");
        tested += 1;
    }
}

fn kernel_mod(mut rows: Vec<Vec<u64>>, zp: &Zp) -> Vec<Vec<u64>> {
    let n = rows[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(piv) = (r..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(r, piv);
        let inv = zp.inv(rows[r][c]);
        for j in 0..n {
            rows[r][j] = zp.mul(rows[r][j], inv);
        }
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let f = rows[i][c];
                for j in 0..n {
                    let t = zp.mul(f, rows[r][j]);
                    rows[i][j] = zp.sub(rows[i][j], t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (0..n)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![0u64; n];
            v[free] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = zp.sub(0, rows[i][free]);
            }
            v
        })
        .collect()
}

#[test]
fn nonzero_discriminant_means_no_singular_point_over_quadratic_extension() {
    let p = 11u32;
    let f = field(p);
    let k = ExtField::new(f, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut smooth = 0;
    while smooth < 15 {
        let c: [u64; 15] = std::array::from_fn(|_| rng.gen_range(0..p as u64));
        let q = fp_quartic(c);
        if discriminant(&q, &f).value() == 0 {
            continue;
        }
        let lifted = TernaryQuartic::new(q.coeffs.map(|x| k.from_prime(x)));
        assert!(!lifted.has_rational_singularity(&k), "{c:?}");
        smooth += 1;
    }
}

#[test]
fn keyer_agrees_with_the_public_path() {
    let f = field(13);
    let keyer = Keyer::new(&f);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let c: [u8; 15] = std::array::from_fn(|_| rng.gen_range(0..13));
        let q = FpQuartic::from_values(c);
        let inv = dixmier_ohno(&q, &f);
        match keyer.key(&c) {
            None => assert_eq!(inv.discriminant().value(), 0),
            Some(k) => assert_eq!(k, normalize(&inv, &f).unwrap()),
        }
    }
}
