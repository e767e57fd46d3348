use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qdb::families::*;
use qdb::gf::{ExtElement, ExtField, Field, Mat3, PrimeField};
use qdb::invariants::Keyer;
use qdb::quartic::{count_points_raw, for_each_point, FpQuartic, TernaryQuartic};
use qdb::twists::*;
use qdb::Error;

fn field(p: u32) -> PrimeField {
    PrimeField::new(p).unwrap()
}

fn lift(k: &ExtField, q: &FpQuartic) -> TernaryQuartic<ExtElement> {
    TernaryQuartic::new(q.coeffs.map(|c| k.from_prime(c)))
}

/// Smooth members of a stratum's families, sampled with a fixed stride.
fn sample(f: &PrimeField, s: Stratum, per_family: usize) -> Vec<FamilyCandidate> {
    let keyer = Keyer::new(f);
    let mut out = Vec::new();
    for fam in families(f, s).unwrap() {
        let stride = (fam.len() / (4 * per_family as u64)).max(1);
        let mut taken = 0;
        let mut i = 0;
        while i < fam.len() && taken < per_family {
            if keyer.key(&fam.raw(i)).is_some() {
                out.push(fam.candidate(i));
                taken += 1;
            }
            i += stride;
        }
    }
    out
}

fn group_of(c: &FamilyCandidate) -> AutGroup {
    AutGroup::from_descriptor(&c.aut().unwrap()).unwrap()
}

#[test]
fn closure_of_special_curves() {
    for p in [11u32, 13, 17, 19, 23] {
        let f = field(p);
        for (s, size, exponent) in [(Stratum::G168, 168, 84), (Stratum::G96, 96, 24), (Stratum::G48, 48, 12), (Stratum::C9, 9, 9)] {
            let c = enumerate_stratum(&f, s).unwrap().next().unwrap();
            let g = group_of(&c);
            assert_eq!(g.len(), size, "p={p} {s}");
            assert_eq!(g.exponent(), exponent, "p={p} {s}");
            assert!(g.elements[0].is_scalar(&g.field));
            if s == Stratum::G168 {
                // PSL(2,7): 21 involutions, 56 of order 3, 42 of order 4, 48 of order 7
                let mut profile = std::collections::BTreeMap::new();
                for e in &g.elements {
                    *profile.entry(order(&g.field, e)).or_insert(0) += 1;
                }
                assert_eq!(profile.into_iter().collect::<Vec<_>>(), [(1, 1), (2, 21), (3, 56), (4, 42), (7, 48)]);
            }
        }
    }
}

fn order(k: &ExtField, e: &Mat3<ExtElement>) -> usize {
    let mut h = e.clone();
    let mut n = 1;
    while !h.is_scalar(k) {
        h = h.mul(k, e);
        n += 1;
    }
    n
}

#[test]
fn closure_rejects_large_groups() {
    let k = ExtField::new(field(17), 2);
    let g = k.primitive_element().unwrap();
    let m = Mat3::diag(&k, [g, k.one(), k.one()]);
    assert!(matches!(group_closure(&k, &[m]), Err(Error::ClosureOverflow(168))));
}

#[test]
fn class_counts_trivial_c2_d8() {
    let f = field(13);
    for c in sample(&f, Stratum::Trivial, 3) {
        let tw = twists_from_descriptor(&c.quartic, &c.aut().unwrap(), 0).unwrap();
        assert_eq!(tw.len(), 1);
        assert_eq!(tw[0].rational_aut, 1);
    }
    for c in sample(&f, Stratum::C2, 4) {
        let g = group_of(&c);
        assert_eq!(frobenius_classes(&g).len(), 2);
    }
    let fam = families(&f, Stratum::D8).unwrap()[0];
    let keyer = Keyer::new(&f);
    for a in 0..13u8 {
        // b = 3 = 2⁴ is a fourth power and 4 | 12
        if keyer.key(&fam.coeffs_for(&[a, 3])).is_none() {
            continue;
        }
        let d = aut_generators(&fam, &[a, 3]).unwrap();
        let g = AutGroup::from_descriptor(&d).unwrap();
        assert_eq!(frobenius_classes(&g).len(), 5);
    }
}

#[test]
fn mass_formula_over_all_small_strata() {
    for p in [11u32, 13] {
        let f = field(p);
        for s in Stratum::ALL {
            for c in sample(&f, s, 3) {
                let tw = twists_from_descriptor(&c.quartic, &c.aut().unwrap(), 7).unwrap();
                // Σ 1/#Aut over the twists is 1; compare numerators over the lcm
                let l: usize = tw.iter().fold(1, |a, t| lcm(a, t.rational_aut));
                let num: usize = tw.iter().map(|t| l / t.rational_aut).sum();
                assert_eq!(num, l, "p={p} {s} {:?}", c.params);
            }
        }
    }
}

fn lcm(a: usize, b: usize) -> usize {
    let mut x = a;
    let mut y = b;
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}

#[test]
fn hilbert90_contract_on_random_cocycles() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    let strata = [Stratum::G168, Stratum::G96, Stratum::G48, Stratum::C9, Stratum::S4, Stratum::G16, Stratum::D8, Stratum::S3];
    for p in [11u32, 13] {
        let f = field(p);
        for s in strata {
            for c in sample(&f, s, 2) {
                let g = group_of(&c);
                let k = &g.field;
                let curve = lift(k, &c.quartic);
                for _ in 0..5 {
                    let alpha = &g.elements[rng.gen_range(0..g.len())];
                    let a = canonical_lift(k, &curve, alpha).unwrap();
                    let m = cocycle_length(k, &a, 1000).unwrap();
                    assert!(m <= g.n() * g.exponent(), "m={m} n={} e={}", g.n(), g.exponent());
                    assert_eq!(m % g.n(), 0);
                    let cob = hilbert90(k, &a, &mut rng).unwrap();
                    let big = &cob.field;
                    assert_eq!(cob.m(), m);
                    let lhs = cob.b.frobenius(big, 1);
                    let rhs = cob.b.mul(big, &cob.a.inv(big).unwrap());
                    assert_eq!(lhs, rhs);
                    checked += 1;
                }
            }
        }
    }
    assert!(checked >= 100, "{checked}");
}

#[test]
fn canonical_lift_is_multiplicative() {
    let f = field(13);
    for s in [Stratum::G96, Stratum::D8, Stratum::G16] {
        let c = sample(&f, s, 1).remove(0);
        let g = group_of(&c);
        let k = &g.field;
        let curve = lift(k, &c.quartic);
        for x in g.elements.iter().step_by(3) {
            for y in g.elements.iter().step_by(5) {
                let xy = canonical_lift(k, &curve, &x.mul(k, y)).unwrap();
                let prod = canonical_lift(k, &curve, x).unwrap().mul(k, &canonical_lift(k, &curve, y).unwrap());
                assert_eq!(xy, prod);
            }
        }
    }
}

#[test]
fn twists_share_the_key() {
    for p in [11u32, 13] {
        let f = field(p);
        let keyer = Keyer::new(&f);
        for s in Stratum::ALL.into_iter().filter(|s| *s != Stratum::Trivial) {
            for c in sample(&f, s, 2) {
                let key = keyer.key(&c.quartic.values()).unwrap();
                let tw = twists_from_descriptor(&c.quartic, &c.aut().unwrap(), 3).unwrap();
                assert_eq!(tw.len(), frobenius_classes(&group_of(&c)).len());
                assert_eq!(tw[0].quartic, c.quartic.monic(&f));
                for t in &tw {
                    assert_eq!(keyer.key(&t.quartic.values()), Some(key), "p={p} {s}");
                }
            }
        }
    }
}

fn proportional(k: &ExtField, u: &[ExtElement; 3], v: &[ExtElement; 3]) -> bool {
    (0..3).all(|i| {
        let j = (i + 1) % 3;
        k.mul(&u[i], &v[j]) == k.mul(&u[j], &v[i])
    })
}

/// Points of `C` over `F_{p^m}` with `P^φ ~ αP`; these are the rational
/// points of the twist by `α`.
fn twisted_point_oracle(curve: &FpQuartic, k: &ExtField, alpha: &Mat3<ExtElement>, m: usize) -> u64 {
    let big = ExtField::new(k.base(), m);
    let a = embed_matrix(k, alpha, &big).unwrap();
    let c = lift(&big, curve);
    let mut n = 0;
    for_each_point(&big, |v| {
        if !big.is_zero(&c.evaluate(&big, v)) {
            return;
        }
        let w = v.clone().map(|x| big.frobenius(&x, 1));
        if proportional(&big, &w, &a.apply(&big, v)) {
            n += 1;
        }
    });
    n
}

#[test]
fn twisted_models_have_the_predicted_point_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut checked = 0;
    for (p, strata) in [
        (11u32, vec![Stratum::C2, Stratum::D4, Stratum::G96, Stratum::S4]),
        (13, vec![Stratum::C2, Stratum::D8, Stratum::C3, Stratum::S3, Stratum::C6]),
    ] {
        let f = field(p);
        for s in strata {
            for c in sample(&f, s, 2) {
                let g = group_of(&c);
                let k = &g.field;
                let curve = lift(k, &c.quartic);
                for rep in frobenius_classes(&g) {
                    let alpha = &g.elements[rep];
                    let a = canonical_lift(k, &curve, alpha).unwrap();
                    let m = cocycle_length(k, &a, 1000).unwrap();
                    if m > 2 {
                        continue;
                    }
                    let cob = hilbert90(k, &a, &mut rng).unwrap();
                    let model = twisted_model(&c.quartic, &cob).unwrap();
                    let expected = twisted_point_oracle(&c.quartic, k, alpha, m);
                    assert_eq!(count_points_raw(&model.values(), p), expected, "p={p} {s} class {rep}");
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 30, "{checked}");
}

#[test]
fn d8_worked_example() {
    // q = 13: 4 | q - 1, r = 2, b = r⁴ = 3, τ = 2 generates F_13^*
    let p = 13u32;
    let f = field(p);
    let (r, b, tau) = (2i64, 3u8, 2i64);
    let keyer = Keyer::new(&f);
    let mut larger = std::collections::HashSet::new();
    for s in Stratum::ALL.into_iter().filter(|s| s.order() > 8 || *s == Stratum::S3) {
        for c in enumerate_stratum(&f, s).unwrap() {
            larger.extend(keyer.key(&c.quartic.values()));
        }
    }
    let fam = families(&f, Stratum::D8).unwrap()[0];
    let a = (0..13u8)
        .find(|&a| keyer.key(&fam.coeffs_for(&[a, b])).is_some_and(|k| !larger.contains(&k)))
        .unwrap();
    let cand = FamilyCandidate { quartic: FpQuartic::from_values(fam.coeffs_for(&[a, b])), family: fam, params: vec![a, b] };
    let d = cand.aut().unwrap();
    assert_eq!(d.n(), 1);
    let g = AutGroup::from_descriptor(&d).unwrap();
    let twists = twists_of(&cand.quartic, &g, 5).unwrap();
    assert_eq!(twists.len(), 5);

    let k = &g.field;
    let t = Mat3::from_ints(k, [[1, 0, 0], [0, 0, r], [0, 7, 0]]); // 7 = 2⁻¹
    let t = t.normalize_projective(k);
    assert!(g.elements.contains(&t));
    let curve = lift(k, &cand.quartic);
    let lifted = canonical_lift(k, &curve, &t).unwrap();
    let cob = hilbert90(k, &lifted, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let ours = twisted_model(&cand.quartic, &cob).unwrap();

    let a = a as i64;
    let (r2, r4) = (r * r, r.pow(4));
    let mut c = [0i64; 15];
    c[0] = 1;
    c[3] = r;
    c[5] = -r * tau;
    c[10] = a * r2 + 2 * r4;
    c[12] = -2 * a * r2 * tau + 12 * r4 * tau;
    c[14] = a * r2 * tau * tau + 2 * r4 * tau * tau;
    let model = TernaryQuartic::from_ints(&f, c);

    assert_eq!(keyer.key(&model.values()), keyer.key(&cand.quartic.values()));
    assert_eq!(keyer.key(&ours.values()), keyer.key(&cand.quartic.values()));
    let k2 = ExtField::new(f, 2);
    let counts = |q: &FpQuartic| (q.count_points_fp(&f), lift(&k2, q).count_points(&k2));
    assert_eq!(counts(&ours), counts(&model));
    // the class of T appears among the computed twists
    assert!(twists.iter().any(|tw| counts(&tw.quartic) == counts(&model)));
}

#[test]
fn twist_rng_is_deterministic() {
    let f = field(11);
    let c = enumerate_stratum(&f, Stratum::G168).unwrap().next().unwrap();
    let d = c.aut().unwrap();
    let a = twists_from_descriptor(&c.quartic, &d, 42).unwrap();
    let b = twists_from_descriptor(&c.quartic, &d, 42).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 6);
}
