use std::collections::HashSet;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qdb::census::*;
use qdb::families::{table2_expected, Stratum};
use qdb::gf::PrimeField;
use qdb::invariants::{CanonicalKey, Keyer};
use qdb::quartic::{models, TernaryQuartic};
use qdb::Error;

/// Expected number of overfull buckets, summing the Poisson pmf upwards
/// from zero with the multiplicative recurrence.
fn overflow_expectation(p: u32, capacity: u64) -> f64 {
    let lambda = p as f64;
    let mut pmf = (-lambda).exp();
    let mut cdf = pmf;
    for n in 1..=capacity {
        pmf *= lambda / n as f64;
        cdf += pmf;
    }
    let mut tail = 0.0;
    let mut n = capacity + 1;
    loop {
        pmf *= lambda / n as f64;
        tail += pmf;
        if pmf < 1e-30 {
            break;
        }
        n += 1;
    }
    assert!((cdf + tail - 1.0).abs() < 1e-9);
    lambda.powi(5) * tail
}

#[test]
fn epsilon_is_the_smallest_sufficient_overhead() {
    for p in [11u32, 13, 17, 53] {
        let eps = epsilon_for(p, 1e-3);
        let cap = ((1.0 + eps) * p as f64).round() as u64;
        assert!((cap as f64 - (1.0 + eps) * p as f64).abs() < 1e-9);
        assert!(overflow_expectation(p, cap) < 1e-3, "p={p}");
        assert!(overflow_expectation(p, cap - 1) >= 1e-3, "p={p}");
    }
    assert_eq!(epsilon_for(11, 1e-3), 24.0 / 11.0);
}

#[test]
fn epsilon_is_monotone_in_threshold() {
    let mut last = 0.0;
    for thr in [0.5, 1e-1, 1e-3, 1e-6, 1e-9] {
        let e = epsilon_for(13, thr);
        assert!(e >= last);
        last = e;
    }
}

#[test]
fn table_size_at_53() {
    let p = 53f64;
    let bytes = 8.0 * (1.0 + epsilon_for(53, 1e-3)) * p.powi(6);
    let gb = bytes / 1e9;
    assert!((gb - 340.0).abs() / 340.0 < 0.1, "{gb}");
}

fn random_key(rng: &mut impl Rng, p: u32) -> CanonicalKey {
    CanonicalKey(std::array::from_fn(|_| rng.gen_range(0..p) as u8))
}

#[test]
fn insert_if_absent_semantics() {
    let store = OpenAddressingStore::new(11, epsilon_for(11, 1e-3));
    assert_eq!(store.bucket_count(), 161_051);
    assert_eq!(store.bucket_capacity(), 35);
    assert_eq!(store.memory_bytes(), 8 * 35 * 161_051);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let k = random_key(&mut rng, 11);
    assert!(store.insert_if_absent(&k).unwrap());
    assert!(!store.insert_if_absent(&k).unwrap());
    assert_eq!(store.len(), 1);
}

/// A key whose bucket is `bucket` and whose last eight entries are `tail`.
fn key_in_bucket(store: &OpenAddressingStore, p: u32, bucket: u64, tail: [u8; 8]) -> CanonicalKey {
    let mut v = [0u8; 13];
    v[5..].copy_from_slice(&tail);
    let shift = store.bucket_of(&CanonicalKey(v));
    let mut b = bucket;
    let mut s = shift;
    for slot in v.iter_mut().take(5) {
        let want = b % p as u64;
        let have = s % p as u64;
        *slot = ((want + p as u64 - have) % p as u64) as u8;
        b /= p as u64;
        s /= p as u64;
    }
    let k = CanonicalKey(v);
    assert_eq!(store.bucket_of(&k), bucket);
    k
}

#[test]
fn same_bucket_keys_are_all_stored_until_full() {
    let p = 11;
    let store = OpenAddressingStore::new(p, 0.5);
    let cap = store.bucket_capacity();
    assert_eq!(cap, 17);
    for i in 0..cap {
        let tail = [1, 2, 3, 4, 5, 6, (i / 11) as u8, (i % 11) as u8];
        let k = key_in_bucket(&store, p, 777, tail);
        assert!(store.insert_if_absent(&k).unwrap());
        assert!(!store.insert_if_absent(&k).unwrap());
    }
    let extra = key_in_bucket(&store, p, 777, [9; 8]);
    assert!(matches!(store.insert_if_absent(&extra), Err(Error::BucketOverflow(17))));
    let other = key_in_bucket(&store, p, 778, [9; 8]);
    assert!(store.insert_if_absent(&other).unwrap());
    assert_eq!(store.max_load(), 17);
}

#[test]
fn bucket_address_is_a_bijection_given_the_tail() {
    let p = 13;
    let store = OpenAddressingStore::new(p, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let k = random_key(&mut rng, p);
        let tail: [u8; 8] = k.0[5..].try_into().unwrap();
        assert_eq!(key_in_bucket(&store, p, store.bucket_of(&k), tail), k);
    }
}

#[test]
fn stores_agree_and_tolerate_concurrency() {
    let p = 13;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let keys: Vec<CanonicalKey> = (0..20_000).map(|_| random_key(&mut rng, p)).collect();
    let distinct: HashSet<CanonicalKey> = keys.iter().copied().collect();
    let open = OpenAddressingStore::new(p, 1.0);
    let map = MapStore::new();
    let wins: Vec<u64> = std::thread::scope(|s| {
        let hs: Vec<_> = (0..4)
            .map(|t| {
                let (open, map, keys) = (&open, &map, &keys);
                s.spawn(move || {
                    let mut won = 0;
                    for k in keys.iter().skip(t * 1000).chain(keys.iter()) {
                        if open.insert_if_absent(k).unwrap() {
                            won += 1;
                        }
                        map.insert_if_absent(k).unwrap();
                    }
                    won
                })
            })
            .collect();
        hs.into_iter().map(|h| h.join().unwrap()).collect()
    });
    assert_eq!(wins.iter().sum::<u64>(), distinct.len() as u64);
    assert_eq!(open.len(), distinct.len() as u64);
    assert_eq!(map.len(), distinct.len() as u64);
}

fn small_strata() -> Vec<Stratum> {
    Stratum::ALL.into_iter().filter(|s| *s != Stratum::Trivial).collect()
}

fn sub_census(p: u32) -> &'static Database {
    static DB11: OnceLock<Database> = OnceLock::new();
    static DB13: OnceLock<Database> = OnceLock::new();
    let cell = if p == 11 { &DB11 } else { &DB13 };
    cell.get_or_init(|| {
        let mut cfg = CensusConfig::new(p);
        cfg.strata = small_strata();
        run_strata(&cfg).unwrap()
    })
}

#[test]
fn non_generic_strata_match_table2() {
    for p in [11, 13] {
        let db = sub_census(p);
        let expected = table2_expected(p);
        for (s, g, a) in db.stratum_counts() {
            if s == Stratum::Trivial {
                assert_eq!((g, a), (0, 0));
                continue;
            }
            let row = expected.iter().find(|r| r.stratum == Some(s)).unwrap();
            assert_eq!((g, a), (row.geometric, row.arithmetic), "p={p} {s}");
        }
    }
}

#[test]
fn records_are_sorted_and_consistent() {
    let db = sub_census(13);
    let f = PrimeField::new(13).unwrap();
    let keyer = Keyer::new(&f);
    assert!(db.records.windows(2).all(|w| w[0].key < w[1].key));
    for r in db.records.iter().step_by(97) {
        assert!(!r.twists.is_empty());
        for t in &r.twists {
            assert_eq!(keyer.key(&t.coeffs), Some(r.key));
            assert_eq!(t.points as u64, qdb::quartic::count_points_raw(&t.coeffs, 13));
            assert_eq!(r.stratum.order() % t.aut_order as usize, 0);
        }
    }
}

#[test]
fn lookup_by_key() {
    let db = sub_census(13);
    let f = PrimeField::new(13).unwrap();
    let keyer = Keyer::new(&f);
    let fermat = keyer.key(&TernaryQuartic::from_ints(&f, models::FERMAT).values()).unwrap();
    let rec = db.lookup(&fermat).unwrap();
    assert_eq!(rec.stratum, Stratum::G96);
    assert_eq!(rec.twists.len(), 10);
    let mut absent = fermat;
    while db.lookup(&absent).is_ok() {
        absent.0[12] = (absent.0[12] + 1) % 13;
    }
    assert!(matches!(db.lookup(&absent), Err(Error::KeyNotFound)));
}

#[test]
fn database_round_trip() {
    let db = sub_census(11);
    let bytes = db.to_bytes();
    assert_eq!(&bytes[..4], b"QDB3");
    assert_eq!(bytes[5], 11);
    assert_eq!(u64::from_le_bytes(bytes[6..14].try_into().unwrap()), db.records.len() as u64);
    let back = Database::from_bytes(&bytes).unwrap();
    assert_eq!(&back, db);
    assert_eq!(back.to_bytes(), bytes);

    let dir = std::env::temp_dir().join(format!("qdb-census-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sub11.qdb");
    db.write_path(&path).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), bytes);
    assert_eq!(&Database::read_path(&path).unwrap(), db);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn malformed_databases_are_rejected() {
    let bytes = sub_census(11).to_bytes();
    let mut bad_magic = bytes.clone();
    bad_magic[0] = b'X';
    let mut bad_version = bytes.clone();
    bad_version[4] = 99;
    let mut bad_p = bytes.clone();
    bad_p[5] = 12;
    let truncated = bytes[..bytes.len() - 3].to_vec();
    let mut trailing = bytes.clone();
    trailing.push(0);
    let mut bad_stratum = bytes.clone();
    bad_stratum[14 + 13] = 40;
    for b in [bad_magic, bad_version, bad_p, truncated, trailing, bad_stratum, Vec::new()] {
        assert!(matches!(Database::from_bytes(&b), Err(Error::MalformedDb(_))));
    }
}

#[test]
fn dimension_two_runs_are_deterministic() {
    let run = |threads| {
        let mut cfg = CensusConfig::new(11);
        cfg.strata = Stratum::ALL.into_iter().filter(|s| s.dim() <= 2).collect();
        cfg.threads = threads;
        cfg.seed = 17;
        run_strata(&cfg).unwrap().to_bytes()
    };
    let a = run(1);
    assert_eq!(a, run(1));
    assert_eq!(a, run(3));
}

#[test]
fn map_store_gives_the_same_database() {
    let mut cfg = CensusConfig::new(13);
    cfg.strata = Stratum::ALL.into_iter().filter(|s| s.dim() <= 2).collect();
    let open = run_strata(&cfg).unwrap();
    cfg.store = StoreKind::Map;
    assert_eq!(run_strata(&cfg).unwrap(), open);
}

#[test]
fn partial_census_is_reported_incomplete() {
    let mut cfg = CensusConfig::new(11);
    cfg.strata = vec![Stratum::G168, Stratum::C9];
    match run_census(&cfg) {
        Err(Error::IncompleteCensus { found, expected }) => {
            assert_eq!(found, 2);
            assert_eq!(expected, 1_771_562);
        }
        other => panic!("{other:?}"),
    }
}
