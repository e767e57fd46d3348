//! Algorithm 1: walk the strata from the largest automorphism group down,
//! keep the first family member with each invariant key, and attach its
//! twists and point counts.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use rayon::prelude::*;

use crate::families::{exceptional_curves, families, Family, Stratum};
use crate::gf::PrimeField;
use crate::invariants::{CanonicalKey, Keyer};
use crate::quartic::count_points_raw;
use crate::twists::twists_from_descriptor;
use crate::{Error, Result};

pub const MAGIC: &[u8; 4] = b"QDB3";
pub const FORMAT_VERSION: u8 = 1;
const CHUNK: u64 = 1 << 14;

/// Number of `F̄_p`-isomorphism classes of smooth plane quartics.
pub fn expected_classes(p: u32) -> u64 {
    (p as u64).pow(6) + 1
}

/// Insert-if-absent set of canonical keys.
pub trait KeyStore: Send + Sync {
    /// True iff the key was absent and is now present.
    fn insert_if_absent(&self, key: &CanonicalKey) -> Result<bool>;
    fn len(&self) -> u64;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Smallest `ε` for which the expected number of overfull buckets, with
/// `p⁵` buckets of `(1+ε)p` slots and Poisson(`p`) occupancy, is below
/// `threshold`. The returned `ε` makes `(1+ε)p` an integer.
pub fn epsilon_for(p: u32, threshold: f64) -> f64 {
    assert!(threshold > 0.0 && threshold < 1.0);
    let lambda = p as f64;
    let buckets = lambda.powi(5);
    let ln_pmf = |n: u64| -lambda + n as f64 * lambda.ln() - ln_factorial(n);
    let tail = |c: u64| {
        let mut s = 0.0;
        let mut n = c + 1;
        loop {
            let t = ln_pmf(n).exp();
            s += t;
            if t < s * 1e-17 || (n as f64 > 4.0 * lambda && t == 0.0) {
                return s;
            }
            n += 1;
        }
    };
    let mut c = p as u64 + 1;
    while buckets * tail(c) >= threshold {
        c += 1;
    }
    c as f64 / lambda - 1.0
}

fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Open-addressing table: `p⁵` buckets of equal size, each slot
/// holding the last eight invariants of a key.
pub struct OpenAddressingStore {
    p: u64,
    capacity: usize,
    slots: Vec<AtomicU64>,
    len: AtomicU64,
}

impl OpenAddressingStore {
    pub fn new(p: u32, epsilon: f64) -> OpenAddressingStore {
        assert!(epsilon > 0.0);
        let capacity = ((1.0 + epsilon) * p as f64 - 1e-9).ceil() as usize;
        let buckets = (p as u64).pow(5) as usize;
        let slots = (0..buckets * capacity).map(|_| AtomicU64::new(0)).collect();
        OpenAddressingStore { p: p as u64, capacity, slots, len: AtomicU64::new(0) }
    }

    pub fn bucket_count(&self) -> u64 {
        self.p.pow(5)
    }

    pub fn bucket_capacity(&self) -> usize {
        self.capacity
    }

    pub fn memory_bytes(&self) -> u64 {
        8 * self.slots.len() as u64
    }

    /// Bucket index from the first five invariants, each shifted by a fixed
    /// combination of the last eight. The map is invertible given the slot
    /// contents, so bucket and slot still determine the key.
    pub fn bucket_of(&self, key: &CanonicalKey) -> u64 {
        let p = self.p;
        let v = &key.0;
        let mut addr = 0;
        for k in (0..5).rev() {
            let mut a = v[k] as u64;
            let mut c = 1;
            for &x in &v[5..] {
                a += c * x as u64;
                c = c * (k as u64 + 1) % p;
            }
            addr = addr * p + a % p;
        }
        addr
    }

    fn tail(key: &CanonicalKey) -> u64 {
        // +1 keeps every stored word nonzero
        key.0[5..].iter().rev().fold(0, |acc, &x| (acc << 8) | (x as u64 + 1))
    }

    /// Largest number of occupied slots in any bucket.
    pub fn max_load(&self) -> usize {
        self.slots
            .chunks(self.capacity)
            .map(|b| b.iter().filter(|s| s.load(Ordering::Relaxed) != 0).count())
            .max()
            .unwrap_or(0)
    }
}

impl KeyStore for OpenAddressingStore {
    fn insert_if_absent(&self, key: &CanonicalKey) -> Result<bool> {
        let tail = Self::tail(key);
        let base = self.bucket_of(key) as usize * self.capacity;
        for slot in &self.slots[base..base + self.capacity] {
            match slot.compare_exchange(0, tail, Ordering::AcqRel, Ordering::Acquire) {
                Ok(_) => {
                    self.len.fetch_add(1, Ordering::Relaxed);
                    return Ok(true);
                }
                Err(cur) if cur == tail => return Ok(false),
                Err(_) => {}
            }
        }
        Err(Error::BucketOverflow(self.capacity))
    }

    fn len(&self) -> u64 {
        self.len.load(Ordering::Relaxed)
    }
}

#[derive(Default)]
pub struct MapStore(Mutex<HashSet<CanonicalKey>>);

impl MapStore {
    pub fn new() -> MapStore {
        MapStore::default()
    }
}

impl KeyStore for MapStore {
    fn insert_if_absent(&self, key: &CanonicalKey) -> Result<bool> {
        Ok(self.0.lock().unwrap().insert(*key))
    }

    fn len(&self) -> u64 {
        self.0.lock().unwrap().len() as u64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum StoreKind {
    #[default]
    OpenAddressing,
    Map,
}

#[derive(Clone, Debug)]
pub struct CensusConfig {
    pub p: u32,
    /// Bucket overhead; `None` picks [`epsilon_for`] at `10⁻³`.
    pub epsilon: Option<f64>,
    /// Worker threads; 0 means rayon's default.
    pub threads: usize,
    pub seed: u64,
    pub store: StoreKind,
    /// Strata to visit, in census order. Empty means all of them.
    pub strata: Vec<Stratum>,
}

impl CensusConfig {
    pub fn new(p: u32) -> CensusConfig {
        CensusConfig { p, epsilon: None, threads: 0, seed: 0, store: StoreKind::default(), strata: Vec::new() }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon.unwrap_or_else(|| epsilon_for(self.p, 1e-3))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TwistRecord {
    pub coeffs: [u8; 15],
    pub points: u16,
    /// Order of the automorphism group over `F_p`.
    pub aut_order: u8,
}

impl TwistRecord {
    pub fn trace(&self, p: u32) -> i64 {
        p as i64 + 1 - self.points as i64
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusRecord {
    pub key: CanonicalKey,
    pub stratum: Stratum,
    pub twists: Vec<TwistRecord>,
}

/// A census: records sorted by canonical key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Database {
    pub p: u32,
    pub records: Vec<CensusRecord>,
}

pub fn run_census(config: &CensusConfig) -> Result<Database> {
    let db = run_strata(config)?;
    let expected = expected_classes(config.p);
    if db.records.len() as u64 != expected {
        return Err(Error::IncompleteCensus { found: db.records.len() as u64, expected });
    }
    Ok(db)
}

/// Runs the configured strata without requiring the result to be complete.
pub fn run_strata(config: &CensusConfig) -> Result<Database> {
    let field = PrimeField::new(config.p)?;
    let store: Box<dyn KeyStore> = match config.store {
        StoreKind::OpenAddressing => Box::new(OpenAddressingStore::new(config.p, config.epsilon())),
        StoreKind::Map => Box::new(MapStore::new()),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|_| Error::Internal("cannot start worker pool"))?;
    let strata = if config.strata.is_empty() { Stratum::ALL.to_vec() } else { config.strata.clone() };
    let mut sources = Vec::new();
    for s in strata {
        if s == Stratum::Trivial {
            sources.extend(exceptional_curves(&field).into_iter().map(|c| c.family));
        }
        sources.extend(families(&field, s)?);
    }
    let target = expected_classes(config.p);
    let keyer = Keyer::new(&field);
    let mut records = Vec::new();
    pool.install(|| -> Result<()> {
        for fam in &sources {
            let mut start = 0;
            while start < fam.len() {
                if store.len() >= target {
                    return Ok(());
                }
                let end = (start + CHUNK).min(fam.len());
                let keys: Vec<Option<CanonicalKey>> =
                    (start..end).into_par_iter().map(|i| keyer.key(&fam.raw(i))).collect();
                let mut fresh = Vec::new();
                for (i, key) in (start..end).zip(keys) {
                    let Some(key) = key else { continue };
                    if store.insert_if_absent(&key)? {
                        fresh.push((i, key, config.seed ^ (records.len() + fresh.len()) as u64));
                        if store.len() >= target {
                            break;
                        }
                    }
                }
                let made: Vec<CensusRecord> = fresh
                    .into_par_iter()
                    .map(|(i, key, seed)| make_record(fam, i, key, seed))
                    .collect::<Result<_>>()?;
                records.extend(made);
                start = end;
            }
        }
        Ok(())
    })?;
    records.sort_by(|a, b| a.key.cmp(&b.key));
    Ok(Database { p: config.p, records })
}

fn make_record(fam: &Family, index: u64, key: CanonicalKey, seed: u64) -> Result<CensusRecord> {
    let cand = fam.candidate(index);
    let aut = cand.aut()?;
    let twists = twists_from_descriptor(&cand.quartic, &aut, seed)?
        .into_iter()
        .map(|t| {
            let coeffs = t.quartic.values();
            TwistRecord {
                coeffs,
                points: count_points_raw(&coeffs, fam.p()) as u16,
                aut_order: t.rational_aut as u8,
            }
        })
        .collect();
    Ok(CensusRecord { key, stratum: fam.stratum, twists })
}

impl Database {
    pub fn twist_count(&self) -> u64 {
        self.records.iter().map(|r| r.twists.len() as u64).sum()
    }

    pub fn lookup(&self, key: &CanonicalKey) -> Result<&CensusRecord> {
        self.records
            .binary_search_by(|r| r.key.cmp(key))
            .map(|i| &self.records[i])
            .map_err(|_| Error::KeyNotFound)
    }

    /// Records and twists per stratum, in census order.
    pub fn stratum_counts(&self) -> Vec<(Stratum, u64, u64)> {
        let mut out: Vec<(Stratum, u64, u64)> = Stratum::ALL.iter().map(|&s| (s, 0, 0)).collect();
        for r in &self.records {
            let row = &mut out[r.stratum.id() as usize];
            row.1 += 1;
            row.2 += r.twists.len() as u64;
        }
        out
    }

    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&[FORMAT_VERSION, self.p as u8])?;
        w.write_all(&(self.records.len() as u64).to_le_bytes())?;
        for r in &self.records {
            w.write_all(&r.key.0)?;
            w.write_all(&[r.stratum.id(), r.twists.len() as u8])?;
            for t in &r.twists {
                w.write_all(&t.coeffs)?;
                w.write_all(&t.points.to_le_bytes())?;
                w.write_all(&[t.aut_order])?;
            }
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_to(&mut out).expect("writing to memory");
        out
    }

    pub fn write_path(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Database> {
        let mut buf = Vec::new();
        r.read_to_end(&mut buf)?;
        Database::from_bytes(&buf)
    }

    pub fn read_path(path: impl AsRef<Path>) -> Result<Database> {
        Database::read_from(&mut BufReader::new(File::open(path)?))
    }

    pub fn from_bytes(buf: &[u8]) -> Result<Database> {
        let bad = |m: &str| Error::MalformedDb(m.to_string());
        if buf.len() < 14 || &buf[..4] != MAGIC {
            return Err(bad("missing header"));
        }
        if buf[4] != FORMAT_VERSION {
            return Err(bad("unknown format version"));
        }
        let p = buf[5] as u32;
        PrimeField::new(p).map_err(|_| bad("invalid characteristic"))?;
        let n = u64::from_le_bytes(buf[6..14].try_into().unwrap());
        let mut pos = 14;
        let mut take = |k: usize| -> Result<&[u8]> {
            let s = buf.get(pos..pos + k).ok_or_else(|| bad("truncated record"))?;
            pos += k;
            Ok(s)
        };
        let mut records = Vec::with_capacity(n.min(1 << 24) as usize);
        for _ in 0..n {
            let key = CanonicalKey(take(13)?.try_into().unwrap());
            if key.0.iter().any(|&v| v as u32 >= p) {
                return Err(bad("key entry out of range"));
            }
            let head = take(2)?;
            let stratum = Stratum::from_id(head[0]).ok_or_else(|| bad("unknown stratum"))?;
            let nt = head[1] as usize;
            if nt == 0 {
                return Err(bad("record without twists"));
            }
            let mut twists = Vec::with_capacity(nt);
            for _ in 0..nt {
                let t = take(18)?;
                twists.push(TwistRecord {
                    coeffs: t[..15].try_into().unwrap(),
                    points: u16::from_le_bytes([t[15], t[16]]),
                    aut_order: t[17],
                });
            }
            records.push(CensusRecord { key, stratum, twists });
        }
        if take(1).is_ok() {
            return Err(bad("trailing bytes"));
        }
        if records.windows(2).any(|w| w[0].key >= w[1].key) {
            return Err(bad("records not sorted by key"));
        }
        Ok(Database { p, records })
    }
}
