use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use qdb::census::{expected_classes, run_strata, CensusConfig, Database, StoreKind};
use qdb::families::{aut_generators, families, Stratum};
use qdb::gf::PrimeField;
use qdb::invariants::{dixmier_ohno, CanonicalKey, Keyer, NAMES};
use qdb::quartic::QuarticText;
use qdb::stats::{emit_csv, mean_normalized_trace, round_one_digit, verify_table2};
use qdb::twists::twists_from_descriptor;

#[derive(Parser)]
#[command(name = "qdb", version, about = "Isomorphism classes of plane quartics over F_p")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Store {
    OpenAddressing,
    Map,
}

#[derive(Subcommand)]
enum Command {
    /// Run the census and write the database.
    Enumerate {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (0: one per core).
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Bucket overhead of the open addressing store.
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Store::OpenAddressing)]
        store: Store,
        /// Comma-separated strata to visit instead of all of them.
        #[arg(long, value_delimiter = ',')]
        strata: Vec<Stratum>,
    },
    /// Print the record stored under a canonical key.
    Lookup {
        #[arg(long)]
        db: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        key: String,
    },
    /// Write the trace statistics CSV files.
    Stats {
        #[arg(long)]
        db: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Compare per-stratum counts with the closed formulas.
    Verify {
        #[arg(long)]
        db: PathBuf,
    },
    /// Canonical key of a quartic given as `p=<p>;c1,...,c15`.
    Key {
        #[arg(long)]
        curve: String,
    },
    /// Dixmier-Ohno invariants of a quartic given as `p=<p>;c1,...,c15`.
    Invariants {
        #[arg(long)]
        curve: String,
    },
    /// Twists of a member of a stratum's family.
    Twists {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        stratum: Stratum,
        /// Index of the family within the stratum.
        #[arg(long, default_value_t = 0)]
        family: usize,
        #[arg(long, value_delimiter = ',')]
        params: Vec<u8>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

type Res<T> = Result<T, Box<dyn std::error::Error>>;

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Res<ExitCode> {
    match cli.command {
        Command::Enumerate { p, out, threads, epsilon, seed, store, strata } => {
            let mut cfg = CensusConfig::new(p);
            cfg.threads = threads;
            cfg.epsilon = epsilon;
            cfg.seed = seed;
            cfg.strata = strata;
            cfg.store = match store {
                Store::OpenAddressing => StoreKind::OpenAddressing,
                Store::Map => StoreKind::Map,
            };
            PrimeField::new(p)?;
            let start = Instant::now();
            let db = run_strata(&cfg)?;
            db.write_path(&out)?;
            let expected = expected_classes(p);
            println!(
                "p={p}: {} classes, {} twists in {:.1?}; wrote {}",
                db.records.len(),
                db.twist_count(),
                start.elapsed(),
                out.display()
            );
            if db.records.len() as u64 != expected {
                eprintln!("incomplete census: {} of {expected} classes", db.records.len());
                return Ok(ExitCode::from(2));
            }
        }
        Command::Lookup { db, key } => {
            let db = Database::read_path(db)?;
            let key: CanonicalKey = key.parse()?;
            let rec = db.lookup(&key)?;
            println!("key {}", rec.key);
            println!("stratum {}", rec.stratum.token());
            println!("twists {}", rec.twists.len());
            for t in &rec.twists {
                let body: Vec<String> = t.coeffs.iter().map(u8::to_string).collect();
                println!("p={};{} points={} aut={}", db.p, body.join(","), t.points, t.aut_order);
            }
        }
        Command::Stats { db, out_dir } => {
            let db = Database::read_path(db)?;
            for path in emit_csv(&db, &out_dir)? {
                println!("wrote {}", path.display());
            }
            let m = mean_normalized_trace(&db);
            println!("mean normalized trace {:.6e} (~{})", m.value(), round_one_digit(m.value()));
        }
        Command::Verify { db } => {
            let db = Database::read_path(db)?;
            let report = verify_table2(&db);
            println!("p={}", report.p);
            println!("{:<6} {:>10} {:>10} {:>10} {:>10}", "group", "geom", "expected", "arith", "expected");
            for r in &report.rows {
                println!(
                    "{:<6} {:>10} {:>10} {:>10} {:>10} {}",
                    r.label(),
                    r.observed_geometric,
                    r.expected_geometric,
                    r.observed_arithmetic,
                    r.expected_arithmetic,
                    if r.matches() { "ok" } else { "MISMATCH" }
                );
            }
            if !report.all_match() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Key { curve } => {
            let q: QuarticText = curve.parse()?;
            match Keyer::new(&q.field).key(&q.quartic.values()) {
                Some(k) => println!("{k}"),
                None => return Err("the quartic is singular".into()),
            }
        }
        Command::Invariants { curve } => {
            let q: QuarticText = curve.parse()?;
            let inv = dixmier_ohno(&q.quartic, &q.field);
            for (name, v) in NAMES.iter().zip(inv.raw()) {
                println!("{name} {v}");
            }
        }
        Command::Twists { p, stratum, family, params, seed } => {
            let f = PrimeField::new(p)?;
            let fams = families(&f, stratum)?;
            let fam = fams
                .get(family)
                .ok_or_else(|| format!("{} has {} families", stratum.token(), fams.len()))?;
            if params.len() != fam.nparams() {
                return Err(format!("expected {} parameters, got {}", fam.nparams(), params.len()).into());
            }
            if let Some(&a) = params.iter().find(|&&a| a as u32 >= p) {
                return Err(format!("parameter {a} is not reduced mod {p}").into());
            }
            let coeffs = fam.coeffs_for(&params);
            if Keyer::new(&f).key(&coeffs).is_none() {
                return Err("the specialization is singular".into());
            }
            let d = aut_generators(fam, &params)?;
            let curve = qdb::quartic::FpQuartic::from_values(coeffs);
            for t in twists_from_descriptor(&curve, &d, seed)? {
                println!("{} points={} aut={}", t.quartic.to_text(&f), t.quartic.count_points_fp(&f), t.rational_aut);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
