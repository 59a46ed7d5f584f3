use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use tqd_core::db::{self, Database, GenerateOptions};
use tqd_core::equivalence::{classify, st_equivalent, t_equivalent};
use tqd_core::modular::{verify_modular, ModularData, Strategy};
use tqd_core::{Cocycle3, CohomologyError, DbError, GroupError, ModularError, ProjRepError};

#[derive(Parser)]
#[command(name = "tqd", version, about = "Modular data of twisted Drinfeld doubles of small finite groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Slow {
    /// Allow orders above the soft cap (up to 12).
    #[arg(long)]
    allow_slow: bool,
}

#[derive(Subcommand)]
enum Command {
    /// H³(G, C^×) and its Aut(G)-orbit representatives.
    Cohomology {
        /// Group spec such as C4, C2xC2, D4, Q8, S3, or @table.json.
        #[arg(long, short)]
        group: String,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        slow: Slow,
    },
    /// Modular data of one cocycle class.
    Generate {
        #[arg(long, short)]
        group: String,
        /// Orbit index from `tqd cohomology`, or @cocycle.json.
        #[arg(long, short, default_value = "0")]
        class: String,
        #[arg(long, default_value = "auto")]
        strategy: Strategy,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Write even if verification fails.
        #[arg(long)]
        force: bool,
        #[command(flatten)]
        slow: Slow,
    },
    /// Every catalog group up to the given order.
    GenerateAll {
        #[arg(long, default_value_t = db::DEFAULT_MAX_ORDER)]
        max_order: usize,
        #[arg(long, short)]
        out: PathBuf,
        #[arg(long, short, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value = "auto")]
        strategy: Strategy,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        slow: Slow,
    },
    /// Verify the modular data axioms of a data file.
    Check {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Decide whether two data files agree up to a simultaneous permutation.
    Equiv {
        a: PathBuf,
        b: PathBuf,
        /// Compare the T multisets only.
        #[arg(long)]
        t_only: bool,
        #[arg(long)]
        json: bool,
    },
    /// Class counts per order and rank for a database.
    Classify {
        db: PathBuf,
        #[arg(long)]
        json: bool,
        /// Also count classes up to Galois conjugation.
        #[arg(long)]
        modulo_galois: bool,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

const INVALID: u8 = 2;
const VERIFICATION: u8 = 3;
const BOUND: u8 = 4;

fn group_code(e: &GroupError) -> u8 {
    match e {
        GroupError::OrderBoundExceeded { .. } => BOUND,
        _ => INVALID,
    }
}

fn cohomology_code(e: &CohomologyError) -> u8 {
    match e {
        CohomologyError::Group(g) => group_code(g),
        _ => INVALID,
    }
}

fn modular_code(e: &ModularError) -> u8 {
    match e {
        ModularError::Group(g) => group_code(g),
        ModularError::Cohomology(c) | ModularError::ProjRep(ProjRepError::Cohomology(c)) => cohomology_code(c),
        ModularError::ProjRep(ProjRepError::OrderBoundExceeded { .. }) => BOUND,
        ModularError::NonIntegralFusion { .. } | ModularError::PlacementContradiction => VERIFICATION,
        _ => INVALID,
    }
}

impl From<DbError> for Failure {
    fn from(e: DbError) -> Self {
        let code = match &e {
            DbError::OrderBoundExceeded { .. } => BOUND,
            DbError::Verification { .. } | DbError::JobsFailed(_) => VERIFICATION,
            DbError::Group(g) => group_code(g),
            DbError::Cohomology(c) => cohomology_code(c),
            DbError::Modular(m) => modular_code(m),
            _ => INVALID,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<CohomologyError> for Failure {
    fn from(e: CohomologyError) -> Self {
        Failure::new(cohomology_code(&e), e.to_string())
    }
}

impl From<ModularError> for Failure {
    fn from(e: ModularError) -> Self {
        Failure::new(modular_code(&e), e.to_string())
    }
}

// A closed pipe (`tqd generate ... | head`) is not an error worth a panic.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
}

fn print_json(v: &impl serde::Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(v).map_err(|e| Failure::new(INVALID, e.to_string()))?;
    emit(&text);
    Ok(())
}

fn cmd_cohomology(spec: &str, as_json: bool, slow: Slow) -> Result<(), Failure> {
    let g = db::load_group(spec, slow.allow_slow)?;
    let (classes, orbits) = db::group_orbits(&g, slow.allow_slow)?;
    if as_json {
        let orbits: Vec<_> = orbits
            .iter()
            .enumerate()
            .map(|(i, o)| json!({"index": i, "class_vector": o.representative, "L": o.cocycle.l(), "size": o.members.len()}))
            .collect();
        return print_json(&json!({
            "group": g.name(),
            "order": g.order(),
            "torsion": classes.torsion(),
            "class_count": classes.count(),
            "orbits": orbits,
        }));
    }
    println!("group {} of order {}", g.name(), g.order());
    let torsion: Vec<String> = classes.torsion().iter().map(|d| format!("Z{d}")).collect();
    let shape = if torsion.is_empty() { "0".to_string() } else { torsion.join(" x ") };
    println!("H^3(G, C^x) = {shape} ({} classes)", classes.count());
    println!("{} Aut(G)-orbits:", orbits.len());
    for (i, o) in orbits.iter().enumerate() {
        println!("  {i:>3}  {:?}  L = {}  orbit size {}", o.representative, o.cocycle.l(), o.members.len());
    }
    Ok(())
}

fn select_cocycle(g: &Arc<tqd_core::FiniteGroup>, selector: &str, slow: Slow) -> Result<(Cocycle3, Vec<u64>), Failure> {
    let (classes, orbits) = db::group_orbits(g, slow.allow_slow)?;
    if let Some(path) = selector.strip_prefix('@') {
        let omega = Cocycle3::load(Path::new(path), g.clone())?;
        let v = classes.identify(&omega)?;
        return Ok((omega, v));
    }
    let index: usize = selector
        .parse()
        .map_err(|_| Failure::new(INVALID, format!("class selector `{selector}` is neither an orbit index nor @file")))?;
    let o = orbits
        .get(index)
        .ok_or_else(|| Failure::from(DbError::ClassOutOfRange { index, count: orbits.len() }))?;
    Ok((o.cocycle.clone(), o.representative.clone()))
}

#[allow(clippy::too_many_arguments)]
fn cmd_generate(
    spec: &str,
    selector: &str,
    strategy: Strategy,
    seed: u64,
    out: Option<&Path>,
    force: bool,
    slow: Slow,
) -> Result<(), Failure> {
    let g = Arc::new(db::load_group(spec, slow.allow_slow)?);
    let (omega, vector) = select_cocycle(&g, selector, slow)?;
    let md = ModularData::compute(&omega, vector, strategy, seed)?;
    let report = verify_modular(&md);
    let failed = report.first_failure().map(|c| format!("verification failed: {} at {}", c.name, c.witness.as_deref().unwrap_or("?")));
    if let (Some(msg), false) = (&failed, force) {
        return Err(Failure::new(VERIFICATION, format!("{msg}; not written (use --force)")));
    }
    match out {
        Some(path) => {
            db::write_json_atomic(path, &md)?;
            eprintln!("wrote {} (rank {}, group {}, class {:?})", path.display(), md.rank, md.group, md.class_vector);
        }
        None => emit(&serde_json::to_string(&md).map_err(|e| Failure::new(INVALID, e.to_string()))?),
    }
    match failed {
        Some(msg) => Err(Failure::new(VERIFICATION, msg)),
        None => Ok(()),
    }
}

fn cmd_generate_all(max_order: usize, out: &Path, jobs: usize, strategy: Strategy, seed: u64, slow: Slow) -> Result<(), Failure> {
    let opts = GenerateOptions { strategy, seed, jobs, allow_slow: slow.allow_slow };
    let summary = Database::new(out).generate_all(max_order, &opts)?;
    println!("{} groups, {} files written to {}", summary.groups, summary.files, out.display());
    Ok(())
}

fn cmd_check(file: &Path, as_json: bool) -> Result<(), Failure> {
    let md = db::read_dataset(file)?;
    let report = verify_modular(&md);
    if as_json {
        print_json(&json!({"file": file.display().to_string(), "passed": report.all_passed(), "checks": report.checks}))?;
    } else {
        println!("{} ({} rank {}, class {:?})", file.display(), md.group, md.rank, md.class_vector);
        print!("{report}");
    }
    match report.first_failure() {
        None => Ok(()),
        Some(c) => Err(Failure::new(
            VERIFICATION,
            format!("check {} failed at {}", c.name, c.witness.as_deref().unwrap_or("?")),
        )),
    }
}

fn cmd_equiv(a: &Path, b: &Path, t_only: bool, as_json: bool) -> Result<(), Failure> {
    let (x, y) = (db::read_dataset(a)?, db::read_dataset(b)?);
    let mismatch = |e: tqd_core::EquivalenceError| Failure::new(INVALID, e.to_string());
    if x.rank != y.rank {
        return report_equiv(as_json, t_only, false, None);
    }
    if t_only {
        let same = t_equivalent(&x.t, &y.t).map_err(mismatch)?;
        return report_equiv(as_json, true, same, None);
    }
    let w = st_equivalent(&x.s, &x.t, &y.s, &y.t).map_err(mismatch)?;
    report_equiv(as_json, false, w.is_some(), w.map(|w| w.perm))
}

fn report_equiv(as_json: bool, t_only: bool, equivalent: bool, perm: Option<Vec<usize>>) -> Result<(), Failure> {
    if as_json {
        return print_json(&json!({"mode": if t_only { "t" } else { "st" }, "equivalent": equivalent, "perm": perm}));
    }
    match (equivalent, perm) {
        (true, Some(p)) => println!("equivalent, permutation {p:?}"),
        (true, None) => println!("equivalent"),
        (false, _) => println!("inequivalent"),
    }
    Ok(())
}

fn cmd_classify(root: &Path, as_json: bool, modulo_galois: bool) -> Result<(), Failure> {
    if !root.is_dir() {
        return Err(Failure::new(INVALID, format!("{} is not a directory", root.display())));
    }
    let data = Database::new(root).load_all()?;
    let report = classify(&data, modulo_galois);
    if as_json {
        return print_json(&report.summaries());
    }
    print!("{report}");
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Cohomology { group, json, slow } => cmd_cohomology(&group, json, slow),
        Command::Generate { group, class, strategy, seed, out, force, slow } => {
            cmd_generate(&group, &class, strategy, seed, out.as_deref(), force, slow)
        }
        Command::GenerateAll { max_order, out, jobs, strategy, seed, slow } => {
            cmd_generate_all(max_order, &out, jobs, strategy, seed, slow)
        }
        Command::Check { file, json } => cmd_check(&file, json),
        Command::Equiv { a, b, t_only, json } => cmd_equiv(&a, &b, t_only, json),
        Command::Classify { db, json, modulo_galois } => cmd_classify(&db, json, modulo_galois),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { INVALID } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
