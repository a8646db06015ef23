use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use vkm_core::derive::{
    check_certificate, default_manifest, parse_certificate, parse_manifest, run_lemma_manifest, search,
    write_certificate, BoundHit, Bounds, DerivationProblem, ManifestReport, SearchOutcome,
};
use vkm_core::invariants::{generator_ids, random_corpus, random_diagram};
use vkm_core::moves::{enumerate_with, Quotient};
use vkm_core::{
    audit_invariance, canonicalize, catalog, find_matches, parse_tdf, serialize_tdf, Catalog, Direction, Invariant,
    MoveFamily, MoveId, TangleDiagram, TdfError,
};

const MAP_ENV: &str = "VKM_MOVES_MAP";

#[derive(Parser)]
#[command(name = "vkm", version, about = "Oriented virtual knot moves: rewriting, derivation search and audits")]
struct Cli {
    /// Print reports as JSON.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the oriented variants of each move family.
    Enumerate {
        #[arg(long)]
        family: Option<MoveFamily>,
        #[arg(long, value_enum, default_value_t = QuotientArg::HalfTurn)]
        quotient: QuotientArg,
    },
    /// List the labeled catalog with canonical codes.
    Catalog {
        /// Print the catalog in moves.map format instead.
        #[arg(long)]
        map: bool,
    },
    /// Parse and validate a diagram file.
    Validate { file: PathBuf },
    /// Print a diagram's canonical code.
    Canon {
        file: PathBuf,
        /// Print the canonical text form instead of the code.
        #[arg(long)]
        tdf: bool,
    },
    /// List the sites where a move applies.
    Matches {
        file: PathBuf,
        #[command(flatten)]
        mv: MoveArgs,
    },
    /// Apply a move at a site.
    Apply {
        file: PathBuf,
        #[command(flatten)]
        mv: MoveArgs,
        #[arg(long)]
        site: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Search for a derivation certificate.
    Derive(DeriveArgs),
    /// Replay and check a certificate.
    Check {
        #[arg(long)]
        cert: PathBuf,
    },
    /// Audit an invariant over a random corpus.
    Audit {
        #[arg(long, default_value = "odd-writhe")]
        invariant: String,
        /// `all`, `generators`, or a comma-separated list of move ids.
        #[arg(long, default_value = "all")]
        moves: String,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 30)]
        steps: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Include every checked row in JSON output, not just violations.
        #[arg(long)]
        rows: bool,
    },
    /// Generate a random knot diagram.
    Random {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 30)]
        steps: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum QuotientArg {
    HalfTurn,
    AllRotations,
}

#[derive(Args)]
struct MoveArgs {
    #[arg(long = "move")]
    id: MoveId,
    #[arg(long, default_value = "fwd")]
    dir: Direction,
}

#[derive(Args)]
struct DeriveArgs {
    #[arg(long, conflicts_with = "manifest", required_unless_present = "manifest")]
    target: Option<MoveId>,
    /// Comma-separated move ids.
    #[arg(long, value_delimiter = ',', requires = "target")]
    allow: Vec<MoveId>,
    #[arg(long)]
    max_crossings: Option<usize>,
    #[arg(long)]
    max_depth: Option<usize>,
    /// Write the certificate here (single target only).
    #[arg(long, requires = "target")]
    cert: Option<PathBuf>,
    /// A manifest file, or `default` for the built-in lemma table.
    #[arg(long)]
    manifest: Option<String>,
    /// Write one certificate per found manifest row into this directory.
    #[arg(long, requires = "manifest")]
    cert_dir: Option<PathBuf>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Failed(_) => 2,
        }
    }
}

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

type CliResult = Result<(), CliError>;

fn load_catalog() -> Result<Catalog, CliError> {
    match std::env::var_os(MAP_ENV) {
        None => Ok(catalog().clone()),
        Some(path) => {
            let text = fs::read_to_string(&path)
                .map_err(|e| usage(format!("{MAP_ENV}={}: {e}", Path::new(&path).display())))?;
            Catalog::from_map(&text).map_err(usage)
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_diagram(path: &Path) -> Result<TangleDiagram, CliError> {
    parse_tdf(&read(path)?).map_err(|e| match e {
        TdfError::Validation(_) => CliError::Failed(format!("{}: {e}", path.display())),
        TdfError::Syntax { .. } => usage(format!("{}: {e}", path.display())),
    })
}

fn write_out(output: Option<&Path>, text: &str) -> CliResult {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn print_json(v: &impl serde::Serialize) {
    println!("{}", serde_json::to_string_pretty(v).expect("reports serialize"));
}

fn code(d: &TangleDiagram) -> String {
    canonicalize(d).map(|c| c.0).unwrap_or_else(|e| format!("<{e}>"))
}

fn enumerate(cli_json: bool, family: Option<MoveFamily>, quotient: QuotientArg) -> CliResult {
    let cat = load_catalog()?;
    let quotient = match quotient {
        QuotientArg::HalfTurn => Quotient::HalfTurn,
        QuotientArg::AllRotations => Quotient::AllRotations,
    };
    let families: Vec<MoveFamily> = family.map_or(MoveFamily::ALL.to_vec(), |f| vec![f]);
    let label = |lhs: &str, rhs: &str| -> Option<String> {
        cat.schemas().iter().find_map(|s| {
            let (a, b) = (code(&s.lhs), code(&s.rhs));
            ((a == lhs && b == rhs) || (a == rhs && b == lhs)).then(|| s.id.to_string())
        })
    };
    let mut out = Vec::new();
    let (mut virt, mut classical) = (0, 0);
    for f in families {
        let vs = enumerate_with(f, quotient);
        if f.is_virtual() {
            virt += vs.len();
        } else {
            classical += vs.len();
        }
        let variants: Vec<Value> = vs
            .iter()
            .map(|v| {
                let (l, r) = (v.lhs_code.to_string(), v.rhs_code.to_string());
                json!({ "label": label(&l, &r), "lhs": l, "rhs": r })
            })
            .collect();
        out.push(json!({ "family": f.to_string(), "count": vs.len(), "variants": variants }));
    }
    if cli_json {
        print_json(&json!({ "families": out, "virtual_total": virt, "classical_total": classical }));
        return Ok(());
    }
    for f in &out {
        println!("{} {}", f["family"].as_str().unwrap_or(""), f["count"]);
        for v in f["variants"].as_array().into_iter().flatten() {
            let l = v["label"].as_str().unwrap_or("-");
            println!("  {l:<4} {} | {}", v["lhs"].as_str().unwrap_or(""), v["rhs"].as_str().unwrap_or(""));
        }
    }
    println!("virtual total {virt}");
    println!("classical total {classical}");
    Ok(())
}

fn show_catalog(cli_json: bool, map: bool) -> CliResult {
    let cat = load_catalog()?;
    if map {
        print!("{}", cat.to_map());
        return Ok(());
    }
    let rows: Vec<Value> = cat
        .schemas()
        .iter()
        .map(|s| {
            json!({
                "id": s.id.to_string(),
                "crossings": [s.lhs.crossing_count(), s.rhs.crossing_count()],
                "lhs": code(&s.lhs),
                "rhs": code(&s.rhs),
            })
        })
        .collect();
    if cli_json {
        print_json(&rows);
    } else {
        for r in &rows {
            println!("{} {} | {}", r["id"].as_str().unwrap_or(""), r["lhs"].as_str().unwrap_or(""), r["rhs"].as_str().unwrap_or(""));
        }
        println!("{} moves", rows.len());
    }
    Ok(())
}

fn validate(cli_json: bool, file: &Path) -> CliResult {
    let d = load_diagram(file)?;
    if cli_json {
        print_json(&json!({
            "ok": true,
            "closed": d.is_closed(),
            "classical": d.classical_count(),
            "virtual": d.virtual_count(),
            "boundary": d.boundary().len(),
        }));
    } else {
        println!(
            "ok: {} with {} classical and {} virtual crossings",
            if d.is_closed() { "closed diagram".to_string() } else { format!("{}-point tangle", d.boundary().len()) },
            d.classical_count(),
            d.virtual_count()
        );
    }
    Ok(())
}

fn canon(cli_json: bool, file: &Path, tdf: bool) -> CliResult {
    let d = load_diagram(file)?;
    if tdf {
        print!("{}", serialize_tdf(&d));
    } else if cli_json {
        print_json(&json!({ "code": code(&d) }));
    } else {
        println!("{}", code(&d));
    }
    Ok(())
}

fn matches(cli_json: bool, file: &Path, mv: &MoveArgs) -> CliResult {
    let cat = load_catalog()?;
    let d = load_diagram(file)?;
    let sites = find_matches(&d, cat.get(mv.id), mv.dir);
    if cli_json {
        print_json(&json!({ "move": mv.id.to_string(), "dir": mv.dir, "sites": sites }));
    } else {
        for (i, s) in sites.iter().enumerate() {
            println!("{i}: {}", serde_json::to_string(s).expect("sites serialize"));
        }
        println!("{} sites for {} {}", sites.len(), mv.id, mv.dir);
    }
    Ok(())
}

fn apply(file: &Path, mv: &MoveArgs, site: usize, output: Option<&Path>) -> CliResult {
    let cat = load_catalog()?;
    let d = load_diagram(file)?;
    let schema = cat.get(mv.id);
    let sites = find_matches(&d, schema, mv.dir);
    let s = sites
        .get(site)
        .ok_or_else(|| usage(format!("site {site} out of range: {} has {} sites", mv.id, sites.len())))?;
    let r = vkm_core::apply_move(&d, schema, s, mv.dir).map_err(|e| CliError::Failed(e.to_string()))?;
    write_out(output, &serialize_tdf(&r.diagram))
}

fn manifest_summary(report: &ManifestReport) {
    for r in &report.rows {
        let allowed: Vec<String> = r.allowed.iter().map(MoveId::to_string).collect();
        let verdict = if r.passed() { "found" } else { "FAILED" };
        let len = r.length.map_or("-".to_string(), |n| n.to_string());
        println!(
            "{:<4} from {:<22} {verdict:<6} length {len:<3} visited {:<8} {} ms (crossings <= {}, depth <= {})",
            r.target.to_string(),
            allowed.join(","),
            r.stats.visited,
            r.stats.wall_time.as_millis(),
            r.max_crossings,
            r.max_depth
        );
    }
    println!("{} passed, {} failed", report.passed, report.failed);
}

fn derive(cli_json: bool, a: &DeriveArgs) -> CliResult {
    let cat = load_catalog()?;
    if let Some(m) = &a.manifest {
        let rows = if m == "default" {
            default_manifest()
        } else {
            parse_manifest(&read(Path::new(m))?).map_err(usage)?
        };
        let report = run_lemma_manifest(&cat, &rows).map_err(usage)?;
        if let Some(dir) = &a.cert_dir {
            fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
            for r in &report.rows {
                if let Some(c) = &r.certificate {
                    write_out(Some(&dir.join(format!("{}.cert", r.target))), &write_certificate(c))?;
                }
            }
        }
        if cli_json {
            print_json(&report);
        } else {
            manifest_summary(&report);
        }
        return if report.failed == 0 {
            Ok(())
        } else {
            Err(CliError::Failed(format!("{} manifest rows failed", report.failed)))
        };
    }

    let target = a.target.expect("clap requires a target without a manifest");
    if a.allow.is_empty() {
        return Err(usage("--allow needs at least one move id"));
    }
    let bounds = Bounds { max_crossings: a.max_crossings, max_depth: a.max_depth };
    let p = DerivationProblem::for_move(&cat, target, &a.allow, bounds).map_err(usage)?;
    let outcome = search(&cat, &p).map_err(usage)?;
    let check = outcome.certificate().map(|c| check_certificate(&cat, c));
    if let (Some(path), Some(c)) = (&a.cert, outcome.certificate()) {
        write_out(Some(path), &write_certificate(c))?;
    }
    let stats = outcome.stats();
    if cli_json {
        print_json(&json!({
            "target": target.to_string(),
            "allowed": p.allowed.iter().map(MoveId::to_string).collect::<Vec<_>>(),
            "max_crossings": p.max_crossings,
            "max_depth": p.max_depth,
            "found": outcome.certificate().is_some(),
            "length": outcome.certificate().map(|c| c.len()),
            "check": check,
            "stats": stats,
        }));
    } else {
        match &outcome {
            SearchOutcome::Found(c, _) => {
                print!("{}", write_certificate(c));
                println!("# found, {} steps", c.len());
            }
            SearchOutcome::NotFound(_) => match stats.bound_hit {
                BoundHit::None => println!("# not found (reachable space exhausted)"),
                hit => println!("# not found (bound hit: {hit:?})"),
            },
        }
        println!(
            "# visited {} expanded {} in {} ms",
            stats.visited,
            stats.expanded,
            stats.wall_time.as_millis()
        );
    }
    match (&outcome, check) {
        (SearchOutcome::Found(..), Some(c)) if c.ok => Ok(()),
        (SearchOutcome::Found(..), _) => Err(CliError::Failed("certificate failed its own check".into())),
        (SearchOutcome::NotFound(_), _) => Err(CliError::Failed(format!("no derivation of {target} within bounds"))),
    }
}

fn check(cli_json: bool, cert: &Path) -> CliResult {
    let cat = load_catalog()?;
    let c = parse_certificate(&cat, &read(cert)?).map_err(usage)?;
    let report = check_certificate(&cat, &c);
    if cli_json {
        print_json(&report);
    } else if report.ok {
        println!("ok: {} steps, at most {} crossings", report.steps, report.max_crossings_seen);
    }
    match report.reason {
        None => Ok(()),
        Some(why) => Err(CliError::Failed(why)),
    }
}

#[allow(clippy::too_many_arguments)]
fn audit(cli_json: bool, invariant: &str, moves: &str, count: usize, steps: usize, seed: u64, rows: bool) -> CliResult {
    let cat = load_catalog()?;
    let inv = Invariant::by_name(invariant).ok_or_else(|| usage(format!("unknown invariant {invariant:?}")))?;
    let ids: Vec<MoveId> = match moves {
        "all" => cat.schemas().iter().map(|s| s.id).collect(),
        "generators" => generator_ids(),
        list => list.split(',').map(|s| s.trim().parse()).collect::<Result<_, _>>().map_err(usage)?,
    };
    let corpus = random_corpus(&cat, seed, count, steps);
    let mut report = audit_invariance(&cat, inv, &ids, &corpus);
    if !rows {
        report.rows.retain(|r| !r.equal);
    }
    if cli_json {
        print_json(&report);
    } else {
        for r in report.violating_rows().take(20) {
            println!("violation: diagram {} {} {} site {}: {} -> {}", r.diagram, r.id, r.dir, r.site, r.before, r.after);
        }
        println!(
            "{}: {} diagrams, {} moves, {} checks, {} violations",
            report.invariant,
            report.diagrams,
            report.moves.len(),
            report.checks,
            report.violations
        );
    }
    if report.violations == 0 {
        Ok(())
    } else {
        Err(CliError::Failed(format!("{} violations", report.violations)))
    }
}

fn run(cli: Cli) -> CliResult {
    let j = cli.json;
    match cli.command {
        Command::Enumerate { family, quotient } => enumerate(j, family, quotient),
        Command::Catalog { map } => show_catalog(j, map),
        Command::Validate { file } => validate(j, &file),
        Command::Canon { file, tdf } => canon(j, &file, tdf),
        Command::Matches { file, mv } => matches(j, &file, &mv),
        Command::Apply { file, mv, site, output } => apply(&file, &mv, site, output.as_deref()),
        Command::Derive(a) => derive(j, &a),
        Command::Check { cert } => check(j, &cert),
        Command::Audit { invariant, moves, count, steps, seed, rows } => {
            audit(j, &invariant, &moves, count, steps, seed, rows)
        }
        Command::Random { seed, steps, output } => {
            let cat = load_catalog()?;
            write_out(output.as_deref(), &serialize_tdf(&random_diagram(&cat, seed, steps)))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vkm: {e}");
            ExitCode::from(e.code())
        }
    }
}
