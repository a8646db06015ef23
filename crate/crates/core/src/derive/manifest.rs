//! Manifests: batches of derivation problems, one per line.

use serde::Serialize;

use crate::error::DeriveError;
use crate::moves::{Catalog, MoveId};

use super::certificate::{check_certificate, CheckReport};
use super::search::{search, SearchOutcome, SearchStats};
use super::{Bounds, Certificate, DerivationProblem};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ManifestRow {
    pub target: MoveId,
    pub allowed: Vec<MoveId>,
    pub bounds: Bounds,
}

/// The lemma table, in proof order.
pub const DEFAULT_MANIFEST: &str = "\
derive V2b from V1a,V2a,V3a
derive V1b from V1a,V2b
derive V2c from V1b,V2a,V3a
derive V3b from V2b,V2c,V3a
derive V3c from V2b,V2c,V3a
derive V3d from V2b,V2c,V3a
derive V4a from V2b,V2c,V4g
derive V4b from V2a,V4g
derive V4c from C2a,C2b,V4g
derive V4d from V2a,V4c
derive V4e from C2c,C2d,V4b
derive V4f from V2a,V4d
derive V4h from V2a,V4g
";

pub fn default_manifest() -> Vec<ManifestRow> {
    parse_manifest(DEFAULT_MANIFEST).expect("built-in manifest parses")
}

/// Parses `<target> from <ids> [max_crossings=N] [max_depth=M]`. Ids may be
/// separated by commas, spaces, or both.
pub(crate) fn parse_derive_clause(words: &[&str]) -> Result<(MoveId, Vec<MoveId>, Bounds), String> {
    let (target, rest) = words.split_first().ok_or("missing target move")?;
    let target: MoveId = target.parse().map_err(|_| format!("unknown move id {target:?}"))?;
    let rest = match rest.split_first() {
        Some((&"from", r)) => r,
        _ => return Err("expected `from` after the target".into()),
    };
    let mut allowed = Vec::new();
    let mut bounds = Bounds::default();
    for w in rest {
        if let Some((key, value)) = w.split_once('=') {
            let n: usize = value.parse().map_err(|_| format!("bad number {value:?}"))?;
            match key {
                "max_crossings" => bounds.max_crossings = Some(n),
                "max_depth" => bounds.max_depth = Some(n),
                _ => return Err(format!("unknown option {key:?}")),
            }
            continue;
        }
        for id in w.split(',').filter(|s| !s.is_empty()) {
            allowed.push(id.parse().map_err(|_| format!("unknown move id {id:?}"))?);
        }
    }
    if allowed.is_empty() {
        return Err("empty allowed set".into());
    }
    Ok((target, allowed, bounds))
}

pub fn parse_manifest(text: &str) -> Result<Vec<ManifestRow>, DeriveError> {
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let syntax = |message: String| DeriveError::ManifestSyntax { line: i + 1, message };
        let words: Vec<&str> = body.split_whitespace().collect();
        if words[0] != "derive" {
            return Err(syntax(format!("unknown keyword {:?}", words[0])));
        }
        let (target, allowed, bounds) = parse_derive_clause(&words[1..]).map_err(syntax)?;
        rows.push(ManifestRow { target, allowed, bounds });
    }
    Ok(rows)
}

#[derive(Clone, Debug, Serialize)]
pub struct RowReport {
    pub target: MoveId,
    pub allowed: Vec<MoveId>,
    pub max_crossings: usize,
    pub max_depth: usize,
    pub found: bool,
    pub length: Option<usize>,
    pub check: Option<CheckReport>,
    pub stats: SearchStats,
    #[serde(skip)]
    pub certificate: Option<Certificate>,
}

impl RowReport {
    /// Found and the certificate replays.
    pub fn passed(&self) -> bool {
        self.found && self.check.as_ref().is_some_and(|c| c.ok)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ManifestReport {
    pub rows: Vec<RowReport>,
    pub passed: usize,
    pub failed: usize,
}

fn run_row(catalog: &Catalog, row: &ManifestRow) -> Result<RowReport, DeriveError> {
    let p = DerivationProblem::for_move(catalog, row.target, &row.allowed, row.bounds)?;
    let outcome = search(catalog, &p)?;
    let (found, certificate, stats) = match outcome {
        SearchOutcome::Found(c, s) => (true, Some(c), s),
        SearchOutcome::NotFound(s) => (false, None, s),
    };
    Ok(RowReport {
        target: p.target,
        allowed: p.allowed.clone(),
        max_crossings: p.max_crossings,
        max_depth: p.max_depth,
        found,
        length: certificate.as_ref().map(Certificate::len),
        check: certificate.as_ref().map(|c| check_certificate(catalog, c)),
        stats,
        certificate,
    })
}

/// Runs every row, rows in parallel, reported in manifest order.
pub fn run_lemma_manifest(catalog: &Catalog, rows: &[ManifestRow]) -> Result<ManifestReport, DeriveError> {
    let results: Vec<Result<RowReport, DeriveError>> = std::thread::scope(|s| {
        let handles: Vec<_> = rows.iter().map(|row| s.spawn(move || run_row(catalog, row))).collect();
        handles.into_iter().map(|h| h.join().expect("search thread panicked")).collect()
    });
    let rows = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let passed = rows.iter().filter(|r| r.passed()).count();
    Ok(ManifestReport { failed: rows.len() - passed, passed, rows })
}
