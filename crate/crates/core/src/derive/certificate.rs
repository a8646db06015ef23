//! Replaying, checking, splicing and (de)serializing certificates.

use serde::Serialize;

use crate::canon::{canonical_form, code_key};
use crate::diagram::TangleDiagram;
use crate::error::DeriveError;
use crate::moves::{apply_unchecked, find_matches, replace_at, Catalog, Direction, MoveId};

use super::{Bounds, Certificate, DerivationProblem, Step};

/// Outcome of [`check_certificate`]. `reason` is set exactly when the check
/// fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub ok: bool,
    pub steps: usize,
    pub max_crossings_seen: usize,
    pub reason: Option<String>,
}

/// The canonical diagrams visited while replaying a certificate, source
/// first.
#[derive(Clone, Debug)]
pub struct Replay {
    pub diagrams: Vec<TangleDiagram>,
}

impl Replay {
    /// Every diagram a certificate passes through, without checking bounds
    /// or the final diagram.
    pub fn of(catalog: &Catalog, c: &Certificate) -> Result<Self, DeriveError> {
        replay(catalog, &c.problem.source, &c.steps).map_err(|(step, reason)| DeriveError::Replay { step, reason })
    }
}

/// Replays `steps` from `source`. On failure returns the failing step index
/// and why.
pub(crate) fn replay(
    catalog: &Catalog,
    source: &TangleDiagram,
    steps: &[Step],
) -> Result<Replay, (usize, String)> {
    let mut diagrams = vec![canonical_form(source)];
    for (k, st) in steps.iter().enumerate() {
        let cur = diagrams.last().expect("nonempty");
        let schema = catalog.get(st.id);
        let sites = find_matches(cur, schema, st.dir);
        let site = sites.get(st.site).ok_or_else(|| {
            (k, format!("{} {} site {} out of range ({} matches)", st.id, st.dir, st.site, sites.len()))
        })?;
        let r = apply_unchecked(cur, schema, site, st.dir).map_err(|e| (k, e.to_string()))?;
        diagrams.push(canonical_form(&r.diagram));
    }
    Ok(Replay { diagrams })
}

pub fn check_certificate(catalog: &Catalog, c: &Certificate) -> CheckReport {
    let p = &c.problem;
    let fail = |reason: String, seen: usize| CheckReport {
        ok: false,
        steps: c.steps.len(),
        max_crossings_seen: seen,
        reason: Some(reason),
    };
    if let Some((k, st)) = c.steps.iter().enumerate().find(|(_, st)| !p.allowed.contains(&st.id)) {
        return fail(format!("step {k}: {} is not in the allowed set", st.id), 0);
    }
    let replay = match replay(catalog, &p.source, &c.steps) {
        Ok(r) => r,
        Err((k, why)) => return fail(format!("step {k}: {why}"), 0),
    };
    let seen = replay.diagrams.iter().map(TangleDiagram::crossing_count).max().unwrap_or(0);
    if let Some(k) = replay.diagrams.iter().position(|d| d.crossing_count() > p.max_crossings) {
        return fail(format!("diagram after step {k} exceeds max_crossings {}", p.max_crossings), seen);
    }
    let last = replay.diagrams.last().expect("source");
    if code_key(last) != code_key(&p.goal) {
        return fail("final diagram is not equivalent to the target".into(), seen);
    }
    CheckReport { ok: true, steps: c.steps.len(), max_crossings_seen: seen, reason: None }
}

/// Replaces every use of `lemma.problem.target` in `outer` by the lemma's
/// own steps, carried out inside the host at the same place. The result
/// allows the lemma's moves instead of its target; its crossing bound is
/// the larger of the two bounds and the highest count actually reached.
pub fn splice(catalog: &Catalog, outer: &Certificate, lemma: &Certificate) -> Result<Certificate, DeriveError> {
    let target = lemma.problem.target;
    let err = |m: String| DeriveError::Splice(m);
    let host_chain = replay(catalog, &outer.problem.source, &outer.steps)
        .map_err(|(k, why)| err(format!("outer certificate fails at step {k}: {why}")))?;
    let tangles = replay(catalog, &lemma.problem.source, &lemma.steps)
        .map_err(|(k, why)| err(format!("lemma certificate fails at step {k}: {why}")))?
        .diagrams;
    if code_key(tangles.last().expect("source")) != code_key(&lemma.problem.goal) {
        return Err(err(format!("lemma certificate does not reach {target}")));
    }
    let schema = catalog.get(target);

    let mut steps = Vec::new();
    for (j, st) in outer.steps.iter().enumerate() {
        let host = &host_chain.diagrams[j];
        if st.id != target {
            steps.push(*st);
            continue;
        }
        // the lemma's tangles in the order they replace the matched side
        let (order, moves): (Vec<&TangleDiagram>, Vec<(MoveId, Direction)>) = match st.dir {
            Direction::Forward => (tangles.iter().collect(), lemma.steps.iter().map(|s| (s.id, s.dir)).collect()),
            Direction::Backward => (
                tangles.iter().rev().collect(),
                lemma.steps.iter().rev().map(|s| (s.id, s.dir.reversed())).collect(),
            ),
        };
        let site = &find_matches(host, schema, st.dir)[st.site];
        let mut cur = host.clone();
        for (i, &(id, dir)) in moves.iter().enumerate() {
            let next = replace_at(host, schema, site, st.dir, order[i + 1])?;
            let want = code_key(&next);
            let sub = catalog.get(id);
            let k = find_matches(&cur, sub, dir)
                .iter()
                .position(|s| apply_unchecked(&cur, sub, s, dir).is_ok_and(|r| code_key(&r.diagram) == want))
                .ok_or_else(|| err(format!("no {id} {dir} site realizes lemma step {i} inside step {j}")))?;
            steps.push(Step { id, dir, site: k });
            cur = canonical_form(&next);
        }
        if code_key(&cur) != code_key(&host_chain.diagrams[j + 1]) {
            return Err(err(format!("expansion of step {j} does not reach the next diagram")));
        }
    }

    let mut allowed: Vec<MoveId> = outer.problem.allowed.iter().copied().filter(|&m| m != target).collect();
    allowed.extend(lemma.problem.allowed.iter().copied());
    allowed.sort();
    allowed.dedup();
    let mut spliced = Certificate {
        problem: DerivationProblem { allowed, ..outer.problem.clone() },
        steps,
    };
    let seen = replay(catalog, &spliced.problem.source, &spliced.steps)
        .map_err(|(k, why)| err(format!("spliced certificate fails at step {k}: {why}")))?
        .diagrams
        .iter()
        .map(TangleDiagram::crossing_count)
        .max()
        .unwrap_or(0);
    spliced.problem.max_crossings = spliced.problem.max_crossings.max(seen);
    spliced.problem.max_depth = spliced.problem.max_depth.max(spliced.steps.len());
    Ok(spliced)
}

/// Text form: a `problem` header, then one `step` line per rewrite.
pub fn write_certificate(c: &Certificate) -> String {
    let p = &c.problem;
    let allowed: Vec<String> = p.allowed.iter().map(MoveId::to_string).collect();
    let mut s = format!(
        "problem {} from {} max_crossings={} max_depth={}\n",
        p.target,
        allowed.join(","),
        p.max_crossings,
        p.max_depth
    );
    for st in &c.steps {
        s.push_str(&format!("step {} {} {}\n", st.id, st.dir, st.site));
    }
    s
}

pub fn parse_certificate(catalog: &Catalog, text: &str) -> Result<Certificate, DeriveError> {
    let mut problem = None;
    let mut steps = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let syntax = |message: String| DeriveError::CertificateSyntax { line, message };
        let body = raw.split('#').next().unwrap_or("").trim();
        let mut words = body.split_whitespace();
        match words.next() {
            None => {}
            Some("problem") => {
                if problem.is_some() {
                    return Err(syntax("second problem header".into()));
                }
                let rest: Vec<&str> = words.collect();
                let (target, allowed, bounds) =
                    super::manifest::parse_derive_clause(&rest).map_err(syntax)?;
                problem = Some(DerivationProblem::for_move(catalog, target, &allowed, bounds)?);
            }
            Some("step") => {
                if problem.is_none() {
                    return Err(syntax("step before the problem header".into()));
                }
                let w: Vec<&str> = words.collect();
                if w.len() != 3 {
                    return Err(syntax("expected `step <move> <forward|backward> <site>`".into()));
                }
                let id: MoveId = w[0].parse().map_err(|_| syntax(format!("unknown move id {:?}", w[0])))?;
                let dir: Direction = w[1].parse().map_err(syntax)?;
                let site: usize = w[2].parse().map_err(|_| syntax(format!("bad site index {:?}", w[2])))?;
                steps.push(Step { id, dir, site });
            }
            Some(other) => return Err(syntax(format!("unknown keyword {other:?}"))),
        }
    }
    let problem = problem.ok_or(DeriveError::CertificateSyntax { line: 0, message: "missing problem header".into() })?;
    Ok(Certificate { problem, steps })
}

impl Bounds {
    pub fn of(p: &DerivationProblem) -> Self {
        Bounds { max_crossings: Some(p.max_crossings), max_depth: Some(p.max_depth) }
    }
}
