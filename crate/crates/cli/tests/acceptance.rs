//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when a blocking criterion fails.

use std::collections::HashSet;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use vkm_core::derive::{check_certificate, default_manifest, run_lemma_manifest, search, splice, Bounds, Certificate};
use vkm_core::derive::{DerivationProblem, SearchOutcome, DEFAULT_DETOUR, DEFAULT_MAX_DEPTH};
use vkm_core::invariants::{generator_ids, random_corpus, random_diagram, random_walk, virtual_trefoil};
use vkm_core::moves::inverse_site;
use vkm_core::{
    apply_move, audit_invariance, catalog, code_key, find_matches, odd_writhe, parse_tdf, serialize_tdf, Direction,
    Invariant, MatchSite, MoveFamily, MoveId, TangleDiagram,
};

// Every tolerance the suite relies on.
const ENUMERATE_LIMIT: Duration = Duration::from_secs(10);
const ROW_LIMIT: Duration = Duration::from_secs(300);
const AUDIT_LIMIT: Duration = Duration::from_secs(120);
const CORPUS_SEED: u64 = 42;
const CORPUS_SIZE: usize = 100;
const CORPUS_STEPS: usize = 30;
const RELABELINGS_PER_FIXTURE: usize = 1000;
const INVOLUTION_TRIPLES: usize = 500;
const ROUND_TRIPS: usize = 1000;
const TREFOIL_WALKS: usize = 20;

struct Suite {
    blocking_failures: usize,
    /// Diagrams produced during the run, each checked for validity.
    produced: usize,
    invalid: usize,
}

impl Suite {
    fn report(&mut self, n: u8, blocking: bool, pass: bool, what: &str, detail: String) {
        let verdict = if pass { "PASS" } else { "FAIL" };
        let tag = if blocking { "" } else { " (non-blocking)" };
        println!("{verdict} criterion {n}{tag}: {what}: {detail}");
        if blocking && !pass {
            self.blocking_failures += 1;
        }
    }

    fn produced(&mut self, d: &TangleDiagram) {
        self.produced += 1;
        if !d.validate().is_ok() {
            self.invalid += 1;
        }
    }
}

fn vkm(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_vkm")).args(args).output().expect("vkm runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn ids(s: &str) -> Vec<MoveId> {
    s.split(',').map(|x| x.parse().unwrap()).collect()
}

fn enumeration(s: &mut Suite) {
    let t = Instant::now();
    let (code, out) = vkm(&["enumerate", "--json"]);
    let elapsed = t.elapsed();
    let v: Value = serde_json::from_str(&out).expect("json");
    let count = |f: &str| {
        v["families"].as_array().unwrap().iter().find(|x| x["family"] == f).map_or(0, |x| x["count"].as_u64().unwrap())
    };
    let got: Vec<u64> = ["V1", "V2", "V3", "V4", "C1", "C2", "C3"].iter().map(|f| count(f)).collect();
    let pass = code == 0
        && got == [2, 3, 4, 8, 4, 4, 8]
        && v["virtual_total"] == 17
        && v["classical_total"] == 16
        && elapsed < ENUMERATE_LIMIT;
    s.report(
        1,
        true,
        pass,
        "enumeration counts",
        format!(
            "V1={} V2={} V3={} V4={} (total {}), C1={} C2={} C3={} (total {}), {:.2} s",
            got[0], got[1], got[2], got[3], v["virtual_total"], got[4], got[5], got[6], v["classical_total"],
            elapsed.as_secs_f64()
        ),
    );
}

/// Runs the manifest; returns the certificates by target.
fn lemmas(s: &mut Suite) -> Vec<(MoveId, Certificate)> {
    let cat = catalog();
    let rows = default_manifest();
    let report = run_lemma_manifest(cat, &rows).expect("manifest runs");
    let mut ok = report.rows.len() == 13;
    let mut lines = Vec::new();
    for r in &report.rows {
        let lhs = cat.get(r.target).lhs.crossing_count();
        let defaults = r.max_crossings == lhs + DEFAULT_DETOUR && r.max_depth == DEFAULT_MAX_DEPTH;
        let fast = r.stats.wall_time < ROW_LIMIT;
        ok &= r.passed() && defaults && fast;
        lines.push(format!("{}:{}", r.target, r.length.map_or("-".into(), |n| n.to_string())));
        if let Some(c) = &r.certificate {
            for d in vkm_core::derive::Replay::of(cat, c).expect("replays").diagrams {
                s.produced(&d);
            }
        }
    }
    let slowest = report.rows.iter().map(|r| r.stats.wall_time).max().unwrap_or_default();
    s.report(
        2,
        true,
        ok,
        "lemma manifest at default bounds",
        format!("{}/13 found and checked, lengths {}, slowest row {:.2} s", report.passed, lines.join(" "), slowest.as_secs_f64()),
    );

    // the CLI surface over the same table
    let (code, out) = vkm(&["derive", "--manifest", "default", "--json"]);
    let v: Value = serde_json::from_str(&out).expect("json");
    if code != 0 || v["passed"] != 13 {
        s.report(2, true, false, "`vkm derive --manifest default`", format!("exit {code}, passed {}", v["passed"]));
    }
    report.rows.into_iter().filter_map(|r| r.certificate.map(|c| (r.target, c))).collect()
}

fn generating_set(s: &mut Suite, lemmas: &[(MoveId, Certificate)]) {
    let cat = catalog();
    let generators = generator_ids();
    let base: HashSet<MoveId> = generators
        .iter()
        .copied()
        .chain(MoveFamily::ALL.iter().filter(|f| !f.is_virtual()).flat_map(|f| f.ids()))
        .collect();
    // in manifest order every lemma only uses moves expanded before it
    let mut expanded: Vec<(MoveId, Certificate)> = Vec::new();
    let mut failures = Vec::new();
    for (target, cert) in lemmas {
        let mut c = cert.clone();
        let mut stuck = false;
        while let Some(m) = c.problem.allowed.iter().copied().find(|m| !base.contains(m)) {
            let Some((_, lemma)) = expanded.iter().find(|(t, _)| *t == m) else {
                stuck = true;
                break;
            };
            match splice(cat, &c, lemma) {
                Ok(next) => c = next,
                Err(e) => {
                    failures.push(format!("{target}: {e}"));
                    stuck = true;
                    break;
                }
            }
        }
        let r = check_certificate(cat, &c);
        if stuck || !r.ok || !c.problem.allowed.iter().all(|m| base.contains(m)) {
            failures.push(format!("{target}: {:?}", r.reason));
        }
        expanded.push((*target, c));
    }
    let virtuals = MoveFamily::ALL.iter().filter(|f| f.is_virtual()).flat_map(|f| f.ids());
    let non_generators: Vec<MoveId> = virtuals.filter(|m| !generators.contains(m)).collect();
    let covered = non_generators.iter().all(|m| expanded.iter().any(|(t, _)| t == m));
    let lens: Vec<String> = expanded
        .iter()
        .map(|(t, c)| format!("{t}:{}/{}", c.len(), c.problem.max_crossings))
        .collect();
    s.report(
        3,
        true,
        covered && non_generators.len() == 13 && failures.is_empty(),
        "every non-generator virtual move over {V1a,V2a,V3a,V4g} and the 16 classical moves",
        if failures.is_empty() {
            format!("13/13 spliced certificates replay (steps/crossing bound) {}", lens.join(" "))
        } else {
            failures.join("; ")
        },
    );
}

fn audits(s: &mut Suite) -> Vec<TangleDiagram> {
    let cat = catalog();
    let t = Instant::now();
    let corpus = random_corpus(cat, CORPUS_SEED, CORPUS_SIZE, CORPUS_STEPS);
    for d in &corpus {
        s.produced(d);
    }
    let all: Vec<MoveId> = cat.schemas().iter().map(|m| m.id).collect();
    let full = audit_invariance(cat, Invariant::odd_writhe(), &all, &corpus);
    let gens = audit_invariance(cat, Invariant::odd_writhe(), &generator_ids(), &corpus);
    let elapsed = t.elapsed();
    let key = |r: &vkm_core::invariants::AuditRow| (r.diagram, r.id, r.dir, r.site);
    let full_keys: HashSet<_> = full.rows.iter().map(key).collect();
    let subset = gens.rows.iter().all(|r| full_keys.contains(&key(r)));

    // corpus diagrams are all unknots; walks from a knot with odd writhe 2
    // make sure the audit also sees a non-zero value
    let start = virtual_trefoil();
    let knots: Vec<TangleDiagram> =
        (0..TREFOIL_WALKS as u64).map(|k| random_walk(cat, &start, CORPUS_SEED + k, 10)).collect();
    let knotted = audit_invariance(cat, Invariant::odd_writhe(), &all, &knots);
    let writhe_two = knots.iter().all(|d| odd_writhe(d) == Ok(2));

    let pass = full.violations == 0
        && gens.violations == 0
        && gens.checks < full.checks
        && subset
        && knotted.violations == 0
        && writhe_two
        && elapsed < AUDIT_LIMIT;
    s.report(
        4,
        true,
        pass,
        "odd writhe audit",
        format!(
            "full catalog {} checks / {} violations, generators {} checks / {} violations (subset {subset}), \
             {:.1} s; {} trefoil walks with odd writhe 2: {} checks / {} violations",
            full.checks,
            full.violations,
            gens.checks,
            gens.violations,
            elapsed.as_secs_f64(),
            TREFOIL_WALKS,
            knotted.checks,
            knotted.violations
        ),
    );
    corpus
}

fn random_relabel(d: &TangleDiagram, rng: &mut ChaCha8Rng) -> TangleDiagram {
    let mut order: Vec<usize> = (0..d.nodes().len()).collect();
    order.shuffle(rng);
    let shift: Vec<u8> = d.nodes().iter().map(|k| rng.gen_range(0..k.degree() as u8)).collect();
    d.relabel(&order, &shift).expect("valid relabeling")
}

fn properties(s: &mut Suite) {
    let cat = catalog();
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    // (a) relabeling stability
    let mut fixtures: Vec<TangleDiagram> = cat.schemas().iter().flat_map(|m| [m.lhs.clone(), m.rhs.clone()]).collect();
    fixtures.push(virtual_trefoil());
    fixtures.extend((0..4).map(|k| random_diagram(cat, 100 + k, CORPUS_STEPS)));
    let mut relabel_failures = 0;
    for d in &fixtures {
        let key = code_key(d);
        for _ in 0..RELABELINGS_PER_FIXTURE {
            let r = random_relabel(d, &mut rng);
            if code_key(&r) != key {
                relabel_failures += 1;
            }
        }
    }

    // (b) apply then undo at the created site
    let mut involution_failures = 0;
    let mut triples = 0;
    while triples < INVOLUTION_TRIPLES {
        let host = random_diagram(cat, rng.gen(), rng.gen_range(0..20));
        let m = &cat.schemas()[rng.gen_range(0..cat.len())];
        let dir = if rng.gen() { Direction::Forward } else { Direction::Backward };
        let sites = find_matches(&host, m, dir);
        if sites.is_empty() {
            continue;
        }
        let site = &sites[rng.gen_range(0..sites.len())];
        let Ok(r) = apply_move(&host, m, site, dir) else { continue };
        triples += 1;
        s.produced(&r.diagram);
        let back = dir.reversed();
        let created: HashSet<usize> = r.inserted.iter().copied().collect();
        let restored = if created.is_empty() {
            inverse_site(&host, &r.diagram, m, dir).is_some()
        } else {
            find_matches(&r.diagram, m, back).iter().any(|t| {
                let MatchSite::Embedded { images } = t else { return false };
                images.iter().map(|&(n, _)| n).collect::<HashSet<_>>() == created
                    && apply_move(&r.diagram, m, t, back).is_ok_and(|u| code_key(&u.diagram) == code_key(&host))
            })
        };
        if !restored {
            involution_failures += 1;
        }
    }

    // (d) text round trip
    let mut round_trip_failures = 0;
    for k in 0..ROUND_TRIPS as u64 {
        let d = random_diagram(cat, 10_000 + k, (k % 31) as usize);
        s.produced(&d);
        let text = serialize_tdf(&d);
        match parse_tdf(&text) {
            Ok(back) if code_key(&back) == code_key(&d) && serialize_tdf(&back) == text => {}
            _ => round_trip_failures += 1,
        }
    }

    // (c) covers everything produced so far in this run
    let pass = relabel_failures == 0 && involution_failures == 0 && s.invalid == 0 && round_trip_failures == 0;
    s.report(
        5,
        true,
        pass,
        "property suites",
        format!(
            "(a) {} fixtures x {RELABELINGS_PER_FIXTURE} relabelings: {relabel_failures} failures; \
             (b) {triples} involutions: {involution_failures} failures; \
             (c) {} diagrams validated: {} invalid; (d) {ROUND_TRIPS} round trips: {round_trip_failures} failures",
            fixtures.len(),
            s.produced,
            s.invalid
        ),
    );
}

fn negative_control(s: &mut Suite, corpus: &[TangleDiagram]) {
    let cat = catalog();
    let v1a: MoveId = "V1a".parse().unwrap();
    let has_site = corpus
        .iter()
        .any(|d| [Direction::Forward, Direction::Backward].iter().any(|&dir| !find_matches(d, cat.get(v1a), dir).is_empty()));
    let all: Vec<MoveId> = cat.schemas().iter().map(|m| m.id).collect();
    let report = audit_invariance(cat, Invariant::crossing_count(), &all, corpus);
    s.report(
        6,
        true,
        has_site && report.violations >= 1,
        "crossing count is caught as a non-invariant",
        format!("corpus has a V1a site: {has_site}; {} of {} checks violate", report.violations, report.checks),
    );
}

fn stretch(s: &mut Suite) {
    let cat = catalog();
    let p = DerivationProblem::for_move(cat, "C2b".parse().unwrap(), &ids("C1a,C1b,C2a,C3a"), Bounds::default())
        .expect("problem");
    let out = search(cat, &p).expect("search runs");
    let (pass, detail) = match &out {
        SearchOutcome::Found(c, st) => {
            let r = check_certificate(cat, c);
            (r.ok, format!("{} steps, visited {}, {:.2} s", c.len(), st.visited, st.wall_time.as_secs_f64()))
        }
        SearchOutcome::NotFound(st) => (false, format!("not found, bound hit {:?}", st.bound_hit)),
    };
    s.report(
        7,
        false,
        pass,
        "C2b from {C1a,C1b,C2a,C3a}",
        format!("{detail} (max_crossings {}, max_depth {})", p.max_crossings, p.max_depth),
    );
}

fn main() {
    // `cargo test` passes harness flags; listing must not run the suite
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let mut s = Suite { blocking_failures: 0, produced: 0, invalid: 0 };
    enumeration(&mut s);
    let certs = lemmas(&mut s);
    generating_set(&mut s, &certs);
    let corpus = audits(&mut s);
    properties(&mut s);
    negative_control(&mut s, &corpus);
    stretch(&mut s);
    if s.blocking_failures > 0 {
        println!("{} blocking criteria failed", s.blocking_failures);
        std::process::exit(1);
    }
    println!("all blocking criteria passed");
}
