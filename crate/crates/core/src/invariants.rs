//! Gauss codes, the odd writhe, random knot diagrams and invariance audits.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::canon::canonical_form;
use crate::diagram::{End, NodeKind, TangleDiagram};
use crate::error::GaussError;
use crate::sketch::{Sketch, Style};
use crate::moves::{apply_unchecked, find_matches, Catalog, Direction, MoveId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GaussEntry {
    /// 1-based, in order of first visit.
    pub label: usize,
    pub over: bool,
    pub sign: i8,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GaussCode(pub Vec<GaussEntry>);

impl fmt::Display for GaussCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            let pass = if e.over { 'O' } else { 'U' };
            let sign = if e.sign > 0 { '+' } else { '-' };
            write!(f, "{pass}{}{sign}", e.label)?;
        }
        Ok(())
    }
}

impl GaussCode {
    /// Each label twice, once over and once under, with equal signs.
    pub fn is_well_formed(&self) -> bool {
        let n = self.0.iter().map(|e| e.label).max().unwrap_or(0);
        let mut seen = vec![(0u8, 0u8, 0i8); n + 1];
        for e in &self.0 {
            let s = &mut seen[e.label];
            if e.over {
                s.0 += 1;
            } else {
                s.1 += 1;
            }
            if s.2 != 0 && s.2 != e.sign {
                return false;
            }
            s.2 = e.sign;
        }
        seen[1..].iter().all(|&(o, u, _)| o == 1 && u == 1)
    }
}

/// Walks the single strand of a closed diagram from its least edge (in the
/// canonical form) and records the classical crossings it meets.
pub fn extract_gauss_code(d: &TangleDiagram) -> Result<GaussCode, GaussError> {
    if !d.is_closed() {
        return Err(GaussError::NotClosed);
    }
    if d.nodes().is_empty() {
        return if d.loops() == 1 { Ok(GaussCode::default()) } else { Err(GaussError::MultiComponent) };
    }
    if d.loops() > 0 {
        return Err(GaussError::MultiComponent);
    }
    let c = canonical_form(d);
    let mut label = vec![0usize; c.nodes().len()];
    let mut next_label = 1;
    let mut out = Vec::new();
    let start = c.edges()[0];
    let mut edge = start;
    let mut walked = 0;
    loop {
        walked += 1;
        let End { node, slot } = edge.head;
        if let NodeKind::Classical { over } = c.kind(node) {
            if label[node] == 0 {
                label[node] = next_label;
                next_label += 1;
            }
            let sign = c.crossing_sign(node).expect("classical");
            out.push(GaussEntry { label: label[node], over: over.contains(slot), sign });
        }
        edge = c.edges()[c.edge_at(End::new(node, (slot + 2) % 4))];
        if edge == start {
            break;
        }
    }
    if walked != c.edges().len() {
        return Err(GaussError::MultiComponent);
    }
    Ok(GaussCode(out))
}

/// Sum of the signs of crossings whose two occurrences enclose an odd
/// number of entries.
pub fn odd_writhe(d: &TangleDiagram) -> Result<i64, GaussError> {
    let code = extract_gauss_code(d)?;
    let mut first = vec![None; code.0.len() / 2 + 1];
    let mut total = 0i64;
    for (i, e) in code.0.iter().enumerate() {
        match first[e.label] {
            None => first[e.label] = Some(i),
            Some(j) => {
                if (i - j - 1) % 2 == 1 {
                    total += e.sign as i64;
                }
            }
        }
    }
    Ok(total)
}

/// A named quantity on closed one-component diagrams.
#[derive(Clone, Copy)]
pub struct Invariant {
    pub name: &'static str,
    pub evaluate: fn(&TangleDiagram) -> i64,
}

impl fmt::Debug for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Invariant").field("name", &self.name).finish()
    }
}

impl Invariant {
    pub fn odd_writhe() -> Self {
        Invariant { name: "odd-writhe", evaluate: |d| odd_writhe(d).expect("closed knot diagram") }
    }

    /// Not an invariant at all; a control that audits must catch.
    pub fn crossing_count() -> Self {
        Invariant { name: "crossing-count", evaluate: |d| d.crossing_count() as i64 }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        [Self::odd_writhe(), Self::crossing_count()].into_iter().find(|i| i.name == name)
    }
}

/// Every applicable (move, direction, site) on `d`, in catalog order.
fn applications<'a>(
    catalog: &'a Catalog,
    moves: &'a [MoveId],
    d: &'a TangleDiagram,
) -> impl Iterator<Item = (MoveId, Direction, usize, TangleDiagram)> + 'a {
    moves.iter().flat_map(move |&id| {
        let schema = catalog.get(id);
        [Direction::Forward, Direction::Backward].into_iter().flat_map(move |dir| {
            find_matches(d, schema, dir).into_iter().enumerate().filter_map(move |(i, site)| {
                apply_unchecked(d, schema, &site, dir).ok().map(|r| (id, dir, i, r.diagram))
            })
        })
    })
}

/// Starts from the crossingless unknot and applies `steps` random catalog
/// moves. Crossing-increasing applications are drawn three times as often
/// as the rest; within each class the choice is uniform.
pub fn random_diagram(catalog: &Catalog, seed: u64, steps: usize) -> TangleDiagram {
    random_walk(catalog, &TangleDiagram::unknot(), seed, steps)
}

/// The same random process started from an arbitrary diagram.
pub fn random_walk(catalog: &Catalog, start: &TangleDiagram, seed: u64, steps: usize) -> TangleDiagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ids: Vec<MoveId> = catalog.schemas().iter().map(|s| s.id).collect();
    let mut d = canonical_form(start);
    for _ in 0..steps {
        // (schema index, direction, site), split by effect on crossings
        let mut up = Vec::new();
        let mut rest = Vec::new();
        for (k, &id) in ids.iter().enumerate() {
            let schema = catalog.get(id);
            for dir in [Direction::Forward, Direction::Backward] {
                let n = find_matches(&d, schema, dir).len();
                let bucket = if schema.crossing_delta(dir) > 0 { &mut up } else { &mut rest };
                bucket.extend((0..n).map(|i| (k, dir, i)));
            }
        }
        loop {
            let pick_up = match (up.is_empty(), rest.is_empty()) {
                (true, true) => return canonical_form(&d),
                (false, true) => true,
                (true, false) => false,
                (false, false) => rng.gen_ratio(3, 4),
            };
            let bucket = if pick_up { &mut up } else { &mut rest };
            let (k, dir, i) = bucket.swap_remove(rng.gen_range(0..bucket.len()));
            let schema = catalog.get(ids[k]);
            let site = &find_matches(&d, schema, dir)[i];
            if let Ok(r) = apply_unchecked(&d, schema, site, dir) {
                d = canonical_form(&r.diagram);
                break;
            }
        }
    }
    d
}

/// The standard trefoil drawing with one of its three crossings made
/// virtual. Its Gauss code is O1+ O2+ U1+ U2+ and its odd writhe is 2.
pub fn virtual_trefoil() -> TangleDiagram {
    let points: Vec<(f64, f64)> = (0..90)
        .map(|k| {
            let t = k as f64 * std::f64::consts::TAU / 90.0;
            (t.sin() + 2.0 * (2.0 * t).sin(), t.cos() - 2.0 * (2.0 * t).cos())
        })
        .collect();
    let sketch = Sketch::new().closed(&points);
    // passes alternate over and under along the strand
    let mut passes: Vec<(f64, usize)> = Vec::new();
    for c in sketch.crossings() {
        passes.push((c.first.param, c.index));
        passes.push((c.second.param, c.index));
    }
    passes.sort_by(|a, b| a.0.total_cmp(&b.0));
    sketch
        .build(|c| {
            if c.index == 0 {
                return Style::Virtual;
            }
            let rank = passes.iter().position(|&(p, i)| i == c.index && p == c.first.param).expect("pass");
            Style::Classical { first_over: rank % 2 == 0 }
        })
        .expect("valid trefoil drawing")
}

/// A reproducible corpus: diagram `k` uses seed `seed + k`.
pub fn random_corpus(catalog: &Catalog, seed: u64, count: usize, steps: usize) -> Vec<TangleDiagram> {
    (0..count as u64).map(|k| random_diagram(catalog, seed.wrapping_add(k), steps)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditRow {
    pub diagram: usize,
    pub id: MoveId,
    pub dir: Direction,
    pub site: usize,
    pub before: i64,
    pub after: i64,
    pub equal: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub invariant: String,
    pub moves: Vec<MoveId>,
    pub diagrams: usize,
    pub checks: usize,
    pub violations: usize,
    pub rows: Vec<AuditRow>,
}

impl AuditReport {
    pub fn violating_rows(&self) -> impl Iterator<Item = &AuditRow> {
        self.rows.iter().filter(|r| !r.equal)
    }
}

fn audit_one(catalog: &Catalog, inv: Invariant, moves: &[MoveId], k: usize, d: &TangleDiagram) -> Vec<AuditRow> {
    let before = (inv.evaluate)(d);
    applications(catalog, moves, d)
        .filter(|(_, _, _, r)| r.is_closed() && extract_gauss_code(r).is_ok())
        .map(|(id, dir, site, r)| {
            let after = (inv.evaluate)(&r);
            AuditRow { diagram: k, id, dir, site, before, after, equal: before == after }
        })
        .collect()
}

/// Evaluates `inv` before and after every application of every listed move
/// at every site, both directions, on every corpus diagram.
pub fn audit_invariance(
    catalog: &Catalog,
    inv: Invariant,
    moves: &[MoveId],
    corpus: &[TangleDiagram],
) -> AuditReport {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(corpus.len().max(1));
    let chunk = corpus.len().div_ceil(workers).max(1);
    let parts: Vec<Vec<AuditRow>> = std::thread::scope(|s| {
        let handles: Vec<_> = corpus
            .chunks(chunk)
            .enumerate()
            .map(|(c, part)| {
                s.spawn(move || {
                    part.iter()
                        .enumerate()
                        .flat_map(|(i, d)| audit_one(catalog, inv, moves, c * chunk + i, d))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("audit worker panicked")).collect()
    });
    let rows: Vec<AuditRow> = parts.into_iter().flatten().collect();
    let violations = rows.iter().filter(|r| !r.equal).count();
    AuditReport {
        invariant: inv.name.to_string(),
        moves: moves.to_vec(),
        diagrams: corpus.len(),
        checks: rows.len(),
        violations,
        rows,
    }
}

/// The generating set of the virtual moves.
pub const GENERATORS: [&str; 4] = ["V1a", "V2a", "V3a", "V4g"];

pub fn generator_ids() -> Vec<MoveId> {
    GENERATORS.iter().map(|s| s.parse().expect("valid id")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moves::catalog;

    #[test]
    fn unknot_has_empty_code_and_zero_writhe() {
        let u = TangleDiagram::unknot();
        assert!(extract_gauss_code(&u).unwrap().0.is_empty());
        assert_eq!(odd_writhe(&u).unwrap(), 0);
    }

    #[test]
    fn virtual_trefoil_fixture() {
        let t = virtual_trefoil();
        assert_eq!((t.classical_count(), t.virtual_count()), (2, 1));
        let code = extract_gauss_code(&t).unwrap().0;
        // the walk may start anywhere on the strand
        let found = (0..code.len()).any(|r| {
            let mut rotated = code.clone();
            rotated.rotate_left(r);
            let mut relabel = vec![0; code.len()];
            let mut next = 1;
            for e in rotated.iter_mut() {
                if relabel[e.label] == 0 {
                    relabel[e.label] = next;
                    next += 1;
                }
                e.label = relabel[e.label];
            }
            GaussCode(rotated).to_string() == "O1+ O2+ U1+ U2+"
        });
        assert!(found);
        assert_eq!(odd_writhe(&t).unwrap(), 2);
    }

    #[test]
    fn tangles_are_rejected() {
        let v = &catalog().lookup("V1a").unwrap().rhs;
        assert_eq!(extract_gauss_code(v), Err(GaussError::NotClosed));
    }

    #[test]
    fn random_diagrams_are_reproducible_and_well_formed() {
        let c = catalog();
        assert_eq!(random_diagram(c, 1, 0).loops(), 1);
        let a = random_diagram(c, 42, 30);
        let b = random_diagram(c, 42, 30);
        assert_eq!(crate::canon::code_key(&a), crate::canon::code_key(&b));
        assert!(a.validate().is_ok());
        assert!(extract_gauss_code(&a).unwrap().is_well_formed());
    }
}
