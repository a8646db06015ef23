//! Bidirectional breadth-first search over canonical codes.
//!
//! Both sides grow one full level at a time; the side with the smaller
//! frontier goes next. States are canonical forms, so site indices in the
//! recorded steps refer to the canonical form's match list. When a level
//! produces meetings, the shortest total length wins and ties go to the
//! least code, which makes the certificate independent of hash order.

use std::time::{Duration, Instant};

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::canon::{canonical_form, canonical_form_and_key, CodeKey};
use crate::diagram::TangleDiagram;
use crate::error::DeriveError;
use crate::moves::{apply_unchecked, find_matches, inverse_site, Catalog, Direction, MoveSchema};

use super::{Certificate, DerivationProblem, Step};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundHit {
    /// The reachable space was exhausted without pruning.
    None,
    Depth,
    Crossings,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchStats {
    pub expanded: usize,
    pub visited: usize,
    /// Frontier size after each level, forward side then backward side.
    pub forward_frontiers: Vec<usize>,
    pub backward_frontiers: Vec<usize>,
    #[serde(serialize_with = "as_millis")]
    pub wall_time: Duration,
    pub bound_hit: BoundHit,
}

fn as_millis<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u128(d.as_millis())
}

#[derive(Clone, Debug)]
pub enum SearchOutcome {
    Found(Certificate, SearchStats),
    NotFound(SearchStats),
}

impl SearchOutcome {
    pub fn stats(&self) -> &SearchStats {
        match self {
            SearchOutcome::Found(_, s) | SearchOutcome::NotFound(s) => s,
        }
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            SearchOutcome::Found(c, _) => Some(c),
            SearchOutcome::NotFound(_) => None,
        }
    }
}

struct Node {
    parent: u32,
    step: Option<Step>,
    depth: u32,
}

struct Side {
    index: FxHashMap<CodeKey, u32>,
    nodes: Vec<Node>,
    frontier: Vec<(u32, TangleDiagram)>,
    depth: usize,
    sizes: Vec<usize>,
}

impl Side {
    fn new(root: &TangleDiagram) -> (Self, CodeKey) {
        let (canon, key) = canonical_form_and_key(root);
        let mut index = FxHashMap::default();
        index.insert(key.clone(), 0);
        let side = Side {
            index,
            nodes: vec![Node { parent: u32::MAX, step: None, depth: 0 }],
            frontier: vec![(0, canon)],
            depth: 0,
            sizes: vec![1],
        };
        (side, key)
    }

    /// Steps from the root to node `i`.
    fn path(&self, mut i: u32) -> Vec<Step> {
        let mut out = Vec::new();
        while let Some(step) = self.nodes[i as usize].step {
            out.push(step);
            i = self.nodes[i as usize].parent;
        }
        out.reverse();
        out
    }
}

/// Every allowed rewrite of a canonical diagram, in the fixed order:
/// schemas by id, forward before backward, sites in match order.
pub(crate) fn for_each_successor(
    d: &TangleDiagram,
    schemas: &[&MoveSchema],
    max_crossings: usize,
    pruned: &mut bool,
    mut f: impl FnMut(Step, TangleDiagram),
) {
    for schema in schemas {
        for dir in [Direction::Forward, Direction::Backward] {
            let after = d.crossing_count() as isize + schema.crossing_delta(dir);
            if after > max_crossings as isize {
                if !find_matches(d, schema, dir).is_empty() {
                    *pruned = true;
                }
                continue;
            }
            for (i, site) in find_matches(d, schema, dir).iter().enumerate() {
                if let Ok(r) = apply_unchecked(d, schema, site, dir) {
                    f(Step { id: schema.id, dir, site: i }, r.diagram);
                }
            }
        }
    }
}

pub fn search(catalog: &Catalog, p: &DerivationProblem) -> Result<SearchOutcome, DeriveError> {
    p.check()?;
    let start = Instant::now();
    let schemas: Vec<&MoveSchema> = p.allowed.iter().map(|&id| catalog.get(id)).collect();

    let (fwd, source_key) = Side::new(&p.source);
    let (bwd, goal_key) = Side::new(&p.goal);
    let mut sides = [fwd, bwd];
    let mut expanded = 0;
    let mut pruned = false;

    let stats = |sides: &[Side; 2], expanded: usize, bound_hit: BoundHit| SearchStats {
        expanded,
        visited: sides[0].nodes.len() + sides[1].nodes.len(),
        forward_frontiers: sides[0].sizes.clone(),
        backward_frontiers: sides[1].sizes.clone(),
        wall_time: start.elapsed(),
        bound_hit,
    };

    if source_key == goal_key {
        let cert = Certificate { problem: p.clone(), steps: Vec::new() };
        return Ok(SearchOutcome::Found(cert, stats(&sides, 0, BoundHit::None)));
    }

    loop {
        if sides[0].frontier.is_empty() || sides[1].frontier.is_empty() {
            let hit = if pruned { BoundHit::Crossings } else { BoundHit::None };
            return Ok(SearchOutcome::NotFound(stats(&sides, expanded, hit)));
        }
        if sides[0].depth + sides[1].depth >= p.max_depth {
            return Ok(SearchOutcome::NotFound(stats(&sides, expanded, BoundHit::Depth)));
        }
        let s = if sides[1].frontier.len() < sides[0].frontier.len() { 1 } else { 0 };
        let (a, b) = if s == 0 {
            let (x, y) = sides.split_at_mut(1);
            (&mut x[0], &y[0])
        } else {
            let (x, y) = sides.split_at_mut(1);
            (&mut y[0], &x[0])
        };

        let frontier = std::mem::take(&mut a.frontier);
        let depth = a.depth as u32 + 1;
        let mut next = Vec::new();
        // (total length, meeting key, node on side a, node on side b)
        let mut best: Option<(usize, CodeKey, u32, u32)> = None;
        for (idx, d) in frontier {
            expanded += 1;
            for_each_successor(&d, &schemas, p.max_crossings, &mut pruned, |step, r| {
                let (canon, key) = canonical_form_and_key(&r);
                if a.index.contains_key(&key) {
                    return;
                }
                let id = a.nodes.len() as u32;
                a.nodes.push(Node { parent: idx, step: Some(step), depth });
                if let Some(&j) = b.index.get(&key) {
                    let total = depth as usize + b.nodes[j as usize].depth as usize;
                    if best.as_ref().is_none_or(|(t, k, _, _)| (total, &key) < (*t, k)) {
                        best = Some((total, key.clone(), id, j));
                    }
                }
                a.index.insert(key, id);
                next.push((id, canon));
            });
        }
        a.sizes.push(next.len());
        a.frontier = next;
        a.depth += 1;

        if let Some((_, _, ia, ib)) = best {
            let (i_fwd, i_bwd) = if s == 0 { (ia, ib) } else { (ib, ia) };
            let steps = join(catalog, p, &sides, i_fwd, i_bwd)?;
            let cert = Certificate { problem: p.clone(), steps };
            return Ok(SearchOutcome::Found(cert, stats(&sides, expanded, BoundHit::None)));
        }
    }
}

/// Forward steps to the meeting state, then the backward tree walked in
/// reverse with every step inverted.
fn join(
    catalog: &Catalog,
    p: &DerivationProblem,
    sides: &[Side; 2],
    i_fwd: u32,
    i_bwd: u32,
) -> Result<Vec<Step>, DeriveError> {
    let mut steps = sides[0].path(i_fwd);
    let down = sides[1].path(i_bwd);
    // diagrams along the backward tree, goal first
    let mut chain = vec![canonical_form(&p.goal)];
    for st in &down {
        let cur = chain.last().expect("nonempty");
        let schema = catalog.get(st.id);
        let site = &find_matches(cur, schema, st.dir)[st.site];
        let r = apply_unchecked(cur, schema, site, st.dir)?;
        chain.push(canonical_form(&r.diagram));
    }
    for (k, st) in down.iter().enumerate().rev() {
        let schema = catalog.get(st.id);
        let site = inverse_site(&chain[k], &chain[k + 1], schema, st.dir)
            .expect("every rewrite can be undone at some site");
        steps.push(Step { id: st.id, dir: st.dir.reversed(), site });
    }
    Ok(steps)
}
