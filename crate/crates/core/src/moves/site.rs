//! Locating schema sides inside host diagrams.
//!
//! Patterns with crossings are matched by anchoring their first crossing on
//! every host crossing and rotation, then propagating along internal edges.
//! Crossingless patterns cannot be anchored on nodes: a single arc fits on
//! any host edge, and a pair of arcs fits on any two edge sides that face
//! the same region (the strip between them is where a bigon opens).

use serde::Serialize;

use crate::diagram::{End, NodeId, NodeKind, TangleDiagram};

use super::{Direction, MoveSchema};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum EdgeRef {
    Edge(usize),
    /// A closed loop without nodes.
    Loop(usize),
}

/// One side of a host edge: the edge walked forward or backward, with the
/// face of interest on the left.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Occurrence {
    pub edge: EdgeRef,
    pub forward: bool,
}

/// Where a pattern sits inside a host.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum MatchSite {
    /// Host node and slot rotation for every pattern crossing, in pattern
    /// node order. Pattern slot `s` lands on host slot `s + rotation`.
    Embedded { images: Vec<(NodeId, u8)> },
    /// The single pattern arc cuts this host edge.
    Arc { edge: EdgeRef },
    /// The two pattern arcs cut these edge sides of one host face. When both
    /// lie on the same side, `a_first` says whether arc A comes first along
    /// the face walk.
    Strip { a: Occurrence, b: Occurrence, a_first: bool },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct ArcInfo {
    pub tail: usize,
    pub head: usize,
    /// Walking the strip face with it on the left runs along the arc.
    pub forward: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct PlanStep {
    pub from: usize,
    pub slot: u8,
    pub to: usize,
    pub to_slot: u8,
}

/// Precomputed matching data for one schema side.
#[derive(Clone, Debug)]
pub(crate) enum Shape {
    Crossings {
        /// Pattern crossing nodes in node order.
        internal: Vec<NodeId>,
        /// Internal edges to follow from the anchor, indices into `internal`.
        plan: Vec<PlanStep>,
    },
    Arc(ArcInfo),
    Strip(ArcInfo, ArcInfo),
}

fn position(d: &TangleDiagram, node: NodeId) -> usize {
    d.boundary().iter().position(|&b| b == node).expect("boundary node")
}

impl Shape {
    pub fn of(p: &TangleDiagram) -> Shape {
        let internal: Vec<NodeId> = (0..p.nodes().len()).filter(|&v| p.kind(v).is_crossing()).collect();
        if !internal.is_empty() {
            let mut local = vec![usize::MAX; p.nodes().len()];
            for (i, &v) in internal.iter().enumerate() {
                local[v] = i;
            }
            let mut seen = vec![false; internal.len()];
            let mut queue = vec![0usize];
            seen[0] = true;
            let mut plan = Vec::new();
            let mut done = std::collections::HashSet::new();
            let mut head = 0;
            while head < queue.len() {
                let i = queue[head];
                head += 1;
                for s in 0..4u8 {
                    let here = End::new(internal[i], s);
                    let there = p.partner(here);
                    if !p.kind(there.node).is_crossing() {
                        continue;
                    }
                    let edge = p.edge_at(here);
                    if !done.insert(edge) {
                        continue;
                    }
                    let j = local[there.node];
                    plan.push(PlanStep { from: i, slot: s, to: j, to_slot: there.slot });
                    if !seen[j] {
                        seen[j] = true;
                        queue.push(j);
                    }
                }
            }
            assert!(seen.iter().all(|&x| x), "pattern crossings must be connected");
            assert!(
                p.boundary().iter().all(|&b| p.kind(p.partner(End::new(b, 0)).node).is_crossing()),
                "patterns with crossings may not contain bare arcs"
            );
            return Shape::Crossings { internal, plan };
        }

        let arcs: Vec<(usize, usize)> = p
            .edges()
            .iter()
            .map(|e| (position(p, e.tail.node), position(p, e.head.node)))
            .collect();
        match arcs.len() {
            1 => Shape::Arc(ArcInfo { tail: arcs[0].0, head: arcs[0].1, forward: true }),
            2 => {
                // the face touching both arcs is the strip between them
                let darts = |k: usize| {
                    let e = p.edges()[k];
                    [(e.tail, true), (e.head, false)]
                };
                let faces = p.faces();
                for face in &faces {
                    let fa = darts(0).into_iter().find(|(d, _)| face.contains(d));
                    let fb = darts(1).into_iter().find(|(d, _)| face.contains(d));
                    if let (Some((_, fa)), Some((_, fb))) = (fa, fb) {
                        return Shape::Strip(
                            ArcInfo { tail: arcs[0].0, head: arcs[0].1, forward: fa },
                            ArcInfo { tail: arcs[1].0, head: arcs[1].1, forward: fb },
                        );
                    }
                }
                panic!("two arcs in a disk always share a face")
            }
            n => panic!("unsupported crossingless pattern with {n} arcs"),
        }
    }
}

fn kind_fits(pattern: NodeKind, host: NodeKind, rot: u8) -> bool {
    match (pattern, host) {
        (NodeKind::Virtual, NodeKind::Virtual) => true,
        (NodeKind::Classical { over: p }, NodeKind::Classical { over: h }) => h == p.shifted(rot),
        _ => false,
    }
}

fn embed(
    host: &TangleDiagram,
    pat: &TangleDiagram,
    internal: &[NodeId],
    plan: &[PlanStep],
    anchor: (NodeId, u8),
    used: &mut [bool],
) -> Option<Vec<(NodeId, u8)>> {
    let mut images: Vec<Option<(NodeId, u8)>> = vec![None; internal.len()];
    images[0] = Some(anchor);
    let mut taken = vec![anchor.0];
    used[anchor.0] = true;
    let ok = (|| {
        for st in plan {
            let (h, r) = images[st.from]?;
            let there = host.partner(End::new(h, (st.slot + r) % 4));
            if !host.kind(there.node).is_crossing() {
                return None;
            }
            let rot = (there.slot + 4 - st.to_slot) % 4;
            match images[st.to] {
                Some(img) => {
                    if img != (there.node, rot) {
                        return None;
                    }
                }
                None => {
                    if used[there.node] || !kind_fits(pat.kind(internal[st.to]), host.kind(there.node), rot) {
                        return None;
                    }
                    used[there.node] = true;
                    taken.push(there.node);
                    images[st.to] = Some((there.node, rot));
                }
            }
        }
        let images: Vec<(NodeId, u8)> = images.into_iter().collect::<Option<_>>()?;
        for (i, &(h, r)) in images.iter().enumerate() {
            for s in 0..4u8 {
                if pat.is_outgoing(End::new(internal[i], s)) != host.is_outgoing(End::new(h, (s + r) % 4)) {
                    return None;
                }
            }
        }
        Some(images)
    })();
    for t in taken {
        used[t] = false;
    }
    ok
}

/// Strand sides grouped by host face, in face walk order.
pub(crate) fn face_occurrences(host: &TangleDiagram) -> Vec<Vec<Occurrence>> {
    if host.nodes().is_empty() {
        return (0..host.loops())
            .flat_map(|i| {
                [true, false].map(|forward| vec![Occurrence { edge: EdgeRef::Loop(i), forward }])
            })
            .collect();
    }
    host.faces()
        .into_iter()
        .map(|walk| {
            walk.into_iter()
                .filter(|d| host.kind(d.node).is_crossing() || d.slot == 0)
                .map(|d| Occurrence { edge: EdgeRef::Edge(host.edge_at(d)), forward: host.is_outgoing(d) })
                .collect::<Vec<_>>()
        })
        .filter(|occ| !occ.is_empty())
        .collect()
}

pub(crate) fn sites_for_shape(host: &TangleDiagram, pat: &TangleDiagram, shape: &Shape) -> Vec<MatchSite> {
    let mut out = Vec::new();
    match shape {
        Shape::Crossings { internal, plan } => {
            let anchor_kind = pat.kind(internal[0]);
            let mut used = vec![false; host.nodes().len()];
            for h in 0..host.nodes().len() {
                for r in 0..4u8 {
                    if !kind_fits(anchor_kind, host.kind(h), r) {
                        continue;
                    }
                    if let Some(images) = embed(host, pat, internal, plan, (h, r), &mut used) {
                        out.push(MatchSite::Embedded { images });
                    }
                }
            }
        }
        Shape::Arc(_) => {
            out.extend((0..host.edges().len()).map(|e| MatchSite::Arc { edge: EdgeRef::Edge(e) }));
            out.extend((0..host.loops()).map(|l| MatchSite::Arc { edge: EdgeRef::Loop(l) }));
        }
        Shape::Strip(a, b) => {
            for occ in face_occurrences(host) {
                for (i, oa) in occ.iter().enumerate() {
                    if oa.forward != a.forward {
                        continue;
                    }
                    for (j, ob) in occ.iter().enumerate() {
                        if ob.forward != b.forward {
                            continue;
                        }
                        if i == j {
                            for a_first in [true, false] {
                                out.push(MatchSite::Strip { a: *oa, b: *ob, a_first });
                            }
                        } else if oa.edge != ob.edge {
                            out.push(MatchSite::Strip { a: *oa, b: *ob, a_first: true });
                        }
                    }
                }
            }
        }
    }
    out
}

/// Every place the schema side for `dir` occurs in `host`, in a
/// deterministic order that depends only on the host's labeling.
pub fn find_matches(host: &TangleDiagram, schema: &MoveSchema, dir: Direction) -> Vec<MatchSite> {
    let (pat, _) = schema.sides(dir);
    sites_for_shape(host, pat, schema.shape(dir))
}
