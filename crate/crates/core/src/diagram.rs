//! Oriented tangle and knot diagrams stored as planar combinatorial maps.
//!
//! Every node carries a fixed number of half-edge slots numbered
//! counterclockwise: crossings (classical or virtual) have four, boundary
//! points of a tangle have one. Slots `0/2` and `1/3` are the two
//! through-strands of a crossing. Edges are directed along the strand
//! orientation, from the slot the strand leaves through to the slot it
//! enters.
//!
//! A tangle lives in a disk whose boundary points are listed
//! counterclockwise in [`TangleDiagram::boundary`]. For face tracing the
//! disk boundary is closed off by a circle through the boundary points; a
//! boundary node then has three darts in counterclockwise order
//! `[strand, towards previous, towards next]`.

use std::fmt;

use serde::Serialize;

use crate::error::DiagramError;

pub type NodeId = usize;

/// Which through-strand diagonal of a classical crossing passes over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Diagonal {
    /// Slots 0 and 2 carry the over-strand.
    Even,
    /// Slots 1 and 3 carry the over-strand.
    Odd,
}

impl Diagonal {
    pub fn parity(self) -> u8 {
        match self {
            Diagonal::Even => 0,
            Diagonal::Odd => 1,
        }
    }

    pub fn from_parity(p: u8) -> Self {
        if p.is_multiple_of(2) {
            Diagonal::Even
        } else {
            Diagonal::Odd
        }
    }

    pub fn contains(self, slot: u8) -> bool {
        slot % 2 == self.parity()
    }

    pub fn flipped(self) -> Self {
        Self::from_parity(self.parity() + 1)
    }

    /// The diagonal seen after renumbering slots so that old slot `by`
    /// becomes slot 0.
    pub fn shifted(self, by: u8) -> Self {
        Self::from_parity(self.parity() + by % 2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Classical { over: Diagonal },
    Virtual,
    Boundary,
}

impl NodeKind {
    pub fn degree(self) -> usize {
        match self {
            NodeKind::Boundary => 1,
            _ => 4,
        }
    }

    pub fn is_crossing(self) -> bool {
        !matches!(self, NodeKind::Boundary)
    }

    pub fn is_classical(self) -> bool {
        matches!(self, NodeKind::Classical { .. })
    }
}

/// One end of an edge: a slot of a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct End {
    pub node: NodeId,
    pub slot: u8,
}

impl End {
    pub fn new(node: NodeId, slot: u8) -> Self {
        End { node, slot }
    }
}

impl fmt::Display for End {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.node, self.slot)
    }
}

/// A directed edge; the strand runs from `tail` to `head`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub tail: End,
    pub head: End,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Port {
    pub edge: u32,
    /// The strand leaves the node through this slot.
    pub tail: bool,
}

/// Strand direction at a tangle boundary point, relative to the disk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Flow {
    In,
    Out,
}

/// Cyclic in/out pattern read counterclockwise around the disk.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoundarySignature(pub Vec<Flow>);

impl fmt::Display for BoundarySignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for flow in &self.0 {
            f.write_str(match flow {
                Flow::In => "i",
                Flow::Out => "o",
            })?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct TangleDiagram {
    nodes: Vec<NodeKind>,
    edges: Vec<Edge>,
    boundary: Vec<NodeId>,
    loops: usize,
    ports: Vec<[Option<Port>; 4]>,
}

/// Structural rule named by a validation failure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Rule {
    SlotRange,
    SlotUsage,
    ThroughStrand,
    Boundary,
    BoundaryBalance,
    Connectivity,
    Planarity,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::SlotRange => "slot range",
            Rule::SlotUsage => "slot usage",
            Rule::ThroughStrand => "through-strand rule",
            Rule::Boundary => "boundary",
            Rule::BoundaryBalance => "boundary balance",
            Rule::Connectivity => "connectivity",
            Rule::Planarity => "planarity",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: Rule,
    pub node: Option<NodeId>,
    pub edge: Option<usize>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rule)?;
        if let Some(n) = self.node {
            write!(f, " at node {n}")?;
        }
        if let Some(e) = self.edge {
            write!(f, " on edge {e}")?;
        }
        write!(f, ": {}", self.detail)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, rule: Rule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }

    fn push(&mut self, rule: Rule, node: Option<NodeId>, edge: Option<usize>, detail: String) {
        self.violations.push(Violation { rule, node, edge, detail });
    }
}

/// A dart of the closed-off map: a slot of a node, with boundary nodes
/// extended by the two circle darts.
pub(crate) type Dart = End;

impl TangleDiagram {
    /// Assembles a diagram without checking any invariant.
    pub fn from_parts(
        nodes: Vec<NodeKind>,
        edges: Vec<Edge>,
        boundary: Vec<NodeId>,
        loops: usize,
    ) -> Self {
        let mut ports = vec![[None; 4]; nodes.len()];
        for (i, e) in edges.iter().enumerate() {
            for (end, tail) in [(e.tail, true), (e.head, false)] {
                if end.node < nodes.len() && (end.slot as usize) < 4 {
                    let cell = &mut ports[end.node][end.slot as usize];
                    if cell.is_none() {
                        *cell = Some(Port { edge: i as u32, tail });
                    }
                }
            }
        }
        TangleDiagram { nodes, edges, boundary, loops, ports }
    }

    /// Assembles a diagram and rejects it unless every invariant holds.
    pub fn new(
        nodes: Vec<NodeKind>,
        edges: Vec<Edge>,
        boundary: Vec<NodeId>,
        loops: usize,
    ) -> Result<Self, DiagramError> {
        let d = Self::from_parts(nodes, edges, boundary, loops);
        let report = d.validate();
        match report.violations.into_iter().next() {
            None => Ok(d),
            Some(v) => Err(DiagramError::Invalid(v)),
        }
    }

    /// The crossingless unknot: one closed loop and nothing else.
    pub fn unknot() -> Self {
        Self::from_parts(Vec::new(), Vec::new(), Vec::new(), 1)
    }

    pub fn nodes(&self) -> &[NodeKind] {
        &self.nodes
    }

    pub fn kind(&self, n: NodeId) -> NodeKind {
        self.nodes[n]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn boundary(&self) -> &[NodeId] {
        &self.boundary
    }

    /// Closed strand components that meet no node.
    pub fn loops(&self) -> usize {
        self.loops
    }

    pub fn is_closed(&self) -> bool {
        self.boundary.is_empty()
    }

    pub fn crossing_count(&self) -> usize {
        self.nodes.iter().filter(|k| k.is_crossing()).count()
    }

    pub fn classical_count(&self) -> usize {
        self.nodes.iter().filter(|k| k.is_classical()).count()
    }

    pub fn virtual_count(&self) -> usize {
        self.nodes.iter().filter(|k| matches!(k, NodeKind::Virtual)).count()
    }

    pub(crate) fn port(&self, end: End) -> Port {
        self.ports[end.node][end.slot as usize].expect("slot in use")
    }

    /// The edge attached at `end`.
    pub fn edge_at(&self, end: End) -> usize {
        self.port(end).edge as usize
    }

    /// True when the strand leaves the node through `end`.
    pub fn is_outgoing(&self, end: End) -> bool {
        self.port(end).tail
    }

    /// The other end of the edge attached at `end`.
    pub fn partner(&self, end: End) -> End {
        let p = self.port(end);
        let e = &self.edges[p.edge as usize];
        if p.tail {
            e.head
        } else {
            e.tail
        }
    }

    pub fn boundary_signature(&self) -> BoundarySignature {
        BoundarySignature(
            self.boundary
                .iter()
                .map(|&b| if self.is_outgoing(End::new(b, 0)) { Flow::In } else { Flow::Out })
                .collect(),
        )
    }

    /// Right-hand sign of a classical crossing: `+1` when turning the
    /// over-strand direction a quarter turn counterclockwise gives the
    /// under-strand direction.
    pub fn crossing_sign(&self, n: NodeId) -> Result<i8, DiagramError> {
        let over = match self.nodes.get(n) {
            Some(NodeKind::Classical { over }) => *over,
            _ => return Err(DiagramError::NotAClassicalCrossing(n)),
        };
        let outgoing = |a: u8| {
            if self.is_outgoing(End::new(n, a)) {
                a
            } else {
                (a + 2) % 4
            }
        };
        let o = outgoing(over.parity());
        let u = outgoing(over.parity() + 1);
        Ok(if u == (o + 1) % 4 { 1 } else { -1 })
    }

    /// Same diagram with the boundary sequence rotated so that position `k`
    /// becomes position 0.
    pub fn rotate_boundary(&self, k: usize) -> Result<Self, DiagramError> {
        let n = self.boundary.len();
        if n == 0 {
            return Err(DiagramError::ClosedDiagram);
        }
        let k = k % n;
        let mut boundary = self.boundary[k..].to_vec();
        boundary.extend_from_slice(&self.boundary[..k]);
        Ok(TangleDiagram { boundary, ..self.clone() })
    }

    /// Position of each boundary node in the boundary sequence.
    fn boundary_positions(&self) -> Vec<Option<usize>> {
        let mut pos = vec![None; self.nodes.len()];
        for (i, &b) in self.boundary.iter().enumerate() {
            if b < pos.len() {
                pos[b] = Some(i);
            }
        }
        pos
    }

    pub(crate) fn closure(&self) -> Closure<'_> {
        let pos = self.boundary_positions();
        let mut offset = Vec::with_capacity(self.nodes.len() + 1);
        let mut acc = 0usize;
        for k in &self.nodes {
            offset.push(acc);
            acc += match k {
                NodeKind::Boundary => 3,
                _ => 4,
            };
        }
        offset.push(acc);
        Closure { d: self, pos, offset }
    }

    /// Faces of the closed-off map, each as its cyclic dart walk with the
    /// face on the left. Faces are ordered by their least dart and each walk
    /// starts there.
    pub(crate) fn faces(&self) -> Vec<Vec<Dart>> {
        self.closure().faces()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        let n = self.nodes.len();

        let mut used = vec![[0u8; 4]; n];
        for (i, e) in self.edges.iter().enumerate() {
            for end in [e.tail, e.head] {
                if end.node >= n {
                    r.push(Rule::SlotRange, None, Some(i), format!("unknown node {}", end.node));
                } else if end.slot as usize >= self.nodes[end.node].degree() {
                    r.push(
                        Rule::SlotRange,
                        Some(end.node),
                        Some(i),
                        format!("slot {} out of range", end.slot),
                    );
                } else {
                    used[end.node][end.slot as usize] += 1;
                }
            }
        }
        for (v, kind) in self.nodes.iter().enumerate() {
            for s in 0..kind.degree() {
                match used[v][s] {
                    1 => {}
                    0 => r.push(Rule::SlotUsage, Some(v), None, format!("slot {s} unused")),
                    k => r.push(Rule::SlotUsage, Some(v), None, format!("slot {s} used {k} times")),
                }
            }
        }
        if !r.is_ok() {
            return r;
        }

        for (v, kind) in self.nodes.iter().enumerate() {
            if !kind.is_crossing() {
                continue;
            }
            for a in 0..2u8 {
                let x = self.is_outgoing(End::new(v, a));
                let y = self.is_outgoing(End::new(v, a + 2));
                if x == y {
                    let what = if x { "outgoing" } else { "incoming" };
                    r.push(
                        Rule::ThroughStrand,
                        Some(v),
                        None,
                        format!("slots {a} and {} are both {what}", a + 2),
                    );
                }
            }
        }

        let pos = self.boundary_positions();
        let mut seen = vec![false; n];
        for &b in &self.boundary {
            if b >= n || self.nodes[b] != NodeKind::Boundary {
                r.push(Rule::Boundary, (b < n).then_some(b), None, "boundary lists a non-boundary node".into());
            } else if std::mem::replace(&mut seen[b], true) {
                r.push(Rule::Boundary, Some(b), None, "boundary point listed twice".into());
            }
        }
        for (v, kind) in self.nodes.iter().enumerate() {
            if *kind == NodeKind::Boundary && pos[v].is_none() {
                r.push(Rule::Boundary, Some(v), None, "boundary point missing from boundary order".into());
            }
        }
        if !r.is_ok() {
            return r;
        }

        let sig = self.boundary_signature();
        let ins = sig.0.iter().filter(|f| **f == Flow::In).count();
        if ins * 2 != sig.0.len() {
            r.push(
                Rule::BoundaryBalance,
                None,
                None,
                format!("{ins} incoming of {} boundary points", sig.0.len()),
            );
        }

        let components = self.components();
        if components + self.loops != 1 {
            r.push(
                Rule::Connectivity,
                None,
                None,
                format!("{} components (including {} free loops)", components + self.loops, self.loops),
            );
            return r;
        }

        if n > 0 {
            let faces = self.faces().len() as i64;
            let v = n as i64;
            let e = (self.edges.len() + self.boundary.len()) as i64;
            let chi = v - e + faces;
            if chi != 2 {
                r.push(
                    Rule::Planarity,
                    None,
                    None,
                    format!("Euler characteristic {chi} (V={v}, E={e}, F={faces})"),
                );
            }
        }
        r
    }

    /// One piece: a single node component, or a single free loop.
    pub(crate) fn is_connected(&self) -> bool {
        self.components() + self.loops == 1
    }

    /// Connected components of the node graph, boundary circle included.
    fn components(&self) -> usize {
        let n = self.nodes.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut union = |a: usize, b: usize| {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
            }
        };
        for e in &self.edges {
            union(e.tail.node, e.head.node);
        }
        for w in self.boundary.windows(2) {
            union(w[0], w[1]);
        }
        (0..n).filter(|&x| find(&mut parent, x) == x).count()
    }

    /// The same diagram under other names: old node `order[i]` becomes node
    /// `i`, and the slots of old node `v` are renumbered so that slot
    /// `shift[v]` becomes slot 0. Boundary nodes have a single slot and
    /// take shift 0.
    pub fn relabel(&self, order: &[NodeId], shift: &[u8]) -> Option<Self> {
        let n = self.nodes.len();
        let mut seen = vec![false; n];
        if order.len() != n || shift.len() != n {
            return None;
        }
        for &v in order {
            if v >= n || std::mem::replace(&mut seen[v], true) {
                return None;
            }
        }
        let ok = (0..n).all(|v| shift[v] < self.nodes[v].degree() as u8);
        ok.then(|| self.relabeled(order, shift))
    }

    /// Closed diagram with the given nodes relabeled: node `i` becomes
    /// `order[i]`'s replacement index and slots are shifted so that slot
    /// `shift[i]` becomes 0.
    pub(crate) fn relabeled(&self, order: &[NodeId], shift: &[u8]) -> Self {
        let mut new_id = vec![usize::MAX; self.nodes.len()];
        for (i, &old) in order.iter().enumerate() {
            new_id[old] = i;
        }
        let map_end = |e: End| {
            let s = shift[e.node];
            End::new(new_id[e.node], (e.slot + 4 - s) % 4)
        };
        let nodes = order
            .iter()
            .map(|&old| match self.nodes[old] {
                NodeKind::Classical { over } => NodeKind::Classical { over: over.shifted(shift[old]) },
                k => k,
            })
            .collect();
        let mut edges: Vec<Edge> = self
            .edges
            .iter()
            .map(|e| Edge { tail: map_end(e.tail), head: map_end(e.head) })
            .collect();
        edges.sort();
        let boundary = self.boundary.iter().map(|&b| new_id[b]).collect();
        Self::from_parts(nodes, edges, boundary, self.loops)
    }
}

/// The diagram with its boundary closed off by a circle.
pub(crate) struct Closure<'a> {
    d: &'a TangleDiagram,
    pos: Vec<Option<usize>>,
    offset: Vec<usize>,
}

impl Closure<'_> {
    pub fn degree(&self, n: NodeId) -> u8 {
        (self.offset[n + 1] - self.offset[n]) as u8
    }

    pub fn dart_count(&self) -> usize {
        *self.offset.last().unwrap()
    }

    pub fn index(&self, d: Dart) -> usize {
        self.offset[d.node] + d.slot as usize
    }

    pub fn partner(&self, d: Dart) -> Dart {
        if self.d.nodes[d.node] == NodeKind::Boundary && d.slot > 0 {
            let i = self.pos[d.node].expect("listed boundary point");
            let m = self.d.boundary.len();
            return if d.slot == 1 {
                End::new(self.d.boundary[(i + m - 1) % m], 2)
            } else {
                End::new(self.d.boundary[(i + 1) % m], 1)
            };
        }
        self.d.partner(d)
    }

    /// Next dart along the face on the left of `d`.
    pub fn face_next(&self, d: Dart) -> Dart {
        let p = self.partner(d);
        let deg = self.degree(p.node);
        End::new(p.node, (p.slot + deg - 1) % deg)
    }

    pub fn faces(&self) -> Vec<Vec<Dart>> {
        let total = self.dart_count();
        let mut seen = vec![false; total];
        let mut faces = Vec::new();
        for n in 0..self.d.nodes.len() {
            for s in 0..self.degree(n) {
                let start = End::new(n, s);
                if seen[self.index(start)] {
                    continue;
                }
                let mut walk = Vec::new();
                let mut cur = start;
                loop {
                    seen[self.index(cur)] = true;
                    walk.push(cur);
                    cur = self.face_next(cur);
                    if cur == start {
                        break;
                    }
                }
                faces.push(walk);
            }
        }
        faces
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(t: (usize, u8), h: (usize, u8)) -> Edge {
        Edge { tail: End::new(t.0, t.1), head: End::new(h.0, h.1) }
    }

    /// Arc b0 -> b1 with a virtual kink whose loop joins slots 1 and 2.
    fn kink() -> TangleDiagram {
        TangleDiagram::from_parts(
            vec![NodeKind::Boundary, NodeKind::Boundary, NodeKind::Virtual],
            vec![e((0, 0), (2, 0)), e((2, 2), (2, 1)), e((2, 3), (1, 0))],
            vec![0, 1],
            0,
        )
    }

    #[test]
    fn unknot_is_valid() {
        assert!(TangleDiagram::unknot().validate().is_ok());
    }

    #[test]
    fn kink_is_valid_with_three_faces() {
        let d = kink();
        assert!(d.validate().is_ok(), "{:?}", d.validate());
        // loop interior, two disk regions and the outside of the disk
        assert_eq!(d.faces().len(), 4);
    }

    #[test]
    fn detects_through_strand_violation() {
        // slots 0 and 2 both incoming
        let d = TangleDiagram::from_parts(
            vec![NodeKind::Boundary, NodeKind::Boundary, NodeKind::Virtual],
            vec![e((0, 0), (2, 0)), e((2, 1), (2, 2)), e((2, 3), (1, 0))],
            vec![0, 1],
            0,
        );
        let r = d.validate();
        assert!(r.has(Rule::ThroughStrand), "{r:?}");
        assert_eq!(r.violations[0].node, Some(2));
    }

    #[test]
    fn detects_unused_and_doubled_slots() {
        let d = TangleDiagram::from_parts(
            vec![NodeKind::Boundary, NodeKind::Boundary],
            vec![e((0, 0), (1, 0)), e((0, 0), (1, 0))],
            vec![0, 1],
            0,
        );
        assert!(d.validate().has(Rule::SlotUsage));
        let d = TangleDiagram::from_parts(vec![NodeKind::Virtual], vec![e((0, 0), (0, 4))], vec![], 0);
        assert!(d.validate().has(Rule::SlotRange));
    }

    #[test]
    fn detects_non_planar_rotation() {
        // Gauss word 1 2 1 2 drawn with both crossings virtual needs a torus
        let d = TangleDiagram::from_parts(
            vec![NodeKind::Virtual, NodeKind::Virtual],
            vec![e((0, 0), (1, 2)), e((1, 0), (0, 1)), e((0, 3), (1, 3)), e((1, 1), (0, 2))],
            vec![],
            0,
        );
        let r = d.validate();
        assert!(r.has(Rule::Planarity), "{r:?}");
    }

    /// One classical crossing with slot `k` wired to boundary point `k`.
    fn lone_crossing(over: Diagonal, reversed: bool) -> TangleDiagram {
        let strands = [(0u8, 2u8), (1, 3)];
        let mut edges = vec![];
        for (a, b) in strands {
            let (ba, bb) = (1 + a as usize, 1 + b as usize);
            if reversed {
                edges.push(e((ba, 0), (0, a)));
                edges.push(e((0, b), (bb, 0)));
            } else {
                edges.push(e((0, a), (ba, 0)));
                edges.push(e((bb, 0), (0, b)));
            }
        }
        let mut nodes = vec![NodeKind::Classical { over }];
        nodes.extend([NodeKind::Boundary; 4]);
        TangleDiagram::from_parts(nodes, edges, vec![1, 2, 3, 4], 0)
    }

    #[test]
    fn sign_convention() {
        // over strand leaves through slot 0 ("up"), under strand leaves
        // through slot 1 ("left"): positive.
        let d = lone_crossing(Diagonal::Even, false);
        assert!(d.validate().is_ok(), "{:?}", d.validate());
        assert_eq!(d.crossing_sign(0).unwrap(), 1);
        assert_eq!(lone_crossing(Diagonal::Even, true).crossing_sign(0).unwrap(), 1);
        assert_eq!(lone_crossing(Diagonal::Odd, false).crossing_sign(0).unwrap(), -1);
        assert!(matches!(kink().crossing_sign(2), Err(DiagramError::NotAClassicalCrossing(2))));
        assert!(matches!(kink().crossing_sign(0), Err(DiagramError::NotAClassicalCrossing(0))));
    }

    #[test]
    fn rotate_boundary_requires_tangle() {
        assert!(matches!(TangleDiagram::unknot().rotate_boundary(0), Err(DiagramError::ClosedDiagram)));
        let d = kink().rotate_boundary(1).unwrap();
        assert_eq!(d.boundary(), &[1, 0]);
        assert!(d.validate().is_ok());
    }
}
