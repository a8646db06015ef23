//! A line-oriented text format for diagrams.
//!
//! ```text
//! tangle 2            # or `closed`
//! b 0
//! b 1
//! v 2                 # virtual crossing
//! x 3 over=02         # classical crossing, over-strand on slots 0 and 2
//! e 1.0 2.0           # strand runs from node 1 slot 0 to node 2 slot 0
//! loop                # a free closed loop with no crossings
//! boundary 0 1        # tangles only, counterclockwise
//! ```
//!
//! Node ids are arbitrary non-negative integers. `#` starts a comment.

use std::collections::HashMap;

use crate::canon::canonical_form;
use crate::diagram::{Diagonal, Edge, End, NodeId, NodeKind, TangleDiagram};
use crate::error::TdfError;

/// Deterministic text for `d`: nodes appear in canonical traversal order,
/// so equivalent diagrams serialize byte-identically.
pub fn serialize_tdf(d: &TangleDiagram) -> String {
    let c = canonical_form(d);
    let mut s = if c.is_closed() { "closed\n".to_string() } else { format!("tangle {}\n", c.boundary().len()) };
    for (i, k) in c.nodes().iter().enumerate() {
        match k {
            NodeKind::Classical { over: Diagonal::Even } => s.push_str(&format!("x {i} over=02\n")),
            NodeKind::Classical { over: Diagonal::Odd } => s.push_str(&format!("x {i} over=13\n")),
            NodeKind::Virtual => s.push_str(&format!("v {i}\n")),
            NodeKind::Boundary => s.push_str(&format!("b {i}\n")),
        }
    }
    for e in c.edges() {
        s.push_str(&format!("e {} {}\n", e.tail, e.head));
    }
    for _ in 0..c.loops() {
        s.push_str("loop\n");
    }
    if !c.is_closed() {
        let ids: Vec<String> = c.boundary().iter().map(NodeId::to_string).collect();
        s.push_str(&format!("boundary {}\n", ids.join(" ")));
    }
    s
}

pub fn parse_tdf(text: &str) -> Result<TangleDiagram, TdfError> {
    let mut header: Option<Option<usize>> = None;
    let mut ids: HashMap<usize, NodeId> = HashMap::new();
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let mut loops = 0;
    let mut boundary: Option<Vec<NodeId>> = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let syntax = |message: String| TdfError::Syntax { line, message };
        let body = raw.split('#').next().unwrap_or("").trim();
        let words: Vec<&str> = body.split_whitespace().collect();
        let Some((&kw, args)) = words.split_first() else { continue };

        if header.is_none() {
            header = Some(match (kw, args) {
                ("closed", []) => None,
                ("tangle", [n]) => Some(n.parse().map_err(|_| syntax(format!("bad boundary count {n:?}")))?),
                _ => return Err(syntax("expected `closed` or `tangle <n>` first".into())),
            });
            continue;
        }
        if boundary.is_some() {
            return Err(syntax("nothing may follow the boundary line".into()));
        }
        let node_id = |w: &str| -> Result<usize, TdfError> {
            w.parse().map_err(|_| syntax(format!("bad node id {w:?}")))
        };
        let lookup = |w: &str| -> Result<NodeId, TdfError> {
            let id = node_id(w)?;
            ids.get(&id).copied().ok_or_else(|| syntax(format!("undeclared node {id}")))
        };
        match (kw, args) {
            ("x" | "v" | "b", [id, rest @ ..]) => {
                let kind = match (kw, rest) {
                    ("x", ["over=02"]) => NodeKind::Classical { over: Diagonal::Even },
                    ("x", ["over=13"]) => NodeKind::Classical { over: Diagonal::Odd },
                    ("x", _) => return Err(syntax("expected `x <id> over=02|13`".into())),
                    ("v", []) => NodeKind::Virtual,
                    ("b", []) => NodeKind::Boundary,
                    _ => return Err(syntax(format!("unexpected arguments after `{kw} {id}`"))),
                };
                let id = node_id(id)?;
                if ids.insert(id, nodes.len()).is_some() {
                    return Err(syntax(format!("node {id} declared twice")));
                }
                nodes.push(kind);
            }
            ("e", [a, b]) => {
                let end = |w: &str| -> Result<End, TdfError> {
                    let (n, s) = w.split_once('.').ok_or_else(|| syntax(format!("expected <node>.<slot>, got {w:?}")))?;
                    let node = lookup(n)?;
                    let slot: u8 = s.parse().map_err(|_| syntax(format!("bad slot {s:?}")))?;
                    if slot as usize >= nodes[node].degree() {
                        return Err(syntax(format!("slot {slot} out of range for node {n}")));
                    }
                    Ok(End::new(node, slot))
                };
                let tail = end(a)?;
                let head = end(b)?;
                edges.push(Edge { tail, head });
            }
            ("loop", []) => loops += 1,
            ("boundary", list) => {
                if header == Some(None) {
                    return Err(syntax("a closed diagram has no boundary".into()));
                }
                boundary = Some(list.iter().map(|w| lookup(w)).collect::<Result<_, _>>()?);
            }
            _ => return Err(syntax(format!("unrecognized line {body:?}"))),
        }
    }

    let end_line = text.lines().count().max(1);
    let header = header.ok_or(TdfError::Syntax { line: end_line, message: "empty document".into() })?;
    let boundary = boundary.unwrap_or_default();
    if let Some(n) = header {
        if boundary.len() != n {
            let message = format!("header declares {n} boundary points, boundary line lists {}", boundary.len());
            return Err(TdfError::Syntax { line: end_line, message });
        }
    }
    let d = TangleDiagram::from_parts(nodes, edges, boundary, loops);
    match d.validate().violations.into_iter().next() {
        Some(v) => Err(TdfError::Validation(v)),
        None => Ok(d),
    }
}
