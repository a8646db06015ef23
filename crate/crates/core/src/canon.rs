//! Relabel-invariant fingerprints and canonical relabelings.
//!
//! A diagram is traversed breadth first. Each node is visited through an
//! arrival slot, and its slots are read counterclockwise starting there, so
//! the traversal never looks at node ids. Tangles seed the queue with the
//! boundary points in boundary order (disk isotopy with a fixed boundary);
//! closed diagrams try every dart as the root and keep the least code
//! (isotopy on the sphere).

use std::cmp::Ordering;
use std::fmt;

use crate::diagram::{End, NodeId, NodeKind, TangleDiagram};
use crate::error::DiagramError;

/// Text fingerprint; equal codes mean equivalent diagrams.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCode(pub String);

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Compact binary form of a canonical code, used as a hash key in search.
pub type CodeKey = Box<[u8]>;

const KIND_BOUNDARY: u32 = 0;
const KIND_VIRTUAL: u32 = 1;
const KIND_OVER_EVEN: u32 = 2;
const KIND_OVER_ODD: u32 = 3;

struct Labeling {
    order: Vec<NodeId>,
    shift: Vec<u8>,
}

/// Emits the traversal tokens. When `bound` is given the traversal stops as
/// soon as its output is known to compare greater, returning `None`.
fn traverse(
    d: &TangleDiagram,
    root: Option<End>,
    bound: Option<&[u32]>,
    out: &mut Vec<u32>,
) -> Option<Labeling> {
    out.clear();
    let n = d.nodes().len();
    let mut index = vec![u32::MAX; n];
    let mut shift = vec![0u8; n];
    let mut order = Vec::with_capacity(n);

    let mut tie = true;
    macro_rules! emit {
        ($tok:expr) => {{
            let tok: u32 = $tok;
            if tie {
                if let Some(b) = bound {
                    match b.get(out.len()).map(|x| tok.cmp(x)) {
                        Some(Ordering::Less) => tie = false,
                        Some(Ordering::Greater) | None => return None,
                        Some(Ordering::Equal) => {}
                    }
                }
            }
            out.push(tok);
        }};
    }

    emit!(d.is_closed() as u32);
    emit!(d.boundary().len() as u32);
    emit!(d.loops() as u32);

    match root {
        None => {
            for &b in d.boundary() {
                index[b] = order.len() as u32;
                order.push(b);
            }
        }
        Some(r) => {
            index[r.node] = 0;
            shift[r.node] = r.slot;
            order.push(r.node);
        }
    }

    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        let kind = d.kind(v);
        emit!(match kind {
            NodeKind::Boundary => KIND_BOUNDARY,
            NodeKind::Virtual => KIND_VIRTUAL,
            NodeKind::Classical { over } => {
                if over.shifted(shift[v]).parity() == 0 {
                    KIND_OVER_EVEN
                } else {
                    KIND_OVER_ODD
                }
            }
        });
        let deg = kind.degree() as u8;
        for r in 0..deg {
            let here = End::new(v, (shift[v] + r) % deg);
            let there = d.partner(here);
            let w = there.node;
            if index[w] == u32::MAX {
                index[w] = order.len() as u32;
                shift[w] = there.slot;
                order.push(w);
            }
            let wdeg = d.kind(w).degree() as u8;
            emit!(index[w]);
            emit!(((there.slot + wdeg - shift[w]) % wdeg) as u32);
            emit!(d.is_outgoing(here) as u32);
        }
    }
    if let Some(b) = bound {
        if tie && out.len() > b.len() {
            return None;
        }
    }
    Some(Labeling { order, shift })
}

/// Tokens and labeling of the least traversal.
fn best_traversal(d: &TangleDiagram) -> (Vec<u32>, Labeling) {
    let mut scratch = Vec::new();
    if !d.is_closed() || d.nodes().is_empty() {
        let lab = traverse(d, None, None, &mut scratch).expect("unbounded traversal");
        return (scratch, lab);
    }
    let mut best: Option<(Vec<u32>, Labeling)> = None;
    for v in 0..d.nodes().len() {
        for s in 0..4u8 {
            let bound = best.as_ref().map(|b| b.0.as_slice());
            if let Some(lab) = traverse(d, Some(End::new(v, s)), bound, &mut scratch) {
                if best.as_ref().is_none_or(|b| scratch < b.0) {
                    best = Some((scratch.clone(), lab));
                }
            }
        }
    }
    best.expect("closed diagram with nodes has a root")
}

fn render(tokens: &[u32]) -> String {
    let mut s = String::new();
    let (closed, nb, loops) = (tokens[0], tokens[1], tokens[2]);
    if closed == 1 {
        s.push('C');
    } else {
        s.push_str(&format!("T{nb}"));
    }
    if loops > 0 {
        s.push_str(&format!("L{loops}"));
    }
    s.push(':');
    let mut i = 3;
    let mut first = true;
    while i < tokens.len() {
        if !first {
            s.push(';');
        }
        first = false;
        let (c, deg) = match tokens[i] {
            KIND_BOUNDARY => ('b', 1),
            KIND_VIRTUAL => ('v', 4),
            KIND_OVER_EVEN => ('x', 4),
            _ => ('y', 4),
        };
        s.push(c);
        i += 1;
        for r in 0..deg {
            if r > 0 {
                s.push(',');
            }
            let dir = if tokens[i + 2] == 1 { '>' } else { '<' };
            s.push_str(&format!("{}.{}{}", tokens[i], tokens[i + 1], dir));
            i += 3;
        }
    }
    s
}

fn pack(tokens: &[u32]) -> CodeKey {
    let mut out = Vec::with_capacity(tokens.len() + 4);
    for &t in tokens {
        let mut t = t;
        loop {
            let byte = (t & 0x7f) as u8;
            t >>= 7;
            if t == 0 {
                out.push(byte);
                break;
            }
            out.push(byte | 0x80);
        }
    }
    out.into_boxed_slice()
}

/// Canonical code of a diagram. The diagram must be valid.
pub fn canonicalize(d: &TangleDiagram) -> Result<CanonicalCode, DiagramError> {
    if let Some(v) = d.validate().violations.into_iter().next() {
        return Err(DiagramError::Invalid(v));
    }
    Ok(code_unchecked(d))
}

pub(crate) fn code_unchecked(d: &TangleDiagram) -> CanonicalCode {
    CanonicalCode(render(&best_traversal(d).0))
}

/// Binary key equivalent to the canonical code.
pub fn code_key(d: &TangleDiagram) -> CodeKey {
    pack(&best_traversal(d).0)
}

/// The diagram relabeled along its canonical traversal: node ids follow
/// discovery order and every node's arrival slot becomes slot 0. Equivalent
/// diagrams have identical canonical forms.
pub fn canonical_form(d: &TangleDiagram) -> TangleDiagram {
    let (_, lab) = best_traversal(d);
    relabel(d, &lab)
}

/// Canonical form together with its key.
pub fn canonical_form_and_key(d: &TangleDiagram) -> (TangleDiagram, CodeKey) {
    let (tokens, lab) = best_traversal(d);
    (relabel(d, &lab), pack(&tokens))
}

fn relabel(d: &TangleDiagram, lab: &Labeling) -> TangleDiagram {
    let mut shift = vec![0u8; d.nodes().len()];
    for &v in &lab.order {
        shift[v] = lab.shift[v];
    }
    d.relabeled(&lab.order, &shift)
}

/// True iff both diagrams have the same canonical code.
pub fn is_equivalent(a: &TangleDiagram, b: &TangleDiagram) -> Result<bool, DiagramError> {
    let (sa, sb) = (a.boundary_signature(), b.boundary_signature());
    if a.is_closed() != b.is_closed() || sa != sb {
        return Err(DiagramError::SignatureMismatch(sa.to_string(), sb.to_string()));
    }
    Ok(canonicalize(a)? == canonicalize(b)?)
}
