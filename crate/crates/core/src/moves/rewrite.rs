//! Excising a matched sub-tangle and gluing in a replacement.

use crate::canon::code_key;
use crate::diagram::{Edge, End, NodeId, NodeKind, TangleDiagram};
use crate::error::MoveError;

use super::site::{sites_for_shape, ArcInfo, EdgeRef, MatchSite, Shape};
use super::{Direction, MoveSchema};

/// Result of a rewrite. `inserted` lists the new ids of the replacement's
/// crossings, in replacement node order.
#[derive(Clone, Debug)]
pub struct Rewrite {
    pub diagram: TangleDiagram,
    pub inserted: Vec<NodeId>,
}

#[derive(Clone, Copy, Debug)]
enum Link {
    /// A host end outside the disk, or a replacement end inside it.
    Real(End),
    /// Runs straight to another boundary position without meeting a node.
    Chain(usize),
}

/// How each pattern boundary position connects to the rest of the host.
struct Cut {
    removed: Vec<bool>,
    cut_edges: Vec<bool>,
    cut_loops: usize,
    outside: Vec<Link>,
}

fn ends_of(host: &TangleDiagram, e: EdgeRef) -> Option<(End, End)> {
    match e {
        EdgeRef::Edge(i) => {
            let edge = host.edges()[i];
            Some((edge.tail, edge.head))
        }
        EdgeRef::Loop(_) => None,
    }
}

fn cut(host: &TangleDiagram, pat: &TangleDiagram, shape: &Shape, site: &MatchSite) -> Cut {
    let nb = pat.boundary().len();
    let mut removed = vec![false; host.nodes().len()];
    let mut cut_edges = vec![false; host.edges().len()];
    let mut cut_loops = 0;
    let mut outside = vec![Link::Chain(usize::MAX); nb];
    let mark = |e: EdgeRef, cut_edges: &mut Vec<bool>, cut_loops: &mut usize| match e {
        EdgeRef::Edge(i) => cut_edges[i] = true,
        EdgeRef::Loop(_) => *cut_loops += 1,
    };

    match (shape, site) {
        (Shape::Crossings { internal, .. }, MatchSite::Embedded { images }) => {
            let mut image_of = vec![None; host.nodes().len()];
            for (i, &(h, r)) in images.iter().enumerate() {
                removed[h] = true;
                image_of[h] = Some((i, r));
                for s in 0..4u8 {
                    cut_edges[host.edge_at(End::new(h, s))] = true;
                }
            }
            let mut pos = vec![usize::MAX; pat.nodes().len()];
            for (k, &b) in pat.boundary().iter().enumerate() {
                pos[b] = k;
            }
            for (k, &b) in pat.boundary().iter().enumerate() {
                let pd = pat.partner(End::new(b, 0));
                let i = internal.iter().position(|&v| v == pd.node).expect("stub on a crossing");
                let (h, r) = images[i];
                let q = host.partner(End::new(h, (pd.slot + r) % 4));
                outside[k] = match image_of[q.node] {
                    Some((j, rj)) => {
                        let back = End::new(internal[j], (q.slot + 4 - rj) % 4);
                        Link::Chain(pos[pat.partner(back).node])
                    }
                    None => Link::Real(q),
                };
            }
        }
        (Shape::Arc(arc), MatchSite::Arc { edge }) => {
            mark(*edge, &mut cut_edges, &mut cut_loops);
            match ends_of(host, *edge) {
                Some((t, h)) => {
                    outside[arc.tail] = Link::Real(t);
                    outside[arc.head] = Link::Real(h);
                }
                None => {
                    outside[arc.tail] = Link::Chain(arc.head);
                    outside[arc.head] = Link::Chain(arc.tail);
                }
            }
        }
        (Shape::Strip(pa, pb), MatchSite::Strip { a, b, a_first }) => {
            if a.edge != b.edge {
                for (arc, occ) in [(pa, a), (pb, b)] {
                    mark(occ.edge, &mut cut_edges, &mut cut_loops);
                    let (t, h) = ends_of(host, occ.edge).expect("distinct sides lie on edges");
                    outside[arc.tail] = Link::Real(t);
                    outside[arc.head] = Link::Real(h);
                }
            } else {
                mark(a.edge, &mut cut_edges, &mut cut_loops);
                // order of the two arcs along the edge, tail to head
                let walk_first_is_a = *a_first;
                let (x, y): (&ArcInfo, &ArcInfo) =
                    if walk_first_is_a == a.forward { (pa, pb) } else { (pb, pa) };
                outside[x.head] = Link::Chain(y.tail);
                outside[y.tail] = Link::Chain(x.head);
                match ends_of(host, a.edge) {
                    Some((t, h)) => {
                        outside[x.tail] = Link::Real(t);
                        outside[y.head] = Link::Real(h);
                    }
                    None => {
                        outside[x.tail] = Link::Chain(y.head);
                        outside[y.head] = Link::Chain(x.tail);
                    }
                }
            }
        }
        _ => unreachable!("site kind does not fit the pattern"),
    }
    Cut { removed, cut_edges, cut_loops, outside }
}

/// Glues `rep` into `host` in place of the pattern matched at `site`.
/// Returns `None` when the result would fall apart into several pieces.
fn glue(host: &TangleDiagram, pat: &TangleDiagram, shape: &Shape, site: &MatchSite, rep: &TangleDiagram) -> Option<Rewrite> {
    let c = cut(host, pat, shape, site);
    let nb = pat.boundary().len();

    let mut host_id = vec![usize::MAX; host.nodes().len()];
    let mut nodes: Vec<NodeKind> = Vec::with_capacity(host.nodes().len() + 3);
    for (v, &k) in host.nodes().iter().enumerate() {
        if !c.removed[v] {
            host_id[v] = nodes.len();
            nodes.push(k);
        }
    }
    let mut rep_id = vec![usize::MAX; rep.nodes().len()];
    let mut inserted = Vec::new();
    for (v, &k) in rep.nodes().iter().enumerate() {
        if k.is_crossing() {
            rep_id[v] = nodes.len();
            inserted.push(nodes.len());
            nodes.push(k);
        }
    }

    let mut edges: Vec<Edge> = Vec::with_capacity(host.edges().len() + 8);
    for (i, e) in host.edges().iter().enumerate() {
        if !c.cut_edges[i] {
            edges.push(Edge {
                tail: End::new(host_id[e.tail.node], e.tail.slot),
                head: End::new(host_id[e.head.node], e.head.slot),
            });
        }
    }
    let mut rpos = vec![usize::MAX; rep.nodes().len()];
    for (k, &b) in rep.boundary().iter().enumerate() {
        rpos[b] = k;
    }
    for e in rep.edges() {
        if rep.kind(e.tail.node).is_crossing() && rep.kind(e.head.node).is_crossing() {
            edges.push(Edge {
                tail: End::new(rep_id[e.tail.node], e.tail.slot),
                head: End::new(rep_id[e.head.node], e.head.slot),
            });
        }
    }
    let inside: Vec<Link> = rep
        .boundary()
        .iter()
        .map(|&b| {
            let q = rep.partner(End::new(b, 0));
            if rep.kind(q.node).is_crossing() {
                Link::Real(End::new(rep_id[q.node], q.slot))
            } else {
                Link::Chain(rpos[q.node])
            }
        })
        .collect();
    let outside: Vec<Link> = c
        .outside
        .iter()
        .map(|l| match *l {
            Link::Real(e) => Link::Real(End::new(host_id[e.node], e.slot)),
            chain => chain,
        })
        .collect();
    let flows_in: Vec<bool> = pat.boundary().iter().map(|&b| pat.is_outgoing(End::new(b, 0))).collect();

    let mut seen = vec![false; nb];
    let mut new_loops = 0;
    for start in 0..nb {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        // walk from `start` through its outside link, then through its inside link
        let mut walk = |first_outside: bool| -> Option<End> {
            let mut cur = start;
            let mut use_outside = first_outside;
            loop {
                let link = if use_outside { outside[cur] } else { inside[cur] };
                match link {
                    Link::Real(e) => return Some(e),
                    Link::Chain(j) => {
                        if j == start {
                            return None;
                        }
                        seen[j] = true;
                        cur = j;
                        use_outside = !use_outside;
                    }
                }
            }
        };
        let out_end = walk(true);
        let Some(out_end) = out_end else {
            new_loops += 1;
            continue;
        };
        let in_end = walk(false).expect("a path with one real end has two");
        let (tail, head) = if flows_in[start] { (out_end, in_end) } else { (in_end, out_end) };
        edges.push(Edge { tail, head });
    }

    let loops = host.loops() - c.cut_loops + new_loops;
    if loops > 0 && !nodes.is_empty() {
        return None;
    }
    edges.sort();
    let boundary = host.boundary().iter().map(|&b| host_id[b]).collect();
    let diagram = TangleDiagram::from_parts(nodes, edges, boundary, loops);
    if !diagram.is_connected() {
        return None;
    }
    debug_assert!(diagram.validate().is_ok(), "rewrite broke an invariant: {:?}", diagram.validate());
    Some(Rewrite { diagram, inserted })
}

/// Applies a site known to come from `find_matches`.
pub(crate) fn apply_unchecked(
    host: &TangleDiagram,
    schema: &MoveSchema,
    site: &MatchSite,
    dir: Direction,
) -> Result<Rewrite, MoveError> {
    let (pat, rep) = schema.sides(dir);
    glue(host, pat, schema.shape(dir), site, rep).ok_or(MoveError::Disconnects(schema.id))
}

/// Replaces the schema side matched at `site` by its other side.
pub fn apply_move(
    host: &TangleDiagram,
    schema: &MoveSchema,
    site: &MatchSite,
    dir: Direction,
) -> Result<Rewrite, MoveError> {
    let (pat, _) = schema.sides(dir);
    if !sites_for_shape(host, pat, schema.shape(dir)).contains(site) {
        return Err(MoveError::StaleSite(schema.id));
    }
    apply_unchecked(host, schema, site, dir)
}

/// Replaces the schema side matched at `site` by an arbitrary tangle with the
/// same boundary.
pub fn replace_at(
    host: &TangleDiagram,
    schema: &MoveSchema,
    site: &MatchSite,
    dir: Direction,
    replacement: &TangleDiagram,
) -> Result<TangleDiagram, MoveError> {
    let (pat, _) = schema.sides(dir);
    assert_eq!(pat.boundary_signature(), replacement.boundary_signature());
    if !sites_for_shape(host, pat, schema.shape(dir)).contains(site) {
        return Err(MoveError::StaleSite(schema.id));
    }
    glue(host, pat, schema.shape(dir), site, replacement)
        .map(|r| r.diagram)
        .ok_or(MoveError::Disconnects(schema.id))
}

/// Index of the first site of `after` at which applying `schema` against
/// `dir` gives back a diagram equivalent to `before`.
pub fn inverse_site(
    before: &TangleDiagram,
    after: &TangleDiagram,
    schema: &MoveSchema,
    dir: Direction,
) -> Option<usize> {
    let want = code_key(before);
    let back = dir.reversed();
    let (pat, _) = schema.sides(back);
    sites_for_shape(after, pat, schema.shape(back))
        .iter()
        .position(|s| apply_unchecked(after, schema, s, back).is_ok_and(|r| code_key(&r.diagram) == want))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canonical_form;
    use crate::moves::{catalog, find_matches};

    fn apply_first(d: &TangleDiagram, id: &str, dir: Direction) -> TangleDiagram {
        let m = catalog().lookup(id).unwrap();
        let site = &find_matches(d, m, dir)[0];
        apply_move(d, m, site, dir).unwrap().diagram
    }

    #[test]
    fn kink_on_the_unknot_and_back() {
        let m = catalog().lookup("V1a").unwrap();
        let u = TangleDiagram::unknot();
        let sites = find_matches(&u, m, Direction::Forward);
        assert!(!sites.is_empty());
        for s in &sites {
            let r = apply_move(&u, m, s, Direction::Forward).unwrap();
            assert_eq!(r.diagram.crossing_count(), 1);
            assert_eq!(r.inserted.len(), 1);
            assert!(r.diagram.validate().is_ok());
            let back = apply_first(&r.diagram, "V1a", Direction::Backward);
            assert_eq!(code_key(&back), code_key(&u));
        }
    }

    #[test]
    fn bigon_and_kink_give_three_virtual_crossings() {
        let u = TangleDiagram::unknot();
        // two arcs of a round circle facing each other always run antiparallel
        assert!(find_matches(&u, catalog().lookup("V2a").unwrap(), Direction::Forward).is_empty());
        let kinked = apply_first(&u, "V1a", Direction::Forward);
        let a = apply_first(&kinked, "V2a", Direction::Forward);
        let bigon = apply_first(&u, "V2b", Direction::Forward);
        assert_eq!(bigon.crossing_count(), 2);
        let b = apply_first(&bigon, "V1a", Direction::Forward);
        for d in [a, b] {
            assert_eq!((d.crossing_count(), d.virtual_count()), (3, 3));
            assert!(d.validate().is_ok());
        }
    }

    #[test]
    fn every_application_can_be_undone() {
        let mut d = apply_first(&TangleDiagram::unknot(), "V2b", Direction::Forward);
        d = canonical_form(&apply_first(&d, "C1a", Direction::Forward));
        d = canonical_form(&apply_first(&d, "C2a", Direction::Forward));
        for m in catalog().schemas() {
            for dir in [Direction::Forward, Direction::Backward] {
                for s in find_matches(&d, m, dir) {
                    let Ok(r) = apply_move(&d, m, &s, dir) else { continue };
                    assert!(inverse_site(&d, &r.diagram, m, dir).is_some(), "{} {dir}", m.id);
                }
            }
        }
    }

    #[test]
    fn stale_sites_are_rejected() {
        let m = catalog().lookup("V2a").unwrap();
        let d = apply_first(&TangleDiagram::unknot(), "V1a", Direction::Forward);
        let bogus = MatchSite::Arc { edge: EdgeRef::Edge(0) };
        assert_eq!(apply_move(&d, m, &bogus, Direction::Forward).unwrap_err(), MoveError::StaleSite(m.id));
    }
}
