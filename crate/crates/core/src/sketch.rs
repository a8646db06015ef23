//! Builds diagrams from polyline drawings.
//!
//! Strands are polylines in the plane. Open strands must start and end on
//! the unit circle; their endpoints become the tangle boundary, ordered
//! counterclockwise by angle. Self- and mutual intersections of the
//! polylines become crossings, and the caller decides for each one whether
//! it is virtual or which pass goes over. Slot order and orientation are
//! read off the geometry, which keeps hand-written fixtures honest.

use crate::diagram::{Diagonal, Edge, End, NodeKind, TangleDiagram};
use crate::error::DiagramError;

pub type Point = (f64, f64);

#[derive(Clone, Debug)]
struct Stroke {
    points: Vec<Point>,
    closed: bool,
}

/// One pass of a strand through a crossing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pass {
    pub strand: usize,
    /// Segment index plus the fractional position inside the segment.
    pub param: f64,
}

/// An intersection found in the drawing. `first` precedes `second` in
/// (strand, param) order.
#[derive(Clone, Copy, Debug)]
pub struct CrossingInfo {
    pub index: usize,
    pub point: Point,
    pub first: Pass,
    pub second: Pass,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    Virtual,
    Classical { first_over: bool },
}

#[derive(Clone, Debug, Default)]
pub struct Sketch {
    strokes: Vec<Stroke>,
}

const EPS: f64 = 1e-9;

fn segment_intersection(p: Point, p2: Point, q: Point, q2: Point) -> Option<(f64, f64, Point)> {
    let r = (p2.0 - p.0, p2.1 - p.1);
    let s = (q2.0 - q.0, q2.1 - q.1);
    let denom = r.0 * s.1 - r.1 * s.0;
    if denom.abs() < EPS {
        return None;
    }
    let qp = (q.0 - p.0, q.1 - p.1);
    let t = (qp.0 * s.1 - qp.1 * s.0) / denom;
    let u = (qp.0 * r.1 - qp.1 * r.0) / denom;
    if t > EPS && t < 1.0 - EPS && u > EPS && u < 1.0 - EPS {
        Some((t, u, (p.0 + t * r.0, p.1 + t * r.1)))
    } else {
        None
    }
}

impl Sketch {
    pub fn new() -> Self {
        Self::default()
    }

    /// Open strand, oriented from the first point to the last.
    pub fn arc(mut self, points: &[Point]) -> Self {
        self.strokes.push(Stroke { points: points.to_vec(), closed: false });
        self
    }

    /// Closed strand; the last point joins back to the first.
    pub fn closed(mut self, points: &[Point]) -> Self {
        self.strokes.push(Stroke { points: points.to_vec(), closed: true });
        self
    }

    fn segments(&self, k: usize) -> Vec<(Point, Point)> {
        let pts = &self.strokes[k].points;
        let mut segs: Vec<_> = pts.windows(2).map(|w| (w[0], w[1])).collect();
        if self.strokes[k].closed {
            segs.push((*pts.last().unwrap(), pts[0]));
        }
        segs
    }

    /// All intersections, ordered by their first pass.
    pub fn crossings(&self) -> Vec<CrossingInfo> {
        let segs: Vec<Vec<(Point, Point)>> = (0..self.strokes.len()).map(|k| self.segments(k)).collect();
        let mut found = Vec::new();
        for a in 0..segs.len() {
            for b in a..segs.len() {
                for (i, &(p, p2)) in segs[a].iter().enumerate() {
                    for (j, &(q, q2)) in segs[b].iter().enumerate() {
                        if a == b {
                            let n = segs[a].len();
                            let wraps = self.strokes[a].closed && i == 0 && j == n - 1;
                            if j <= i + 1 || wraps {
                                continue;
                            }
                        }
                        if let Some((t, u, pt)) = segment_intersection(p, p2, q, q2) {
                            found.push((
                                Pass { strand: a, param: i as f64 + t },
                                Pass { strand: b, param: j as f64 + u },
                                pt,
                            ));
                        }
                    }
                }
            }
        }
        found.sort_by(|x, y| {
            (x.0.strand, x.0.param).partial_cmp(&(y.0.strand, y.0.param)).expect("finite")
        });
        found
            .into_iter()
            .enumerate()
            .map(|(index, (first, second, point))| CrossingInfo { index, point, first, second })
            .collect()
    }

    pub fn build(&self, style: impl Fn(&CrossingInfo) -> Style) -> Result<TangleDiagram, DiagramError> {
        let crossings = self.crossings();

        // boundary points, counterclockwise by angle
        let mut ends: Vec<(f64, usize, bool)> = Vec::new();
        for (k, s) in self.strokes.iter().enumerate() {
            if !s.closed {
                for (pt, last) in [(s.points[0], false), (*s.points.last().unwrap(), true)] {
                    let mut ang = pt.1.atan2(pt.0);
                    if ang < 0.0 {
                        ang += std::f64::consts::TAU;
                    }
                    ends.push((ang, k, last));
                }
            }
        }
        ends.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite"));
        let nb = ends.len();
        let boundary_of = |k: usize, last: bool| {
            ends.iter().position(|&(_, kk, l)| kk == k && l == last).expect("endpoint")
        };

        let mut nodes = vec![NodeKind::Boundary; nb];
        // slot of each pass's incoming and outgoing dart, per crossing
        let mut slots: Vec<[(u8, u8); 2]> = Vec::new();
        for c in &crossings {
            let mut darts: Vec<(f64, usize, bool)> = Vec::new();
            for (w, pass) in [c.first, c.second].iter().enumerate() {
                let seg = self.segments(pass.strand)[pass.param.floor() as usize];
                let dir = (seg.1 .0 - seg.0 .0, seg.1 .1 - seg.0 .1);
                darts.push((dir.1.atan2(dir.0), w, true));
                darts.push(((-dir.1).atan2(-dir.0), w, false));
            }
            darts.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite"));
            let mut s = [(0u8, 0u8); 2];
            for (slot, &(_, w, out)) in darts.iter().enumerate() {
                if out {
                    s[w].1 = slot as u8;
                } else {
                    s[w].0 = slot as u8;
                }
            }
            slots.push(s);
            nodes.push(match style(c) {
                Style::Virtual => NodeKind::Virtual,
                Style::Classical { first_over } => {
                    let w = if first_over { 0 } else { 1 };
                    NodeKind::Classical { over: Diagonal::from_parity(s[w].1) }
                }
            });
        }

        let mut edges = Vec::new();
        let mut loops = 0;
        for (k, stroke) in self.strokes.iter().enumerate() {
            // (param, crossing, which pass)
            let mut events: Vec<(f64, usize, usize)> = Vec::new();
            for (ci, c) in crossings.iter().enumerate() {
                for (w, pass) in [c.first, c.second].iter().enumerate() {
                    if pass.strand == k {
                        events.push((pass.param, ci, w));
                    }
                }
            }
            events.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite"));
            let inc = |&(_, ci, w): &(f64, usize, usize)| End::new(nb + ci, slots[ci][w].0);
            let out = |&(_, ci, w): &(f64, usize, usize)| End::new(nb + ci, slots[ci][w].1);
            if stroke.closed {
                if events.is_empty() {
                    loops += 1;
                    continue;
                }
                for i in 0..events.len() {
                    let next = &events[(i + 1) % events.len()];
                    edges.push(Edge { tail: out(&events[i]), head: inc(next) });
                }
            } else {
                let mut prev = End::new(boundary_of(k, false), 0);
                for ev in &events {
                    edges.push(Edge { tail: prev, head: inc(ev) });
                    prev = out(ev);
                }
                edges.push(Edge { tail: prev, head: End::new(boundary_of(k, true), 0) });
            }
        }
        TangleDiagram::new(nodes, edges, (0..nb).collect(), loops)
    }
}

/// Point on the unit circle at `deg` degrees.
pub fn on_circle(deg: f64) -> Point {
    let r = deg.to_radians();
    (r.cos(), r.sin())
}
