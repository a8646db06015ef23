//! Oriented variants of the unoriented move pictures.
//!
//! Each family has one unoriented seed drawn as polylines. A variant picks a
//! direction for every strand and, where the picture leaves it open, the
//! over/under choice at the classical crossings. Variants that differ only
//! by turning the disk are merged.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::canon::{code_unchecked, CanonicalCode};
use crate::diagram::TangleDiagram;
use crate::sketch::{on_circle, CrossingInfo, Point, Sketch, Style};

use super::MoveFamily;

/// Which boundary rotations identify two variants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quotient {
    /// Turning the disk by half a turn, with a move read in either
    /// direction. This gives the standard variant counts.
    HalfTurn,
    /// Any cyclic shift of the boundary, sides kept in order.
    AllRotations,
}

/// One oriented variant of a family.
#[derive(Clone, Debug)]
pub struct Variant {
    pub family: MoveFamily,
    pub lhs: TangleDiagram,
    pub rhs: TangleDiagram,
    pub lhs_code: CanonicalCode,
    pub rhs_code: CanonicalCode,
}

/// Crossing choices of a seed, decided per drawn crossing.
#[derive(Clone, Copy)]
enum Crossings {
    AllVirtual,
    /// Every crossing classical. The first pass (lower strand number, or
    /// earlier along a self-crossing strand) is over when `low_over` is set;
    /// `moving_over` puts strand 0 over everything it meets.
    Classical { low_over: bool, moving_over: bool },
    /// Crossings of strand 0 are virtual, the rest classical.
    Mixed { low_over: bool },
}

impl Crossings {
    fn style(self, c: &CrossingInfo) -> Style {
        let moving = c.first.strand == 0 && c.second.strand != 0;
        match self {
            Crossings::AllVirtual => Style::Virtual,
            Crossings::Classical { low_over, moving_over } => {
                if moving && moving_over {
                    Style::Classical { first_over: true }
                } else {
                    Style::Classical { first_over: low_over }
                }
            }
            Crossings::Mixed { low_over } => {
                if moving {
                    Style::Virtual
                } else {
                    Style::Classical { first_over: low_over }
                }
            }
        }
    }
}

struct Seed {
    lhs: Vec<Vec<Point>>,
    rhs: Vec<Vec<Point>>,
    choices: Vec<Crossings>,
}

fn kink_seed(choices: Vec<Crossings>) -> Seed {
    Seed {
        lhs: vec![vec![on_circle(180.0), on_circle(0.0)]],
        rhs: vec![vec![
            on_circle(180.0),
            (0.1, 0.0),
            (0.5, 0.5),
            (0.0, 0.8),
            (-0.5, 0.5),
            (0.1, -0.1),
            on_circle(0.0),
        ]],
        choices,
    }
}

fn bigon_seed(choices: Vec<Crossings>) -> Seed {
    let (tl, tr, bl, br) = (on_circle(150.0), on_circle(30.0), on_circle(210.0), on_circle(330.0));
    Seed {
        lhs: vec![vec![tl, tr], vec![bl, br]],
        rhs: vec![vec![tl, (-0.3, -0.8), (0.3, -0.8), tr], vec![bl, br]],
        choices,
    }
}

/// Strand 0 sweeps across the crossing of strands 1 and 2.
fn triangle_seed(choices: Vec<Crossings>) -> Seed {
    let (top, bottom) = (on_circle(120.0), on_circle(240.0));
    let a = vec![on_circle(200.0), on_circle(20.0)];
    let b = vec![on_circle(340.0), on_circle(160.0)];
    Seed {
        lhs: vec![vec![bottom, top], a.clone(), b.clone()],
        rhs: vec![vec![bottom, (0.4, -0.3), (0.4, 0.3), top], a, b],
        choices,
    }
}

fn seed(family: MoveFamily) -> Seed {
    use Crossings::*;
    let both = |f: fn(bool) -> Crossings| vec![f(true), f(false)];
    match family {
        MoveFamily::V1 => kink_seed(vec![AllVirtual]),
        MoveFamily::C1 => kink_seed(both(|o| Classical { low_over: o, moving_over: false })),
        MoveFamily::V2 => bigon_seed(vec![AllVirtual]),
        MoveFamily::C2 => bigon_seed(both(|o| Classical { low_over: o, moving_over: false })),
        MoveFamily::V3 => triangle_seed(vec![AllVirtual]),
        MoveFamily::V4 => triangle_seed(both(|o| Mixed { low_over: o })),
        MoveFamily::C3 => triangle_seed(both(|o| Classical { low_over: o, moving_over: true })),
    }
}

fn draw(strokes: &[Vec<Point>], flips: u32, choice: Crossings) -> TangleDiagram {
    let mut sk = Sketch::new();
    for (k, s) in strokes.iter().enumerate() {
        let mut pts = s.clone();
        if flips >> k & 1 == 1 {
            pts.reverse();
        }
        sk = sk.arc(&pts);
    }
    sk.build(|c| choice.style(c)).expect("seed drawings are valid tangles")
}

fn half_turn(d: &TangleDiagram) -> TangleDiagram {
    d.rotate_boundary(d.boundary().len() / 2).expect("seeds are tangles")
}

/// Every oriented variant of the seed before any quotient.
fn raw_variants(family: MoveFamily) -> Vec<Variant> {
    let s = seed(family);
    let mut out = Vec::new();
    for flips in 0..1u32 << s.lhs.len() {
        for &choice in &s.choices {
            let lhs = draw(&s.lhs, flips, choice);
            let rhs = draw(&s.rhs, flips, choice);
            let (lhs_code, rhs_code) = (code_unchecked(&lhs), code_unchecked(&rhs));
            out.push(Variant { family, lhs, rhs, lhs_code, rhs_code });
        }
    }
    out
}

fn orbit_key(v: &Variant, q: Quotient) -> (CanonicalCode, CanonicalCode) {
    let n = v.lhs.boundary().len();
    match q {
        Quotient::HalfTurn => {
            let unordered = |a: CanonicalCode, b: CanonicalCode| if a <= b { (a, b) } else { (b, a) };
            let here = unordered(v.lhs_code.clone(), v.rhs_code.clone());
            let turned = unordered(code_unchecked(&half_turn(&v.lhs)), code_unchecked(&half_turn(&v.rhs)));
            here.min(turned)
        }
        Quotient::AllRotations => (0..n)
            .map(|k| {
                let l = v.lhs.rotate_boundary(k).expect("tangle");
                let r = v.rhs.rotate_boundary(k).expect("tangle");
                (code_unchecked(&l), code_unchecked(&r))
            })
            .min()
            .expect("nonempty boundary"),
    }
}

/// One representative per orbit, sorted by lhs code then rhs code.
pub fn enumerate_with(family: MoveFamily, quotient: Quotient) -> Vec<Variant> {
    let mut orbits: BTreeMap<(CanonicalCode, CanonicalCode), Variant> = BTreeMap::new();
    for v in raw_variants(family) {
        let key = orbit_key(&v, quotient);
        match orbits.get(&key) {
            Some(rep) if (&rep.lhs_code, &rep.rhs_code) <= (&v.lhs_code, &v.rhs_code) => {}
            _ => {
                orbits.insert(key, v);
            }
        }
    }
    let mut out: Vec<Variant> = orbits.into_values().collect();
    out.sort_by(|a, b| (&a.lhs_code, &a.rhs_code).cmp(&(&b.lhs_code, &b.rhs_code)));
    out
}

/// Oriented variants of a family under the half-turn quotient.
pub fn enumerate_oriented_variants(family: MoveFamily) -> Vec<Variant> {
    enumerate_with(family, Quotient::HalfTurn)
}
