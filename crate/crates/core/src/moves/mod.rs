//! Oriented Reidemeister move schemas: enumeration, catalog, matching and
//! rewriting.

mod catalog;
mod enumerate;
mod rewrite;
mod site;

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::diagram::{BoundarySignature, TangleDiagram};
use crate::error::MoveError;

pub use catalog::{catalog, Catalog, DEFAULT_MOVES_MAP};
pub use enumerate::{enumerate_oriented_variants, enumerate_with, Quotient, Variant};
pub use rewrite::{apply_move, inverse_site, replace_at, Rewrite};
pub use site::{find_matches, EdgeRef, MatchSite, Occurrence};

pub(crate) use rewrite::apply_unchecked;
pub(crate) use site::Shape;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveFamily {
    C1,
    C2,
    C3,
    V1,
    V2,
    V3,
    V4,
}

impl MoveFamily {
    pub const ALL: [MoveFamily; 7] = [
        MoveFamily::C1,
        MoveFamily::C2,
        MoveFamily::C3,
        MoveFamily::V1,
        MoveFamily::V2,
        MoveFamily::V3,
        MoveFamily::V4,
    ];

    pub fn is_virtual(self) -> bool {
        matches!(self, MoveFamily::V1 | MoveFamily::V2 | MoveFamily::V3 | MoveFamily::V4)
    }

    /// Number of oriented variants, and the last variant letter.
    pub fn variant_count(self) -> usize {
        match self {
            MoveFamily::C1 | MoveFamily::C2 => 4,
            MoveFamily::C3 => 8,
            MoveFamily::V1 => 2,
            MoveFamily::V2 => 3,
            MoveFamily::V3 => 4,
            MoveFamily::V4 => 8,
        }
    }

    pub fn ids(self) -> impl Iterator<Item = MoveId> {
        (0..self.variant_count() as u8).map(move |i| MoveId { family: self, variant: (b'a' + i) as char })
    }
}

impl fmt::Display for MoveFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for MoveFamily {
    type Err = MoveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MoveFamily::ALL
            .into_iter()
            .find(|f| f.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| MoveError::UnknownMoveId(s.to_string()))
    }
}

/// Family plus variant letter, e.g. `V4g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MoveId {
    pub family: MoveFamily,
    pub variant: char,
}

impl MoveId {
    pub fn new(family: MoveFamily, variant: char) -> Result<Self, MoveError> {
        let last = (b'a' + family.variant_count() as u8 - 1) as char;
        if ('a'..=last).contains(&variant) {
            Ok(MoveId { family, variant })
        } else {
            Err(MoveError::UnknownMoveId(format!("{family}{variant}")))
        }
    }

    /// Every id in catalog order.
    pub fn all() -> impl Iterator<Item = MoveId> {
        MoveFamily::ALL.into_iter().flat_map(MoveFamily::ids)
    }
}

impl fmt::Display for MoveId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family, self.variant)
    }
}

impl FromStr for MoveId {
    type Err = MoveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || MoveError::UnknownMoveId(s.to_string());
        if s.len() != 3 || !s.is_ascii() {
            return Err(bad());
        }
        let family: MoveFamily = s[..2].parse().map_err(|_| bad())?;
        let variant = s.as_bytes()[2].to_ascii_lowercase() as char;
        MoveId::new(family, variant).map_err(|_| bad())
    }
}

impl Serialize for MoveId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Which side of a schema is matched.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Match the left-hand side, replace it by the right-hand side.
    Forward,
    Backward,
}

impl Direction {
    pub fn reversed(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        })
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "forward" | "fwd" | "f" => Ok(Direction::Forward),
            "backward" | "bwd" | "back" | "b" => Ok(Direction::Backward),
            _ => Err(format!("unknown direction {s:?}")),
        }
    }
}

/// A move: two tangles with the same boundary, usable in both directions.
#[derive(Clone, Debug)]
pub struct MoveSchema {
    pub id: MoveId,
    pub lhs: TangleDiagram,
    pub rhs: TangleDiagram,
    lhs_shape: Shape,
    rhs_shape: Shape,
}

impl MoveSchema {
    pub fn new(id: MoveId, lhs: TangleDiagram, rhs: TangleDiagram) -> Self {
        assert_eq!(lhs.boundary_signature(), rhs.boundary_signature(), "schema sides must share a boundary");
        let lhs_shape = Shape::of(&lhs);
        let rhs_shape = Shape::of(&rhs);
        MoveSchema { id, lhs, rhs, lhs_shape, rhs_shape }
    }

    pub fn signature(&self) -> BoundarySignature {
        self.lhs.boundary_signature()
    }

    /// Pattern and replacement for a direction.
    pub fn sides(&self, dir: Direction) -> (&TangleDiagram, &TangleDiagram) {
        match dir {
            Direction::Forward => (&self.lhs, &self.rhs),
            Direction::Backward => (&self.rhs, &self.lhs),
        }
    }

    pub(crate) fn shape(&self, dir: Direction) -> &Shape {
        match dir {
            Direction::Forward => &self.lhs_shape,
            Direction::Backward => &self.rhs_shape,
        }
    }

    /// Change in crossing count when applied in `dir`.
    pub fn crossing_delta(&self, dir: Direction) -> isize {
        let (p, r) = self.sides(dir);
        r.crossing_count() as isize - p.crossing_count() as isize
    }
}
