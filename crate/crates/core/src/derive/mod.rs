//! Derivation certificates: a target move realized as a finite sequence of
//! allowed moves, found by bounded search and checked by replay.

mod certificate;
mod manifest;
mod search;

use serde::Serialize;

use crate::diagram::TangleDiagram;
use crate::error::DeriveError;
use crate::moves::{Catalog, Direction, MoveId};

pub use certificate::{check_certificate, CheckReport, Replay};
pub use manifest::{default_manifest, DEFAULT_MANIFEST, parse_manifest, run_lemma_manifest, ManifestRow, ManifestReport, RowReport};
pub use search::{search, BoundHit, SearchOutcome, SearchStats};

/// Extra crossings allowed above the target's left-hand side by default.
pub const DEFAULT_DETOUR: usize = 6;
pub const DEFAULT_MAX_DEPTH: usize = 24;

/// Realize `target`'s left-hand side → right-hand side using `allowed`.
#[derive(Clone, Debug)]
pub struct DerivationProblem {
    pub target: MoveId,
    pub source: TangleDiagram,
    pub goal: TangleDiagram,
    pub allowed: Vec<MoveId>,
    pub max_crossings: usize,
    pub max_depth: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub max_crossings: Option<usize>,
    pub max_depth: Option<usize>,
}

impl DerivationProblem {
    /// The problem for one catalog move. Missing bounds take the defaults:
    /// lhs crossings plus [`DEFAULT_DETOUR`], depth [`DEFAULT_MAX_DEPTH`].
    pub fn for_move(
        catalog: &Catalog,
        target: MoveId,
        allowed: &[MoveId],
        bounds: Bounds,
    ) -> Result<Self, DeriveError> {
        let schema = catalog.get(target);
        let mut allowed = allowed.to_vec();
        allowed.sort();
        allowed.dedup();
        let p = DerivationProblem {
            target,
            source: schema.lhs.clone(),
            goal: schema.rhs.clone(),
            allowed,
            max_crossings: bounds.max_crossings.unwrap_or(schema.lhs.crossing_count() + DEFAULT_DETOUR),
            max_depth: bounds.max_depth.unwrap_or(DEFAULT_MAX_DEPTH),
        };
        p.check()?;
        Ok(p)
    }

    fn check(&self) -> Result<(), DeriveError> {
        if self.source.boundary_signature() != self.goal.boundary_signature() {
            return Err(DeriveError::SignatureMismatch);
        }
        for d in [&self.source, &self.goal] {
            if d.crossing_count() > self.max_crossings {
                return Err(DeriveError::BoundsTooTight { crossings: d.crossing_count(), max: self.max_crossings });
            }
        }
        Ok(())
    }
}

/// One rewrite: apply `id` in `dir` at match `site` of the current
/// diagram's canonical form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Step {
    pub id: MoveId,
    pub dir: Direction,
    pub site: usize,
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub problem: DerivationProblem,
    pub steps: Vec<Step>,
}

impl Certificate {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

pub use certificate::{parse_certificate, splice, write_certificate};
