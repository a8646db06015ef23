//! Oriented virtual knot diagrams as planar maps, the catalog of oriented
//! Reidemeister moves, a rewriting engine, derivation search with
//! replayable certificates, and invariance audits.

pub mod canon;
pub mod derive;
pub mod diagram;
pub mod error;
pub mod invariants;
pub mod moves;
pub mod sketch;
pub mod tdf;

pub use canon::{canonical_form, canonicalize, code_key, is_equivalent, CanonicalCode, CodeKey};
pub use diagram::{
    BoundarySignature, Diagonal, Edge, End, Flow, NodeId, NodeKind, Rule, TangleDiagram, ValidationReport,
    Violation,
};
pub use error::{DeriveError, DiagramError, GaussError, MoveError, TdfError};
pub use moves::{
    apply_move, catalog, enumerate_oriented_variants, find_matches, Catalog, Direction, MatchSite, MoveFamily,
    MoveId, MoveSchema,
};
pub use invariants::{
    audit_invariance, extract_gauss_code, odd_writhe, random_corpus, random_diagram, AuditReport, GaussCode, Invariant,
};
pub use tdf::{parse_tdf, serialize_tdf};
