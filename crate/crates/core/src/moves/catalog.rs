//! The 33 named moves. Letters come from a mapping file keyed by canonical
//! codes, so relabeling never touches code.

use std::collections::HashMap;
use std::sync::OnceLock;

use crate::error::MoveError;

use super::enumerate::{enumerate_oriented_variants, Variant};
use super::{MoveFamily, MoveId, MoveSchema};

/// The mapping shipped with the crate.
pub const DEFAULT_MOVES_MAP: &str = include_str!("../../data/moves.map");

#[derive(Clone, Debug)]
pub struct Catalog {
    /// In `MoveId::all()` order.
    schemas: Vec<MoveSchema>,
}

struct Entry {
    line: usize,
    id: MoveId,
    lhs: String,
    rhs: String,
}

fn parse_map(text: &str) -> Result<Vec<Entry>, MoveError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let syntax = |message: &str| MoveError::MappingSyntax { line, message: message.to_string() };
        let (id, codes) = body.split_once(char::is_whitespace).ok_or_else(|| syntax("expected `<id> <lhs>|<rhs>`"))?;
        let id: MoveId = id.parse().map_err(|_| syntax(&format!("unknown move id {id:?}")))?;
        let (lhs, rhs) = codes.trim().split_once('|').ok_or_else(|| syntax("codes must be separated by `|`"))?;
        out.push(Entry { line, id, lhs: lhs.trim().to_string(), rhs: rhs.trim().to_string() });
    }
    Ok(out)
}

impl Catalog {
    /// Labels the enumerated variants with the letters in `map`.
    pub fn from_map(map: &str) -> Result<Self, MoveError> {
        let entries = parse_map(map)?;
        let mut by_id: HashMap<MoveId, Variant> = HashMap::new();
        for family in MoveFamily::ALL {
            let variants = enumerate_oriented_variants(family);
            let mut claimed: Vec<Option<MoveId>> = vec![None; variants.len()];
            for e in entries.iter().filter(|e| e.id.family == family) {
                let k = variants
                    .iter()
                    .position(|v| v.lhs_code.0 == e.lhs && v.rhs_code.0 == e.rhs)
                    .ok_or_else(|| MoveError::MappingInconsistent { line: e.line, id: e.id.to_string() })?;
                if by_id.contains_key(&e.id) {
                    return Err(MoveError::MappingSyntax { line: e.line, message: format!("{} labeled twice", e.id) });
                }
                if let Some(prev) = claimed[k] {
                    return Err(MoveError::MappingSyntax {
                        line: e.line,
                        message: format!("{} labels the same variant as {prev}", e.id),
                    });
                }
                claimed[k] = Some(e.id);
                by_id.insert(e.id, variants[k].clone());
            }
            if let Some(k) = claimed.iter().position(Option::is_none) {
                return Err(MoveError::MappingIncomplete {
                    family: family.to_string(),
                    codes: format!("{}|{}", variants[k].lhs_code, variants[k].rhs_code),
                });
            }
        }
        let schemas = MoveId::all()
            .map(|id| {
                let v = by_id.remove(&id).expect("every variant labeled and counts match the letter ranges");
                MoveSchema::new(id, v.lhs, v.rhs)
            })
            .collect();
        Ok(Catalog { schemas })
    }

    pub fn schemas(&self) -> &[MoveSchema] {
        &self.schemas
    }

    pub fn len(&self) -> usize {
        self.schemas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.schemas.is_empty()
    }

    pub fn get(&self, id: MoveId) -> &MoveSchema {
        self.schemas.iter().find(|s| s.id == id).expect("catalog covers every id")
    }

    pub fn lookup(&self, id: &str) -> Result<&MoveSchema, MoveError> {
        Ok(self.get(id.parse()?))
    }

    /// Renders the catalog as a mapping file.
    pub fn to_map(&self) -> String {
        let mut s = String::new();
        for m in &self.schemas {
            s.push_str(&format!("{} {}|{}\n", m.id, crate::canon::code_unchecked(&m.lhs), crate::canon::code_unchecked(&m.rhs)));
        }
        s
    }
}

/// The catalog built from [`DEFAULT_MOVES_MAP`].
pub fn catalog() -> &'static Catalog {
    static CATALOG: OnceLock<Catalog> = OnceLock::new();
    CATALOG.get_or_init(|| Catalog::from_map(DEFAULT_MOVES_MAP).expect("bundled moves.map is complete"))
}
