//! JSON descriptors: `{"family":"NN","n":10,"k":5,"heights":[...]}` or
//! `{"family":"SET","n":4,"move_sets":[[1,2],[2,3],[4]]}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::position::Position;
use crate::spec::{Family, GameSpec};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Descriptor {
    pub family: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<usize>,
    /// 1-based, generic family only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub move_sets: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heights: Option<Vec<u64>>,
}

/// Family from a tag and its parameters. Tags are case-insensitive.
pub fn family_from_tag(tag: &str, n: usize, k: Option<usize>, c: Option<usize>) -> Result<Family> {
    let need_k = || k.ok_or_else(|| Error::Parameter(format!("family {tag} needs k")));
    Ok(match tag.to_ascii_uppercase().as_str() {
        "NIM" => Family::Nim { n },
        "MOORE" => Family::Moore { n, k: need_k()? },
        "CN" => Family::Circular { n, k: need_k()? },
        "PN" => Family::Path { n, k: need_k()? },
        "NN" => Family::Necklace { n, k: need_k()? },
        "NNG" => Family::Clasp {
            n,
            k: need_k()?,
            c: c.ok_or_else(|| Error::Parameter("family NNG needs c".into()))?,
        },
        "SET" => Family::Generic,
        other => {
            return Err(Error::Parameter(format!(
                "unknown family {other:?}; expected NN, PN, CN, NNG, NIM, MOORE or SET"
            )))
        }
    })
}

impl Descriptor {
    pub fn spec(&self) -> Result<GameSpec> {
        match family_from_tag(&self.family, self.n, self.k, self.c)? {
            Family::Generic => {
                let sets = self
                    .move_sets
                    .as_ref()
                    .ok_or_else(|| Error::Parameter("family SET needs move_sets".into()))?;
                GameSpec::generic(self.n, sets)
            }
            f => GameSpec::build(f),
        }
    }

    /// The spec and, if present, the position checked against it.
    pub fn resolve(&self) -> Result<(GameSpec, Option<Position>)> {
        let spec = self.spec()?;
        let pos = match &self.heights {
            Some(h) => {
                let p = Position::new(h.clone());
                spec.check_position(&p)?;
                Some(p)
            }
            None => None,
        };
        Ok((spec, pos))
    }

    pub fn of(spec: &GameSpec, pos: Option<&Position>) -> Self {
        let (k, c) = match spec.family() {
            Family::Moore { k, .. }
            | Family::Circular { k, .. }
            | Family::Path { k, .. }
            | Family::Necklace { k, .. } => (Some(k), None),
            Family::Clasp { k, c, .. } => (Some(k), Some(c)),
            Family::Nim { .. } | Family::Generic => (None, None),
        };
        Descriptor {
            family: spec.family().tag().to_string(),
            n: spec.n(),
            k,
            c,
            move_sets: matches!(spec.family(), Family::Generic).then(|| spec.move_sets_one_based()),
            heights: pos.map(|p| p.heights().to_vec()),
        }
    }
}
